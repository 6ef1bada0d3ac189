use clap::{Args, Parser, Subcommand, ValueEnum};
use orienteer::doubling::{build_tree, SolverConfig};
use orienteer::error::SolveError;
use orienteer::harness::{self, Backend, CalibrationReport, Command, DeadlineMode, GenParams, Kind, RunReport, SolveOptions, Suite};
use orienteer::instance::Instance;
use orienteer::rational::{parse_rational, Q};
use orienteer::treewidth::{heuristic_tree_decomposition, validate_tree_decomposition, Graph};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "orienteer", version, about = "k-stroll, orienteering and deadline TSP solvers")]
struct Cli {
    /// print machine-readable JSON only
    #[arg(long, global = true)]
    json: bool,
    /// seed for generators, partitions and decompositions
    #[arg(long, global = true, env = "ORIENTEER_SEED", default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a seeded instance
    Gen {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// generator parameters as a JSON object (fields override --n)
        #[arg(long)]
        params: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve an instance and emit a run report
    Solve(SolveArgs),
    /// Run a benchmark suite
    Bench {
        suite: PathBuf,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the pair separation constant of random partitions
    Calibrate {
        instance: PathBuf,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump a split tree or a tree decomposition
    Decompose {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = DecompKind::SplitTree)]
        kind: DecompKind,
        #[arg(long)]
        gamma: Option<usize>,
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// Re-simulate a run report against its instance
    Verify { instance: PathBuf, report: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecompKind {
    SplitTree,
    TreeDecomposition,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(value_enum)]
    command: Command,
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Backend::Doubling)]
    backend: Backend,
    #[arg(long, value_enum, default_value_t = DeadlineMode::ExactDeadlines)]
    mode: DeadlineMode,
    #[arg(long, default_value = "1/2")]
    epsilon: String,
    #[arg(long)]
    gamma: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    budget: Option<String>,
    #[arg(long, default_value_t = 4)]
    m_max: usize,
    #[arg(long)]
    max_guesses: Option<usize>,
    #[arg(long)]
    kappa_prime: Option<u32>,
    /// take κ' from a calibration report
    #[arg(long)]
    calibration: Option<PathBuf>,
    #[arg(long)]
    crossing_cap: Option<usize>,
    /// compare with the exact oracle
    #[arg(long)]
    oracle: bool,
    /// deadline: skeleton from the exact oracle's walk
    #[arg(long)]
    oracle_guess: bool,
    /// deadline: skeleton from this comma-separated walk of node ids
    #[arg(long, value_delimiter = ',')]
    guess_path: Option<Vec<String>>,
    #[arg(long)]
    exact_small_groups: bool,
    #[arg(long)]
    exclude_start: bool,
    #[arg(long)]
    exclude_endpoints: bool,
    /// leave wall time out of the report
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Input(String),
    Infeasible(String),
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Infeasible(m) => Failure::Infeasible(m),
            e => Failure::Input(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn rational(text: &str) -> Result<Q, Failure> {
    parse_rational(text).ok_or_else(|| Failure::Input(format!("not a rational: {text:?}")))
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn summary(r: &RunReport) -> String {
    let mut s = format!("{} on {:?}: value {}", r.solver, r.instance, r.value());
    if let Some(o) = &r.oracle {
        s += &format!(", oracle {}, ratio {:.4}", o.0, r.ratio.unwrap_or(f64::NAN));
    }
    s += &format!(", certified {}\nwalk {}\n", r.result.certified, r.result.walk.join(" "));
    s
}

fn solve_cmd(a: SolveArgs, seed: u64, json: bool) -> Result<(), Failure> {
    let inst = Instance::load(&a.instance)?;
    let mut o = SolveOptions::new(a.command);
    o.backend = a.backend;
    o.mode = a.mode;
    o.epsilon = rational(&a.epsilon)?;
    o.gamma = a.gamma;
    o.k = a.k;
    o.budget = a.budget;
    o.m_max = a.m_max;
    if let Some(g) = a.max_guesses {
        o.max_guesses = g;
    }
    o.kappa_prime = a.kappa_prime;
    if let Some(p) = &a.calibration {
        let v: serde_json::Value = serde_json::from_str(&read(p)?).map_err(|e| Failure::Input(format!("calibration: {e}")))?;
        let k = v["kappa_prime"].as_u64().ok_or_else(|| Failure::Input("calibration report lacks kappa_prime".into()))?;
        o.kappa_prime = Some(k as u32);
    }
    o.crossing_cap = a.crossing_cap;
    o.oracle = a.oracle;
    o.oracle_guess_exact = a.oracle_guess;
    o.oracle_guess = a.guess_path;
    o.exact_small_groups = a.exact_small_groups;
    o.exclude_start = a.exclude_start;
    o.exclude_endpoints = a.exclude_endpoints;
    o.timing = !a.no_timing;
    o.seed = seed;
    let report = harness::solve(&inst, &o)?;
    let text = if json || a.out.is_some() { report.to_json() } else { summary(&report) };
    emit(a.out.as_deref(), &text)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let seed = cli.seed;
    match cli.cmd {
        Cmd::Gen { kind, n, params, out } => {
            let p: GenParams = match params {
                Some(text) => {
                    let mut v: serde_json::Value = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("params: {e}")))?;
                    if v.get("n").is_none() {
                        v["n"] = n.into();
                    }
                    serde_json::from_value(v).map_err(|e| Failure::Input(format!("params: {e}")))?
                }
                None => GenParams { n, ..GenParams::default() },
            };
            let file = harness::generate(kind, &p, seed)?;
            emit(out.as_deref(), &file.to_json())
        }
        Cmd::Solve(a) => solve_cmd(a, seed, cli.json),
        Cmd::Bench { suite, format, out } => {
            let suite: Suite = serde_json::from_str(&read(&suite)?).map_err(|e| Failure::Input(format!("suite: {e}")))?;
            let rows = harness::run_suite(&suite);
            let text = match format {
                TableFormat::Csv => harness::to_csv(&rows)?,
                TableFormat::Json => pretty(&rows),
            };
            emit(out.as_deref(), &text)
        }
        Cmd::Calibrate { instance, trials, out } => {
            let inst = Instance::load(&instance)?;
            let r: CalibrationReport = harness::calibrate(&inst.metric, trials, seed)?;
            let text = if cli.json || out.is_some() {
                pretty(&r)
            } else {
                format!("kappa_fit {:.4}, 3σ upper {:.4}, suggested kappa_prime {}\n", r.kappa_fit, r.kappa_upper, r.kappa_prime)
            };
            emit(out.as_deref(), &text)
        }
        Cmd::Decompose { instance, kind, gamma, epsilon } => {
            let inst = Instance::load(&instance)?;
            let m = &inst.metric;
            let v = match kind {
                DecompKind::SplitTree => {
                    let cfg = SolverConfig { eps: epsilon.as_deref().map(rational).transpose()?.unwrap_or(Q::new(1, 2)), seed, ..SolverConfig::default() };
                    let params = cfg.resolve(m)?;
                    let tree = build_tree(m, &params, gamma.unwrap_or(params.gamma))?;
                    let mut v = tree.to_json();
                    v["valid"] = tree.validate(m).err().map_or(serde_json::Value::Bool(true), serde_json::Value::String);
                    v
                }
                DecompKind::TreeDecomposition => {
                    let g = Graph::from_metric(m);
                    let td = inst.decomposition.clone().unwrap_or_else(|| heuristic_tree_decomposition(&g));
                    let labelled: Vec<Vec<&str>> = td.bags.iter().map(|b| b.iter().map(|&x| m.label(x)).collect()).collect();
                    serde_json::json!({
                        "width": td.width(),
                        "bags": labelled,
                        "bag_tree": td.tree,
                        "valid": validate_tree_decomposition(&g, &td).map_or_else(|e| serde_json::Value::String(e.to_string()), |_| true.into()),
                    })
                }
            };
            emit(None, &pretty(&v))
        }
        Cmd::Verify { instance, report } => {
            let inst = Instance::load(&instance)?;
            let r: RunReport = serde_json::from_str(&read(&report)?).map_err(|e| Failure::Input(format!("report: {e}")))?;
            let outcome = harness::verify_report(&inst, &r)?;
            let text = if cli.json { pretty(&outcome) } else if outcome.ok { "ok\n".into() } else { outcome.failures.join("\n") + "\n" };
            emit(None, &text)?;
            if outcome.ok {
                Ok(())
            } else {
                Err(Failure::Input("report does not re-simulate".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, kind, msg) = match f {
                Failure::Infeasible(m) => (2, "infeasible", m),
                Failure::Input(m) => (1, "error", m),
            };
            if json {
                println!("{}", serde_json::json!({ "status": kind, "message": msg }));
            } else {
                eprintln!("{kind}: {msg}");
            }
            ExitCode::from(code)
        }
    }
}
