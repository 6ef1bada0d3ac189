//! Benchmark suites: generator × solver × seeds, aggregated per cell.

use super::{generate, solve, verify_report, Command, GenParams, Kind, SolveOptions};
use crate::error::SolveError;
use crate::rational::{to_f64, Q};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Suite {
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cell {
    #[serde(default)]
    pub name: Option<String>,
    pub generator: Kind,
    #[serde(default)]
    pub params: GenParams,
    pub solver: SolveOptions,
    pub seeds: Vec<u64>,
}

impl Cell {
    pub fn key(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            let g = serde_json::to_value(self.generator).expect("kind");
            format!("{}/n{}/{}", g.as_str().unwrap_or_default(), self.params.n, self.solver.solver_name())
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub cell: String,
    pub runs: usize,
    /// solved, re-verified, and within the guarantee when an oracle ran
    pub success_rate: f64,
    pub mean_ratio: Option<f64>,
    pub min_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
    pub infeasible: usize,
    pub errors: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_ms: Option<f64>,
}

fn within_guarantee(cmd: Command, eps: &Q, ratio: f64) -> bool {
    let e = to_f64(eps);
    match cmd {
        Command::Kstroll | Command::ExactKstroll => ratio <= 1.0 + e + 1e-9,
        _ => ratio >= 1.0 - e - 1e-9,
    }
}

fn run_cell(cell: &Cell) -> BenchRow {
    let (mut ok, mut infeasible, mut errors) = (0, 0, 0);
    let mut ratios = Vec::new();
    let mut ms = Vec::new();
    for &seed in &cell.seeds {
        let outcome = generate(cell.generator, &cell.params, seed).and_then(|f| f.parse()).and_then(|inst| {
            let mut o = cell.solver.clone();
            o.seed = seed;
            let r = solve(&inst, &o)?;
            let v = verify_report(&inst, &r)?;
            Ok((r, v.ok))
        });
        match outcome {
            Ok((r, verified)) => {
                ms.extend(r.wall_ms);
                let good = r.ratio.is_none_or(|x| within_guarantee(cell.solver.command, &cell.solver.epsilon, x));
                if verified && good {
                    ok += 1;
                }
                ratios.extend(r.ratio);
            }
            Err(SolveError::Infeasible(_)) => infeasible += 1,
            Err(_) => errors += 1,
        }
    }
    let runs = cell.seeds.len();
    let mean = |xs: &[f64]| (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64);
    BenchRow {
        cell: cell.key(),
        runs,
        success_rate: if runs == 0 { 0.0 } else { ok as f64 / runs as f64 },
        mean_ratio: mean(&ratios),
        min_ratio: ratios.iter().copied().reduce(f64::min),
        max_ratio: ratios.iter().copied().reduce(f64::max),
        infeasible,
        errors,
        mean_ms: mean(&ms),
    }
}

/// Runs every cell in order; rows come back sorted by cell key.
pub fn run_suite(suite: &Suite) -> Vec<BenchRow> {
    let mut rows: Vec<BenchRow> = suite.cells.iter().map(run_cell).collect();
    rows.sort_by(|a, b| a.cell.cmp(&b.cell));
    rows
}

pub fn to_csv(rows: &[BenchRow]) -> Result<String, SolveError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let opt = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_default();
    w.write_record(["cell", "runs", "success_rate", "mean_ratio", "min_ratio", "max_ratio", "infeasible", "errors", "mean_ms"])
        .map_err(|e| SolveError::Config(e.to_string()))?;
    for r in rows {
        w.write_record([
            r.cell.clone(),
            r.runs.to_string(),
            format!("{:.6}", r.success_rate),
            opt(r.mean_ratio),
            opt(r.min_ratio),
            opt(r.max_ratio),
            r.infeasible.to_string(),
            r.errors.to_string(),
            opt(r.mean_ms),
        ])
        .map_err(|e| SolveError::Config(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| SolveError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Backend;

    #[test]
    fn empty_suite_gives_empty_table() {
        assert!(run_suite(&Suite::default()).is_empty());
        assert_eq!(to_csv(&[]).unwrap().lines().count(), 1);
    }

    #[test]
    fn treewidth_cell_is_exact_and_repeatable() {
        let mut solver = SolveOptions::new(Command::Kstroll);
        solver.backend = Backend::Treewidth;
        solver.oracle = true;
        solver.timing = false;
        let cell = Cell {
            name: None,
            generator: Kind::LowTreewidth,
            params: GenParams { n: 8, k_min: Some(3), with_end: true, ..GenParams::default() },
            solver,
            seeds: (0..4).collect(),
        };
        let suite = Suite { cells: vec![cell] };
        let rows = run_suite(&suite);
        assert_eq!(rows[0].success_rate, 1.0);
        assert_eq!((rows[0].min_ratio, rows[0].max_ratio), (Some(1.0), Some(1.0)));
        assert_eq!(rows, run_suite(&suite));
    }
}
