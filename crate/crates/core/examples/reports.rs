//! Generate an instance, solve it with an oracle comparison and re-verify the report.

use orienteer::harness::{generate, solve, verify_report, Backend, Command, GenParams, Kind, SolveOptions};

fn main() {
    let params = GenParams { n: 9, width: 2, k_min: Some(5), budget_factor: Some(1.4), with_end: true, ..GenParams::default() };
    let inst = generate(Kind::LowTreewidth, &params, 21).unwrap().parse().unwrap();
    for (command, backend) in [(Command::Kstroll, Backend::Treewidth), (Command::P2p, Backend::Doubling)] {
        let mut opts = SolveOptions::new(command);
        opts.backend = backend;
        opts.oracle = true;
        opts.timing = false;
        let report = solve(&inst, &opts).unwrap();
        println!("{}: value {} ratio {:?}", report.solver, report.value(), report.ratio);
        println!("  re-simulated: {:?}", verify_report(&inst, &report).unwrap());
    }
    let mut opts = SolveOptions::new(Command::Kstroll);
    opts.timing = false;
    print!("{}", solve(&inst, &opts).unwrap().to_json());
}
