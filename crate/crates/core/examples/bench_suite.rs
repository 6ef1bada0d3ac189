//! A small benchmark suite printed as CSV.

use orienteer::harness::{run_suite, to_csv, Backend, Cell, Command, GenParams, Kind, SolveOptions, Suite};

fn cell(kind: Kind, params: GenParams, command: Command, backend: Backend) -> Cell {
    let mut solver = SolveOptions::new(command);
    solver.backend = backend;
    solver.oracle = true;
    solver.timing = false;
    solver.m_max = 3;
    Cell { name: None, generator: kind, params, solver, seeds: (0..5).collect() }
}

fn main() {
    let strolls = GenParams { n: 8, k_min: Some(4), with_end: true, ..GenParams::default() };
    let deadlines = GenParams { n: 7, deadlines: true, ..GenParams::default() };
    let suite = Suite {
        cells: vec![
            cell(Kind::LowTreewidth, strolls.clone(), Command::Kstroll, Backend::Treewidth),
            cell(Kind::Euclidean, strolls, Command::Kstroll, Backend::Doubling),
            cell(Kind::Bounded, deadlines, Command::Deadline, Backend::Doubling),
        ],
    };
    print!("{}", to_csv(&run_suite(&suite)).unwrap());
}
