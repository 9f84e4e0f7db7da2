//! File formats, instance generators, exhaustive oracles and the benchmark harness.

pub mod bench;
pub mod format;
pub mod gen;
pub mod oracle;

pub use bench::{run_bench, write_csv, BenchPlan, BenchRecord, BenchSpec, SolverKind};
pub use format::{
    emit_assignment, emit_cover, emit_cover_graph, emit_instance, parse_assignment, parse_cover,
    parse_cover_graph, parse_instance, parse_problem, ParseError, ProblemFile,
};
pub use gen::{gen_random, gen_random_graph, GenError};
pub use oracle::{brute_force_balanced_cover, brute_force_convex, brute_force_semi_matching};
