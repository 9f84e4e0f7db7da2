//! `semimatch` command-line front end.
//!
//! Exit codes: 0 success, 1 failure (solver error, failed verification, I/O),
//! 2 usage, 3 malformed input, 4 infeasible input.

use std::fmt::Display;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use semimatch::cover::{find_center, EdgeCover, SimpleGraph};
use semimatch::toolkit::bench::{run_bench, write_csv, BenchPlan};
use semimatch::toolkit::format::{
    emit_assignment, emit_cover, emit_cover_graph, emit_instance, parse_assignment, parse_cover,
    parse_problem, ParseError, ProblemFile,
};
use semimatch::toolkit::gen::{gen_random, gen_random_graph};
use semimatch::toolkit::oracle::{
    brute_force_balanced_cover, brute_force_convex, brute_force_semi_matching,
};
use semimatch::{
    baseline_exploded_solver, convex_cost, cost_of_semi_matching, solve_convex, solve_unweighted,
    solve_weighted, BipartiteInstance, ConvexMachineCost, Cost, SemiMatching,
};

const FAILURE: u8 = 1;
const USAGE: u8 = 2;
const MALFORMED: u8 = 3;
const INFEASIBLE: u8 = 4;

#[derive(Parser)]
#[command(name = "semimatch", version, about = "Optimal semi-matchings and balanced edge covers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file and print the assignment (or cover) with its cost.
    Solve {
        #[command(flatten)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Solver::Fast)]
        solver: Solver,
        /// Instance file, or `-` for stdin.
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a solution against its instance and recompute its cost.
    Verify {
        #[command(flatten)]
        mode: Mode,
        instance: PathBuf,
        solution: PathBuf,
        /// Also require the solution to be optimal, by the fast solver.
        #[arg(long)]
        optimal: bool,
    },
    /// Write a seeded random instance.
    Gen {
        /// Generate a cover graph instead of a bipartite instance.
        #[arg(long)]
        cover: bool,
        /// Jobs, or vertices with --cover.
        #[arg(long, short = 'n')]
        jobs: usize,
        #[arg(long, short = 'm', default_value_t = 1)]
        machines: usize,
        #[arg(long, short = 'p')]
        prob: f64,
        #[arg(long, short = 'w', default_value_t = 1)]
        max_weight: u32,
        #[arg(long, short = 's', default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a TOML benchmark plan and write CSV.
    Bench {
        plan: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Worker threads; defaults to SEMIMATCH_BENCH_THREADS, then all cores.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Solve a small instance by exhaustive enumeration.
    Oracle {
        #[command(flatten)]
        mode: Mode,
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Problem variant; inferred from the file header when no flag is given.
#[derive(Args, Clone, Copy)]
struct Mode {
    /// Weighted total completion time.
    #[arg(long, conflicts_with_all = ["unweighted", "convex", "cover"])]
    weighted: bool,
    /// Unit weights; edge weights in the file are ignored.
    #[arg(long, conflicts_with_all = ["convex", "cover"])]
    unweighted: bool,
    /// Convex cost of each machine's degree.
    #[arg(long, conflicts_with = "cover")]
    convex: bool,
    /// Balanced edge cover of a general graph.
    #[arg(long)]
    cover: bool,
    /// Cost function for --convex.
    #[arg(long, value_enum, default_value_t = CostFn::Quadratic, requires = "convex")]
    cost: CostFn,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Solver {
    Fast,
    Baseline,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CostFn {
    /// k^2
    Quadratic,
    /// k(k+1)/2
    Triangular,
    /// k
    Linear,
}

impl CostFn {
    fn eval(self, k: usize) -> Cost {
        let k = k as Cost;
        match self {
            CostFn::Quadratic => k * k,
            CostFn::Triangular => k * (k + 1) / 2,
            CostFn::Linear => k,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Weighted,
    Unweighted,
    Convex(CostFn),
    Cover,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Display) -> Failure {
    Failure { code, message: message.to_string() }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        fail(if e.is_infeasible() { INFEASIBLE } else { MALFORMED }, e)
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        io::stdin().read_to_string(&mut text).map_err(|e| fail(FAILURE, format!("stdin: {e}")))?;
    } else {
        text = fs::read_to_string(path).map_err(|e| fail(FAILURE, format!("{}: {e}", path.display())))?;
    }
    Ok(text)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    let result = match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| format!("stdout: {e}")),
    };
    result.map_err(|e| fail(FAILURE, e))
}

/// Parses the problem file and reconciles it with the requested mode.
fn load(mode: Mode, path: &Path) -> Result<(Kind, ProblemFile), Failure> {
    let problem = parse_problem(&read_input(path)?)?;
    let requested = if mode.weighted {
        Some(Kind::Weighted)
    } else if mode.unweighted {
        Some(Kind::Unweighted)
    } else if mode.convex {
        Some(Kind::Convex(mode.cost))
    } else if mode.cover {
        Some(Kind::Cover)
    } else {
        None
    };
    let kind = match (&problem, requested) {
        (ProblemFile::Cover(_), None | Some(Kind::Cover)) => Kind::Cover,
        (ProblemFile::SemiMatching(_), None) => Kind::Weighted,
        (ProblemFile::SemiMatching(_), Some(k)) if k != Kind::Cover => k,
        (ProblemFile::Cover(_), Some(_)) => {
            return Err(fail(USAGE, "a cover graph can only be solved with --cover"))
        }
        (ProblemFile::SemiMatching(_), Some(_)) => {
            return Err(fail(USAGE, "--cover needs a `p cover` file"))
        }
    };
    Ok((kind, problem))
}

fn convex_table(instance: &BipartiteInstance, f: CostFn) -> Result<Vec<ConvexMachineCost>, Failure> {
    ConvexMachineCost::per_machine(instance, |k| f.eval(k)).map_err(|e| fail(FAILURE, e))
}

fn solve_cover(graph: &SimpleGraph) -> Result<EdgeCover, Failure> {
    Ok(find_center(graph).map_err(|e| fail(FAILURE, e))?.cover)
}

/// Cost of an optimal solution by the fast solvers, or the baseline if asked.
fn solve_matching(
    kind: Kind,
    instance: &BipartiteInstance,
    solver: Solver,
) -> Result<(SemiMatching, Cost), Failure> {
    let err = |e: semimatch::SolveError| fail(FAILURE, e);
    Ok(match (kind, solver) {
        (Kind::Weighted, Solver::Fast) => {
            let s = solve_weighted(instance).map_err(err)?;
            (s.matching, s.cost)
        }
        (Kind::Weighted, Solver::Baseline) => {
            let s = baseline_exploded_solver(instance).map_err(err)?;
            (s.matching, s.cost)
        }
        (Kind::Unweighted, Solver::Fast) => {
            let s = solve_unweighted(instance).map_err(err)?;
            (s.matching, s.cost)
        }
        (Kind::Unweighted, Solver::Baseline) => {
            let s = baseline_exploded_solver(&instance.to_unit()).map_err(err)?;
            (s.matching, s.cost)
        }
        (Kind::Convex(f), Solver::Fast) => {
            let s = solve_convex(instance, &convex_table(instance, f)?).map_err(err)?;
            (s.matching, s.cost)
        }
        (Kind::Convex(_), Solver::Baseline) => {
            return Err(fail(USAGE, "--convex has no baseline solver; try `semimatch oracle`"))
        }
        (Kind::Cover, _) => unreachable!("cover problems are dispatched separately"),
    })
}

fn matching_cost(kind: Kind, instance: &BipartiteInstance, m: &SemiMatching) -> Result<Cost, Failure> {
    let cost = match kind {
        Kind::Weighted => cost_of_semi_matching(instance, m),
        Kind::Unweighted => cost_of_semi_matching(&instance.to_unit(), m),
        Kind::Convex(f) => convex_cost(instance, m, &convex_table(instance, f)?),
        Kind::Cover => unreachable!("cover problems are dispatched separately"),
    };
    cost.map_err(|e| fail(FAILURE, e))
}

fn solve(mode: Mode, solver: Solver, input: &Path, output: Option<&Path>) -> Result<(), Failure> {
    let (kind, problem) = load(mode, input)?;
    let text = match problem {
        ProblemFile::Cover(graph) => {
            if solver == Solver::Baseline {
                return Err(fail(USAGE, "--cover has no baseline solver; try `semimatch oracle`"));
            }
            emit_cover(&graph, &solve_cover(&graph)?)
        }
        ProblemFile::SemiMatching(instance) => {
            let (matching, cost) = solve_matching(kind, &instance, solver)?;
            emit_assignment(&matching, cost)
        }
    };
    write_output(output, &text)
}

fn verify(mode: Mode, instance_path: &Path, solution_path: &Path, optimal: bool) -> Result<(), Failure> {
    let (kind, problem) = load(mode, instance_path)?;
    let solution = read_input(solution_path)?;
    let (cost, claimed, best) = match problem {
        ProblemFile::Cover(graph) => {
            let (edges, claimed) = parse_cover(&solution, &graph)?;
            let cover = EdgeCover::new(&graph, edges).map_err(|e| fail(FAILURE, e))?;
            let best = optimal.then(|| solve_cover(&graph).map(|c| c.cost())).transpose()?;
            (cover.cost(), claimed, best)
        }
        ProblemFile::SemiMatching(instance) => {
            let (m, claimed) = parse_assignment(&solution, instance.num_jobs(), instance.num_machines())?;
            let cost = matching_cost(kind, &instance, &m)?;
            let best = optimal
                .then(|| solve_matching(kind, &instance, Solver::Fast).map(|s| s.1))
                .transpose()?;
            (cost, claimed, best)
        }
    };
    if let Some(c) = claimed.filter(|&c| c != cost) {
        return Err(fail(FAILURE, format!("claimed cost {c} but the solution costs {cost}")));
    }
    if let Some(b) = best.filter(|&b| b != cost) {
        return Err(fail(FAILURE, format!("cost {cost} is not optimal; optimum is {b}")));
    }
    println!("ok cost {cost}");
    Ok(())
}

fn oracle(mode: Mode, input: &Path, output: Option<&Path>) -> Result<(), Failure> {
    let (kind, problem) = load(mode, input)?;
    let err = |e: semimatch::SolveError| fail(FAILURE, e);
    let text = match problem {
        ProblemFile::Cover(graph) => {
            let (_, cover) = brute_force_balanced_cover(&graph).map_err(err)?;
            emit_cover(&graph, &cover)
        }
        ProblemFile::SemiMatching(instance) => {
            let (cost, m) = match kind {
                Kind::Weighted => brute_force_semi_matching(&instance),
                Kind::Unweighted => brute_force_semi_matching(&instance.to_unit()),
                Kind::Convex(f) => brute_force_convex(&instance, &convex_table(&instance, f)?),
                Kind::Cover => unreachable!("cover graphs parse as ProblemFile::Cover"),
            }
            .map_err(err)?;
            emit_assignment(&m, cost)
        }
    };
    write_output(output, &text)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { mode, solver, input, output } => solve(mode, solver, &input, output.as_deref()),
        Command::Verify { mode, instance, solution, optimal } => verify(mode, &instance, &solution, optimal),
        Command::Gen { cover, jobs, machines, prob, max_weight, seed, output } => {
            let text = if cover {
                emit_cover_graph(&gen_random_graph(jobs, prob, seed).map_err(|e| fail(USAGE, e))?)
            } else {
                emit_instance(&gen_random(jobs, machines, prob, max_weight, seed).map_err(|e| fail(USAGE, e))?)
            };
            write_output(output.as_deref(), &text)
        }
        Command::Bench { plan, output, threads } => {
            let plan: BenchPlan = toml::from_str(&read_input(&plan)?)
                .map_err(|e| fail(MALFORMED, format!("{}: {e}", plan.display())))?;
            let records = run_bench(&plan, threads).map_err(|e| fail(FAILURE, e))?;
            let mut buf = Vec::new();
            write_csv(&records, &mut buf).map_err(|e| fail(FAILURE, e))?;
            write_output(output.as_deref(), &String::from_utf8(buf).expect("csv is utf-8"))
        }
        Command::Oracle { mode, input, output } => oracle(mode, &input, output.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("semimatch: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
