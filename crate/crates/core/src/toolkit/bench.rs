//! Benchmark harness: generated instances times solvers, one CSV row per run.
//!
//! Columns, in order: `family, n_jobs, n_machines, edges, max_weight, seed,
//! solver, wall_ms, cost, rounds_max_per_cancel, recursion_depth,
//! group_relaxations, heap_ops`. Counter columns stay empty for solvers that
//! do not report them.

use std::io;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::gen::{gen_random, GenError};
use super::oracle::brute_force_semi_matching;
use crate::error::SolveError;
use crate::graph::{BipartiteInstance, Cost, Weight};
use crate::unweighted::solve_unweighted;
use crate::weighted::{baseline_exploded_solver, solve_weighted};

/// Default worker count for [`run_bench`] when set.
pub const THREADS_ENV: &str = "SEMIMATCH_BENCH_THREADS";

pub const COLUMNS: [&str; 13] = [
    "family",
    "n_jobs",
    "n_machines",
    "edges",
    "max_weight",
    "seed",
    "solver",
    "wall_ms",
    "cost",
    "rounds_max_per_cancel",
    "recursion_depth",
    "group_relaxations",
    "heap_ops",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Weighted,
    Baseline,
    Unweighted,
    Brute,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Weighted => "weighted",
            SolverKind::Baseline => "baseline",
            SolverKind::Unweighted => "unweighted",
            SolverKind::Brute => "brute",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchPlan {
    #[serde(default, rename = "run")]
    pub runs: Vec<BenchSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    pub family: String,
    pub jobs: usize,
    pub machines: usize,
    pub edge_prob: f64,
    #[serde(default = "one")]
    pub max_weight: Weight,
    /// Explicit seeds; otherwise `seed_count` seeds from `seed_start`.
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    #[serde(default)]
    pub seed_start: u64,
    #[serde(default)]
    pub seed_count: Option<u64>,
    pub solvers: Vec<SolverKind>,
}

fn one() -> Weight {
    1
}

impl BenchSpec {
    pub fn seed_list(&self) -> Vec<u64> {
        match &self.seeds {
            Some(s) => s.clone(),
            None => (0..self.seed_count.unwrap_or(1)).map(|i| self.seed_start + i).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub family: String,
    pub n_jobs: usize,
    pub n_machines: usize,
    pub edges: usize,
    pub max_weight: Weight,
    pub seed: u64,
    pub solver: SolverKind,
    pub wall_ms: f64,
    pub cost: Cost,
    pub rounds_max_per_cancel: Option<usize>,
    pub recursion_depth: Option<usize>,
    pub group_relaxations: Option<u64>,
    pub heap_ops: Option<u64>,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("plan entry `{family}`: {reason}")]
    Plan { family: String, reason: String },
    #[error("plan entry `{family}`: {source}")]
    Gen { family: String, source: GenError },
    #[error("{family} seed {seed}: {solver} failed: {source}")]
    Solve { family: String, seed: u64, solver: &'static str, source: SolveError },
    #[error("{family} seed {seed}: solvers disagree: {costs:?}")]
    Disagreement { family: String, seed: u64, costs: Vec<(&'static str, Cost)> },
    #[error("thread pool: {0}")]
    Pool(String),
}

/// Worker count from the environment, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&t| t > 0)
}

fn validate(spec: &BenchSpec) -> Result<(), BenchError> {
    let fail = |reason: &str| BenchError::Plan { family: spec.family.clone(), reason: reason.into() };
    if spec.solvers.is_empty() {
        return Err(fail("no solvers listed"));
    }
    if spec.solvers.contains(&SolverKind::Unweighted) && spec.max_weight != 1 {
        return Err(fail("the unweighted solver needs max_weight = 1"));
    }
    Ok(())
}

fn run_one(
    spec: &BenchSpec,
    seed: u64,
    instance: &BipartiteInstance,
    solver: SolverKind,
) -> Result<BenchRecord, BenchError> {
    let start = Instant::now();
    let fail = |source| BenchError::Solve {
        family: spec.family.clone(),
        seed,
        solver: solver.name(),
        source,
    };
    let mut record = BenchRecord {
        family: spec.family.clone(),
        n_jobs: instance.num_jobs(),
        n_machines: instance.num_machines(),
        edges: instance.num_edges(),
        max_weight: spec.max_weight,
        seed,
        solver,
        wall_ms: 0.0,
        cost: 0,
        rounds_max_per_cancel: None,
        recursion_depth: None,
        group_relaxations: None,
        heap_ops: None,
    };
    match solver {
        SolverKind::Weighted => {
            let s = solve_weighted(instance).map_err(fail)?;
            record.cost = s.cost;
            record.group_relaxations = Some(s.counters.group_relaxations);
            record.heap_ops = Some(s.counters.heap_ops);
        }
        SolverKind::Baseline => record.cost = baseline_exploded_solver(instance).map_err(fail)?.cost,
        SolverKind::Unweighted => {
            let s = solve_unweighted(instance).map_err(fail)?;
            record.cost = s.cost;
            record.rounds_max_per_cancel = Some(s.counters.max_rounds());
            record.recursion_depth = Some(s.counters.max_depth);
        }
        SolverKind::Brute => record.cost = brute_force_semi_matching(instance).map_err(fail)?.0,
    }
    record.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(record)
}

/// Runs every (spec, seed) in parallel; records come back in plan order.
pub fn run_bench(plan: &BenchPlan, threads: Option<usize>) -> Result<Vec<BenchRecord>, BenchError> {
    for spec in &plan.runs {
        validate(spec)?;
    }
    let work: Vec<(&BenchSpec, u64)> =
        plan.runs.iter().flat_map(|s| s.seed_list().into_iter().map(move |seed| (s, seed))).collect();
    let job = |&(spec, seed): &(&BenchSpec, u64)| -> Result<Vec<BenchRecord>, BenchError> {
        let instance = gen_random(spec.jobs, spec.machines, spec.edge_prob, spec.max_weight, seed)
            .map_err(|source| BenchError::Gen { family: spec.family.clone(), source })?;
        let records = spec
            .solvers
            .iter()
            .map(|&s| run_one(spec, seed, &instance, s))
            .collect::<Result<Vec<_>, _>>()?;
        if records.windows(2).any(|w| w[0].cost != w[1].cost) {
            return Err(BenchError::Disagreement {
                family: spec.family.clone(),
                seed,
                costs: records.iter().map(|r| (r.solver.name(), r.cost)).collect(),
            });
        }
        Ok(records)
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads.or_else(threads_from_env) {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| BenchError::Pool(e.to_string()))?;
    let results: Vec<_> = pool.install(|| work.par_iter().map(job).collect());
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// Header plus one row per record.
pub fn write_csv<W: io::Write>(records: &[BenchRecord], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(COLUMNS)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(solvers: Vec<SolverKind>, max_weight: Weight, seeds: u64) -> BenchSpec {
        BenchSpec {
            family: "tiny".into(),
            jobs: 6,
            machines: 3,
            edge_prob: 0.5,
            max_weight,
            seeds: None,
            seed_start: 100,
            seed_count: Some(seeds),
            solvers,
        }
    }

    #[test]
    fn weighted_pair_agrees() {
        let plan = BenchPlan { runs: vec![spec(vec![SolverKind::Weighted, SolverKind::Baseline], 9, 20)] };
        let records = run_bench(&plan, Some(2)).unwrap();
        assert_eq!(records.len(), 40);
        for pair in records.chunks(2) {
            assert_eq!(pair[0].cost, pair[1].cost);
            assert_eq!(pair[0].seed, pair[1].seed);
        }
        assert_eq!(records[0].seed, 100);
        assert_eq!(records[39].seed, 119);
    }

    #[test]
    fn unweighted_reports_rounds() {
        let plan = BenchPlan { runs: vec![spec(vec![SolverKind::Unweighted, SolverKind::Brute], 1, 3)] };
        let records = run_bench(&plan, Some(1)).unwrap();
        assert!(records.iter().filter(|r| r.solver == SolverKind::Unweighted).all(|r| r.rounds_max_per_cancel.is_some()));
        let bad = BenchPlan { runs: vec![spec(vec![SolverKind::Unweighted], 5, 1)] };
        assert!(matches!(run_bench(&bad, None), Err(BenchError::Plan { .. })));
    }

    #[test]
    fn empty_plan_writes_header() {
        let records = run_bench(&BenchPlan::default(), None).unwrap();
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", COLUMNS.join(",")));
    }

    #[test]
    fn csv_columns_in_order() {
        let plan = BenchPlan { runs: vec![spec(vec![SolverKind::Weighted], 4, 1)] };
        let records = run_bench(&plan, Some(1)).unwrap();
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row.len(), COLUMNS.len());
        assert_eq!(row[0], "tiny");
        assert_eq!(row[6], "weighted");
        assert_eq!(row[9], "");
    }
}
