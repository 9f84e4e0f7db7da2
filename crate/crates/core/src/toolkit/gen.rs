//! Seeded random instances.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64(seed)`. Pairs are
//! visited job-major; each becomes an edge with probability `edge_prob` and
//! draws its weight uniformly from `1..=max_weight`. A job left without
//! edges then gets one edge to a uniformly chosen machine.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cover::SimpleGraph;
use crate::graph::{BipartiteInstance, Edge, Weight, WEIGHT_LIMIT};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("edge probability {0} outside (0, 1]")]
    Probability(f64),
    #[error("jobs need at least one machine")]
    NoMachines,
    #[error("maximum weight must be in 1..2^31")]
    MaxWeight,
    #[error("a cover graph needs at least two vertices")]
    TooFewVertices,
}

fn check_prob(p: f64) -> Result<(), GenError> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(GenError::Probability(p))
    }
}

pub fn gen_random(
    num_jobs: usize,
    num_machines: usize,
    edge_prob: f64,
    max_weight: Weight,
    seed: u64,
) -> Result<BipartiteInstance, GenError> {
    check_prob(edge_prob)?;
    if num_machines == 0 && num_jobs > 0 {
        return Err(GenError::NoMachines);
    }
    if max_weight == 0 || u64::from(max_weight) >= WEIGHT_LIMIT {
        return Err(GenError::MaxWeight);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for job in 0..num_jobs {
        let start = edges.len();
        for machine in 0..num_machines {
            if rng.gen_bool(edge_prob) {
                edges.push(Edge { job, machine, weight: rng.gen_range(1..=max_weight) });
            }
        }
        if edges.len() == start {
            let machine = rng.gen_range(0..num_machines);
            edges.push(Edge { job, machine, weight: rng.gen_range(1..=max_weight) });
        }
    }
    Ok(BipartiteInstance::new(num_jobs, num_machines, edges).expect("generated edges are valid"))
}

/// Erdős–Rényi graph; an isolated vertex is joined to a uniformly chosen other vertex.
pub fn gen_random_graph(num_vertices: usize, edge_prob: f64, seed: u64) -> Result<SimpleGraph, GenError> {
    check_prob(edge_prob)?;
    if num_vertices < 2 {
        return Err(GenError::TooFewVertices);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    let mut degree = vec![0usize; num_vertices];
    for a in 0..num_vertices {
        for b in a + 1..num_vertices {
            if rng.gen_bool(edge_prob) {
                pairs.push((a, b));
                degree[a] += 1;
                degree[b] += 1;
            }
        }
    }
    for v in 0..num_vertices {
        if degree[v] == 0 {
            let mut w = rng.gen_range(0..num_vertices - 1);
            if w >= v {
                w += 1;
            }
            pairs.push((v.min(w), v.max(w)));
            degree[v] += 1;
            degree[w] += 1;
        }
    }
    Ok(SimpleGraph::new(num_vertices, &pairs).expect("generated pairs are distinct"))
}
