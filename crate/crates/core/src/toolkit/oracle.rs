//! Exhaustive reference solvers for small inputs.

use crate::cover::{triangular, EdgeCover, SimpleGraph};
use crate::error::SolveError;
use crate::graph::{
    machine_cost, BipartiteInstance, ConvexMachineCost, Cost, MachineId, SemiMatching, Weight,
};

/// Largest number of complete assignments the semi-matching oracles enumerate.
pub const MAX_ASSIGNMENTS: u128 = 1_000_000;
/// Largest graph the cover oracle enumerates.
pub const MAX_COVER_VERTICES: usize = 7;

pub fn assignment_count(instance: &BipartiteInstance) -> u128 {
    (0..instance.num_jobs())
        .map(|u| instance.job_edges(u).len() as u128)
        .try_fold(1u128, |acc, d| acc.checked_mul(d))
        .unwrap_or(u128::MAX)
}

pub fn is_enumerable(instance: &BipartiteInstance) -> bool {
    assignment_count(instance) <= MAX_ASSIGNMENTS
}

/// Depth-first walk over every per-job choice; `score` prices a full assignment.
fn enumerate(
    instance: &BipartiteInstance,
    mut score: impl FnMut(&[MachineId]) -> Result<Cost, SolveError>,
) -> Result<(Cost, SemiMatching), SolveError> {
    if !is_enumerable(instance) {
        return Err(SolveError::TooLarge);
    }
    let n = instance.num_jobs();
    let mut choice = vec![0usize; n];
    let mut current: Vec<MachineId> =
        (0..n).map(|u| instance.edge(instance.job_edges(u)[0]).machine).collect();
    let mut best: Option<(Cost, Vec<MachineId>)> = None;
    loop {
        let c = score(&current)?;
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, current.clone()));
        }
        // Odometer step.
        let mut u = 0;
        loop {
            if u == n {
                let (c, a) = best.expect("at least one assignment");
                return Ok((c, SemiMatching::from_assignment(a)));
            }
            choice[u] += 1;
            if choice[u] < instance.job_edges(u).len() {
                current[u] = instance.edge(instance.job_edges(u)[choice[u]]).machine;
                break;
            }
            choice[u] = 0;
            current[u] = instance.edge(instance.job_edges(u)[0]).machine;
            u += 1;
        }
    }
}

/// Minimum total completion time over all semi-matchings.
pub fn brute_force_semi_matching(
    instance: &BipartiteInstance,
) -> Result<(Cost, SemiMatching), SolveError> {
    let weight: Vec<Vec<(MachineId, Weight)>> = (0..instance.num_jobs())
        .map(|u| {
            instance
                .job_edges(u)
                .iter()
                .map(|&e| (instance.edge(e).machine, instance.edge(e).weight))
                .collect()
        })
        .collect();
    let mut loads: Vec<Vec<Weight>> = vec![Vec::new(); instance.num_machines()];
    enumerate(instance, |assign| {
        for l in loads.iter_mut() {
            l.clear();
        }
        for (u, &v) in assign.iter().enumerate() {
            let w = weight[u].iter().find(|&&(m, _)| m == v).unwrap().1;
            loads[v].push(w);
        }
        loads.iter().try_fold(0, |acc: Cost, l| Ok(acc + machine_cost(l)?))
    })
}

/// Minimum of `sum_v f_v(deg(v))` over all semi-matchings.
pub fn brute_force_convex(
    instance: &BipartiteInstance,
    costs: &[ConvexMachineCost],
) -> Result<(Cost, SemiMatching), SolveError> {
    let mut degree = vec![0usize; instance.num_machines()];
    enumerate(instance, |assign| {
        degree.fill(0);
        for &v in assign {
            degree[v] += 1;
        }
        degree
            .iter()
            .zip(costs)
            .try_fold(0, |acc: Cost, (&d, f)| Ok(acc + f.eval(d)?))
    })
}

/// Minimum of `sum_v deg(v)(deg(v)+1)/2` over all edge covers, by a Gray-code
/// walk over edge subsets.
pub fn brute_force_balanced_cover(graph: &SimpleGraph) -> Result<(Cost, EdgeCover), SolveError> {
    let n = graph.num_vertices();
    if n > MAX_COVER_VERTICES {
        return Err(SolveError::TooLarge);
    }
    if let Some(v) = (0..n).find(|&v| graph.degree(v) == 0) {
        return Err(SolveError::IsolatedVertex(v));
    }
    let m = graph.num_edges();
    let mut degree = vec![0usize; n];
    let mut uncovered = n;
    let mut cost: Cost = 0;
    let mut mask: u64 = 0;
    let mut best: Option<(Cost, u64)> = (n == 0).then_some((0, 0));
    for step in 1u64..1 << m {
        let e = step.trailing_zeros() as usize;
        let adding = mask >> e & 1 == 0;
        mask ^= 1 << e;
        let (a, b) = graph.edge(e);
        for x in [a, b] {
            if adding {
                cost += degree[x] as Cost + 1;
                if degree[x] == 0 {
                    uncovered -= 1;
                }
                degree[x] += 1;
            } else {
                degree[x] -= 1;
                cost -= degree[x] as Cost + 1;
                if degree[x] == 0 {
                    uncovered += 1;
                }
            }
        }
        if uncovered == 0 && best.is_none_or(|(c, _)| cost < c) {
            best = Some((cost, mask));
        }
    }
    let (best_cost, best_mask) = best.ok_or(SolveError::Invariant("no edge cover".into()))?;
    let cover = EdgeCover::new(graph, (0..m).filter(|&e| best_mask >> e & 1 == 1).collect())?;
    debug_assert_eq!(cover.cost(), best_cost);
    debug_assert_eq!(best_cost, (0..n).map(|v| triangular(cover.degree(v))).sum::<Cost>());
    Ok((best_cost, cover))
}
