//! Reference solver on the explicitly built exploded graph.
//!
//! Every job keeps only its `|U|` cheapest slot edges, then plain successive
//! shortest paths with a full Dijkstra per augmentation solve the assignment.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::error::SolveError;
use crate::graph::{
    cost_of_semi_matching, BipartiteInstance, Cost, EdgeId, JobId, MachineId, SemiMatching,
};

/// Edge from a job to slot `slot` of a machine, costing `slot * w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExplodedEdge {
    pub job: JobId,
    pub machine: MachineId,
    pub slot: usize,
    pub cost: Cost,
    pub edge: EdgeId,
}

#[derive(Debug, Clone)]
pub struct BaselineSolution {
    pub matching: SemiMatching,
    pub cost: Cost,
    pub exploded_edges: usize,
    pub exploded_slots: usize,
}

/// The `|U|` cheapest exploded edges of every job, cheapest first.
pub fn pruned_exploded_edges(instance: &BipartiteInstance) -> Vec<Vec<ExplodedEdge>> {
    let keep = instance.num_jobs();
    (0..instance.num_jobs())
        .map(|u| {
            let mut heap: BinaryHeap<Reverse<(Cost, MachineId, usize, EdgeId)>> = instance
                .job_edges(u)
                .iter()
                .map(|&e| {
                    let edge = instance.edge(e);
                    Reverse((Cost::from(edge.weight), edge.machine, 1, e))
                })
                .collect();
            let mut out = Vec::new();
            while out.len() < keep {
                let Some(Reverse((cost, machine, slot, edge))) = heap.pop() else { break };
                out.push(ExplodedEdge { job: u, machine, slot, cost, edge });
                if slot < instance.machine_degree(machine) {
                    let w = Cost::from(instance.edge(edge).weight);
                    heap.push(Reverse((cost + w, machine, slot + 1, edge)));
                }
            }
            out
        })
        .collect()
}

pub fn baseline_exploded_solver(
    instance: &BipartiteInstance,
) -> Result<BaselineSolution, SolveError> {
    let n = instance.num_jobs();
    let adj = pruned_exploded_edges(instance);
    let mut slot_ids: HashMap<(MachineId, usize), usize> = HashMap::new();
    let mut job_arcs: Vec<Vec<(usize, Cost, EdgeId)>> = Vec::with_capacity(n);
    for edges in &adj {
        job_arcs.push(
            edges
                .iter()
                .map(|x| {
                    let next = slot_ids.len();
                    let s = *slot_ids.entry((x.machine, x.slot)).or_insert(next);
                    (s, x.cost, x.edge)
                })
                .collect(),
        );
    }
    let num_slots = slot_ids.len();
    let total = n + num_slots;

    let mut job_match: Vec<Option<(usize, Cost, EdgeId)>> = vec![None; n];
    let mut slot_match: Vec<Option<JobId>> = vec![None; num_slots];
    let mut potential: Vec<Cost> = vec![0; total];
    let mut dist: Vec<Option<Cost>> = vec![None; total];
    let mut parent: Vec<usize> = vec![usize::MAX; total];
    let mut parent_arc: Vec<(Cost, EdgeId)> = vec![(0, 0); total];

    for _ in 0..n {
        dist.fill(None);
        let mut heap = BinaryHeap::new();
        for u in 0..n {
            if job_match[u].is_none() {
                heap.push(Reverse((0, u)));
                dist[u] = Some(0);
                parent[u] = usize::MAX;
            }
        }
        let mut done = vec![false; total];
        while let Some(Reverse((d, x))) = heap.pop() {
            if done[x] {
                continue;
            }
            done[x] = true;
            let mut relax = |y: usize, len: Cost, arc: (Cost, EdgeId), heap: &mut BinaryHeap<_>| {
                let nd = d + len;
                if dist[y].is_none_or(|old| nd < old) {
                    dist[y] = Some(nd);
                    parent[y] = x;
                    parent_arc[y] = arc;
                    heap.push(Reverse((nd, y)));
                }
            };
            if x < n {
                for &(s, c, e) in &job_arcs[x] {
                    if job_match[x].is_some_and(|(ms, _, _)| ms == s) {
                        continue;
                    }
                    let rc = c + potential[x] - potential[n + s];
                    debug_assert!(rc >= 0);
                    relax(n + s, rc, (c, e), &mut heap);
                }
            } else if let Some(u) = slot_match[x - n] {
                let (_, c, e) = job_match[u].unwrap();
                let rc = potential[x] - c - potential[u];
                debug_assert!(rc >= 0);
                relax(u, rc, (c, e), &mut heap);
            }
        }
        let target = (0..num_slots)
            .filter(|&s| slot_match[s].is_none())
            .filter_map(|s| dist[n + s].map(|d| (d, n + s)))
            .min()
            .ok_or_else(|| SolveError::Invariant("no augmenting path in exploded graph".into()))?;
        let d_max = target.0;
        for (p, d) in potential.iter_mut().zip(&dist) {
            *p += d.map_or(d_max, |d| d.min(d_max));
        }
        let mut y = target.1;
        while y != usize::MAX {
            let u = parent[y];
            let (c, e) = parent_arc[y];
            // y is a slot reached from job u by a forward arc.
            slot_match[y - n] = Some(u);
            job_match[u] = Some((y - n, c, e));
            y = parent[u];
        }
    }

    let assignment = job_match
        .iter()
        .map(|m| m.map(|(_, _, e)| instance.edge(e).machine))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| SolveError::Invariant("job left unmatched".into()))?;
    let matching = SemiMatching::from_assignment(assignment);
    let cost = cost_of_semi_matching(instance, &matching)?;
    let exploded: Cost = job_match.iter().flatten().map(|&(_, c, _)| c).sum();
    if exploded != cost {
        return Err(SolveError::Invariant(format!(
            "exploded cost {exploded} disagrees with completion time {cost}"
        )));
    }
    Ok(BaselineSolution {
        matching,
        cost,
        exploded_edges: job_arcs.iter().map(Vec::len).sum(),
        exploded_slots: num_slots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::two_machine;

    #[test]
    fn pruning_keeps_u_cheapest() {
        let g = BipartiteInstance::from_triples(
            3,
            2,
            &[(0, 0, 1), (0, 1, 2), (1, 0, 1), (1, 1, 1), (2, 0, 5), (2, 1, 5)],
        )
        .unwrap();
        let pruned = pruned_exploded_edges(&g);
        assert!(pruned.iter().all(|p| p.len() == 3));
        let costs: Vec<Cost> = pruned[0].iter().map(|x| x.cost).collect();
        assert_eq!(costs, vec![1, 2, 2]);
    }

    #[test]
    fn small_cases() {
        assert_eq!(baseline_exploded_solver(&two_machine()).unwrap().cost, 6);
        let g = BipartiteInstance::from_triples(2, 2, &[(0, 0, 1), (1, 0, 1), (0, 1, 10), (1, 1, 10)])
            .unwrap();
        assert_eq!(baseline_exploded_solver(&g).unwrap().cost, 3);
        let g = BipartiteInstance::from_triples(1, 1, &[(0, 0, 7)]).unwrap();
        assert_eq!(baseline_exploded_solver(&g).unwrap().cost, 7);
    }
}
