//! Exhaustive invariant checks for the EKT iteration. Quadratic or worse;
//! used by tests and the `check_invariants` option.

use super::{Ekt, EktState};
use crate::graph::{BipartiteInstance, Cost};

/// Slot structure, reduced costs, price sandwich and unimodality; valleys
/// too when `gammas_current` (they go stale once potentials move).
pub(super) fn state(
    inst: &BipartiteInstance,
    s: &EktState,
    gammas_current: bool,
) -> Result<(), String> {
    for u in 0..inst.num_jobs() {
        if s.job_potential[u] < 0 {
            return Err(format!("job {u} has negative potential"));
        }
        if let Some((v, i)) = s.job_slot[u] {
            match s.slot_edge(v, i) {
                Some(e) if inst.edge(e).job == u => {}
                _ => return Err(format!("job {u} claims slot {v}^{i} it does not hold")),
            }
        }
    }
    for v in 0..inst.num_machines() {
        let alpha = s.alpha(v);
        if alpha > inst.machine_degree(v) || s.slot_potential[v].len() != alpha {
            return Err(format!("machine {v} has inconsistent slot arrays"));
        }
        for i in 1..=alpha {
            let e = s.slot_edge(v, i).unwrap();
            let edge = inst.edge(e);
            if edge.machine != v || s.job_slot[edge.job] != Some((v, i)) {
                return Err(format!("slot {v}^{i} holds foreign edge {e}"));
            }
            if i < alpha {
                let next = inst.edge(s.slot_edge(v, i + 1).unwrap()).weight;
                if edge.weight < next {
                    return Err(format!("slot weights of machine {v} increase at {i}"));
                }
                let gap = s.slot_potential(v, i + 1) - s.slot_potential(v, i);
                if !(Cost::from(edge.weight) >= gap && gap >= Cost::from(next)) {
                    return Err(format!(
                        "potential gap {gap} at {v}^{i} outside [{next}, {}]",
                        edge.weight
                    ));
                }
            }
        }
    }

    for (e, edge) in inst.edges().iter().enumerate() {
        let v = edge.machine;
        for i in 1..=inst.machine_degree(v) {
            let forward = s.slot_function(inst, e, i);
            let rc = if s.job_slot[edge.job] == Some((v, i)) { -forward } else { forward };
            if rc < 0 {
                return Err(format!("edge {e} to slot {v}^{i} has reduced cost {rc}"));
            }
        }
        let n = s.domain(inst, v);
        let f: Vec<Cost> = (1..=n).map(|i| s.slot_function(inst, e, i)).collect();
        let gamma = (1..=n)
            .find(|&i| {
                i == n
                    || s.slot_potential(v, i + 1) - s.slot_potential(v, i)
                        <= Cost::from(edge.weight)
            })
            .unwrap_or(1);
        if gammas_current && s.gamma[e] != gamma {
            return Err(format!("edge {e} has valley {} instead of {gamma}", s.gamma[e]));
        }
        let (left, right) = f.split_at(gamma - 1);
        if left.windows(2).any(|w| w[1] > w[0])
            || left.last().is_some_and(|&l| l < right[0])
            || right.windows(2).any(|w| w[1] < w[0])
        {
            return Err(format!("f of edge {e} is not unimodal around {gamma}: {f:?}"));
        }
        if f[gamma - 1] != *f.iter().min().unwrap() {
            return Err(format!("valley {gamma} of edge {e} is not a minimum"));
        }
    }
    for v in (0..inst.num_machines()).filter(|_| gammas_current) {
        let adj = s.sorted_machine_edges(v);
        if adj.windows(2).any(|w| s.gamma[w[0]] > s.gamma[w[1]]) {
            return Err(format!("valleys of machine {v} are not monotone in weight"));
        }
    }
    Ok(())
}

/// After a search: each machine's line envelope agrees with a naive scan,
/// and the functions and lines share argmins at every slot.
pub(super) fn envelopes(ekt: &Ekt<'_>) -> Result<(), String> {
    for &v in ekt.touched_machines() {
        let heap = ekt.heap(v);
        let funcs: Vec<_> = heap.functions().copied().collect();
        let n = heap.domain();
        if funcs.is_empty() || n == 0 {
            continue;
        }
        let f_at = |id: usize, x: usize| {
            funcs[id].line.at(x) as Cost - ekt.state().slot_potential(v, x)
        };
        for x in 1..=n {
            let g_min = funcs.iter().map(|f| f.line.at(x)).min().unwrap();
            let f_min = (0..funcs.len()).map(|k| f_at(k, x)).min().unwrap();
            for (k, f) in funcs.iter().enumerate() {
                if (f.line.at(x) == g_min) != (f_at(k, x) == f_min) {
                    return Err(format!("argmin mismatch at {v}^{x} for edge {}", f.id));
                }
            }
        }
        let intervals = heap.intervals();
        let mut expect_lo = 1;
        for &(id, lo, hi) in &intervals {
            if lo != expect_lo || hi < lo {
                return Err(format!("envelope intervals of machine {v} do not tile: {intervals:?}"));
            }
            expect_lo = hi + 1;
            let line = funcs.iter().find(|f| f.id == id).unwrap().line;
            for x in lo..=hi {
                if line.at(x) != funcs.iter().map(|f| f.line.at(x)).min().unwrap() {
                    return Err(format!("line of edge {id} owns {v}^{x} without being minimal"));
                }
            }
        }
        if expect_lo != n + 1 {
            return Err(format!("envelope of machine {v} stops before {n}"));
        }
    }
    Ok(())
}
