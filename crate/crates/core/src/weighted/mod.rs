//! Weighted semi-matching by successive shortest paths on the exploded graph.
//!
//! Machine `v` is conceptually split into slots `v^1, v^2, ...`; putting job
//! `u` into slot `i` costs `i * w_uv`, and slot `i` of a machine holds its
//! `i`-th heaviest job. Slots are never materialized: each machine keeps its
//! matched prefix and the slot potentials, and one Dijkstra step relaxes all
//! slots of a machine at once through an [`EnvelopeHeap`].

mod baseline;
mod check;

pub use baseline::{baseline_exploded_solver, pruned_exploded_edges, BaselineSolution, ExplodedEdge};

use crate::envelope::{EnvelopeFunction, EnvelopeHeap, Line};
use crate::error::SolveError;
use crate::graph::{
    cost_of_semi_matching, BipartiteInstance, Cost, EdgeId, JobId, MachineId, SemiMatching,
};
use crate::heap::IndexedMinHeap;

/// Potentials, slot assignment and valley indices between iterations.
#[derive(Debug, Clone)]
pub struct EktState {
    /// Matched edge of every slot `1..=alpha_v`, stored 0-based.
    slots: Vec<Vec<EdgeId>>,
    slot_potential: Vec<Vec<Cost>>,
    job_potential: Vec<Cost>,
    /// `(machine, slot)` of each matched job.
    job_slot: Vec<Option<(MachineId, usize)>>,
    /// Each machine's edges by decreasing weight.
    sorted_adj: Vec<Vec<EdgeId>>,
    gamma: Vec<usize>,
    iteration: usize,
}

impl EktState {
    pub fn new(instance: &BipartiteInstance) -> Self {
        let sorted_adj = (0..instance.num_machines())
            .map(|v| {
                let mut adj = instance.machine_edges(v).to_vec();
                adj.sort_by_key(|&e| (std::cmp::Reverse(instance.edge(e).weight), e));
                adj
            })
            .collect();
        Self {
            slots: vec![Vec::new(); instance.num_machines()],
            slot_potential: vec![Vec::new(); instance.num_machines()],
            job_potential: vec![0; instance.num_jobs()],
            job_slot: vec![None; instance.num_jobs()],
            sorted_adj,
            gamma: vec![1; instance.num_edges()],
            iteration: 0,
        }
    }

    /// Number of matched slots of `v`.
    pub fn alpha(&self, v: MachineId) -> usize {
        self.slots[v].len()
    }

    /// Slot domain searched for `v`: the matched prefix plus the first free slot.
    pub fn domain(&self, instance: &BipartiteInstance, v: MachineId) -> usize {
        (self.alpha(v) + 1).min(instance.machine_degree(v))
    }

    /// Edge matched into slot `i` (1-based) of `v`.
    pub fn slot_edge(&self, v: MachineId, i: usize) -> Option<EdgeId> {
        self.slots[v].get(i.wrapping_sub(1)).copied()
    }

    /// `p(v^i)`; zero for unmatched slots.
    pub fn slot_potential(&self, v: MachineId, i: usize) -> Cost {
        self.slot_potential[v].get(i.wrapping_sub(1)).copied().unwrap_or(0)
    }

    pub fn job_potential(&self, u: JobId) -> Cost {
        self.job_potential[u]
    }

    pub fn job_slot(&self, u: JobId) -> Option<(MachineId, usize)> {
        self.job_slot[u]
    }

    pub fn gamma(&self, e: EdgeId) -> usize {
        self.gamma[e]
    }

    pub fn sorted_machine_edges(&self, v: MachineId) -> &[EdgeId] {
        &self.sorted_adj[v]
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn num_matched(&self) -> usize {
        self.slots.iter().map(Vec::len).sum()
    }

    /// Current (possibly partial) assignment.
    pub fn matching(&self) -> SemiMatching {
        SemiMatching::from_partial(self.job_slot.iter().map(|s| s.map(|(v, _)| v)).collect())
    }

    /// `sum i * w` over matched slots.
    pub fn exploded_cost(&self, instance: &BipartiteInstance) -> Cost {
        self.slots
            .iter()
            .flat_map(|s| s.iter().enumerate())
            .map(|(i, &e)| (i as Cost + 1) * Cost::from(instance.edge(e).weight))
            .sum()
    }

    /// Valley index of every `f_uv`: the smallest `i` in `[1, N]` with
    /// `p(v^{i+1}) - p(v^i) <= w_uv`, or `N`. One sweep per machine over
    /// its weight-sorted adjacency.
    pub fn compute_gammas(&mut self, instance: &BipartiteInstance) {
        for v in 0..instance.num_machines() {
            let n = self.domain(instance, v);
            let mut i = 1;
            for idx in 0..self.sorted_adj[v].len() {
                let e = self.sorted_adj[v][idx];
                let w = Cost::from(instance.edge(e).weight);
                while i < n && self.slot_potential(v, i + 1) - self.slot_potential(v, i) > w {
                    i += 1;
                }
                self.gamma[e] = i;
            }
        }
    }

    /// `f_uv(i)` without the `d(u)` term: `p(u) + i * w_uv - p(v^i)`.
    pub fn slot_function(&self, instance: &BipartiteInstance, e: EdgeId, i: usize) -> Cost {
        let edge = instance.edge(e);
        self.job_potential[edge.job] + i as Cost * Cost::from(edge.weight)
            - self.slot_potential(edge.machine, i)
    }
}

/// One step of an augmenting path: the edge's job moves into `slot`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathStep {
    pub edge: EdgeId,
    pub slot: usize,
}

/// Outcome of one grouped Dijkstra search.
#[derive(Debug, Clone, Default)]
pub struct ShortestPath {
    /// Reduced length of the augmenting path.
    pub length: Cost,
    /// From the free job to the free slot.
    pub steps: Vec<PathStep>,
    pub group_relaxations: usize,
    pub heap_ops: usize,
    pub slots_deleted: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WeightedCounters {
    pub iterations: usize,
    pub group_relaxations: u64,
    pub max_group_relaxations: usize,
    pub heap_ops: u64,
    pub max_heap_ops: usize,
    pub slots_deleted: u64,
}

#[derive(Debug, Clone)]
pub struct WeightedSolution {
    pub matching: SemiMatching,
    pub cost: Cost,
    pub counters: WeightedCounters,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct WeightedOptions {
    /// Verify every structural invariant at every iteration (slow).
    pub check_invariants: bool,
}

/// The iteration driver: state plus per-search scratch space.
pub struct Ekt<'a> {
    instance: &'a BipartiteInstance,
    state: EktState,
    heaps: Vec<EnvelopeHeap>,
    touched: Vec<MachineId>,
    touched_mark: Vec<bool>,
    /// Keyed by (distance, rank); machines rank before jobs so that a free
    /// slot ends the search before equally distant jobs are scanned.
    global: IndexedMinHeap<(Cost, usize)>,
    job_dist: Vec<Option<Cost>>,
    /// Per touched machine and slot: finalized distance and owning edge.
    slot_dist: Vec<Vec<Option<(Cost, EdgeId)>>>,
}

impl<'a> Ekt<'a> {
    pub fn new(instance: &'a BipartiteInstance) -> Self {
        let nm = instance.num_machines();
        Self {
            instance,
            state: EktState::new(instance),
            heaps: (0..nm).map(|_| EnvelopeHeap::new(0)).collect(),
            touched: Vec::new(),
            touched_mark: vec![false; nm],
            global: IndexedMinHeap::with_handles(instance.num_jobs() + nm),
            job_dist: vec![None; instance.num_jobs()],
            slot_dist: vec![Vec::new(); nm],
        }
    }

    pub fn state(&self) -> &EktState {
        &self.state
    }

    pub fn is_done(&self) -> bool {
        self.state.num_matched() == self.instance.num_jobs()
    }

    /// Envelope heap of `v` as left by the last search.
    pub fn heap(&self, v: MachineId) -> &EnvelopeHeap {
        &self.heaps[v]
    }

    /// Machines whose heap received functions in the last search.
    pub fn touched_machines(&self) -> &[MachineId] {
        &self.touched
    }

    /// Finalized distance of `u` in the last search.
    pub fn job_distance(&self, u: JobId) -> Option<Cost> {
        self.job_dist[u]
    }

    fn touch(&mut self, v: MachineId) {
        if !self.touched_mark[v] {
            self.touched_mark[v] = true;
            self.touched.push(v);
            let n = self.state.domain(self.instance, v);
            self.heaps[v].reset(n);
            self.slot_dist[v].clear();
            self.slot_dist[v].resize(n + 1, None);
        }
    }

    fn machine_key(&mut self, v: MachineId) {
        let handle = self.instance.num_jobs() + v;
        match self.heaps[v].access_min() {
            Some(m) => {
                if self.global.key(handle) != Some((m.value, v)) {
                    self.global.set(handle, (m.value, v));
                }
            }
            None => {
                self.global.remove(handle);
            }
        }
    }

    /// Shortest augmenting path from the free jobs to a free slot, relaxing
    /// every slot of a machine at once.
    pub fn dijkstra_grouped(&mut self) -> Result<ShortestPath, SolveError> {
        let inst = self.instance;
        let n = inst.num_jobs();
        let nm = inst.num_machines();
        for &v in &self.touched {
            self.touched_mark[v] = false;
        }
        self.touched.clear();
        self.global.clear();
        self.job_dist.fill(None);

        let mut out = ShortestPath::default();
        for u in 0..n {
            if self.state.job_slot[u].is_none() {
                self.global.set(u, (0, nm + u));
                out.heap_ops += 1;
            }
        }
        let end = loop {
            let Some(((dist, _), handle)) = self.global.pop() else {
                return Err(SolveError::Invariant("no augmenting path to a free slot".into()));
            };
            out.heap_ops += 1;
            if handle < n {
                let u = handle;
                self.job_dist[u] = Some(dist);
                for &e in inst.job_edges(u) {
                    let v = inst.edge(e).machine;
                    self.touch(v);
                    let func = EnvelopeFunction {
                        id: e,
                        line: Line::new(
                            Cost::from(inst.edge(e).weight),
                            dist + self.state.job_potential[u],
                        ),
                        gamma: self.state.gamma[e],
                    };
                    let pot = &self.state.slot_potential[v];
                    let oracle = |f: &EnvelopeFunction, x: usize| {
                        f.line.at(x) as Cost - pot.get(x - 1).copied().unwrap_or(0)
                    };
                    self.heaps[v].insert(func, &oracle);
                    out.group_relaxations += 1;
                    out.heap_ops += 1;
                    self.machine_key(v);
                    out.heap_ops += 1;
                }
            } else {
                let v = handle - n;
                let pot = &self.state.slot_potential[v];
                let oracle = |f: &EnvelopeFunction, x: usize| {
                    f.line.at(x) as Cost - pot.get(x - 1).copied().unwrap_or(0)
                };
                let m = self.heaps[v].delete_min(&oracle).expect("machine key implies a live slot");
                out.heap_ops += 1;
                out.slots_deleted += 1;
                debug_assert_eq!(m.value, dist);
                self.slot_dist[v][m.index] = Some((dist, m.func));
                if m.index > self.state.alpha(v) {
                    break (v, m.index, dist);
                }
                let matched = self.state.slots[v][m.index - 1];
                let u = inst.edge(matched).job;
                let rc = self.state.slot_potential(v, m.index)
                    - m.index as Cost * Cost::from(inst.edge(matched).weight)
                    - self.state.job_potential[u];
                if rc < 0 {
                    return Err(SolveError::Invariant(format!(
                        "matched edge of slot {}^{} has reduced cost {rc}",
                        v, m.index
                    )));
                }
                if self.job_dist[u].is_none() && self.global.decrease(u, (dist + rc, nm + u)) {
                    out.heap_ops += 1;
                }
                self.machine_key(v);
                out.heap_ops += 1;
            }
        };

        let (v, slot, length) = end;
        out.length = length;
        let mut steps = Vec::new();
        let (mut v, mut slot) = (v, slot);
        loop {
            let (_, e) = self.slot_dist[v][slot].expect("path slots are finalized");
            steps.push(PathStep { edge: e, slot });
            match self.state.job_slot[inst.edge(e).job] {
                Some((pv, ps)) => (v, slot) = (pv, ps),
                None => break,
            }
            if steps.len() > n + 1 {
                return Err(SolveError::Invariant("augmenting path does not terminate".into()));
            }
        }
        steps.reverse();
        out.steps = steps;
        Ok(out)
    }

    /// `p += min(d, D)` for jobs and matched slots; free slots stay at zero.
    pub fn update_potentials(&mut self, path: &ShortestPath) {
        let d_max = path.length;
        for (p, d) in self.state.job_potential.iter_mut().zip(&self.job_dist) {
            *p += d.map_or(d_max, |d| d.min(d_max));
        }
        for (v, pots) in self.state.slot_potential.iter_mut().enumerate() {
            if self.touched_mark[v] {
                for (i, p) in pots.iter_mut().enumerate() {
                    let d = self.slot_dist[v].get(i + 1).copied().flatten();
                    *p += d.map_or(d_max, |(d, _)| d.min(d_max));
                }
            } else {
                for p in pots.iter_mut() {
                    *p += d_max;
                }
            }
        }
    }

    /// Flips the path: every job on it moves into the slot it was relaxed to.
    pub fn augment(&mut self, path: &ShortestPath) -> Result<(), SolveError> {
        let inst = self.instance;
        let malformed = |what: &str| SolveError::Invariant(format!("malformed path: {what}"));
        let first = path.steps.first().ok_or_else(|| malformed("empty"))?;
        if self.state.job_slot[inst.edge(first.edge).job].is_some() {
            return Err(malformed("starts at a matched job"));
        }
        for (k, step) in path.steps.iter().enumerate() {
            let edge = inst.edge(step.edge);
            let v = edge.machine;
            let last = k + 1 == path.steps.len();
            if last {
                if step.slot != self.state.alpha(v) + 1 {
                    return Err(malformed("does not end at the first free slot"));
                }
                self.state.slots[v].push(step.edge);
                self.state.slot_potential[v].push(path.length);
            } else {
                if step.slot == 0 || step.slot > self.state.alpha(v) {
                    return Err(malformed("interior slot is free"));
                }
                self.state.slots[v][step.slot - 1] = step.edge;
            }
            self.state.job_slot[edge.job] = Some((v, step.slot));
        }
        self.state.iteration += 1;
        Ok(())
    }

    /// One full iteration. Returns `None` once every job is matched.
    pub fn step(&mut self, check: bool) -> Result<Option<ShortestPath>, SolveError> {
        if self.is_done() {
            return Ok(None);
        }
        self.state.compute_gammas(self.instance);
        if check {
            check::state(self.instance, &self.state, true).map_err(SolveError::Invariant)?;
        }
        let path = self.dijkstra_grouped()?;
        if check {
            check::envelopes(self).map_err(SolveError::Invariant)?;
        }
        self.update_potentials(&path);
        self.augment(&path)?;
        if check {
            check::state(self.instance, &self.state, false).map_err(SolveError::Invariant)?;
        }
        Ok(Some(path))
    }
}

/// Optimal weighted semi-matching.
pub fn solve_weighted(instance: &BipartiteInstance) -> Result<WeightedSolution, SolveError> {
    solve_weighted_with(instance, WeightedOptions::default(), |_| {})
}

/// [`solve_weighted`] with options and a hook called after every iteration.
pub fn solve_weighted_with(
    instance: &BipartiteInstance,
    options: WeightedOptions,
    mut observer: impl FnMut(&EktState),
) -> Result<WeightedSolution, SolveError> {
    let mut ekt = Ekt::new(instance);
    let mut counters = WeightedCounters::default();
    while let Some(path) = ekt.step(options.check_invariants)? {
        counters.iterations += 1;
        counters.group_relaxations += path.group_relaxations as u64;
        counters.max_group_relaxations = counters.max_group_relaxations.max(path.group_relaxations);
        counters.heap_ops += path.heap_ops as u64;
        counters.max_heap_ops = counters.max_heap_ops.max(path.heap_ops);
        counters.slots_deleted += path.slots_deleted as u64;
        observer(ekt.state());
    }
    let matching = ekt.state().matching();
    let cost = cost_of_semi_matching(instance, &matching)?;
    let exploded = ekt.state().exploded_cost(instance);
    if cost != exploded {
        return Err(SolveError::Invariant(format!(
            "slot cost {exploded} disagrees with completion time {cost}"
        )));
    }
    Ok(WeightedSolution { matching, cost, counters })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::two_machine;

    fn checked(instance: &BipartiteInstance) -> WeightedSolution {
        solve_weighted_with(instance, WeightedOptions { check_invariants: true }, |_| {}).unwrap()
    }

    #[test]
    fn two_jobs_one_machine() {
        let g = BipartiteInstance::from_triples(2, 1, &[(0, 0, 1), (1, 0, 2)]).unwrap();
        let mut ekt = Ekt::new(&g);
        ekt.state.compute_gammas(&g);
        let first = ekt.dijkstra_grouped().unwrap();
        assert_eq!(first.length, 1);
        assert_eq!(first.steps, vec![PathStep { edge: 0, slot: 1 }]);
        ekt.update_potentials(&first);
        ekt.augment(&first).unwrap();
        let second = ekt.step(true).unwrap().unwrap();
        assert_eq!(second.steps.len(), 2);
        assert!(ekt.is_done());
        assert_eq!(ekt.state().slot_edge(0, 1), Some(1));
        assert_eq!(checked(&g).cost, 4);
    }

    #[test]
    fn cheap_machine_takes_both() {
        let g = BipartiteInstance::from_triples(2, 2, &[(0, 0, 1), (1, 0, 1), (0, 1, 10), (1, 1, 10)])
            .unwrap();
        let sol = checked(&g);
        assert_eq!(sol.cost, 3);
        assert_eq!(sol.matching, SemiMatching::from_assignment(vec![0, 0]));
    }

    #[test]
    fn two_machine_unit() {
        assert_eq!(checked(&two_machine()).cost, 6);
    }

    #[test]
    fn zero_weight_slot_first() {
        let g = BipartiteInstance::from_triples(2, 2, &[(0, 0, 0), (1, 1, 3), (1, 0, 5)]).unwrap();
        let mut ekt = Ekt::new(&g);
        ekt.state.compute_gammas(&g);
        let first = ekt.dijkstra_grouped().unwrap();
        assert_eq!(first.length, 0);
        assert_eq!(first.steps, vec![PathStep { edge: 0, slot: 1 }]);
        assert_eq!(checked(&g).cost, 3);
    }

    #[test]
    fn gammas_follow_potential_gaps() {
        let g = BipartiteInstance::from_triples(
            4,
            1,
            &[(0, 0, 6), (1, 0, 4), (2, 0, 9), (3, 0, 1)],
        )
        .unwrap();
        let mut s = EktState::new(&g);
        s.compute_gammas(&g);
        assert!((0..4).all(|e| s.gamma(e) == 1));
        // Three matched slots with potentials (0, 5, 7).
        s.slots[0] = vec![2, 0, 1];
        s.slot_potential[0] = vec![0, 5, 7];
        s.compute_gammas(&g);
        assert_eq!(s.gamma(0), 1);
        assert_eq!(s.gamma(1), 2);
    }

    #[test]
    fn swap_keeps_slots_sorted() {
        // Job 0 prefers machine 0 but job 1 can only use machine 0 and is heavy.
        let g = BipartiteInstance::from_triples(
            3,
            2,
            &[(0, 0, 2), (0, 1, 3), (1, 0, 7), (2, 0, 1)],
        )
        .unwrap();
        let sol = checked(&g);
        let brute = (0..2)
            .map(|m0| {
                let a = SemiMatching::from_assignment(vec![m0, 0, 0]);
                cost_of_semi_matching(&g, &a).unwrap()
            })
            .min()
            .unwrap();
        assert_eq!(sol.cost, brute);
    }

    #[test]
    fn counters_respect_edge_bound() {
        let g = two_machine();
        let sol = solve_weighted(&g).unwrap();
        assert_eq!(sol.counters.iterations, 4);
        assert!(sol.counters.max_group_relaxations <= g.num_edges());
    }
}
