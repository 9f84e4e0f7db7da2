//! Bipartite job/machine instances, semi-matchings and their costs.
//!
//! Jobs and machines are dense 0-based ids. Adjacency is stored both by job
//! and by machine since every solver walks both directions.

use std::collections::HashSet;
use std::fmt;

use crate::error::{CostError, InstanceError};

pub type JobId = usize;
pub type MachineId = usize;
pub type EdgeId = usize;
pub type Weight = u32;
pub type Cost = i64;

/// Largest admissible edge weight (exclusive).
pub const WEIGHT_LIMIT: u64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub job: JobId,
    pub machine: MachineId,
    pub weight: Weight,
}

/// A weighted bipartite graph of jobs `U` and machines `V`.
///
/// Immutable after construction. Every job has at least one incident edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteInstance {
    num_jobs: usize,
    num_machines: usize,
    edges: Vec<Edge>,
    by_job: Vec<Vec<EdgeId>>,
    by_machine: Vec<Vec<EdgeId>>,
}

impl BipartiteInstance {
    pub fn new(
        num_jobs: usize,
        num_machines: usize,
        edges: Vec<Edge>,
    ) -> Result<Self, InstanceError> {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut by_job = vec![Vec::new(); num_jobs];
        let mut by_machine = vec![Vec::new(); num_machines];
        for (id, e) in edges.iter().enumerate() {
            if e.job >= num_jobs {
                return Err(InstanceError::JobOutOfRange { job: e.job, num_jobs });
            }
            if e.machine >= num_machines {
                return Err(InstanceError::MachineOutOfRange {
                    machine: e.machine,
                    num_machines,
                });
            }
            if u64::from(e.weight) >= WEIGHT_LIMIT {
                return Err(InstanceError::WeightTooLarge { weight: u64::from(e.weight) });
            }
            if !seen.insert((e.job, e.machine)) {
                return Err(InstanceError::DuplicateEdge { job: e.job, machine: e.machine });
            }
            by_job[e.job].push(id);
            by_machine[e.machine].push(id);
        }
        if let Some(job) = by_job.iter().position(Vec::is_empty) {
            return Err(InstanceError::IsolatedJob { job });
        }
        Ok(Self { num_jobs, num_machines, edges, by_job, by_machine })
    }

    /// Builds an instance from `(job, machine, weight)` triples.
    pub fn from_triples(
        num_jobs: usize,
        num_machines: usize,
        triples: &[(JobId, MachineId, Weight)],
    ) -> Result<Self, InstanceError> {
        let edges = triples
            .iter()
            .map(|&(job, machine, weight)| Edge { job, machine, weight })
            .collect();
        Self::new(num_jobs, num_machines, edges)
    }

    /// Unit-weight instance from `(job, machine)` pairs.
    pub fn unit(
        num_jobs: usize,
        num_machines: usize,
        pairs: &[(JobId, MachineId)],
    ) -> Result<Self, InstanceError> {
        let edges = pairs
            .iter()
            .map(|&(job, machine)| Edge { job, machine, weight: 1 })
            .collect();
        Self::new(num_jobs, num_machines, edges)
    }

    pub fn num_jobs(&self) -> usize {
        self.num_jobs
    }

    pub fn num_machines(&self) -> usize {
        self.num_machines
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        self.edges[id]
    }

    pub fn job_edges(&self, job: JobId) -> &[EdgeId] {
        &self.by_job[job]
    }

    pub fn machine_edges(&self, machine: MachineId) -> &[EdgeId] {
        &self.by_machine[machine]
    }

    pub fn machine_degree(&self, machine: MachineId) -> usize {
        self.by_machine[machine].len()
    }

    /// Maximum machine degree, the number of cost centers of the unit reduction.
    pub fn max_machine_degree(&self) -> usize {
        self.by_machine.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_weight(&self) -> Weight {
        self.edges.iter().map(|e| e.weight).max().unwrap_or(0)
    }

    pub fn is_unit(&self) -> bool {
        self.edges.iter().all(|e| e.weight == 1)
    }

    /// Edge id joining `job` and `machine`, if any.
    pub fn find_edge(&self, job: JobId, machine: MachineId) -> Option<EdgeId> {
        self.by_job
            .get(job)?
            .iter()
            .copied()
            .find(|&id| self.edges[id].machine == machine)
    }

    /// Same topology with every weight replaced by 1.
    pub fn to_unit(&self) -> Self {
        let mut out = self.clone();
        for e in &mut out.edges {
            e.weight = 1;
        }
        out
    }
}

/// Assignment of every job to one adjacent machine.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SemiMatching {
    assignment: Vec<Option<MachineId>>,
}

impl SemiMatching {
    /// All jobs unassigned.
    pub fn unassigned(num_jobs: usize) -> Self {
        Self { assignment: vec![None; num_jobs] }
    }

    pub fn from_assignment(assignment: Vec<MachineId>) -> Self {
        Self { assignment: assignment.into_iter().map(Some).collect() }
    }

    pub fn from_partial(assignment: Vec<Option<MachineId>>) -> Self {
        Self { assignment }
    }

    pub fn num_jobs(&self) -> usize {
        self.assignment.len()
    }

    pub fn machine_of(&self, job: JobId) -> Option<MachineId> {
        self.assignment.get(job).copied().flatten()
    }

    pub fn assign(&mut self, job: JobId, machine: MachineId) {
        self.assignment[job] = Some(machine);
    }

    pub fn assignment(&self) -> &[Option<MachineId>] {
        &self.assignment
    }

    /// Machine per job. Panics on an unassigned job; call after validation.
    pub fn machines(&self) -> Vec<MachineId> {
        self.assignment
            .iter()
            .map(|m| m.expect("unassigned job"))
            .collect()
    }

    /// `deg_M(v)` for every machine.
    pub fn machine_degrees(&self, num_machines: usize) -> Vec<usize> {
        let mut deg = vec![0; num_machines];
        for m in self.assignment.iter().flatten() {
            deg[*m] += 1;
        }
        deg
    }

    /// Weights of the matched edges on each machine.
    pub fn machine_loads(&self, instance: &BipartiteInstance) -> Vec<Vec<Weight>> {
        let mut loads = vec![Vec::new(); instance.num_machines()];
        for (job, m) in self.assignment.iter().enumerate() {
            if let Some(m) = *m {
                if let Some(id) = instance.find_edge(job, m) {
                    loads[m].push(instance.edge(id).weight);
                }
            }
        }
        loads
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The matching covers a different number of jobs than the instance.
    JobCountMismatch { expected: usize, found: usize },
    UnassignedJob { job: JobId },
    NonAdjacent { job: JobId, machine: MachineId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::JobCountMismatch { expected, found } => {
                write!(f, "job count mismatch: expected {expected}, found {found}")
            }
            Violation::UnassignedJob { job } => write!(f, "unassigned job {job}"),
            Violation::NonAdjacent { job, machine } => {
                write!(f, "non-adjacent assignment of job {job} to machine {machine}")
            }
        }
    }
}

impl std::error::Error for Violation {}

/// Reports the first violation, or `Ok(())` for a valid semi-matching.
pub fn validate_semi_matching(
    instance: &BipartiteInstance,
    matching: &SemiMatching,
) -> Result<(), Violation> {
    if matching.num_jobs() != instance.num_jobs() {
        return Err(Violation::JobCountMismatch {
            expected: instance.num_jobs(),
            found: matching.num_jobs(),
        });
    }
    for (job, m) in matching.assignment().iter().enumerate() {
        match m {
            None => return Err(Violation::UnassignedJob { job }),
            Some(machine) => {
                if instance.find_edge(job, *machine).is_none() {
                    return Err(Violation::NonAdjacent { job, machine: *machine });
                }
            }
        }
    }
    Ok(())
}

/// Total completion time of one machine: `sum (d - i + 1) * w_i` over the
/// increasingly sorted weights.
pub fn machine_cost(weights: &[Weight]) -> Result<Cost, CostError> {
    let mut sorted = weights.to_vec();
    sorted.sort_unstable();
    let d = sorted.len() as i64;
    sorted.iter().enumerate().try_fold(0i64, |acc, (i, &w)| {
        (d - i as i64)
            .checked_mul(i64::from(w))
            .and_then(|t| acc.checked_add(t))
            .ok_or(CostError::Overflow)
    })
}

pub fn cost_of_semi_matching(
    instance: &BipartiteInstance,
    matching: &SemiMatching,
) -> Result<Cost, CostError> {
    validate_semi_matching(instance, matching)?;
    matching
        .machine_loads(instance)
        .iter()
        .try_fold(0i64, |acc, load| {
            acc.checked_add(machine_cost(load)?).ok_or(CostError::Overflow)
        })
}

/// A convex per-machine cost `f(k)` with `f(0) = 0`, stored as its marginal
/// sequence `f(k) - f(k-1)` for `k = 1..=len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexMachineCost {
    marginals: Vec<Cost>,
}

impl ConvexMachineCost {
    pub fn from_marginals(marginals: Vec<Cost>) -> Result<Self, CostError> {
        if let Some(k) = marginals.windows(2).position(|w| w[1] < w[0]) {
            return Err(CostError::NotConvex { degree: k + 2 });
        }
        Ok(Self { marginals })
    }

    /// Tabulates `f(1..=max_degree)`; `f(0)` is taken as 0.
    pub fn from_fn(max_degree: usize, f: impl Fn(usize) -> Cost) -> Result<Self, CostError> {
        let mut marginals = Vec::with_capacity(max_degree);
        let mut prev = 0;
        for k in 1..=max_degree {
            let cur = f(k);
            marginals.push(cur.checked_sub(prev).ok_or(CostError::Overflow)?);
            prev = cur;
        }
        Self::from_marginals(marginals)
    }

    /// `k(k+1)/2`, the unit-weight completion time.
    pub fn triangular(max_degree: usize) -> Self {
        Self { marginals: (1..=max_degree as i64).collect() }
    }

    /// The same `f` tabulated for each machine up to its degree.
    pub fn per_machine(
        instance: &BipartiteInstance,
        f: impl Fn(usize) -> Cost,
    ) -> Result<Vec<Self>, CostError> {
        (0..instance.num_machines())
            .map(|v| Self::from_fn(instance.machine_degree(v), &f))
            .collect()
    }

    pub fn marginals(&self) -> &[Cost] {
        &self.marginals
    }

    pub fn max_degree(&self) -> usize {
        self.marginals.len()
    }

    pub fn eval(&self, k: usize) -> Result<Cost, CostError> {
        if k > self.marginals.len() {
            return Err(CostError::DegreeOutOfDomain { degree: k, max: self.marginals.len() });
        }
        self.marginals[..k]
            .iter()
            .try_fold(0i64, |acc, &m| acc.checked_add(m).ok_or(CostError::Overflow))
    }
}

/// `sum_v f_v(deg_M(v))`.
pub fn convex_cost(
    instance: &BipartiteInstance,
    matching: &SemiMatching,
    costs: &[ConvexMachineCost],
) -> Result<Cost, CostError> {
    validate_semi_matching(instance, matching)?;
    if costs.len() != instance.num_machines() {
        return Err(CostError::CostTableMismatch {
            expected: instance.num_machines(),
            found: costs.len(),
        });
    }
    matching
        .machine_degrees(instance.num_machines())
        .iter()
        .zip(costs)
        .try_fold(0i64, |acc, (&k, f)| acc.checked_add(f.eval(k)?).ok_or(CostError::Overflow))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::two_machine;
    use proptest::prelude::*;

    #[test]
    fn machine_cost_examples() {
        assert_eq!(machine_cost(&[]).unwrap(), 0);
        assert_eq!(machine_cost(&[3, 1, 2]).unwrap(), 10);
        assert_eq!(machine_cost(&[1, 1, 1]).unwrap(), 6);
    }

    #[test]
    fn machine_cost_overflow_is_reported() {
        let weights = vec![(1u32 << 31) - 1; 1 << 17];
        assert_eq!(machine_cost(&weights), Err(CostError::Overflow));
    }

    #[test]
    fn cost_examples() {
        let g = two_machine();
        let thick = SemiMatching::from_assignment(vec![0, 1, 1, 1]);
        assert_eq!(cost_of_semi_matching(&g, &thick).unwrap(), 7);
        let opt = SemiMatching::from_assignment(vec![0, 0, 1, 1]);
        assert_eq!(cost_of_semi_matching(&g, &opt).unwrap(), 6);
        let single = BipartiteInstance::from_triples(1, 1, &[(0, 0, 7)]).unwrap();
        assert_eq!(
            cost_of_semi_matching(&single, &SemiMatching::from_assignment(vec![0])).unwrap(),
            7
        );
    }

    #[test]
    fn validation_reports_first_violation() {
        let g = two_machine();
        assert_eq!(
            validate_semi_matching(&g, &SemiMatching::from_assignment(vec![0, 0, 1, 1])),
            Ok(())
        );
        let partial = SemiMatching::from_partial(vec![Some(0), None, Some(1), Some(1)]);
        assert_eq!(
            validate_semi_matching(&g, &partial),
            Err(Violation::UnassignedJob { job: 1 })
        );
        let bad = SemiMatching::from_assignment(vec![1, 0, 1, 1]);
        assert_eq!(
            validate_semi_matching(&g, &bad),
            Err(Violation::NonAdjacent { job: 0, machine: 1 })
        );
        assert!(cost_of_semi_matching(&g, &bad).is_err());
    }

    #[test]
    fn instance_rejects_bad_input() {
        assert_eq!(
            BipartiteInstance::unit(2, 1, &[(0, 0)]),
            Err(InstanceError::IsolatedJob { job: 1 })
        );
        assert_eq!(
            BipartiteInstance::unit(1, 1, &[(0, 0), (0, 0)]),
            Err(InstanceError::DuplicateEdge { job: 0, machine: 0 })
        );
        assert!(matches!(
            BipartiteInstance::unit(1, 1, &[(0, 1)]),
            Err(InstanceError::MachineOutOfRange { .. })
        ));
        assert!(matches!(
            BipartiteInstance::from_triples(1, 1, &[(0, 0, 1 << 31)]),
            Err(InstanceError::WeightTooLarge { .. })
        ));
    }

    #[test]
    fn convex_examples() {
        let g = two_machine();
        let opt = SemiMatching::from_assignment(vec![0, 0, 1, 1]);
        let tri = ConvexMachineCost::per_machine(&g, |k| (k * (k + 1) / 2) as i64).unwrap();
        assert_eq!(convex_cost(&g, &opt, &tri).unwrap(), 6);
        let lin = ConvexMachineCost::per_machine(&g, |k| k as i64).unwrap();
        assert_eq!(convex_cost(&g, &opt, &lin).unwrap(), 4);
        let sq = ConvexMachineCost::per_machine(&g, |k| (k * k) as i64).unwrap();
        assert_eq!(convex_cost(&g, &opt, &sq).unwrap(), 8);
        let alt = SemiMatching::from_assignment(vec![0, 1, 1, 1]);
        assert_eq!(convex_cost(&g, &alt, &sq).unwrap(), 10);
    }

    #[test]
    fn non_convex_rejected() {
        assert_eq!(
            ConvexMachineCost::from_marginals(vec![1, 3, 2]),
            Err(CostError::NotConvex { degree: 3 })
        );
        assert!(ConvexMachineCost::from_fn(3, |k| [0, 5, 6, 20][k]).is_err());
        assert_eq!(ConvexMachineCost::triangular(3).eval(3).unwrap(), 6);
    }

    fn unit_instance() -> impl Strategy<Value = (BipartiteInstance, SemiMatching)> {
        (1usize..6, 1usize..5)
            .prop_flat_map(|(n, k)| {
                let choices = proptest::collection::vec(0..k, n);
                let extra = proptest::collection::vec((0..n, 0..k), 0..8);
                (Just(n), Just(k), choices, extra)
            })
            .prop_map(|(n, k, choices, extra)| {
                let mut pairs: Vec<(usize, usize)> = choices.iter().copied().enumerate().collect();
                for p in extra {
                    if !pairs.contains(&p) {
                        pairs.push(p);
                    }
                }
                let g = BipartiteInstance::unit(n, k, &pairs).unwrap();
                (g, SemiMatching::from_assignment(choices))
            })
    }

    proptest! {
        #[test]
        fn machine_cost_permutation_invariant(mut ws in proptest::collection::vec(0u32..1000, 0..12)) {
            let a = machine_cost(&ws).unwrap();
            ws.reverse();
            prop_assert_eq!(a, machine_cost(&ws).unwrap());
        }

        #[test]
        fn adding_a_job_never_lowers_cost(ws in proptest::collection::vec(0u32..1000, 0..12), w in 0u32..1000) {
            let mut more = ws.clone();
            more.push(w);
            prop_assert!(machine_cost(&more).unwrap() >= machine_cost(&ws).unwrap());
        }

        #[test]
        fn unit_cost_closed_form((g, m) in unit_instance()) {
            let cost = cost_of_semi_matching(&g, &m).unwrap();
            let closed: i64 = m.machine_degrees(g.num_machines()).iter()
                .map(|&d| (d * (d + 1) / 2) as i64).sum();
            prop_assert_eq!(cost, closed);
            let tri = ConvexMachineCost::per_machine(&g, |k| (k * (k + 1) / 2) as i64).unwrap();
            prop_assert_eq!(cost, convex_cost(&g, &m, &tri).unwrap());
        }
    }
}
