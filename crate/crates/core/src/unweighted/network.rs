//! The cost-center flow network of a semi-matching instance.
//!
//! Nodes are jobs, machines and cost centers; the super-source `s` and the
//! super-sink `t` stay implicit because every max flow saturates `s -> u`
//! and each center forwards all of its inflow to `t`. Arcs come in pairs:
//! arc `2k` is the forward arc of edge `k`, arc `2k + 1` its reverse, and the
//! residual capacity of the reverse arc is the flow on the edge.

use crate::error::{CostError, SolveError};
use crate::graph::{
    validate_semi_matching, BipartiteInstance, ConvexMachineCost, Cost, JobId, MachineId,
    SemiMatching,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeRef {
    Job(JobId),
    Machine(MachineId),
    Center(usize),
}

/// One machine-to-center edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CenterEdge {
    pub center: usize,
    pub cost: Cost,
    pub capacity: u32,
    pub flow: u32,
}

#[derive(Debug, Clone)]
pub struct CostCenterNetwork {
    num_jobs: usize,
    num_machines: usize,
    center_cost: Vec<Cost>,
    head: Vec<u32>,
    res: Vec<u32>,
    adj_start: Vec<usize>,
    adj: Vec<u32>,
    /// First center edge id of each machine; a machine's center edges are
    /// consecutive and ordered by center index.
    machine_edge_start: Vec<usize>,
    /// Running capacity total over a machine's center edges.
    machine_cap_prefix: Vec<u32>,
    machine_load: Vec<u32>,
    job_edge_count: usize,
}

impl CostCenterNetwork {
    /// Unit-weight reduction: machine `v` links to centers `c_1..c_deg(v)`
    /// with capacity 1 and cost equal to the center index.
    pub fn unit(instance: &BipartiteInstance) -> Self {
        let costs = (0..instance.num_machines())
            .map(|v| ConvexMachineCost::triangular(instance.machine_degree(v)))
            .collect::<Vec<_>>();
        Self::build(instance, &costs).expect("triangular costs are convex")
    }

    /// Convex reduction. Centers are the distinct marginal values in
    /// increasing order; equal marginals of one machine share a single edge
    /// whose capacity is their multiplicity.
    pub fn convex(
        instance: &BipartiteInstance,
        costs: &[ConvexMachineCost],
    ) -> Result<Self, CostError> {
        if costs.len() != instance.num_machines() {
            return Err(CostError::CostTableMismatch {
                expected: instance.num_machines(),
                found: costs.len(),
            });
        }
        for (v, f) in costs.iter().enumerate() {
            let deg = instance.machine_degree(v);
            if f.max_degree() < deg {
                return Err(CostError::DegreeOutOfDomain { degree: deg, max: f.max_degree() });
            }
            // Re-validate: callers may hand in marginals built elsewhere.
            ConvexMachineCost::from_marginals(f.marginals()[..deg].to_vec())?;
        }
        Self::build(instance, costs)
    }

    fn build(instance: &BipartiteInstance, costs: &[ConvexMachineCost]) -> Result<Self, CostError> {
        let n = instance.num_jobs();
        let nm = instance.num_machines();
        let mut values: Vec<Cost> = (0..nm)
            .flat_map(|v| costs[v].marginals()[..instance.machine_degree(v)].iter().copied())
            .collect();
        values.sort_unstable();
        values.dedup();
        let k = values.len();

        let mut tails: Vec<u32> = Vec::new();
        let mut heads: Vec<u32> = Vec::new();
        let mut caps: Vec<u32> = Vec::new();
        for e in instance.edges() {
            tails.push(e.job as u32);
            heads.push((n + e.machine) as u32);
            caps.push(1);
        }
        let job_edge_count = tails.len();
        let mut machine_edge_start = Vec::with_capacity(nm + 1);
        let mut machine_cap_prefix = Vec::new();
        for (v, f) in costs.iter().enumerate().take(nm) {
            machine_edge_start.push(tails.len());
            let marg = &f.marginals()[..instance.machine_degree(v)];
            let mut total = 0u32;
            for run in marg.chunk_by(|a, b| a == b) {
                let c = values.binary_search(&run[0]).expect("marginal value indexed");
                tails.push((n + v) as u32);
                heads.push((n + nm + c) as u32);
                caps.push(run.len() as u32);
                total += run.len() as u32;
                machine_cap_prefix.push(total);
            }
        }
        machine_edge_start.push(tails.len());

        let num_nodes = n + nm + k;
        let mut degree = vec![0usize; num_nodes + 1];
        for (&t, &h) in tails.iter().zip(&heads) {
            degree[t as usize] += 1;
            degree[h as usize] += 1;
        }
        let mut adj_start = vec![0usize; num_nodes + 1];
        for i in 0..num_nodes {
            adj_start[i + 1] = adj_start[i] + degree[i];
        }
        let mut fill = adj_start.clone();
        let mut adj = vec![0u32; 2 * tails.len()];
        let mut head = vec![0u32; 2 * tails.len()];
        let mut res = vec![0u32; 2 * tails.len()];
        for (e, ((&t, &h), &c)) in tails.iter().zip(&heads).zip(&caps).enumerate() {
            head[2 * e] = h;
            head[2 * e + 1] = t;
            res[2 * e] = c;
            adj[fill[t as usize]] = (2 * e) as u32;
            fill[t as usize] += 1;
            adj[fill[h as usize]] = (2 * e + 1) as u32;
            fill[h as usize] += 1;
        }
        Ok(Self {
            num_jobs: n,
            num_machines: nm,
            center_cost: values,
            head,
            res,
            adj_start,
            adj,
            machine_edge_start,
            machine_cap_prefix,
            machine_load: vec![0; nm],
            job_edge_count,
        })
    }

    pub fn num_jobs(&self) -> usize {
        self.num_jobs
    }

    pub fn num_machines(&self) -> usize {
        self.num_machines
    }

    pub fn num_centers(&self) -> usize {
        self.center_cost.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.num_jobs + self.num_machines + self.center_cost.len()
    }

    /// Edge count including the implicit `s -> u` and `c -> t` edges.
    pub fn num_edges(&self) -> usize {
        self.res.len() / 2 + self.num_jobs + self.num_centers()
    }

    pub fn center_cost(&self, c: usize) -> Cost {
        self.center_cost[c]
    }

    pub fn node_index(&self, node: NodeRef) -> usize {
        match node {
            NodeRef::Job(u) => u,
            NodeRef::Machine(v) => self.num_jobs + v,
            NodeRef::Center(c) => self.num_jobs + self.num_machines + c,
        }
    }

    pub fn node_ref(&self, idx: usize) -> NodeRef {
        if idx < self.num_jobs {
            NodeRef::Job(idx)
        } else if idx < self.num_jobs + self.num_machines {
            NodeRef::Machine(idx - self.num_jobs)
        } else {
            NodeRef::Center(idx - self.num_jobs - self.num_machines)
        }
    }

    pub(crate) fn center_of_node(&self, idx: usize) -> Option<usize> {
        idx.checked_sub(self.num_jobs + self.num_machines)
    }

    pub(crate) fn arcs(&self, node: usize) -> &[u32] {
        &self.adj[self.adj_start[node]..self.adj_start[node + 1]]
    }

    pub(crate) fn head(&self, arc: u32) -> usize {
        self.head[arc as usize] as usize
    }

    pub(crate) fn residual(&self, arc: u32) -> u32 {
        self.res[arc as usize]
    }

    pub(crate) fn push(&mut self, arc: u32, amount: u32) {
        self.res[arc as usize] -= amount;
        self.res[(arc ^ 1) as usize] += amount;
    }

    /// Whether `arc` runs between a machine and a center (either direction).
    pub(crate) fn is_center_arc(&self, arc: u32) -> bool {
        (arc as usize) / 2 >= self.job_edge_count
    }

    /// Machine-center edges of `v`, ordered by center index.
    pub fn center_edges(&self, v: MachineId) -> Vec<CenterEdge> {
        (self.machine_edge_start[v]..self.machine_edge_start[v + 1])
            .map(|e| {
                let c = self.center_of_node(self.head[2 * e] as usize).unwrap();
                CenterEdge {
                    center: c,
                    cost: self.center_cost[c],
                    capacity: self.res[2 * e] + self.res[2 * e + 1],
                    flow: self.res[2 * e + 1],
                }
            })
            .collect()
    }

    /// Centers adjacent to `v` (one entry per unit of capacity).
    pub fn center_slots(&self, v: MachineId) -> Vec<Cost> {
        self.center_edges(v)
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.cost, e.capacity as usize))
            .collect()
    }

    pub fn machine_load(&self, v: MachineId) -> u32 {
        self.machine_load[v]
    }

    /// Edge id (within `v`'s center edges) holding the `unit`-th unit of a
    /// prefix-filled machine, `unit >= 1`.
    fn edge_holding_unit(&self, v: MachineId, unit: u32) -> usize {
        let lo = self.machine_edge_start[v];
        let hi = self.machine_edge_start[v + 1];
        let prefix = &self.machine_cap_prefix[lo - self.job_edge_count..hi - self.job_edge_count];
        lo + prefix.partition_point(|&c| c < unit)
    }

    /// Routes one unit leaving `v` through center edge `edge` back onto the
    /// prefix: the machine gives up its last (most expensive) unit instead.
    /// Returns whether flow actually moved.
    pub(crate) fn settle_removal(&mut self, v: MachineId, edge: usize) -> bool {
        let load = self.machine_load[v];
        let last = self.edge_holding_unit(v, load);
        self.machine_load[v] = load - 1;
        if last == edge {
            return false;
        }
        self.push(2 * edge as u32, 1);
        self.push((2 * last + 1) as u32, 1);
        true
    }

    /// Counterpart of [`Self::settle_removal`] for a unit entering center edge `edge`.
    pub(crate) fn settle_addition(&mut self, v: MachineId, edge: usize) -> bool {
        let load = self.machine_load[v] + 1;
        let next = self.edge_holding_unit(v, load);
        self.machine_load[v] = load;
        if next == edge {
            return false;
        }
        self.push((2 * edge + 1) as u32, 1);
        self.push(2 * next as u32, 1);
        true
    }

    /// Center edge of `arc` as `(machine, edge id)`.
    pub(crate) fn center_arc_endpoint(&self, arc: u32) -> (MachineId, usize) {
        let e = arc as usize / 2;
        let tail = self.head[2 * e + 1] as usize;
        (tail - self.num_jobs, e)
    }

    /// Sets the flow to the one induced by `matching`, filling every
    /// machine's center edges cheapest first.
    pub fn seed_flow(
        &mut self,
        instance: &BipartiteInstance,
        matching: &SemiMatching,
    ) -> Result<(), SolveError> {
        validate_semi_matching(instance, matching)?;
        for e in 0..self.res.len() / 2 {
            let cap = self.res[2 * e] + self.res[2 * e + 1];
            self.res[2 * e] = cap;
            self.res[2 * e + 1] = 0;
        }
        for (id, e) in instance.edges().iter().enumerate() {
            if matching.machine_of(e.job) == Some(e.machine) {
                self.push(2 * id as u32, 1);
            }
        }
        let degrees = matching.machine_degrees(self.num_machines);
        for (v, &d) in degrees.iter().enumerate() {
            self.machine_load[v] = d as u32;
            let mut left = d as u32;
            for e in self.machine_edge_start[v]..self.machine_edge_start[v + 1] {
                let take = left.min(self.res[2 * e]);
                self.push(2 * e as u32, take);
                left -= take;
            }
        }
        Ok(())
    }

    /// Flow value through the implicit sink.
    pub fn flow_value(&self) -> u64 {
        (self.job_edge_count..self.res.len() / 2)
            .map(|e| u64::from(self.res[2 * e + 1]))
            .sum()
    }

    pub fn flow_cost(&self) -> Cost {
        (self.job_edge_count..self.res.len() / 2)
            .map(|e| {
                let c = self.center_of_node(self.head[2 * e] as usize).unwrap();
                i64::from(self.res[2 * e + 1]) * self.center_cost[c]
            })
            .sum()
    }

    /// Every job sends one unit, every machine forwards what it receives.
    pub fn check_conservation(&self) -> Result<(), String> {
        let mut machine_in = vec![0u32; self.num_machines];
        for u in 0..self.num_jobs {
            let out: u32 = self
                .arcs(u)
                .iter()
                .filter(|&&a| a % 2 == 0)
                .map(|&a| self.res[(a ^ 1) as usize])
                .sum();
            if out != 1 {
                return Err(format!("job {u} sends {out} units"));
            }
        }
        for e in 0..self.job_edge_count {
            let v = self.head[2 * e] as usize - self.num_jobs;
            machine_in[v] += self.res[2 * e + 1];
        }
        for (v, &inflow) in machine_in.iter().enumerate() {
            let out: u32 = self.center_edges(v).iter().map(|e| e.flow).sum();
            if out != inflow || out != self.machine_load[v] {
                return Err(format!("machine {v} receives {inflow} but forwards {out}"));
            }
        }
        Ok(())
    }

    /// Each machine uses its center edges as a prefix, cheapest first.
    pub fn check_prefix(&self) -> Result<(), String> {
        for v in 0..self.num_machines {
            let mut open = false;
            for e in self.center_edges(v) {
                if open && e.flow > 0 {
                    return Err(format!("machine {v} uses center {} past a free edge", e.center));
                }
                if e.flow < e.capacity {
                    open = true;
                }
            }
        }
        Ok(())
    }

    /// Reads the job assignment off a saturating flow.
    pub fn extract_semi_matching(&self) -> Result<SemiMatching, SolveError> {
        let mut m = SemiMatching::unassigned(self.num_jobs);
        for u in 0..self.num_jobs {
            let mut found = None;
            for &a in self.arcs(u) {
                if a % 2 == 0 && self.res[(a ^ 1) as usize] > 0 {
                    if found.is_some() {
                        return Err(SolveError::NonSaturating);
                    }
                    found = Some(self.head(a) - self.num_jobs);
                }
            }
            match found {
                Some(v) => m.assign(u, v),
                None => return Err(SolveError::NonSaturating),
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::two_machine;

    #[test]
    fn two_machine_network_shape() {
        let net = CostCenterNetwork::unit(&two_machine());
        assert_eq!(net.num_centers(), 3);
        let c = |v| net.center_edges(v).iter().map(|e| (e.center, e.cost)).collect::<Vec<_>>();
        assert_eq!(c(0), vec![(0, 1), (1, 2)]);
        assert_eq!(c(1), vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn single_edge_network() {
        let g = BipartiteInstance::unit(1, 1, &[(0, 0)]).unwrap();
        let net = CostCenterNetwork::unit(&g);
        assert_eq!(net.num_centers(), 1);
        assert_eq!(net.num_edges(), 4);
    }

    #[test]
    fn convex_marginals_share_centers() {
        let g = BipartiteInstance::unit(3, 1, &[(0, 0), (1, 0), (2, 0)]).unwrap();
        let costs = vec![ConvexMachineCost::from_marginals(vec![1, 3, 3]).unwrap()];
        let net = CostCenterNetwork::convex(&g, &costs).unwrap();
        assert_eq!(net.center_slots(0), vec![1, 3, 3]);
        assert_eq!(net.num_centers(), 2);
        let bad = vec![ConvexMachineCost::from_marginals(vec![1, 3]).unwrap()];
        assert!(CostCenterNetwork::convex(&g, &bad).is_err());
    }

    #[test]
    fn seed_flow_examples() {
        let g = two_machine();
        let mut net = CostCenterNetwork::unit(&g);
        let thick = SemiMatching::from_assignment(vec![0, 1, 1, 1]);
        net.seed_flow(&g, &thick).unwrap();
        assert_eq!(net.flow_value(), 4);
        assert_eq!(net.flow_cost(), 7);
        net.check_conservation().unwrap();
        net.check_prefix().unwrap();
        assert_eq!(net.extract_semi_matching().unwrap(), thick);

        let spread = BipartiteInstance::unit(2, 2, &[(0, 0), (1, 1), (0, 1)]).unwrap();
        let mut net = CostCenterNetwork::unit(&spread);
        net.seed_flow(&spread, &SemiMatching::from_assignment(vec![0, 1])).unwrap();
        assert_eq!(net.flow_cost(), 2);
    }

    #[test]
    fn empty_job_set() {
        let g = BipartiteInstance::unit(0, 2, &[]).unwrap();
        let mut net = CostCenterNetwork::unit(&g);
        net.seed_flow(&g, &SemiMatching::unassigned(0)).unwrap();
        assert_eq!(net.flow_value(), 0);
        assert_eq!(net.num_centers(), 0);
    }

    #[test]
    fn unsaturated_flow_is_rejected() {
        let g = two_machine();
        let net = CostCenterNetwork::unit(&g);
        assert!(matches!(net.extract_semi_matching(), Err(SolveError::NonSaturating)));
    }
}
