//! Cost-reducing path cancellation: Dinic blocking flows between center
//! sets and the divide-and-conquer driver over center index ranges.

use std::collections::VecDeque;

use super::network::{CostCenterNetwork, NodeRef};
use crate::error::SolveError;

const UNSEEN: u32 = u32::MAX;

/// Statistics of one `cancel` call.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CancelRun {
    pub sources: usize,
    pub sinks: usize,
    /// Blocking-flow rounds, including the final round that finds no path.
    pub rounds: usize,
    /// Layer distance to the super-sink at each productive round.
    pub distances: Vec<u32>,
    pub augmentations: usize,
}

#[derive(Debug, Clone, Default)]
pub struct CancelCounters {
    pub runs: Vec<CancelRun>,
    pub max_depth: usize,
    pub edges_scanned: u64,
    /// Flow units moved to restore cheapest-first center usage.
    pub renumber_moves: u64,
}

impl CancelCounters {
    pub fn max_rounds(&self) -> usize {
        self.runs.iter().map(|r| r.rounds).max().unwrap_or(0)
    }

    pub fn total_augmentations(&self) -> usize {
        self.runs.iter().map(|r| r.augmentations).sum()
    }
}

/// Node subset a cancel call is confined to.
struct Scope<'a> {
    nodes: &'a [usize],
    label: &'a [u32],
    id: u32,
}

impl Scope<'_> {
    fn contains(&self, node: usize) -> bool {
        self.label[node] == self.id
    }
}

/// Scratch space reused across calls on one network.
struct Workspace {
    level: Vec<u32>,
    cursor: Vec<usize>,
    role: Vec<u8>,
}

const SOURCE: u8 = 1;
const SINK: u8 = 2;

impl Workspace {
    fn new(num_nodes: usize) -> Self {
        Self { level: vec![UNSEEN; num_nodes], cursor: vec![0; num_nodes], role: vec![0; num_nodes] }
    }
}

/// Pushes a maximum flow from `sources` to `sinks` (center indices) through
/// the residual network. Every source index must exceed every sink index.
/// Paths never pass through centers outside both sets.
pub fn cancel(
    network: &mut CostCenterNetwork,
    sources: &[usize],
    sinks: &[usize],
    counters: &mut CancelCounters,
) -> Result<CancelRun, SolveError> {
    let nodes: Vec<usize> = (0..network.num_nodes()).collect();
    let label = vec![0u32; network.num_nodes()];
    let scope = Scope { nodes: &nodes, label: &label, id: 0 };
    let mut ws = Workspace::new(network.num_nodes());
    let run = cancel_in(network, &scope, sources, sinks, &mut ws, counters)?;
    counters.runs.push(run.clone());
    Ok(run)
}

fn cancel_in(
    network: &mut CostCenterNetwork,
    scope: &Scope<'_>,
    sources: &[usize],
    sinks: &[usize],
    ws: &mut Workspace,
    counters: &mut CancelCounters,
) -> Result<CancelRun, SolveError> {
    let min_source = sources.iter().min();
    let max_sink = sinks.iter().max();
    if let (Some(a), Some(b)) = (min_source, max_sink) {
        if a <= b {
            return Err(SolveError::OverlappingCenters);
        }
    }
    let mut run = CancelRun { sources: sources.len(), sinks: sinks.len(), ..Default::default() };
    if sources.is_empty() || sinks.is_empty() {
        return Ok(run);
    }
    let source_nodes: Vec<usize> =
        sources.iter().map(|&c| network.node_index(NodeRef::Center(c))).collect();
    for &c in sinks {
        ws.role[network.node_index(NodeRef::Center(c))] = SINK;
    }
    for &s in &source_nodes {
        ws.role[s] = SOURCE;
    }

    let result = loop {
        run.rounds += 1;
        let Some(dist) = build_layers(network, scope, &source_nodes, ws, counters) else {
            break Ok(());
        };
        if let Some(&prev) = run.distances.last() {
            if dist <= prev {
                break Err(SolveError::Invariant(format!(
                    "layer distance {dist} did not grow past {prev}"
                )));
            }
        }
        run.distances.push(dist);
        match blocking_flow(network, scope, &source_nodes, ws, counters) {
            Ok(0) => {
                break Err(SolveError::Invariant("blocking flow round pushed nothing".into()))
            }
            Ok(k) => run.augmentations += k,
            Err(e) => break Err(e),
        }
    };

    for &c in sinks {
        ws.role[network.node_index(NodeRef::Center(c))] = 0;
    }
    for &s in &source_nodes {
        ws.role[s] = 0;
    }
    result.map(|()| run)
}

/// BFS layering from the super-source. Returns the super-sink's distance
/// (edge count, counting the super-source and super-sink arcs) if a sink is
/// reachable.
fn build_layers(
    network: &CostCenterNetwork,
    scope: &Scope<'_>,
    sources: &[usize],
    ws: &mut Workspace,
    counters: &mut CancelCounters,
) -> Option<u32> {
    for &x in scope.nodes {
        ws.level[x] = UNSEEN;
    }
    let mut queue = VecDeque::new();
    for &s in sources {
        ws.level[s] = 1;
        queue.push_back(s);
    }
    let mut sink_level = None;
    while let Some(x) = queue.pop_front() {
        let lx = ws.level[x];
        if sink_level.is_some_and(|l| lx >= l) {
            break;
        }
        if ws.role[x] == SINK {
            sink_level = Some(lx);
            continue;
        }
        for &a in network.arcs(x) {
            counters.edges_scanned += 1;
            let y = network.head(a);
            if network.residual(a) > 0
                && scope.contains(y)
                && ws.level[y] == UNSEEN
                && (network.center_of_node(y).is_none() || ws.role[y] != 0)
            {
                ws.level[y] = lx + 1;
                queue.push_back(y);
            }
        }
    }
    for &x in scope.nodes {
        ws.cursor[x] = 0;
    }
    sink_level.map(|l| l + 1)
}

/// Depth-first advance/retreat over the layer graph; nodes that lead
/// nowhere are cut off by clearing their level.
fn blocking_flow(
    network: &mut CostCenterNetwork,
    scope: &Scope<'_>,
    sources: &[usize],
    ws: &mut Workspace,
    counters: &mut CancelCounters,
) -> Result<usize, SolveError> {
    let mut pushed = 0;
    let mut path: Vec<u32> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    for &s in sources {
        loop {
            path.clear();
            stack.clear();
            stack.push(s);
            let mut reached = false;
            while let Some(&x) = stack.last() {
                if ws.role[x] == SINK {
                    reached = true;
                    break;
                }
                let arcs = network.arcs(x);
                let mut advanced = false;
                while ws.cursor[x] < arcs.len() {
                    let a = arcs[ws.cursor[x]];
                    counters.edges_scanned += 1;
                    let y = network.head(a);
                    if network.residual(a) > 0
                        && scope.contains(y)
                        && ws.level[y] != UNSEEN
                        && ws.level[y] == ws.level[x] + 1
                    {
                        path.push(a);
                        stack.push(y);
                        advanced = true;
                        break;
                    }
                    ws.cursor[x] += 1;
                }
                if !advanced {
                    ws.level[x] = UNSEEN;
                    stack.pop();
                    if path.pop().is_some() {
                        let parent = *stack.last().unwrap();
                        ws.cursor[parent] += 1;
                    }
                }
            }
            if !reached {
                break;
            }
            augment(network, &path, counters)?;
            pushed += 1;
        }
    }
    Ok(pushed)
}

/// Pushes one unit along `path` (source center to sink center) and restores
/// cheapest-first center usage on the two machines at its ends.
fn augment(
    network: &mut CostCenterNetwork,
    path: &[u32],
    counters: &mut CancelCounters,
) -> Result<(), SolveError> {
    for &a in path {
        network.push(a, 1);
    }
    let (first, last) = (path[0], path[path.len() - 1]);
    if !network.is_center_arc(first) || !network.is_center_arc(last) || first % 2 == 0 || last % 2 == 1
    {
        return Err(SolveError::Invariant("augmenting path must run center to center".into()));
    }
    let (v, e) = network.center_arc_endpoint(first);
    counters.renumber_moves += u64::from(network.settle_removal(v, e));
    let (v, e) = network.center_arc_endpoint(last);
    counters.renumber_moves += u64::from(network.settle_addition(v, e));
    Ok(())
}

/// Nodes reachable from the `seed` centers in the residual network, and the rest.
pub fn reachable_partition(
    network: &CostCenterNetwork,
    seed: &[usize],
) -> (Vec<NodeRef>, Vec<NodeRef>) {
    let nodes: Vec<usize> = (0..network.num_nodes()).collect();
    let label = vec![0u32; network.num_nodes()];
    let scope = Scope { nodes: &nodes, label: &label, id: 0 };
    let mut seen = vec![false; network.num_nodes()];
    let seeds: Vec<usize> = seed.iter().map(|&c| network.node_index(NodeRef::Center(c))).collect();
    let mut scanned = 0;
    reach(network, &scope, &seeds, &mut seen, &mut scanned);
    let (inside, outside): (Vec<usize>, Vec<usize>) = nodes.iter().partition(|&&x| seen[x]);
    (
        inside.into_iter().map(|x| network.node_ref(x)).collect(),
        outside.into_iter().map(|x| network.node_ref(x)).collect(),
    )
}

fn reach(
    network: &CostCenterNetwork,
    scope: &Scope<'_>,
    seeds: &[usize],
    seen: &mut [bool],
    scanned: &mut u64,
) {
    let mut stack = Vec::new();
    for &s in seeds {
        if !seen[s] {
            seen[s] = true;
            stack.push(s);
        }
    }
    while let Some(x) = stack.pop() {
        for &a in network.arcs(x) {
            *scanned += 1;
            let y = network.head(a);
            if network.residual(a) > 0 && scope.contains(y) && !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
}

/// Cancels every cost-reducing path by recursive halving of the centers.
pub fn cancel_all(
    network: &mut CostCenterNetwork,
    counters: &mut CancelCounters,
) -> Result<(), SolveError> {
    let n = network.num_nodes();
    let mut label = vec![0u32; n];
    let mut next_label = 1u32;
    let mut ws = Workspace::new(n);
    let mut seen = vec![false; n];
    // (nodes, lowest center, center count, depth, label)
    let mut work: Vec<(Vec<usize>, usize, usize, usize, u32)> =
        vec![((0..n).collect(), 0, network.num_centers(), 1, 0)];
    while let Some((nodes, lo, count, depth, id)) = work.pop() {
        counters.max_depth = counters.max_depth.max(depth);
        if count <= 1 {
            continue;
        }
        let low = count.div_ceil(2);
        let sinks: Vec<usize> = (lo..lo + low).collect();
        let sources: Vec<usize> = (lo + low..lo + count).collect();
        let run = {
            let scope = Scope { nodes: &nodes, label: &label, id };
            cancel_in(network, &scope, &sources, &sinks, &mut ws, counters)?
        };
        counters.runs.push(run);

        let seeds: Vec<usize> =
            sources.iter().map(|&c| network.node_index(NodeRef::Center(c))).collect();
        {
            let scope = Scope { nodes: &nodes, label: &label, id };
            reach(network, &scope, &seeds, &mut seen, &mut counters.edges_scanned);
        }
        let (upper, lower): (Vec<usize>, Vec<usize>) = nodes.iter().partition(|&&x| seen[x]);
        for &x in &upper {
            seen[x] = false;
        }
        if let Some(&bad) = lower.iter().find(|&&x| {
            network.center_of_node(x).is_some_and(|c| c >= lo + low)
        }) {
            return Err(SolveError::Invariant(format!("source center node {bad} left unreachable")));
        }
        if let Some(&bad) =
            upper.iter().find(|&&x| network.center_of_node(x).is_some_and(|c| c < lo + low))
        {
            return Err(SolveError::Invariant(format!("sink center node {bad} still reachable")));
        }
        let (upper_id, lower_id) = (next_label, next_label + 1);
        next_label += 2;
        for &x in &upper {
            label[x] = upper_id;
        }
        for &x in &lower {
            label[x] = lower_id;
        }
        work.push((upper, lo + low, count - low, depth + 1, upper_id));
        work.push((lower, lo, low, depth + 1, lower_id));
    }
    Ok(())
}

/// Whether some residual path leads from a center to a cheaper one.
/// Quadratic; meant for tests and verification.
pub fn has_cost_reducing_path(network: &CostCenterNetwork) -> bool {
    let nodes: Vec<usize> = (0..network.num_nodes()).collect();
    let label = vec![0u32; network.num_nodes()];
    let scope = Scope { nodes: &nodes, label: &label, id: 0 };
    let mut scanned = 0;
    (0..network.num_centers()).any(|c| {
        let mut seen = vec![false; network.num_nodes()];
        reach(network, &scope, &[network.node_index(NodeRef::Center(c))], &mut seen, &mut scanned);
        (0..network.num_centers()).any(|d| {
            network.center_cost(d) < network.center_cost(c)
                && seen[network.node_index(NodeRef::Center(d))]
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::two_machine;
    use crate::graph::{BipartiteInstance, SemiMatching};

    fn seeded_two_machine() -> (BipartiteInstance, CostCenterNetwork) {
        let g = two_machine();
        let mut net = CostCenterNetwork::unit(&g);
        net.seed_flow(&g, &SemiMatching::from_assignment(vec![0, 1, 1, 1])).unwrap();
        (g, net)
    }

    #[test]
    fn two_machine_cancel_moves_one_unit() {
        let (_, mut net) = seeded_two_machine();
        let mut counters = CancelCounters::default();
        let run = cancel(&mut net, &[2], &[0, 1], &mut counters).unwrap();
        assert_eq!(run.augmentations, 1);
        assert_eq!(run.distances, vec![6]);
        assert_eq!(run.rounds, 2);
        assert_eq!(net.flow_cost(), 6);
        assert_eq!(net.flow_value(), 4);
        net.check_conservation().unwrap();
        net.check_prefix().unwrap();
        assert_eq!(net.extract_semi_matching().unwrap().machine_of(1), Some(0));
    }

    #[test]
    fn empty_sides_change_nothing() {
        let (_, mut net) = seeded_two_machine();
        let mut counters = CancelCounters::default();
        let run = cancel(&mut net, &[], &[0, 1], &mut counters).unwrap();
        assert_eq!(run.augmentations, 0);
        let run = cancel(&mut net, &[2], &[], &mut counters).unwrap();
        assert_eq!(run.rounds, 0);
        assert_eq!(net.flow_cost(), 7);
    }

    #[test]
    fn optimal_flow_takes_one_empty_round() {
        let g = two_machine();
        let mut net = CostCenterNetwork::unit(&g);
        net.seed_flow(&g, &SemiMatching::from_assignment(vec![0, 0, 1, 1])).unwrap();
        let mut counters = CancelCounters::default();
        let run = cancel(&mut net, &[2], &[0, 1], &mut counters).unwrap();
        assert_eq!((run.rounds, run.augmentations), (1, 0));
    }

    #[test]
    fn overlapping_centers_rejected() {
        let (_, mut net) = seeded_two_machine();
        let mut counters = CancelCounters::default();
        assert!(matches!(
            cancel(&mut net, &[1], &[1, 2], &mut counters),
            Err(SolveError::OverlappingCenters)
        ));
    }

    #[test]
    fn partition_after_cancel() {
        let (_, mut net) = seeded_two_machine();
        let mut counters = CancelCounters::default();
        cancel(&mut net, &[2], &[0, 1], &mut counters).unwrap();
        let (inside, outside) = reachable_partition(&net, &[2]);
        // c3 lost its only unit, so nothing leaves it in the residual.
        assert_eq!(inside, vec![NodeRef::Center(2)]);
        assert!(outside.contains(&NodeRef::Machine(1)));

        let (inside, outside) = reachable_partition(&net, &[]);
        assert!(inside.is_empty());
        assert_eq!(outside.len(), net.num_nodes());
    }

    #[test]
    fn cancel_all_reaches_optimum() {
        let (_, mut net) = seeded_two_machine();
        let mut counters = CancelCounters::default();
        cancel_all(&mut net, &mut counters).unwrap();
        assert_eq!(net.flow_cost(), 6);
        assert!(!has_cost_reducing_path(&net));
        assert!(counters.max_depth <= 3);
    }

    #[test]
    fn single_center_halts() {
        let g = BipartiteInstance::unit(2, 2, &[(0, 0), (1, 1)]).unwrap();
        let mut net = CostCenterNetwork::unit(&g);
        net.seed_flow(&g, &SemiMatching::from_assignment(vec![0, 1])).unwrap();
        let mut counters = CancelCounters::default();
        cancel_all(&mut net, &mut counters).unwrap();
        assert!(counters.runs.is_empty());
        assert_eq!(counters.max_depth, 1);
        assert_eq!(net.flow_cost(), 2);
    }
}
