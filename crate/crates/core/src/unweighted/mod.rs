//! Unweighted and convex-cost semi-matching through the cost-center
//! min-cost flow reduction.

mod cancel;
mod network;

pub use cancel::{
    cancel, cancel_all, has_cost_reducing_path, reachable_partition, CancelCounters, CancelRun,
};
pub use network::{CenterEdge, CostCenterNetwork, NodeRef};

use crate::error::SolveError;
use crate::graph::{
    convex_cost, validate_semi_matching, BipartiteInstance, ConvexMachineCost, Cost, SemiMatching,
};

#[derive(Debug, Clone)]
pub struct UnweightedSolution {
    pub matching: SemiMatching,
    pub cost: Cost,
    /// Cost of the starting semi-matching, before any cancellation.
    pub seed_cost: Cost,
    pub num_centers: usize,
    pub counters: CancelCounters,
}

/// Every job on its first listed neighbour.
pub fn initial_semi_matching(instance: &BipartiteInstance) -> SemiMatching {
    SemiMatching::from_assignment(
        (0..instance.num_jobs())
            .map(|u| instance.edge(instance.job_edges(u)[0]).machine)
            .collect(),
    )
}

/// Optimal semi-matching when every weight counts as one.
pub fn solve_unweighted(instance: &BipartiteInstance) -> Result<UnweightedSolution, SolveError> {
    solve_unweighted_from(instance, &initial_semi_matching(instance))
}

/// [`solve_unweighted`] starting from a given complete semi-matching.
pub fn solve_unweighted_from(
    instance: &BipartiteInstance,
    seed: &SemiMatching,
) -> Result<UnweightedSolution, SolveError> {
    validate_semi_matching(instance, seed)?;
    run(instance, CostCenterNetwork::unit(instance), seed)
}

/// Optimal semi-matching for per-machine convex costs of the load.
pub fn solve_convex(
    instance: &BipartiteInstance,
    costs: &[ConvexMachineCost],
) -> Result<UnweightedSolution, SolveError> {
    let network = CostCenterNetwork::convex(instance, costs)?;
    let mut solution = run(instance, network, &initial_semi_matching(instance))?;
    let flow_cost = solution.cost;
    solution.cost = convex_cost(instance, &solution.matching, costs)?;
    if solution.cost != flow_cost {
        return Err(SolveError::Invariant(format!(
            "flow cost {flow_cost} disagrees with assignment cost {}",
            solution.cost
        )));
    }
    Ok(solution)
}

fn run(
    instance: &BipartiteInstance,
    mut network: CostCenterNetwork,
    seed: &SemiMatching,
) -> Result<UnweightedSolution, SolveError> {
    network.seed_flow(instance, seed)?;
    let seed_cost = network.flow_cost();
    let mut counters = CancelCounters::default();
    cancel_all(&mut network, &mut counters)?;
    let matching = network.extract_semi_matching()?;
    Ok(UnweightedSolution {
        cost: network.flow_cost(),
        seed_cost,
        num_centers: network.num_centers(),
        matching,
        counters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::two_machine;
    use crate::graph::cost_of_semi_matching;

    #[test]
    fn two_machine_costs() {
        let g = two_machine();
        let sol = solve_unweighted(&g).unwrap();
        assert_eq!(sol.cost, 6);
        assert_eq!(cost_of_semi_matching(&g, &sol.matching).unwrap(), 6);
        assert_eq!(sol.matching, SemiMatching::from_assignment(vec![0, 0, 1, 1]));
        let square = ConvexMachineCost::per_machine(&g, |k| (k * k) as i64).unwrap();
        assert_eq!(solve_convex(&g, &square).unwrap().cost, 8);
    }

    #[test]
    fn two_machine_from_thick_edges() {
        let g = two_machine();
        let thick = SemiMatching::from_assignment(vec![0, 1, 1, 1]);
        let sol = solve_unweighted_from(&g, &thick).unwrap();
        assert_eq!((sol.seed_cost, sol.cost), (7, 6));
        assert_eq!(sol.counters.total_augmentations(), 1);
        let partial = SemiMatching::from_partial(vec![Some(0), None, Some(1), Some(1)]);
        assert!(matches!(solve_unweighted_from(&g, &partial), Err(SolveError::Invalid(_))));
    }

    #[test]
    fn complete_bipartite_spreads_out() {
        let pairs: Vec<_> = (0..4).flat_map(|u| (0..6).map(move |v| (u, v))).collect();
        let g = BipartiteInstance::unit(4, 6, &pairs).unwrap();
        let sol = solve_unweighted(&g).unwrap();
        assert_eq!(sol.cost, 4);
        validate_semi_matching(&g, &sol.matching).unwrap();
    }

    #[test]
    fn star_is_forced() {
        let pairs: Vec<_> = (0..5).map(|u| (u, 0)).collect();
        let g = BipartiteInstance::unit(5, 1, &pairs).unwrap();
        assert_eq!(solve_unweighted(&g).unwrap().cost, 15);
    }

    #[test]
    fn single_edge_is_forced() {
        let g = BipartiteInstance::unit(1, 1, &[(0, 0)]).unwrap();
        let sol = solve_unweighted(&g).unwrap();
        assert_eq!(sol.matching, SemiMatching::from_assignment(vec![0]));
        assert_eq!(sol.cost, 1);
    }
}
