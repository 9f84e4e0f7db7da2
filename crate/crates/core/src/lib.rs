//! Optimal semi-matchings and balanced edge covers.
//!
//! Weighted instances are solved by successive shortest paths over the
//! exploded machine slots with one envelope heap per machine; unit-weight
//! and convex-cost instances by cancelling cost-reducing paths in a
//! cost-center flow network.

pub mod cover;
pub mod envelope;
pub mod error;
pub mod graph;
pub mod heap;
pub mod toolkit;
pub mod unweighted;
pub mod weighted;

pub use cover::{find_center, minimum_edge_cover, SimpleGraph};
pub use error::{CostError, InstanceError, SolveError};
pub use graph::{
    convex_cost, cost_of_semi_matching, machine_cost, validate_semi_matching, BipartiteInstance,
    ConvexMachineCost, Cost, Edge, EdgeId, JobId, MachineId, SemiMatching, Violation, Weight,
};
pub use unweighted::{solve_convex, solve_unweighted, solve_unweighted_from};
pub use weighted::{baseline_exploded_solver, solve_weighted};

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::graph::BipartiteInstance;

    /// Two machines, four jobs; job 1 may go to either machine.
    pub fn two_machine() -> BipartiteInstance {
        BipartiteInstance::unit(4, 2, &[(0, 0), (1, 0), (1, 1), (2, 1), (3, 1)]).unwrap()
    }
}
