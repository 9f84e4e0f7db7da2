use thiserror::Error;

use crate::graph::{JobId, MachineId, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("job id {job} out of range (instance has {num_jobs} jobs)")]
    JobOutOfRange { job: JobId, num_jobs: usize },
    #[error("machine id {machine} out of range (instance has {num_machines} machines)")]
    MachineOutOfRange { machine: MachineId, num_machines: usize },
    #[error("duplicate edge between job {job} and machine {machine}")]
    DuplicateEdge { job: JobId, machine: MachineId },
    #[error("weight {weight} exceeds 2^31 - 1")]
    WeightTooLarge { weight: u64 },
    #[error("job {job} has no incident edge; instance is infeasible")]
    IsolatedJob { job: JobId },
    #[error("vertex {vertex} out of range (graph has {num_vertices} vertices)")]
    VertexOutOfRange { vertex: usize, num_vertices: usize },
    #[error("vertex {vertex} has no incident edge; no edge cover exists")]
    IsolatedVertex { vertex: usize },
    #[error("self-loop at vertex {vertex}")]
    SelfLoop { vertex: usize },
    #[error("duplicate edge between vertices {a} and {b}")]
    DuplicateVertexPair { a: usize, b: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CostError {
    #[error("cost accumulator overflowed 64-bit signed range")]
    Overflow,
    #[error("cost function is not convex: marginal at degree {degree} decreases")]
    NotConvex { degree: usize },
    #[error("degree {degree} outside tabulated cost domain (max {max})")]
    DegreeOutOfDomain { degree: usize, max: usize },
    #[error("expected {expected} machine cost functions, found {found}")]
    CostTableMismatch { expected: usize, found: usize },
    #[error("invalid semi-matching: {0}")]
    Invalid(#[from] Violation),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error("invalid semi-matching: {0}")]
    Invalid(#[from] Violation),
    #[error("cancel requires every source center above every sink center")]
    OverlappingCenters,
    #[error("flow does not saturate every job")]
    NonSaturating,
    #[error("instance too large for exhaustive enumeration")]
    TooLarge,
    #[error("graph has an isolated vertex {0}; no edge cover exists")]
    IsolatedVertex(usize),
    #[error("solver invariant violated: {0}")]
    Invariant(String),
}
