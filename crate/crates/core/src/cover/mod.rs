//! Balanced edge covers of general graphs.
//!
//! A minimum edge cover is levelled outward from its centers; the optimal
//! balanced cover is then an optimal semi-matching from even-level to
//! odd-level vertices, plus the cover edges among unlevelled vertices.

mod blossom;

pub use blossom::maximum_matching;

use crate::error::{InstanceError, SolveError};
use crate::graph::{BipartiteInstance, Cost};
use crate::unweighted::solve_unweighted;

/// Simple undirected graph with dense vertex ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    edges: Vec<(usize, usize)>,
    /// `(neighbour, edge id)` per vertex.
    adj: Vec<Vec<(usize, usize)>>,
}

impl SimpleGraph {
    pub fn new(num_vertices: usize, edges: &[(usize, usize)]) -> Result<Self, InstanceError> {
        let mut adj = vec![Vec::new(); num_vertices];
        let mut seen = std::collections::HashSet::new();
        for (id, &(a, b)) in edges.iter().enumerate() {
            for x in [a, b] {
                if x >= num_vertices {
                    return Err(InstanceError::VertexOutOfRange { vertex: x, num_vertices });
                }
            }
            if a == b {
                return Err(InstanceError::SelfLoop { vertex: a });
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(InstanceError::DuplicateVertexPair { a, b });
            }
            adj[a].push((b, id));
            adj[b].push((a, id));
        }
        Ok(Self { edges: edges.to_vec(), adj })
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].iter().any(|&(x, _)| x == b)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(w, _) in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// A set of edge ids touching every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeCover {
    edges: Vec<usize>,
    degree: Vec<usize>,
}

impl EdgeCover {
    /// Sorts and deduplicates `edges`; fails if some vertex stays uncovered.
    pub fn new(graph: &SimpleGraph, mut edges: Vec<usize>) -> Result<Self, SolveError> {
        edges.sort_unstable();
        edges.dedup();
        let mut degree = vec![0; graph.num_vertices()];
        for &e in &edges {
            let (a, b) = graph.edge(e);
            degree[a] += 1;
            degree[b] += 1;
        }
        if let Some(v) = degree.iter().position(|&d| d == 0) {
            return Err(SolveError::IsolatedVertex(v));
        }
        Ok(Self { edges, degree })
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degree[v]
    }

    pub fn contains(&self, e: usize) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    /// `sum_v f(deg(v))` with `f(k) = k(k+1)/2`.
    pub fn cost(&self) -> Cost {
        self.degree.iter().map(|&d| triangular(d)).sum()
    }

    /// Every component has at most one vertex of degree above one.
    pub fn is_star_forest(&self, graph: &SimpleGraph) -> bool {
        self.edges.iter().all(|&e| {
            let (a, b) = graph.edge(e);
            self.degree[a] == 1 || self.degree[b] == 1
        })
    }
}

pub fn triangular(k: usize) -> Cost {
    let k = k as Cost;
    k * (k + 1) / 2
}

/// Maximum matching plus one edge for every vertex it misses.
pub fn minimum_edge_cover(graph: &SimpleGraph) -> Result<EdgeCover, SolveError> {
    if let Some(v) = (0..graph.num_vertices()).find(|&v| graph.degree(v) == 0) {
        return Err(SolveError::IsolatedVertex(v));
    }
    let mate = maximum_matching(graph);
    let mut edges = Vec::new();
    for (v, &m) in mate.iter().enumerate() {
        match m {
            Some(m) if v < m => {
                edges.push(graph.neighbors(v).iter().find(|&&(w, _)| w == m).unwrap().1)
            }
            Some(_) => {}
            None => edges.push(graph.neighbors(v)[0].1),
        }
    }
    let cover = EdgeCover::new(graph, edges)?;
    let matched = mate.iter().flatten().count() / 2;
    if cover.len() != graph.num_vertices() - matched {
        return Err(SolveError::Invariant(format!(
            "cover has {} edges but n - matching = {}",
            cover.len(),
            graph.num_vertices() - matched
        )));
    }
    Ok(cover)
}

/// Alternating levels grown from the centers of a minimal edge cover;
/// `None` marks vertices never reached.
pub fn levelling(graph: &SimpleGraph, cover: &EdgeCover) -> Vec<Option<usize>> {
    let n = graph.num_vertices();
    let mut level = vec![None; n];
    let mut current: Vec<usize> = (0..n).filter(|&v| cover.degree(v) > 1).collect();
    for &v in &current {
        level[v] = Some(1);
    }
    let mut i = 1;
    while !current.is_empty() {
        let mut next = Vec::new();
        for &v in &current {
            for &(w, e) in graph.neighbors(v) {
                if level[w].is_some() {
                    continue;
                }
                let admissible = if i % 2 == 1 {
                    cover.contains(e)
                } else {
                    !cover.contains(e)
                        && !graph
                            .neighbors(w)
                            .iter()
                            .any(|&(x, f)| level[x] == Some(i + 1) && cover.contains(f))
                };
                if admissible {
                    level[w] = Some(i + 1);
                    next.push(w);
                }
            }
        }
        current = next;
        i += 1;
    }
    level
}

#[derive(Debug, Clone)]
pub struct BalancedCover {
    pub cover: EdgeCover,
    pub cost: Cost,
    pub levels: Vec<Option<usize>>,
    /// Size of the minimum edge cover the levels were built from.
    pub minimum_cover_size: usize,
}

/// Edge cover minimizing `sum_v deg(v)(deg(v)+1)/2`.
pub fn find_center(graph: &SimpleGraph) -> Result<BalancedCover, SolveError> {
    let min_cover = minimum_edge_cover(graph)?;
    let levels = levelling(graph, &min_cover);
    let n = graph.num_vertices();

    // Even levels become jobs, odd levels machines.
    let mut local = vec![usize::MAX; n];
    let (mut jobs, mut machines) = (Vec::new(), Vec::new());
    for v in 0..n {
        match levels[v] {
            Some(l) if l % 2 == 0 => {
                local[v] = jobs.len();
                jobs.push(v);
            }
            Some(_) => {
                local[v] = machines.len();
                machines.push(v);
            }
            None => {}
        }
    }
    let mut pairs = Vec::new();
    let mut pair_edge = Vec::new();
    for (e, &(a, b)) in graph.edges().iter().enumerate() {
        let (Some(la), Some(lb)) = (levels[a], levels[b]) else { continue };
        if la % 2 == lb % 2 {
            continue;
        }
        let (job, machine) = if la % 2 == 0 { (a, b) } else { (b, a) };
        pairs.push((local[job], local[machine]));
        pair_edge.push(e);
    }
    let instance = BipartiteInstance::unit(jobs.len(), machines.len(), &pairs)
        .map_err(|e| SolveError::Invariant(format!("levelled graph: {e}")))?;
    let solution = solve_unweighted(&instance)?;

    let mut edges: Vec<usize> = min_cover
        .edges()
        .iter()
        .copied()
        .filter(|&e| {
            let (a, b) = graph.edge(e);
            levels[a].is_none() && levels[b].is_none()
        })
        .collect();
    for (u, m) in solution.matching.assignment().iter().enumerate() {
        let m = m.expect("solver assigns every job");
        let id = instance.find_edge(u, m).expect("assignment follows an edge");
        edges.push(pair_edge[id]);
    }
    let cover = EdgeCover::new(graph, edges)?;
    Ok(BalancedCover { cost: cover.cost(), cover, levels, minimum_cover_size: min_cover.len() })
}
