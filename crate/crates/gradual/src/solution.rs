//! Matchings, spanning forests, and their validity checks.

use std::collections::HashMap;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Edge, EdgeId, Graph, VertexId};

/// First violated invariant of a candidate solution, or `Ok`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum ValidityReport {
    Ok,
    MissingEdge { id: EdgeId, u: VertexId, v: VertexId },
    SharedVertex { vertex: VertexId, first: EdgeId, second: EdgeId },
    DuplicateEdge { id: EdgeId },
    Cycle { id: EdgeId },
    NotSpanning { u: VertexId, v: VertexId },
}

impl ValidityReport {
    pub fn is_ok(&self) -> bool {
        matches!(self, ValidityReport::Ok)
    }
}

impl std::fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ValidityReport::Ok => write!(f, "ok"),
            ValidityReport::MissingEdge { id, u, v } => {
                write!(f, "missing edge {id} ({u},{v}) not in graph")
            }
            ValidityReport::SharedVertex { vertex, first, second } => {
                write!(f, "vertex {vertex} covered by edges {first} and {second}")
            }
            ValidityReport::DuplicateEdge { id } => write!(f, "edge {id} listed twice"),
            ValidityReport::Cycle { id } => write!(f, "edge {id} closes a cycle"),
            ValidityReport::NotSpanning { u, v } => {
                write!(f, "vertices {u} and {v} are connected in the graph but not in the forest")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolutionError {
    #[error("invalid solution: {0}")]
    Invalid(ValidityReport),
    #[error("edge ({0},{1}) not in graph")]
    UnknownPair(VertexId, VertexId),
    #[error("edge {0} conflicts with matched edge {1}")]
    Conflict(EdgeId, EdgeId),
}

fn edge_in_graph(g: &Graph, e: &Edge) -> bool {
    matches!(g.edge(e.id), Some(h) if h.u == e.u && h.v == e.v)
}

/// Checks the matching invariants of an arbitrary edge list against `g`.
pub fn validate_matching(g: &Graph, edges: &[Edge]) -> ValidityReport {
    let mut seen: HashMap<EdgeId, ()> = HashMap::with_capacity(edges.len());
    let mut cover: HashMap<VertexId, EdgeId> = HashMap::with_capacity(2 * edges.len());
    for e in edges {
        if !edge_in_graph(g, e) {
            return ValidityReport::MissingEdge { id: e.id, u: e.u, v: e.v };
        }
        if seen.insert(e.id, ()).is_some() {
            return ValidityReport::DuplicateEdge { id: e.id };
        }
        for x in [e.u, e.v] {
            if let Some(&other) = cover.get(&x) {
                return ValidityReport::SharedVertex { vertex: x, first: other, second: e.id };
            }
            cover.insert(x, e.id);
        }
    }
    ValidityReport::Ok
}

/// Checks acyclicity and the spanning property of an edge list against `g`.
pub fn validate_forest(g: &Graph, edges: &[Edge]) -> ValidityReport {
    let mut uf = UnionFind::new(g.vertex_capacity());
    let mut seen: HashMap<EdgeId, ()> = HashMap::with_capacity(edges.len());
    for e in edges {
        if !edge_in_graph(g, e) {
            return ValidityReport::MissingEdge { id: e.id, u: e.u, v: e.v };
        }
        if seen.insert(e.id, ()).is_some() {
            return ValidityReport::DuplicateEdge { id: e.id };
        }
        if !uf.union(e.u as usize, e.v as usize) {
            return ValidityReport::Cycle { id: e.id };
        }
    }
    for e in g.edges() {
        if uf.find(e.u as usize) != uf.find(e.v as usize) {
            return ValidityReport::NotSpanning { u: e.u, v: e.v };
        }
    }
    ValidityReport::Ok
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct SolutionStats {
    pub size: usize,
    pub total_weight: f64,
    pub max_edge_weight: f64,
}

impl SolutionStats {
    pub fn of(edges: impl IntoIterator<Item = Edge>) -> Self {
        let mut s = SolutionStats::default();
        for e in edges {
            s.size += 1;
            s.total_weight += e.w;
            s.max_edge_weight = s.max_edge_weight.max(e.w);
        }
        s
    }
}

/// Shared view over both solution kinds.
pub trait Solution {
    fn edge_list(&self) -> Vec<Edge>;
    fn validate(&self, g: &Graph) -> ValidityReport;
}

/// Size, total and maximum weight of a solution valid for `g`.
pub fn solution_stats<S: Solution>(g: &Graph, s: &S) -> Result<SolutionStats, SolutionError> {
    match s.validate(g) {
        ValidityReport::Ok => Ok(SolutionStats::of(s.edge_list())),
        r => Err(SolutionError::Invalid(r)),
    }
}

/// A matching. Disjointness is enforced on insertion; graph membership is
/// checked by [`validate_matching`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Matching {
    edges: IndexMap<EdgeId, Edge>,
    mate: HashMap<VertexId, EdgeId>,
}

impl Matching {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a matching from endpoint pairs looked up in `g`.
    pub fn from_pairs(g: &Graph, pairs: &[(VertexId, VertexId)]) -> Result<Self, SolutionError> {
        let mut m = Matching::new();
        for &(a, b) in pairs {
            let e = *g.edge_between(a, b).ok_or(SolutionError::UnknownPair(a, b))?;
            m.insert(e)?;
        }
        Ok(m)
    }

    pub fn from_edges(edges: impl IntoIterator<Item = Edge>) -> Result<Self, SolutionError> {
        let mut m = Matching::new();
        for e in edges {
            m.insert(e)?;
        }
        Ok(m)
    }

    pub fn insert(&mut self, e: Edge) -> Result<(), SolutionError> {
        if self.edges.contains_key(&e.id) {
            return Err(SolutionError::Invalid(ValidityReport::DuplicateEdge { id: e.id }));
        }
        for x in [e.u, e.v] {
            if let Some(&other) = self.mate.get(&x) {
                return Err(SolutionError::Conflict(e.id, other));
            }
        }
        self.mate.insert(e.u, e.id);
        self.mate.insert(e.v, e.id);
        self.edges.insert(e.id, e);
        Ok(())
    }

    pub fn remove(&mut self, id: EdgeId) -> Option<Edge> {
        let e = self.edges.swap_remove(&id)?;
        self.mate.remove(&e.u);
        self.mate.remove(&e.v);
        Some(e)
    }

    pub fn contains(&self, id: EdgeId) -> bool {
        self.edges.contains_key(&id)
    }

    /// Matched edge covering `v`.
    pub fn edge_at(&self, v: VertexId) -> Option<&Edge> {
        self.mate.get(&v).and_then(|id| self.edges.get(id))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
    pub fn weight(&self) -> f64 {
        self.edges.values().map(|e| e.w).sum()
    }
    pub fn max_weight(&self) -> f64 {
        self.edges.values().map(|e| e.w).fold(0.0, f64::max)
    }
    /// Edges in storage order (deterministic, not sorted).
    pub fn iter(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.values()
    }
    pub fn ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }
    pub fn sorted_pairs(&self) -> Vec<(VertexId, VertexId)> {
        let mut v: Vec<_> = self.iter().map(|e| e.key()).collect();
        v.sort_unstable();
        v
    }
    pub fn is_superset_of(&self, other: &Matching) -> bool {
        other.ids().all(|id| self.contains(id))
    }
}

impl Solution for Matching {
    fn edge_list(&self) -> Vec<Edge> {
        self.iter().copied().collect()
    }
    fn validate(&self, g: &Graph) -> ValidityReport {
        validate_matching(g, &self.edge_list())
    }
}

/// An edge set meant to be a spanning forest of its host graph.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SpanningForest {
    edges: IndexMap<EdgeId, Edge>,
}

impl SpanningForest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_edges(edges: impl IntoIterator<Item = Edge>) -> Self {
        SpanningForest { edges: edges.into_iter().map(|e| (e.id, e)).collect() }
    }

    pub fn from_pairs(g: &Graph, pairs: &[(VertexId, VertexId)]) -> Result<Self, SolutionError> {
        let mut f = SpanningForest::new();
        for &(a, b) in pairs {
            let e = *g.edge_between(a, b).ok_or(SolutionError::UnknownPair(a, b))?;
            f.edges.insert(e.id, e);
        }
        Ok(f)
    }

    pub fn insert(&mut self, e: Edge) -> bool {
        self.edges.insert(e.id, e).is_none()
    }
    pub fn remove(&mut self, id: EdgeId) -> Option<Edge> {
        self.edges.swap_remove(&id)
    }
    pub fn contains(&self, id: EdgeId) -> bool {
        self.edges.contains_key(&id)
    }
    pub fn len(&self) -> usize {
        self.edges.len()
    }
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
    pub fn weight(&self) -> f64 {
        self.edges.values().map(|e| e.w).sum()
    }
    pub fn iter(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.values()
    }
    pub fn sorted_pairs(&self) -> Vec<(VertexId, VertexId)> {
        let mut v: Vec<_> = self.iter().map(|e| e.key()).collect();
        v.sort_unstable();
        v
    }

    /// Component label per vertex id, computed from forest edges only.
    pub fn component_labels(&self, vertex_capacity: usize) -> Vec<usize> {
        let mut uf = UnionFind::new(vertex_capacity);
        for e in self.iter() {
            uf.union(e.u as usize, e.v as usize);
        }
        (0..vertex_capacity).map(|v| uf.find(v)).collect()
    }
}

impl Solution for SpanningForest {
    fn edge_list(&self) -> Vec<Edge> {
        self.iter().copied().collect()
    }
    fn validate(&self, g: &Graph) -> ValidityReport {
        validate_forest(g, &self.edge_list())
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the sets of `a` and `b`. Returns false if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}
