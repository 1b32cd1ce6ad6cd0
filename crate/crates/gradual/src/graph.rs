//! Weighted undirected graph with stable edge ids and dynamic updates.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VertexId = u32;
pub type EdgeId = u32;

/// Comparison slack for float weights.
///
/// `ge(a, b)` accepts `a` if it falls short of `b` by at most
/// `abs * max(1, |b|)`, so the same value acts as an absolute tolerance
/// near zero and a relative one for large totals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance(pub f64);

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance(1e-9)
    }
}

impl Tolerance {
    pub fn slack(&self, reference: f64) -> f64 {
        self.0 * reference.abs().max(1.0)
    }
    pub fn ge(&self, a: f64, b: f64) -> bool {
        a >= b - self.slack(b)
    }
    pub fn le(&self, a: f64, b: f64) -> bool {
        a <= b + self.slack(b)
    }
    pub fn eq(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.slack(a.abs().max(b.abs()))
    }
}

/// An edge with its endpoints stored as `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    pub w: f64,
}

impl Edge {
    pub fn new(id: EdgeId, a: VertexId, b: VertexId, w: f64) -> Self {
        let (u, v) = ordered(a, b);
        Edge { id, u, v, w }
    }
    pub fn key(&self) -> (VertexId, VertexId) {
        (self.u, self.v)
    }
    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
    pub fn touches(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }
}

pub fn ordered(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("weight {w} on edge ({u},{v}) is not a strictly positive finite number")]
    BadWeight { u: VertexId, v: VertexId, w: f64 },
    #[error("edge ({0},{1}) already present")]
    DuplicateEdge(VertexId, VertexId),
    #[error("edge ({0},{1}) not present")]
    MissingEdge(VertexId, VertexId),
    #[error("vertex {0} already present")]
    DuplicateVertex(VertexId),
    #[error("vertex {0} not present")]
    MissingVertex(VertexId),
    #[error("undefined aspect ratio: graph has no edges")]
    NoEdges,
}

/// A single dynamic update.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum UpdateEvent {
    InsertEdge {
        u: VertexId,
        v: VertexId,
        w: f64,
    },
    DeleteEdge {
        u: VertexId,
        v: VertexId,
    },
    /// New vertex `id` together with its incident edges `(neighbor, weight)`.
    InsertVertex {
        id: VertexId,
        edges: Vec<(VertexId, f64)>,
    },
    DeleteVertex {
        id: VertexId,
    },
}

impl UpdateEvent {
    pub fn is_deletion(&self) -> bool {
        matches!(self, UpdateEvent::DeleteEdge { .. } | UpdateEvent::DeleteVertex { .. })
    }
}

impl fmt::Display for UpdateEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UpdateEvent::InsertEdge { u, v, w } => write!(f, "+e {u} {v} {w}"),
            UpdateEvent::DeleteEdge { u, v } => write!(f, "-e {u} {v}"),
            UpdateEvent::InsertVertex { id, edges } => {
                write!(f, "+v {id}")?;
                for (x, w) in edges {
                    write!(f, " {x} {w}")?;
                }
                Ok(())
            }
            UpdateEvent::DeleteVertex { id } => write!(f, "-v {id}"),
        }
    }
}

/// Edges created and destroyed by one applied update.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DeltaReport {
    pub added: Vec<Edge>,
    pub removed: Vec<Edge>,
}

#[derive(Clone, Debug, Default)]
pub struct Graph {
    adj: Vec<Option<Vec<EdgeId>>>,
    edges: Vec<Option<Edge>>,
    pairs: HashMap<(VertexId, VertexId), EdgeId>,
    n_vertices: usize,
    n_edges: usize,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from `(u, v, w)` triples; vertices are created on demand.
    pub fn from_edges<I>(edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId, f64)>,
    {
        let mut g = Graph::new();
        for (u, v, w) in edges {
            g.insert_edge(u, v, w)?;
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.n_vertices
    }
    pub fn edge_count(&self) -> usize {
        self.n_edges
    }
    /// One past the largest vertex id ever created.
    pub fn vertex_capacity(&self) -> usize {
        self.adj.len()
    }
    /// One past the largest edge id ever assigned.
    pub fn edge_capacity(&self) -> usize {
        self.edges.len()
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        matches!(self.adj.get(v as usize), Some(Some(_)))
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.iter().enumerate().filter(|(_, a)| a.is_some()).map(|(i, _)| i as VertexId)
    }

    /// Live edges in id order.
    pub fn edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().flatten()
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(id as usize).and_then(|e| e.as_ref())
    }

    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<&Edge> {
        self.pairs.get(&ordered(a, b)).and_then(|&id| self.edge(id))
    }

    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        match self.adj.get(v as usize) {
            Some(Some(list)) => list,
            _ => &[],
        }
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.incident(v).len()
    }

    /// Creates `v` if absent. Returns whether it was created.
    pub fn ensure_vertex(&mut self, v: VertexId) -> bool {
        let i = v as usize;
        if i >= self.adj.len() {
            self.adj.resize(i + 1, None);
        }
        if self.adj[i].is_none() {
            self.adj[i] = Some(Vec::new());
            self.n_vertices += 1;
            true
        } else {
            false
        }
    }

    pub fn insert_vertex(&mut self, v: VertexId) -> Result<(), GraphError> {
        if self.ensure_vertex(v) {
            Ok(())
        } else {
            Err(GraphError::DuplicateVertex(v))
        }
    }

    /// Inserts edge `(a, b)`; missing endpoints are created.
    pub fn insert_edge(&mut self, a: VertexId, b: VertexId, w: f64) -> Result<EdgeId, GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        let (u, v) = ordered(a, b);
        if !(w.is_finite() && w > 0.0) {
            return Err(GraphError::BadWeight { u, v, w });
        }
        if self.pairs.contains_key(&(u, v)) {
            return Err(GraphError::DuplicateEdge(u, v));
        }
        self.ensure_vertex(u);
        self.ensure_vertex(v);
        let id = self.edges.len() as EdgeId;
        self.edges.push(Some(Edge { id, u, v, w }));
        self.pairs.insert((u, v), id);
        self.adj[u as usize].as_mut().unwrap().push(id);
        self.adj[v as usize].as_mut().unwrap().push(id);
        self.n_edges += 1;
        Ok(id)
    }

    pub fn delete_edge(&mut self, a: VertexId, b: VertexId) -> Result<Edge, GraphError> {
        let (u, v) = ordered(a, b);
        let id = self.pairs.remove(&(u, v)).ok_or(GraphError::MissingEdge(u, v))?;
        let e = self.edges[id as usize].take().expect("pair index out of sync");
        for x in [u, v] {
            let list = self.adj[x as usize].as_mut().unwrap();
            let pos = list.iter().position(|&f| f == id).unwrap();
            list.swap_remove(pos);
        }
        self.n_edges -= 1;
        Ok(e)
    }

    /// Removes `v` and all its incident edges, returning those edges.
    pub fn delete_vertex(&mut self, v: VertexId) -> Result<Vec<Edge>, GraphError> {
        if !self.has_vertex(v) {
            return Err(GraphError::MissingVertex(v));
        }
        let ids: Vec<EdgeId> = self.incident(v).to_vec();
        let mut removed = Vec::with_capacity(ids.len());
        for id in ids {
            let e = *self.edge(id).unwrap();
            removed.push(self.delete_edge(e.u, e.v)?);
        }
        self.adj[v as usize] = None;
        self.n_vertices -= 1;
        Ok(removed)
    }

    /// Applies one update event, checking its precondition first so a
    /// failed update leaves the graph untouched.
    pub fn apply_update(&mut self, ev: &UpdateEvent) -> Result<DeltaReport, GraphError> {
        let mut delta = DeltaReport::default();
        match ev {
            UpdateEvent::InsertEdge { u, v, w } => {
                let id = self.insert_edge(*u, *v, *w)?;
                delta.added.push(*self.edge(id).unwrap());
            }
            UpdateEvent::DeleteEdge { u, v } => {
                delta.removed.push(self.delete_edge(*u, *v)?);
            }
            UpdateEvent::InsertVertex { id, edges } => {
                if self.has_vertex(*id) {
                    return Err(GraphError::DuplicateVertex(*id));
                }
                let mut seen = std::collections::HashSet::new();
                for &(x, w) in edges {
                    if x == *id {
                        return Err(GraphError::SelfLoop(x));
                    }
                    if !(w.is_finite() && w > 0.0) {
                        let (u, v) = ordered(*id, x);
                        return Err(GraphError::BadWeight { u, v, w });
                    }
                    if !seen.insert(x) {
                        let (u, v) = ordered(*id, x);
                        return Err(GraphError::DuplicateEdge(u, v));
                    }
                }
                self.ensure_vertex(*id);
                for &(x, w) in edges {
                    let eid = self.insert_edge(*id, x, w)?;
                    delta.added.push(*self.edge(eid).unwrap());
                }
            }
            UpdateEvent::DeleteVertex { id } => {
                delta.removed = self.delete_vertex(*id)?;
            }
        }
        Ok(delta)
    }

    /// Largest edge weight divided by the smallest.
    pub fn aspect_ratio(&self) -> Result<f64, GraphError> {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for e in self.edges() {
            lo = lo.min(e.w);
            hi = hi.max(e.w);
        }
        if self.n_edges == 0 {
            Err(GraphError::NoEdges)
        } else {
            Ok(hi / lo)
        }
    }

    /// Full structural audit. Returns a description of the first broken invariant.
    pub fn audit(&self) -> Result<(), String> {
        let mut live = 0usize;
        for (i, slot) in self.edges.iter().enumerate() {
            let Some(e) = slot else { continue };
            live += 1;
            if e.id as usize != i {
                return Err(format!("edge slot {i} holds id {}", e.id));
            }
            if e.u >= e.v {
                return Err(format!("edge {} endpoints not ordered or self-loop", e.id));
            }
            if !(e.w > 0.0 && e.w.is_finite()) {
                return Err(format!("edge {} has weight {}", e.id, e.w));
            }
            if !self.has_vertex(e.u) || !self.has_vertex(e.v) {
                return Err(format!("edge {} has a missing endpoint", e.id));
            }
            if self.pairs.get(&(e.u, e.v)) != Some(&e.id) {
                return Err(format!("pair index misses edge {}", e.id));
            }
            for x in [e.u, e.v] {
                if !self.incident(x).contains(&e.id) {
                    return Err(format!("adjacency of {x} misses edge {}", e.id));
                }
            }
        }
        if live != self.n_edges || self.pairs.len() != live {
            return Err("edge counters out of sync".into());
        }
        let mut verts = 0usize;
        let mut incidences = 0usize;
        for (v, slot) in self.adj.iter().enumerate() {
            let Some(list) = slot else { continue };
            verts += 1;
            incidences += list.len();
            for &id in list {
                match self.edge(id) {
                    Some(e) if e.touches(v as VertexId) => {}
                    _ => return Err(format!("vertex {v} lists stale edge {id}")),
                }
            }
        }
        if verts != self.n_vertices {
            return Err("vertex counter out of sync".into());
        }
        if incidences != 2 * live {
            return Err("adjacency lists hold duplicate entries".into());
        }
        Ok(())
    }
}
