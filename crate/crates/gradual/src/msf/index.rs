//! Forest index with "edge outside the other tree" path queries.

use std::collections::{HashMap, VecDeque};

use crate::graph::{Edge, EdgeId, VertexId};

/// Path aggregate key of an edge. Exclusive edges (not in the counterpart
/// tree) rank below shared ones, so the path minimum is the exclusive edge
/// with the smallest id whenever one exists.
pub fn edge_key(id: EdgeId, shared: bool) -> u64 {
    ((shared as u64) << 32) | id as u64
}

/// A forest under link/cut that answers path queries over edge flags.
///
/// Every edge carries a `shared` flag recording whether it also belongs to
/// the counterpart tree.
pub trait DynamicForestIndex {
    /// Adds `e`. Its endpoints must be in different trees.
    fn link(&mut self, e: &Edge, shared: bool);
    /// Removes edge `id`, which must be present.
    fn cut(&mut self, id: EdgeId);
    fn set_shared(&mut self, id: EdgeId, shared: bool);
    fn is_shared(&self, id: EdgeId) -> Option<bool>;
    fn contains(&self, id: EdgeId) -> bool;
    fn connected(&mut self, u: VertexId, v: VertexId) -> bool;
    /// The exclusive edge with the smallest id on the `u`-`v` path, or
    /// `None` if `u` and `v` are disconnected or every path edge is shared.
    fn path_edge_outside(&mut self, u: VertexId, v: VertexId) -> Option<EdgeId>;
}

/// Reference index: adjacency lists and a BFS per query.
#[derive(Clone, Debug, Default)]
pub struct NaiveIndex {
    adj: HashMap<VertexId, Vec<(VertexId, EdgeId)>>,
    edges: HashMap<EdgeId, (Edge, bool)>,
}

impl NaiveIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Edge ids on the `u`-`v` path, in order from `u`.
    pub fn path_edges(&self, u: VertexId, v: VertexId) -> Option<Vec<EdgeId>> {
        if u == v {
            return Some(Vec::new());
        }
        let mut parent: HashMap<VertexId, (VertexId, EdgeId)> = HashMap::new();
        let mut queue = VecDeque::from([u]);
        parent.insert(u, (u, EdgeId::MAX));
        while let Some(x) = queue.pop_front() {
            if x == v {
                break;
            }
            for &(y, id) in self.adj.get(&x).map(|a| a.as_slice()).unwrap_or(&[]) {
                if let std::collections::hash_map::Entry::Vacant(slot) = parent.entry(y) {
                    slot.insert((x, id));
                    queue.push_back(y);
                }
            }
        }
        parent.get(&v)?;
        let mut out = Vec::new();
        let mut x = v;
        while x != u {
            let (p, id) = parent[&x];
            out.push(id);
            x = p;
        }
        out.reverse();
        Some(out)
    }
}

impl DynamicForestIndex for NaiveIndex {
    fn link(&mut self, e: &Edge, shared: bool) {
        debug_assert!(!self.connected(e.u, e.v), "link would close a cycle");
        self.adj.entry(e.u).or_default().push((e.v, e.id));
        self.adj.entry(e.v).or_default().push((e.u, e.id));
        self.edges.insert(e.id, (*e, shared));
    }

    fn cut(&mut self, id: EdgeId) {
        let (e, _) = self.edges.remove(&id).expect("cut of absent edge");
        for x in [e.u, e.v] {
            let list = self.adj.get_mut(&x).unwrap();
            let pos = list.iter().position(|&(_, f)| f == id).unwrap();
            list.swap_remove(pos);
        }
    }

    fn set_shared(&mut self, id: EdgeId, shared: bool) {
        self.edges.get_mut(&id).expect("flag on absent edge").1 = shared;
    }

    fn is_shared(&self, id: EdgeId) -> Option<bool> {
        self.edges.get(&id).map(|&(_, s)| s)
    }

    fn contains(&self, id: EdgeId) -> bool {
        self.edges.contains_key(&id)
    }

    fn connected(&mut self, u: VertexId, v: VertexId) -> bool {
        self.path_edges(u, v).is_some()
    }

    fn path_edge_outside(&mut self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        let path = self.path_edges(u, v)?;
        let best = path.into_iter().map(|id| edge_key(id, self.edges[&id].1)).min()?;
        (best >> 32 == 0).then_some(best as EdgeId)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_exclusive_edge() {
        let mut n = NaiveIndex::new();
        n.link(&Edge::new(4, 0, 1, 1.0), false);
        assert_eq!(n.path_edge_outside(0, 1), Some(4));
    }

    #[test]
    fn picks_the_only_exclusive_edge() {
        let mut n = NaiveIndex::new();
        for (i, shared) in [true, true, false, true].into_iter().enumerate() {
            n.link(&Edge::new(i as u32, i as u32, i as u32 + 1, 1.0), shared);
        }
        assert_eq!(n.path_edge_outside(0, 4), Some(2));
        assert_eq!(n.path_edge_outside(0, 2), None);
        assert_eq!(n.path_edges(4, 1), Some(vec![3, 2, 1]));
    }
}
