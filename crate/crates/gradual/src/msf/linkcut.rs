//! Link-cut tree with edges as nodes and path-minimum aggregation.

use std::collections::HashMap;

use super::index::{edge_key, DynamicForestIndex};
use crate::graph::{Edge, EdgeId, VertexId};

const NIL: u32 = u32::MAX;
const VERTEX_KEY: u64 = u64::MAX;

/// Vertex `v` is node `v`; each edge gets its own node between its endpoints.
#[derive(Clone, Debug)]
pub struct LinkCutIndex {
    ch: Vec<[u32; 2]>,
    par: Vec<u32>,
    rev: Vec<bool>,
    key: Vec<u64>,
    agg: Vec<u64>,
    node_of: HashMap<EdgeId, (u32, Edge)>,
    free: Vec<u32>,
    n_vertices: usize,
}

impl LinkCutIndex {
    pub fn new(n_vertices: usize) -> Self {
        LinkCutIndex {
            ch: vec![[NIL; 2]; n_vertices],
            par: vec![NIL; n_vertices],
            rev: vec![false; n_vertices],
            key: vec![VERTEX_KEY; n_vertices],
            agg: vec![VERTEX_KEY; n_vertices],
            node_of: HashMap::new(),
            free: Vec::new(),
            n_vertices,
        }
    }

    fn grow_vertices(&mut self, v: VertexId) {
        // Vertex nodes must stay below edge nodes, so only grow before any edge exists.
        let need = v as usize + 1;
        if need > self.n_vertices {
            assert!(self.node_of.is_empty() && self.free.is_empty(), "vertex {v} beyond index capacity");
            self.ch.resize(need, [NIL; 2]);
            self.par.resize(need, NIL);
            self.rev.resize(need, false);
            self.key.resize(need, VERTEX_KEY);
            self.agg.resize(need, VERTEX_KEY);
            self.n_vertices = need;
        }
    }

    fn alloc(&mut self, key: u64) -> u32 {
        if let Some(x) = self.free.pop() {
            let i = x as usize;
            self.ch[i] = [NIL; 2];
            self.par[i] = NIL;
            self.rev[i] = false;
            self.key[i] = key;
            self.agg[i] = key;
            x
        } else {
            self.ch.push([NIL; 2]);
            self.par.push(NIL);
            self.rev.push(false);
            self.key.push(key);
            self.agg.push(key);
            (self.key.len() - 1) as u32
        }
    }

    fn is_root(&self, x: u32) -> bool {
        let p = self.par[x as usize];
        p == NIL || (self.ch[p as usize][0] != x && self.ch[p as usize][1] != x)
    }

    fn push(&mut self, x: u32) {
        let i = x as usize;
        if self.rev[i] {
            self.ch[i].swap(0, 1);
            for c in self.ch[i] {
                if c != NIL {
                    self.rev[c as usize] ^= true;
                }
            }
            self.rev[i] = false;
        }
    }

    fn pull(&mut self, x: u32) {
        let i = x as usize;
        let mut a = self.key[i];
        for c in self.ch[i] {
            if c != NIL {
                a = a.min(self.agg[c as usize]);
            }
        }
        self.agg[i] = a;
    }

    fn rotate(&mut self, x: u32) {
        let p = self.par[x as usize];
        let g = self.par[p as usize];
        let dir = (self.ch[p as usize][1] == x) as usize;
        let b = self.ch[x as usize][dir ^ 1];
        if !self.is_root(p) {
            let gi = g as usize;
            if self.ch[gi][0] == p {
                self.ch[gi][0] = x;
            } else {
                self.ch[gi][1] = x;
            }
        }
        self.par[x as usize] = g;
        self.ch[x as usize][dir ^ 1] = p;
        self.par[p as usize] = x;
        self.ch[p as usize][dir] = b;
        if b != NIL {
            self.par[b as usize] = p;
        }
        self.pull(p);
        self.pull(x);
    }

    fn splay(&mut self, x: u32) {
        let mut stack = vec![x];
        let mut y = x;
        while !self.is_root(y) {
            y = self.par[y as usize];
            stack.push(y);
        }
        while let Some(z) = stack.pop() {
            self.push(z);
        }
        while !self.is_root(x) {
            let p = self.par[x as usize];
            if !self.is_root(p) {
                let g = self.par[p as usize];
                let zigzig = (self.ch[g as usize][0] == p) == (self.ch[p as usize][0] == x);
                self.rotate(if zigzig { p } else { x });
            }
            self.rotate(x);
        }
    }

    fn access(&mut self, x: u32) {
        let mut last = NIL;
        let mut y = x;
        while y != NIL {
            self.splay(y);
            self.ch[y as usize][1] = last;
            self.pull(y);
            last = y;
            y = self.par[y as usize];
        }
        self.splay(x);
    }

    fn make_root(&mut self, x: u32) {
        self.access(x);
        self.rev[x as usize] ^= true;
        self.push(x);
    }

    fn find_root(&mut self, x: u32) -> u32 {
        self.access(x);
        let mut y = x;
        loop {
            self.push(y);
            let l = self.ch[y as usize][0];
            if l == NIL {
                break;
            }
            y = l;
        }
        self.splay(y);
        y
    }

    fn link_nodes(&mut self, x: u32, y: u32) {
        self.make_root(x);
        self.par[x as usize] = y;
    }

    fn cut_nodes(&mut self, x: u32, y: u32) {
        self.make_root(x);
        self.access(y);
        debug_assert!(self.ch[y as usize][0] == x && self.ch[x as usize][1] == NIL, "nodes not adjacent");
        self.ch[y as usize][0] = NIL;
        self.par[x as usize] = NIL;
        self.pull(y);
    }
}

impl DynamicForestIndex for LinkCutIndex {
    fn link(&mut self, e: &Edge, shared: bool) {
        self.grow_vertices(e.u.max(e.v));
        debug_assert!(!self.connected(e.u, e.v), "link would close a cycle");
        let x = self.alloc(edge_key(e.id, shared));
        self.node_of.insert(e.id, (x, *e));
        self.link_nodes(e.u, x);
        self.link_nodes(x, e.v);
    }

    fn cut(&mut self, id: EdgeId) {
        let (x, e) = self.node_of.remove(&id).expect("cut of absent edge");
        self.cut_nodes(e.u, x);
        self.cut_nodes(x, e.v);
        self.free.push(x);
    }

    fn set_shared(&mut self, id: EdgeId, shared: bool) {
        let (x, _) = *self.node_of.get(&id).expect("flag on absent edge");
        self.access(x);
        self.key[x as usize] = edge_key(id, shared);
        self.pull(x);
    }

    fn is_shared(&self, id: EdgeId) -> Option<bool> {
        self.node_of.get(&id).map(|&(x, _)| self.key[x as usize] >> 32 == 1)
    }

    fn contains(&self, id: EdgeId) -> bool {
        self.node_of.contains_key(&id)
    }

    fn connected(&mut self, u: VertexId, v: VertexId) -> bool {
        if u == v {
            return true;
        }
        if u as usize >= self.n_vertices || v as usize >= self.n_vertices {
            return false;
        }
        self.find_root(u) == self.find_root(v)
    }

    fn path_edge_outside(&mut self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        if u == v || !self.connected(u, v) {
            return None;
        }
        self.make_root(u);
        self.access(v);
        let best = self.agg[v as usize];
        (best >> 32 == 0).then_some(best as EdgeId)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::msf::index::NaiveIndex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn path_flags() {
        let mut t = LinkCutIndex::new(5);
        for (i, shared) in [true, true, false, true].into_iter().enumerate() {
            t.link(&Edge::new(i as u32, i as u32, i as u32 + 1, 1.0), shared);
        }
        assert_eq!(t.path_edge_outside(0, 4), Some(2));
        assert_eq!(t.path_edge_outside(4, 0), Some(2));
        assert_eq!(t.path_edge_outside(0, 2), None);
        t.set_shared(2, true);
        assert_eq!(t.path_edge_outside(0, 4), None);
        t.cut(2);
        assert!(!t.connected(0, 4));
        assert!(t.connected(3, 4));
    }

    #[test]
    fn small_differential() {
        let n = 30u32;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut a = LinkCutIndex::new(n as usize);
        let mut b = NaiveIndex::new();
        let mut live: Vec<Edge> = Vec::new();
        let mut next_id = 0;
        for _ in 0..3000 {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            match rng.gen_range(0..4) {
                0 | 1 if u != v && !b.connected(u, v) => {
                    let e = Edge::new(next_id, u, v, 1.0);
                    next_id += 1;
                    let s = rng.gen_bool(0.5);
                    a.link(&e, s);
                    b.link(&e, s);
                    live.push(e);
                }
                2 if !live.is_empty() => {
                    let e = live.swap_remove(rng.gen_range(0..live.len()));
                    a.cut(e.id);
                    b.cut(e.id);
                }
                3 if !live.is_empty() => {
                    let e = live[rng.gen_range(0..live.len())];
                    let s = rng.gen_bool(0.5);
                    a.set_shared(e.id, s);
                    b.set_shared(e.id, s);
                }
                _ => {
                    assert_eq!(a.connected(u, v), b.connected(u, v));
                    assert_eq!(a.path_edge_outside(u, v), b.path_edge_outside(u, v));
                }
            }
        }
    }
}
