//! Seeded instance generators.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{Edge, Graph, UpdateEvent, VertexId};
use crate::solution::{Matching, SpanningForest, UnionFind};

/// Edge weights drawn uniformly from `[lo, hi]`, rounded to integers if asked.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Weights {
    pub lo: f64,
    pub hi: f64,
    pub integer: bool,
}

impl Weights {
    pub const UNIT: Weights = Weights { lo: 1.0, hi: 1.0, integer: true };

    pub fn integer(lo: u32, hi: u32) -> Self {
        Weights { lo: lo as f64, hi: hi as f64, integer: true }
    }

    pub fn real(lo: f64, hi: f64) -> Self {
        Weights { lo, hi, integer: false }
    }

    /// Weights whose aspect ratio is at most `psi`.
    pub fn bounded_ratio(psi: f64) -> Self {
        Weights { lo: 1.0, hi: psi, integer: false }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        if self.lo >= self.hi {
            return self.lo;
        }
        if self.integer {
            rng.gen_range(self.lo as u64..=self.hi as u64) as f64
        } else {
            rng.gen_range(self.lo..=self.hi)
        }
    }
}

/// `n` vertices and up to `m` distinct random edges.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, m: usize, weights: Weights) -> Graph {
    let mut g = Graph::new();
    for v in 0..n {
        g.ensure_vertex(v as VertexId);
    }
    if n < 2 {
        return g;
    }
    let cap = m.min(n * (n - 1) / 2);
    let mut tries = 0;
    while g.edge_count() < cap && tries < 20 * cap + 100 {
        tries += 1;
        let u = rng.gen_range(0..n) as VertexId;
        let v = rng.gen_range(0..n) as VertexId;
        if u != v && g.edge_between(u, v).is_none() {
            g.insert_edge(u, v, weights.sample(rng)).unwrap();
        }
    }
    g
}

/// A random spanning tree on `n` vertices plus `extra` random edges.
pub fn connected_graph<R: Rng>(rng: &mut R, n: usize, extra: usize, weights: Weights) -> Graph {
    let mut g = Graph::new();
    let mut order: Vec<VertexId> = (0..n as VertexId).collect();
    order.shuffle(rng);
    g.ensure_vertex(order[0]);
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        g.insert_edge(order[i], parent, weights.sample(rng)).unwrap();
    }
    let mut added = 0;
    let mut tries = 0;
    while added < extra && n >= 2 && tries < 20 * extra + 100 {
        tries += 1;
        let u = rng.gen_range(0..n) as VertexId;
        let v = rng.gen_range(0..n) as VertexId;
        if u != v && g.edge_between(u, v).is_none() {
            g.insert_edge(u, v, weights.sample(rng)).unwrap();
            added += 1;
        }
    }
    g
}

/// Greedy matching over the edges in random order, each edge considered
/// with probability `keep`.
pub fn random_matching<R: Rng>(rng: &mut R, g: &Graph, keep: f64) -> Matching {
    let mut edges: Vec<Edge> = g.edges().copied().collect();
    edges.shuffle(rng);
    let mut m = Matching::new();
    for e in edges {
        if rng.gen_bool(keep.clamp(0.0, 1.0)) && m.edge_at(e.u).is_none() && m.edge_at(e.v).is_none() {
            m.insert(e).unwrap();
        }
    }
    m
}

/// Kruskal over a random edge order: a uniformly shuffled spanning forest.
pub fn random_spanning_forest<R: Rng>(rng: &mut R, g: &Graph) -> SpanningForest {
    let mut edges: Vec<Edge> = g.edges().copied().collect();
    edges.shuffle(rng);
    let mut uf = UnionFind::new(g.vertex_capacity());
    SpanningForest::from_edges(edges.into_iter().filter(|e| uf.union(e.u as usize, e.v as usize)))
}

/// A graph made of alternating paths and cycles with `size` edges in total,
/// returned with the two matchings that alternate along them. Components
/// have between 2 and `max_len` edges.
pub fn path_heavy<R: Rng>(rng: &mut R, size: usize, max_len: usize, weights: Weights) -> (Graph, Matching, Matching) {
    let mut g = Graph::new();
    let mut a = Matching::new();
    let mut b = Matching::new();
    let mut next: VertexId = 0;
    let mut left = size;
    while left > 0 {
        let len = rng.gen_range(2..=max_len.max(2)).min(left.max(2));
        let cycle = len >= 4 && len % 2 == 0 && rng.gen_bool(0.3);
        let verts: Vec<VertexId> = (0..if cycle { len } else { len + 1 }).map(|i| next + i as VertexId).collect();
        next += verts.len() as VertexId;
        for i in 0..len {
            let (u, v) = (verts[i], verts[(i + 1) % verts.len()]);
            let id = g.insert_edge(u, v, weights.sample(rng)).unwrap();
            let e = *g.edge(id).unwrap();
            if i % 2 == 0 {
                a.insert(e).unwrap()
            } else {
                b.insert(e).unwrap()
            }
        }
        left = left.saturating_sub(len);
    }
    (g, a, b)
}

/// Shape of a random update stream.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StreamSpec {
    pub n: usize,
    pub steps: usize,
    /// Edge count the stream hovers around.
    pub target_edges: usize,
    pub weights: Weights,
    /// Probability of a vertex deletion or insertion instead of an edge update.
    pub vertex_rate: f64,
}

/// Mixed insertions and deletions, valid against an initially empty graph.
pub fn update_stream<R: Rng>(rng: &mut R, spec: StreamSpec) -> Vec<UpdateEvent> {
    let mut g = Graph::new();
    let mut out = Vec::with_capacity(spec.steps);
    let n = spec.n.max(2) as VertexId;
    while out.len() < spec.steps {
        let ev = if rng.gen_bool(spec.vertex_rate.clamp(0.0, 1.0)) {
            let id = rng.gen_range(0..n);
            if g.has_vertex(id) {
                UpdateEvent::DeleteVertex { id }
            } else {
                let mut edges = Vec::new();
                for _ in 0..rng.gen_range(0..4) {
                    let x = rng.gen_range(0..n);
                    if x != id && !edges.iter().any(|&(y, _)| y == x) {
                        edges.push((x, spec.weights.sample(rng)));
                    }
                }
                UpdateEvent::InsertVertex { id, edges }
            }
        } else {
            let p_delete = if spec.target_edges == 0 {
                1.0
            } else {
                (g.edge_count() as f64 / (2.0 * spec.target_edges as f64)).min(1.0)
            };
            if g.edge_count() > 0 && rng.gen_bool(p_delete) {
                let ids: Vec<Edge> = g.edges().copied().collect();
                let e = ids[rng.gen_range(0..ids.len())];
                UpdateEvent::DeleteEdge { u: e.u, v: e.v }
            } else {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u == v || g.edge_between(u, v).is_some() {
                    continue;
                }
                UpdateEvent::InsertEdge { u, v, w: spec.weights.sample(rng) }
            }
        };
        g.apply_update(&ev).expect("generator keeps the stream valid");
        out.push(ev);
    }
    out
}
