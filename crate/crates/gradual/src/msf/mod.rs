//! Spanning forest transformation in two-op phases.
//!
//! Two work trees start as the source and target trees of a component. Each
//! local step makes them agree on one more edge by exchanging an edge in one
//! of them: the source-side exchanges form the forward stream, the
//! target-side exchanges are replayed backwards after it.

pub mod heap;
pub mod index;
pub mod linkcut;

use std::collections::{HashMap, HashSet};
use std::str::FromStr;

use thiserror::Error;

pub use heap::CrossEdgeHeap;
pub use index::{DynamicForestIndex, NaiveIndex};
pub use linkcut::LinkCutIndex;

use crate::graph::{Edge, EdgeId, Graph, VertexId};
use crate::script::{ChangeOp, Phase, Problem, Script};
use crate::solution::{Solution, SpanningForest, UnionFind, ValidityReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MsfError {
    #[error("source forest invalid: {0}")]
    InvalidSource(ValidityReport),
    #[error("target forest invalid: {0}")]
    InvalidTarget(ValidityReport),
    #[error("edge {0} is not in the target work tree only")]
    NotCrossEdge(EdgeId),
    #[error("trees do not span the same vertex set: {0}")]
    Mismatch(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum IndexKind {
    Naive,
    #[default]
    LinkCut,
}

impl FromStr for IndexKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "naive" => Ok(IndexKind::Naive),
            "linkcut" => Ok(IndexKind::LinkCut),
            _ => Err(format!("unknown index '{s}', expected naive or linkcut")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalCase {
    /// The current tree swaps out a heavier-or-equal exclusive edge.
    Current,
    /// The counterpart tree swaps out an exclusive edge for a lighter one.
    Counterpart,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalStep {
    pub case: LocalCase,
    pub removed: Edge,
    pub added: Edge,
}

impl LocalStep {
    pub fn ops(&self) -> Vec<ChangeOp> {
        vec![ChangeOp::remove(&self.removed), ChangeOp::add(&self.added)]
    }
}

/// The two work trees with one index each.
#[derive(Clone, Debug)]
pub struct TwoTrees<I> {
    star: I,
    prime: I,
    in_star: HashSet<EdgeId>,
    in_prime: HashSet<EdgeId>,
    edges: HashMap<EdgeId, Edge>,
    star_weight: f64,
    prime_weight: f64,
}

impl<I: DynamicForestIndex> TwoTrees<I> {
    pub fn new(mut star: I, mut prime: I, current: &[Edge], counterpart: &[Edge]) -> Self {
        let in_star: HashSet<EdgeId> = current.iter().map(|e| e.id).collect();
        let in_prime: HashSet<EdgeId> = counterpart.iter().map(|e| e.id).collect();
        for e in current {
            star.link(e, in_prime.contains(&e.id));
        }
        for e in counterpart {
            prime.link(e, in_star.contains(&e.id));
        }
        let edges = current.iter().chain(counterpart.iter()).map(|e| (e.id, *e)).collect();
        TwoTrees {
            edges,
            star,
            prime,
            in_star,
            in_prime,
            star_weight: current.iter().map(|e| e.w).sum(),
            prime_weight: counterpart.iter().map(|e| e.w).sum(),
        }
    }

    pub fn star_weight(&self) -> f64 {
        self.star_weight
    }
    pub fn prime_weight(&self) -> f64 {
        self.prime_weight
    }
    pub fn symmetric_difference(&self) -> usize {
        self.in_star.symmetric_difference(&self.in_prime).count()
    }

    /// One exchange step for a counterpart-only edge `cross`.
    pub fn local_trans(&mut self, cross: &Edge) -> Result<LocalStep, MsfError> {
        if !self.in_prime.contains(&cross.id) || self.in_star.contains(&cross.id) {
            return Err(MsfError::NotCrossEdge(cross.id));
        }
        let eid = self
            .star
            .path_edge_outside(cross.u, cross.v)
            .expect("a counterpart-only edge closes a cycle with a current-only edge");
        let e = self.edges[&eid];
        if e.w >= cross.w {
            self.star.cut(e.id);
            self.star.link(cross, true);
            self.prime.set_shared(cross.id, true);
            self.in_star.remove(&e.id);
            self.in_star.insert(cross.id);
            self.star_weight += cross.w - e.w;
            Ok(LocalStep { case: LocalCase::Current, removed: e, added: *cross })
        } else {
            let fid = self
                .prime
                .path_edge_outside(e.u, e.v)
                .expect("a current-only edge closes a cycle with a counterpart-only edge");
            let f = self.edges[&fid];
            self.prime.cut(f.id);
            self.prime.link(&e, true);
            self.star.set_shared(e.id, true);
            self.in_prime.remove(&f.id);
            self.in_prime.insert(e.id);
            self.prime_weight += e.w - f.w;
            Ok(LocalStep { case: LocalCase::Counterpart, removed: f, added: e })
        }
    }
}

/// Runs local steps on the lightest cross edge until the work trees agree.
/// Returns the forward phases and the counterpart-side phases, in the order
/// they were produced.
fn run_to_agreement<I: DynamicForestIndex>(tt: &mut TwoTrees<I>, heap: &mut CrossEdgeHeap) -> (Vec<Phase>, Vec<Phase>) {
    let mut fwd = Vec::new();
    let mut bwd = Vec::new();
    while let Some(id) = heap.min_weight_cross_edge() {
        let cross = tt.edges[&id];
        let before = (tt.star_weight, tt.prime_weight);
        let step = tt.local_trans(&cross).expect("heap holds counterpart-only edges");
        match step.case {
            LocalCase::Current => {
                debug_assert!(tt.star_weight <= before.0);
                heap.remove(cross.id);
                fwd.push(Phase { ops: step.ops() });
            }
            LocalCase::Counterpart => {
                assert!(
                    step.removed.w >= cross.w && cross.w > step.added.w,
                    "counterpart exchange must strictly lower its weight"
                );
                heap.remove(step.removed.id);
                bwd.push(Phase { ops: step.ops() });
            }
        }
    }
    (fwd, bwd)
}

/// Forward phases, then the counterpart phases undone in reverse.
fn stitch(fwd: Vec<Phase>, bwd: Vec<Phase>) -> Vec<Phase> {
    let mut out = fwd;
    out.extend(bwd.into_iter().rev().map(|p| Phase { ops: p.ops.iter().rev().map(ChangeOp::inverted).collect() }));
    out
}

fn new_index(kind: IndexKind, n: usize) -> Box<dyn DynamicForestIndex> {
    match kind {
        IndexKind::Naive => Box::new(NaiveIndex::new()),
        IndexKind::LinkCut => Box::new(LinkCutIndex::new(n)),
    }
}

impl DynamicForestIndex for Box<dyn DynamicForestIndex> {
    fn link(&mut self, e: &Edge, shared: bool) {
        (**self).link(e, shared)
    }
    fn cut(&mut self, id: EdgeId) {
        (**self).cut(id)
    }
    fn set_shared(&mut self, id: EdgeId, shared: bool) {
        (**self).set_shared(id, shared)
    }
    fn is_shared(&self, id: EdgeId) -> Option<bool> {
        (**self).is_shared(id)
    }
    fn contains(&self, id: EdgeId) -> bool {
        (**self).contains(id)
    }
    fn connected(&mut self, u: VertexId, v: VertexId) -> bool {
        (**self).connected(u, v)
    }
    fn path_edge_outside(&mut self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        (**self).path_edge_outside(u, v)
    }
}

fn vertex_span(edges: &[Edge]) -> usize {
    edges.iter().map(|e| e.v as usize + 1).max().unwrap_or(0)
}

/// Checks that `edges` form one tree and returns its vertex set.
fn tree_vertices(edges: &[Edge], which: &str) -> Result<HashSet<VertexId>, MsfError> {
    let mut uf = UnionFind::new(vertex_span(edges));
    let mut verts = HashSet::new();
    for e in edges {
        if !uf.union(e.u as usize, e.v as usize) {
            return Err(MsfError::Mismatch(format!("{which} tree has a cycle through edge {}", e.id)));
        }
        verts.insert(e.u);
        verts.insert(e.v);
    }
    if !edges.is_empty() && edges.len() + 1 != verts.len() {
        return Err(MsfError::Mismatch(format!("{which} tree is disconnected")));
    }
    Ok(verts)
}

/// Plans between two spanning trees of the same vertex set.
pub fn plan_tree(tree: &[Edge], other: &[Edge], kind: IndexKind) -> Result<Vec<Phase>, MsfError> {
    let a = tree_vertices(tree, "source")?;
    let b = tree_vertices(other, "target")?;
    if a != b {
        return Err(MsfError::Mismatch("vertex sets differ".into()));
    }
    let n = vertex_span(tree).max(vertex_span(other));
    let mut tt = TwoTrees::new(new_index(kind, n), new_index(kind, n), tree, other);
    let mut heap = CrossEdgeHeap::new();
    let in_tree: HashSet<EdgeId> = tree.iter().map(|e| e.id).collect();
    for e in other.iter().filter(|e| !in_tree.contains(&e.id)) {
        heap.insert(e);
    }
    let (fwd, bwd) = run_to_agreement(&mut tt, &mut heap);
    Ok(stitch(fwd, bwd))
}

/// Per-component colored weights `w(target_i) - w(source_i)` in first-seen order.
#[derive(Clone, Debug, PartialEq)]
pub struct ForestComponent {
    pub label: usize,
    pub colored_weight: f64,
    pub cross: Vec<Edge>,
}

/// Orders components as negative colored weight, then zero, then positive,
/// each class in first-seen order.
///
/// Finishing every weight-reducing component before any weight-increasing
/// one keeps the total at or below `max(w(source), w(target))` regardless
/// of which side is heavier.
pub fn order_forest_components(comps: Vec<ForestComponent>) -> Vec<ForestComponent> {
    let (mut neg, mut zero, mut pos) = (Vec::new(), Vec::new(), Vec::new());
    for c in comps {
        if c.colored_weight < 0.0 {
            neg.push(c);
        } else if c.colored_weight > 0.0 {
            pos.push(c);
        } else {
            zero.push(c);
        }
    }
    neg.extend(zero);
    neg.extend(pos);
    neg
}

fn forest_components(g: &Graph, source: &SpanningForest, target: &SpanningForest) -> Vec<ForestComponent> {
    let labels = source.component_labels(g.vertex_capacity());
    let mut slot: HashMap<usize, usize> = HashMap::new();
    let mut comps: Vec<ForestComponent> = Vec::new();
    for v in g.vertices() {
        let l = labels[v as usize];
        slot.entry(l).or_insert_with(|| {
            comps.push(ForestComponent { label: l, colored_weight: 0.0, cross: Vec::new() });
            comps.len() - 1
        });
    }
    for e in source.iter() {
        comps[slot[&labels[e.u as usize]]].colored_weight -= e.w;
    }
    for e in target.iter() {
        let c = &mut comps[slot[&labels[e.u as usize]]];
        c.colored_weight += e.w;
        if !source.contains(e.id) {
            c.cross.push(*e);
        }
    }
    comps
}

pub fn plan_msf(g: &Graph, source: &SpanningForest, target: &SpanningForest) -> Result<Script, MsfError> {
    plan_msf_with(g, source, target, IndexKind::default())
}

/// Plans `source -> target` one component at a time.
pub fn plan_msf_with(
    g: &Graph,
    source: &SpanningForest,
    target: &SpanningForest,
    kind: IndexKind,
) -> Result<Script, MsfError> {
    match source.validate(g) {
        ValidityReport::Ok => {}
        r => return Err(MsfError::InvalidSource(r)),
    }
    match target.validate(g) {
        ValidityReport::Ok => {}
        r => return Err(MsfError::InvalidTarget(r)),
    }
    let n = g.vertex_capacity();
    let s_edges = source.edge_list();
    let t_edges = target.edge_list();
    let mut tt = TwoTrees::new(new_index(kind, n), new_index(kind, n), &s_edges, &t_edges);
    let mut script = Script::new(Problem::Msf, None, 2);
    for comp in order_forest_components(forest_components(g, source, target)) {
        if comp.cross.is_empty() {
            continue;
        }
        let mut heap = CrossEdgeHeap::new();
        for e in &comp.cross {
            heap.insert(e);
        }
        let (fwd, bwd) = run_to_agreement(&mut tt, &mut heap);
        script.phases.extend(stitch(fwd, bwd));
    }
    debug_assert_eq!(tt.symmetric_difference(), 0);
    Ok(script)
}
