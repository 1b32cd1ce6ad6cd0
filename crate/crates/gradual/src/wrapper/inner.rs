//! Dynamic matching algorithms that can be wrapped or run on their own.

use std::collections::{HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{DeltaReport, Edge, Graph, VertexId};
use crate::solution::Matching;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WrapperError {
    #[error("epsilon {0} outside (0, {1}]")]
    Epsilon(f64, f64),
    #[error("aspect ratio bound {0} below 1")]
    Psi(f64),
    #[error("inner algorithm broke its contract: {0}")]
    Contract(String),
}

/// Changes to a maintained output matching in one update step.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OutputDelta {
    pub added: Vec<Edge>,
    pub removed: Vec<Edge>,
}

impl OutputDelta {
    pub fn recourse(&self) -> usize {
        self.added.len() + self.removed.len()
    }

    /// Records the change from `before` to `after`.
    pub fn between(before: &Matching, after: &Matching) -> Self {
        OutputDelta {
            added: after.iter().filter(|e| !before.contains(e.id)).copied().collect(),
            removed: before.iter().filter(|e| !after.contains(e.id)).copied().collect(),
        }
    }
}

/// A dynamic matching algorithm driven one update at a time.
///
/// `handle_update` is called after `g` has been mutated; `delta` lists the
/// edges that appeared and disappeared.
pub trait DynamicMatcher {
    fn name(&self) -> String;
    fn handle_update(&mut self, g: &Graph, delta: &DeltaReport) -> Result<OutputDelta, WrapperError>;
    fn matching(&self) -> &Matching;
    /// Approximation factor the algorithm claims for its output.
    fn declared_approx(&self) -> f64;
    fn inner_size(&self) -> Option<usize> {
        None
    }
    fn window_phase(&self) -> &'static str {
        "-"
    }
}

/// What the wrapper needs from the algorithm it wraps.
pub trait InnerAlgorithm: DynamicMatcher {
    /// Up to `limit` edges of the current matching.
    fn emit_edges(&self, limit: usize) -> Vec<Edge> {
        self.matching().iter().take(limit).copied().collect()
    }
    fn beta(&self) -> f64 {
        self.declared_approx()
    }
}

fn drop_removed(m: &mut Matching, delta: &DeltaReport, out: &mut OutputDelta) {
    for e in &delta.removed {
        if let Some(x) = m.remove(e.id) {
            out.removed.push(x);
        }
    }
}

/// Matches `x` to its first free neighbor, if any.
fn rematch(g: &Graph, m: &mut Matching, x: VertexId, out: &mut OutputDelta) {
    if !g.has_vertex(x) || m.edge_at(x).is_some() {
        return;
    }
    for &id in g.incident(x) {
        let e = *g.edge(id).unwrap();
        if m.edge_at(e.other(x)).is_none() {
            m.insert(e).unwrap();
            out.added.push(e);
            return;
        }
    }
}

/// Maximal matching kept up by local rematching.
#[derive(Clone, Debug)]
pub struct GreedyMaximal {
    m: Matching,
    beta: f64,
}

impl GreedyMaximal {
    pub fn new() -> Self {
        GreedyMaximal { m: Matching::new(), beta: 2.0 }
    }

    /// Weighted use with aspect ratio bound `psi`: a maximal matching is a
    /// `2 psi` approximation of the maximum weight.
    pub fn weighted(psi: f64) -> Self {
        GreedyMaximal { m: Matching::new(), beta: 2.0 * psi }
    }
}

impl Default for GreedyMaximal {
    fn default() -> Self {
        Self::new()
    }
}

impl DynamicMatcher for GreedyMaximal {
    fn name(&self) -> String {
        "greedy".into()
    }

    fn handle_update(&mut self, g: &Graph, delta: &DeltaReport) -> Result<OutputDelta, WrapperError> {
        let mut out = OutputDelta::default();
        drop_removed(&mut self.m, delta, &mut out);
        for e in &out.removed.clone() {
            rematch(g, &mut self.m, e.u, &mut out);
            rematch(g, &mut self.m, e.v, &mut out);
        }
        for e in &delta.added {
            if g.edge(e.id).is_some() && self.m.edge_at(e.u).is_none() && self.m.edge_at(e.v).is_none() {
                self.m.insert(*e).unwrap();
                out.added.push(*e);
            }
        }
        Ok(out)
    }

    fn matching(&self) -> &Matching {
        &self.m
    }
    fn declared_approx(&self) -> f64 {
        self.beta
    }
    fn inner_size(&self) -> Option<usize> {
        Some(self.m.len())
    }
}

impl InnerAlgorithm for GreedyMaximal {}

/// Periodic recomputation from scratch with an instantaneous swap.
///
/// Between recomputations only deletions are applied. Every
/// `max(1, floor(eps_in / 4 * |M|))` updates the matching is rebuilt. In
/// cardinality mode a random-order greedy matching is improved until no
/// augmenting path of at most `2 * ceil(2 / eps_in) + 1` edges remains, which
/// gives a `1 + eps_in / 2` approximation or better at recompute steps. In
/// weighted mode the rebuild is greedy by weight.
#[derive(Clone, Debug)]
pub struct BatchRecompute {
    m: Matching,
    eps_in: f64,
    weighted: bool,
    since: usize,
    period: usize,
    rng: ChaCha8Rng,
    last_was_recompute: bool,
}

impl BatchRecompute {
    pub fn new(eps_in: f64, seed: u64) -> Self {
        BatchRecompute {
            m: Matching::new(),
            eps_in,
            weighted: false,
            since: 0,
            period: 1,
            rng: ChaCha8Rng::seed_from_u64(seed),
            last_was_recompute: false,
        }
    }

    pub fn weighted(eps_in: f64, seed: u64) -> Self {
        BatchRecompute { weighted: true, ..Self::new(eps_in, seed) }
    }

    pub fn max_path_len(&self) -> usize {
        2 * (2.0 / self.eps_in).ceil() as usize + 1
    }

    /// Whether the last handled update triggered a rebuild.
    pub fn recomputed_last_step(&self) -> bool {
        self.last_was_recompute
    }

    fn rebuild(&mut self, g: &Graph) -> Matching {
        let mut edges: Vec<Edge> = g.edges().copied().collect();
        if self.weighted {
            edges.sort_by(|a, b| b.w.total_cmp(&a.w).then(a.id.cmp(&b.id)));
        } else {
            edges.shuffle(&mut self.rng);
        }
        let mut m = Matching::new();
        for e in edges {
            if m.edge_at(e.u).is_none() && m.edge_at(e.v).is_none() {
                m.insert(e).unwrap();
            }
        }
        if !self.weighted {
            augment_bounded(g, &mut m, self.max_path_len());
        }
        m
    }
}

/// Repeatedly augments along alternating paths of at most `max_len` edges
/// until none is left.
pub fn augment_bounded(g: &Graph, m: &mut Matching, max_len: usize) {
    let mut on_path = vec![false; g.vertex_capacity()];
    loop {
        let mut improved = false;
        let free: Vec<VertexId> = g.vertices().filter(|&v| m.edge_at(v).is_none() && g.degree(v) > 0).collect();
        for s in free {
            if m.edge_at(s).is_some() {
                continue;
            }
            let mut path = Vec::new();
            on_path[s as usize] = true;
            let found = search(g, m, s, max_len, &mut on_path, &mut path);
            on_path[s as usize] = false;
            for e in &path {
                on_path[e.u as usize] = false;
                on_path[e.v as usize] = false;
            }
            if found {
                // path alternates unmatched, matched, ..., unmatched.
                for (i, e) in path.iter().enumerate() {
                    if i % 2 == 1 {
                        m.remove(e.id);
                    }
                }
                for (i, e) in path.iter().enumerate() {
                    if i % 2 == 0 {
                        m.insert(*e).expect("augmenting path endpoints are free");
                    }
                }
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }

    fn search(g: &Graph, m: &Matching, x: VertexId, left: usize, on_path: &mut [bool], path: &mut Vec<Edge>) -> bool {
        if left == 0 {
            return false;
        }
        for &id in g.incident(x) {
            if m.contains(id) {
                continue;
            }
            let e = *g.edge(id).unwrap();
            let y = e.other(x);
            if on_path[y as usize] {
                continue;
            }
            match m.edge_at(y) {
                None => {
                    path.push(e);
                    return true;
                }
                Some(&me) if left >= 3 => {
                    let z = me.other(y);
                    if on_path[z as usize] {
                        continue;
                    }
                    on_path[y as usize] = true;
                    on_path[z as usize] = true;
                    path.push(e);
                    path.push(me);
                    if search(g, m, z, left - 2, on_path, path) {
                        return true;
                    }
                    path.pop();
                    path.pop();
                    on_path[y as usize] = false;
                    on_path[z as usize] = false;
                }
                Some(_) => {}
            }
        }
        false
    }
}

impl DynamicMatcher for BatchRecompute {
    fn name(&self) -> String {
        format!("batch({})", self.eps_in)
    }

    fn handle_update(&mut self, g: &Graph, delta: &DeltaReport) -> Result<OutputDelta, WrapperError> {
        let mut out = OutputDelta::default();
        drop_removed(&mut self.m, delta, &mut out);
        self.since += 1;
        self.last_was_recompute = false;
        if self.since >= self.period {
            let fresh = self.rebuild(g);
            let swap = OutputDelta::between(&self.m, &fresh);
            out.added.extend(swap.added);
            out.removed.extend(swap.removed);
            self.m = fresh;
            self.since = 0;
            self.period = ((self.eps_in / 4.0 * self.m.len() as f64).floor() as usize).max(1);
            self.last_was_recompute = true;
        }
        Ok(out)
    }

    fn matching(&self) -> &Matching {
        &self.m
    }
    fn declared_approx(&self) -> f64 {
        if self.weighted {
            2.0
        } else {
            1.0 + self.eps_in
        }
    }
    fn inner_size(&self) -> Option<usize> {
        Some(self.m.len())
    }
}

impl InnerAlgorithm for BatchRecompute {}

/// Maximum matching maintained by augmenting paths from the free vertices
/// of each touched component. Exact on bipartite graphs.
#[derive(Clone, Debug, Default)]
pub struct ExactMaintainer {
    m: Matching,
}

impl ExactMaintainer {
    pub fn new() -> Self {
        Self::default()
    }
}

fn component_of(g: &Graph, starts: &[VertexId]) -> Vec<VertexId> {
    let mut seen: HashSet<VertexId> = HashSet::new();
    let mut queue: VecDeque<VertexId> = VecDeque::new();
    for &s in starts {
        if g.has_vertex(s) && seen.insert(s) {
            queue.push_back(s);
        }
    }
    let mut out = Vec::new();
    while let Some(x) = queue.pop_front() {
        out.push(x);
        for &id in g.incident(x) {
            let y = g.edge(id).unwrap().other(x);
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Kuhn-style alternating DFS with visited marks.
fn kuhn(g: &Graph, m: &Matching, x: VertexId, visited: &mut HashSet<VertexId>, path: &mut Vec<Edge>) -> bool {
    visited.insert(x);
    for &id in g.incident(x) {
        if m.contains(id) {
            continue;
        }
        let e = *g.edge(id).unwrap();
        let y = e.other(x);
        if visited.contains(&y) {
            continue;
        }
        visited.insert(y);
        match m.edge_at(y) {
            None => {
                path.push(e);
                return true;
            }
            Some(&me) => {
                let z = me.other(y);
                if visited.contains(&z) {
                    continue;
                }
                path.push(e);
                path.push(me);
                if kuhn(g, m, z, visited, path) {
                    return true;
                }
                path.pop();
                path.pop();
            }
        }
    }
    false
}

impl DynamicMatcher for ExactMaintainer {
    fn name(&self) -> String {
        "exact".into()
    }

    fn handle_update(&mut self, g: &Graph, delta: &DeltaReport) -> Result<OutputDelta, WrapperError> {
        let before = self.m.clone();
        let mut scratch = OutputDelta::default();
        drop_removed(&mut self.m, delta, &mut scratch);
        let mut touched: Vec<VertexId> = Vec::new();
        for e in delta.added.iter().chain(delta.removed.iter()) {
            touched.push(e.u);
            touched.push(e.v);
        }
        loop {
            let mut improved = false;
            for s in component_of(g, &touched) {
                if self.m.edge_at(s).is_some() {
                    continue;
                }
                let mut path = Vec::new();
                if kuhn(g, &self.m, s, &mut HashSet::new(), &mut path) {
                    for (i, e) in path.iter().enumerate() {
                        if i % 2 == 1 {
                            self.m.remove(e.id);
                        }
                    }
                    for (i, e) in path.iter().enumerate() {
                        if i % 2 == 0 {
                            self.m.insert(*e).unwrap();
                        }
                    }
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        Ok(OutputDelta::between(&before, &self.m))
    }

    fn matching(&self) -> &Matching {
        &self.m
    }
    fn declared_approx(&self) -> f64 {
        1.0
    }
    fn inner_size(&self) -> Option<usize> {
        Some(self.m.len())
    }
}

impl InnerAlgorithm for ExactMaintainer {}

/// Never changes its output.
#[derive(Clone, Debug, Default)]
pub struct ZeroRecourse {
    m: Matching,
}

impl DynamicMatcher for ZeroRecourse {
    fn name(&self) -> String {
        "zero".into()
    }
    fn handle_update(&mut self, _g: &Graph, delta: &DeltaReport) -> Result<OutputDelta, WrapperError> {
        let mut out = OutputDelta::default();
        drop_removed(&mut self.m, delta, &mut out);
        Ok(out)
    }
    fn matching(&self) -> &Matching {
        &self.m
    }
    fn declared_approx(&self) -> f64 {
        f64::INFINITY
    }
}

impl InnerAlgorithm for ZeroRecourse {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::UpdateEvent;
    use crate::oracle::{has_augmenting_path, max_matching_exact};
    use rand::Rng;

    fn drive(alg: &mut dyn DynamicMatcher, g: &mut Graph, ev: UpdateEvent) -> OutputDelta {
        let d = g.apply_update(&ev).unwrap();
        alg.handle_update(g, &d).unwrap()
    }

    #[test]
    fn greedy_on_growing_star() {
        let mut g = Graph::new();
        let mut alg = GreedyMaximal::new();
        for leaf in 1..=5 {
            drive(&mut alg, &mut g, UpdateEvent::InsertEdge { u: 0, v: leaf, w: 1.0 });
            assert_eq!(alg.matching().len(), 1);
        }
    }

    #[test]
    fn greedy_stays_maximal_under_churn() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut g = Graph::new();
        let mut alg = GreedyMaximal::new();
        for _ in 0..2000 {
            let (u, v) = (rng.gen_range(0..30u32), rng.gen_range(0..30u32));
            if u == v {
                continue;
            }
            let ev = if g.edge_between(u, v).is_some() {
                UpdateEvent::DeleteEdge { u, v }
            } else {
                UpdateEvent::InsertEdge { u, v, w: 1.0 }
            };
            let d = drive(&mut alg, &mut g, ev);
            assert!(d.recourse() <= 3);
            assert!(crate::solution::validate_matching(&g, &alg.matching().iter().copied().collect::<Vec<_>>()).is_ok());
            for e in g.edges() {
                assert!(alg.matching().edge_at(e.u).is_some() || alg.matching().edge_at(e.v).is_some());
            }
        }
    }

    #[test]
    fn bounded_augmentation_reaches_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let mut g = Graph::new();
            for _ in 0..30 {
                let (u, v) = (rng.gen_range(0..14u32), rng.gen_range(0..14u32));
                let _ = g.insert_edge(u, v, 1.0);
            }
            let mut b = BatchRecompute::new(0.5, rng.gen());
            let m = b.rebuild(&g);
            let opt = max_matching_exact(&g).unwrap().len();
            assert!((m.len() as f64) * 1.5 >= opt as f64);
            let mut exact = m.clone();
            augment_bounded(&g, &mut exact, usize::MAX);
            assert!(!has_augmenting_path(&g, &exact));
        }
    }

    #[test]
    fn batch_swaps_on_growing_path() {
        let mut g = Graph::new();
        let mut alg = BatchRecompute::new(0.5, 4);
        let mut big_swap = false;
        for i in 0..200u32 {
            let before = alg.matching().len();
            let d = drive(&mut alg, &mut g, UpdateEvent::InsertEdge { u: i, v: i + 1, w: 1.0 });
            if before > 0 && d.recourse() >= before {
                big_swap = true;
            }
        }
        assert!(big_swap);
    }

    #[test]
    fn exact_maintainer_is_maximum_on_paths() {
        let mut g = Graph::new();
        let mut alg = ExactMaintainer::new();
        for i in 0..9u32 {
            drive(&mut alg, &mut g, UpdateEvent::InsertEdge { u: i, v: i + 1, w: 1.0 });
            assert_eq!(alg.matching().len(), max_matching_exact(&g).unwrap().len());
        }
        drive(&mut alg, &mut g, UpdateEvent::DeleteEdge { u: 4, v: 5 });
        assert_eq!(alg.matching().len(), max_matching_exact(&g).unwrap().len());
    }
}
