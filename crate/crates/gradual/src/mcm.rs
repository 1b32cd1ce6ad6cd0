//! Cardinality matching transformation by good/bad edge precedence.
//!
//! A target-only edge is *good* when at most one current edge touches it and
//! *bad* when two do. Each phase adds one target edge, good ones first, and
//! then removes the current edges it conflicts with.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::{Edge, EdgeId, Graph, VertexId};
use crate::script::{ChangeOp, Problem, Script};
use crate::solution::{Matching, Solution, ValidityReport};

const NIL: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum McmError {
    #[error("source matching invalid: {0}")]
    InvalidSource(ValidityReport),
    #[error("target matching invalid: {0}")]
    InvalidTarget(ValidityReport),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Unclassified,
    Good,
    Bad,
    /// Already in the current matching.
    Done,
    /// Deleted from the host graph.
    Dead,
}

const GOOD: usize = 0;
const BAD: usize = 1;

/// Good and bad target edges, in list order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EdgeClassification {
    pub good: Vec<Edge>,
    pub bad: Vec<Edge>,
}

/// Resumable planner state.
///
/// Classification can be spread over several calls to
/// [`McmPlanner::classify_step`], and host-graph deletions can be fed in at
/// any time with [`McmPlanner::delete_edge`]; both are O(1) per edge.
#[derive(Clone, Debug)]
pub struct McmPlanner {
    current: Matching,
    targets: Vec<Edge>,
    slot: Vec<Slot>,
    count: Vec<u8>,
    prev: Vec<u32>,
    next: Vec<u32>,
    head: [u32; 2],
    tail: [u32; 2],
    at_vertex: HashMap<VertexId, u32>,
    by_id: HashMap<EdgeId, u32>,
    cursor: usize,
    live_targets: usize,
}

impl McmPlanner {
    pub fn new(current: Matching, target: &Matching) -> Self {
        let targets: Vec<Edge> = target.iter().copied().collect();
        let n = targets.len();
        let mut p = McmPlanner {
            slot: vec![Slot::Unclassified; n],
            count: vec![0; n],
            prev: vec![NIL; n],
            next: vec![NIL; n],
            head: [NIL; 2],
            tail: [NIL; 2],
            at_vertex: HashMap::with_capacity(2 * n),
            by_id: HashMap::with_capacity(n),
            cursor: 0,
            live_targets: n,
            current,
            targets,
        };
        for (i, t) in p.targets.iter().enumerate() {
            let i = i as u32;
            p.at_vertex.insert(t.u, i);
            p.at_vertex.insert(t.v, i);
            p.by_id.insert(t.id, i);
            if p.current.contains(t.id) {
                p.slot[i as usize] = Slot::Done;
            }
        }
        p
    }

    pub fn current(&self) -> &Matching {
        &self.current
    }

    pub fn into_current(self) -> Matching {
        self.current
    }

    /// Number of target edges not yet deleted from the host graph.
    pub fn live_targets(&self) -> usize {
        self.live_targets
    }

    pub fn classification_done(&self) -> bool {
        self.cursor >= self.targets.len()
    }

    /// Whether phases remain to be emitted (or classified).
    pub fn pending(&self) -> bool {
        !self.classification_done() || self.head[GOOD] != NIL || self.head[BAD] != NIL
    }

    /// Classifies up to `budget` more target edges. Returns true once all are classified.
    pub fn classify_step(&mut self, budget: usize) -> bool {
        let mut left = budget;
        while left > 0 && self.cursor < self.targets.len() {
            let i = self.cursor;
            self.cursor += 1;
            left -= 1;
            if self.slot[i] != Slot::Unclassified {
                continue;
            }
            let t = self.targets[i];
            let c = self.blockers(&t);
            self.count[i] = c;
            self.push_back(if c <= 1 { GOOD } else { BAD }, i as u32);
        }
        self.classification_done()
    }

    pub fn classify_all(&mut self) {
        self.classify_step(usize::MAX);
    }

    fn blockers(&self, t: &Edge) -> u8 {
        self.current.edge_at(t.u).is_some() as u8 + self.current.edge_at(t.v).is_some() as u8
    }

    fn push_back(&mut self, list: usize, i: u32) {
        self.slot[i as usize] = if list == GOOD { Slot::Good } else { Slot::Bad };
        self.prev[i as usize] = self.tail[list];
        self.next[i as usize] = NIL;
        if self.tail[list] != NIL {
            self.next[self.tail[list] as usize] = i;
        } else {
            self.head[list] = i;
        }
        self.tail[list] = i;
    }

    fn unlink(&mut self, i: u32) {
        let list = match self.slot[i as usize] {
            Slot::Good => GOOD,
            Slot::Bad => BAD,
            _ => return,
        };
        let (p, n) = (self.prev[i as usize], self.next[i as usize]);
        if p != NIL {
            self.next[p as usize] = n;
        } else {
            self.head[list] = n;
        }
        if n != NIL {
            self.prev[n as usize] = p;
        } else {
            self.tail[list] = p;
        }
        self.prev[i as usize] = NIL;
        self.next[i as usize] = NIL;
    }

    /// A current edge at `x` went away: the listed target at `x` loses a blocker.
    fn release(&mut self, x: VertexId) {
        let Some(&i) = self.at_vertex.get(&x) else { return };
        match self.slot[i as usize] {
            Slot::Good | Slot::Bad => {
                self.count[i as usize] -= 1;
                if self.slot[i as usize] == Slot::Bad && self.count[i as usize] <= 1 {
                    self.unlink(i);
                    self.push_back(GOOD, i);
                }
            }
            _ => {}
        }
    }

    /// Snapshot of the current lists.
    pub fn classification(&self) -> EdgeClassification {
        let walk = |list: usize| {
            let mut out = Vec::new();
            let mut i = self.head[list];
            while i != NIL {
                out.push(self.targets[i as usize]);
                i = self.next[i as usize];
            }
            out
        };
        EdgeClassification { good: walk(GOOD), bad: walk(BAD) }
    }

    /// Emits the next phase and applies it to the current matching.
    ///
    /// Classification must be complete.
    pub fn next_phase(&mut self) -> Option<Vec<ChangeOp>> {
        assert!(self.classification_done(), "next_phase before classification finished");
        let i = if self.head[GOOD] != NIL {
            self.head[GOOD]
        } else if self.head[BAD] != NIL {
            debug_assert!(
                self.current.len() >= self.live_targets,
                "only bad edges left but |current| = {} < |target| = {}",
                self.current.len(),
                self.live_targets
            );
            self.head[BAD]
        } else {
            return None;
        };
        self.unlink(i);
        self.slot[i as usize] = Slot::Done;
        let r = self.targets[i as usize];
        let mut ops = vec![ChangeOp::add(&r)];
        for x in [r.u, r.v] {
            if let Some(&m) = self.current.edge_at(x) {
                self.current.remove(m.id);
                ops.push(ChangeOp::remove(&m));
                self.release(m.other(x));
            }
        }
        self.current.insert(r).expect("conflicts were removed");
        Some(ops)
    }

    /// Propagates a host-graph deletion. Returns the current-matching edge
    /// that was dropped, if any.
    pub fn delete_edge(&mut self, id: EdgeId) -> Option<Edge> {
        let dropped = self.current.remove(id);
        if let Some(e) = dropped {
            self.release(e.u);
            self.release(e.v);
        }
        if let Some(&i) = self.by_id.get(&id) {
            match self.slot[i as usize] {
                Slot::Dead => {}
                s => {
                    if matches!(s, Slot::Good | Slot::Bad) {
                        self.unlink(i);
                    }
                    self.slot[i as usize] = Slot::Dead;
                    self.live_targets -= 1;
                    let t = self.targets[i as usize];
                    self.at_vertex.remove(&t.u);
                    self.at_vertex.remove(&t.v);
                }
            }
        }
        dropped
    }
}

/// Good/bad split of `target \ current`.
pub fn classify(g: &Graph, current: &Matching, target: &Matching) -> Result<EdgeClassification, McmError> {
    check_inputs(g, current, target)?;
    let mut p = McmPlanner::new(current.clone(), target);
    p.classify_all();
    Ok(p.classification())
}

fn check_inputs(g: &Graph, source: &Matching, target: &Matching) -> Result<(), McmError> {
    match source.validate(g) {
        ValidityReport::Ok => {}
        r => return Err(McmError::InvalidSource(r)),
    }
    match target.validate(g) {
        ValidityReport::Ok => Ok(()),
        r => Err(McmError::InvalidTarget(r)),
    }
}

/// Plans a transformation from `source` to a superset of `target` in phases of
/// at most three edge changes.
pub fn plan_mcm(g: &Graph, source: &Matching, target: &Matching) -> Result<Script, McmError> {
    check_inputs(g, source, target)?;
    let mut script = Script::new(Problem::Mcm, None, 3);
    let mut p = McmPlanner::new(source.clone(), target);
    p.classify_all();
    while let Some(ops) = p.next_phase() {
        script.push_phase(ops);
    }
    Ok(script)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::script::{verify_script, Granularity};
    use crate::Tolerance;

    fn m(g: &Graph, pairs: &[(u32, u32)]) -> Matching {
        Matching::from_pairs(g, pairs).unwrap()
    }

    /// Independent classification by direct incidence counting.
    type Pairs = Vec<(u32, u32)>;

    fn brute_classify(current: &Matching, target: &Matching) -> (Pairs, Pairs) {
        let mut good = Vec::new();
        let mut bad = Vec::new();
        for t in target.iter().filter(|t| !current.contains(t.id)) {
            let n = current.iter().filter(|c| c.touches(t.u) || c.touches(t.v)).count();
            if n <= 1 {
                good.push(t.key());
            } else {
                bad.push(t.key());
            }
        }
        good.sort();
        bad.sort();
        (good, bad)
    }

    fn keys(v: &[Edge]) -> Vec<(u32, u32)> {
        let mut k: Vec<_> = v.iter().map(|e| e.key()).collect();
        k.sort();
        k
    }

    #[test]
    fn subset_target_gives_empty_lists() {
        let g = Graph::from_edges([(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let c = classify(&g, &m(&g, &[(0, 1), (2, 3)]), &m(&g, &[(0, 1)])).unwrap();
        assert!(c.good.is_empty() && c.bad.is_empty());
    }

    #[test]
    fn path_and_cycle_classification() {
        let g = Graph::from_edges([(1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)]).unwrap();
        let (cur, tgt) = (m(&g, &[(2, 3)]), m(&g, &[(1, 2), (3, 4)]));
        let c = classify(&g, &cur, &tgt).unwrap();
        assert_eq!((keys(&c.good), keys(&c.bad)), brute_classify(&cur, &tgt));
        assert_eq!(keys(&c.good), vec![(1, 2), (3, 4)]);

        let g = Graph::from_edges([(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)]).unwrap();
        let (cur, tgt) = (m(&g, &[(0, 1), (2, 3)]), m(&g, &[(1, 2), (0, 3)]));
        let c = classify(&g, &cur, &tgt).unwrap();
        assert_eq!((keys(&c.good), keys(&c.bad)), brute_classify(&cur, &tgt));
        assert_eq!(keys(&c.bad), vec![(0, 3), (1, 2)]);
    }

    #[test]
    fn identity_is_empty_script() {
        let g = Graph::from_edges([(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let a = m(&g, &[(0, 1), (2, 3)]);
        assert!(plan_mcm(&g, &a, &a).unwrap().phases.is_empty());
    }

    #[test]
    fn path_fixture_script() {
        let g = Graph::from_edges([(1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)]).unwrap();
        let (src, tgt) = (m(&g, &[(2, 3)]), m(&g, &[(1, 2), (3, 4)]));
        let s = plan_mcm(&g, &src, &tgt).unwrap();
        let e = |a, b| *g.edge_between(a, b).unwrap();
        assert_eq!(s.phases.len(), 2);
        assert_eq!(s.phases[0].ops, vec![ChangeOp::add(&e(1, 2)), ChangeOp::remove(&e(2, 3))]);
        assert_eq!(s.phases[1].ops, vec![ChangeOp::add(&e(3, 4))]);
        let (r, v) = verify_script(&g, &src.edge_list(), &tgt.edge_list(), &s, Tolerance::default()).unwrap();
        assert!(v.passed(), "{v:?}");
        let sizes: Vec<usize> = r.phase_ends().map(|s| s.size).collect();
        assert_eq!(sizes, vec![1, 1, 2]);
    }

    #[test]
    fn cycle_fixture_dips_once() {
        let g = Graph::from_edges([(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)]).unwrap();
        let (src, tgt) = (m(&g, &[(0, 1), (2, 3)]), m(&g, &[(1, 2), (0, 3)]));
        let s = plan_mcm(&g, &src, &tgt).unwrap();
        assert_eq!(s.phases.len(), 2);
        assert_eq!(s.phases[0].ops.len(), 3);
        assert_eq!(s.phases[1].ops.len(), 1);
        let r = crate::script::replay(&g, &src.edge_list(), &s, Granularity::PerPhase, Tolerance::default()).unwrap();
        let sizes: Vec<usize> = r.phase_ends().map(|s| s.size).collect();
        assert_eq!(sizes, vec![2, 1, 2]);
    }

    #[test]
    fn empty_source_adds_every_target_edge() {
        let g = Graph::from_edges([(0, 1, 1.0), (2, 3, 1.0), (4, 5, 1.0)]).unwrap();
        let tgt = m(&g, &[(0, 1), (2, 3), (4, 5)]);
        let s = plan_mcm(&g, &Matching::new(), &tgt).unwrap();
        assert_eq!(s.phases.len(), 3);
        assert!(s.phases.iter().all(|p| p.ops.len() == 1));
    }

    #[test]
    fn deletion_moves_bad_edge_to_good() {
        let g = Graph::from_edges([(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)]).unwrap();
        let (src, tgt) = (m(&g, &[(0, 1), (2, 3)]), m(&g, &[(1, 2), (0, 3)]));
        let mut p = McmPlanner::new(src, &tgt);
        p.classify_all();
        assert_eq!(p.classification().good.len(), 0);
        let dropped = p.delete_edge(g.edge_between(0, 1).unwrap().id);
        assert!(dropped.is_some());
        let c = p.classification();
        assert_eq!(keys(&c.good), vec![(0, 3), (1, 2)]);
        assert!(c.bad.is_empty());
    }

    #[test]
    fn deleted_target_is_spliced_out() {
        let g = Graph::from_edges([(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let tgt = m(&g, &[(0, 1), (2, 3)]);
        let mut p = McmPlanner::new(Matching::new(), &tgt);
        p.classify_step(1);
        p.delete_edge(g.edge_between(0, 1).unwrap().id);
        p.delete_edge(g.edge_between(2, 3).unwrap().id);
        p.classify_all();
        assert!(p.next_phase().is_none());
        assert_eq!(p.live_targets(), 0);
    }
}
