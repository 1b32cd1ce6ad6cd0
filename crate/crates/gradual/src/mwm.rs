//! Weighted matching transformation over blue/red alternating components.
//!
//! Blue edges are current-only, red edges are target-only. Their symmetric
//! difference splits into vertex-disjoint paths and cycles, each normalized
//! to a pair list `(b_1, r_1), ..., (b_k, r_k)`. Components are replayed one
//! at a time, starting where the running colored weight stays non-negative,
//! and the resulting op stream is cut into phases at light blue edges.

use std::collections::{HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::graph::{Edge, EdgeId, Graph, VertexId};
use crate::script::{declared_budget, ChangeOp, Problem, Script};
use crate::solution::{Matching, Solution, ValidityReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MwmError {
    #[error("epsilon {0} outside (0, 0.5]")]
    Epsilon(f64),
    #[error("target weight {to} does not exceed source weight {from}; plan the swapped pair and reverse it (see plan_mwm_any)")]
    NotImproving { from: f64, to: f64 },
    #[error("source matching invalid: {0}")]
    InvalidSource(ValidityReport),
    #[error("target matching invalid: {0}")]
    InvalidTarget(ValidityReport),
    #[error("range {range:?} does not fit a {kind:?} with {k} pairs")]
    BadRange { range: RunRange, kind: ComponentKind, k: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentKind {
    Path,
    Cycle,
}

/// `(blue, red)` slot pair. Only the first blue and last red of a path may be absent.
pub type Pair = (Option<Edge>, Option<Edge>);

#[derive(Clone, Debug, PartialEq)]
pub struct AlternatingComponent {
    pub kind: ComponentKind,
    pub pairs: Vec<Pair>,
}

fn slot_w(e: &Option<Edge>) -> f64 {
    e.map_or(0.0, |e| e.w)
}

impl AlternatingComponent {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Red weight minus blue weight.
    pub fn colored_weight(&self) -> f64 {
        self.pairs.iter().map(|(b, r)| slot_w(r) - slot_w(b)).sum()
    }

    /// `c_0 = 0, c_i = sum_{j <= i} (w(r_j) - w(b_j))`.
    pub fn prefix_sums(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.pairs.len() + 1);
        let mut acc = 0.0;
        out.push(acc);
        for (b, r) in &self.pairs {
            acc += slot_w(r) - slot_w(b);
            out.push(acc);
        }
        out
    }

    pub fn max_blue(&self) -> f64 {
        self.pairs.iter().map(|(b, _)| slot_w(b)).fold(0.0, f64::max)
    }

    fn next_index(&self, i: usize) -> Option<usize> {
        match self.kind {
            ComponentKind::Path => (i + 1 < self.pairs.len()).then_some(i + 1),
            ComponentKind::Cycle => Some((i + 1) % self.pairs.len()),
        }
    }
}

/// Splits `current XOR target` into alternating components in first-seen order.
pub fn decompose(current: &Matching, target: &Matching) -> Vec<AlternatingComponent> {
    let blue: Vec<Edge> = current.iter().filter(|e| !target.contains(e.id)).copied().collect();
    let red: Vec<Edge> = target.iter().filter(|e| !current.contains(e.id)).copied().collect();
    let mut blue_at: HashMap<VertexId, Edge> = HashMap::with_capacity(2 * blue.len());
    let mut red_at: HashMap<VertexId, Edge> = HashMap::with_capacity(2 * red.len());
    let mut is_blue: HashSet<EdgeId> = HashSet::with_capacity(blue.len());
    for e in &blue {
        blue_at.insert(e.u, *e);
        blue_at.insert(e.v, *e);
        is_blue.insert(e.id);
    }
    for e in &red {
        red_at.insert(e.u, *e);
        red_at.insert(e.v, *e);
    }
    // Continuation of the walk through `x`, leaving edge `e`.
    let step = |e: &Edge, x: VertexId| -> Option<Edge> {
        let other = if is_blue.contains(&e.id) { red_at.get(&x) } else { blue_at.get(&x) };
        other.copied()
    };

    let mut seen: HashSet<EdgeId> = HashSet::with_capacity(blue.len() + red.len());
    let mut out = Vec::new();
    for e in blue.iter().chain(red.iter()) {
        if seen.contains(&e.id) {
            continue;
        }
        // Walk backwards through e.u to find a path end, or detect a cycle.
        let mut cur = *e;
        let mut x = e.u;
        let mut cycle = false;
        while let Some(f) = step(&cur, x) {
            if f.id == e.id {
                cycle = true;
                break;
            }
            x = f.other(x);
            cur = f;
        }
        let mut seq = Vec::new();
        if cycle {
            let mut cur = *e;
            let mut x = e.v;
            loop {
                seq.push(cur);
                let f = step(&cur, x).expect("cycle continues");
                if f.id == e.id {
                    break;
                }
                x = f.other(x);
                cur = f;
            }
            if !is_blue.contains(&seq[0].id) {
                seq.rotate_left(1);
            }
        } else {
            // `cur` is the end edge and `x` its free endpoint.
            let mut y = cur.other(x);
            loop {
                seq.push(cur);
                match step(&cur, y) {
                    Some(f) => {
                        y = f.other(y);
                        cur = f;
                    }
                    None => break,
                }
            }
        }
        for f in &seq {
            seen.insert(f.id);
        }
        let mut pairs: Vec<Pair> = Vec::with_capacity(seq.len() / 2 + 1);
        let mut it = seq.into_iter().peekable();
        while let Some(f) = it.next() {
            if is_blue.contains(&f.id) {
                let r = it.next_if(|g| !is_blue.contains(&g.id));
                pairs.push((Some(f), r));
            } else {
                pairs.push((None, Some(f)));
            }
        }
        let kind = if cycle { ComponentKind::Cycle } else { ComponentKind::Path };
        out.push(AlternatingComponent { kind, pairs });
    }
    out
}

/// Positive colored weight first, then negative, then zero; stable within each class.
pub fn order_components(comps: Vec<AlternatingComponent>) -> Vec<AlternatingComponent> {
    let (mut pos, mut neg, mut zero) = (Vec::new(), Vec::new(), Vec::new());
    for c in comps {
        let w = c.colored_weight();
        if w > 0.0 {
            pos.push(c);
        } else if w < 0.0 {
            neg.push(c);
        } else {
            zero.push(c);
        }
    }
    pos.extend(neg);
    pos.extend(zero);
    pos
}

/// Running sums of `credit + c(component)` over an ordered component list.
pub fn credited_prefix_sums(comps: &[AlternatingComponent], credit: f64) -> Vec<f64> {
    let mut acc = credit;
    comps
        .iter()
        .map(|c| {
            acc += c.colored_weight();
            acc
        })
        .collect()
}

/// Smallest index in `0..=k` minimizing `credit + c_i`.
pub fn prefix_min_index(comp: &AlternatingComponent, credit: f64) -> usize {
    let mut best = 0;
    let mut best_v = f64::INFINITY;
    for (i, c) in comp.prefix_sums().into_iter().enumerate() {
        let v = credit + c;
        if v < best_v {
            best_v = v;
            best = i;
        }
    }
    best
}

/// Which part of a component a run covers. Indices are 1-based pair positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunRange {
    Whole,
    /// Pairs `i+1..=k`.
    Suffix(usize),
    /// Pairs `1..=i`.
    Prefix(usize),
    /// A cycle started at pair `i+1` and wrapped around.
    Rotated(usize),
}

/// Ops of one loop iteration, with the weight of the following blue edge
/// if this iteration removed it.
#[derive(Clone, Debug, PartialEq)]
pub struct Iteration {
    pub ops: Vec<ChangeOp>,
    pub next_blue: Option<f64>,
}

/// Emits the iterations for `range`. `removed` tracks blue slots already
/// removed from this component by earlier runs.
pub fn replace_blue_red(
    comp: &AlternatingComponent,
    range: RunRange,
    removed: &mut Vec<bool>,
) -> Result<Vec<Iteration>, MwmError> {
    let k = comp.len();
    let bad = || MwmError::BadRange { range, kind: comp.kind, k };
    let order: Vec<usize> = match range {
        RunRange::Whole => (0..k).collect(),
        RunRange::Suffix(i) if i <= k && comp.kind == ComponentKind::Path => (i..k).collect(),
        RunRange::Prefix(i) if i <= k && comp.kind == ComponentKind::Path => (0..i).collect(),
        RunRange::Rotated(i) if i < k && comp.kind == ComponentKind::Cycle => (i..k).chain(0..i).collect(),
        _ => return Err(bad()),
    };
    if removed.len() != k {
        *removed = vec![false; k];
    }
    let mut out = Vec::with_capacity(order.len());
    for j in order {
        let (b, r) = comp.pairs[j];
        let mut ops = Vec::with_capacity(3);
        if let Some(b) = b {
            if !removed[j] {
                removed[j] = true;
                ops.push(ChangeOp::remove(&b));
            }
        }
        if let Some(r) = r {
            ops.push(ChangeOp::add(&r));
        }
        let mut next_blue = None;
        if let Some(n) = comp.next_index(j) {
            if let (Some(b), false) = (comp.pairs[n].0, removed[n]) {
                removed[n] = true;
                ops.push(ChangeOp::remove(&b));
                next_blue = Some(b.w);
            }
        }
        out.push(Iteration { ops, next_blue });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MwmOptions {
    /// Eagerly add target edges heavier than their current neighbors first.
    pub pre_pass: bool,
}

impl Default for MwmOptions {
    fn default() -> Self {
        MwmOptions { pre_pass: true }
    }
}

fn check_eps(eps: f64) -> Result<(), MwmError> {
    if eps > 0.0 && eps <= 0.5 {
        Ok(())
    } else {
        Err(MwmError::Epsilon(eps))
    }
}

fn check_inputs(g: &Graph, source: &Matching, target: &Matching) -> Result<(), MwmError> {
    match source.validate(g) {
        ValidityReport::Ok => {}
        r => return Err(MwmError::InvalidSource(r)),
    }
    match target.validate(g) {
        ValidityReport::Ok => Ok(()),
        r => Err(MwmError::InvalidTarget(r)),
    }
}

/// Plans `source -> superset of target` for `w(target) > w(source)`.
pub fn plan_mwm(g: &Graph, source: &Matching, target: &Matching, eps: f64) -> Result<Script, MwmError> {
    plan_mwm_with(g, source, target, eps, MwmOptions::default())
}

pub fn plan_mwm_with(
    g: &Graph,
    source: &Matching,
    target: &Matching,
    eps: f64,
    opts: MwmOptions,
) -> Result<Script, MwmError> {
    check_eps(eps)?;
    check_inputs(g, source, target)?;
    if target.weight() <= source.weight() {
        return Err(MwmError::NotImproving { from: source.weight(), to: target.weight() });
    }
    Ok(plan_unchecked(source, target, eps, opts))
}

/// Plans in whichever direction is needed. A lighter target is handled by
/// planning the swapped pair and reversing the script, so the quality
/// floors then refer to the target.
pub fn plan_mwm_any(g: &Graph, source: &Matching, target: &Matching, eps: f64) -> Result<Script, MwmError> {
    check_eps(eps)?;
    check_inputs(g, source, target)?;
    if target.weight() < source.weight() {
        Ok(plan_unchecked(target, source, eps, MwmOptions::default()).reversed())
    } else {
        Ok(plan_unchecked(source, target, eps, MwmOptions::default()))
    }
}

/// Target edges strictly heavier than the current edges they touch.
fn pre_pass(current: &mut Matching, target: &Matching, script: &mut Script) {
    let mut target_at: HashMap<VertexId, Edge> = HashMap::with_capacity(2 * target.len());
    for t in target.iter() {
        target_at.insert(t.u, *t);
        target_at.insert(t.v, *t);
    }
    let mut queue: VecDeque<Edge> = target.iter().filter(|t| !current.contains(t.id)).copied().collect();
    while let Some(r) = queue.pop_front() {
        if current.contains(r.id) {
            continue;
        }
        let nbrs: Vec<Edge> = [r.u, r.v].iter().filter_map(|&x| current.edge_at(x).copied()).collect();
        let nw: f64 = nbrs.iter().map(|e| e.w).sum();
        if r.w <= nw {
            continue;
        }
        let mut ops = vec![ChangeOp::add(&r)];
        for n in &nbrs {
            current.remove(n.id);
            ops.push(ChangeOp::remove(n));
            let y = if r.touches(n.u) { n.v } else { n.u };
            if let Some(t) = target_at.get(&y) {
                if t.id != r.id {
                    queue.push_back(*t);
                }
            }
        }
        current.insert(r).expect("neighbors removed");
        script.push_phase(ops);
    }
}

fn plan_unchecked(source: &Matching, target: &Matching, eps: f64, opts: MwmOptions) -> Script {
    let mut script = Script::new(Problem::Mwm, Some(eps), declared_budget(Problem::Mwm, Some(eps)));
    let mut current = source.clone();
    if opts.pre_pass {
        pre_pass(&mut current, target, &mut script);
    }
    let light = eps * source.weight();
    let mut credit = current.weight() - source.weight();
    let comps = order_components(decompose(&current, target));
    if cfg!(debug_assertions) {
        let slack = -1e-9 * source.weight().max(1.0);
        assert!(
            credited_prefix_sums(&comps, credit).iter().all(|&s| s >= slack) || target.weight() < source.weight(),
            "credited prefix sums went negative"
        );
    }

    let mut phase: Vec<ChangeOp> = Vec::new();
    for comp in &comps {
        let c = comp.prefix_sums();
        let i_min = prefix_min_index(comp, credit);
        let runs: Vec<RunRange> = if credit + c[i_min] >= 0.0 {
            vec![RunRange::Whole]
        } else {
            match comp.kind {
                ComponentKind::Path => vec![RunRange::Suffix(i_min), RunRange::Prefix(i_min)],
                ComponentKind::Cycle => vec![RunRange::Rotated(i_min)],
            }
        };
        let mut removed = vec![false; comp.len()];
        for range in runs {
            let iters = replace_blue_red(comp, range, &mut removed).expect("planner ranges are well formed");
            let last = iters.len().saturating_sub(1);
            for (n, it) in iters.into_iter().enumerate() {
                phase.extend(it.ops);
                let cut = n == last || it.next_blue.is_none_or(|w| w < light);
                if cut {
                    script.push_phase(std::mem::take(&mut phase));
                }
            }
        }
        credit += comp.colored_weight();
    }
    script.push_phase(phase);
    script
}
