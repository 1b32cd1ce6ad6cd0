//! Path-growing adversaries that force recourse on near-optimal matchers.
//!
//! Each copy is a path grown by appending edges alternately at its right and
//! left ends. At odd edge counts the path has a unique maximum matching, and
//! any two consecutive such lengths share no matched edge, so an exact
//! matcher must rematch the whole copy every second insertion.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, UpdateEvent, VertexId};
use crate::solution::Matching;
use crate::wrapper::sim::{step, OptCheck, SimError, TraceRow};
use crate::wrapper::{
    wrap, BatchRecompute, DynamicMatcher, ExactMaintainer, GreedyMaximal, Mode, WrapperConfig, WrapperError,
    ZeroRecourse,
};

/// Path scale constant: `l = max(1, floor(PATH_FACTOR / eps))`.
pub const PATH_FACTOR: f64 = 1.0 / 8.0;
/// Copy count constant: `n' = max(1, floor(COPY_FACTOR * eps * n))`.
pub const COPY_FACTOR: f64 = 0.5;

#[derive(Debug, Error)]
pub enum AdversaryError {
    #[error("epsilon {0} must be in (0, 1)")]
    Epsilon(f64),
    #[error("a path of {need} vertices does not fit in n = {n}")]
    Infeasible { need: usize, n: usize },
    #[error("unknown subject {0:?}")]
    UnknownSubject(String),
    #[error(transparent)]
    Wrapper(#[from] WrapperError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

pub fn path_scale(eps: f64) -> usize {
    ((PATH_FACTOR / eps).floor() as usize).max(1)
}

pub fn copy_count(eps: f64, n: usize) -> usize {
    ((COPY_FACTOR * eps * n as f64).floor() as usize).max(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryMode {
    FullyDynamic,
    Incremental,
    Decremental,
}

impl FromStr for AdversaryMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "full" => Ok(AdversaryMode::FullyDynamic),
            "incr" => Ok(AdversaryMode::Incremental),
            "decr" => Ok(AdversaryMode::Decremental),
            _ => Err(format!("unknown mode {s:?} (expected full, incr or decr)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CopyState {
    Empty,
    InProgress,
    Suspended,
    Incomplete,
    Complete,
}

/// A copy whose restricted matching was not maximum when checked.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub copy: usize,
    pub path_edges: usize,
    pub restricted_size: usize,
    pub maximum: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdversaryRun {
    pub epsilon: f64,
    pub mode: AdversaryMode,
    pub path_scale: usize,
    pub copies: Vec<CopyState>,
    /// Counted updates (preloaded insertions of the decremental mode are not counted).
    pub updates: usize,
    pub recourse: usize,
    /// Updates that move a path between `2l - 1` and `4l - 1` edges.
    pub growth_updates: usize,
    pub growth_recourse: usize,
    pub witnesses: Vec<Witness>,
}

impl AdversaryRun {
    /// Total recourse per edge update over the counted stream.
    pub fn amortized_recourse(&self) -> f64 {
        ratio(self.recourse, self.updates)
    }

    pub fn growth_amortized_recourse(&self) -> f64 {
        ratio(self.growth_recourse, self.growth_updates)
    }

    /// `eps` times the amortized recourse.
    pub fn kappa(&self) -> f64 {
        self.epsilon * self.amortized_recourse()
    }

    pub fn growth_kappa(&self) -> f64 {
        self.epsilon * self.growth_amortized_recourse()
    }

    pub fn complete_fraction(&self) -> f64 {
        let done = self.copies.iter().filter(|&&c| c == CopyState::Complete).count();
        ratio(done, self.copies.len())
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

impl fmt::Display for AdversaryRun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "mode={:?} eps={} l={} copies={} complete={:.3} updates={} amortized={:.4} kappa={:.4} growth_amortized={:.4} growth_kappa={:.4}",
            self.mode,
            self.epsilon,
            self.path_scale,
            self.copies.len(),
            self.complete_fraction(),
            self.updates,
            self.amortized_recourse(),
            self.kappa(),
            self.growth_amortized_recourse(),
            self.growth_kappa(),
        )
    }
}

/// Builds a named subject: `exact`, `greedy`, `zero`, `batch`, or
/// `wrapped:<inner>` around `greedy` or `batch`.
pub fn subject_by_name(name: &str, eps: f64, seed: u64) -> Result<Box<dyn DynamicMatcher>, AdversaryError> {
    if let Some(inner) = name.strip_prefix("wrapped:") {
        let inner: Box<dyn crate::wrapper::InnerAlgorithm> = match inner {
            "greedy" => Box::new(GreedyMaximal::new()),
            "batch" => Box::new(BatchRecompute::new(0.5, seed)),
            "exact" => Box::new(ExactMaintainer::new()),
            _ => return Err(AdversaryError::UnknownSubject(name.into())),
        };
        return Ok(Box::new(wrap(inner, WrapperConfig::new(eps, Mode::Unweighted))?));
    }
    Ok(match name {
        "exact" => Box::new(ExactMaintainer::new()),
        "greedy" => Box::new(GreedyMaximal::new()),
        "zero" => Box::<ZeroRecourse>::default(),
        "batch" => Box::new(BatchRecompute::new(0.5, seed)),
        _ => return Err(AdversaryError::UnknownSubject(name.into())),
    })
}

fn check_params(eps: f64, n: usize, l: usize) -> Result<(), AdversaryError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(AdversaryError::Epsilon(eps));
    }
    if 4 * l > n {
        return Err(AdversaryError::Infeasible { need: 4 * l, n });
    }
    Ok(())
}

/// A path under construction on its own block of `4l` vertex ids.
#[derive(Clone, Debug)]
struct PathCopy {
    base: VertexId,
    /// Vertex ids in path order.
    order: std::collections::VecDeque<VertexId>,
    next_right: bool,
    state: CopyState,
}

impl PathCopy {
    fn new(base: VertexId) -> Self {
        PathCopy { base, order: [base].into(), next_right: true, state: CopyState::Empty }
    }

    fn edges(&self) -> usize {
        self.order.len() - 1
    }

    /// The next insertion, applied to the local bookkeeping.
    fn grow(&mut self) -> UpdateEvent {
        let fresh = self.base + self.order.len() as VertexId;
        let anchor = if self.next_right {
            let a = *self.order.back().unwrap();
            self.order.push_back(fresh);
            a
        } else {
            let a = *self.order.front().unwrap();
            self.order.push_front(fresh);
            a
        };
        self.next_right = !self.next_right;
        UpdateEvent::InsertEdge { u: anchor, v: fresh, w: 1.0 }
    }

    /// Undoes the last `grow`, returning the deletion.
    fn shrink(&mut self) -> UpdateEvent {
        self.next_right = !self.next_right;
        let (gone, anchor) = if self.next_right {
            let g = self.order.pop_back().unwrap();
            (g, *self.order.back().unwrap())
        } else {
            let g = self.order.pop_front().unwrap();
            (g, *self.order.front().unwrap())
        };
        UpdateEvent::DeleteEdge { u: anchor, v: gone }
    }

    /// Matched path edges and the maximum size. For an odd edge count the
    /// second value is reached only by the alternate edges from one end.
    fn restricted(&self, m: &Matching) -> (usize, usize, bool) {
        let mut size = 0;
        let mut unique = true;
        for (i, pair) in self.order.iter().zip(self.order.iter().skip(1)).enumerate() {
            let matched = m.edge_at(*pair.0).is_some_and(|e| e.other(*pair.0) == *pair.1);
            size += matched as usize;
            if matched != (i % 2 == 0) {
                unique = false;
            }
        }
        let k = self.edges();
        (size, k.div_ceil(2), unique)
    }
}

fn in_growth(k_after: usize, l: usize) -> bool {
    (2 * l..4 * l).contains(&k_after)
}

struct Recorder<'a> {
    g: Graph,
    alg: &'a mut dyn DynamicMatcher,
    rows: Vec<TraceRow>,
    counted: usize,
    recourse: usize,
    growth_updates: usize,
    growth_recourse: usize,
}

impl Recorder<'_> {
    fn feed(&mut self, ev: &UpdateEvent, counted: bool, growth: bool) -> Result<(), AdversaryError> {
        let row = step(&mut self.g, self.alg, self.rows.len(), ev, OptCheck::Off)?;
        if counted {
            self.counted += 1;
            self.recourse += row.recourse();
            if growth {
                self.growth_updates += 1;
                self.growth_recourse += row.recourse();
            }
        }
        self.rows.push(row);
        Ok(())
    }
}

/// Non-adaptive stream: per round, grow one path to `4l - 1` edges and
/// delete it again. The flag marks updates of the growth regime.
pub fn gen_fully_dynamic(eps: f64, rounds: usize, n: usize) -> Result<Vec<(UpdateEvent, bool)>, AdversaryError> {
    let l = path_scale(eps);
    check_params(eps, n, l)?;
    let mut out = Vec::new();
    for _ in 0..rounds {
        let mut p = PathCopy::new(0);
        for _ in 0..4 * l - 1 {
            let ev = p.grow();
            out.push((ev, in_growth(p.edges(), l)));
        }
        while p.edges() > 0 {
            out.push((p.shrink(), false));
        }
    }
    Ok(out)
}

pub fn run_fully_dynamic(
    alg: &mut dyn DynamicMatcher,
    eps: f64,
    rounds: usize,
    n: usize,
) -> Result<(Vec<TraceRow>, AdversaryRun), AdversaryError> {
    let stream = gen_fully_dynamic(eps, rounds, n)?;
    let mut rec = Recorder {
        g: Graph::new(),
        alg,
        rows: Vec::new(),
        counted: 0,
        recourse: 0,
        growth_updates: 0,
        growth_recourse: 0,
    };
    for (ev, growth) in &stream {
        rec.feed(ev, true, *growth)?;
    }
    let run = AdversaryRun {
        epsilon: eps,
        mode: AdversaryMode::FullyDynamic,
        path_scale: path_scale(eps),
        copies: vec![CopyState::Complete; rounds],
        updates: rec.counted,
        recourse: rec.recourse,
        growth_updates: rec.growth_updates,
        growth_recourse: rec.growth_recourse,
        witnesses: Vec::new(),
    };
    Ok((rec.rows, run))
}

/// Adaptive incremental adversary over `n' = copy_count(eps, n)` copies.
///
/// While a copy is past `2l - 1` edges it is checked at every odd length; a
/// copy whose restricted matching is not the unique maximum one is halted
/// and pushed on a stack. After every insertion the top halted copy is
/// re-examined and, if its matching has become maximum, resumed while the
/// running copy is suspended.
pub fn run_incremental_adversary(
    alg: &mut dyn DynamicMatcher,
    eps: f64,
    n: usize,
) -> Result<(Vec<TraceRow>, AdversaryRun), AdversaryError> {
    let l = path_scale(eps);
    check_params(eps, n, l)?;
    let block = 4 * l;
    let count = copy_count(eps, n).min(n / block).max(1);
    let mut copies: Vec<PathCopy> = (0..count).map(|i| PathCopy::new((i * block) as VertexId)).collect();
    let mut rec = Recorder {
        g: Graph::new(),
        alg,
        rows: Vec::new(),
        counted: 0,
        recourse: 0,
        growth_updates: 0,
        growth_recourse: 0,
    };
    let mut witnesses = Vec::new();
    let mut halted: Vec<usize> = Vec::new();
    let mut suspended: Vec<usize> = Vec::new();
    let mut fresh = 0usize;
    let mut current: Option<usize> = None;

    loop {
        let cur = match current {
            Some(c) => c,
            None => {
                let top_ok = halted.last().is_some_and(|&h| copies[h].restricted(rec.alg.matching()).2);
                if top_ok {
                    halted.pop().unwrap()
                } else if let Some(s) = suspended.pop() {
                    s
                } else if fresh < count {
                    fresh += 1;
                    fresh - 1
                } else {
                    break;
                }
            }
        };
        current = Some(cur);
        copies[cur].state = CopyState::InProgress;

        let ev = copies[cur].grow();
        let k = copies[cur].edges();
        rec.feed(&ev, true, in_growth(k, l))?;

        if k % 2 == 1 && k >= 2 * l - 1 {
            let (size, max, unique) = copies[cur].restricted(rec.alg.matching());
            if !unique {
                witnesses.push(Witness { copy: cur, path_edges: k, restricted_size: size, maximum: max });
                copies[cur].state = CopyState::Incomplete;
                halted.push(cur);
                current = None;
                continue;
            }
            if k == 4 * l - 1 {
                copies[cur].state = CopyState::Complete;
                current = None;
                continue;
            }
        }
        if let Some(&h) = halted.last() {
            if copies[h].restricted(rec.alg.matching()).2 {
                halted.pop();
                copies[cur].state = CopyState::Suspended;
                suspended.push(cur);
                current = Some(h);
            }
        }
    }

    let run = AdversaryRun {
        epsilon: eps,
        mode: AdversaryMode::Incremental,
        path_scale: l,
        copies: copies.iter().map(|c| c.state).collect(),
        updates: rec.counted,
        recourse: rec.recourse,
        growth_updates: rec.growth_updates,
        growth_recourse: rec.growth_recourse,
        witnesses,
    };
    Ok((rec.rows, run))
}

/// Mirror of the incremental construction: all copies are inserted up front
/// (uncounted), then deleted in exact reverse insertion order.
pub fn run_decremental_adversary(
    alg: &mut dyn DynamicMatcher,
    eps: f64,
    n: usize,
) -> Result<(Vec<TraceRow>, AdversaryRun), AdversaryError> {
    let l = path_scale(eps);
    check_params(eps, n, l)?;
    let block = 4 * l;
    let count = copy_count(eps, n).min(n / block).max(1);
    let mut copies: Vec<PathCopy> = (0..count).map(|i| PathCopy::new((i * block) as VertexId)).collect();
    let mut rec = Recorder {
        g: Graph::new(),
        alg,
        rows: Vec::new(),
        counted: 0,
        recourse: 0,
        growth_updates: 0,
        growth_recourse: 0,
    };
    for c in copies.iter_mut() {
        for _ in 0..4 * l - 1 {
            let ev = c.grow();
            rec.feed(&ev, false, false)?;
        }
    }
    let mut witnesses = Vec::new();
    for (i, c) in copies.iter_mut().enumerate().rev() {
        c.state = CopyState::Complete;
        while c.edges() > 0 {
            let before = c.edges();
            let ev = c.shrink();
            rec.feed(&ev, true, in_growth(before, l))?;
            let k = c.edges();
            if k % 2 == 1 && k >= 2 * l - 1 {
                let (size, max, unique) = c.restricted(rec.alg.matching());
                if !unique {
                    witnesses.push(Witness { copy: i, path_edges: k, restricted_size: size, maximum: max });
                    c.state = CopyState::Incomplete;
                }
            }
        }
    }
    let run = AdversaryRun {
        epsilon: eps,
        mode: AdversaryMode::Decremental,
        path_scale: l,
        copies: copies.iter().map(|c| c.state).collect(),
        updates: rec.counted,
        recourse: rec.recourse,
        growth_updates: rec.growth_updates,
        growth_recourse: rec.growth_recourse,
        witnesses,
    };
    Ok((rec.rows, run))
}

pub fn run_adversary(
    mode: AdversaryMode,
    alg: &mut dyn DynamicMatcher,
    eps: f64,
    n: usize,
    rounds: usize,
) -> Result<(Vec<TraceRow>, AdversaryRun), AdversaryError> {
    match mode {
        AdversaryMode::FullyDynamic => run_fully_dynamic(alg, eps, rounds, n),
        AdversaryMode::Incremental => run_incremental_adversary(alg, eps, n),
        AdversaryMode::Decremental => run_decremental_adversary(alg, eps, n),
    }
}
