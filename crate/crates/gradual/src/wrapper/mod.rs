//! Recourse-bounding wrapper for dynamic matching algorithms.
//!
//! The wrapper keeps its own output matching and, in back-to-back windows,
//! gradually moves it toward a snapshot of the inner algorithm's matching.
//! A window over a current output `M` lasts `L = max(1, floor(eps |M|))`
//! updates: the first half classifies the snapshot edges, the second half
//! executes phases. Host deletions are applied immediately; insertions never
//! touch the output directly.

pub mod inner;
pub mod sim;

use std::collections::{HashMap, HashSet, VecDeque};

use crate::graph::{DeltaReport, Edge, EdgeId, Graph, VertexId};
use crate::mcm::McmPlanner;
use crate::mwm::plan_mwm;
use crate::script::{OpKind, Phase};
use crate::solution::{validate_matching, Matching};

pub use inner::{
    BatchRecompute, DynamicMatcher, ExactMaintainer, GreedyMaximal, InnerAlgorithm, OutputDelta, WrapperError,
    ZeroRecourse,
};

pub const EPSILON_MAX: f64 = 0.4;
pub const DEFAULT_SMALL_FACTOR: usize = 12;
pub const RECOURSE_FACTOR: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    Unweighted,
    /// `psi` bounds the aspect ratio of every graph in the update sequence.
    Weighted {
        psi: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WrapperConfig {
    pub epsilon: f64,
    pub mode: Mode,
    /// Windows where `|M| + |M''| <= small_factor * q` switch instantly.
    pub small_factor: usize,
}

impl WrapperConfig {
    pub fn new(epsilon: f64, mode: Mode) -> Self {
        WrapperConfig { epsilon, mode, small_factor: DEFAULT_SMALL_FACTOR }
    }

    /// Recourse unit: `ceil(1/eps)`, or `ceil(psi/eps)` when weighted.
    pub fn unit(&self) -> usize {
        match self.mode {
            Mode::Unweighted => (1.0 / self.epsilon).ceil() as usize,
            Mode::Weighted { psi } => (psi / self.epsilon).ceil() as usize,
        }
    }

    pub fn recourse_budget(&self) -> usize {
        RECOURSE_FACTOR * self.unit()
    }

    /// Window length for a current output of `m` edges.
    pub fn window_length(&self, m: usize) -> usize {
        let base = ((self.epsilon * m as f64).floor() as usize).max(1);
        match self.mode {
            Mode::Unweighted => base,
            Mode::Weighted { psi } => ((base as f64 / psi).floor() as usize).max(1),
        }
    }

    /// Snapshot cap: twice the output, but never below `4q`.
    pub fn truncation_cap(&self, m: usize) -> usize {
        (2 * m).max(4 * self.unit())
    }
}

/// Up to `cap` edges of the inner matching.
pub fn snapshot_truncated(inner: &dyn InnerAlgorithm, cap: usize) -> Vec<Edge> {
    inner.emit_edges(cap)
}

enum Work {
    Mcm { planner: Box<McmPlanner>, targets: HashMap<(VertexId, VertexId), Edge> },
    Mwm { phases: VecDeque<Phase>, edges: HashMap<(VertexId, VertexId), Edge>, dead: HashSet<EdgeId> },
    Idle,
}

struct Window {
    length: usize,
    elapsed: usize,
    first_half: usize,
    classify_quota: usize,
    op_quota: usize,
    work: Work,
}

/// Per-window facts, kept for reporting.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowRecord {
    pub opened_at: usize,
    pub length: usize,
    pub source_size: usize,
    pub target_size: usize,
    pub skipped: bool,
}

pub struct Wrapped {
    inner: Box<dyn InnerAlgorithm>,
    cfg: WrapperConfig,
    output: Matching,
    window: Option<Window>,
    step: usize,
    phase_tag: &'static str,
    windows: Vec<WindowRecord>,
    over_budget: Vec<(usize, usize)>,
}

/// Wraps `inner`. Fails if `epsilon` is outside `(0, 0.4]` or `psi < 1`.
pub fn wrap(inner: Box<dyn InnerAlgorithm>, cfg: WrapperConfig) -> Result<Wrapped, WrapperError> {
    if !(cfg.epsilon > 0.0 && cfg.epsilon <= EPSILON_MAX) {
        return Err(WrapperError::Epsilon(cfg.epsilon, EPSILON_MAX));
    }
    if let Mode::Weighted { psi } = cfg.mode {
        if psi.is_nan() || psi < 1.0 || !psi.is_finite() {
            return Err(WrapperError::Psi(psi));
        }
    }
    Ok(Wrapped {
        inner,
        cfg,
        output: Matching::new(),
        window: None,
        step: 0,
        phase_tag: "idle",
        windows: Vec::new(),
        over_budget: Vec::new(),
    })
}

impl Wrapped {
    pub fn config(&self) -> &WrapperConfig {
        &self.cfg
    }

    pub fn inner(&self) -> &dyn InnerAlgorithm {
        self.inner.as_ref()
    }

    pub fn windows(&self) -> &[WindowRecord] {
        &self.windows
    }

    /// Steps whose recourse went over the budget, with the recourse seen.
    pub fn over_budget(&self) -> &[(usize, usize)] {
        &self.over_budget
    }

    fn open_window(&mut self, g: &Graph, out: &mut OutputDelta) -> Result<(), WrapperError> {
        let m = self.output.len();
        let snap = snapshot_truncated(self.inner.as_ref(), self.cfg.truncation_cap(m));
        let report = validate_matching(g, &snap);
        if !report.is_ok() {
            return Err(WrapperError::Contract(report.to_string()));
        }
        let target = Matching::from_edges(snap.iter().copied()).map_err(|e| WrapperError::Contract(e.to_string()))?;
        let q = self.cfg.unit();
        let length = self.cfg.window_length(m);
        let mut record =
            WindowRecord { opened_at: self.step, length, source_size: m, target_size: target.len(), skipped: false };

        if m + target.len() <= self.cfg.small_factor * q {
            let swap = OutputDelta::between(&self.output, &target);
            out.added.extend(swap.added);
            out.removed.extend(swap.removed);
            self.output = target;
            record.skipped = true;
            self.windows.push(record);
            self.phase_tag = "switch";
            return Ok(());
        }

        let first_half = length / 2;
        let second_half = length - first_half;
        let (work, total_ops) = match self.cfg.mode {
            Mode::Unweighted => {
                let targets = target.iter().map(|e| (e.key(), *e)).collect();
                let total = m + target.len();
                (Work::Mcm { planner: Box::new(McmPlanner::new(self.output.clone(), &target)), targets }, total)
            }
            Mode::Weighted { .. } => {
                if target.weight() <= self.output.weight() {
                    (Work::Idle, 0)
                } else {
                    let script = plan_mwm(g, &self.output, &target, self.cfg.epsilon)
                        .map_err(|e| WrapperError::Contract(e.to_string()))?;
                    let edges = self.output.iter().chain(target.iter()).map(|e| (e.key(), *e)).collect();
                    let total = script.op_count();
                    (Work::Mwm { phases: script.phases.into(), edges, dead: HashSet::new() }, total)
                }
            }
        };
        let classify_quota = if first_half == 0 { usize::MAX } else { target.len().div_ceil(first_half) };
        let op_quota = total_ops.div_ceil(second_half).max(1);
        self.windows.push(record);
        self.window = Some(Window { length, elapsed: 0, first_half, classify_quota, op_quota, work });
        Ok(())
    }

    fn tombstone(&mut self, delta: &DeltaReport, out: &mut OutputDelta) {
        for e in &delta.removed {
            if let Some(x) = self.output.remove(e.id) {
                out.removed.push(x);
            }
            if let Some(w) = self.window.as_mut() {
                match &mut w.work {
                    Work::Mcm { planner, .. } => {
                        planner.delete_edge(e.id);
                    }
                    Work::Mwm { dead, .. } => {
                        dead.insert(e.id);
                    }
                    Work::Idle => {}
                }
            }
        }
    }

    fn advance(&mut self, out: &mut OutputDelta) {
        let Some(w) = self.window.as_mut() else { return };
        if w.elapsed < w.first_half {
            self.phase_tag = "classify";
            if let Work::Mcm { planner, .. } = &mut w.work {
                planner.classify_step(w.classify_quota);
            }
        } else {
            self.phase_tag = "transform";
            let mut done = 0;
            match &mut w.work {
                Work::Mcm { planner, targets } => {
                    planner.classify_step(usize::MAX);
                    while done < w.op_quota {
                        let Some(ops) = planner.next_phase() else { break };
                        done += ops.len();
                        for op in ops.iter().filter(|o| o.op == OpKind::Remove) {
                            let e = *self.output.edge_at(op.u).expect("planner removes output edges");
                            self.output.remove(e.id);
                            out.removed.push(e);
                        }
                        for op in ops.iter().filter(|o| o.op == OpKind::Add) {
                            let e = targets[&op.key()];
                            self.output.insert(e).expect("phase end is a matching");
                            out.added.push(e);
                        }
                    }
                }
                Work::Mwm { phases, edges, dead } => {
                    while done < w.op_quota {
                        let Some(phase) = phases.pop_front() else { break };
                        done += phase.ops.len();
                        for op in phase.ops.iter().filter(|o| o.op == OpKind::Remove) {
                            let e = edges[&op.key()];
                            if self.output.remove(e.id).is_some() {
                                out.removed.push(e);
                            }
                        }
                        for op in phase.ops.iter().filter(|o| o.op == OpKind::Add) {
                            let e = edges[&op.key()];
                            if !dead.contains(&e.id) {
                                self.output.insert(e).expect("phase end is a matching");
                                out.added.push(e);
                            }
                        }
                    }
                }
                Work::Idle => {}
            }
        }
        w.elapsed += 1;
        if w.elapsed >= w.length {
            let finished = match &w.work {
                Work::Mcm { planner, .. } => !planner.pending(),
                Work::Mwm { phases, .. } => phases.is_empty(),
                Work::Idle => true,
            };
            debug_assert!(finished, "window closed with work left");
            self.window = None;
        }
    }
}

/// Cancels an add and a remove of the same edge within one step.
fn net(out: OutputDelta) -> OutputDelta {
    let added: HashSet<EdgeId> = out.added.iter().map(|e| e.id).collect();
    let removed: HashSet<EdgeId> = out.removed.iter().map(|e| e.id).collect();
    OutputDelta {
        added: out.added.into_iter().filter(|e| !removed.contains(&e.id)).collect(),
        removed: out.removed.into_iter().filter(|e| !added.contains(&e.id)).collect(),
    }
}

impl DynamicMatcher for Wrapped {
    fn name(&self) -> String {
        format!("wrapped:{}", self.inner.name())
    }

    fn handle_update(&mut self, g: &Graph, delta: &DeltaReport) -> Result<OutputDelta, WrapperError> {
        self.inner.handle_update(g, delta)?;
        let mut out = OutputDelta::default();
        self.tombstone(delta, &mut out);
        if self.window.is_none() {
            self.open_window(g, &mut out)?;
        }
        self.advance(&mut out);
        let out = net(out);
        if out.recourse() > self.cfg.recourse_budget() {
            self.over_budget.push((self.step, out.recourse()));
        }
        self.step += 1;
        Ok(out)
    }

    fn matching(&self) -> &Matching {
        &self.output
    }

    fn declared_approx(&self) -> f64 {
        let e = self.cfg.epsilon;
        let base = self.inner.beta() * (1.0 + 2.0 * e).powi(2);
        match self.cfg.mode {
            Mode::Unweighted => base,
            Mode::Weighted { .. } => base / (1.0 - e).powi(2),
        }
    }

    fn inner_size(&self) -> Option<usize> {
        Some(self.inner.matching().len())
    }

    fn window_phase(&self) -> &'static str {
        self.phase_tag
    }
}
