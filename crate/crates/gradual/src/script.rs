//! Phase/operation scripts, deterministic replay, and guarantee checks.

use std::collections::HashMap;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{ordered, Edge, Graph, Tolerance, VertexId};
use crate::solution::{validate_forest, SolutionStats, ValidityReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Mcm,
    Mwm,
    Msf,
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::Mcm => "mcm",
            Problem::Mwm => "mwm",
            Problem::Msf => "msf",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Add,
    Remove,
}

/// One edge change. Endpoints and weight are carried inline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChangeOp {
    pub op: OpKind,
    pub u: VertexId,
    pub v: VertexId,
    pub w: f64,
}

impl ChangeOp {
    pub fn add(e: &Edge) -> Self {
        ChangeOp { op: OpKind::Add, u: e.u, v: e.v, w: e.w }
    }
    pub fn remove(e: &Edge) -> Self {
        ChangeOp { op: OpKind::Remove, u: e.u, v: e.v, w: e.w }
    }
    pub fn inverted(&self) -> Self {
        let op = match self.op {
            OpKind::Add => OpKind::Remove,
            OpKind::Remove => OpKind::Add,
        };
        ChangeOp { op, ..*self }
    }
    pub fn key(&self) -> (VertexId, VertexId) {
        ordered(self.u, self.v)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub ops: Vec<ChangeOp>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Script {
    pub problem: Problem,
    pub epsilon: Option<f64>,
    pub budget: usize,
    pub phases: Vec<Phase>,
    /// Digest of the run manifest that produced this script.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<String>,
}

impl Script {
    pub fn new(problem: Problem, epsilon: Option<f64>, budget: usize) -> Self {
        Script { problem, epsilon, budget, phases: Vec::new(), manifest: None }
    }

    pub fn push_phase(&mut self, ops: Vec<ChangeOp>) {
        if !ops.is_empty() {
            self.phases.push(Phase { ops });
        }
    }

    pub fn op_count(&self) -> usize {
        self.phases.iter().map(|p| p.ops.len()).sum()
    }

    pub fn max_phase_len(&self) -> usize {
        self.phases.iter().map(|p| p.ops.len()).max().unwrap_or(0)
    }

    /// The script that undoes this one, phase by phase.
    pub fn reversed(&self) -> Script {
        let phases = self
            .phases
            .iter()
            .rev()
            .map(|p| Phase { ops: p.ops.iter().rev().map(ChangeOp::inverted).collect() })
            .collect();
        Script { phases, manifest: None, ..self.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("script serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Script, serde_json::Error> {
        serde_json::from_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Granularity {
    PerPhase,
    PerOp,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Snapshot {
    pub boundary_index: usize,
    /// `None` for the initial state.
    pub phase: Option<usize>,
    /// `None` for phase-end snapshots.
    pub op: Option<usize>,
    pub valid: bool,
    pub size: usize,
    pub weight: f64,
}

impl Snapshot {
    pub fn is_phase_end(&self) -> bool {
        self.op.is_none()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplayReport {
    pub problem: Problem,
    pub granularity: Granularity,
    /// Initial state first, then one per phase end, with op-level rows
    /// interleaved when replaying per op.
    pub snapshots: Vec<Snapshot>,
    pub phase_sizes: Vec<usize>,
    pub final_edges: Vec<Edge>,
    /// Index into `snapshots` of the worst point (lowest weight for
    /// matchings, highest for forests), over phase ends only.
    pub worst: usize,
}

impl ReplayReport {
    pub fn phase_ends(&self) -> impl Iterator<Item = &Snapshot> + '_ {
        self.snapshots.iter().filter(|s| s.is_phase_end())
    }

    pub fn final_snapshot(&self) -> &Snapshot {
        self.snapshots.iter().rev().find(|s| s.is_phase_end()).expect("initial snapshot exists")
    }

    /// Whether the final state contains every edge of `target` (by endpoints).
    pub fn final_covers(&self, target: &[Edge]) -> bool {
        let have: std::collections::HashSet<_> = self.final_edges.iter().map(|e| e.key()).collect();
        target.iter().all(|e| have.contains(&e.key()))
    }

    pub fn final_equals(&self, target: &[Edge]) -> bool {
        self.final_edges.len() == target.len() && self.final_covers(target)
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["boundary_index", "phase", "op", "valid", "size", "weight"])?;
        for s in &self.snapshots {
            wr.write_record([
                s.boundary_index.to_string(),
                s.phase.map(|p| p.to_string()).unwrap_or_default(),
                s.op.map(|p| p.to_string()).unwrap_or_default(),
                s.valid.to_string(),
                s.size.to_string(),
                format!("{}", s.weight),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OpFault {
    AddPresent,
    RemoveAbsent,
    NotInGraph,
    WeightMismatch { graph: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReplayError {
    #[error("source is not valid: {0}")]
    InvalidSource(ValidityReport),
    #[error("phase {phase} op {op} on edge ({u},{v}): {fault:?}")]
    Op { phase: usize, op: usize, u: VertexId, v: VertexId, fault: OpFault },
}

/// Edge set under replay. Conflicts are tolerated between boundaries and
/// show up as `valid = false`.
struct ReplayState {
    edges: IndexMap<(VertexId, VertexId), Edge>,
    cover: HashMap<VertexId, u32>,
    overloaded: usize,
    weight: f64,
}

impl ReplayState {
    fn new(source: &[Edge]) -> Self {
        let mut s = ReplayState { edges: IndexMap::new(), cover: HashMap::new(), overloaded: 0, weight: 0.0 };
        for e in source {
            s.add(*e);
        }
        s
    }

    fn add(&mut self, e: Edge) {
        self.edges.insert(e.key(), e);
        self.weight += e.w;
        for x in [e.u, e.v] {
            let c = self.cover.entry(x).or_insert(0);
            *c += 1;
            if *c == 2 {
                self.overloaded += 1;
            }
        }
    }

    fn remove(&mut self, key: (VertexId, VertexId)) -> Option<Edge> {
        let e = self.edges.swap_remove(&key)?;
        self.weight -= e.w;
        for x in [e.u, e.v] {
            let c = self.cover.get_mut(&x).unwrap();
            if *c == 2 {
                self.overloaded -= 1;
            }
            *c -= 1;
        }
        Some(e)
    }

    fn exact_weight(&self) -> f64 {
        self.edges.values().map(|e| e.w).sum()
    }

    fn valid(&self, g: &Graph, problem: Problem, full: bool) -> bool {
        match problem {
            Problem::Mcm | Problem::Mwm => self.overloaded == 0,
            Problem::Msf => {
                if full {
                    let list: Vec<Edge> = self.edges.values().copied().collect();
                    validate_forest(g, &list).is_ok()
                } else {
                    // Op-level forest rows only record acyclicity.
                    let mut uf = crate::solution::UnionFind::new(g.vertex_capacity());
                    self.edges.values().all(|e| uf.union(e.u as usize, e.v as usize))
                }
            }
        }
    }
}

/// Applies `script` to `source` in order and records snapshots.
///
/// Ops are resolved against `g` by endpoint pair. The replay fails on the
/// first op whose precondition does not hold; nothing is skipped.
pub fn replay(
    g: &Graph,
    source: &[Edge],
    script: &Script,
    granularity: Granularity,
    tol: Tolerance,
) -> Result<ReplayReport, ReplayError> {
    let initial_ok = match script.problem {
        Problem::Mcm | Problem::Mwm => crate::solution::validate_matching(g, source),
        Problem::Msf => validate_forest(g, source),
    };
    if !initial_ok.is_ok() {
        return Err(ReplayError::InvalidSource(initial_ok));
    }
    let mut st = ReplayState::new(source);
    let mut snaps = vec![Snapshot {
        boundary_index: 0,
        phase: None,
        op: None,
        valid: true,
        size: st.edges.len(),
        weight: st.exact_weight(),
    }];
    let mut phase_sizes = Vec::with_capacity(script.phases.len());
    for (pi, phase) in script.phases.iter().enumerate() {
        phase_sizes.push(phase.ops.len());
        for (oi, op) in phase.ops.iter().enumerate() {
            let key = op.key();
            let fault = |fault| ReplayError::Op { phase: pi, op: oi, u: key.0, v: key.1, fault };
            let e = *g.edge_between(key.0, key.1).ok_or_else(|| fault(OpFault::NotInGraph))?;
            if !tol.eq(e.w, op.w) {
                return Err(fault(OpFault::WeightMismatch { graph: e.w }));
            }
            match op.op {
                OpKind::Add => {
                    if st.edges.contains_key(&key) {
                        return Err(fault(OpFault::AddPresent));
                    }
                    st.add(e);
                }
                OpKind::Remove => {
                    st.remove(key).ok_or_else(|| fault(OpFault::RemoveAbsent))?;
                }
            }
            if granularity == Granularity::PerOp {
                snaps.push(Snapshot {
                    boundary_index: snaps.len(),
                    phase: Some(pi),
                    op: Some(oi),
                    valid: st.valid(g, script.problem, false),
                    size: st.edges.len(),
                    weight: st.weight,
                });
            }
        }
        // Re-sum at phase ends so float drift does not accumulate.
        st.weight = st.exact_weight();
        snaps.push(Snapshot {
            boundary_index: snaps.len(),
            phase: Some(pi),
            op: None,
            valid: st.valid(g, script.problem, true),
            size: st.edges.len(),
            weight: st.weight,
        });
    }
    let worst = {
        let ends = snaps.iter().enumerate().filter(|(_, s)| s.is_phase_end());
        let pick = match script.problem {
            Problem::Msf => ends.max_by(|a, b| a.1.weight.total_cmp(&b.1.weight)),
            _ => ends.min_by(|a, b| a.1.weight.total_cmp(&b.1.weight)),
        };
        pick.map(|(i, _)| i).unwrap_or(0)
    };
    Ok(ReplayReport {
        problem: script.problem,
        granularity,
        snapshots: snaps,
        phase_sizes,
        final_edges: st.edges.values().copied().collect(),
        worst,
    })
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GuaranteeError {
    #[error("report is for {report} but the check asked for {asked}")]
    ProblemMismatch { report: Problem, asked: Problem },
    #[error("{0} guarantee needs epsilon")]
    MissingEpsilon(Problem),
}

/// Outcome of a guarantee check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Verdict {
    Pass,
    Fail { boundary_index: usize, reason: String },
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

/// Phase budget used by each planner.
pub fn declared_budget(problem: Problem, epsilon: Option<f64>) -> usize {
    match problem {
        Problem::Mcm => 3,
        Problem::Msf => 2,
        Problem::Mwm => {
            let eps = epsilon.unwrap_or(0.5);
            3 * (1.0 / eps).ceil() as usize + 3
        }
    }
}

/// Quality floors for matchings: `(phase_end, op_end)`.
///
/// For mwm the floors reference the lighter of source and target, which is
/// the source for forward scripts and the target for reversed ones.
pub fn matching_floors(
    problem: Problem,
    source: &SolutionStats,
    target: &SolutionStats,
    epsilon: Option<f64>,
) -> Result<(f64, Option<f64>), GuaranteeError> {
    match problem {
        Problem::Mcm => {
            let floor = (source.size as i64).min(target.size as i64 - 1).max(0) as f64;
            Ok((floor, None))
        }
        Problem::Mwm => {
            let eps = epsilon.ok_or(GuaranteeError::MissingEpsilon(Problem::Mwm))?;
            let r = if source.total_weight <= target.total_weight { source } else { target };
            let op_floor = r.total_weight - r.max_edge_weight;
            Ok((op_floor.max((1.0 - eps) * r.total_weight), Some(op_floor)))
        }
        Problem::Msf => Ok((source.total_weight.max(target.total_weight), None)),
    }
}

/// Checks the problem's quality and phase-size guarantees on a replay report.
pub fn check_guarantee(
    report: &ReplayReport,
    source: &SolutionStats,
    target: &SolutionStats,
    problem: Problem,
    epsilon: Option<f64>,
    tol: Tolerance,
) -> Result<Verdict, GuaranteeError> {
    if report.problem != problem {
        return Err(GuaranteeError::ProblemMismatch { report: report.problem, asked: problem });
    }
    let budget = declared_budget(problem, epsilon);
    for (pi, &n) in report.phase_sizes.iter().enumerate() {
        if n == 0 || n > budget {
            let idx = report
                .snapshots
                .iter()
                .find(|s| s.phase == Some(pi) && s.is_phase_end())
                .map(|s| s.boundary_index)
                .unwrap_or(0);
            return Ok(Verdict::Fail {
                boundary_index: idx,
                reason: format!("phase {pi} has {n} ops, budget {budget}"),
            });
        }
    }
    let (phase_floor, op_floor) = matching_floors(problem, source, target, epsilon)?;
    for s in &report.snapshots {
        if s.is_phase_end() {
            if !s.valid {
                return Ok(Verdict::Fail { boundary_index: s.boundary_index, reason: "invalid solution".into() });
            }
            let ok = match problem {
                Problem::Mcm => s.size as f64 >= phase_floor,
                Problem::Mwm => tol.ge(s.weight, phase_floor),
                Problem::Msf => tol.le(s.weight, phase_floor),
            };
            if !ok {
                let reason = match problem {
                    Problem::Mcm => format!("size {} below floor {}", s.size, phase_floor),
                    Problem::Mwm => format!("weight {} below floor {}", s.weight, phase_floor),
                    Problem::Msf => format!("weight {} above ceiling {}", s.weight, phase_floor),
                };
                return Ok(Verdict::Fail { boundary_index: s.boundary_index, reason });
            }
        } else if let Some(f) = op_floor {
            if !tol.ge(s.weight, f) {
                return Ok(Verdict::Fail {
                    boundary_index: s.boundary_index,
                    reason: format!("op-level weight {} below floor {}", s.weight, f),
                });
            }
        }
    }
    Ok(Verdict::Pass)
}

/// Replays per op, checks the guarantee, and checks the final state
/// against the target (superset for matchings, equality for forests).
pub fn verify_script(
    g: &Graph,
    source: &[Edge],
    target: &[Edge],
    script: &Script,
    tol: Tolerance,
) -> Result<(ReplayReport, Verdict), VerifyError> {
    let report = replay(g, source, script, Granularity::PerOp, tol)?;
    let s = SolutionStats::of(source.iter().copied());
    let t = SolutionStats::of(target.iter().copied());
    let mut verdict = check_guarantee(&report, &s, &t, script.problem, script.epsilon, tol)?;
    if verdict.passed() {
        let reached = match script.problem {
            Problem::Msf => report.final_equals(target),
            _ => report.final_covers(target),
        };
        if !reached {
            verdict = Verdict::Fail {
                boundary_index: report.snapshots.len() - 1,
                reason: "final state does not reach the target".into(),
            };
        }
    }
    Ok((report, verdict))
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error(transparent)]
    Guarantee(#[from] GuaranteeError),
}
