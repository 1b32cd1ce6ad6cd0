//! Driving a dynamic matcher over an update stream and recording recourse.

use serde::Serialize;
use thiserror::Error;

use super::inner::{DynamicMatcher, WrapperError};
use crate::graph::{Edge, Graph, GraphError, UpdateEvent};
use crate::oracle::{max_matching_exact, max_weight_matching_exact};
use crate::solution::validate_matching;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("update {step} ({event}): {source}")]
    Update {
        step: usize,
        event: String,
        #[source]
        source: GraphError,
    },
    #[error("step {step}: {source}")]
    Matcher {
        step: usize,
        #[source]
        source: WrapperError,
    },
    #[error("step {step}: output is not a matching: {reason}")]
    InvalidOutput { step: usize, reason: String },
}

/// One line of the recourse trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub step: usize,
    pub event: String,
    pub recourse_added: usize,
    pub recourse_removed: usize,
    pub output_size: usize,
    pub output_weight: f64,
    pub inner_size: Option<usize>,
    pub window_phase: String,
    pub opt_size: Option<f64>,
}

impl TraceRow {
    pub fn recourse(&self) -> usize {
        self.recourse_added + self.recourse_removed
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OptCheck {
    Off,
    /// Maximum cardinality via the exact oracle, when the graph is small enough.
    Size,
    /// Maximum weight via the exact oracle, when the graph is small enough.
    Weight,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SimReport {
    pub rows: Vec<TraceRow>,
}

impl SimReport {
    pub fn max_recourse(&self) -> usize {
        self.rows.iter().map(TraceRow::recourse).max().unwrap_or(0)
    }

    pub fn total_recourse(&self) -> usize {
        self.rows.iter().map(TraceRow::recourse).sum()
    }

    pub fn mean_recourse(&self) -> f64 {
        if self.rows.is_empty() {
            0.0
        } else {
            self.total_recourse() as f64 / self.rows.len() as f64
        }
    }

    /// Largest `opt / output` seen on rows with an oracle value; infinite if
    /// the output was empty while the optimum was not.
    pub fn worst_ratio(&self, weighted: bool) -> Option<f64> {
        self.rows
            .iter()
            .filter_map(|r| {
                let opt = r.opt_size?;
                let have = if weighted { r.output_weight } else { r.output_size as f64 };
                Some(if opt == 0.0 {
                    1.0
                } else if have == 0.0 {
                    f64::INFINITY
                } else {
                    opt / have
                })
            })
            .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))))
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.rows {
            out.serialize(r)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Applies one update to `g`, feeds it to `alg` and returns the trace row.
pub fn step(
    g: &mut Graph,
    alg: &mut dyn DynamicMatcher,
    index: usize,
    ev: &UpdateEvent,
    opt: OptCheck,
) -> Result<TraceRow, SimError> {
    let delta = g.apply_update(ev).map_err(|source| SimError::Update { step: index, event: ev.to_string(), source })?;
    let out = alg.handle_update(g, &delta).map_err(|source| SimError::Matcher { step: index, source })?;
    let m = alg.matching();
    let edges: Vec<Edge> = m.iter().copied().collect();
    let report = validate_matching(g, &edges);
    if !report.is_ok() {
        return Err(SimError::InvalidOutput { step: index, reason: report.to_string() });
    }
    let opt_size = match opt {
        OptCheck::Off => None,
        OptCheck::Size => max_matching_exact(g).ok().map(|x| x.len() as f64),
        OptCheck::Weight => max_weight_matching_exact(g).ok().map(|x| x.weight()),
    };
    Ok(TraceRow {
        step: index,
        event: ev.to_string(),
        recourse_added: out.added.len(),
        recourse_removed: out.removed.len(),
        output_size: m.len(),
        output_weight: m.weight(),
        inner_size: alg.inner_size(),
        window_phase: alg.window_phase().to_string(),
        opt_size,
    })
}

/// Applies `updates` to `g` one at a time, feeding each delta to `alg`.
/// The output is validated after every step.
pub fn simulate(
    g: &mut Graph,
    alg: &mut dyn DynamicMatcher,
    updates: &[UpdateEvent],
    opt: OptCheck,
) -> Result<SimReport, SimError> {
    let mut rows = Vec::with_capacity(updates.len());
    for (i, ev) in updates.iter().enumerate() {
        rows.push(step(g, alg, i, ev, opt)?);
    }
    Ok(SimReport { rows })
}
