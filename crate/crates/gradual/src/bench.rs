//! Wall-clock measurement and growth-shape fits.

use std::time::{Duration, Instant};

use serde::Serialize;

/// Median of `reps` timed runs of `f`.
pub fn median_time<F: FnMut()>(reps: usize, mut f: F) -> Duration {
    let mut times: Vec<Duration> = (0..reps.max(1))
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed()
        })
        .collect();
    times.sort();
    times[times.len() / 2]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Linear,
    NLogN,
}

impl Model {
    pub fn eval(&self, n: f64) -> f64 {
        match self {
            Model::Linear => n,
            Model::NLogN => n * n.max(2.0).log2(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShapeFit {
    pub model: Model,
    pub sizes: Vec<usize>,
    pub seconds: Vec<f64>,
    /// `seconds / model(size)` for each point.
    pub constants: Vec<f64>,
    /// Largest constant over the smallest.
    pub spread: f64,
}

impl ShapeFit {
    pub fn new(model: Model, points: &[(usize, Duration)]) -> Self {
        let sizes: Vec<usize> = points.iter().map(|p| p.0).collect();
        let seconds: Vec<f64> = points.iter().map(|p| p.1.as_secs_f64()).collect();
        let constants: Vec<f64> = sizes.iter().zip(&seconds).map(|(&n, &s)| s / model.eval(n as f64)).collect();
        let hi = constants.iter().cloned().fold(f64::MIN, f64::max);
        let lo = constants.iter().cloned().fold(f64::MAX, f64::min);
        ShapeFit { model, sizes, seconds, constants, spread: if lo > 0.0 { hi / lo } else { f64::INFINITY } }
    }

    /// Every point lies within `factor` of a single constant.
    pub fn fits_within(&self, factor: f64) -> bool {
        self.spread <= factor
    }
}
