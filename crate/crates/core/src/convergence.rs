//! Entropy trajectories over growing prefixes and SD-based convergence.

use serde::{Deserialize, Serialize};

use crate::block_entropy::{ml_entropy, nsb_entropy, EntropyEstimate, NsbConfig};
use crate::corpus::{FrequencyTable, TokenizedText};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::source_entropy::{match_lengths_fast_with, source_estimate, MatchConvention};

pub const DEFAULT_STEP: usize = 10_000;
pub const DEFAULT_THRESHOLD: f64 = 0.05;
pub const DEFAULT_WINDOW: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryEstimator {
    Ml,
    Nsb(NsbConfig),
    Source(MatchConvention),
}

impl TrajectoryEstimator {
    pub fn name(&self) -> &'static str {
        match self {
            TrajectoryEstimator::Ml => "ml",
            TrajectoryEstimator::Nsb(_) => "nsb",
            TrajectoryEstimator::Source(_) => "source",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub step: usize,
    /// `(prefix_size, estimate)` for prefix sizes `step, 2·step, ...`.
    pub points: Vec<(usize, EntropyEstimate)>,
    pub estimator: TrajectoryEstimator,
}

impl Trajectory {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|(_, e)| e.bits).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdPoint {
    pub prefix_size: usize,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub trajectory: Trajectory,
    /// Trailing-window sample SD, one entry per point from the `window`-th on.
    pub sd_series: Vec<SdPoint>,
    pub convergence_point: Option<usize>,
    pub threshold: f64,
    pub window: usize,
}

/// Per-prefix count snapshots, taken in one pass over the tokens.
fn count_snapshots(text: &TokenizedText, sizes: &[usize]) -> Vec<FrequencyTable> {
    let mut counts = vec![0u64; text.vocab().len()];
    let mut max_id = 0usize;
    let mut pos = 0;
    let tokens = text.tokens();
    sizes
        .iter()
        .map(|&size| {
            for &t in &tokens[pos..size] {
                counts[t as usize] += 1;
                max_id = max_id.max(t as usize);
            }
            pos = size;
            FrequencyTable::from_counts(counts[..=max_id].to_vec())
        })
        .collect()
}

/// Estimates the entropy of every prefix whose size is a multiple of `step`.
pub fn trajectory(
    text: &TokenizedText,
    step: usize,
    estimator: &TrajectoryEstimator,
    exec: Exec,
) -> Result<Trajectory> {
    if step == 0 {
        return Err(Error::Config("step must be at least 1".into()));
    }
    let n = text.len();
    if n < step {
        return Err(Error::TooShort {
            what: "trajectory",
            required: step,
            actual: n,
        });
    }
    let sizes: Vec<usize> = (1..=n / step).map(|k| k * step).collect();
    let estimates: Vec<Result<EntropyEstimate>> = match estimator {
        TrajectoryEstimator::Source(convention) => {
            let lengths = match_lengths_fast_with(text, *convention)?;
            exec.map(&sizes, |&size| {
                Ok(source_estimate(
                    text,
                    lengths.prefix_entropy_bits(size)?,
                    size,
                ))
            })
        }
        TrajectoryEstimator::Ml => {
            let tables = count_snapshots(text, &sizes);
            exec.map(&tables, ml_entropy)
        }
        TrajectoryEstimator::Nsb(cfg) => {
            let tables = count_snapshots(text, &sizes);
            exec.map(&tables, |t| nsb_entropy(t, cfg))
        }
    };
    let points = sizes
        .into_iter()
        .zip(estimates)
        .map(|(size, est)| est.map(|e| (size, e)))
        .collect::<Result<_>>()?;
    Ok(Trajectory {
        step,
        points,
        estimator: estimator.clone(),
    })
}

fn sample_sd(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (ss / (n - 1.0)).sqrt()
}

/// Trailing-window SD series and the first prefix size whose SD is below
/// `threshold`.
pub fn convergence_point(
    trajectory: Trajectory,
    threshold: f64,
    window: usize,
) -> Result<ConvergenceReport> {
    if window < 2 {
        return Err(Error::Config("window must be at least 2".into()));
    }
    if !(threshold >= 0.0) {
        return Err(Error::Config("threshold must be non-negative".into()));
    }
    let values = trajectory.values();
    if values.len() < window {
        return Err(Error::TooShort {
            what: "convergence_point",
            required: window,
            actual: values.len(),
        });
    }
    let sd_series: Vec<SdPoint> = values
        .windows(window)
        .zip(&trajectory.points[window - 1..])
        .map(|(w, (size, _))| SdPoint {
            prefix_size: *size,
            sd: sample_sd(w),
        })
        .collect();
    let convergence_point = sd_series
        .iter()
        .find(|p| p.sd < threshold)
        .map(|p| p.prefix_size);
    Ok(ConvergenceReport {
        trajectory,
        sd_series,
        convergence_point,
        threshold,
        window,
    })
}
