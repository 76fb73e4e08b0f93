//! Cross-text statistics: correlation, least squares, entropy ratios and
//! information-content normalization.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub label: String,
    pub x: f64,
    pub y: f64,
}

impl LabeledPair {
    pub fn new(label: impl Into<String>, x: f64, y: f64) -> Self {
        Self {
            label: label.into(),
            x,
            y,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PairedSeries {
    pub pairs: Vec<LabeledPair>,
    pub exclusions: BTreeSet<String>,
}

impl PairedSeries {
    pub fn new(pairs: Vec<LabeledPair>) -> Self {
        Self {
            pairs,
            exclusions: BTreeSet::new(),
        }
    }

    /// Unlabeled pairs, labelled by position.
    pub fn from_xy(points: &[(f64, f64)]) -> Self {
        Self::new(
            points
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| LabeledPair::new(i.to_string(), x, y))
                .collect(),
        )
    }

    pub fn excluding<I, S>(mut self, labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.exclusions.extend(labels.into_iter().map(Into::into));
        self
    }

    /// Pairs whose label is not excluded.
    pub fn active(&self) -> impl Iterator<Item = &LabeledPair> {
        self.pairs
            .iter()
            .filter(|p| !self.exclusions.contains(&p.label))
    }

    fn columns(&self) -> (Vec<f64>, Vec<f64>) {
        self.active().map(|p| (p.x, p.y)).unzip()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub intercept: f64,
    pub slope: f64,
    pub mean_abs_residual: f64,
}

impl RegressionFit {
    /// Published block-to-source conversion line `-1.59 + 0.82·H1`.
    pub const DEFAULT: RegressionFit = RegressionFit {
        intercept: -1.59,
        slope: 0.82,
        mean_abs_residual: 0.0,
    };

    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

impl Default for RegressionFit {
    fn default() -> Self {
        Self::DEFAULT
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
pub fn sample_sd(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m).powi(2)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

/// Centered sums `(Sxx, Syy, Sxy)` and the means.
fn moments(xs: &[f64], ys: &[f64]) -> (f64, f64, f64, f64, f64) {
    let (mx, my) = (mean(xs), mean(ys));
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    (sxx, syy, sxy, mx, my)
}

fn require_pairs(n: usize, what: &'static str) -> Result<()> {
    if n < 2 {
        return Err(Error::TooShort {
            what,
            required: 2,
            actual: n,
        });
    }
    Ok(())
}

/// Product-moment correlation of the active pairs.
pub fn pearson_r(series: &PairedSeries) -> Result<f64> {
    let (xs, ys) = series.columns();
    require_pairs(xs.len(), "pearson_r")?;
    let (sxx, syy, sxy, _, _) = moments(&xs, &ys);
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("zero variance in x or y".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Least-squares line through the active pairs.
pub fn ols_fit(series: &PairedSeries) -> Result<RegressionFit> {
    let (xs, ys) = series.columns();
    require_pairs(xs.len(), "ols_fit")?;
    let (sxx, _, sxy, mx, my) = moments(&xs, &ys);
    if sxx == 0.0 {
        return Err(Error::Degenerate("all x values are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mean_abs_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).abs())
        .sum::<f64>()
        / xs.len() as f64;
    Ok(RegressionFit {
        intercept,
        slope,
        mean_abs_residual,
    })
}

pub fn predict_source_from_block(h1: f64, fit: &RegressionFit) -> f64 {
    fit.predict(h1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyRatioMatrix {
    pub labels: Vec<String>,
    /// `ratios[a][b] = H(a) / H(b)`.
    pub ratios: Vec<Vec<f64>>,
}

impl EntropyRatioMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        Some(self.ratios[i][j])
    }
}

pub fn entropy_ratio_matrix(estimates: &[(String, f64)]) -> Result<EntropyRatioMatrix> {
    if let Some((label, h)) = estimates.iter().find(|(_, h)| !(*h > 0.0)) {
        return Err(Error::Domain(format!(
            "entropy of {label:?} is {h}; ratios need positive entropies"
        )));
    }
    Ok(EntropyRatioMatrix {
        labels: estimates.iter().map(|(l, _)| l.clone()).collect(),
        ratios: estimates
            .iter()
            .map(|(_, a)| estimates.iter().map(|(_, b)| a / b).collect())
            .collect(),
    })
}

/// Information content `-log2 p` divided by a text's source entropy.
pub fn ic_normalize(p: f64, h_source: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("probability {p} outside (0, 1]")));
    }
    if !(h_source > 0.0) {
        return Err(Error::Domain(format!(
            "source entropy {h_source} is not positive"
        )));
    }
    Ok(-p.log2() / h_source)
}
