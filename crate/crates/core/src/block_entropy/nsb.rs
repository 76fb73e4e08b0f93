//! Nemenman–Shafee–Bialek entropy estimator.
//!
//! A symmetric Dirichlet prior with concentration `β` over `K` bins gives a
//! closed-form posterior mean entropy
//!
//! ```text
//! <H>(β) = ψ(N + Kβ + 1) - Σ_i (f_i + β)/(N + Kβ) · ψ(f_i + β + 1)
//! ```
//!
//! (the sum runs over all `K` bins, unseen ones having `f_i = 0`). NSB mixes
//! these priors so that the prior expected entropy
//! `ξ(β) = ψ(Kβ + 1) - ψ(β + 1)` is uniform on `(0, ln K)`, and weights each
//! `β` by the marginal likelihood of the counts
//!
//! ```text
//! P(f | β) ∝ Γ(Kβ)/Γ(N + Kβ) · Π_i Γ(f_i + β)/Γ(β).
//! ```
//!
//! The estimate is `∫ P(f|β(ξ)) <H>(β(ξ)) dξ / ∫ P(f|β(ξ)) dξ`, evaluated with
//! composite Simpson in ξ. Only the range of `ln β` where the log-likelihood
//! is within [`LOG_WINDOW`] nats of its maximum is integrated. That range is
//! cut into panels of equal width in `ln β`, and each panel carries a uniform
//! ξ grid. When the likelihood keeps rising as `β → ∞` (near-uniform counts)
//! the posterior is a spike of width `~1/N` against `ξ = ln K`; the panels
//! shrink geometrically in ξ toward that edge, which a single uniform ξ grid
//! over the whole window cannot resolve.

use std::f64::consts::LN_2;

use statrs::function::gamma::{digamma, ln_gamma};

use super::{require_tokens, EntropyEstimate, Estimator};
use crate::corpus::FrequencyTable;
use crate::error::{Error, Result};

/// Log-likelihood drop that bounds the integration window.
const LOG_WINDOW: f64 = 50.0;
/// Range of `ln β` considered. `β = e^±60` is numerically 0 / ∞ for ξ.
const LN_BETA_MIN: f64 = -60.0;
const LN_BETA_MAX: f64 = 60.0;
/// Upper bound on grid refinement, as a multiple of the configured nodes.
const MAX_REFINE: usize = 64;
/// Widest panel, in units of `ln β`.
const PANEL_WIDTH: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct NsbConfig {
    /// Number of bins K. `None` uses the observed number of types.
    pub alphabet_size: Option<u64>,
    /// Total Simpson nodes across the integration window; odd, at least 17.
    /// Each panel receives an even share of the intervals (at least two).
    pub quadrature_nodes: usize,
    /// Relative change allowed between a grid and its doubling.
    pub rel_tol: f64,
}

impl Default for NsbConfig {
    fn default() -> Self {
        Self {
            alphabet_size: None,
            quadrature_nodes: 129,
            rel_tol: 1e-7,
        }
    }
}

impl NsbConfig {
    pub fn with_alphabet_size(mut self, k: u64) -> Self {
        self.alphabet_size = Some(k);
        self
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.quadrature_nodes = nodes;
        self
    }

    fn validate(&self, observed_types: u64) -> Result<u64> {
        if self.quadrature_nodes < 17 || self.quadrature_nodes.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "quadrature_nodes must be odd and >= 17, got {}",
                self.quadrature_nodes
            )));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::Config("rel_tol must be positive".into()));
        }
        let k = self.alphabet_size.unwrap_or(observed_types);
        if k < observed_types {
            return Err(Error::Config(format!(
                "alphabet size {k} is smaller than the {observed_types} observed types"
            )));
        }
        Ok(k)
    }
}

/// `ln Γ(x + n) - ln Γ(x)` for `x > 0`, `n >= 0`, accurate when `x` is huge
/// compared to `n` or vice versa.
fn ln_rising(x: f64, n: f64) -> f64 {
    if n == 0.0 {
        return 0.0;
    }
    if n <= 16.0 && n.fract() == 0.0 {
        return (0..n as u32).map(|k| (x + f64::from(k)).ln()).sum();
    }
    if x >= 10.0 {
        // Stirling series; the leading terms are recombined so that nothing
        // of magnitude x ln x cancels.
        let y = x + n;
        let lead = (x - 0.5) * (n / x).ln_1p() + n * y.ln() - n;
        let corr = |z: f64| {
            let z2 = z * z;
            1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z * z2 * z2)
        };
        return lead + corr(y) - corr(x);
    }
    ln_gamma(x + n) - ln_gamma(x)
}

/// Counts grouped by value: `(f, number of bins with count f)`, including
/// the unseen bins as `f = 0`.
struct Posterior {
    n: f64,
    k: f64,
    groups: Vec<(f64, f64)>,
}

impl Posterior {
    fn new(table: &FrequencyTable, k: u64) -> Self {
        let mut groups: Vec<(f64, f64)> = table
            .count_of_counts()
            .into_iter()
            .map(|(f, m)| (f as f64, m as f64))
            .collect();
        let unseen = k - table.n_types() as u64;
        if unseen > 0 {
            groups.push((0.0, unseen as f64));
        }
        Self {
            n: table.total() as f64,
            k: k as f64,
            groups,
        }
    }

    fn xi(&self, beta: f64) -> f64 {
        digamma(self.k * beta + 1.0) - digamma(beta + 1.0)
    }

    fn log_evidence(&self, beta: f64) -> f64 {
        let seen: f64 = self
            .groups
            .iter()
            .filter(|(f, _)| *f > 0.0)
            .map(|&(f, m)| m * ln_rising(beta, f))
            .sum();
        seen - ln_rising(self.k * beta, self.n)
    }

    fn mean_entropy(&self, beta: f64) -> f64 {
        let a = self.n + self.k * beta;
        let s: f64 = self
            .groups
            .iter()
            .map(|&(f, m)| m * (f + beta) * digamma(f + beta + 1.0))
            .sum();
        (digamma(a + 1.0) - s / a).max(0.0)
    }

    /// Inverts ξ(β) by bisection on `ln β` within `[lo, hi]`.
    fn ln_beta_for_xi(&self, xi: f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.xi(mid.exp()) < xi {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-12 {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// `ln β` maximizing the evidence: coarse scan, then golden section.
    fn ln_beta_mode(&self) -> f64 {
        let steps = 480;
        let h = (LN_BETA_MAX - LN_BETA_MIN) / steps as f64;
        let mut best = (LN_BETA_MIN, f64::NEG_INFINITY);
        for i in 0..=steps {
            let u = LN_BETA_MIN + h * i as f64;
            let l = self.log_evidence(u.exp());
            if l > best.1 {
                best = (u, l);
            }
        }
        let (mut a, mut b) = ((best.0 - h).max(LN_BETA_MIN), (best.0 + h).min(LN_BETA_MAX));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let f = |u: f64| self.log_evidence(u.exp());
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        while b - a > 1e-9 {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = f(d);
            }
        }
        0.5 * (a + b)
    }

    /// `ln β` interval outside which the evidence is negligible.
    fn ln_beta_window(&self) -> (f64, f64) {
        let mode = self.ln_beta_mode();
        let floor = self.log_evidence(mode.exp()) - LOG_WINDOW;
        let step = 0.25;
        let mut lo = mode;
        while lo > LN_BETA_MIN && self.log_evidence(lo.exp()) > floor {
            lo = (lo - step).max(LN_BETA_MIN);
        }
        let mut hi = mode;
        while hi < LN_BETA_MAX && self.log_evidence(hi.exp()) > floor {
            hi = (hi + step).min(LN_BETA_MAX);
        }
        (lo, hi)
    }

    /// Posterior mean (nats) by composite Simpson over `panels`, each with
    /// `intervals` (even) uniform ξ steps.
    fn simpson(&self, panels: &[(f64, f64)], intervals: usize) -> f64 {
        // (log of Simpson weight × step, <H>) per node
        let mut samples: Vec<(f64, f64)> = Vec::with_capacity(panels.len() * (intervals + 1));
        for &(u_lo, u_hi) in panels {
            let xi_lo = self.xi(u_lo.exp());
            let xi_hi = self.xi(u_hi.exp());
            let h = (xi_hi - xi_lo) / intervals as f64;
            if !(h > 0.0) {
                continue;
            }
            for i in 0..=intervals {
                let beta = if i == 0 {
                    u_lo.exp()
                } else if i == intervals {
                    u_hi.exp()
                } else {
                    self.ln_beta_for_xi(xi_lo + h * i as f64, u_lo, u_hi).exp()
                };
                let coef = if i == 0 || i == intervals {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                samples.push((
                    self.log_evidence(beta) + (coef * h).ln(),
                    self.mean_entropy(beta),
                ));
            }
        }
        let max_log = samples
            .iter()
            .map(|s| s.0)
            .fold(f64::NEG_INFINITY, f64::max);
        let (mut num, mut den) = (0.0, 0.0);
        for &(log_w, mean_h) in &samples {
            let w = (log_w - max_log).exp();
            num += w * mean_h;
            den += w;
        }
        num / den
    }
}

/// NSB posterior-mean entropy in bits.
pub fn nsb_entropy(table: &FrequencyTable, cfg: &NsbConfig) -> Result<EntropyEstimate> {
    require_tokens(table, "nsb_entropy")?;
    let observed = table.n_types() as u64;
    let k = cfg.validate(observed)?;
    let estimate = |bits: f64| EntropyEstimate {
        bits,
        estimator: Estimator::Nsb,
        n_tokens: table.total(),
        n_types: observed,
        block_size: 1,
    };
    if k == 1 {
        return Ok(estimate(0.0));
    }

    let post = Posterior::new(table, k);
    let (lo, hi) = post.ln_beta_window();
    let n_panels = (((hi - lo) / PANEL_WIDTH).ceil() as usize).max(1);
    let width = (hi - lo) / n_panels as f64;
    let panels: Vec<(f64, f64)> = (0..n_panels)
        .map(|j| (lo + width * j as f64, lo + width * (j + 1) as f64))
        .collect();
    if !(hi > lo) || !(post.xi(hi.exp()) > post.xi(lo.exp())) {
        // The whole posterior sits on one ξ value.
        return Ok(estimate(post.mean_entropy(lo.exp()) / LN_2));
    }

    let budget = cfg.quadrature_nodes * MAX_REFINE;
    let mut intervals = (((cfg.quadrature_nodes - 1) / n_panels) & !1).max(2);
    let mut current = post.simpson(&panels, intervals);
    loop {
        intervals *= 2;
        let finer = post.simpson(&panels, intervals);
        if !finer.is_finite() {
            return Err(Error::Numeric {
                message: "NSB integrand evaluated to a non-finite value".into(),
                residual: f64::NAN,
            });
        }
        let residual = ((finer - current) / finer).abs();
        if residual <= cfg.rel_tol {
            return Ok(estimate(finer / LN_2));
        }
        let nodes = intervals * n_panels + 1;
        if nodes > budget {
            return Err(Error::Numeric {
                message: format!("NSB quadrature did not converge with {nodes} nodes"),
                residual,
            });
        }
        current = finer;
    }
}
