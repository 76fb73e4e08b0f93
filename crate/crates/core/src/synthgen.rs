//! Seeded synthetic corpora with known entropy.
//!
//! Sampling is pinned so that a seed reproduces the same corpus everywhere:
//!
//! * the generator is ChaCha8 (`rand_chacha`) seeded with `seed_from_u64`;
//! * an index in `0..n` is `(x * n) >> 64` for a raw 64-bit draw `x`;
//! * a unit float is the top 53 bits of a raw draw times `2^-53`;
//! * categorical draws use Vose's alias table (one index draw, then one
//!   unit-float draw);
//! * MARKOV1 rows are drawn first, row by row, each entry a
//!   `Gamma(concentration, 1)` variate (floored at the smallest positive
//!   normal f64) normalized to sum to one; the initial state is a uniform
//!   index draw, after which the chain is sampled.
//!
//! Generated texts name each state by its decimal index and assign token IDs
//! in first-occurrence order, which is exactly what tokenizing the written
//! text yields.

use std::f64::consts::LN_2;
use std::io::{self, Write};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::corpus::TokenizedText;
use crate::error::{Error, Result};

/// Gamma shape used for MARKOV1 rows unless set explicitly.
pub const DEFAULT_CONCENTRATION: f64 = 0.1;

/// Largest state count accepted for MARKOV1 (the dense matrix is V²).
pub const MAX_MARKOV_STATES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Zipf,
    Uniform,
    Markov1,
    Constant,
}

impl std::str::FromStr for SourceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zipf" => Ok(SourceKind::Zipf),
            "uniform" => Ok(SourceKind::Uniform),
            "markov1" | "markov" => Ok(SourceKind::Markov1),
            "constant" => Ok(SourceKind::Constant),
            other => Err(Error::Config(format!("unknown source kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub kind: SourceKind,
    /// Number of types (states) V.
    pub types: usize,
    /// Zipf exponent s in `p_k ∝ (k + shift)^-s`, `k = 1..V`.
    pub exponent: f64,
    /// Mandelbrot shift; 0 gives plain Zipf.
    pub shift: f64,
    /// Gamma shape for MARKOV1 rows; `f64::INFINITY` gives uniform rows.
    pub concentration: f64,
    /// Number of tokens N.
    pub length: usize,
    pub seed: u64,
}

impl SourceSpec {
    fn base(kind: SourceKind, types: usize, length: usize, seed: u64) -> Self {
        Self {
            kind,
            types,
            exponent: 1.0,
            shift: 0.0,
            concentration: DEFAULT_CONCENTRATION,
            length,
            seed,
        }
    }

    pub fn zipf(types: usize, exponent: f64, length: usize, seed: u64) -> Self {
        Self {
            exponent,
            ..Self::base(SourceKind::Zipf, types, length, seed)
        }
    }

    pub fn uniform(types: usize, length: usize, seed: u64) -> Self {
        Self::base(SourceKind::Uniform, types, length, seed)
    }

    pub fn markov1(states: usize, concentration: f64, length: usize, seed: u64) -> Self {
        Self {
            concentration,
            ..Self::base(SourceKind::Markov1, states, length, seed)
        }
    }

    pub fn constant(length: usize) -> Self {
        Self::base(SourceKind::Constant, 1, length, 0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.types == 0 {
            return Err(Error::Config("type count must be at least 1".into()));
        }
        if self.length == 0 {
            return Err(Error::Config("length must be at least 1".into()));
        }
        match self.kind {
            SourceKind::Zipf => {
                if !(self.exponent > 0.0) || !self.exponent.is_finite() {
                    return Err(Error::Config("Zipf exponent must be positive".into()));
                }
                if !(self.shift >= 0.0) || !self.shift.is_finite() {
                    return Err(Error::Config("Zipf shift must be non-negative".into()));
                }
            }
            SourceKind::Markov1 => {
                if !(self.concentration > 0.0) {
                    return Err(Error::Config(
                        "Markov concentration must be positive".into(),
                    ));
                }
                if self.types > MAX_MARKOV_STATES {
                    return Err(Error::Config(format!(
                        "Markov sources support at most {MAX_MARKOV_STATES} states"
                    )));
                }
            }
            SourceKind::Uniform | SourceKind::Constant => {}
        }
        Ok(())
    }
}

fn index(rng: &mut ChaCha8Rng, n: usize) -> usize {
    ((u128::from(rng.next_u64()) * n as u128) >> 64) as usize
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Vose alias table for a fixed categorical distribution.
#[derive(Debug, Clone)]
struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<u32>,
}

impl AliasTable {
    fn new(weights: &[f64]) -> Self {
        let n = weights.len();
        let total: f64 = weights.iter().sum();
        let mut scaled: Vec<f64> = weights.iter().map(|w| w * n as f64 / total).collect();
        let mut prob = vec![1.0; n];
        let mut alias: Vec<u32> = (0..n as u32).collect();
        let (mut small, mut large): (Vec<usize>, Vec<usize>) =
            (0..n).partition(|&i| scaled[i] < 1.0);
        while let (Some(s), Some(&l)) = (small.pop(), large.last()) {
            prob[s] = scaled[s];
            alias[s] = l as u32;
            scaled[l] -= 1.0 - scaled[s];
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        Self { prob, alias }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let col = index(rng, self.prob.len());
        if unit(rng) < self.prob[col] {
            col
        } else {
            self.alias[col] as usize
        }
    }
}

fn zipf_weights(spec: &SourceSpec) -> Vec<f64> {
    (1..=spec.types)
        .map(|k| (k as f64 + spec.shift).powf(-spec.exponent))
        .collect()
}

/// Row-stochastic transition matrix of a MARKOV1 spec, row-major.
pub fn transition_matrix(spec: &SourceSpec) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    if spec.kind != SourceKind::Markov1 {
        return Err(Error::Config(
            "transition matrix requires a MARKOV1 spec".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok(markov_rows(spec, &mut rng))
}

fn markov_rows(spec: &SourceSpec, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let v = spec.types;
    if spec.concentration.is_infinite() {
        return vec![vec![1.0 / v as f64; v]; v];
    }
    let gamma = Gamma::new(spec.concentration, 1.0).expect("validated shape");
    (0..v)
        .map(|_| {
            let mut row: Vec<f64> = (0..v)
                .map(|_| gamma.sample(rng).max(f64::MIN_POSITIVE))
                .collect();
            let total: f64 = row.iter().sum();
            row.iter_mut().for_each(|p| *p /= total);
            row
        })
        .collect()
}

/// Draws a text from `spec`.
pub fn generate(spec: &SourceSpec) -> Result<TokenizedText> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.length;
    let states: Vec<usize> = match spec.kind {
        SourceKind::Constant => vec![0; n],
        SourceKind::Uniform => (0..n).map(|_| index(&mut rng, spec.types)).collect(),
        SourceKind::Zipf => {
            let table = AliasTable::new(&zipf_weights(spec));
            (0..n).map(|_| table.sample(&mut rng)).collect()
        }
        SourceKind::Markov1 => {
            let rows: Vec<AliasTable> = markov_rows(spec, &mut rng)
                .iter()
                .map(|row| AliasTable::new(row))
                .collect();
            let mut state = index(&mut rng, spec.types);
            let mut out = Vec::with_capacity(n);
            out.push(state);
            for _ in 1..n {
                state = rows[state].sample(&mut rng);
                out.push(state);
            }
            out
        }
    };
    let names: Vec<String> = states.iter().map(|s| s.to_string()).collect();
    Ok(TokenizedText::from_words(
        format!("synth-{}", spec.seed),
        &names,
    ))
}

fn entropy_bits(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.ln())
        .sum::<f64>()
        / LN_2
}

/// Stationary distribution by power iteration from the uniform vector.
fn stationary(rows: &[Vec<f64>]) -> Vec<f64> {
    let v = rows.len();
    let mut pi = vec![1.0 / v as f64; v];
    for _ in 0..100_000 {
        let mut next = vec![0.0; v];
        for (i, row) in rows.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                next[j] += pi[i] * p;
            }
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let delta: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        pi = next;
        if delta < 1e-15 {
            break;
        }
    }
    pi
}

/// Exact entropy in bits: the unigram entropy for i.i.d. kinds, the
/// entropy rate `Σ_i π_i H(P_i·)` for MARKOV1.
pub fn true_entropy(spec: &SourceSpec) -> Result<f64> {
    spec.validate()?;
    Ok(match spec.kind {
        SourceKind::Constant => 0.0,
        SourceKind::Uniform => (spec.types as f64).log2(),
        SourceKind::Zipf => {
            let w = zipf_weights(spec);
            let total: f64 = w.iter().sum();
            let p: Vec<f64> = w.iter().map(|x| x / total).collect();
            entropy_bits(&p)
        }
        SourceKind::Markov1 => {
            let rows = transition_matrix(spec)?;
            let pi = stationary(&rows);
            pi.iter()
                .zip(&rows)
                .map(|(w, row)| w * entropy_bits(row))
                .sum()
        }
    })
}

/// Entropy of the stationary unigram distribution of a MARKOV1 spec; for
/// other kinds the same as [`true_entropy`].
pub fn stationary_unigram_entropy(spec: &SourceSpec) -> Result<f64> {
    if spec.kind != SourceKind::Markov1 {
        return true_entropy(spec);
    }
    let rows = transition_matrix(spec)?;
    Ok(entropy_bits(&stationary(&rows)))
}

/// Writes the token strings separated by spaces, 20 per line.
pub fn write_text<W: Write>(text: &TokenizedText, mut out: W) -> io::Result<()> {
    for (i, word) in text.words().enumerate() {
        if i > 0 {
            out.write_all(if i % 20 == 0 { b"\n" } else { b" " })?;
        }
        out.write_all(word.as_bytes())?;
    }
    if !text.is_empty() {
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block_entropy::ml_entropy;
    use crate::corpus::{frequency_table, tokenize, RawDocument};
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_source() {
        let text = generate(&SourceSpec::constant(100)).unwrap();
        assert_eq!(text.len(), 100);
        assert!(text.tokens().iter().all(|&t| t == 0));
        assert_eq!(true_entropy(&SourceSpec::constant(5)).unwrap(), 0.0);
    }

    #[test]
    fn closed_form_entropies() {
        assert_abs_diff_eq!(
            true_entropy(&SourceSpec::uniform(6, 10, 1)).unwrap(),
            2.584962500721156,
            epsilon = 1e-12
        );
        let uniform_chain = SourceSpec::markov1(16, f64::INFINITY, 10, 3);
        assert_abs_diff_eq!(true_entropy(&uniform_chain).unwrap(), 4.0, epsilon = 1e-12);
        // p ∝ 1/k over 3 types: weights 1, 1/2, 1/3 sum to 11/6
        let p = [6.0 / 11.0, 3.0 / 11.0, 2.0 / 11.0];
        let want: f64 = p.iter().map(|x: &f64| -x * x.log2()).sum();
        assert_abs_diff_eq!(
            true_entropy(&SourceSpec::zipf(3, 1.0, 10, 0)).unwrap(),
            want,
            epsilon = 1e-12
        );
    }

    #[test]
    fn same_seed_same_text() {
        for spec in [
            SourceSpec::zipf(500, 1.1, 2000, 9),
            SourceSpec::markov1(20, 0.5, 2000, 9),
            SourceSpec::uniform(30, 2000, 9),
        ] {
            let a = generate(&spec).unwrap();
            let b = generate(&spec).unwrap();
            assert_eq!(a.tokens(), b.tokens());
            let other = generate(&SourceSpec { seed: 10, ..spec }).unwrap();
            assert_ne!(a.tokens(), other.tokens());
        }
    }

    #[test]
    fn written_text_tokenizes_back_identically() {
        let text = generate(&SourceSpec::zipf(200, 1.0, 1000, 4)).unwrap();
        let mut buf = Vec::new();
        write_text(&text, &mut buf).unwrap();
        let back = tokenize(&RawDocument::new("x", String::from_utf8(buf).unwrap()));
        assert_eq!(back.tokens(), text.tokens());
        assert_eq!(
            back.vocab().words().collect::<Vec<_>>(),
            text.vocab().words().collect::<Vec<_>>()
        );
    }

    #[test]
    fn alias_table_reproduces_weights() {
        let weights = [5.0, 1.0, 3.0, 1.0];
        let table = AliasTable::new(&weights);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut counts = [0usize; 4];
        let draws = 200_000;
        for _ in 0..draws {
            counts[table.sample(&mut rng)] += 1;
        }
        for (c, w) in counts.iter().zip(weights) {
            assert_abs_diff_eq!(*c as f64 / draws as f64, w / 10.0, epsilon = 0.005);
        }
    }

    #[test]
    fn markov_rows_are_stochastic() {
        let rows = transition_matrix(&SourceSpec::markov1(12, 0.3, 1, 5)).unwrap();
        for row in &rows {
            assert_abs_diff_eq!(row.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            assert!(row.iter().all(|&p| p > 0.0));
        }
        let pi = stationary(&rows);
        for j in 0..12 {
            let flow: f64 = (0..12).map(|i| pi[i] * rows[i][j]).sum();
            assert_abs_diff_eq!(flow, pi[j], epsilon = 1e-12);
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(generate(&SourceSpec::zipf(10, 0.0, 10, 1)).is_err());
        assert!(generate(&SourceSpec::uniform(0, 10, 1)).is_err());
        assert!(generate(&SourceSpec::uniform(3, 0, 1)).is_err());
        assert!(generate(&SourceSpec::markov1(5000, 1.0, 10, 1)).is_err());
        assert!(generate(&SourceSpec::markov1(5, -1.0, 10, 1)).is_err());
        assert!("bogus".parse::<SourceKind>().is_err());
        assert_eq!("ZIPF".parse::<SourceKind>().unwrap(), SourceKind::Zipf);
    }

    #[test]
    fn zipf_ml_entropy_converges() {
        let spec = SourceSpec::zipf(10, 1.0, 1_000_000, 17);
        let truth = true_entropy(&spec).unwrap();
        let ml = ml_entropy(&frequency_table(&generate(&spec).unwrap()))
            .unwrap()
            .bits;
        assert!((ml - truth).abs() < 0.01, "ml {ml} truth {truth}");
    }

    #[test]
    fn ml_entropy_tightens_with_length() {
        let base = SourceSpec::zipf(1000, 1.0, 1, 3);
        let truth = true_entropy(&base).unwrap();
        let mut prev = f64::INFINITY;
        // tolerances about twice the (V-1)/(2N ln 2) plug-in bias
        for (n, tol) in [(10_000, 0.2), (100_000, 0.02), (1_000_000, 0.002)] {
            let text = generate(&SourceSpec {
                length: n,
                ..base.clone()
            })
            .unwrap();
            let err = (ml_entropy(&frequency_table(&text)).unwrap().bits - truth).abs();
            assert!(err < tol, "N={n} err={err}");
            assert!(err < prev);
            prev = err;
        }
    }

    #[test]
    fn markov_source_tracks_rate_and_ml_tracks_stationary() {
        let spec = SourceSpec::markov1(64, DEFAULT_CONCENTRATION, 100_000, 7);
        let text = generate(&spec).unwrap();
        let rate = true_entropy(&spec).unwrap();
        let stationary = stationary_unigram_entropy(&spec).unwrap();
        let source = crate::source_entropy::source_entropy(&text).unwrap().bits;
        let ml = ml_entropy(&frequency_table(&text)).unwrap().bits;
        assert!(stationary > rate + 1.0);
        assert!((source - rate).abs() < 0.3, "source {source} rate {rate}");
        assert!(
            (ml - stationary).abs() < 0.02,
            "ml {ml} stationary {stationary}"
        );
    }
}
