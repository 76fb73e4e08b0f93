//! Block entropy estimators over frequency tables.
//!
//! All arithmetic is done in nats; results are reported in bits.

use std::collections::HashMap;
use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::corpus::{FrequencyTable, TokenizedText};
use crate::error::{Error, Result};

mod nsb;

pub use nsb::{nsb_entropy, NsbConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    /// Maximum-likelihood plug-in.
    Ml,
    Nsb,
    MillerMadow,
    /// Increasing-window match-length estimate.
    Source,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::Ml => "ml",
            Estimator::Nsb => "nsb",
            Estimator::MillerMadow => "miller_madow",
            Estimator::Source => "source",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub bits: f64,
    pub estimator: Estimator,
    pub n_tokens: u64,
    pub n_types: u64,
    pub block_size: usize,
}

fn require_tokens(table: &FrequencyTable, what: &'static str) -> Result<()> {
    if table.total() == 0 {
        return Err(Error::TooShort {
            what,
            required: 1,
            actual: 0,
        });
    }
    Ok(())
}

pub(crate) fn ml_nats(table: &FrequencyTable) -> f64 {
    let n = table.total() as f64;
    let ln_n = n.ln();
    // -Σ p ln p = ln N - (1/N) Σ f ln f
    let sum_f_ln_f: f64 = table
        .count_of_counts()
        .into_iter()
        .map(|(f, m)| {
            let f = f as f64;
            m as f64 * f * f.ln()
        })
        .sum();
    (ln_n - sum_f_ln_f / n).max(0.0)
}

/// Plug-in entropy of the relative frequencies.
pub fn ml_entropy(table: &FrequencyTable) -> Result<EntropyEstimate> {
    require_tokens(table, "ml_entropy")?;
    Ok(EntropyEstimate {
        bits: ml_nats(table) / LN_2,
        estimator: Estimator::Ml,
        n_tokens: table.total(),
        n_types: table.n_types() as u64,
        block_size: 1,
    })
}

/// Plug-in entropy plus the first-order bias correction `(V-1)/(2N)` nats.
pub fn miller_madow_entropy(table: &FrequencyTable) -> Result<EntropyEstimate> {
    require_tokens(table, "miller_madow_entropy")?;
    let n = table.total() as f64;
    let v = table.n_types() as f64;
    Ok(EntropyEstimate {
        bits: (ml_nats(table) + (v - 1.0) / (2.0 * n)) / LN_2,
        estimator: Estimator::MillerMadow,
        n_tokens: table.total(),
        n_types: table.n_types() as u64,
        block_size: 1,
    })
}

/// Counts of the `N - n + 1` overlapping n-token blocks. Block IDs are
/// assigned in first-occurrence order.
pub fn ngram_table(text: &TokenizedText, n: usize) -> Result<FrequencyTable> {
    if n == 0 {
        return Err(Error::Config("block size must be at least 1".into()));
    }
    let tokens = text.tokens();
    if tokens.len() < n {
        return Err(Error::TooShort {
            what: "ngram_table",
            required: n,
            actual: tokens.len(),
        });
    }
    let mut ids: HashMap<&[u32], usize> = HashMap::new();
    let mut counts: Vec<u64> = Vec::new();
    for block in tokens.windows(n) {
        let next = counts.len();
        let id = *ids.entry(block).or_insert(next);
        if id == next {
            counts.push(0);
        }
        counts[id] += 1;
    }
    Ok(FrequencyTable::from_counts(counts))
}
