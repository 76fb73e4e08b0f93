//! Word entropy estimation for natural-language corpora.
//!
//! The crate turns raw text into token-ID sequences ([`corpus`]), estimates
//! unigram and n-gram block entropies with the plug-in and NSB estimators
//! ([`block_entropy`]), estimates source entropy from increasing-window match
//! lengths ([`source_entropy`]), tracks how estimates settle as a text grows
//! ([`convergence`]) and runs cross-text statistics ([`analysis`]).
//! [`synthgen`] produces seeded synthetic corpora with known entropies.
//!
//! With the default `parallel` feature, batch work (many texts, many prefixes,
//! many seeds) is spread over a rayon pool; see [`exec`].

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod block_entropy;
pub mod convergence;
pub mod corpus;
mod error;
pub mod exec;
pub mod source_entropy;
pub mod synthgen;

pub use analysis::{
    entropy_ratio_matrix, ic_normalize, ols_fit, pearson_r, predict_source_from_block,
    EntropyRatioMatrix, LabeledPair, PairedSeries, RegressionFit,
};
pub use block_entropy::{
    miller_madow_entropy, ml_entropy, ngram_table, nsb_entropy, EntropyEstimate, Estimator,
    NsbConfig,
};
pub use convergence::{
    convergence_point, trajectory, ConvergenceReport, Trajectory, TrajectoryEstimator,
};
pub use corpus::{
    frequency_table, prefix, read_verse_file, tokenize, FrequencyTable, RawDocument, TokenizedText,
    Vocabulary,
};
pub use error::{Error, Result};
pub use exec::Exec;
pub use source_entropy::{
    match_lengths_fast, match_lengths_naive, source_entropy, MatchConvention, MatchLengthSequence,
};
pub use synthgen::{generate, true_entropy, SourceKind, SourceSpec};
