use serde::Serialize;
use word_entropy::analysis::{predict_source_from_block, RegressionFit};
use word_entropy::source_entropy::source_entropy_with;
use word_entropy::{frequency_table, ml_entropy, nsb_entropy, Exec, NsbConfig};

use super::{load_texts, FileError, LoadedText};
use crate::config::{Overrides, Settings};
use crate::error::CliError;
use crate::output::{cell, fmt4, round4, timestamp, to_json, write_stdout};
use crate::{EntropyArgs, EstimatorChoice, Format};

pub const COLUMNS: [&str; 7] = [
    "label",
    "n_tokens",
    "n_types",
    "block_ml",
    "block_nsb",
    "source",
    "predicted_source",
];

#[derive(Debug, Clone, Serialize)]
pub struct TextReport {
    pub label: String,
    pub n_tokens: usize,
    pub n_types: usize,
    pub block_ml: Option<f64>,
    pub block_nsb: Option<f64>,
    pub source: Option<f64>,
    /// Source entropy predicted from `block_nsb` by the default linear model.
    pub predicted_source: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Skipped {
    pub label: String,
    pub n_tokens: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
struct Report {
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_unix: Option<u64>,
    rows: Vec<TextReport>,
    skipped: Vec<Skipped>,
    errors: Vec<FileError>,
}

struct Outcome {
    row: TextReport,
    numeric_errors: Vec<FileError>,
}

fn estimate(item: &LoadedText, settings: &Settings) -> Outcome {
    let table = frequency_table(&item.text);
    let mut numeric_errors = Vec::new();
    let mut keep = |result: word_entropy::Result<word_entropy::EntropyEstimate>, name: &str| {
        result
            .map(|e| e.bits)
            .map_err(|e| {
                numeric_errors.push(FileError {
                    path: item.path.display().to_string(),
                    message: format!("{name}: {e}"),
                })
            })
            .ok()
    };
    let block_ml = settings
        .wants(EstimatorChoice::Ml)
        .then(|| keep(ml_entropy(&table), "ml"))
        .flatten();
    let block_nsb = settings
        .wants(EstimatorChoice::Nsb)
        .then(|| keep(nsb_entropy(&table, &NsbConfig::default()), "nsb"))
        .flatten();
    let source = settings
        .wants(EstimatorChoice::Source)
        .then(|| {
            keep(
                source_entropy_with(&item.text, settings.convention()),
                "source",
            )
        })
        .flatten();
    Outcome {
        row: TextReport {
            label: item.label.clone(),
            n_tokens: item.text.len(),
            n_types: table.n_types(),
            block_ml,
            block_nsb,
            source,
            predicted_source: block_nsb
                .map(|h| predict_source_from_block(h, &RegressionFit::DEFAULT)),
        },
        numeric_errors,
    }
}

fn render_tsv(report: &Report) -> String {
    let mut out = COLUMNS.join("\t");
    out.push('\n');
    for r in &report.rows {
        let fields = [
            cell(&r.label),
            r.n_tokens.to_string(),
            r.n_types.to_string(),
            fmt4(r.block_ml),
            fmt4(r.block_nsb),
            fmt4(r.source),
            fmt4(r.predicted_source),
        ];
        out.push_str(&fields.join("\t"));
        out.push('\n');
    }
    for s in &report.skipped {
        out.push_str(&format!(
            "# skipped\t{}\t{}\t{}\n",
            cell(&s.label),
            s.n_tokens,
            s.reason
        ));
    }
    for e in &report.errors {
        out.push_str(&format!(
            "# error\t{}\t{}\n",
            cell(&e.path),
            cell(&e.message)
        ));
    }
    if let Some(ts) = report.generated_unix {
        out.push_str(&format!("# generated_unix\t{ts}\n"));
    }
    out
}

pub fn run(args: EntropyArgs) -> Result<(), CliError> {
    let settings = Settings::resolve(
        &args.common,
        Overrides {
            min_tokens: args.min_tokens,
            ..Overrides::default()
        },
    )?;
    let (texts, mut errors) =
        settings.install(|| load_texts(&args.common.paths, settings.nfc))??;
    let (qualifying, short): (Vec<_>, Vec<_>) = texts
        .into_iter()
        .partition(|t| t.text.len() >= settings.min_tokens);
    let skipped: Vec<Skipped> = short
        .iter()
        .map(|t| Skipped {
            label: t.label.clone(),
            n_tokens: t.text.len(),
            reason: format!("below min_tokens {}", settings.min_tokens),
        })
        .collect();
    let outcomes =
        settings.install(|| Exec::Parallel.map(&qualifying, |t| estimate(t, &settings)))?;

    let mut numeric_failure = false;
    let mut rows = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        numeric_failure |= !outcome.numeric_errors.is_empty();
        errors.extend(outcome.numeric_errors);
        rows.push(outcome.row);
    }
    let report = Report {
        generated_unix: timestamp(settings.deterministic),
        rows,
        skipped,
        errors,
    };
    let rendered = match settings.format {
        Format::Tsv => render_tsv(&report),
        Format::Json => {
            let rounded = Report {
                rows: report
                    .rows
                    .iter()
                    .map(|r| TextReport {
                        block_ml: round4(r.block_ml),
                        block_nsb: round4(r.block_nsb),
                        source: round4(r.source),
                        predicted_source: round4(r.predicted_source),
                        ..r.clone()
                    })
                    .collect(),
                ..report.clone()
            };
            to_json(&rounded)
        }
    };
    write_stdout(&rendered)?;
    for e in &report.errors {
        eprintln!("wordent: {}: {}", e.path, e.message);
    }
    if report.rows.is_empty() {
        return Err(CliError::NoInput("no qualifying texts".into()));
    }
    if numeric_failure {
        return Err(CliError::Numeric("one or more estimators failed".into()));
    }
    Ok(())
}
