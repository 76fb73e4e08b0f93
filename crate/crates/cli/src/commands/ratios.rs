use std::collections::BTreeSet;
use std::path::Path;

use serde::Serialize;
use word_entropy::{
    entropy_ratio_matrix, pearson_r, EntropyRatioMatrix, LabeledPair, PairedSeries,
};

use super::{column, parse_cell, read_tsv};
use crate::error::CliError;
use crate::output::{cell, fmt4, round4, to_json, write_stdout};
use crate::{Format, RatiosArgs};

#[derive(Debug, Serialize)]
struct BleuCorrelation {
    n: usize,
    pearson_r: f64,
}

#[derive(Debug, Serialize)]
struct Report {
    labels: Vec<String>,
    ratios: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bleu: Option<BleuCorrelation>,
}

/// `(label, entropy)` pairs from a report column or a label/value file.
fn read_entropies(path: &Path, column_name: &str) -> Result<Vec<(String, f64)>, CliError> {
    let (header, rows) = read_tsv(path)?;
    let label = column(&header, "label", path)?;
    let value = header
        .iter()
        .position(|h| h == column_name)
        .or_else(|| header.iter().position(|h| h == "value"))
        .ok_or_else(|| {
            CliError::Usage(format!(
                "{}: needs a {column_name:?} or \"value\" column",
                path.display()
            ))
        })?;
    let mut out = Vec::new();
    for row in &rows {
        let name = row.get(label).cloned().unwrap_or_default();
        let cell_value = row.get(value).map(String::as_str).unwrap_or("");
        match parse_cell(cell_value, &format!("{} row {name:?}", path.display()))? {
            Some(h) => out.push((name, h)),
            None => eprintln!("wordent: {name}: no {column_name} value, left out"),
        }
    }
    Ok(out)
}

/// Off-diagonal ratios paired with BLEU scores for the same direction.
fn bleu_pairs(path: &Path, matrix: &EntropyRatioMatrix) -> Result<Vec<LabeledPair>, CliError> {
    let (header, rows) = read_tsv(path)?;
    let src = column(&header, "src_label", path)?;
    let tgt = column(&header, "tgt_label", path)?;
    let bleu = column(&header, "bleu", path)?;
    let known: BTreeSet<&str> = matrix.labels.iter().map(String::as_str).collect();
    let mut unknown = BTreeSet::new();
    let mut pairs = Vec::new();
    for row in &rows {
        let get = |i: usize| row.get(i).map(String::as_str).unwrap_or("");
        for label in [get(src), get(tgt)] {
            if !known.contains(label) {
                unknown.insert(label.to_string());
            }
        }
        if !unknown.is_empty() {
            continue;
        }
        let what = format!("{} row {}→{}", path.display(), get(src), get(tgt));
        let Some(score) = parse_cell(get(bleu), &what)? else {
            continue;
        };
        let ratio = matrix
            .get(get(src), get(tgt))
            .expect("labels checked above");
        pairs.push(LabeledPair::new(
            format!("{}-{}", get(src), get(tgt)),
            ratio,
            score,
        ));
    }
    if !unknown.is_empty() {
        let list: Vec<String> = unknown.into_iter().collect();
        return Err(CliError::Usage(format!(
            "BLEU table labels without an entropy: {}",
            list.join(", ")
        )));
    }
    Ok(pairs)
}

pub fn run(args: RatiosArgs) -> Result<(), CliError> {
    let mut entropies = read_entropies(&args.input, &args.column)?;
    if entropies.is_empty() {
        return Err(CliError::NoInput("no entropies to compare".into()));
    }
    entropies.sort_by(|a, b| a.0.cmp(&b.0));
    let matrix = entropy_ratio_matrix(&entropies)?;
    let bleu = match &args.bleu {
        Some(path) => {
            let pairs = bleu_pairs(path, &matrix)?;
            let n = pairs.len();
            let r = pearson_r(&PairedSeries::new(pairs))?;
            Some(BleuCorrelation { n, pearson_r: r })
        }
        None => None,
    };
    let rendered = match args.format {
        Format::Tsv => {
            let mut out = String::from("label");
            for l in &matrix.labels {
                out.push('\t');
                out.push_str(&cell(l));
            }
            out.push('\n');
            for (l, row) in matrix.labels.iter().zip(&matrix.ratios) {
                out.push_str(&cell(l));
                for &v in row {
                    out.push('\t');
                    out.push_str(&fmt4(Some(v)));
                }
                out.push('\n');
            }
            if let Some(b) = &bleu {
                out.push_str(&format!(
                    "# bleu_pearson_r\t{}\tn={}\n",
                    fmt4(Some(b.pearson_r)),
                    b.n
                ));
            }
            out
        }
        Format::Json => {
            let r4 = |v: f64| round4(Some(v)).unwrap_or(v);
            to_json(&Report {
                labels: matrix.labels.clone(),
                ratios: matrix
                    .ratios
                    .iter()
                    .map(|row| row.iter().map(|&v| r4(v)).collect())
                    .collect(),
                bleu: bleu.map(|b| BleuCorrelation {
                    pearson_r: r4(b.pearson_r),
                    ..b
                }),
            })
        }
    };
    write_stdout(&rendered)?;
    Ok(())
}
