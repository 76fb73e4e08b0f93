use std::path::Path;

use serde::Serialize;
use word_entropy::analysis::{mean, sample_sd};
use word_entropy::{ols_fit, pearson_r, LabeledPair, PairedSeries, RegressionFit};

use super::{parse_cell, read_tsv};
use crate::error::CliError;
use crate::output::{round4, to_json, write_stdout};
use crate::{AnalyzeArgs, Format};

#[derive(Debug, Serialize)]
struct Summary {
    x: String,
    y: String,
    n: usize,
    n_excluded: usize,
    n_missing: usize,
    mean_x: f64,
    sd_x: f64,
    mean_y: f64,
    sd_y: f64,
    pearson_r: f64,
    slope: f64,
    intercept: f64,
    mean_abs_residual: f64,
    /// `mean(y) - mean(-1.59 + 0.82·x)`.
    default_model_mean_diff: f64,
    default_model_mean_abs_residual: f64,
}

/// Picks `preferred` if present, otherwise the generic column `fallback`.
fn pick(
    header: &[String],
    preferred: &str,
    fallback: &str,
    path: &Path,
) -> Result<usize, CliError> {
    header
        .iter()
        .position(|h| h == preferred)
        .or_else(|| header.iter().position(|h| h == fallback))
        .ok_or_else(|| {
            CliError::Usage(format!(
                "{}: needs a {preferred:?} or {fallback:?} column",
                path.display()
            ))
        })
}

/// Labeled pairs from a report or pairs file, and the number of rows with a
/// missing value.
fn read_pairs(args: &AnalyzeArgs) -> Result<(Vec<LabeledPair>, usize), CliError> {
    let path = &args.input;
    let (header, rows) = read_tsv(path)?;
    let label = super::column(&header, "label", path)?;
    let xi = pick(&header, &args.x, "x", path)?;
    let yi = pick(&header, &args.y, "y", path)?;
    let mut pairs = Vec::new();
    let mut missing = 0;
    for row in &rows {
        let get = |i: usize| row.get(i).map(String::as_str).unwrap_or("");
        let what = format!("{} row {:?}", path.display(), get(label));
        match (parse_cell(get(xi), &what)?, parse_cell(get(yi), &what)?) {
            (Some(x), Some(y)) => pairs.push(LabeledPair::new(get(label), x, y)),
            _ => missing += 1,
        }
    }
    Ok((pairs, missing))
}

pub fn run(args: AnalyzeArgs) -> Result<(), CliError> {
    let (pairs, n_missing) = read_pairs(&args)?;
    for label in &args.exclude {
        if !pairs.iter().any(|p| &p.label == label) {
            eprintln!("wordent: excluded label {label:?} not found");
        }
    }
    let series = PairedSeries::new(pairs).excluding(args.exclude.iter().cloned());
    let n_total = series.pairs.len();
    let (xs, ys): (Vec<f64>, Vec<f64>) = series.active().map(|p| (p.x, p.y)).unzip();
    if xs.len() < 2 {
        return Err(CliError::NoInput(format!(
            "need at least 2 usable pairs, found {}",
            xs.len()
        )));
    }
    let r = pearson_r(&series)?;
    let fit = ols_fit(&series)?;
    let predicted: Vec<f64> = xs
        .iter()
        .map(|&x| RegressionFit::DEFAULT.predict(x))
        .collect();
    let summary = Summary {
        x: args.x.clone(),
        y: args.y.clone(),
        n: xs.len(),
        n_excluded: n_total - xs.len(),
        n_missing,
        mean_x: mean(&xs),
        sd_x: sample_sd(&xs),
        mean_y: mean(&ys),
        sd_y: sample_sd(&ys),
        pearson_r: r,
        slope: fit.slope,
        intercept: fit.intercept,
        mean_abs_residual: fit.mean_abs_residual,
        default_model_mean_diff: mean(&ys) - mean(&predicted),
        default_model_mean_abs_residual: ys
            .iter()
            .zip(&predicted)
            .map(|(y, p)| (y - p).abs())
            .sum::<f64>()
            / ys.len() as f64,
    };
    let r4 = |v: f64| round4(Some(v)).unwrap_or(v);
    let rendered = match args.format {
        Format::Tsv => {
            let stats = [
                ("mean_x", summary.mean_x),
                ("sd_x", summary.sd_x),
                ("mean_y", summary.mean_y),
                ("sd_y", summary.sd_y),
                ("pearson_r", summary.pearson_r),
                ("slope", summary.slope),
                ("intercept", summary.intercept),
                ("mean_abs_residual", summary.mean_abs_residual),
                ("default_model_mean_diff", summary.default_model_mean_diff),
                (
                    "default_model_mean_abs_residual",
                    summary.default_model_mean_abs_residual,
                ),
            ];
            let mut out = String::from("statistic\tvalue\n");
            out.push_str(&format!("x\t{}\ny\t{}\n", summary.x, summary.y));
            out.push_str(&format!(
                "n\t{}\nn_excluded\t{}\nn_missing\t{}\n",
                summary.n, summary.n_excluded, summary.n_missing
            ));
            for (name, value) in stats {
                out.push_str(&format!("{name}\t{value:.4}\n"));
            }
            out
        }
        Format::Json => to_json(&Summary {
            mean_x: r4(summary.mean_x),
            sd_x: r4(summary.sd_x),
            mean_y: r4(summary.mean_y),
            sd_y: r4(summary.sd_y),
            pearson_r: r4(summary.pearson_r),
            slope: r4(summary.slope),
            intercept: r4(summary.intercept),
            mean_abs_residual: r4(summary.mean_abs_residual),
            default_model_mean_diff: r4(summary.default_model_mean_diff),
            default_model_mean_abs_residual: r4(summary.default_model_mean_abs_residual),
            ..summary
        }),
    };
    write_stdout(&rendered)?;
    Ok(())
}
