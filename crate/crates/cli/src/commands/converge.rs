use serde::Serialize;
use word_entropy::{convergence_point, trajectory, Exec, NsbConfig, TrajectoryEstimator};

use super::{load_texts, FileError, LoadedText};
use crate::config::{Overrides, Settings};
use crate::error::CliError;
use crate::output::{cell, fmt4, round4, timestamp, to_json, write_stdout};
use crate::{ConvergeArgs, EstimatorChoice, Format};

use super::entropy::Skipped;

#[derive(Debug, Clone, Copy, Serialize)]
struct Point {
    prefix_size: usize,
    bits: f64,
    /// Trailing-window SD; absent before the window fills.
    sd: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
struct Series {
    label: String,
    estimator: &'static str,
    points: Vec<Point>,
    convergence_point: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
struct Report {
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_unix: Option<u64>,
    step: usize,
    threshold: f64,
    window: usize,
    series: Vec<Series>,
    skipped: Vec<Skipped>,
    errors: Vec<FileError>,
}

fn estimators(settings: &Settings) -> Vec<TrajectoryEstimator> {
    let mut out = Vec::new();
    if settings.wants(EstimatorChoice::Ml) {
        out.push(TrajectoryEstimator::Ml);
    }
    if settings.wants(EstimatorChoice::Nsb) {
        out.push(TrajectoryEstimator::Nsb(NsbConfig::default()));
    }
    if settings.wants(EstimatorChoice::Source) {
        out.push(TrajectoryEstimator::Source(settings.convention()));
    }
    out
}

fn analyze_text(item: &LoadedText, settings: &Settings) -> Vec<word_entropy::Result<Series>> {
    estimators(settings)
        .iter()
        .map(|est| {
            let traj = trajectory(&item.text, settings.step, est, Exec::Sequential)?;
            let report = convergence_point(traj, settings.threshold, settings.window)?;
            let offset = settings.window - 1;
            let points = report
                .trajectory
                .points
                .iter()
                .enumerate()
                .map(|(k, (size, e))| Point {
                    prefix_size: *size,
                    bits: e.bits,
                    sd: k.checked_sub(offset).map(|j| report.sd_series[j].sd),
                })
                .collect();
            Ok(Series {
                label: item.label.clone(),
                estimator: est.name(),
                points,
                convergence_point: report.convergence_point,
            })
        })
        .collect()
}

fn render_tsv(report: &Report) -> String {
    let mut out = String::from("label\testimator\tprefix_size\tbits\tsd\n");
    for s in &report.series {
        for p in &s.points {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                cell(&s.label),
                s.estimator,
                p.prefix_size,
                fmt4(Some(p.bits)),
                fmt4(p.sd)
            ));
        }
    }
    for s in &report.series {
        let point = s
            .convergence_point
            .map_or("NA".to_string(), |c| c.to_string());
        out.push_str(&format!(
            "# convergence_point\t{}\t{}\t{point}\n",
            cell(&s.label),
            s.estimator
        ));
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
    out.push_str(&format!(
        "# settings\tstep={}\tthreshold={}\twindow={}\n",
        report.step, report.threshold, report.window
    ));
    if let Some(ts) = report.generated_unix {
        out.push_str(&format!("# generated_unix\t{ts}\n"));
    }
    out
}

pub fn run(args: ConvergeArgs) -> Result<(), CliError> {
    let settings = Settings::resolve(
        &args.common,
        Overrides {
            step: args.step,
            threshold: args.threshold,
            window: args.window,
            ..Overrides::default()
        },
    )?;
    let (texts, mut errors) =
        settings.install(|| load_texts(&args.common.paths, settings.nfc))??;
    let required = settings.window * settings.step;
    let (qualifying, short): (Vec<_>, Vec<_>) =
        texts.into_iter().partition(|t| t.text.len() >= required);
    let skipped = short
        .iter()
        .map(|t| Skipped {
            label: t.label.clone(),
            n_tokens: t.text.len(),
            reason: format!("below window×step ({required} tokens)"),
        })
        .collect();
    let results =
        settings.install(|| Exec::Parallel.map(&qualifying, |t| analyze_text(t, &settings)))?;

    let mut numeric_failure = false;
    let mut series = Vec::new();
    for (item, per_estimator) in qualifying.iter().zip(results) {
        for result in per_estimator {
            match result {
                Ok(s) => series.push(s),
                Err(e) => {
                    numeric_failure |= matches!(e, word_entropy::Error::Numeric { .. });
                    errors.push(FileError {
                        path: item.path.display().to_string(),
                        message: e.to_string(),
                    });
                }
            }
        }
    }
    let report = Report {
        generated_unix: timestamp(settings.deterministic),
        step: settings.step,
        threshold: settings.threshold,
        window: settings.window,
        series,
        skipped,
        errors,
    };
    let rendered = match settings.format {
        Format::Tsv => render_tsv(&report),
        Format::Json => {
            let series = report
                .series
                .iter()
                .map(|s| Series {
                    points: s
                        .points
                        .iter()
                        .map(|p| Point {
                            bits: round4(Some(p.bits)).unwrap_or(p.bits),
                            sd: round4(p.sd),
                            ..*p
                        })
                        .collect(),
                    ..s.clone()
                })
                .collect();
            to_json(&Report {
                series,
                ..report.clone()
            })
        }
    };
    write_stdout(&rendered)?;
    for e in &report.errors {
        eprintln!("wordent: {}: {}", e.path, e.message);
    }
    if report.series.is_empty() {
        return Err(CliError::NoInput("no qualifying texts".into()));
    }
    if numeric_failure {
        return Err(CliError::Numeric("one or more estimators failed".into()));
    }
    Ok(())
}
