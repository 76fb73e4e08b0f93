use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const VERSE: &str = "GEN 1:1\tIn the beginning God created the heavens and the earth.\n\
                     GEN 1:2\tAnd the earth was waste and empty\n";

fn wordent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wordent"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Data rows of a TSV (header and `#` lines dropped), split into cells.
fn rows(tsv: &str) -> Vec<Vec<String>> {
    tsv.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').map(str::to_string).collect())
        .collect()
}

fn stat(tsv: &str, name: &str) -> f64 {
    tsv.lines()
        .find_map(|l| l.strip_prefix(&format!("{name}\t")))
        .unwrap_or_else(|| panic!("no {name} in\n{tsv}"))
        .parse()
        .unwrap()
}

fn synth(dir: &Path, name: &str, kind: &str, v: &str, n: &str, seed: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    let out = wordent(&[
        "synth",
        "--kind",
        kind,
        "--v",
        v,
        "--exp",
        "1.0",
        "--n",
        n,
        "--seed",
        seed,
        "--out",
        p(&path),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    path
}

#[test]
fn verse_ml_entropy() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("verse.txt");
    fs::write(&file, VERSE).unwrap();
    let out = wordent(&[
        "entropy",
        p(&file),
        "--min-tokens",
        "1",
        "--estimator",
        "ml",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text
        .starts_with("label\tn_tokens\tn_types\tblock_ml\tblock_nsb\tsource\tpredicted_source\n"));
    let r = &rows(&text)[0];
    assert_eq!(r[0..3], ["verse", "17", "11"]);
    assert!((r[3].parse::<f64>().unwrap() - 3.2196).abs() <= 5e-4);
    assert_eq!(r[4..], ["NA", "NA", "NA"]);
}

#[test]
fn empty_directory_exits_2() {
    let dir = TempDir::new().unwrap();
    let out = wordent(&["entropy", p(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no qualifying texts"));
}

#[test]
fn bad_file_is_reported_and_run_continues() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("a.txt"), VERSE).unwrap();
    fs::write(dir.path().join("b.txt"), "one two three two one").unwrap();
    fs::write(dir.path().join("c.txt"), b"abc \xff\xfe def").unwrap();
    let out = wordent(&[
        "entropy",
        p(dir.path()),
        "--min-tokens",
        "1",
        "--deterministic",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let labels: Vec<String> = rows(&text).into_iter().map(|r| r[0].clone()).collect();
    assert_eq!(labels, ["a", "b"]);
    let errors: Vec<&str> = text.lines().filter(|l| l.starts_with("# error")).collect();
    assert_eq!(errors.len(), 1);
    assert!(errors[0].contains("c.txt"));
    assert!(stderr(&out).contains("c.txt"));
}

#[test]
fn short_texts_are_listed_as_skipped() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("verse.txt");
    fs::write(&file, VERSE).unwrap();
    let long = synth(dir.path(), "z.txt", "zipf", "100", "500", "1");
    let out = wordent(&["entropy", p(&file), p(&long), "--min-tokens", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(rows(&text).len(), 1);
    assert!(text.contains("# skipped\tverse\t17\tbelow min_tokens 100"));
}

#[test]
fn output_is_deterministic_across_worker_counts() {
    let dir = TempDir::new().unwrap();
    for seed in 0..6 {
        synth(
            dir.path(),
            &format!("t{seed}.txt"),
            "zipf",
            "500",
            "3000",
            &seed.to_string(),
        );
    }
    let run = |workers: &str, format: &str| {
        let out = wordent(&[
            "entropy",
            p(dir.path()),
            "--min-tokens",
            "1",
            "--deterministic",
            "--workers",
            workers,
            "--format",
            format,
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        out.stdout
    };
    assert_eq!(run("1", "tsv"), run("4", "tsv"));
    assert_eq!(run("1", "json"), run("3", "json"));

    let with_time = stdout(&wordent(&["entropy", p(dir.path()), "--min-tokens", "1"]));
    assert!(with_time.contains("# generated_unix\t"));
}

#[test]
fn json_mirrors_tsv() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("verse.txt");
    fs::write(&file, VERSE).unwrap();
    let common = ["entropy", p(&file), "--min-tokens", "1", "--deterministic"];
    let tsv = stdout(&wordent(&common));
    let json = stdout(&wordent(&[&common[..], &["--format", "json"]].concat()));
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    let row = &value["rows"][0];
    let cells = &rows(&tsv)[0];
    let header: Vec<&str> = tsv.lines().next().unwrap().split('\t').collect();
    for (name, cell) in header.iter().zip(cells) {
        match &row[name] {
            serde_json::Value::String(s) => assert_eq!(s, cell),
            serde_json::Value::Number(n) => {
                assert!((n.as_f64().unwrap() - cell.parse::<f64>().unwrap()).abs() < 1e-9)
            }
            other => panic!("{name}: {other:?}"),
        }
    }
    assert!(value.get("generated_unix").is_none());
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("verse.txt");
    fs::write(&file, VERSE).unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(
        &cfg,
        "# test\nmin_tokens = 1\nestimator = ml\nformat = json\n",
    )
    .unwrap();

    let out = wordent(&["entropy", p(&file), "--config", p(&cfg), "--deterministic"]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(value["rows"][0]["block_nsb"].is_null());

    let out = wordent(&[
        "entropy",
        p(&file),
        "--config",
        p(&cfg),
        "--format",
        "tsv",
        "--min-tokens",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("# skipped\tverse"));

    fs::write(&cfg, "colour = blue\n").unwrap();
    let out = wordent(&["entropy", p(&file), "--config", p(&cfg)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("colour"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(wordent(&["entropy"]).status.code(), Some(1));
    assert_eq!(wordent(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        wordent(&["entropy", ".", "--workers", "0"]).status.code(),
        Some(1)
    );
    assert_eq!(wordent(&["--help"]).status.code(), Some(0));
}

#[test]
fn constant_text_converges_at_fifth_step() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("const.txt");
    fs::write(&file, "amen ".repeat(60_000)).unwrap();
    let out = wordent(&[
        "converge",
        p(&file),
        "--estimator",
        "source",
        "--deterministic",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("# convergence_point\tconst\tsource\t50000\n"));
    let points = rows(&text);
    assert_eq!(points.len(), 6);
    assert_eq!(points[3][4], "NA");
    assert!(points[4][4].parse::<f64>().unwrap() < 0.05);
}

#[test]
fn undersized_text_is_skipped_by_converge() {
    let dir = TempDir::new().unwrap();
    let small = synth(dir.path(), "small.txt", "zipf", "1000", "30000", "1");
    let big = synth(dir.path(), "big.txt", "zipf", "1000", "60000", "1");
    let out = wordent(&["converge", p(&small), p(&big), "--estimator", "ml"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("# skipped\tsmall\t30000\tbelow window×step"));

    let out = wordent(&["converge", p(&small)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zipf_convergence_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let file = synth(dir.path(), "zipf.txt", "zipf", "50000", "200000", "42");
    let args = [
        "converge",
        p(&file),
        "--deterministic",
        "--estimator",
        "source",
    ];
    let first = wordent(&args);
    let second = wordent(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    let line = text
        .lines()
        .find(|l| l.starts_with("# convergence_point"))
        .unwrap();
    let point: usize = line.rsplit('\t').next().unwrap().parse().unwrap();
    assert!(point >= 50_000);
}

fn write_pairs(dir: &Path, pairs: &[(&str, f64, f64)]) -> std::path::PathBuf {
    let path = dir.join("pairs.tsv");
    let mut body = String::from("label\tx\ty\n");
    for (l, x, y) in pairs {
        body.push_str(&format!("{l}\t{x}\t{y}\n"));
    }
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn analyze_recovers_conversion_line() {
    let dir = TempDir::new().unwrap();
    let pairs: Vec<(String, f64, f64)> = (0..10)
        .map(|i| {
            let x = 7.0 + 0.5 * i as f64;
            (format!("t{i}"), x, -1.59 + 0.82 * x)
        })
        .collect();
    let borrowed: Vec<(&str, f64, f64)> =
        pairs.iter().map(|(l, x, y)| (l.as_str(), *x, *y)).collect();
    let file = write_pairs(dir.path(), &borrowed);
    let out = stdout(&wordent(&["analyze", p(&file)]));
    assert_eq!(stat(&out, "slope"), 0.82);
    assert_eq!(stat(&out, "intercept"), -1.59);
    assert_eq!(stat(&out, "pearson_r"), 1.0);
    assert_eq!(stat(&out, "mean_abs_residual"), 0.0);
    assert_eq!(stat(&out, "default_model_mean_diff"), 0.0);
}

#[test]
fn analyze_honors_exclusions() {
    let dir = TempDir::new().unwrap();
    let file = write_pairs(
        dir.path(),
        &[
            ("a", 0.0, 0.0),
            ("b", 1.0, 1.0),
            ("c", 2.0, 2.0),
            ("odd", 3.0, 40.0),
        ],
    );
    let all = stdout(&wordent(&["analyze", p(&file)]));
    assert!(stat(&all, "slope") > 5.0);
    let out = stdout(&wordent(&["analyze", p(&file), "--exclude", "odd,missing"]));
    assert_eq!(stat(&out, "slope"), 1.0);
    assert_eq!(stat(&out, "n"), 3.0);
    assert_eq!(stat(&out, "n_excluded"), 1.0);

    let one = write_pairs(dir.path(), &[("a", 0.0, 0.0)]);
    assert_eq!(wordent(&["analyze", p(&one)]).status.code(), Some(2));
}

#[test]
fn analyze_synthetic_pairs_matches_direct_correlation() {
    let dir = TempDir::new().unwrap();
    // deterministic scatter: y = x/2 plus a bounded pseudo-random wobble
    let mut state = 7u64;
    let mut pairs = Vec::new();
    for i in 0..200 {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let wobble = (state >> 40) as f64 / (1u64 << 24) as f64 - 0.5;
        let x = i as f64 / 20.0;
        pairs.push((format!("p{i}"), x, 0.5 * x + wobble));
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.2).sum::<f64>() / n;
    let cov: f64 = pairs.iter().map(|p| (p.1 - mx) * (p.2 - my)).sum();
    let vx: f64 = pairs.iter().map(|p| (p.1 - mx).powi(2)).sum();
    let vy: f64 = pairs.iter().map(|p| (p.2 - my).powi(2)).sum();
    let oracle = cov / (vx * vy).sqrt();

    let borrowed: Vec<(&str, f64, f64)> =
        pairs.iter().map(|(l, x, y)| (l.as_str(), *x, *y)).collect();
    let file = write_pairs(dir.path(), &borrowed);
    let out = stdout(&wordent(&["analyze", p(&file)]));
    assert!((stat(&out, "pearson_r") - oracle).abs() < 0.01);
}

#[test]
fn analyze_reads_entropy_reports() {
    let dir = TempDir::new().unwrap();
    for seed in 0..4 {
        let v = ["200", "800", "3000", "9000"][seed];
        synth(dir.path(), &format!("t{seed}.txt"), "zipf", v, "5000", "3");
    }
    let report = dir.path().join("report.tsv");
    let out = wordent(&[
        "entropy",
        p(dir.path()),
        "--min-tokens",
        "1",
        "--deterministic",
    ]);
    fs::write(&report, &out.stdout).unwrap();
    let out = wordent(&["analyze", p(&report)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(stat(&text, "n"), 4.0);
    assert!(stat(&text, "pearson_r") > 0.9);
    let ml = stdout(&wordent(&["analyze", p(&report), "--x", "block_ml"]));
    assert!(ml.contains("x\tblock_ml"));
}

fn write_entropies(dir: &Path, entries: &[(&str, f64)]) -> std::path::PathBuf {
    let path = dir.join("entropies.tsv");
    let mut body = String::from("label\tsource\n");
    for (l, h) in entries {
        body.push_str(&format!("{l}\t{h}\n"));
    }
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn ratio_matrix_golden() {
    let dir = TempDir::new().unwrap();
    let file = write_entropies(dir.path(), &[("fi", 8.35), ("en", 6.32)]);
    let out = stdout(&wordent(&["ratios", p(&file)]));
    assert_eq!(
        out,
        "label\ten\tfi\nen\t1.0000\t0.7569\nfi\t1.3212\t1.0000\n"
    );

    let single = write_entropies(dir.path(), &[("xx", 4.0)]);
    assert_eq!(
        stdout(&wordent(&["ratios", p(&single)])),
        "label\txx\nxx\t1.0000\n"
    );

    let zero = write_entropies(dir.path(), &[("a", 4.0), ("b", 0.0)]);
    assert_eq!(wordent(&["ratios", p(&zero)]).status.code(), Some(1));
}

#[test]
fn ratios_against_bleu() {
    let dir = TempDir::new().unwrap();
    let file = write_entropies(dir.path(), &[("de", 7.1), ("en", 6.32), ("fi", 8.35)]);
    let bleu = dir.path().join("bleu.tsv");
    fs::write(
        &bleu,
        "src_label\ttgt_label\tbleu\nen\tfi\t10.0\nfi\ten\t20.0\nen\tde\t15.0\nde\ten\t18.0\n",
    )
    .unwrap();
    let out = wordent(&["ratios", p(&file), "--bleu", p(&bleu)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let line = stdout(&out)
        .lines()
        .find(|l| l.starts_with("# bleu_pearson_r"))
        .unwrap()
        .to_string();
    let r: f64 = line.split('\t').nth(1).unwrap().parse().unwrap();
    assert!(r > 0.9 && r <= 1.0, "{line}");
    assert!(line.ends_with("n=4"));

    fs::write(
        &bleu,
        "src_label\ttgt_label\tbleu\nen\txx\t10.0\nyy\ten\t3.0\n",
    )
    .unwrap();
    let out = wordent(&["ratios", p(&file), "--bleu", p(&bleu)]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("xx") && err.contains("yy"), "{err}");
}

#[test]
fn synth_text_round_trips_through_entropy() {
    let dir = TempDir::new().unwrap();
    let file = synth(dir.path(), "u.txt", "uniform", "6", "20000", "5");
    let out = stdout(&wordent(&[
        "entropy",
        p(&file),
        "--min-tokens",
        "1",
        "--estimator",
        "ml",
    ]));
    let r = &rows(&out)[0];
    assert_eq!(r[1], "20000");
    assert_eq!(r[2], "6");
    assert!((r[3].parse::<f64>().unwrap() - 6f64.log2()).abs() < 0.01);
    assert_eq!(
        wordent(&["synth", "--kind", "zipf", "--n", "10", "--exp", "0"])
            .status
            .code(),
        Some(1)
    );
}
