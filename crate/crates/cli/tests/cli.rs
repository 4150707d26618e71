use std::fs;
use std::path::Path;
use std::process::Command;

use mbfevo_cli::analyze::{analyze_text, cmd_analyze};
use mbfevo_cli::config::ExperimentConfig;
use mbfevo_cli::experiment::{cmd_run, read_runs_csv, summarize};
use mbfevo_cli::penalty::random_fixed_weight;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_config(out: &Path, extra: &str) -> ExperimentConfig {
    let text = format!(
        "runs = 3\nbudget = 3000\nseed = 5\npopulation_size = 30\nout = {:?}\n{extra}",
        out.display().to_string()
    );
    ExperimentConfig::parse(&text).unwrap()
}

const MATRIX: &str = r#"
[[matrix]]
n = [5, 6]
encoding = ["tt", "ttw", "gp"]
scenario = ["balanced", "imbalanced"]
variant = ["fit1", "fit3"]
"#;

#[test]
fn run_then_analyze_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), MATRIX);
    let outcome = cmd_run(&cfg).unwrap();
    assert_eq!(outcome.records.len(), cfg.cells.len() * 3);
    let details: Vec<_> = fs::read_dir(dir.path().join("details")).unwrap().collect();
    assert_eq!(details.len(), outcome.records.len());
    for entry in details {
        let (analysis, record) = cmd_analyze(&entry.unwrap().path()).unwrap();
        let record = record.unwrap();
        assert!(analysis.consistent_with_log(Some(&record)));
        let recomputed = analysis.recomputed_for(&record);
        assert_eq!(recomputed.nonlinearity, record.best_nonlinearity);
        assert_eq!(recomputed.fitness, record.best_fitness);
    }
}

#[test]
fn summary_recomputable_from_runs_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), MATRIX);
    let outcome = cmd_run(&cfg).unwrap();
    let rows = read_runs_csv(&dir.path().join("runs.csv")).unwrap();
    assert_eq!(rows.len(), outcome.records.len());
    assert_eq!(summarize(&rows), outcome.summaries);
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), outcome.summaries.len() + 1);
    let table = fs::read_to_string(dir.path().join("best_table.csv")).unwrap();
    assert!(table.starts_with("configuration,5,6"));
}

#[test]
fn empty_matrix_succeeds_with_empty_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let outcome = cmd_run(&cfg).unwrap();
    assert!(outcome.records.is_empty());
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1);
    assert!(read_runs_csv(&dir.path().join("runs.csv"))
        .unwrap()
        .is_empty());
}

#[test]
fn fixed_weight_sampler_is_uniform_per_position() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (n, w, samples) = (4, 5, 20_000);
    let mut ones = [0usize; 16];
    for _ in 0..samples {
        let tt = random_fixed_weight(n, w, &mut rng).unwrap();
        for i in tt.support() {
            ones[i] += 1;
        }
    }
    let p = w as f64 / 16.0;
    let sigma = (samples as f64 * p * (1.0 - p)).sqrt();
    for c in ones {
        assert!(
            (c as f64 - samples as f64 * p).abs() <= 3.0 * sigma,
            "{ones:?}"
        );
    }
}

#[test]
fn analyze_accepts_all_formats() {
    let (a, _) = analyze_text("3\n00010111\n").unwrap();
    assert!(a.monotone);
    assert_eq!(a.nonlinearity, 2);
    let (b, _) = analyze_text("or(and(x1, x2), and(x3, or(x1, x2)))").unwrap();
    assert_eq!(b, a);
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mbfevo"))
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
    assert_eq!(
        bin().arg("--version").output().unwrap().status.code(),
        Some(0)
    );
    assert_eq!(
        bin().arg("frobnicate").output().unwrap().status.code(),
        Some(1)
    );
    assert_eq!(
        bin()
            .args(["reference", "9", "3"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(1)
    );

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "runs = 0\n").unwrap();
    let out = bin().args(["run", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());

    let missing = dir.path().join("missing.txt");
    assert_eq!(
        bin()
            .arg("analyze")
            .arg(&missing)
            .output()
            .unwrap()
            .status
            .code(),
        Some(1)
    );

    // output directory blocked by a regular file: a failure while working
    let blocker = dir.path().join("blocker");
    fs::write(&blocker, "").unwrap();
    let good = dir.path().join("good.toml");
    fs::write(&good, "runs = 1\n").unwrap();
    let out = bin()
        .args(["run", "--config"])
        .arg(&good)
        .arg("--out")
        .arg(blocker.join("sub"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn binary_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(
        &cfg,
        "[[cells]]\nn = 5\nencoding = \"gp\"\nscenario = \"imb\"\nvariant = \"fit2\"\n",
    )
    .unwrap();
    let out_dir = dir.path().join("o");
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .args(["--runs", "2", "--budget", "2000", "--seed", "3", "--out"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("imb: GP, fit2"));

    let detail = out_dir.join("details").join("imb-GP-fit2-n5-run00.json");
    let out = bin().arg("analyze").arg(&detail).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("logged fitness"));

    let csv = dir.path().join("p.csv");
    let out = bin()
        .args(["penalty-sample", "4", "--samples", "3", "--out"])
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 18);

    let out = bin().args(["reference", "5", "6"]).output().unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 3);
}
