//! End-to-end tests of the command-line interface: exit codes, file outputs,
//! and diagnostics.

mod common;

use std::path::Path;
use std::process::{Command, Output};

use congraph::{sample_mvn, MvnModel};

fn congraph_cmd(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_congraph"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_observations_csv(path: &Path, rows: &[Vec<f64>], header: bool) {
    let mut text = String::new();
    if header {
        let cols: Vec<String> = (1..=rows[0].len()).map(|i| format!("x{i}")).collect();
        text.push_str(&cols.join(","));
        text.push('\n');
    }
    for row in rows {
        let fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        text.push_str(&fields.join(","));
        text.push('\n');
    }
    std::fs::write(path, text).unwrap();
}

fn gaussian_rows(seed: u64, n: usize, dim: usize) -> Vec<Vec<f64>> {
    let model = MvnModel::standard(dim).unwrap();
    let mut rng = common::rng(seed);
    let data = sample_mvn(&model, n, &mut rng).unwrap();
    (0..n).map(|t| data.row(t).to_vec()).collect()
}

#[test]
fn select_on_independent_data_finds_no_edges() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("data.csv");
    write_observations_csv(&input, &gaussian_rows(501, 500, 3), true);
    let out = congraph_cmd(
        dir.path(),
        &[
            "select", "--input", "data.csv", "--alpha", "0.1", "--method", "delta2",
        ],
    );
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("variables (N): 3"));
    assert!(stdout.contains("observations (n): 500"));
    assert!(stdout.contains("pairs (M): 3"));
    assert!(stdout.contains("edges found: 0"));
    assert_eq!(
        std::fs::read_to_string(dir.path().join("edges.txt")).unwrap(),
        ""
    );
    let dense = std::fs::read_to_string(dir.path().join("adjacency.csv")).unwrap();
    assert_eq!(dense, "0,0,0\n0,0,0\n0,0,0\n");
}

#[test]
fn select_flags_nearly_collinear_pair() {
    // y tracks x up to rounding; the partial correlation is essentially 1
    // and the pair is selected at any level.
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pair.csv");
    let mut rng = common::rng(77);
    let rows: Vec<Vec<f64>> = (0..50)
        .map(|_| {
            let x = common::uniform_in(&mut rng, -1.0, 1.0);
            let dither = common::uniform_in(&mut rng, -1e-6, 1e-6);
            vec![x, 2.0 * x + dither]
        })
        .collect();
    write_observations_csv(&input, &rows, false);
    let out = congraph_cmd(
        dir.path(),
        &[
            "select", "--input", "pair.csv", "--alpha", "0.01", "--method", "delta2",
        ],
    );
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        std::fs::read_to_string(dir.path().join("edges.txt")).unwrap(),
        "1,2\n"
    );
}

#[test]
fn select_reports_malformed_row_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bad.csv"),
        "1.0,2.0\n3.0,4.0\n5.0,oops\n7.0,8.0\n",
    )
    .unwrap();
    let out = congraph_cmd(dir.path(), &["select", "--input", "bad.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(
        stderr.contains("line 3"),
        "diagnostic names the row: {stderr}"
    );
}

#[test]
fn select_exits_3_on_degenerate_covariance() {
    let dir = tempfile::tempdir().unwrap();
    // an exactly duplicated column keeps the covariance singular
    let rows: Vec<Vec<f64>> = (0..20)
        .map(|t| {
            let x = (t as f64).sin();
            vec![x, x, (t as f64).cos()]
        })
        .collect();
    write_observations_csv(&dir.path().join("sing.csv"), &rows, false);
    let out = congraph_cmd(dir.path(), &["select", "--input", "sing.csv"]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("positive definite"), "stderr: {stderr}");
}

#[test]
fn select_transpose_handles_variables_in_rows() {
    let dir = tempfile::tempdir().unwrap();
    let rows = gaussian_rows(502, 40, 3);
    // write transposed: 3 rows of 40 observations
    let transposed: Vec<Vec<f64>> = (0..3)
        .map(|i| rows.iter().map(|r| r[i]).collect())
        .collect();
    write_observations_csv(&dir.path().join("t.csv"), &transposed, false);
    let out = congraph_cmd(dir.path(), &["select", "--input", "t.csv", "--transpose"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("variables (N): 3"));
    assert!(stdout.contains("observations (n): 40"));
}

#[test]
fn select_divisor_flag_leaves_scale_free_decisions_unchanged() {
    // partial correlations are invariant under rescaling the covariance, so
    // both divisor conventions select the same graph
    let dir = tempfile::tempdir().unwrap();
    write_observations_csv(&dir.path().join("d.csv"), &gaussian_rows(503, 30, 4), false);
    let mut edge_lists = Vec::new();
    for divisor in ["n", "n-1"] {
        let out = congraph_cmd(
            dir.path(),
            &[
                "select",
                "--input",
                "d.csv",
                "--alpha",
                "0.2",
                "--divisor",
                divisor,
            ],
        );
        assert!(out.status.success());
        edge_lists.push(std::fs::read_to_string(dir.path().join("edges.txt")).unwrap());
    }
    assert_eq!(edge_lists[0], edge_lists[1]);
}

#[test]
fn thresholds_uniform_case_and_identity() {
    let dir = tempfile::tempdir().unwrap();
    let out = congraph_cmd(
        dir.path(),
        &[
            "thresholds",
            "--n-vars",
            "3",
            "--n-obs",
            "5",
            "--alpha",
            "0.1",
        ],
    );
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("K = (n - N - 2) / 2: 0"), "{stdout}");
    let q: f64 = field_after(&stdout, "q (alpha/2 beta quantile): ");
    assert!((q - 0.05).abs() < 1e-9);
    let r: f64 = field_after(&stdout, "r threshold 1 - 2q: ");
    assert!((r - 0.9).abs() < 1e-9);
    let c: f64 = field_after(&stdout, "exact r threshold c: ");
    assert!((c - r).abs() < 1e-9, "c = {c} vs 1 - 2q = {r}");
}

#[test]
fn thresholds_prints_normal_quantile() {
    let dir = tempfile::tempdir().unwrap();
    let out = congraph_cmd(
        dir.path(),
        &[
            "thresholds",
            "--n-vars",
            "4",
            "--n-obs",
            "30",
            "--alpha",
            "0.05",
        ],
    );
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let z: f64 = field_after(&stdout, "fisher z threshold: ");
    assert!((z - 1.959_963_985).abs() < 1e-8);
}

#[test]
fn thresholds_rejects_too_small_sample() {
    let dir = tempfile::tempdir().unwrap();
    let out = congraph_cmd(dir.path(), &["thresholds", "--n-vars", "5", "--n-obs", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_writes_expected_grid_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "simulate",
        "--n-vars",
        "3",
        "--n-grid",
        "4:8",
        "--alpha",
        "0.1",
        "--reps",
        "300",
        "--methods",
        "delta1,delta2",
        "--seed",
        "42",
        "--out",
        "curve.csv",
    ];
    let out = congraph_cmd(dir.path(), &args);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let first = std::fs::read(dir.path().join("curve.csv")).unwrap();
    let text = String::from_utf8(first.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "method,n,fwer,reps,stderr,failures");
    assert_eq!(lines.len(), 1 + 2 * 5, "two methods over n = 4..8");
    // second run is byte-identical
    let out = congraph_cmd(dir.path(), &args);
    assert!(out.status.success());
    assert_eq!(std::fs::read(dir.path().join("curve.csv")).unwrap(), first);
}

#[test]
fn simulate_rejects_bad_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = congraph_cmd(
        dir.path(),
        &[
            "simulate", "--n-vars", "3", "--n-grid", "9:4", "--reps", "10",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_accepts_custom_covariance() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("lambda.csv"),
        "1.0,0.5,0.0\n0.5,1.0,0.0\n0.0,0.0,1.0\n",
    )
    .unwrap();
    let out = congraph_cmd(
        dir.path(),
        &[
            "simulate",
            "--lambda",
            "lambda.csv",
            "--n-grid",
            "12",
            "--reps",
            "200",
            "--methods",
            "delta2",
            "--seed",
            "7",
            "--out",
            "c.csv",
        ],
    );
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert!(text.starts_with("method,n,fwer,reps,stderr,failures\ndelta2,12,"));
}

#[test]
fn missing_input_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = congraph_cmd(dir.path(), &["select", "--input", "nope.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

fn field_after(text: &str, prefix: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(prefix))
        .unwrap_or_else(|| panic!("missing line starting with {prefix:?} in:\n{text}"))
        .trim()
        .parse()
        .unwrap()
}
