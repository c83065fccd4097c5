//! End-to-end tests of the `qcorr` binary: output contracts, exit codes,
//! and byte-level determinism of the file-producing commands.

use std::process::{Command, Output};

fn qcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcorr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn qcorr_with_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcorr"))
        .args(args)
        .env("QCORR_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Extract the numeric value of a report line like `min sampled: 0.1770...`.
fn line_value(text: &str, prefix: &str) -> f64 {
    let line = text
        .lines()
        .find(|l| l.starts_with(prefix))
        .unwrap_or_else(|| panic!("no line starting with `{prefix}` in:\n{text}"));
    let rest = line.strip_prefix(prefix).unwrap().trim_start_matches(':').trim();
    let number = rest.split_whitespace().next().unwrap();
    number.parse().unwrap()
}

#[test]
fn info_benatti_reports_maximally_mixed_marginal() {
    let out = qcorr(&["info", "benatti"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("dims: 4x4"));
    assert!(text.contains("ppt: true"));
    assert!(text.contains("|x| 0.000000000000"));
    assert!(text.contains("0.250000000000, 0.250000000000, 0.250000000000, 0.250000000000"));
    assert!(text.contains("marginal: degenerate"));
}

#[test]
fn info_tiles_reports_non_degenerate_marginal() {
    let out = qcorr(&["info", "tiles"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("marginal: non-degenerate"));
}

#[test]
fn info_out_of_range_parameter_is_a_domain_error() {
    let out = qcorr(&["info", "horodecki2x4:a=2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("`a`"));
}

#[test]
fn info_unknown_family_is_a_usage_error() {
    let out = qcorr(&["info", "nosuchstate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn measure_pyramid_reports_exact_values_and_converged_sampling() {
    let out = qcorr(&[
        "measure", "pyramid", "both", "--trials", "4000", "--seed", "7", "--refine",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let gd_exact = line_value(&text, "gd exact");
    assert!((gd_exact - 0.10461).abs() < 1e-5);
    let min_exact = line_value(&text, "min exact");
    assert!((min_exact - 0.17705).abs() < 1e-5);
    let min_sampled = line_value(&text, "min sampled");
    assert!((min_sampled - min_exact).abs() < 1e-4);
}

#[test]
fn measure_horodecki_3x3_prints_the_bound_pair() {
    let out = qcorr(&["measure", "horodecki3x3:beta=2.5", "gd"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("gd lower-bound: 0.056122448980"));
    assert!(text.contains("gd upper-bound (trial measurement): 0.060374149660"));
}

#[test]
fn measure_key_state_min_sampling_stays_in_the_bracket() {
    let out = qcorr(&[
        "measure", "horodecki4x4key", "min", "--trials", "20000", "--seed", "1", "--refine",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let upper = line_value(&text, "min upper-bound");
    assert!((upper - 0.14543).abs() < 1e-5);
    let sampled = line_value(&text, "min sampled");
    assert!(sampled >= 0.142 && sampled <= upper + 1e-9);
}

#[test]
fn sweep_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("a1.csv");
    let p2 = dir.path().join("a2.csv");
    for p in [&p1, &p2] {
        let out = qcorr(&[
            "sweep", "horodecki2x4", "--param", "a", "--from", "0", "--to", "1", "--step",
            "0.05", "--out", p.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let b1 = std::fs::read(&p1).unwrap();
    let b2 = std::fs::read(&p2).unwrap();
    assert_eq!(b1, b2);
    let text = String::from_utf8(b1).unwrap();
    assert_eq!(text.lines().count(), 22); // header + 21 grid points
    assert!(text.lines().skip(1).all(|l| l.contains(",true,")));
}

#[test]
fn sweep_horodecki_3x3_emits_regimes_and_window_structure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("beta.csv");
    let out = qcorr(&[
        "sweep", "horodecki3x3", "--param", "beta", "--from", "0", "--to", "5", "--step",
        "0.5", "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 11);
    assert!(rows[0].ends_with("npt-entangled"));
    assert!(rows[5].ends_with("separable"));
    assert!(rows[10].ends_with("free-entangled"));
    // gd_exact = 4/49 outside the middle window, absent inside
    let field = |row: &str, idx: usize| row.split(',').nth(idx).unwrap().to_string();
    assert_eq!(field(rows[0], 2), "8.16326530612e-2");
    assert_eq!(field(rows[5], 2), ""); // beta = 2.5, inside
    assert_eq!(field(rows[10], 2), "8.16326530612e-2");
}

#[test]
fn sweep_werner_matches_gd_and_min_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    let out = qcorr(&[
        "sweep", "werner:m=4", "--param", "z", "--from", "-1", "--to", "1", "--step", "0.1",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&path).unwrap();
    for row in text.lines().skip(1) {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[2], cells[5], "gd_exact vs min_exact in {row}");
        assert!(!cells[2].is_empty());
    }
}

#[test]
fn sweep_json_output_is_structured() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    let out = qcorr(&[
        "sweep", "isotropic:m=3", "--param", "z", "--from", "0", "--to", "1", "--step",
        "0.25", "--out", path.to_str().unwrap(), "--format", "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&path).unwrap();
    let rows: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows[0].get("gd_lower").unwrap().is_f64());
    assert!(rows[0].get("regime").unwrap().is_null());
}

#[test]
fn sweep_rejects_unknown_parameter_and_bad_grid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    let out = qcorr(&[
        "sweep", "tiles", "--param", "q", "--from", "0", "--to", "1", "--step", "0.5",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = qcorr(&[
        "sweep", "horodecki2x4", "--param", "a", "--from", "1", "--to", "0", "--step",
        "0.5", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_path_is_an_io_error() {
    let out = qcorr(&[
        "sweep", "horodecki2x4", "--param", "a", "--from", "0", "--to", "1", "--step",
        "0.5", "--out", "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(4));

    let out = qcorr(&[
        "figure2", "--trials", "10", "--seed", "1", "--bins", "4", "--out",
        "/nonexistent-dir/f.csv",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn figure2_histogram_contract() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f2.csv");
    let out = qcorr(&[
        "figure2", "--trials", "5000", "--seed", "3", "--bins", "25", "--out",
        path.to_str().unwrap(), "--refine",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut count_sum = 0u64;
    let mut rows = 0;
    for line in text.lines().skip(1) {
        if line.starts_with('#') {
            assert!(line.contains("gd_lower_bound=8.83"));
            assert!(line.contains("best_sampled="));
            continue;
        }
        let mut cells = line.split(',');
        let lower: f64 = cells.next().unwrap().parse().unwrap();
        let count: u64 = cells.next().unwrap().parse().unwrap();
        assert!(lower >= 0.08832 - 1e-9);
        count_sum += count;
        rows += 1;
    }
    assert_eq!(rows, 25);
    assert_eq!(count_sum, 5000);
}

#[test]
fn figure2_single_trial_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.csv");
    let out = qcorr(&[
        "figure2", "--trials", "1", "--seed", "9", "--bins", "5", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let counts: u64 = text
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(counts, 1);
}

#[test]
fn measure_stdout_is_byte_identical_across_runs() {
    let args = [
        "measure", "tiles", "both", "--trials", "500", "--seed", "13",
    ];
    let a = qcorr(&args);
    let b = qcorr(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn worker_count_never_changes_results() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("t1.csv");
    let p2 = dir.path().join("t2.csv");
    let out = qcorr_with_threads(
        &[
            "figure2", "--trials", "2000", "--seed", "5", "--bins", "12", "--out",
            p1.to_str().unwrap(),
        ],
        "1",
    );
    assert!(out.status.success());
    let out = qcorr_with_threads(
        &[
            "figure2", "--trials", "2000", "--seed", "5", "--bins", "12", "--out",
            p2.to_str().unwrap(),
        ],
        "2",
    );
    assert!(out.status.success());
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
}
