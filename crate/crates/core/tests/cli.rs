//! End-to-end tests of the `catenc` binary against the committed mini
//! fixture: golden output, file products, determinism, and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_catenc"));
    // Fixture paths (and the committed config's contents) are relative to
    // the package directory.
    cmd.current_dir(env!("CARGO_MANIFEST_DIR"));
    cmd
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("testdata/mini_kdd")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn inspect_matches_golden() {
    let out = run(&[
        "inspect",
        "--train",
        "testdata/mini_kdd/train.txt",
        "--test",
        "testdata/mini_kdd/test.txt",
    ]);
    let golden = std::fs::read_to_string(fixture("inspect_golden.txt")).unwrap();
    assert_eq!(stdout(&out), golden);
}

#[test]
fn encode_proposed_writes_k_columns_and_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let out_csv = dir.path().join("enc.csv");
    let args = [
        "encode",
        "--train",
        "testdata/mini_kdd/train.txt",
        "--input",
        "testdata/mini_kdd/test.txt",
        "--out",
        out_csv.to_str().unwrap(),
        "--threshold",
        "1.87",
        "--components",
        "3",
    ];
    stdout(&run(&args));
    let first = std::fs::read_to_string(&out_csv).unwrap();
    let sidecar = dir.path().join("enc.encoder.json");
    let first_json = std::fs::read_to_string(&sidecar).unwrap();

    let mut lines = first.lines();
    assert!(lines.next().unwrap().starts_with("# catenc "));
    assert_eq!(lines.next().unwrap(), "pc1,pc2,pc3");
    assert_eq!(lines.clone().count(), 40, "one row per input line");
    assert!(lines.all(|l| l.split(',').count() == 3));

    stdout(&run(&args));
    assert_eq!(std::fs::read_to_string(&out_csv).unwrap(), first);
    assert_eq!(std::fs::read_to_string(&sidecar).unwrap(), first_json);
}

#[test]
fn encode_one_hot_width_is_total_cardinality() {
    let dir = tempfile::tempdir().unwrap();
    let out_csv = dir.path().join("oh.csv");
    stdout(&run(&[
        "encode",
        "--train",
        "testdata/mini_kdd/train.txt",
        "--input",
        "testdata/mini_kdd/train.txt",
        "--out",
        out_csv.to_str().unwrap(),
        "--scheme",
        "one_hot",
    ]));
    let body = std::fs::read_to_string(&out_csv).unwrap();
    let header = body.lines().nth(1).unwrap();
    // protocol_type 3 + service 9 + flag 4 categories in the mini train split.
    assert_eq!(header.split(',').count(), 16);
}

#[test]
fn grid_writes_complete_report_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "grid",
        "--config",
        "testdata/mini_kdd/grid_mini.toml",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let text = stdout(&out);
    assert!(text.contains("39 attempted, 39 succeeded, 0 failed"), "{text}");

    for name in [
        "records.csv",
        "leaderboard.csv",
        "scatter_accuracy.csv",
        "scatter_auc.csv",
        "grid_scatter.csv",
        "summary.txt",
        "config_resolved.toml",
    ] {
        let body = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(
            body.starts_with("# catenc "),
            "{name} missing version comment"
        );
        assert!(body.contains("seed=0"), "{name} missing seed");
    }

    // 3 thresholds x 3 K x 3 classifiers + 4 encoders x 3 classifiers.
    let records = std::fs::read_to_string(dir.path().join("records.csv")).unwrap();
    assert_eq!(records.lines().count(), 2 + 39);

    // Leaderboard is sorted by the default metric, best first.
    let board = std::fs::read_to_string(dir.path().join("leaderboard.csv")).unwrap();
    let harmonic: Vec<f64> = board
        .lines()
        .skip(2)
        .map(|l| l.split(',').nth(11).unwrap().parse().unwrap())
        .collect();
    assert_eq!(harmonic.len(), 5, "one row per encoder");
    assert!(harmonic.windows(2).all(|w| w[0] >= w[1]), "{harmonic:?}");
}

#[test]
fn grid_reruns_byte_identical() {
    let run_once = || {
        let dir = tempfile::tempdir().unwrap();
        stdout(&run(&[
            "grid",
            "--config",
            "testdata/mini_kdd/grid_mini.toml",
            "--out",
            dir.path().to_str().unwrap(),
        ]));
        let mut bodies = Vec::new();
        for name in ["records.csv", "leaderboard.csv", "summary.txt"] {
            bodies.push(std::fs::read_to_string(dir.path().join(name)).unwrap());
        }
        bodies
    };
    assert_eq!(run_once(), run_once());
}

#[test]
fn grid_sort_flag_reorders_leaderboard() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&run(&[
        "grid",
        "--config",
        "testdata/mini_kdd/grid_mini.toml",
        "--out",
        dir.path().to_str().unwrap(),
        "--sort",
        "mse_accuracy",
    ]));
    let resolved = std::fs::read_to_string(dir.path().join("config_resolved.toml")).unwrap();
    assert!(resolved.contains("sort_metric = \"mse_accuracy\""), "{resolved}");
    let board = std::fs::read_to_string(dir.path().join("leaderboard.csv")).unwrap();
    let mse: Vec<f64> = board
        .lines()
        .skip(2)
        .map(|l| l.split(',').nth(9).unwrap().parse().unwrap())
        .collect();
    assert!(mse.windows(2).all(|w| w[0] <= w[1]), "{mse:?}");
}

#[test]
fn report_reranks_records() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&run(&[
        "grid",
        "--config",
        "testdata/mini_kdd/grid_mini.toml",
        "--out",
        dir.path().to_str().unwrap(),
    ]));
    let records = dir.path().join("records.csv");

    // Same sort as the config reproduces the grid's leaderboard exactly.
    let out = run(&["report", "--records", records.to_str().unwrap()]);
    let board = std::fs::read_to_string(dir.path().join("leaderboard.csv")).unwrap();
    assert_eq!(stdout(&out), board);

    // A different sort still yields one row per encoder.
    let out = run(&[
        "report",
        "--records",
        records.to_str().unwrap(),
        "--sort",
        "test_auc",
    ]);
    assert_eq!(stdout(&out).lines().count(), 2 + 5);
}

#[test]
fn usage_errors_exit_2_runtime_errors_exit_1() {
    let unknown_scheme = run(&[
        "encode",
        "--train",
        "testdata/mini_kdd/train.txt",
        "--input",
        "testdata/mini_kdd/test.txt",
        "--out",
        "/tmp/never_written.csv",
        "--scheme",
        "glmm",
    ]);
    assert_eq!(unknown_scheme.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown_scheme.stderr).contains("glmm"));

    let bad_threshold = run(&[
        "bench",
        "--train",
        "testdata/mini_kdd/train.txt",
        "--test",
        "testdata/mini_kdd/test.txt",
        "--threshold",
        "99",
    ]);
    assert_eq!(bad_threshold.status.code(), Some(2));

    let bad_sort = run(&["report", "--records", "/tmp/none.csv", "--sort", "vibes"]);
    assert_eq!(bad_sort.status.code(), Some(2));

    let missing_file = run(&["inspect", "--train", "testdata/mini_kdd/no_such.txt"]);
    assert_eq!(missing_file.status.code(), Some(1));

    let missing_flag = bin().args(["inspect"]).output().unwrap();
    assert_eq!(missing_flag.status.code(), Some(2), "clap usage error");
}

#[test]
fn bench_prints_parsable_record_row() {
    let out = run(&[
        "bench",
        "--train",
        "testdata/mini_kdd/train.txt",
        "--test",
        "testdata/mini_kdd/test.txt",
        "--scheme",
        "woe",
        "--classifier",
        "logistic_regression",
    ]);
    let text = stdout(&out);
    assert!(text.contains("encoder: woe"));
    let row = text.lines().last().unwrap();
    let rec = catenc::metrics::EvalRecord::parse_csv_row(row).unwrap();
    assert_eq!(rec.encoder, "woe");
    assert_eq!(rec.classifier, "logistic_regression");
    assert!(rec.test_accuracy > 50.0);
}
