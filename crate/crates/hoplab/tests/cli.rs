//! End-to-end checks of the `hoplab` binary: file formats, exit codes,
//! and determinism of the gen → run → bench → fit pipeline.

use std::path::Path;
use std::process::{Command, Output};

fn hoplab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hoplab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

#[test]
fn gen_is_deterministic_and_valid() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "gen", "--d", "2", "--n", "64", "--m", "64", "--planted", "1", "--seed", "1", "--out",
        "a.json",
    ];
    let out = hoplab(&args, dir.path());
    assert!(out.status.success());
    let mut args2 = args;
    args2[args.len() - 1] = "b.json";
    assert!(hoplab(&args2, dir.path()).status.success());
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b, "same flags must produce identical files");

    let inst = hoplab::geom::Instance::from_json(std::str::from_utf8(&a).unwrap()).unwrap();
    assert!(hoplab::geom::validate_general_position(&inst).is_empty());
    assert!(hoplab::drivers::brute_force(&inst).is_some());
}

#[test]
fn gen_planted_zero_has_no_incidence() {
    let dir = tempfile::tempdir().unwrap();
    let out = hoplab(
        &["gen", "--n", "32", "--m", "48", "--planted", "0", "--seed", "9"],
        dir.path(),
    );
    assert!(out.status.success());
    let inst =
        hoplab::geom::Instance::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(hoplab::drivers::brute_force(&inst), None);
}

#[test]
fn run_agrees_across_algos() {
    let dir = tempfile::tempdir().unwrap();
    assert!(hoplab(
        &["gen", "--n", "24", "--m", "20", "--planted", "1", "--seed", "4", "--out", "i.json"],
        dir.path()
    )
    .status
    .success());
    let mut answers = Vec::new();
    for algo in ["brute", "baseline", "algo0", "algo1", "algo2"] {
        let out = hoplab(&["run", "--algo", algo, "--input", "i.json"], dir.path());
        assert!(out.status.success(), "{algo}: {out:?}");
        let v: serde_json::Value =
            serde_json::from_slice(&out.stdout).expect("run output is JSON");
        answers.push(v["answer"].as_bool().unwrap());
        assert_eq!(v["algo"], algo);
    }
    assert!(answers.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn run_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert!(hoplab(
        &["gen", "--n", "4", "--m", "4", "--seed", "2", "--out", "i.json"],
        dir.path()
    )
    .status
    .success());
    let out = hoplab(&["run", "--algo", "wat", "--input", "i.json"], dir.path());
    assert_eq!(out.status.code(), Some(2), "unknown algo is a usage error");
    let out = hoplab(&["run", "--algo", "brute", "--input", "missing.json"], dir.path());
    assert_eq!(out.status.code(), Some(1), "missing file is an i/o error");
    let out = hoplab(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(2), "unknown subcommand");
}

#[test]
fn bench_then_fit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = hoplab(
        &[
            "bench",
            "--algos",
            "brute,algo1",
            "--sizes",
            "16,24,32",
            "--trials",
            "2",
            "--seed",
            "3",
            "--out",
            "rows.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("rows.csv")).unwrap();
    assert!(text.starts_with("n,m,d,algo,seed,trial,answer,charge,S,U,C,steps"));
    assert_eq!(text.lines().count(), 1 + 2 * 3 * 2, "header plus 12 rows");

    let out = hoplab(
        &[
            "fit", "--csv", "rows.csv", "--x", "n", "--y", "charge", "--filter", "algo=brute",
            "--svg", "fit.svg",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let line = String::from_utf8(out.stdout).unwrap();
    let slope: f64 = line
        .split_whitespace()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap();
    // Brute-scan charge is exactly n·m = n² on square instances.
    assert!((slope - 2.0).abs() < 1e-9, "brute slope {slope}");
    let svg = std::fs::read_to_string(dir.path().join("fit.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = hoplab(
        &["verify", "--suite", "hiskip", "--sizes", "4,16", "--seed", "5"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let out = hoplab(&["verify", "--fault-injection"], dir.path());
    assert_eq!(out.status.code(), Some(1), "fault injection demonstrates failure");
    let out = hoplab(&["verify", "--suite", "wat"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}
