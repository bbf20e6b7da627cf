//! The `pgames` binary: subcommands, outputs and exit statuses.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pgames(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pgames"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn simulate_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.json"),
        r#"{"experiment":"game2x2","algo":"extra","eta":0.1,"steps":200,"out_csv":"run.csv"}"#,
    )
    .unwrap();
    let out = pgames(&["simulate", "--config", "run.json", "--out-svg", "run.svg", "--log-y"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("run.csv")).unwrap();
    assert_eq!(csv.lines().count(), 202);
    let svg = fs::read_to_string(dir.path().join("run.svg")).unwrap();
    assert!(svg.starts_with("<?xml") && svg.contains("<polyline"));
}

#[test]
fn runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        let out = pgames(&["experiment", "exp1", "--algo", "omwu", "--steps", "500", "--out-csv", name], dir.path());
        assert_eq!(out.status.code(), Some(0));
    }
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.csv")).unwrap());
}

#[test]
fn all_experiments_write_one_file_each() {
    let dir = tempfile::tempdir().unwrap();
    let out = pgames(&["experiment", "--all", "--steps", "50", "--out-csv", "out"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    for name in ["game2x2", "exp1", "exp2", "nocommon3"] {
        assert!(dir.path().join("out").join(format!("{name}.csv")).exists(), "{name}");
    }
}

#[test]
fn plot_reads_a_csv() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        pgames(&["experiment", "nocommon3", "--steps", "90", "--out-csv", "n.csv"], dir.path()).status.code(),
        Some(0)
    );
    let out = pgames(&["plot", "--csv", "n.csv", "--out-svg", "n.svg"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let svg = fs::read_to_string(dir.path().join("n.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 6, "no KL values, so every component is drawn");
    let out = pgames(&["plot", "--csv", "n.csv", "--out-svg", "n.svg", "--columns", "nope"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn passing_verifications_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["verify", "identities"][..],
        &["verify", "increments"],
        &["verify", "kl-monotone", "--eta", "0.5"],
        &["verify", "kl-monotone", "--seed", "4", "--steps", "20000"],
        &["verify", "bregman", "--cases", "200"],
        &["verify", "orbit", "--expect", "converged-orbit"],
    ] {
        let out = pgames(args, dir.path());
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", stdout(&out));
        assert!(stdout(&out).contains("passed"));
    }
}

#[test]
fn failing_verification_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = pgames(&["verify", "orbit", "--steps", "3000", "--expect", "diverging-boundary"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", stdout(&out));
    assert!(stdout(&out).contains("FAILED"));
}

#[test]
fn usage_and_precondition_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["frobnicate"][..],
        &["experiment", "exp9"],
        &["experiment", "exp1", "--eta", "-1"],
        &["verify", "increments", "--init", "0.5,0.4"],
        &["verify", "increments", "--eta", "1e-3"],
        &["verify", "kl-monotone", "--experiment", "nocommon3"],
        &["simulate", "--config", "missing.json"],
        &["analyze", "eigen", "--point", "0.5,0.5"],
    ] {
        let out = pgames(args, dir.path());
        assert_eq!(out.status.code(), Some(1), "{args:?}");
    }
    assert_eq!(pgames(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn analyze_reports_the_unstable_pair() {
    let dir = tempfile::tempdir().unwrap();
    let out = pgames(&["analyze", "eigen", "--eta", "0.1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("analytic 1.0075"), "{text}");
    let out = pgames(&["analyze", "fixed-curve", "--samples", "3"], dir.path());
    assert_eq!(stdout(&out).lines().count(), 4);
    let out = pgames(&["analyze", "jacobian"], dir.path());
    assert_eq!(stdout(&out).lines().count(), 5);
}
