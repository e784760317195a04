//! End-to-end tests driving the real binary: flag and subcommand routes,
//! config files, output files, quiet mode, and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use kishon_cli::Verdict;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kishon-cli"))
}

fn run_args(args: &[&str]) -> Output {
    binary().args(args).output().expect("binary runs")
}

fn parse_verdict(output: &Output) -> Verdict {
    let text = String::from_utf8_lossy(&output.stdout);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("bad verdict ({e}): {text}"))
}

#[test]
fn passing_check_exits_zero_with_a_verdict() {
    let output = run_args(&["check-theorem1", "--bound", "2"]);
    assert_eq!(output.status.code(), Some(0));
    let verdict = parse_verdict(&output);
    assert_eq!(verdict.check, "theorem1");
    assert_eq!(verdict.params.bound, 2);
    assert!(verdict.counterexample.is_none());
    assert_eq!(verdict.stats.counts.histories, 280);
}

#[test]
fn failing_check_exits_one_with_a_witness() {
    let output = run_args(&["check-theorem33", "--registers", "safe", "--bound", "2"]);
    assert_eq!(output.status.code(), Some(1));
    let verdict = parse_verdict(&output);
    assert_eq!(verdict.check, "theorem33");
    assert_eq!(verdict.params.registers, "safe");
    let cx = verdict.counterexample.expect("witness present");
    assert!(cx.get("execution").is_some());
}

#[test]
fn flag_route_matches_the_subcommand_route() {
    let sub = parse_verdict(&run_args(&["check-lemmas", "--bound", "1"]));
    let flags = parse_verdict(&run_args(&["--check", "lemmas", "--bound", "1"]));
    assert_eq!(sub.result, flags.result);
    assert_eq!(sub.stats.counts, flags.stats.counts);
    assert_eq!(sub.check, flags.check);
}

#[test]
fn usage_errors_exit_two() {
    // Unknown flag (rejected by the argument parser).
    let output = run_args(&["--no-such-flag"]);
    assert_eq!(output.status.code(), Some(2));
    // Unknown check name.
    let output = run_args(&["--check", "nonsense"]);
    assert_eq!(output.status.code(), Some(2));
    // Bound out of range.
    let output = run_args(&["--check", "theorem1", "--bound", "0"]);
    assert_eq!(output.status.code(), Some(2));
    // No check selected at all.
    let output = run_args(&[]);
    assert_eq!(output.status.code(), Some(2));
    // Subcommand and flag disagree.
    let output = run_args(&["check-theorem1", "--check", "lemmas"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn config_file_supplies_values_and_flags_override() {
    let dir = tempfile::tempdir().expect("temp dir");
    let config_path = dir.path().join("run.json");
    fs::write(
        &config_path,
        r#"{ "check": "theorem33", "bound": 2, "registers": "safe" }"#,
    )
    .unwrap();
    let config = config_path.to_str().unwrap();

    let from_file = parse_verdict(&run_args(&["--config", config]));
    assert_eq!(from_file.check, "theorem33");
    assert_eq!(from_file.params.registers, "safe");
    assert_eq!(from_file.result, kishon_cli::RunResult::Fail);

    // A flag overrides the file's register choice and flips the outcome.
    let overridden = parse_verdict(&run_args(&["--config", config, "--registers", "regular"]));
    assert_eq!(overridden.params.registers, "regular");
    assert_eq!(overridden.result, kishon_cli::RunResult::Pass);

    // A malformed config is a usage error.
    let bad_path = dir.path().join("bad.json");
    fs::write(&bad_path, r#"{ "check": "theorem1", "bogus_field": 3 }"#).unwrap();
    let output = run_args(&["--config", bad_path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn out_writes_the_same_document_and_quiet_silences_stdout() {
    let dir = tempfile::tempdir().expect("temp dir");
    let out_path = dir.path().join("verdict.json");
    let output = run_args(&[
        "check-nonrestricted",
        "--bound",
        "1",
        "--process",
        "0",
        "--out",
        out_path.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(output.status.code(), Some(0));
    assert!(output.stdout.is_empty());
    let written: Verdict =
        serde_json::from_str(&fs::read_to_string(Path::new(&out_path)).unwrap()).unwrap();
    assert_eq!(written.check, "nonrestricted");
    assert_eq!(written.params.process, Some(0));
    assert_eq!(written.result, kishon_cli::RunResult::Pass);
}

#[test]
fn order_listing_streams_one_object_per_order() {
    let output = run_args(&["enumerate-orders"]);
    assert_eq!(output.status.code(), Some(0));
    let text = String::from_utf8_lossy(&output.stdout);
    let mut lines = text.trim().lines();
    let mut orders = 0usize;
    let mut summary = String::new();
    for line in &mut lines {
        if line.starts_with('{') && line.ends_with('}') {
            let obj: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(obj.get("pairs").is_some());
            orders += 1;
        } else {
            summary.push_str(line);
            summary.push('\n');
            break;
        }
    }
    for line in lines {
        summary.push_str(line);
        summary.push('\n');
    }
    assert_eq!(orders, 1107);
    let verdict: Verdict = serde_json::from_str(&summary).unwrap();
    assert_eq!(verdict.check, "orders");
    assert_eq!(verdict.stats.counts.orders, 1107);

    let flag_route = run_args(&["--check", "orders"]);
    assert_eq!(flag_route.status.code(), Some(0));
    let flag_text = String::from_utf8_lossy(&flag_route.stdout);
    assert_eq!(flag_text.lines().count(), text.trim().lines().count());
    assert!(flag_text.starts_with(text.trim().lines().next().unwrap()));
}
