//! End-to-end tests of the `genpoly` binary: exit codes, output bytes,
//! and determinism across repeated invocations.

use std::path::Path;
use std::process::{Command, Output};

use genpoly::{BooleanFunction, PolymorphismInstance};

fn genpoly_bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genpoly"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn write_instance(dir: &Path, name: &str, p: &PolymorphismInstance) -> String {
    let path = dir.join(name);
    std::fs::write(&path, p.to_text()).unwrap();
    path.to_str().unwrap().to_owned()
}

fn all_xor_instance(n: usize, m: usize) -> PolymorphismInstance {
    let fs = (0..=m).map(|_| BooleanFunction::make_xor(n)).collect();
    let gs = (0..=n).map(|_| BooleanFunction::make_xor(m)).collect();
    PolymorphismInstance::new(n, m, fs, gs).unwrap()
}

#[test]
fn test_check_reports_true_and_false_with_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let xor = all_xor_instance(2, 2);
    let path = write_instance(dir.path(), "xor.txt", &xor);
    for method in ["auto", "pointwise", "fourier", "both"] {
        let out = genpoly_bin(&["check", &path, "--method", method]);
        assert_eq!(out.status.code(), Some(0), "method {method}");
        assert_eq!(stdout_of(&out), "true\n");
    }

    // Replacing one inner function with a conjunction breaks the identity.
    let mut fs: Vec<BooleanFunction> = (0..=2).map(|_| BooleanFunction::make_xor(2)).collect();
    fs[1] = BooleanFunction::make_and(2, &[-1, -1], -1);
    let gs = (0..=2).map(|_| BooleanFunction::make_xor(2)).collect();
    let broken = PolymorphismInstance::new(2, 2, fs, gs).unwrap();
    let path = write_instance(dir.path(), "broken.txt", &broken);
    let out = genpoly_bin(&["check", &path, "--method", "both"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_of(&out), "false\n");
}

#[test]
fn test_check_rejects_malformed_input_with_64() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("garbage.txt");
    std::fs::write(&path, "n=2 m=2\nf0 nonsense\n").unwrap();
    let out = genpoly_bin(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(64));
    assert!(!out.stderr.is_empty());

    let missing = dir.path().join("missing.txt");
    let out = genpoly_bin(&["check", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn test_classify_round_trips_through_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let xor = all_xor_instance(2, 3);
    let path = write_instance(dir.path(), "xor23.txt", &xor);
    let out = genpoly_bin(&["classify", &path]);
    assert_eq!(out.status.code(), Some(0));
    let form = genpoly::CanonicalForm::from_json(stdout_of(&out).trim()).unwrap();
    assert_eq!(genpoly::reconstruct(&form).unwrap(), xor);

    // The -o flag writes the same bytes to a file.
    let json_path = dir.path().join("form.json");
    let out = genpoly_bin(&["classify", &path, "-o", json_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read_to_string(&json_path).unwrap();
    let direct = genpoly_bin(&["classify", &path]);
    assert_eq!(written, stdout_of(&direct));
}

#[test]
fn test_classify_failure_report_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut fs: Vec<BooleanFunction> = (0..=2).map(|_| BooleanFunction::make_xor(2)).collect();
    fs[0] = BooleanFunction::make_and(2, &[-1, -1], -1);
    let gs = (0..=2).map(|_| BooleanFunction::make_xor(2)).collect();
    let broken = PolymorphismInstance::new(2, 2, fs, gs).unwrap();
    let path = write_instance(dir.path(), "broken.txt", &broken);
    let out = genpoly_bin(&["classify", &path]);
    assert_eq!(out.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    assert_eq!(report["failure"]["stage"], "identity");
}

#[test]
fn test_generate_is_seed_deterministic_and_checks() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "generate",
        "--seed",
        "42",
        "--n",
        "3",
        "--m",
        "2",
        "--profile",
        "mixed",
    ];
    let first = genpoly_bin(&args);
    assert_eq!(first.status.code(), Some(0));
    let second = genpoly_bin(&args);
    assert_eq!(first.stdout, second.stdout);

    let path = dir.path().join("generated.txt");
    std::fs::write(&path, &first.stdout).unwrap();
    let out = genpoly_bin(&["check", path.to_str().unwrap(), "--method", "both"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn test_generate_accepts_params_file() {
    let dir = tempfile::tempdir().unwrap();
    let params = genpoly::sample_params(7, 2, 2, genpoly::Profile::AndOrOnly).unwrap();
    let params_path = dir.path().join("params.json");
    std::fs::write(&params_path, serde_json::to_string(&params).unwrap()).unwrap();
    let out = genpoly_bin(&["generate", "--params", params_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let expected = genpoly::generate(&params).unwrap();
    assert_eq!(stdout_of(&out), expected.to_text());
}

#[test]
fn test_enumerate_report_catalogue_and_thread_independence() {
    let dir = tempfile::tempdir().unwrap();
    let cat1 = dir.path().join("cat1.jsonl");
    let cat4 = dir.path().join("cat4.jsonl");
    let out1 = genpoly_bin(&[
        "enumerate",
        "--n",
        "1",
        "--m",
        "1",
        "--catalogue",
        cat1.to_str().unwrap(),
        "--threads",
        "1",
    ]);
    assert_eq!(out1.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(stdout_of(&out1).trim()).unwrap();
    assert_eq!(report["passing"], 80);
    assert_eq!(report["classify_failures"], 0);

    let out4 = genpoly_bin(&[
        "enumerate",
        "--n",
        "1",
        "--m",
        "1",
        "--catalogue",
        cat4.to_str().unwrap(),
        "--threads",
        "4",
    ]);
    assert_eq!(out4.status.code(), Some(0));
    assert_eq!(out1.stdout, out4.stdout);
    let bytes1 = std::fs::read(&cat1).unwrap();
    let bytes4 = std::fs::read(&cat4).unwrap();
    assert_eq!(bytes1, bytes4);
    assert_eq!(bytes1.iter().filter(|&&b| b == b'\n').count(), 80);
}

#[test]
fn test_enumerate_over_budget_exits_65() {
    let out = genpoly_bin(&["enumerate", "--n", "2", "--m", "3"]);
    assert_eq!(out.status.code(), Some(65));
    assert!(!out.stderr.is_empty());
}

#[test]
fn test_enumerate_sampled_mode() {
    let out = genpoly_bin(&[
        "enumerate", "--n", "3", "--m", "3", "--sampled", "200", "--seed", "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    assert_eq!(report["mode"], "sampled");
    assert_eq!(report["total"], 200);
}

#[test]
fn test_fourier_prints_expansion() {
    let out = genpoly_bin(&["fourier", "n=2 tt=0x8"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout_of(&out),
        "S=0x0 c=1/2\nS=0x1 c=1/2\nS=0x2 c=1/2\nS=0x3 c=-1/2\n"
    );
}

#[test]
fn test_usage_errors_exit_64_and_help_exits_0() {
    let out = genpoly_bin(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
    let out = genpoly_bin(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("enumerate"));
}
