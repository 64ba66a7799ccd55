//! End-to-end tests of the compiled binary: argument handling, the
//! config-file merge, exit codes (0 checks passed, 1 checks failed,
//! 2 usage/configuration/refusal errors), stdout renderings, and the
//! report files written by `--out`.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn akcurv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_akcurv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn temp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("akcurv-cli-{name}"));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn help_lists_subcommands() {
    let o = akcurv(&["--help"]);
    assert!(o.status.success());
    let s = stdout(&o);
    for sub in ["decompose", "verify", "converge"] {
        assert!(s.contains(sub), "help misses '{sub}':\n{s}");
    }
}

#[test]
fn verify_emits_json_document_and_passes() {
    let o = akcurv(&[
        "verify",
        "--entry",
        "t4_flat",
        "--sections",
        "integral",
        "--resolutions",
        "6",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).expect("valid JSON");
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["entry"], "t4_flat");
    assert_eq!(doc["passed"], true);
    assert!(doc["checks"].as_array().unwrap().iter().any(|c| {
        c["name"] == "integral-chi" && c["passed"] == true
    }));
    // Every reported number carries its provenance.
    let report = &doc["integral"][0];
    assert_eq!(report["chi"]["provenance"], "quadrature(trapezoid-box, n=6)");
}

#[test]
fn verify_csv_quotes_parameterized_labels() {
    let o = akcurv(&[
        "verify",
        "--entry",
        "s2xs2",
        "--param",
        "a=1",
        "--param",
        "b=2",
        "--sections",
        "integral",
        "--resolutions",
        "6",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(&o));
    let s = stdout(&o);
    let mut lines = s.lines();
    let header = lines.next().unwrap();
    assert!(
        header.starts_with("entry,resolution,chi,chi_error,tau,tau_error,"),
        "{header}"
    );
    // The label contains a comma, so the cell must be quoted.
    assert!(
        lines.next().unwrap().starts_with("\"s2xs2(a=1, b=2)\",6,"),
        "{s}"
    );
}

#[test]
fn out_directory_receives_json_and_csv() {
    let dir = temp_dir("out");
    let o = akcurv(&[
        "verify",
        "--entry",
        "t4_flat",
        "--sections",
        "integral",
        "--resolutions",
        "6",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(&o));
    let json = fs::read_to_string(dir.join("verify_t4_flat.json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(doc["passed"], true);
    let csv = fs::read_to_string(dir.join("verify_t4_flat.csv")).unwrap();
    assert!(csv.starts_with("entry,resolution,"), "{csv}");
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn config_file_seeds_flags_and_flags_win() {
    let dir = temp_dir("config");
    let path = dir.join("run.toml");
    fs::write(
        &path,
        "entry = \"s2xs2\"\nresolutions = [6]\nsections = \"integral\"\n\
         format = \"csv\"\n[param]\nb = 2.0\n",
    )
    .unwrap();
    // --format overrides the file's csv; entry, params, resolutions and
    // sections come from the file.
    let o = akcurv(&[
        "verify",
        "--config",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).expect("valid JSON");
    assert_eq!(doc["entry"], "s2xs2(a=1, b=2)");
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn usage_errors_exit_two() {
    // Unknown catalog entry.
    let o = akcurv(&["verify", "--entry", "t3_flat"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("t3_flat"), "{}", stderr(&o));
    // Unknown tolerance name.
    let o = akcurv(&["verify", "--entry", "t4_flat", "--tol", "slack=1e-6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown tolerance"), "{}", stderr(&o));
    // Malformed parameter.
    let o = akcurv(&["verify", "--entry", "s4_round", "--param", "r"]);
    assert_eq!(o.status.code(), Some(2));
    // No entry at all.
    let o = akcurv(&["verify"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no entry"), "{}", stderr(&o));
}

#[test]
fn converge_refuses_frame_presented_entries() {
    // The nilmanifold entry carries no chart, so there is nothing to
    // discretize; the command errors rather than inventing a grid.
    let o = akcurv(&["converge", "--entry", "kodaira_thurston"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("pointwise"), "{}", stderr(&o));
}

#[test]
fn decompose_works_on_noncompact_entries() {
    // Pointwise sections apply to the hyperbolic balls even though the
    // integral section refuses them.
    let o = akcurv(&["decompose", "--entry", "h4_hyperbolic"]);
    assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("entry h4_hyperbolic"), "{s}");
    assert!(s.contains("W₊ spectrum"), "{s}");
}
