//! End-to-end checks of the installed binary: exit codes, single-document
//! stdout, and schema round-trips for every emitted document kind.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_evidence-kit"))
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("evidence-kit-cli-surface");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> (i32, String) {
    let output = bin().args(args).output().expect("binary runs");
    (
        output.status.code().unwrap_or(-1),
        String::from_utf8(output.stdout).unwrap(),
    )
}

fn schema_of(doc: &str) -> String {
    let value: serde_json::Value = serde_json::from_str(doc).expect("single JSON document");
    value["schema"].as_str().expect("schema field").to_string()
}

#[test]
fn calibrate_and_certify() {
    let (code, out) = run(&[
        "calibrate",
        "--kind",
        "power",
        "--kappa",
        "0.5",
        "--value",
        "0.04",
    ]);
    assert_eq!(code, 0);
    assert_eq!(schema_of(&out), "evidence-kit/1");
    let doc: evidence_kit::cli::CalibrateOut = serde_json::from_str(&out).unwrap();
    assert!((doc.e.unwrap().to_f64() - 2.5).abs() < 1e-12);

    let (code, out) = run(&[
        "calibrate",
        "--kind",
        "log",
        "--kappa",
        "1",
        "--value",
        "0.1353352832366127",
        "--certify",
    ]);
    assert_eq!(code, 0, "{out}");
    let doc: evidence_kit::cli::CalibrateOut = serde_json::from_str(&out).unwrap();
    assert!((doc.e.unwrap().to_f64() - 3.694528049465325).abs() < 1e-9);
    assert!(doc.certification.unwrap().is_accepted());
}

#[test]
fn check_commands_drive_exit_codes() {
    let f = write_temp("fn.json", r#"{"n": 2, "by_count": [0, 1, 0]}"#);
    let (code, out) = run(&[
        "check-e",
        "--function",
        f.to_str().unwrap(),
        "--model",
        "bernoulli:2",
    ]);
    assert_eq!(code, 0, "{out}");
    let _: evidence_kit::cli::CheckOut = serde_json::from_str(&out).unwrap();

    let p = write_temp(
        "p.json",
        r#"{"space": ["0", "1"], "values": {"0": "2/5", "1": 1}}"#,
    );
    let family = write_temp(
        "coin.json",
        r#"{"space": ["0", "1"], "members": {"P": {"0": "1/2", "1": "1/2"}}}"#,
    );
    let (code, out) = run(&[
        "check-p",
        "--function",
        p.to_str().unwrap(),
        "--model",
        family.to_str().unwrap(),
        "--exact",
    ]);
    assert_eq!(code, 1, "{out}");
    let doc: evidence_kit::cli::CheckOut = serde_json::from_str(&out).unwrap();
    assert!(doc.verdict.is_rejected());
    assert!(doc.verdict.witness.is_some());
}

#[test]
fn envelope_reports_infinite_suprema() {
    let f = write_temp(
        "inf.json",
        r#"{"space": ["00", "01", "10", "11"], "values": {"00": 0, "01": "inf", "10": 0, "11": 0}}"#,
    );
    let (code, out) = run(&[
        "envelope",
        "--function",
        f.to_str().unwrap(),
        "--model",
        "bernoulli:2",
    ]);
    assert_eq!(code, 0, "{out}");
    let doc: evidence_kit::cli::EnvelopeOut = serde_json::from_str(&out).unwrap();
    assert!(doc.infinite);
    assert_eq!(doc.outcome.as_deref(), Some("01"));

    let g = write_temp("fin.json", r#"{"n": 2, "by_count": [0, 1, 0]}"#);
    let (code, out) = run(&[
        "envelope",
        "--function",
        g.to_str().unwrap(),
        "--model",
        "bernoulli:2",
        "--tol",
        "1e-9",
    ]);
    assert_eq!(code, 0);
    let doc: evidence_kit::cli::EnvelopeOut = serde_json::from_str(&out).unwrap();
    assert!(!doc.infinite);
    assert!((doc.upper.unwrap().to_f64() - 0.5).abs() <= 1e-9);
}

#[test]
fn decompose_and_project() {
    let model = write_temp(
        "pb.json",
        r#"{
            "omega": ["0", "1"],
            "theta": ["A", "B"],
            "kernel": {"A": {"0": 1, "1": 0}, "B": {"0": "1/2", "1": "1/2"}},
            "prior": {"A": "1/2", "B": "1/2"}
        }"#,
    );
    let f = write_temp(
        "joint.json",
        r#"{
            "omega": ["0", "1"],
            "theta": ["A", "B"],
            "values": {"A": {"0": 1, "1": 3}, "B": {"0": "2/5", "1": "8/5"}}
        }"#,
    );
    let (code, out) = run(&[
        "decompose",
        "--function",
        f.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
        "--exact",
    ]);
    assert_eq!(code, 0, "{out}");
    let doc: evidence_kit::cli::DecomposeOut = serde_json::from_str(&out).unwrap();
    assert!(doc.g_verdict.is_accepted() && doc.h_verdict.is_accepted());
    assert!(doc.product_exact_on_support);
    assert_eq!(schema_of(&out), "evidence-kit/1");

    let (code, out) = run(&["project", "--function", f.to_str().unwrap(), "--dir", "inf"]);
    assert_eq!(code, 0, "{out}");
    let doc: evidence_kit::cli::ProjectOut = serde_json::from_str(&out).unwrap();
    let values = doc.function.values.unwrap();
    assert_eq!(values["0"].to_f64(), 0.4);
    assert_eq!(values["1"].to_f64(), 1.6);
}

#[test]
fn usage_errors_exit_2_with_grammar() {
    let (code, out) = run(&["frobnicate"]);
    assert_eq!(code, 2);
    let doc: evidence_kit::cli::ErrorOut = serde_json::from_str(&out).unwrap();
    assert_eq!(doc.error.kind, "usage");
    assert!(doc.error.grammar.unwrap().contains("evidence-kit <"));

    let (code, out) = run(&[
        "check-e",
        "--function",
        "/nonexistent.json",
        "--model",
        "bernoulli:2",
    ]);
    assert_eq!(code, 2);
    assert_eq!(schema_of(&out), "evidence-kit/1");
}

#[test]
fn sin_net_binary() {
    let (code, out) = run(&["sin-net", "100"]);
    assert_eq!(code, 0);
    let doc: evidence_kit::cli::SinNetOut = serde_json::from_str(&out).unwrap();
    assert_eq!(doc.n_star, 15);
    assert_eq!(doc.points.len(), 14);
}

#[test]
fn decompose_bernoulli_binary() {
    let f = write_temp(
        "bern.json",
        r#"{"space": ["00", "01", "10", "11"], "values": {"00": 0, "01": 2, "10": 0, "11": 0}}"#,
    );
    let (code, out) = run(&[
        "decompose-bernoulli",
        "--function",
        f.to_str().unwrap(),
        "--N",
        "2",
        "--exact",
    ]);
    assert_eq!(code, 0, "{out}");
    let doc: evidence_kit::cli::DecomposeBernoulliOut = serde_json::from_str(&out).unwrap();
    assert!(doc.product_exact);
    let h = doc.h.values.unwrap();
    assert_eq!(h["1"].to_f64(), 1.0);
}
