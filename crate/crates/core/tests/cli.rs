use std::process::Command;

use harmonic_census::cli::{run, EXIT_CERTIFICATION, EXIT_IO, EXIT_OK, EXIT_USAGE, THREADS_ENV};
use harmonic_census::output::{
    CausticDocument, CensusDocument, CountDocument, CriticalValuesDocument, SweepDocument,
    VerifyDocument, WindingDocument,
};
use serde::de::DeserializeOwned;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("harmonic-census").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json<T: DeserializeOwned>(args: &[&str]) -> T {
    let (code, out, err) = call(args);
    assert_eq!(code, EXIT_OK, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn documents_round_trip_and_validate() {
    let d: CausticDocument = json(&["caustic", "--n", "4", "--a", "3"]);
    d.validate().unwrap();
    let d: WindingDocument = json(&["winding", "--n", "4", "--a", "3"]);
    d.validate().unwrap();
    let d: CriticalValuesDocument = json(&["critical-values", "--n", "4"]);
    d.validate().unwrap();
    let d: CensusDocument = json(&["zeros", "--n", "4", "--a", "1.1"]);
    d.validate().unwrap();
    assert_eq!(d.zeros.len(), 9);
    let d: CountDocument = json(&["count", "--n", "4", "--a", "1.37"]);
    d.validate().unwrap();
    assert_eq!(d.count, 5);
    let d: VerifyDocument = json(&["verify", "--n", "4", "--a", "3.54"]);
    d.validate().unwrap();
    assert!(d.agree);
    assert_eq!(d.total, 1);
    let d: SweepDocument = json(&["sweep", "--n", "4", "--values", "1.1,2,5"]);
    d.validate().unwrap();
    assert_eq!(d.entries.len(), 3);

    let text = serde_json::to_string(&d).unwrap();
    let back: SweepDocument = serde_json::from_str(&text).unwrap();
    assert_eq!(back, d);
}

#[test]
fn verify_reports_reference_counts() {
    for (a, total) in [("1.1", 9), ("1.37", 5), ("3.54", 1)] {
        let d: VerifyDocument = json(&["verify", "--n", "4", "--a", a]);
        assert_eq!(d.total, total);
        assert_eq!(d.predicted_theorem, Some(total as u32));
        assert_eq!(d.predicted_winding, total as u32);
    }
}

#[test]
fn critical_values_document_has_n() {
    let (code, out, _) = call(&["critical-values", "--n", "4"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["N"], 2);
    assert_eq!(v["values"].as_array().unwrap().len(), 2);
}

#[test]
fn csv_headers() {
    let (_, out, _) = call(&["caustic", "--n", "4", "--a", "3", "--format", "csv"]);
    assert!(out.starts_with("phi,u,v\n"));
    let (_, out, _) = call(&["zeros", "--n", "4", "--a", "1.37", "--format", "csv"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("re,im,order,residual"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["count", "--n", "4", "--a", "1"]).0, EXIT_USAGE);
    assert_eq!(call(&["count", "--n", "4", "--a", "0.5"]).0, EXIT_USAGE);
    assert_eq!(call(&["zeros", "--n", "3", "--a", "2"]).0, EXIT_USAGE);
    assert_eq!(call(&["zeros", "--n", "4", "--a", "-2"]).0, EXIT_USAGE);
    assert_eq!(call(&["bogus"]).0, EXIT_USAGE);
    assert_eq!(call(&["sweep", "--n", "4", "--grid", "1:2"]).0, EXIT_USAGE);
    let a1 = harmonic_census::theorem::critical_values_closed_form(4)
        .unwrap()
        .values[0]
        .value;
    let a1 = format!("{a1}");
    assert_eq!(
        call(&["zeros", "--n", "4", "--a", &a1]).0,
        EXIT_CERTIFICATION
    );
    assert_eq!(
        call(&["verify", "--n", "4", "--a", &a1]).0,
        EXIT_CERTIFICATION
    );
    assert_eq!(
        call(&["winding", "--n", "4", "--a", &a1]).0,
        EXIT_CERTIFICATION
    );
    assert_eq!(
        call(&[
            "winding",
            "--n",
            "4",
            "--a",
            "2",
            "--out",
            "/nonexistent-dir/x.json"
        ])
        .0,
        EXIT_IO
    );
}

#[test]
fn output_is_deterministic() {
    let first = call(&["zeros", "--n", "5", "--a", "2.5"]).1;
    for _ in 0..3 {
        assert_eq!(call(&["zeros", "--n", "5", "--a", "2.5"]).1, first);
    }
    let first = call(&[
        "sweep",
        "--n",
        "4",
        "--grid",
        "1.05:19:6,log",
        "--format",
        "csv",
    ])
    .1;
    assert_eq!(
        call(&[
            "sweep",
            "--n",
            "4",
            "--grid",
            "1.05:19:6,log",
            "--format",
            "csv"
        ])
        .1,
        first
    );
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    let (code, stdout, _) = call(&[
        "winding",
        "--n",
        "6",
        "--a",
        "50",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.is_empty());
    let d: WindingDocument = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    d.validate().unwrap();
}

#[test]
fn binary_respects_thread_count() {
    let bin = env!("CARGO_BIN_EXE_harmonic-census");
    let args = ["zeros", "--n", "4", "--a", "1.1"];
    let one = Command::new(bin)
        .args(args)
        .env(THREADS_ENV, "1")
        .output()
        .unwrap();
    let many = Command::new(bin)
        .args(args)
        .env(THREADS_ENV, "4")
        .output()
        .unwrap();
    assert_eq!(one.status.code(), Some(EXIT_OK));
    assert_eq!(one.stdout, many.stdout);
    let bad = Command::new(bin)
        .args(args)
        .env(THREADS_ENV, "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
}
