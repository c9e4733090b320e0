//! End-to-end runs of the `groupdet` binary.

use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_groupdet"))
        .args(args)
        .output()
        .expect("binary runs");
    let code = out.status.code().expect("exit code");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let stderr = String::from_utf8(out.stderr).unwrap();
    let doc = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (code, doc, stderr)
}

#[test]
fn regression_table() {
    let rows: &[(&[&str], i32)] = &[
        (&["classify", "--group", "z2xd8", "--value", "17"], 0),
        (&["classify", "--group", "z2xd8", "--value", "9"], 0),
        (&["classify", "--group", "z2xd8", "--value", "-15"], 0),
        (&["classify", "--group", "z2xd8", "--value", "41"], 1),
        (&["classify", "--group", "z2xd8", "--value", "3"], 1),
        (&["classify", "--group", "z2xd8", "--value", "65536"], 0),
        (&["classify", "--group", "z2xd8", "--value", "32768"], 1),
        (&["classify", "--group", "z2xq8", "--value", "25"], 1),
        (&["classify", "--group", "z2xq8", "--value", "729"], 0),
        (&["classify", "--group", "z2xq8", "--value", "0"], 0),
        (&["classify", "--group", "d16", "--value", "5"], 0),
        (&["classify", "--group", "z2xz4", "--value", "9"], 0),
        (&["classify", "--group", "z2xz4", "--value", "5"], 1),
        (&["witness", "--group", "z2xd8", "--value", "17"], 0),
        (&["witness", "--group", "z2xd8", "--value", "89"], 1),
        (&["witness", "--group", "z2xq8", "--value", "1179648"], 0),
        (&["compute", "--group", "z3", "--coeffs", "[1,1,0]"], 0),
        (
            &[
                "compute",
                "--group",
                "z2xq8",
                "--coeffs",
                r#"{"f1":[1,0,0,0],"g1":[0,0,0,0],"f2":[1,0,0,0],"g2":[0,0,0,0]}"#,
            ],
            0,
        ),
        (&["compute", "--group", "z3", "--coeffs", "[1,1]"], 2),
        (&["classify", "--group", "nope", "--value", "1"], 2),
        (&["classify", "--group", "z2xd8", "--value", "abc"], 2),
    ];
    for (args, want) in rows {
        let (code, doc, stderr) = run(args);
        assert_eq!(code, *want, "{args:?}: {stderr}");
        if *want != 2 {
            assert!(doc.is_object(), "{args:?} printed no JSON");
        }
    }
}

#[test]
fn classify_then_witness_round_trip() {
    for (group, value) in [
        ("z2xd8", "17"),
        ("z2xd8", "-63"),
        ("z2xq8", "729"),
        ("z2xq8", "0"),
    ] {
        let (code, verdict, _) = run(&["classify", "--group", group, "--value", value]);
        assert_eq!(code, 0);
        assert_eq!(verdict["member"], Value::Bool(true));
        assert_eq!(verdict["verified"], Value::Bool(true));
        let (code, w, _) = run(&["witness", "--group", group, "--value", value]);
        assert_eq!(code, 0);
        assert_eq!(w["claimed_value"], Value::String(value.into()));
        assert_eq!(w["verified"], Value::Bool(true));
        let pack = w["payload"]["pack"].to_string();
        let (code, c, _) = run(&["compute", "--group", group, "--coeffs", &pack]);
        assert_eq!(code, 0);
        assert_eq!(c["naive"], Value::String(value.into()));
        assert_eq!(c["agree"], Value::Bool(true));
    }
}

#[test]
fn compute_matches_circulant() {
    // circ(1, 1, 0) has determinant 1 + 1 = 2
    let (code, doc, _) = run(&["compute", "--group", "z3", "--coeffs", "[1,1,0]"]);
    assert_eq!(code, 0);
    assert_eq!(doc["naive"], Value::String("2".into()));
}

#[test]
fn search_writes_records_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q8.jsonl");
    let (code, doc, stderr) = run(&[
        "search",
        "--group",
        "z2xq8",
        "--range",
        "0,1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stderr}");
    assert_eq!(doc["evaluated"], Value::from(65536u64));
    assert_eq!(doc["violations"], Value::Array(vec![]));
    let lines = std::fs::read_to_string(&out).unwrap();
    assert_eq!(
        lines.lines().count() as u64,
        doc["distinct_values"].as_u64().unwrap()
    );
    for line in lines.lines() {
        let rec: Value = serde_json::from_str(line).unwrap();
        assert!(rec["value"].is_i64() && rec["vector"].is_array() && rec["count"].is_u64());
    }
    let summary = std::fs::read_to_string(dir.path().join("q8.jsonl.summary.csv")).unwrap();
    assert!(summary.starts_with("kind,bucket,distinct_values,occurrences"));
}

#[test]
fn selfcheck_passes() {
    let (code, doc, stderr) = run(&["selfcheck", "--count", "20", "--limit", "200"]);
    assert_eq!(code, 0, "{stderr}");
    assert_eq!(doc["passed"], Value::Bool(true));
}
