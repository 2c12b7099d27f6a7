//! End-to-end checks of the binary: exit codes, output shapes, and the
//! determinism contract of the JSON reports.

use std::process::{Command, Output};

fn codiff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_codiff"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn traced_suite_passes_with_exit_zero() {
    let out = codiff(&[
        "check", "--model", "gf2ext", "--dim", "2", "--suite", "traced", "--samples", "10",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("yanking"));
    assert!(text.contains("all checks passed"));
}

#[test]
fn forced_failures_exit_one_with_witness() {
    let out = codiff(&[
        "check", "--model", "gf2ext", "--dim", "1", "--suite", "codifferential",
        "--samples", "5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    // exactly the two forced failures, with exact witnesses
    assert!(text.contains("FAIL  am1_assoc"));
    assert!(text.contains("FAIL  am3_mult"));
    assert!(text.contains("witness: matrices differ"));
    assert_eq!(text.matches("FAIL").count(), 3, "{text}"); // 2 equations + summary
}

#[test]
fn finrel_codifferential_passes_on_safe_window() {
    let out = codiff(&[
        "check", "--model", "finrel", "--dim", "2", "--bound", "2", "--suite",
        "codifferential", "--samples", "5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("safe window"));
}

#[test]
fn json_reports_are_deterministic_and_schema_shaped() {
    let args = [
        "check", "--model", "polysym", "--dim", "2", "--suite", "additive",
        "--samples", "10", "--seed", "7", "--json",
    ];
    let first = codiff(&args);
    let second = codiff(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout, "identical seeds must give identical bytes");

    let report: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../report-schema.json")).unwrap();
    // every top-level key the report emits is declared by the schema
    let declared = schema["definitions"]["check"]["properties"]
        .as_object()
        .unwrap();
    for key in report.as_object().unwrap().keys() {
        assert!(declared.contains_key(key), "undeclared key `{key}`");
    }
    for required in schema["definitions"]["check"]["required"].as_array().unwrap() {
        assert!(
            report.get(required.as_str().unwrap()).is_some(),
            "missing required key {required}"
        );
    }
    // timings stay out of the report unless asked for
    assert!(report.get("timings_ms").is_none());
    assert_eq!(report["passed"], serde_json::Value::Bool(true));
}

#[test]
fn nogo_conclusions_match_targets() {
    for (target, conclusion) in [
        ("fvec-q", "forced-trivial"),
        ("fvec-gf2", "escape-via-assumption-ii"),
        ("rel", "escape-via-assumption-i"),
    ] {
        let out = codiff(&["nogo", "--target", target, "--json"]);
        assert_eq!(out.status.code(), Some(0));
        let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(report["conclusion"], conclusion, "target {target}");
        let declared = serde_json::from_str::<serde_json::Value>(include_str!(
            "../report-schema.json"
        ))
        .unwrap()["definitions"]["nogo"]["properties"]
            .as_object()
            .unwrap()
            .keys()
            .cloned()
            .collect::<Vec<_>>();
        for key in report.as_object().unwrap().keys() {
            assert!(declared.contains(key), "undeclared key `{key}`");
        }
    }
    // the rel witness names the union counterexample
    let out = codiff(&["nogo", "--target", "rel"]);
    assert!(stdout(&out).contains("!="));
}

#[test]
fn weyl_reports_representability() {
    let out = codiff(&["weyl", "--n", "0", "--json"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["representable"], serde_json::Value::Bool(true));

    let out = codiff(&["weyl", "--n", "3", "--pairs", "25", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["representable"], serde_json::Value::Bool(false));
    assert_eq!(report["identity_trace"], "3");
    assert_eq!(report["all_commutator_traces_zero"], serde_json::Value::Bool(true));
}

#[test]
fn eval_prints_matrices_and_rejects_bad_terms() {
    let out = codiff(&["eval", "--model", "gf2ext", "--dim", "1", "u ; d"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("(zero matrix)"));

    let out = codiff(&["eval", "--model", "gf2ext", "--dim", "2", "tr[A](sym[A, A])"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("[1, 0]"), "{text}");
    assert!(text.contains("[0, 1]"), "{text}");

    // syntax error with a position, usage exit code
    let out = codiff(&["eval", "--model", "gf2ext", "--dim", "1", "d ;;"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1:4"));

    // type error names the subterm
    let out = codiff(&["eval", "--model", "gf2ext", "--dim", "1", "d ; d"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot compose"));

    // traces are rejected in the untraced model
    let out = codiff(&["eval", "--model", "polysym", "--dim", "2", "tr[A](sym[A, A])"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_model_is_a_usage_error() {
    let out = codiff(&["check", "--model", "hilbert", "--suite", "all"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn skip_interchange_drops_exactly_one_equation() {
    let with = codiff(&[
        "check", "--model", "polysym", "--dim", "2", "--suite", "codifferential",
        "--samples", "5", "--json",
    ]);
    let without = codiff(&[
        "check", "--model", "polysym", "--dim", "2", "--suite", "codifferential",
        "--samples", "5", "--skip-interchange", "--json",
    ]);
    let with: serde_json::Value = serde_json::from_str(&stdout(&with)).unwrap();
    let without: serde_json::Value = serde_json::from_str(&stdout(&without)).unwrap();
    let count = |v: &serde_json::Value| v["suites"][0]["equations"].as_array().unwrap().len();
    assert_eq!(count(&with), count(&without) + 1);
    assert!(!stdout(&codiff(&[
        "check", "--model", "polysym", "--dim", "2", "--suite", "codifferential",
        "--samples", "5", "--skip-interchange",
    ]))
    .contains("interchange_rule"));
}
