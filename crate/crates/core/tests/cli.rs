// SPDX-License-Identifier: Apache-2.0

//! Golden tests against the built binary.

use std::process::Command;

fn cka(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cka"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn decide_golden() {
    assert_eq!(cka(&["decide", "leq", "(ab)*", "a* b*"]), (0, "HOLDS\n".into(), String::new()));
    assert_eq!(cka(&["decide", "eq", "(a+b)*", "a* b*"]).0, 0);
    assert_eq!(
        cka(&["decide", "leq", "a* b*", "(ab)*"]),
        (1, "FAILS\ncounterexample: b\n".into(), String::new())
    );
    assert_eq!(
        cka(&["decide", "eq", "a", "b"]),
        (1, "FAILS\ncounterexample: a\n".into(), String::new())
    );
    assert_eq!(cka(&["decide", "eq", "ab", "ba"]).0, 0);
}

#[test]
fn decide_json_and_trace() {
    let (code, out, _) = cka(&["decide", "--format", "json", "leq", "a* b*", "(ab)*"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["holds"], false);
    assert_eq!(v["counterexample"], serde_json::json!({"b": 1}));

    let (code, out, _) = cka(&["decide", "--trace", "leq", "(ab)*", "a* b*"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("HOLDS"));
    let trace: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    let rules: Vec<&str> = trace["steps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["rule"].as_str().unwrap())
        .collect();
    assert_eq!(rules.first(), Some(&"decomp"));
    assert_eq!(rules.last(), Some(&"decision-loop"));
}

#[test]
fn text_and_json_agree() {
    for (mode, l, r) in [("leq", "a*", "(a a)*"), ("eq", "(a b*)*", "1 + a (a+b)*")] {
        let text = cka(&["decide", mode, l, r]);
        let json = cka(&["decide", "--format", "json", mode, l, r]);
        assert_eq!(text.0, json.0);
        let v: serde_json::Value = serde_json::from_str(&json.1).unwrap();
        assert_eq!(v["holds"], text.0 == 0);
    }
}

#[test]
fn normalize_golden() {
    assert_eq!(
        cka(&["normalize", "(a+b)*"]),
        (0, "1\nb b*\na a*\na b b* a*\n".into(), String::new())
    );
    assert_eq!(
        cka(&["normalize", "--format", "json", "0"]).1,
        "{\"alphabet\":[],\"terms\":[]}\n"
    );
    let (code, out, _) = cka(&["normalize", "--format", "json", "a"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["terms"], serde_json::json!([{"offset": {"a": 1}, "base": []}]));
    let (_, out, _) = cka(&["normalize", "--alphabet", "b,a", "--format", "json", "a b*"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["alphabet"], serde_json::json!(["b", "a"]));
}

#[test]
fn member_golden() {
    assert_eq!(cka(&["member", "a^2 b^2", "(ab)*"]), (0, "yes\n".into(), String::new()));
    assert_eq!(cka(&["member", "a", "(ab)*"]), (1, "no\n".into(), String::new()));
    assert_eq!(cka(&["member", "1", "(a b + b)*"]).0, 0);
}

#[test]
fn enumerate_golden() {
    assert_eq!(cka(&["enumerate", "--degree", "4", "(ab)*"]).1, "1\na b\na^2 b^2\n");
    assert_eq!(cka(&["enumerate", "0"]), (0, String::new(), String::new()));
    assert_eq!(cka(&["enumerate", "1"]).1, "1\n");
}

#[test]
fn empty_golden() {
    assert_eq!(cka(&["empty", "0"]), (0, "empty\n".into(), String::new()));
    assert_eq!(cka(&["empty", "0*"]), (1, "nonempty\n".into(), String::new()));
    assert_eq!(cka(&["empty", "a 0"]).0, 0);
}

#[test]
fn usage_errors_exit_2() {
    let (code, out, err) = cka(&["normalize", "(a+"]);
    assert_eq!((code, out.as_str()), (2, ""));
    assert!(err.contains("position"), "{err}");
    assert_eq!(cka(&["decide", "leq", "a"]).0, 2);
    assert_eq!(cka(&["member", "a^", "a*"]).0, 2);
    assert_eq!(cka(&["--alphabet", "a", "empty", "b"]).0, 2);
    assert_eq!(cka(&["--alphabet", "a,a", "empty", "a"]).0, 2);
    assert_eq!(cka(&[]).0, 2);
}
