use std::process::{Command, Output};

use serde_json::Value;

fn catgw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catgw")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = catgw(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn verify_n2_order4_passes() {
    let out = catgw(&["verify", "--n", "2", "--order", "4"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains(", 0 failed"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn potential_reports_four_point() {
    let v = json(&["potential", "--n", "3", "--format", "json"]);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["correlators"]["four_point_11nn"], "1");
    assert_eq!(v["correlators"]["two_point"][0][2], "1");
    assert_eq!(v["correlators"]["three_point"]["0,0,2"], "1");
    for ax in ["P1", "P2", "P3", "P4", "WDVV", "dimension"] {
        assert_eq!(v["axioms"][ax]["status"], "pass", "{ax}");
    }
}

#[test]
fn invariants_genus_one() {
    let v = json(&["invariants", "--n", "5", "--format", "json"]);
    assert_eq!(v["costello"]["inv_11"]["k=4,l=1"], "5/24");
    assert_eq!(v["costello"]["inv_11"]["k=2,l=1"], "0");
    assert_eq!(v["costello"]["inv_03"]["i=4,j=4,k=0"], "1");
    assert_eq!(v["hochschild"]["dim"], 5);
}

#[test]
fn primitive_form_j_terms() {
    let v = json(&["primitive-form", "--n", "2", "--order", "1", "--format", "json"]);
    // J_{-1} = -t_1 s_0 - t_0 s_1
    assert_eq!(v["J"]["u^-1"]["s_0"], serde_json::json!([[[0, 1], "-1"]]));
    assert_eq!(v["J"]["u^-1"]["s_1"], serde_json::json!([[[1, 0], "-1"]]));
    assert_eq!(v["r"], "-1/6");
}

#[test]
fn json_is_deterministic() {
    let a = catgw(&["potential", "--n", "2", "--order", "3", "--format", "json"]);
    let b = catgw(&["potential", "--n", "2", "--order", "3", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    fn no_floats(v: &Value) -> bool {
        match v {
            Value::Number(x) => x.is_i64() || x.is_u64(),
            Value::Array(a) => a.iter().all(no_floats),
            Value::Object(m) => m.values().all(no_floats),
            _ => true,
        }
    }
    assert!(no_floats(&serde_json::from_slice(&a.stdout).unwrap()));
}

#[test]
fn exit_codes() {
    assert_eq!(catgw(&["invariants"]).status.code(), Some(2));
    assert_eq!(catgw(&["potential", "--n", "2", "--order", "0"]).status.code(), Some(2));
    assert_eq!(catgw(&["verify", "--n", "two"]).status.code(), Some(2));
    assert_eq!(catgw(&["frobnicate", "--n", "2"]).status.code(), Some(2));
    assert_eq!(catgw(&["potential", "--n", "3", "--bar-cap", "5"]).status.code(), Some(3));
}

#[test]
fn text_output() {
    let out = catgw(&["potential", "--n", "2", "--order", "3"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("<1,1,1,1> = 1"), "{text}");
    assert!(text.contains("tau_0 = "));
}
