use std::process::{Command, Output};

use serde_json::Value;

fn qtheta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtheta"))
        .args(args)
        .env_remove("QTHETA_DEFAULT_ORDER")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Vec<Value> {
    match serde_json::from_str(&stdout(o)).unwrap() {
        Value::Array(v) => v,
        other => panic!("not an array: {}", other),
    }
}

#[test]
fn verify_json_record() {
    let o = qtheta(&["verify", "thm12.1", "--order", "30", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let recs = json(&o);
    assert_eq!(recs.len(), 1);
    let r = &recs[0];
    assert_eq!(r["id"], "thm12.1");
    assert_eq!(r["status"], "pass");
    assert_eq!(r["checked_order"], 30);
    assert!(r["first_mismatch"].is_null());
    assert!(r["wall_time_ms"].is_u64());
    // round trip through a generic parser
    let again: Value = serde_json::from_str(&serde_json::to_string(r).unwrap()).unwrap();
    assert_eq!(&again, r);
}

#[test]
fn check_mismatch_exit_code() {
    let o = qtheta(&[
        "check", "--lhs", "theta0", "--rhs", "theta1", "--order", "5", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let r = &json(&o)[0];
    assert_eq!(r["status"], "fail");
    let m = &r["first_mismatch"];
    assert_eq!(m["exponent_num"], 1);
    assert_eq!(m["exponent_den"], 1);
    assert_eq!(m["lhs"]["a"], "-2");
    assert_eq!(m["lhs"]["b"], "0");
    assert_eq!(m["rhs"]["a"], "1");
}

#[test]
fn check_pass() {
    let o = qtheta(&[
        "check",
        "--lhs",
        "theta1",
        "--rhs",
        "poch(2,2)^2 / poch(1,1)",
        "--order",
        "40",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("pass"));
}

#[test]
fn usage_errors_exit_two() {
    let o = qtheta(&["verify", "no.such.id"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown identity"));
    assert_eq!(
        qtheta(&["check", "--lhs", "theta0 ^", "--rhs", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(qtheta(&["verify", "jtp", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(qtheta(&["verify", "jtp", "--order", "-1"]).status.code(), Some(2));
    assert_eq!(qtheta(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qtheta(&[]).status.code(), Some(2));
    assert_eq!(qtheta(&["expand", "1/(2+q)"]).status.code(), Some(2));
}

#[test]
fn env_default_order() {
    let o = Command::new(env!("CARGO_BIN_EXE_qtheta"))
        .args(["verify", "classical.theta0", "--format", "json"])
        .env("QTHETA_DEFAULT_ORDER", "7")
        .output()
        .unwrap();
    assert_eq!(json(&o)[0]["checked_order"], 7);
    let o = qtheta(&["verify", "classical.theta0", "--format", "json"]);
    assert_eq!(json(&o)[0]["checked_order"], 50);
}

#[test]
fn csv_header_is_fixed() {
    let o = qtheta(&["verify", "del81", "chi3.omega", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "id,status,checked_order,exponent_num,exponent_den,lhs_a,lhs_b,rhs_a,rhs_b,detail,error,wall_time_ms"
    );
    assert!(lines.next().unwrap().starts_with("chi3.omega,pass,") || text.contains("del81,pass,"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn expand_dump_and_out_file() {
    let o = qtheta(&["expand", "1/(1-q)", "--order", "3"]);
    assert_eq!(stdout(&o), "0/1\t1\t0\n1/1\t1\t0\n2/1\t1\t0\n3/1\t1\t0\n");
    let o = qtheta(&["expand", "q^(1/3) * theta0", "--order", "2", "--den", "6"]);
    assert_eq!(stdout(&o), "2/6\t1\t0\n8/6\t-2\t0\n");
    assert_eq!(qtheta(&["expand", "q^(1/3)", "--den", "2"]).status.code(), Some(2));

    let dir = std::env::temp_dir().join(format!("qtheta-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.json");
    let o = qtheta(&["verify", "jtp", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v[0]["id"], "jtp");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn list_and_verify_all() {
    let o = qtheta(&["list", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let ids: Vec<String> = json(&o).iter().map(|c| c["id"].as_str().unwrap().to_string()).collect();
    assert!(ids.contains(&"thm12.1".to_string()));
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);

    let strip = |o: &Output| {
        json(o)
            .into_iter()
            .map(|mut r| {
                r["wall_time_ms"] = Value::Null;
                r
            })
            .collect::<Vec<_>>()
    };
    let one = qtheta(&["verify-all", "--jobs", "1", "--format", "json"]);
    let many = qtheta(&["verify-all", "--jobs", "4", "--format", "json"]);
    assert_eq!(one.status.code(), Some(0), "{}", stdout(&one));
    assert_eq!(strip(&one), strip(&many));
    assert_eq!(strip(&one).len(), ids.len());
}
