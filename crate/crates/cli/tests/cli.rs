use std::io::Write;
use std::process::{Command, Output, Stdio};

use ccv::types::fixtures::ccv_fixtures;
use ccv::types::transport_aei16;

fn ccv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccv")).args(args).output().unwrap()
}

fn ccv_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ccv"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

#[test]
fn parse_prints_normalized_text() {
    let o = ccv(&["parse", "let x = mu k.[k] z in y"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "let x = mu k. [k] z in y");
}

#[test]
fn syntax_errors_are_usage_errors() {
    let o = ccv(&["parse", "\\x. "]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1:5"));
    assert_eq!(ccv(&["suite", "nope"]).status.code(), Some(2));
    assert_eq!(ccv(&["sn", "--fuel", "x", "y"]).status.code(), Some(2));
}

#[test]
fn sight_of_the_five_place_term() {
    let o = ccv(&["sight", "let y = x in mu k. [l] (\\z. x) y"]);
    assert_eq!(stdout(&o), "w^0*1");
    let o = ccv(&["sight", "let x = (mu k.[k]z) in y"]);
    assert_eq!(stdout(&o), "w^1*1");
}

#[test]
fn trace_out_of_fuel_is_inconclusive() {
    let o = ccv(&["trace", "--fuel", "4", "(\\x. x x) (\\x. x x)"]);
    assert_eq!(o.status.code(), Some(3));
    let lines = stdout(&o);
    assert_eq!(lines.lines().count(), 5);
    assert!(lines.lines().nth(1).unwrap().starts_with("-- beta_lambda @ ε --> "));
}

#[test]
fn sn_reports_cycles() {
    let o = ccv(&["sn", "--json", "(\\x. x x) (\\x. x x)"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["sn"], false);
    assert!(!v["cycle"].as_array().unwrap().is_empty());
    let o = ccv(&["sn", "--filter", "beta_mu,beta_jmp,eta_mu", "mu l. [l] mu k. [k] x"]);
    assert!(stdout(&o).starts_with("SN"));
}

#[test]
fn cps_variants() {
    assert_eq!(stdout(&ccv(&["cps", "--variant", "colon", "x y"])), "\\k. x y k");
    let o = ccv(&["cps", "--variant", "standard", "x"]);
    assert_eq!(stdout(&o), "\\k. k x");
}

#[test]
fn check_deriv_accepts_and_rejects() {
    let dir = std::env::temp_dir().join(format!("ccv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (_, d) = ccv_fixtures().unwrap().remove(2);
    let src = dir.join("src.json");
    std::fs::write(&src, d.to_json().to_string()).unwrap();
    let o = ccv(&["check-deriv", "--system", "ccv", src.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let tgt = transport_aei16(&d).unwrap().to_json().to_string();
    assert_eq!(ccv_stdin(&["check-deriv", "--system", "target-dot", "-"], &tgt).status.code(), Some(0));

    let mut bad = d.to_json();
    bad["premises"][0]["judgment"]["type"] = "zz".into();
    let o = ccv_stdin(&["check-deriv", "--json", "--system", "ccv", "-"], &bad.to_string());
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["valid"], false);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn typing_target_terms() {
    let o = ccv(&["typecheck-nf", "--sort", "T", "\\k. k x"]);
    assert_eq!(stdout(&o), "\\k. k x : (a0 -> bot) -> bot");
    let o = ccv(&["type-sn", "--json", "(\\x. x x) (\\y. y)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(ccv(&["typecheck-nf", "(\\x. x) y"]).status.code(), Some(1));
    assert_eq!(ccv(&["type-sn", "(\\x. x x) (\\x. x x)"]).status.code(), Some(1));
}

#[test]
fn enumerate_small_corpus() {
    let o = ccv(&["enumerate", "--size", "1", "--vars", "x", "--conames", "k"]);
    assert_eq!(stdout(&o), "x");
    let o = ccv(&["enumerate", "--size", "3", "--vars", "x", "--conames", "k"]);
    let ts = stdout(&o);
    for t in ["\\x. x", "x x", "mu k. [k] x"] {
        assert!(ts.lines().any(|l| l == t), "{t}");
    }
}

#[test]
fn suite_reports_json() {
    let o = ccv(&["suite", "--json", "five-places"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["criterion"], 9);
    assert_eq!(v[0]["pass"], true);
}
