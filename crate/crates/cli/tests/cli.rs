use std::path::PathBuf;
use std::process::{Command, Output};

fn endoalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_endoalg")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    format!("@{}", p.display())
}

fn temp_config(name: &str, body: &str) -> String {
    let path = std::env::temp_dir().join(format!("endoalg-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn normalize_cancels() {
    let o = endoalg(&["normalize", "u[1] s s* u[-1] + u[0] - u[0]"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "u[1] s^1 s*^1 u[-1]\n");
}

#[test]
fn partition_of_unity_is_equal_to_one() {
    let o = endoalg(&["equal", "1", "u[0] s s* u[0] + u[1] s s* u[-1] + u[2] s s* u[-2]"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "true\n");
}

#[test]
fn false_verdict_exits_one() {
    let o = endoalg(&["equal", "1", "s s*"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "false\n");
}

#[test]
fn parse_error_exits_two_with_position() {
    let o = endoalg(&["normalize", "u[1 s"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("position 4"));
}

#[test]
fn unknown_flag_is_usage_error() {
    assert_eq!(endoalg(&["--bogus", "normalize", "1"]).status.code(), Some(2));
}

#[test]
fn cap_exhaustion_exits_three() {
    let cfg = temp_config("cap.cfg", "rank = 2\nmatrix = 1 -1 1 1\nenum_cap = 10\n");
    let o = endoalg(&["--config", &cfg, "cosets", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap 10"));
}

#[test]
fn orthogonalize_example_file() {
    let o = endoalg(&["orthogonalize", &data("worked_example.alg")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("M = 4\n"));
    assert!(out.contains("per-term exponents: {6,1}\n"));
    assert!(out.contains("p = 6\n"));
}

#[test]
fn orthogonalize_json_report() {
    let o = endoalg(&["--json", "orthogonalize", &data("worked_example.alg")]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "endoalg-report/1");
    assert_eq!(v["context"]["matrix"], "[[3]]");
    assert_eq!(v["result"]["p"], 6);
    assert_eq!(v["result"]["N"], 3);
    let exps: Vec<u64> =
        v["result"]["per_term_exponents"].as_array().unwrap().iter().map(|t| t["exponent"].as_u64().unwrap()).collect();
    assert_eq!(exps, vec![6, 1]);
    assert_eq!(v["verdict"], true);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["--json", "--seed", "7", "oracle-check", "--samples", "30"];
    let (a, b) = (endoalg(&args), endoalg(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_field_order_is_stable() {
    let out = stdout(&endoalg(&["--json", "normalize", "s"]));
    let keys = ["\"schema\"", "\"command\"", "\"context\"", "\"result\"", "\"verdict\""];
    let pos: Vec<usize> = keys.iter().map(|k| out.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn identity_endomorphism_is_not_pure() {
    let cfg = temp_config("id.cfg", "rank = 1\nmatrix = 1\n");
    let o = endoalg(&["--config", &cfg, "purity"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("not pure"));
    assert_eq!(stdout(&endoalg(&["--config", &cfg, "normalize", "u[1] s - s u[1]"])), "0\n");
}

#[test]
fn dynamics_commands() {
    let o = endoalg(&["freeness", "((1,0),1)", "V[1]{0}"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("moves"));
    let o = endoalg(&["orbit", "7@3", "V[2]{5}"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("true\n"));
    let o = endoalg(&["ore", "((1,0),2)", "((2,0),1)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("((0,0),3)"));
}

#[test]
fn algebra_commands() {
    assert_eq!(stdout(&endoalg(&["mul", "s*", "s"])), "u[0] s^0 s*^0 u[0]\n");
    assert_eq!(stdout(&endoalg(&["adjoint", "u[1] s"])), "u[0] s^0 s*^1 u[-1]\n");
    assert_eq!(stdout(&endoalg(&["expect", "u[1] s s* u[-1] + u[1] + s"])), "u[1] s^1 s*^1 u[-1]\n");
    let o = endoalg(&["oracle-check", "(1 + u[3] s)* (1 + u[3] s)"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn report_all_passes_for_tripling() {
    let o = endoalg(&["report-all"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("FAIL"));
}
