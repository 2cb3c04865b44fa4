use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vega-sharp")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    let text = String::from_utf8(out.stdout).unwrap();
    (serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}")), out.status.code().unwrap())
}

#[test]
fn verify_tomas_stein_four() {
    let (v, code) = json(&["verify", "--d", "4", "--q", "10/3"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "VERIFIED");
    assert_eq!(v["results"][0]["K"], 28);
    assert_eq!(v["command"], "verify");
    assert!(v["version"].is_string());
}

#[test]
fn q0_two() {
    let (v, code) = json(&["q0", "--d", "2"]);
    assert_eq!(code, 0);
    assert!(v["results"][0]["q0_upper"].as_f64().unwrap() <= 6.76);
}

#[test]
fn closed_form_four() {
    let (v, code) = json(&["lambda", "--d", "4", "--q", "4", "--k", "0", "--closed-form"]);
    assert_eq!(code, 0);
    let value = v["results"][0]["power"].as_f64().unwrap();
    let exact = 1.0 / (std::f64::consts::PI * std::f64::consts::PI);
    assert!((value - exact).abs() < 1e-12 * exact);
}

#[test]
fn json_reserializes_byte_identically() {
    let out = run(&["lambda", "--d", "5", "--q", "3", "--k", "0..2", "--format", "json"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
    assert!(v["results"][0]["power"]["lo"].is_number());
}

#[test]
fn csv_columns_and_rows() {
    let out = run(&["lambda", "--d", "4", "--q", "10/3", "--k", "0..3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "d,q,k,power_lo,power_hi,lambda_lo,lambda_hi,tail_hi,cutoff_R");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[1].starts_with("4,10/3,1,"));
}

#[test]
fn output_file_and_job_count() {
    let dir = tempfile::tempdir().unwrap();
    let path = |n: usize| dir.path().join(format!("jobs{n}.json"));
    for n in [1usize, 4] {
        let p = path(n);
        let out = run(&[
            "lambda", "--d", "5", "--q", "3", "--k", "1..6", "--format", "json", "--jobs", &n.to_string(), "--out",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(path(1)).unwrap(), std::fs::read(path(4)).unwrap());
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["lambda", "--d", "4", "--q", "ten"]).status.code(), Some(64));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["verify", "--d", "3", "--q", "7/2"]).status.code(), Some(3));
    assert_eq!(run(&["lambda", "--d", "4", "--q", "10/3", "--tol", "1e-300"]).status.code(), Some(4));
    // published cutoff is 28 but the scan stops at 27
    assert_eq!(run(&["repro", "thm4-d5"]).status.code(), Some(2));
}

#[test]
fn repro_tomas_stein_four() {
    let (v, code) = json(&["repro", "thm4-d4"]);
    assert_eq!(code, 0);
    let rows = v["results"].as_array().unwrap();
    let shown: Vec<&str> = rows.iter().skip(4).take(3).map(|r| r["shown"].as_str().unwrap()).collect();
    assert_eq!(shown, ["0.146", "0.103", "0.080"]);
}

#[test]
fn repro_tomas_stein_five_head_and_tail() {
    let (v, _) = json(&["repro", "thm4-d5"]);
    let rows = v["results"].as_array().unwrap();
    assert_eq!(rows[0]["shown"], "0.210");
    assert_eq!(rows[1]["shown"], "0.005");
}

#[test]
fn repro_q0_table() {
    let (v, code) = json(&["repro", "thm3"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"].as_array().unwrap().len(), 9);
}

#[test]
fn sphere_constant_and_beta() {
    let (v, code) = json(&["constant", "--d", "3", "--q", "inf"]);
    assert_eq!(code, 0);
    let c = &v["results"][0]["constant"];
    let four_pi = 4.0 * std::f64::consts::PI;
    assert!(c["lo"].as_f64().unwrap() <= four_pi && four_pi <= c["hi"].as_f64().unwrap());
    let (b, _) = json(&["beta", "--d", "10000"]);
    assert!((b["results"][0]["beta"].as_f64().unwrap() - (-1f64).exp()).abs() < 0.01);
}
