use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_planarlab"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).env_remove("PLANARLAB_CACHE").output().expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_in(Path::new(env!("CARGO_MANIFEST_DIR")), args)
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn mc_order_two_matches_one_quarter() {
    let v = json(&run(&["stability", "mc", "--order", "2", "--kind", "diff", "--trials", "1000000", "--seed", "7"]));
    let (est, se) = (v["estimate"].as_f64().unwrap(), v["stderr"].as_f64().unwrap());
    assert_eq!(v["trials"], 1_000_000);
    assert!((est - 0.25).abs() < 3.0 * se, "estimate {est} ± {se}");
}

#[test]
fn lychrel_89_takes_24_steps() {
    let v = json(&run(&["seq", "lychrel", "--n", "89", "--cap", "100"]));
    assert_eq!(v["steps"], 24);
    assert_eq!(v["value"], "8813200023188");
}

#[test]
fn census_of_the_file_system_finds_five_roots() {
    let v = json(&run(&["fewnomial", "census", "--system", &data("kou.json"), "--depth", "14"]));
    assert_eq!(v["count"], 5);
    let b = json(&run(&["fewnomial", "census", "--builtin", "kou", "--depth", "14"]));
    assert_eq!(b["boxes"], v["boxes"]);
}

#[test]
fn identical_runs_give_identical_summaries() {
    let tmp = tempfile::tempdir().unwrap();
    let args = |out: &str, workers: &str| {
        vec!["stability", "mc", "--order", "3", "--trials", "200000", "--seed", "11", "--workers", workers, "--out", out]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>()
    };
    let mut digests = Vec::new();
    for (out, w) in [("a", "1"), ("b", "1"), ("c", "3")] {
        let a = args(out, w);
        let o = run_in(tmp.path(), &a.iter().map(String::as_str).collect::<Vec<_>>());
        assert!(o.status.success());
        let m = manifest(&tmp.path().join(out));
        assert_eq!(m["status"], "ok");
        assert_eq!(m["seeds"], serde_json::json!([11]));
        assert!(m["started_at"].is_string() && m["finished_at"].is_string());
        digests.push((m["result_digest"].clone(), fs::read(tmp.path().join(out).join("result.json")).unwrap()));
    }
    assert!(digests.windows(2).all(|w| w[0] == w[1]), "worker count or rerun changed the result");
}

#[test]
fn manifest_digests_inputs_and_lists_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = run(&["fewnomial", "census", "--system", &data("kou.json"), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let m = manifest(&out);
    assert_eq!(m["subcommand"], "fewnomial census");
    assert_eq!(m["params"]["command"]["depth"], 14);
    let inputs = m["inputs"].as_array().unwrap();
    assert_eq!(inputs.len(), 1);
    assert_eq!(inputs[0]["sha256"].as_str().unwrap().len(), 64);
    let mut listed: Vec<&str> = m["outputs"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    listed.sort();
    assert_eq!(listed, ["result.json", "roots.csv"]);
    assert_eq!(fs::read_to_string(out.join("roots.csv")).unwrap().lines().count(), 6);
}

fn tree(dir: &Path) -> Vec<PathBuf> {
    let mut v = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            v.extend(tree(&p));
        }
        v.push(p);
    }
    v.sort();
    v
}

#[test]
fn nothing_is_written_outside_out() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["cycles", "--builtin", "melnikov-two-cycles", "--range", "0.2,8", "--grid", "20"],
        &["period", "--builtin", "linear-centre", "--grid", "10"],
        &["melnikov", "--builtin", "melnikov-two-cycles", "--samples", "5"],
        &["abel", "--random", "1", "--a3-one", "--grid", "11"],
        &["dulac", "--example", "polynomial"],
        &["pwl", "--builtin", "chebyshev:4,0.001", "--grid", "30"],
        &["geometry", "billiard", "--triangle", "0,0,4,0,1,3", "--start", "1.5,1", "--direction", "0.3,1"],
        &["seq", "persistence", "--records", "4"],
        &["verify-paper", "--criterion", "12"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let dir = format!("out{i}");
        let mut a = args.to_vec();
        a.extend(["--out", &dir]);
        let o = run_in(tmp.path(), &a);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    for p in tree(tmp.path()) {
        let rel = p.strip_prefix(tmp.path()).unwrap();
        assert!(rel.components().next().unwrap().as_os_str().to_str().unwrap().starts_with("out"), "stray file {rel:?}");
    }
    // no --out: nothing at all
    let empty = tempfile::tempdir().unwrap();
    assert!(run_in(empty.path(), &["seq", "singmaster", "--n", "120"]).status.success());
    assert!(tree(empty.path()).is_empty());
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["seq", "singmaster", "--n", "120"]), 0);
    // bad input
    assert_eq!(code(&["seq", "singmaster", "--n", "1"]), 2);
    assert_eq!(code(&["seq", "lychrel", "--n", "12x"]), 2);
    assert_eq!(code(&["cycles", "--field", "/nonexistent.json"]), 2);
    assert_eq!(code(&["cycles", "--builtin", "no-such-field"]), 2);
    assert_eq!(code(&["stability", "mc", "--order", "2", "--kind", "sideways"]), 2);
    assert_eq!(code(&["geometry", "fagnano", "--triangle", "0,0,4,0,-1,1"]), 2);
    assert_eq!(code(&["verify-paper", "--criterion", "99"]), 2);
    assert_eq!(code(&["no-such-subcommand"]), 2);
    assert_eq!(code(&["stability", "mc", "--order", "2", "--tol", "5"]), 2);
    // resource cap
    assert_eq!(code(&["stability", "mc", "--order", "16"]), 3);
    // numeric failure
    assert_eq!(code(&["melnikov", "--builtin", "melnikov-two-cycles", "--levels", "1e300"]), 1);
}

#[test]
fn failed_runs_still_finalise_the_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(tmp.path(), &["stability", "mc", "--order", "16", "--out", "o"]);
    assert_eq!(o.status.code(), Some(3));
    let m = manifest(&tmp.path().join("o"));
    assert_eq!(m["status"], "error");
    assert_eq!(m["exit_code"], 3);
    assert!(m["error"].as_str().unwrap().contains("15"));
    assert!(m["result_summary"].is_null());
}

#[test]
fn csv_and_pretty_formats() {
    let o = run(&["seq", "persistence", "--records", "7", "--format", "csv"]);
    assert!(o.status.success());
    let s = String::from_utf8(o.stdout).unwrap();
    assert_eq!(s.lines().last(), Some("7,68889"));
    let o = run(&["seq", "singmaster", "--n", "3003", "--format", "csv"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "key,value\ncount,8\nn,3003\n");
    let o = run(&["verify-paper", "--criterion", "12", "--pretty"]);
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.starts_with("[PASS] 12."), "{s}");
    assert!(s.contains("1 of 1 criteria passed"));
}

#[test]
fn field_files_are_accepted() {
    let tmp = tempfile::tempdir().unwrap();
    let f = tmp.path().join("centre.json");
    fs::write(
        &f,
        r#"{"kind": "polynomial", "components": [
            {"vars": ["x", "y"], "terms": [{"e": [0, 1], "c": "-1"}]},
            {"vars": ["x", "y"], "terms": [{"e": [1, 0], "c": "1"}]}]}"#,
    )
    .unwrap();
    let v = json(&run(&["period", "--field", f.to_str().unwrap(), "--grid", "12"]));
    assert_eq!(v["closed_orbits"], 12);
    assert_eq!(v["critical_periods"]["count"], 0);
    let v = json(&run(&["cycles", "--field", f.to_str().unwrap(), "--grid", "8"]));
    assert_eq!(v["continuum"], true);
    assert_eq!(v["field"]["monomials"], 2);
}
