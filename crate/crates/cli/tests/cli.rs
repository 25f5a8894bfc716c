//! End-to-end runs of the `koszul` binary on the fixture posets.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "posets", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn koszul(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_koszul")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = koszul(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn without_runtime(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("runtime");
    v
}

#[test]
fn diamond_is_koszul() {
    let r = json(&["check", "--poset", &fixture("diamond.json")]);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["result"]["verdict"], true);
    for side in ["ring", "coring"] {
        for c in r["result"][side]["criteria"].as_array().unwrap() {
            assert_eq!(c["pass"], true, "{side} {}", c["id"]);
        }
    }
    assert_eq!(r["result"]["duality"]["chi_isomorphism"], true);
}

#[test]
fn pbad_fails_at_weight_three() {
    let r = json(&["check", "--poset", &fixture("pbad.json")]);
    assert_eq!(r["result"]["verdict"], false);
    assert_eq!(r["result"]["witness_weight"], 3);
    assert_eq!(r["result"]["ring"]["betti"]["rows"][2][3], 1);
}

#[test]
fn nongraded_input_is_rejected() {
    let out = koszul(&["check", "--poset", &fixture("nongraded.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[0, b]"));
    assert_eq!(koszul(&["check", "--poset", "/no/such/file.json"]).status.code(), Some(2));
    assert_eq!(koszul(&["check", "--poset", &fixture("diamond.json"), "--field", "fp:9"]).status.code(), Some(2));
}

#[test]
fn betti_tables() {
    let out = koszul(&["betti", "--poset", &fixture("diamond.json"), "--format", "csv"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').skip(1).collect()).collect();
    assert_eq!((rows[0][0], rows[1][1], rows[2][2]), ("4", "4", "1"));
    let chain = json(&["betti", "--poset", &fixture("chain3.json")]);
    assert_eq!(chain["result"]["diagonal"], serde_json::json!([4, 3, 0, 0, 0, 0, 0]));
    let anti = json(&["betti", "--poset", &fixture("antichain3.json")]);
    assert_eq!(anti["result"]["table"]["rows"], serde_json::json!([[3]]));
    let coring = json(&["betti", "--poset", &fixture("pbad.json"), "--side", "coring", "--max-weight", "3"]);
    assert_eq!(coring["result"]["table"]["rows"][2][3], 1);
}

#[test]
fn shriek_lists_zeta_relations() {
    let out = koszul(&["shriek", "--poset", &fixture("diamond.json"), "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("ζ[0,1] = e[0,a]⊗e[a,1] + e[0,b]⊗e[b,1]"), "{text}");
}

#[test]
fn dual_text() {
    let out = koszul(&["dual", "--poset", &fixture("diamond.json"), "--format", "text"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("dual ≅ incidence coring: true"));
}

#[test]
fn corpus_sweep_agrees() {
    let r = json(&["corpus", "--max-elements", "4"]);
    assert_eq!(r["result"]["posets"], 24);
    assert_eq!(r["result"]["agreement_percent"], 100.0);
}

#[test]
fn reports_are_reproducible_and_cached() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["check", "--poset", &fixture("cube.json")];
    let fresh = json(&args);
    let first = json(&[&args[..], &["--cache", cache, "--jobs", "1"]].concat());
    let second = json(&[&args[..], &["--cache", cache, "--jobs", "2"]].concat());
    assert_eq!(first["runtime"]["cache"], "miss");
    assert_eq!(second["runtime"]["cache"], "hit");
    let bodies: Vec<String> = [fresh, first, second]
        .into_iter()
        .map(|v| serde_json::to_string_pretty(&without_runtime(v)).unwrap())
        .collect();
    assert_eq!(bodies[0], bodies[1]);
    assert_eq!(bodies[1], bodies[2]);
}
