use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn workdir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn rainbow(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rainbow"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn counting_check_on_normal_input_is_clean() {
    let dir = workdir("cli-lemma");
    assert!(rainbow(&dir, &["gen", "--n", "400", "--seed", "2", "--same-last", "--out", "f.rrcol"]).status.success());
    let out = rainbow(&dir, &["verify", "lemma25", "--in", "f.rrcol", "--depth", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    for r in v["reports"].as_array().unwrap() {
        assert_eq!(r["violations"].as_array().unwrap().len(), 0);
        assert_eq!(r["preconditions_ok"], true);
    }
}

#[test]
fn block_density_at_least_half() {
    let dir = workdir("cli-block");
    assert!(rainbow(&dir, &["gen", "--n", "40", "--seed", "5", "--out", "f.rrcol"]).status.success());
    let out = rainbow(&dir, &["verify", "block", "--in", "f.rrcol", "--depth", "4"]);
    assert_eq!(out.status.code(), Some(0));
    for level in json(&out)["report"]["details"]["levels"].as_array().unwrap() {
        assert!(level["ratio"].as_f64().unwrap() >= 0.5);
    }
}

#[test]
fn three_bounded_block_input_reports_a_violation() {
    let dir = workdir("cli-block-bad");
    // (0,1), (0,2), (1,3) share a color.
    let mut text = String::from("RRCOL 1 k=2 b=3 n=8\n");
    let mut fresh = 10;
    for v in 1..8 {
        for u in 0..v {
            let c = if matches!((u, v), (0, 1) | (0, 2) | (1, 3)) {
                0
            } else {
                fresh += 1;
                fresh
            };
            text.push_str(&format!("{u} {v} {c}\n"));
        }
    }
    std::fs::write(dir.join("f.rrcol"), text).unwrap();
    let out = rainbow(&dir, &["verify", "block", "--in", "f.rrcol", "--depth", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let report = &json(&out)["report"];
    assert_eq!(report["preconditions_ok"], false);
    assert_eq!(report["violations"][0]["node"], serde_json::json!([0, 1]));
}

#[test]
fn dual_check_is_exhaustive_for_small_domains() {
    let dir = workdir("cli-galvin");
    assert!(rainbow(&dir, &["gen", "--n", "10", "--bound", "3", "--seed", "1", "--out", "f.rrcol"]).status.success());
    let out = rainbow(&dir, &["verify", "galvin", "--in", "f.rrcol"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["mode"], "exhaustive");
    assert_eq!(v["bound"], 3);
}

#[test]
fn reduce_emits_a_digest_of_the_bundle() {
    let dir = workdir("cli-reduce");
    assert!(rainbow(&dir, &["gen", "--stable", "--n", "30", "--window", "6", "--seed", "4", "--out", "f.rrcol"])
        .status
        .success());
    let out = rainbow(&dir, &["reduce", "--in", "f.rrcol", "--window", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(v["bundle"]["flags"]["final_rainbow"], true);
}

#[test]
fn exit_codes() {
    let dir = workdir("cli-exit");
    std::fs::write(dir.join("bad.rrcol"), "RRCOL 1 k=2 b=1 n=3\n0 1 5\n").unwrap();
    assert_eq!(rainbow(&dir, &["normalize", "--in", "bad.rrcol"]).status.code(), Some(2));
    assert_eq!(rainbow(&dir, &["normalize", "--in", "missing.rrcol"]).status.code(), Some(4));
    // Classes spread over different last coordinates: not a tail rainbow.
    assert!(rainbow(&dir, &["gen", "--n", "12", "--seed", "3", "--out", "free.rrcol"]).status.success());
    let out = rainbow(&dir, &["normalize", "--in", "free.rrcol"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tail rainbow"));
    assert_eq!(rainbow(&dir, &["sweep", "greedy", "--seeds", "5..2"]).status.code(), Some(2));
}

#[test]
fn timings_are_opt_in() {
    let dir = workdir("cli-timings");
    assert!(rainbow(&dir, &["gen", "--n", "20", "--seed", "1", "--out", "f.rrcol"]).status.success());
    let plain = json(&rainbow(&dir, &["rainbow", "--in", "f.rrcol"]));
    assert!(plain.get("elapsed_ms").is_none());
    let timed = json(&rainbow(&dir, &["rainbow", "--in", "f.rrcol", "--timings"]));
    assert!(timed["elapsed_ms"].is_number());
    assert_eq!(plain["rainbow"], timed["rainbow"]);
}

#[test]
fn sweep_csv_schema() {
    let dir = workdir("cli-sweep");
    let out = rainbow(&dir, &["sweep", "normalize", "--seeds", "0..3", "--n", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("experiment,seed,n,checked,violations,passed,metric,error"));
    let seeds: Vec<&str> = lines.map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(seeds, ["0", "1", "2"]);
}
