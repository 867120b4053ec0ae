use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use manhattan::fixtures;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_manhattan"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn verify_known_embedding() {
    let d = tempfile::tempdir().unwrap();
    let p = write(d.path(), "p.txt", &fixtures::all_rankings_of_three().to_text());
    let e = write(d.path(), "e.txt", &fixtures::all_rankings_of_three_embedding().to_text());
    let o = run(&["verify", "--profile", s(&p), "--embedding", s(&e), "--metric", "l1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["verdict"], "consistent");
    // swapping two voters breaks it
    let bad = write(d.path(), "bad.txt", "2 3\n2 1 3\n1 2 3\n");
    let e2 = write(d.path(), "e2.txt", "2 2 3\n4 3\n4 0\n4 0\n0 4\n0 0\n");
    let o = run(&["verify", "--profile", s(&bad), "--embedding", s(&e2)]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout_json(&o)["verdict"], "violation");
}

#[test]
fn recognize_counterexample_exits_3() {
    let d = tempfile::tempdir().unwrap();
    let p = write(d.path(), "ex.txt", &fixtures::three_voter_counterexample().to_text());
    let o = run(&["recognize", "--profile", s(&p)]);
    assert_eq!(o.status.code(), Some(3));
    let j = stdout_json(&o);
    assert_eq!(j["verdict"], "infeasible");
    assert!(j.get("witness").is_none());
    for k in ["nodes", "prunes", "millis"] {
        assert!(j[k].is_u64(), "{k}");
    }
}

#[test]
fn recognize_feasible_writes_witness() {
    let d = tempfile::tempdir().unwrap();
    let p = write(d.path(), "p.txt", &fixtures::betweenness().to_text());
    let w = d.path().join("w.txt");
    let o = run(&["recognize", "--profile", s(&p), "--out", s(&w)]);
    assert_eq!(o.status.code(), Some(0));
    let j = stdout_json(&o);
    assert_eq!(j["verdict"], "feasible");
    assert_eq!(j["witness"].as_str().unwrap(), fs::read_to_string(&w).unwrap());
    let o = run(&["verify", "--profile", s(&p), "--embedding", s(&w)]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn recognize_budget_exits_4() {
    let d = tempfile::tempdir().unwrap();
    let p = write(d.path(), "ex.txt", &fixtures::three_voter_counterexample().to_text());
    let o = run(&["recognize", "--profile", s(&p), "--budget", "3", "--no-fast-path"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(stdout_json(&o)["verdict"], "undecided");
}

#[test]
fn embed_then_verify_round_trip() {
    let d = tempfile::tempdir().unwrap();
    let p = write(d.path(), "p1.txt", &fixtures::two_voters().to_text());
    for method in ["n-dim", "m-dim"] {
        let e = d.path().join(format!("{method}.txt"));
        let o = run(&["embed", "--method", method, "--profile", s(&p), "--out", s(&e)]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let o = run(&["verify", "--profile", s(&p), "--embedding", s(&e)]);
        assert_eq!(o.status.code(), Some(0));
    }
    let o = run(&["embed", "--method", "n-dim", "--profile", s(&p)]);
    assert_eq!(String::from_utf8_lossy(&o.stdout), fixtures::two_voters_embedding().to_text());
    let o = run(&["embed", "--method", "n-dim", "--profile", s(&p), "--offset", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn decimal_output() {
    let d = tempfile::tempdir().unwrap();
    let p = write(d.path(), "p.txt", "1 2\n2 1\n");
    let o = run(&["--decimal", "embed", "--method", "m-dim", "--profile", s(&p)]);
    assert_eq!(String::from_utf8_lossy(&o.stdout), "1 1 2\n0.000000\n2.000000\n0.000000\n");
}

#[test]
fn parse_check_and_detect() {
    let d = tempfile::tempdir().unwrap();
    let p = write(d.path(), "q1.txt", "# comment\n3 3\n1 2 3\n3 2 1\n\n3 2 1\n");
    let o = run(&["parse-check", "--profile", s(&p)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stdout), "3 3\n1 2 3\n3 2 1\n3 2 1\n");
    let sp = write(d.path(), "q2.txt", &fixtures::exterior_spec().to_string());
    let o = run(&["parse-check", "--spec", s(&sp)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("8 expansion"));
    let bad = write(d.path(), "bad.txt", "2 3\n1 2 3\n1 1 2\n");
    assert_eq!(run(&["parse-check", "--profile", s(&bad)]).status.code(), Some(2));

    let o = run(&["detect", "--profile", s(&p)]);
    assert_eq!(o.status.code(), Some(0));
    let j = stdout_json(&o);
    let certs = j["certificates"].as_array().unwrap();
    assert!(certs.iter().any(|c| c["kind"] == "BE" && c["voters"] == serde_json::json!([1, 2, 3]) && c["alts"] == serde_json::json!([1, 3, 2])));
    assert_eq!(j["triples"][0]["verdict"]["outcome"], "inconclusive");
}

#[test]
fn plot_writes_svg() {
    let d = tempfile::tempdir().unwrap();
    let e = write(d.path(), "e.txt", &fixtures::two_voters_embedding().to_text());
    let out = d.path().join("fig.svg");
    let o = run(&["plot", "--embedding", s(&e), "--circles", "v1,v2", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let svg = fs::read_to_string(&out).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polygon").count(), 10);
    let e3 = write(d.path(), "e3.txt", "3 1 1\n0 0 0\n1 1 1\n");
    assert_eq!(run(&["plot", "--embedding", s(&e3), "--out", s(&out)]).status.code(), Some(2));
    assert_eq!(run(&["plot", "--embedding", s(&e), "--circles", "v9", "--out", s(&out)]).status.code(), Some(2));
}

#[test]
fn scan_small_case() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("scan.jsonl");
    let o = run(&["scan", "--voters", "2", "--alts", "3", "--store-witnesses", "--threads", "2", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let j = stdout_json(&o);
    assert_eq!(j["total"], 5);
    assert_eq!(j["feasible"], 5);
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 5);
    let o = run(&["scan", "--voters", "2", "--alts", "3", "--shard", "9:12", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn frontier_quick() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("frontier.json");
    let o = run(&["frontier", "--quick", "--samples", "2", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let j: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let cells = j["cells"].as_array().unwrap();
    assert!(cells.iter().all(|c| c["pass"] == true));
    assert!(cells.iter().any(|c| c["expected"] == "infeasible"));
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["recognize", "--profile"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--profile", "x", "--embedding", "y", "--metric", "l3"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
