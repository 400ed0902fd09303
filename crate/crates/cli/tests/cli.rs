use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn msr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msr")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("msr-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn construct_prints_parameters() {
    let dir = scratch("construct");
    let spec = dir.join("a.json");
    let o = msr(&["construct", "--r", "2", "--m", "3", "--out", p(&spec)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "q=4 k=6 ell=8 n=8");

    let o = msr(&["construct", "--r", "3", "--m", "1", "--out", p(&spec)]);
    assert!(stdout(&o).starts_with("q=4 "));
    let o = msr(&["construct", "--r", "3", "--m", "1", "--parity", "odd", "--out", p(&spec)]);
    assert!(stdout(&o).starts_with("q=7 "));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(msr(&["construct", "--r", "2", "--m", "3", "--variant", "long"]).status.code(), Some(2));
    assert_eq!(msr(&["construct", "--r", "2", "--m", "8"]).status.code(), Some(2));
    assert_eq!(msr(&["construct", "--r", "3", "--m", "5"]).status.code(), Some(2));
    assert_eq!(msr(&["construct", "--r", "4", "--m", "1"]).status.code(), Some(2));
    assert_eq!(msr(&["construct", "--r", "2", "--m", "3", "--q", "6"]).status.code(), Some(2));
    assert_eq!(msr(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let dir = scratch("verify");
    let spec = dir.join("a.json");
    msr(&["construct", "--r", "2", "--m", "2", "--out", p(&spec)]);
    let o = msr(&["verify", p(&spec)]);
    assert_eq!(o.status.code(), Some(0));
    let cert: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cert["passed"], true);

    let text = std::fs::read_to_string(&spec).unwrap();
    let mut json: serde_json::Value = serde_json::from_str(&text).unwrap();
    let entry = &mut json["pairs"][0]["A"][0][0];
    *entry = serde_json::json!((entry.as_u64().unwrap() + 1) % 3);
    let edited = dir.join("edited.json");
    std::fs::write(&edited, serde_json::to_string(&json).unwrap()).unwrap();
    let o = msr(&["verify", p(&edited)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL"));

    let truncated = dir.join("truncated.json");
    std::fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    assert_eq!(msr(&["verify", p(&truncated)]).status.code(), Some(2));
    assert_eq!(msr(&["verify", p(&dir.join("missing.json"))]).status.code(), Some(2));
}

#[test]
fn encode_repair_reconstruct_round_trip() {
    let dir = scratch("roundtrip");
    let spec = dir.join("a.json");
    let nodes = dir.join("n.json");
    msr(&["construct", "--r", "3", "--m", "1", "--parity", "odd", "--out", p(&spec)]);
    assert_eq!(msr(&["encode", p(&spec), "--seed", "9", "--out", p(&nodes)]).status.code(), Some(0));
    for j in ["0", "1", "2"] {
        let o = msr(&["repair", p(&spec), p(&nodes), "--node", j]);
        assert_eq!(o.status.code(), Some(0));
        let t: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(t["symbols_sent"], 5);
        assert_eq!(t["symbols_accessed"], serde_json::json!([1, 1, 1, 1, 1]));
    }
    assert_eq!(msr(&["repair", p(&spec), p(&nodes), "--node", "4"]).status.code(), Some(2));
    let o = msr(&["reconstruct", p(&spec), p(&nodes), "--from", "1,3,5"]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["matches_systematic"], true);
    assert_eq!(msr(&["reconstruct", p(&spec), p(&nodes), "--from", "1,3"]).status.code(), Some(2));
}

#[test]
fn simulate_and_report() {
    let dir = scratch("simulate");
    let r2 = dir.join("r2.json");
    let long = dir.join("long.json");
    msr(&["construct", "--r", "2", "--m", "2", "--out", p(&r2)]);
    msr(&["construct", "--r", "3", "--m", "1", "--variant", "long", "--out", p(&long)]);

    let o = msr(&["simulate", p(&r2), "--trials", "20", "--seed", "3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let s: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(s["passed"], true);
    assert!(s["nodes"].as_array().unwrap().iter().all(|n| n["symbols_sent"] == 10));

    let o = msr(&["simulate", p(&long), "--trials", "2", "--json"]);
    let s: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let access: Vec<u64> =
        s["nodes"].as_array().unwrap().iter().map(|n| n["accessed_per_helper"].as_u64().unwrap()).collect();
    assert_eq!(access, vec![1, 1, 1, 3]);

    let o = msr(&["report", p(&r2), p(&long), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let rep: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep["rows"][0]["ell"], 4);
    assert_eq!(rep["rows"][1]["access_optimal"], false);
}

#[test]
fn identical_config_gives_identical_bytes() {
    let dir = scratch("determinism");
    let run = |tag: &str| {
        let spec = dir.join(format!("{tag}.json"));
        let nodes = dir.join(format!("{tag}-nodes.json"));
        let sim = dir.join(format!("{tag}-sim.json"));
        msr(&["construct", "--r", "3", "--m", "2", "--out", p(&spec)]);
        msr(&["encode", p(&spec), "--seed", "11", "--out", p(&nodes)]);
        msr(&["simulate", p(&spec), "--trials", "4", "--seed", "11", "--json", "--out", p(&sim)]);
        [spec, nodes, sim].map(|f| std::fs::read(f).unwrap())
    };
    assert_eq!(run("first"), run("second"));
    let seq = dir.join("seq.json");
    let spec = dir.join("first.json");
    msr(&["--sequential", "simulate", p(&spec), "--trials", "4", "--seed", "11", "--json", "--out", p(&seq)]);
    assert_eq!(std::fs::read(seq).unwrap(), std::fs::read(dir.join("first-sim.json")).unwrap());
}
