//! The `hypercover` binary end to end.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn hypercover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypercover"))
        .args(args)
        .env_remove("HYPERCOVER_CAP")
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn flat_file(n: usize, m: i64) -> Value {
    let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let full = (1u32 << n) - 1;
    let values: serde_json::Map<String, Value> = (0..=full)
        .map(|x| {
            let v = if x == 0 { 0 } else if x == full { (1i64 << n) - n as i64 - 1 } else { (1i64 << (n - 1)) - 1 };
            (x.to_string(), v.into())
        })
        .collect();
    let m: serde_json::Map<String, Value> = labels.iter().map(|l| (l.clone(), m.into())).collect();
    json!({"kind": "cover", "functions": [{"ground": labels, "values": values}], "m": m})
}

#[test]
fn flat_instance_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("flat.json");
    let sol = dir.path().join("flat.sol.json");
    let trace = dir.path().join("flat.trace.jsonl");
    std::fs::write(&inst, flat_file(5, 15).to_string()).unwrap();
    for mode in ["basic", "uniform"] {
        let out = hypercover(&["solve", path(&inst), "--mode", mode, "--out", path(&sol), "--trace", path(&trace), "--diagnostics"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let s: Value = serde_json::from_str(&std::fs::read_to_string(&sol).unwrap()).unwrap();
        assert_eq!(s["total_weight"], 26);
        assert!(s["degrees"].as_object().unwrap().values().all(|d| d == 15));
        assert!(std::fs::read_to_string(&trace).unwrap().lines().count() >= 2);
        assert_eq!(hypercover(&["verify", path(&inst), path(&sol)]).status.code(), Some(0));
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("zero.json");
    std::fs::write(&inst, flat_file(4, 0).to_string()).unwrap();
    let out = hypercover(&["solve", path(&inst)]);
    assert_eq!(out.status.code(), Some(2));
    let cert: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cert["certificate"]["kind"], "uncovered");

    std::fs::write(&inst, "{not json").unwrap();
    assert_eq!(hypercover(&["solve", path(&inst)]).status.code(), Some(1));
    assert_eq!(hypercover(&["solve", "/nonexistent.json"]).status.code(), Some(1));
    assert_eq!(hypercover(&["gen", "cover", "-n", "30"]).status.code(), Some(1));
    assert_eq!(hypercover(&["gen", "cover", "-n", "22", "--cap", "22"]).status.code(), Some(1));
}

#[test]
fn cap_override() {
    let out = Command::new(env!("CARGO_BIN_EXE_hypercover"))
        .args(["gen", "cover", "-n", "5"])
        .env("HYPERCOVER_CAP", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(env!("CARGO_BIN_EXE_hypercover"))
        .args(["gen", "cover", "-n", "5", "--cap", "6", "--accept-cap"])
        .env("HYPERCOVER_CAP", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn generated_batch_with_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (i, kind) in ["cover", "local_ca", "simul_ca", "node_to_area", "mixed_ca"].iter().enumerate() {
        let f = dir.path().join(format!("{kind}.json"));
        let out = hypercover(&["gen", kind, "-n", "6", "--seed", &i.to_string(), "--feasible", "--out", path(&f)]);
        assert_eq!(out.status.code(), Some(0));
        let again = hypercover(&["gen", kind, "-n", "6", "--seed", &i.to_string(), "--feasible"]);
        assert_eq!(std::fs::read(&f).unwrap(), again.stdout);
        files.push(f);
    }
    let outdir = dir.path().join("out");
    std::fs::create_dir(&outdir).unwrap();
    let mut args = vec!["solve", "--jobs", "3", "--mode", "uniform", "--out", path(&outdir)];
    args.extend(files.iter().map(|f| path(f)));
    let out = hypercover(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in &files {
        let stem = f.file_stem().unwrap().to_str().unwrap();
        let sol = outdir.join(format!("{stem}.sol.json"));
        assert_eq!(hypercover(&["verify", path(f), path(&sol)]).status.code(), Some(0), "{stem}");
    }
}

#[test]
fn strong_flavor_needs_symmetry() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("flat.json");
    std::fs::write(&inst, flat_file(4, 7).to_string()).unwrap();
    // p(V) > 0 = p(∅), so the strong flavor is rejected.
    let out = hypercover(&["solve", path(&inst), "--flavor", "strong"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not symmetric"));
}
