//! End-to-end runs of the `uricci` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn uricci(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uricci")).args(args).output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = uricci(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(args: &[&str]) -> i32 {
    uricci(args).status.code().expect("exit code")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("uricci-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Data rows of a CSV artifact, parsed as floats where possible.
fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema_version=1"));
    lines.next().expect("header");
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

fn sidecar(path: &Path) -> Value {
    let mut p = path.as_os_str().to_owned();
    p.push(".json");
    serde_json::from_str(&std::fs::read_to_string(PathBuf::from(p)).unwrap()).unwrap()
}

#[test]
fn classify_examples() {
    let v = ok_json(&["classify", "1", "0", "0"]);
    assert_eq!(v["schema_version"], "1");
    assert_eq!(v["payload"]["class"], "H3");
    assert_eq!(v["payload"]["canonical"]["Coords"]["m2"], 0.0);
    assert_eq!(v["payload"]["canonical"]["Coords"]["m3"], 0.0);
    assert_eq!(v["payload"]["region"]["tag"], "P1");
    assert_eq!(v["payload"]["region"]["geometry_note"], "Heisenberg soliton");

    let v = ok_json(&["classify", "1", "1", "1"]);
    assert_eq!(v["payload"]["class"], "SU2");
    assert_eq!(v["payload"]["canonical"]["Coords"]["m2"], 1.0);
    assert_eq!(v["payload"]["region"]["tag"], "P4");
    assert_eq!(v["payload"]["region"]["geometry_note"], "round metric");
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["classify", "0", "0", "0"]), 2);
    assert_eq!(code(&["classify", "1", "x", "0"]), 3);
    assert_eq!(code(&["classify", "1", "0"]), 3);
    assert_eq!(code(&["no-such-command"]), 3);
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["curvature", "0", "0", "0"]), 2);
    assert_eq!(code(&["asymptotics", "--class", "e2", "--initial", "1,1,1,1,1,1"]), 5);
    assert_eq!(code(&["replay", "/definitely/not/here.json"]), 1);
    let dir = scratch("codes");
    let out = dir.join("x.csv");
    let out = out.to_str().unwrap();
    assert_eq!(code(&["evolve", "--formulation", "q", "--initial", "1,1,1", "--out", out]), 2);
    assert_eq!(code(&["separatrix", "--tol", "0.5", "--out", out]), 2);
    assert_eq!(code(&["portrait", "--grid", "1", "--out", out]), 2);
}

#[test]
fn help_documents_exit_codes() {
    let out = uricci(&["--help"]);
    let text = String::from_utf8_lossy(&out.stdout);
    for needle in ["0", "2", "3", "4", "5"] {
        assert!(text.contains(needle));
    }
    assert!(text.to_lowercase().contains("exit"));
}

#[test]
fn curvature_examples() {
    let v = ok_json(&["curvature", "1", "1", "0"]);
    assert_eq!(v["payload"]["ricci_eigs"], serde_json::json!([0.0, 0.0, 0.0]));
    assert_eq!(ok_json(&["curvature", "1", "1", "1"])["payload"]["scalar"], 1.5);
    assert_eq!(ok_json(&["curvature", "1", "0", "0"])["payload"]["scalar"], -0.5);
}

#[test]
fn evolve_examples() {
    let dir = scratch("evolve");

    let out = dir.join("m.csv");
    ok_json(&["evolve", "--formulation", "m", "--initial", "0.5,0.5", "--t-end", "50", "--out", out.to_str().unwrap()]);
    let rows = csv_rows(&out);
    let last = rows.last().unwrap();
    assert!((f(&last[1]) - 1.0).abs() < 1e-6 && (f(&last[2]) - 1.0).abs() < 1e-6, "{last:?}");

    let out = dir.join("sphere.csv");
    ok_json(&["evolve", "--formulation", "q", "--initial", "1,1,1,1,1,1", "--out", out.to_str().unwrap()]);
    let meta = sidecar(&out);
    assert_eq!(meta["payload"]["termination"], "ExtinctionFloor");
    let t_last = f(&csv_rows(&out).last().unwrap()[0]);
    assert!(t_last < 1.0, "{t_last}");

    let out = dir.join("flat.csv");
    ok_json(&["evolve", "--formulation", "q", "--initial", "1,1,0,1,1,1", "--out", out.to_str().unwrap()]);
    let rows = csv_rows(&out);
    assert!(rows.iter().all(|r| r[1..] == rows[0][1..]));

    // rk4 lands on t_end
    let out = dir.join("a.csv");
    ok_json(&[
        "evolve", "--formulation", "a", "--initial", "1,2,-1", "--t-end", "0.1", "--method", "rk4", "--step", "1e-2",
        "--out", out.to_str().unwrap(),
    ]);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 11);
    assert_eq!(f(&rows[10][0]), 0.1);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn portrait_examples() {
    let dir = scratch("portrait");
    let out = dir.join("p.csv");
    let meta = ok_json(&["portrait", "--grid", "2", "--out", out.to_str().unwrap()]);
    let seeds = meta["payload"]["seeds"].as_array().unwrap();
    assert_eq!(seeds.len(), 4);
    for s in seeds {
        for dir in ["forward", "backward"] {
            let b = &s[dir];
            let near = b["distance"].as_f64().unwrap_or(f64::INFINITY);
            assert!(b["termination"] == "BlowUpCeiling" || near < 1e-3, "{s}");
        }
    }
    // row-major seed order
    assert_eq!(seeds[0]["seed"], serde_json::json!([-0.2, -2.2]));
    assert_eq!(seeds[1]["seed"], serde_json::json!([1.2, -2.2]));
    assert_eq!(sidecar(&out), meta);

    // seed (1,1) sits on a fixed point
    let out = dir.join("fixed.csv");
    ok_json(&["portrait", "--grid", "2", "--window", "1,2,1,2", "--out", out.to_str().unwrap()]);
    let rows: Vec<_> = csv_rows(&out).into_iter().filter(|r| r[0] == "0").collect();
    assert_eq!(rows.len(), 2, "one point per direction");
    assert!(rows.iter().all(|r| f(&r[3]) == 1.0 && f(&r[4]) == 1.0));

    let out = dir.join("sol.csv");
    let meta = ok_json(&["portrait", "--grid", "2", "--window", "0.5,0.6,-0.95,-0.9", "--out", out.to_str().unwrap()]);
    let fwd = &meta["payload"]["seeds"][0]["forward"];
    assert_eq!(fwd["nearest"], "P3");
    let end = fwd["end"].as_array().unwrap();
    assert!((end[0].as_f64().unwrap() - 1.0).abs() < 1e-3 && end[1].as_f64().unwrap().abs() < 1e-3);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn equivalent_examples() {
    let yes = |args: [&str; 6]| {
        let mut v = vec!["equivalent"];
        v.extend(args);
        ok_json(&v)["payload"]["equivalent"].as_bool().unwrap()
    };
    assert!(yes(["2", "-4", "0", "1", "0", "-0.5"]));
    assert!(yes(["1", "1", "1", "2", "2", "2"]));
    assert!(!yes(["1", "1", "1", "1", "1", "-1"]));
    let v = ok_json(&["equivalent", "2", "-4", "0", "1", "0", "-0.5"]);
    assert_eq!(v["payload"]["oracle_agrees"], true);
}

#[test]
fn separatrix_artifacts() {
    let dir = scratch("sep");
    let out = dir.join("s.csv");
    ok_json(&["separatrix", "--samples", "32", "--out", out.to_str().unwrap()]);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 32);
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (f(&r[0]), f(&r[1]))).collect();
    assert!(pts.windows(2).all(|w| w[1].1 > w[0].1));
    assert!(pts[0].0.hypot(pts[0].1 + 1.0) < 1e-6);
    assert!((pts[31].0 - 1.0).hypot(pts[31].1) < 1e-6);
    let meta = sidecar(&out);
    assert!(meta.to_string().contains("taylor"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn asymptotics_defaults() {
    let v = ok_json(&["asymptotics", "--class", "sl2r"]);
    let fits = v["payload"]["fits"].as_array().expect("fits");
    let growing: Vec<f64> = fits
        .iter()
        .filter_map(|f| f["constants"]["ratio_at_end"].as_f64())
        .collect();
    assert_eq!(growing.len(), 2);
    assert!(growing.iter().all(|r| (1.96..=2.04).contains(r)));
    let v = ok_json(&["asymptotics", "--class", "e2"]);
    assert!(v["payload"].to_string().contains("E3"));
}

#[test]
fn outputs_are_deterministic() {
    let dir = scratch("det");
    let out = dir.join("p.csv");
    let args = ["portrait", "--grid", "3", "--t-span", "50", "--out", out.to_str().unwrap()];
    let first = (uricci(&args).stdout, std::fs::read(&out).unwrap(), std::fs::read(dir.join("p.csv.json")).unwrap());
    let second = (uricci(&args).stdout, std::fs::read(&out).unwrap(), std::fs::read(dir.join("p.csv.json")).unwrap());
    assert!(first == second);
    assert_eq!(uricci(&["classify", "2", "1", "-0.5"]).stdout, uricci(&["classify", "2", "1", "-0.5"]).stdout);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn replay_round_trips() {
    let dir = scratch("replay");
    for args in [
        vec!["classify", "2", "1", "-0.5"],
        vec!["curvature", "1", "-1", "0"],
        vec!["equivalent", "1", "1", "1", "2", "2", "2"],
    ] {
        let out = uricci(&args);
        let file = dir.join("record.json");
        std::fs::write(&file, &out.stdout).unwrap();
        let again = uricci(&["replay", file.to_str().unwrap()]);
        assert_eq!(again.status.code(), Some(0));
        assert_eq!(again.stdout, out.stdout, "{args:?}");
    }
    // a sidecar replays into the same artifact
    let out = dir.join("e.csv");
    ok_json(&["evolve", "--formulation", "m", "--initial", "0.3,-0.4", "--t-end", "3", "--out", out.to_str().unwrap()]);
    let csv = std::fs::read(&out).unwrap();
    let side = dir.join("e.csv.json");
    let replayed = uricci(&["replay", side.to_str().unwrap()]);
    assert_eq!(replayed.status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), csv);
    std::fs::remove_dir_all(&dir).ok();
}
