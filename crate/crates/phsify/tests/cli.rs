use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use phsify::dot::validate_dot;
use phsify::json::load_json;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_phsify"))
}

fn golden(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "golden", name].iter().collect()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_then_verify_every_golden() {
    let dir = tempfile::tempdir().unwrap();
    for f in ["oscillator.ode", "rigid_body.ode", "lotka_volterra3.ode", "lotka_volterra5.ode", "fluid.ode"] {
        let (out, dot) = (dir.path().join("g.json"), dir.path().join("g.dot"));
        let o = run(&["analyze", s(&golden(f)), "--out", s(&out), "--dot", s(&dot)]);
        assert_eq!(code(&o), 0, "{}: {}", f, String::from_utf8_lossy(&o.stderr));
        let g = load_json(&fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(g.provenance.source_hash.len(), 64);
        let shape = validate_dot(&fs::read_to_string(&dot).unwrap()).unwrap();
        assert_eq!(shape.clusters, g.nodes.len());
        let o = run(&["verify", s(&golden(f)), s(&out)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
        assert!(String::from_utf8_lossy(&o.stdout).contains("symbolic_identity: true"));
    }
}

#[test]
fn output_is_byte_deterministic() {
    let a = run(&["analyze", s(&golden("fluid.ode"))]);
    let b = run(&["analyze", s(&golden("fluid.ode"))]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema"], "phsify/1");
    assert_eq!(v["provenance"]["config"]["dot_mode"], "aux");
}

#[test]
fn corrupted_graph_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    assert_eq!(code(&run(&["analyze", s(&golden("oscillator.ode")), "--out", s(&out)])), 0);
    let text = fs::read_to_string(&out).unwrap().replace("1/2*x1^2 + 1/2*x2^2", "1/2*x1^2 + x2^2");
    fs::write(&out, text).unwrap();
    let o = run(&["verify", s(&golden("oscillator.ode")), s(&out)]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stdout).contains("x2"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ode");
    fs::write(&bad, "vars x; dot x = x +;").unwrap();
    assert_eq!(code(&run(&["analyze", s(&bad)])), 2);
    assert_eq!(code(&run(&["analyze", s(&golden("oscillator.ode")), "--frobnicate"])), 1);
    assert_eq!(code(&run(&["analyze", s(&golden("oscillator.ode")), "--dot-mode", "later"])), 1);
    assert_eq!(code(&run(&["analyze", s(&golden("oscillator.ode")), "--lambda", "half"])), 1);
    assert_eq!(code(&run(&["analyze", s(&dir.path().join("missing.ode"))])), 1);
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn knobs_are_echoed_and_diagnostics_go_to_stderr() {
    let o = run(&[
        "analyze",
        s(&golden("fluid.ode")),
        "--max-node",
        "2",
        "--lambda",
        "3/4",
        "--even-bonus",
        "1/4",
        "--dot-mode",
        "substitute",
        "--ansatz",
        "linear,quadratic",
        "--explain",
        "--incidence",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let cfg = &v["provenance"]["config"];
    assert_eq!(cfg["max_node"], "2");
    assert_eq!(cfg["lambda"], "3/4");
    assert_eq!(cfg["even_bonus"], "1/4");
    assert_eq!(cfg["dot_mode"], "substitute");
    assert_eq!(cfg["ansatz"], "linear,quadratic");
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("candidate="));
    assert!(err.lines().filter(|l| l.split(' ').all(|c| c == "0" || c == "1")).count() == 4);
}

#[test]
fn pins_become_generic_ports() {
    let o = run(&["analyze", s(&golden("oscillator.ode")), "--pin", "x1:x2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let ports = v["nodes"][0]["internal_ports"].as_array().unwrap();
    assert!(ports.iter().any(|p| p["term"] == "x2" && p["kind"] == "generic"), "{:?}", ports);
    assert_eq!(code(&run(&["analyze", s(&golden("oscillator.ode")), "--pin", "x1"])), 1);
    assert_eq!(code(&run(&["analyze", s(&golden("oscillator.ode")), "--pin", "y:x2"])), 1);
}

#[test]
fn catalog_file_adds_a_structure() {
    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("cat.json");
    fs::write(&cat, r#"{"structures": [{"name": "twisted", "variables": ["a", "b"], "J": [["0", "2"], ["-2", "0"]]}]}"#).unwrap();
    let o = run(&["analyze", s(&golden("oscillator.ode")), "--catalog", s(&cat)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["provenance"]["config"]["presets"], "twisted");
    fs::write(&cat, r#"{"structures": [{"name": "s", "variables": ["a", "b"], "J": [["0", "1"], ["1", "0"]]}]}"#).unwrap();
    assert_eq!(code(&run(&["analyze", s(&golden("oscillator.ode")), "--catalog", s(&cat)])), 1);
}

#[test]
fn generated_chain_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (ode, truth, out, dot) =
        (dir.path().join("sys.ode"), dir.path().join("truth.json"), dir.path().join("g.json"), dir.path().join("g.dot"));
    let o = run(&[
        "generate", "--nodes", "3", "--dims", "2,2,3", "--topology", "chain", "--seed", "42", "--out", s(&ode), "--truth", s(&truth),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t: Value = serde_json::from_str(&fs::read_to_string(&truth).unwrap()).unwrap();
    let truth_blocks: Vec<Value> = t["nodes"].as_array().unwrap().iter().map(|n| n["variables"].clone()).collect();
    assert_eq!(t["edges"].as_array().unwrap().len(), 2);

    assert_eq!(code(&run(&["analyze", s(&ode), "--out", s(&out), "--dot", s(&dot)])), 0);
    let g = load_json(&fs::read_to_string(&out).unwrap()).unwrap();
    let blocks: Vec<Value> = g.nodes.iter().map(|n| Value::from(n.variables.clone())).collect();
    assert_eq!(blocks, truth_blocks);
    let text = fs::read_to_string(&dot).unwrap();
    let shape = validate_dot(&text).unwrap();
    assert_eq!(shape.clusters, 3);
    let mut coupled: Vec<(String, String)> =
        shape.edges.into_iter().filter(|(a, b)| a.starts_with('n') && b.starts_with('n') && !b.contains(".p")).collect();
    coupled.sort();
    let pairs = |a: &str, b: &str| [(a.to_string(), b.to_string()), (b.to_string(), a.to_string())];
    let mut want: Vec<(String, String)> = pairs("n0", "n1").into_iter().chain(pairs("n1", "n2")).collect();
    want.sort();
    assert_eq!(coupled, want);
    assert_eq!(code(&run(&["verify", s(&ode), s(&out)])), 0);
}

#[test]
fn generate_rejects_bad_arguments() {
    assert_eq!(code(&run(&["generate", "--nodes", "2", "--dims", "2,2,2"])), 1);
    assert_eq!(code(&run(&["generate", "--dims", "5"])), 1);
    assert_eq!(code(&run(&["generate", "--topology", "random:2"])), 1);
    assert_eq!(code(&run(&["generate", "--topology", "star"])), 1);
    let o = run(&["generate", "--nodes", "2", "--topology", "random:1", "--seed", "3"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("dot "));
}
