use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn qgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgap"))
        .args(args)
        .output()
        .expect("qgap runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("bad report ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

fn schema() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json");
    let s: Value = serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();
    jsonschema::validator_for(&s).unwrap()
}

fn assert_schema(v: &Value) {
    let errs: Vec<String> = schema()
        .iter_errors(v)
        .map(|e| format!("{e} at {}", e.instance_path))
        .collect();
    assert!(errs.is_empty(), "schema errors: {errs:?}");
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Generates an instance into `dir` and returns its path.
fn gen(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.path().join(name);
    let mut all = vec!["gen"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", s(&path)]);
    let o = qgap(&all);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    path
}

fn k4_graph(dir: &TempDir) -> PathBuf {
    let p = dir.path().join("k4.json");
    std::fs::write(&p, r#"{"n":4,"edges":[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]}"#).unwrap();
    p
}

#[test]
fn theta_of_diagonal_instance_is_exact_zero() {
    let dir = TempDir::new().unwrap();
    let inst = gen(
        &dir,
        "neq.qsat.json",
        &["diagonal-neq", "--shape", "prism", "--q", "2"],
    );
    let o = qgap(&["theta", "--instance", s(&inst), "--mode", "exact"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_schema(&r);
    assert_eq!(r["params"]["theta"], 0.0);
    assert_eq!(r["params"]["theta_exact"], true);
    assert!(r["rows"]
        .as_array()
        .unwrap()
        .iter()
        .all(|row| row["theta"] == 0.0));
}

#[test]
fn camp_on_k4_is_deterministic_and_passes() {
    let dir = TempDir::new().unwrap();
    let g = k4_graph(&dir);
    let args = [
        "camp",
        "--graph",
        s(&g),
        "--t",
        "4",
        "--trials",
        "50",
        "--seed",
        "7",
    ];
    let a = qgap(&args);
    let b = qgap(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let r = json(&a);
    assert_schema(&r);
    let rows = r["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 200);
    assert!(rows.iter().all(|row| row["pass"] == true));
    assert!((r["params"]["lambda"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-10);
}

#[test]
fn thread_count_does_not_change_reports() {
    let dir = TempDir::new().unwrap();
    let inst = gen(
        &dir,
        "c6.qsat.json",
        &["random-rank", "--shape", "cycle:6", "--rank", "2", "--seed", "4"],
    );
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_qgap"))
            .env("QAMP_THREADS", threads)
            .args(["decay", "--instance", s(&inst), "--trials", "6", "--seed", "3"])
            .output()
            .unwrap()
    };
    let a = run("1");
    let b = run("3");
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn every_report_matches_the_schema() {
    let dir = TempDir::new().unwrap();
    let path6 = gen(
        &dir,
        "p6.qsat.json",
        &["rank1-entangled", "--shape", "path:6", "--angle", "0.7"],
    );
    let g = k4_graph(&dir);
    let runs: Vec<Vec<&str>> = vec![
        vec!["validate", "--instance", s(&path6)],
        vec!["layers", "--instance", s(&path6), "--recompute"],
        vec!["ground", "--instance", s(&path6)],
        vec!["decay", "--instance", s(&path6), "--trials", "3"],
        vec!["detect", "--instance", s(&path6), "--trials", "3"],
        vec!["kitaev", "--instance", s(&path6)],
        vec!["moments", "--graph", s(&g), "--trials", "3"],
        vec!["qamp", "--shape", "k4", "--family", "diagonal-neq", "--t", "2"],
    ];
    for args in runs {
        let o = qgap(&args);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let r = json(&o);
        assert_schema(&r);
        assert_eq!(r["pass"], true, "{args:?}");
    }
}

#[test]
fn csv_header_names_every_column() {
    let o = qgap(&[
        "camp", "--shape", "k4", "--trials", "3", "--t", "2", "--format", "csv",
    ]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("bound,pass,ratio,t,trial,unsat,unsat_t"));
    let body: Vec<&str> = lines.collect();
    assert_eq!(body.len(), 6);
    assert!(body.iter().all(|l| l.split(',').count() == 7));
}

#[test]
fn qamp_reads_an_experiment_file() {
    let dir = TempDir::new().unwrap();
    let spec = dir.path().join("exp.json");
    std::fs::write(
        &spec,
        r#"{"graph": {"n": 4, "edges": [[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]},
            "family": "diagonal-neq", "q": 2, "t": 3, "trials": 1, "seed": 0}"#,
    )
    .unwrap();
    let o = qgap(&["qamp", "--spec", s(&spec)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    let rows = r["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let t: Vec<u64> = rows.iter().map(|row| row["t"].as_u64().unwrap()).collect();
    assert_eq!(t, [1, 2, 3]);
}

#[test]
fn invalid_instance_is_a_violation() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "p4.qsat.json", &["diagonal-neq", "--shape", "path:4"]);
    let mut v: Value = serde_json::from_slice(&std::fs::read(&inst).unwrap()).unwrap();
    v["constraints"][0]["support"] = serde_json::json!([1, 1]);
    std::fs::write(&inst, v.to_string()).unwrap();
    let o = qgap(&["validate", "--instance", s(&inst)]);
    assert_eq!(code(&o), 1);
    let r = json(&o);
    assert_schema(&r);
    assert_eq!(r["rows"][0]["kind"], "repeated-qudit");
    // Computations refuse the same file as a configuration error.
    assert_eq!(code(&qgap(&["ground", "--instance", s(&inst)])), 2);
}

#[test]
fn config_errors_exit_two_and_still_report() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("r.json");
    let o = qgap(&["theta", "--instance", "/nonexistent.qsat.json", "--out", s(&out)]);
    assert_eq!(code(&o), 2);
    let r: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_schema(&r);
    assert_eq!(r["error"]["kind"], "config");
    assert_eq!(r["pass"], false);
    // Bipartite graphs have no amplification constant.
    assert_eq!(code(&qgap(&["camp", "--shape", "cycle:6"])), 2);
    assert_eq!(code(&qgap(&["camp", "--shape", "hexagon"])), 2);
    assert_eq!(code(&qgap(&["camp", "--shape", "k4", "--no-such-flag"])), 2);
}

#[test]
fn exceeded_caps_exit_three() {
    let dir = TempDir::new().unwrap();
    let inst = gen(&dir, "p6.qsat.json", &["rank1-entangled", "--shape", "path:6"]);
    let o = qgap(&[
        "theta",
        "--instance",
        s(&inst),
        "--mode",
        "exact",
        "--cap-enum",
        "3",
    ]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["error"]["kind"], "cap-exceeded");
    let o = qgap(&[
        "ground",
        "--instance",
        s(&inst),
        "--method",
        "dense",
        "--cap-dense",
        "8",
    ]);
    assert_eq!(code(&o), 3);
    let o = qgap(&["qamp", "--shape", "k4", "--t", "3", "--cap-enum", "10"]);
    assert_eq!(code(&o), 3);
    // The automatic mode falls back to a sampled θ instead.
    let o = qgap(&["theta", "--instance", s(&inst), "--cap-enum", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["params"]["theta_exact"], false);
}

#[test]
fn generated_graph_feeds_camp() {
    let dir = TempDir::new().unwrap();
    let g = gen(
        &dir,
        "rr.json",
        &["random-regular", "--n", "20", "--d", "3", "--seed", "5"],
    );
    let v: Value = serde_json::from_slice(&std::fs::read(&g).unwrap()).unwrap();
    assert_eq!(v["edges"].as_array().unwrap().len(), 30);
    let o = qgap(&["camp", "--graph", s(&g), "--trials", "10", "--t", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_all_covers_every_harness() {
    let o = qgap(&[
        "verify-all",
        "--corpus",
        "standard",
        "--seed",
        "0",
        "--trials",
        "3",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_schema(&r);
    let mut checked: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c.get("skipped").is_none())
        .map(|c| c["check"].as_str().unwrap())
        .collect();
    checked.sort_unstable();
    checked.dedup();
    assert_eq!(
        checked,
        [
            "aux",
            "classical-amp",
            "decay",
            "detectability",
            "energy-claims",
            "kitaev",
            "lanczos-vs-dense",
            "quantum-amp-lemma",
            "quantum-amp-monotone",
            "sector-classical",
            "spectrum-amp",
            "walk-moments",
        ]
    );
}
