use std::path::{Path, PathBuf};
use std::process::Command;

use biharm_cli::{ResidualReport, Verdict};

fn biharm(args: &[&str]) -> i32 {
    let out = Command::new(env!("CARGO_BIN_EXE_biharm")).args(args).output().expect("binary runs");
    out.status.code().expect("exit code")
}

fn out_path(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn run_to(dir: &tempfile::TempDir, name: &str, args: &[&str]) -> (i32, PathBuf) {
    let path = out_path(dir, name);
    let mut all: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    all.extend(["--out", &p]);
    let code = biharm(&all);
    (code, path)
}

fn load(path: &Path) -> ResidualReport {
    ResidualReport::read_json(path).unwrap()
}

#[test]
fn check_metric_default_grid_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, path) = run_to(&dir, "cm.json", &["check-metric", "--u", "1", "--v", "1", "--m", "2"]);
    assert_eq!(code, 0);
    let rep = load(&path);
    assert!(rep.is_consistent());
    assert_eq!(rep.records.iter().filter(|r| r.check_id == "curvature.bianchi").count(), 1000);
    assert!(rep.records.iter().all(|r| r.residual < 1e-7));
}

#[test]
fn check_metric_flat_limit_is_exactly_flat() {
    let dir = tempfile::tempdir().unwrap();
    let (code, path) = run_to(&dir, "flat.json", &["check-metric", "--flat-limit", "--v", "0", "--grid", "4"]);
    assert_eq!(code, 0);
    let rep = load(&path);
    for id in ["flat.christoffel", "flat.riemann"] {
        assert!(rep.summary.checks[id].max_residual <= 1e-10);
    }
}

#[test]
fn corrupted_jet_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let (code, path) = run_to(&dir, "bad.json", &["check-metric", "--grid", "3", "--corrupt-jet", "0.3"]);
    assert_eq!(code, 1);
    let rep = load(&path);
    assert!(rep.summary.checks["curvature.bianchi"].failed > 0);
    assert_eq!(rep.metadata.config.corrupt_jet, 0.3);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = out_path(&dir, "run.cfg");
    std::fs::write(&cfg, "u = 2\nv = 0.5\ngrid = 2 # small\n").unwrap();
    let cfg_s = cfg.to_str().unwrap();
    let (code, path) = run_to(&dir, "cm.json", &["check-metric", "--config", cfg_s, "--u", "3"]);
    assert_eq!(code, 0);
    let c = load(&path).metadata.config;
    assert_eq!((c.u, c.v, c.grid), (3.0, 0.5, 2));

    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(run_to(&dir, "x.json", &["check-metric", "--config", cfg_s]).0, 2);
    assert_eq!(run_to(&dir, "x.json", &["check-metric", "--v", "0"]).0, 2);
    assert_eq!(run_to(&dir, "x.json", &["check-metric", "--tol-tier", "tight"]).0, 2);
    assert_eq!(biharm(&["no-such-command"]), 2);
}

#[test]
fn scan_finds_expected_roots() {
    let dir = tempfile::tempdir().unwrap();
    let (code, path) = run_to(&dir, "s.json", &["scan-hyperplane", "--u", "1", "--v", "3", "--m", "2"]);
    assert_eq!(code, 0);
    let roots = load(&path).roots.unwrap();
    assert_eq!(roots.found.len(), 1);
    assert!((roots.found[0] - 1.0 / 3.0).abs() <= 1e-6);

    let (code, path) = run_to(&dir, "s1.json", &["scan-hyperplane", "--u", "1", "--v", "1"]);
    assert_eq!(code, 0);
    let roots = load(&path).roots.unwrap();
    assert_eq!(roots.found.len(), 1);
    assert!((roots.found[0] - 0.57735026919).abs() <= 1e-6);

    let (code, path) = run_to(&dir, "s2.json", &["scan-hyperplane", "--u", "1", "--v", "3", "--c-min", "1", "--c-max", "2"]);
    assert_eq!(code, 0);
    assert!(load(&path).roots.unwrap().found.is_empty());

    let (code, _) = run_to(&dir, "s3.json", &["scan-hyperplane", "--t-min", "-1", "--t-max", "1"]);
    assert_eq!(code, 2);

    let (code, path) = run_to(&dir, "s4.json", &["scan-hyperplane", "--c-min", "-2", "--c-max", "2"]);
    assert_eq!(code, 0);
    let roots = load(&path).roots.unwrap();
    assert_eq!(roots.found.len(), 2);
    assert_eq!(roots.harmonic, vec![0.0]);
}

fn lemmas(dir: &tempfile::TempDir, name: &str, extra: &[&str]) -> (i32, ResidualReport) {
    let mut args = vec!["verify-lemmas", "--immersions", "4", "--points", "3", "--seed", "7"];
    args.extend_from_slice(extra);
    let (code, path) = run_to(dir, name, &args);
    (code, load(&path))
}

#[test]
fn verify_lemmas_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (c1, a) = lemmas(&dir, "a.json", &[]);
    let (c2, b) = lemmas(&dir, "b.json", &[]);
    assert_eq!(c1, c2);
    assert_eq!(serde_json::to_string(&a.records).unwrap(), serde_json::to_string(&b.records).unwrap());
    assert_eq!(a.summary, b.summary);
}

#[test]
fn verify_lemmas_failures_are_confined_to_lemma3() {
    let dir = tempfile::tempdir().unwrap();
    let (code, rep) = lemmas(&dir, "l.json", &[]);
    assert_eq!(code, 1);
    for (id, c) in &rep.summary.checks {
        if id == "lemma3" {
            assert!(c.failed > 0);
        } else {
            assert_eq!(c.failed, 0, "{id}");
        }
    }
    for id in ["lemma1", "lemma2", "lemma3.with_codazzi_term", "t5t6", "lemma4", "lemma4.nontrivial", "theorem1"] {
        assert!(rep.summary.checks.contains_key(id), "{id}");
    }
}

#[test]
fn verify_lemmas_flat_limit_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, rep) = lemmas(&dir, "f.json", &["--flat-limit", "--v", "0"]);
    assert_eq!(code, 0, "{:?}", rep.summary);
}

#[test]
fn tight_override_exposes_error_floor() {
    let dir = tempfile::tempdir().unwrap();
    let (code, rep) = lemmas(&dir, "t.json", &["--tol-tier", "1e-12"]);
    assert_eq!(code, 1);
    assert!(rep.summary.checks["t5t6"].failed + rep.summary.checks["lemma2"].failed > 0);
    assert!(rep.records.iter().all(|r| r.check_id.starts_with("corollary1") || r.check_id == "lemma4.nontrivial" || r.tolerance == 1e-12));
}

#[test]
fn report_export_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (_, path) = run_to(&dir, "cm.json", &["check-metric", "--grid", "2"]);
    let rep = load(&path);
    let csv_path = out_path(&dir, "cm.csv");
    assert_eq!(biharm(&["report", "--input", path.to_str().unwrap()]), 0);
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        vec!["check_id", "point_coords", "residual", "tolerance", "verdict"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), rep.records.len());
    let max_bianchi = rows
        .iter()
        .filter(|r| &r[0] == "curvature.bianchi")
        .map(|r| r[2].parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert_eq!(max_bianchi, rep.summary.checks["curvature.bianchi"].max_residual);
    assert!(rows.iter().all(|r| &r[4] == "pass"));

    let copy = out_path(&dir, "copy.json");
    assert_eq!(biharm(&["report", "--input", path.to_str().unwrap(), "--format", "json", "--out", copy.to_str().unwrap()]), 0);
    let back = load(&copy);
    assert_eq!(back.summary, rep.summary);
    assert!(back.records.iter().all(|r| r.verdict == Verdict::Pass));

    assert_eq!(biharm(&["report", "--input", out_path(&dir, "missing.json").to_str().unwrap()]), 2);
}
