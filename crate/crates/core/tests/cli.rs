use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fhlab::harness::{catalog, observables, CaseSpec};

fn fhlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fhlab")).args(args).env_remove("FHLAB_PRECISION").output().expect("binary runs")
}

fn out_dir(t: &tempfile::TempDir, name: &str) -> PathBuf {
    t.path().join(name)
}

fn read(p: &Path) -> Vec<u8> {
    fs::read(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn list_cases_names_every_builtin() {
    let o = fhlab(&["list-cases"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for c in catalog::builtin() {
        assert!(text.lines().any(|l| l.starts_with(&format!("{}\t", c.id))), "{}", c.id);
    }
}

#[test]
fn verify_passes_and_writes_csv() {
    let o = fhlab(&["verify", "--case", "szego-2tcos"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("case,n,log_exact,phase_exact,log_pred,ratio,stderr,seconds"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn unknown_case_exits_nonzero() {
    let o = fhlab(&["verify", "--case", "no-such-case"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("no-such-case"));
}

#[test]
fn failing_case_exits_one() {
    let t = tempfile::tempdir().unwrap();
    let mut c = catalog::find("lenard-X0.5").unwrap();
    c.tolerance = 1e-9;
    let p = t.path().join("tight.json");
    fs::write(&p, serde_json::to_string(&c).unwrap()).unwrap();
    let o = fhlab(&["verify", "--config", p.to_str().unwrap(), "--n", "8", "--n", "16"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn outputs_identical_across_reruns_and_jobs() {
    let t = tempfile::tempdir().unwrap();
    let cases = ["--case", "selberg-q0.5-b0.25", "--case", "gue-mc-q0.5-y0", "--case", "probe-circle-pair"];
    let mut dirs = Vec::new();
    for (k, jobs) in ["1", "3", "3"].iter().enumerate() {
        let d = out_dir(&t, &format!("run{k}"));
        let mut args = vec!["verify", "--jobs", jobs, "--out", d.to_str().unwrap(), "--n", "16", "--n", "32"];
        args.extend_from_slice(&cases);
        assert!(fhlab(&args).status.success());
        dirs.push(d);
    }
    for d in &dirs[1..] {
        assert_eq!(read(&dirs[0].join("results.csv")), read(&d.join("results.csv")));
        assert_eq!(read(&dirs[0].join("summary.json")), read(&d.join("summary.json")));
    }
}

#[test]
fn seed_changes_monte_carlo_output() {
    let run = |seed: &str| fhlab(&["verify", "--case", "gue-mc-q0.5-y0", "--n", "10", "--seed", seed]).stdout;
    assert_ne!(run("1"), run("2"));
    assert_eq!(run("1"), run("1"));
}

#[test]
fn precision_env_overrides_tier() {
    let t = tempfile::tempdir().unwrap();
    let d = out_dir(&t, "ext");
    let o = Command::new(env!("CARGO_BIN_EXE_fhlab"))
        .args(["verify", "--case", "szego-2tcos", "--out", d.to_str().unwrap()])
        .env("FHLAB_PRECISION", "extended")
        .output()
        .unwrap();
    assert!(o.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&read(&d.join("summary.json"))).unwrap();
    assert_eq!(summary[0]["precision"], "extended");
}

#[test]
fn timings_only_on_request() {
    let plain = String::from_utf8(fhlab(&["verify", "--case", "norm-ratio", "--n", "3"]).stdout).unwrap();
    assert!(plain.lines().nth(1).unwrap().ends_with(",,"));
    let timed = String::from_utf8(fhlab(&["verify", "--case", "norm-ratio", "--n", "3", "--timings"]).stdout).unwrap();
    assert!(!timed.lines().nth(1).unwrap().ends_with(','));
}

#[test]
fn predict_and_exact_for_a_symbol() {
    let t = tempfile::tempdir().unwrap();
    let p = t.path().join("sym.json");
    let sym = r#"{"symbol": {"smooth": {"type": "exp_cos", "params": {"t": 0.5}}, "singularities": []}}"#;
    fs::write(&p, sym).unwrap();
    let o = fhlab(&["predict", "--config", p.to_str().unwrap(), "--n", "64"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["values"][0]["log_value"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    let o = fhlab(&["exact", "--config", p.to_str().unwrap(), "--n", "32"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["values"][0]["log_modulus"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn exact_moment_problem_writes_moment_csv() {
    let t = tempfile::tempdir().unwrap();
    let p = t.path().join("m.json");
    fs::write(
        &p,
        r#"{"moment_problem": {"weight": {"type": "gauss", "a": 1.0}, "charges": [], "multiplier": {"type": "none"}}}"#,
    )
    .unwrap();
    let d = out_dir(&t, "m");
    let o = fhlab(&["exact", "--config", p.to_str().unwrap(), "--n", "3", "--out", d.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = String::from_utf8(read(&d.join("moments.csv"))).unwrap();
    assert_eq!(csv.lines().count(), 1 + 5);
}

#[test]
fn sample_is_reproducible() {
    let run = || fhlab(&["sample", "--ensemble", "gue", "--n", "4", "--samples", "10", "--seed", "7"]).stdout;
    let a = run();
    assert!(!a.is_empty());
    assert_eq!(a, run());
}

#[test]
fn physics_writes_csv_and_sidecar() {
    let t = tempfile::tempdir().unwrap();
    let d = out_dir(&t, "phys");
    let o = fhlab(&["physics", "--case", "ising-critical", "--n", "8", "--n", "16", "--out", d.to_str().unwrap()]);
    assert!(o.status.success());
    let csv = String::from_utf8(read(&d.join("ising-critical.csv"))).unwrap();
    assert!(csv.starts_with("n,exact,predicted,ratio\n"));
    assert_eq!(csv.lines().count(), 3);
    let side: serde_json::Value = serde_json::from_slice(&read(&d.join("ising-critical.json"))).unwrap();
    assert_eq!(side["size_label"], "n");
}

#[test]
fn shipped_configs_match_catalog() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for c in catalog::builtin() {
        let text = fs::read_to_string(root.join(format!("{}.json", c.id))).unwrap();
        assert_eq!(CaseSpec::from_json(&text).unwrap(), c, "{}", c.id);
    }
    for p in observables::presets() {
        let text = fs::read_to_string(root.join("physics").join(format!("{}.json", p.id))).unwrap();
        assert_eq!(serde_json::from_str::<observables::PhysicsCase>(&text).unwrap(), p);
    }
}
