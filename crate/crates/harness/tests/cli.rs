use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_uncoded-secrecy"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    let o = bin().args(args).arg("--out-dir").arg(out).output().unwrap();
    assert!(o.status.code().is_some());
    o
}

fn files(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(files(&p));
        } else {
            out.push((p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap()));
        }
    }
    out.sort();
    out
}

fn same_bytes(args: &[&str]) {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(run(args, a.path()).status.success());
    assert!(run(args, b.path()).status.success());
    let (fa, fb) = (files(a.path()), files(b.path()));
    assert!(!fa.is_empty());
    assert_eq!(fa, fb, "{args:?}");
}

#[test]
fn outputs_are_byte_identical() {
    let sim = config("gaussian_users.json");
    same_bytes(&["simulate", "--config", sim.to_str().unwrap(), "--seed", "9"]);
    let att = config("binary_exhaustive.json");
    same_bytes(&["attack", "--config", att.to_str().unwrap()]);
    same_bytes(&["region", "--preset", "fig5"]);
    same_bytes(&["verify", "--only", "cap", "--only", "exponent"]);
}

#[test]
fn seed_flag_overrides_config() {
    let sim = config("gaussian_users.json");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run(&["simulate", "--config", sim.to_str().unwrap(), "--seed", "1"], a.path());
    run(&["simulate", "--config", sim.to_str().unwrap(), "--seed", "2"], b.path());
    let read = |d: &Path| fs::read(d.join("trials_n128.csv")).unwrap();
    assert_ne!(read(a.path()), read(b.path()));
}

#[test]
fn config_errors_exit_1_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(config("binary_users.json")).unwrap().replace("\"crossover\": 0.05", "\"crossover\": 0.6");
    let bad = dir.path().join("bad.json");
    fs::write(&bad, text).unwrap();
    let o = run(&["simulate", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("scheme.crossover"));

    let missing = dir.path().join("missing.json");
    let o = run(&["attack", "--config", missing.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn every_row_carries_schema_version() {
    let dir = tempfile::tempdir().unwrap();
    let att = config("binary_exhaustive.json");
    assert!(run(&["attack", "--config", att.to_str().unwrap()], dir.path()).status.success());
    for p in ["fig2", "fig5", "binary-opt"] {
        assert!(run(&["region", "--preset", p], dir.path()).status.success());
    }
    let sim = config("binary_users.json");
    assert!(run(&["simulate", "--config", sim.to_str().unwrap()], dir.path()).status.success());
    for (name, bytes) in files(dir.path()) {
        let text = String::from_utf8(bytes).unwrap();
        if name.extension().unwrap() == "csv" {
            let mut lines = text.lines();
            assert!(lines.next().unwrap().starts_with("schema_version,"), "{name:?}");
            assert!(lines.all(|l| l.starts_with("1,")), "{name:?}");
        } else {
            let v: serde_json::Value = serde_json::from_str(&text).unwrap();
            let rows = v.as_array().cloned().unwrap_or_else(|| vec![v]);
            assert!(rows.iter().all(|r| r["schema_version"] == 1), "{name:?}");
        }
    }
}

#[test]
fn presets_have_stable_headers() {
    let dir = tempfile::tempdir().unwrap();
    for (p, header) in [
        ("fig2", "schema_version,R_K,D0,R_L_cap"),
        ("fig5", "schema_version,D0,proposed_cap,sign_change_cap"),
    ] {
        assert!(run(&["region", "--preset", p], dir.path()).status.success());
        let text = fs::read_to_string(dir.path().join(format!("{p}.csv"))).unwrap();
        assert_eq!(text.lines().next().unwrap(), header);
    }
}

#[test]
fn point_query_writes_one_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let q = config("region_point_gaussian.json");
    assert!(run(&["region", "--config", q.to_str().unwrap()], dir.path()).status.success());
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("region_point.json")).unwrap()).unwrap();
    assert_eq!(v["verdict"]["inner_member"], true);
    assert_eq!(v["optimality"]["optimal"], true);
}

#[test]
fn empty_attack_list_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let sim = config("binary_users.json");
    assert!(run(&["attack", "--config", sim.to_str().unwrap()], dir.path()).status.success());
    let text = fs::read_to_string(dir.path().join("attacks.csv")).unwrap();
    assert_eq!(text.lines().count(), 1);
}

#[test]
fn verify_reports_each_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--only", "cap"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    for c in v["checks"].as_array().unwrap() {
        for key in ["name", "statistic", "threshold", "verdict"] {
            assert!(c.get(key).is_some());
        }
    }
}

#[test]
fn simulation_resumes_from_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let sim = config("gaussian_users.json");
    let args = ["simulate", "--config", sim.to_str().unwrap()];
    assert!(run(&args, dir.path()).status.success());
    let cp = dir.path().join("checkpoints/n128.json");
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&cp).unwrap()).unwrap();
    v["summary"]["mean_distortion"][0] = serde_json::json!(123.0);
    fs::write(&cp, serde_json::to_string(&v).unwrap()).unwrap();
    fs::remove_file(dir.path().join("checkpoints/n512.json")).unwrap();

    assert!(run(&args, dir.path()).status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("simulation.json")).unwrap()).unwrap();
    // n = 128 came from the checkpoint, n = 512 was recomputed.
    assert_eq!(report["summaries"][0]["mean_distortion"][0], 123.0);
    assert!(report["summaries"][1]["mean_distortion"][0].as_f64().unwrap() < 1.0);

    // A different seed invalidates every checkpoint.
    assert!(run(&["simulate", "--config", sim.to_str().unwrap(), "--seed", "77"], dir.path()).status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("simulation.json")).unwrap()).unwrap();
    assert!(report["summaries"][0]["mean_distortion"][0].as_f64().unwrap() < 1.0);
}
