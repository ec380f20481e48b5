//! End-to-end runs of the binary.

mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weier-torus")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap()
}

#[test]
fn audit_example_produces_valid_report() {
    let out = run(&["audit", "--lambda1", "3.14159265358979", "--lambda2", "0", "--n", "1", "--a", "0", "--b", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert!(common::schema_errors(&report).is_empty());
    let entries = report["entries"].as_array().unwrap();
    let verdict = |id: &str| entries.iter().find(|e| e["check_id"] == id).unwrap()["verdict"].clone();
    for id in ["periodicity.doublet1", "consistency", "amplitude.ab1", "amplitude.ab2", "radii.r12", "radii.r34"] {
        assert_eq!(verdict(id), "pass", "{id}");
    }
    assert!(report["header"]["generated_unix_time"].is_u64());
}

#[test]
fn mesh_example_writes_16x16_obj() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.obj");
    let out = run(&["mesh", "--grid", "16x16", "--project", "123", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = String::from_utf8(read(&path)).unwrap();
    assert!(text.starts_with("# torus mesh 16x16, projection 123\n"));
    let faces: Vec<Vec<usize>> = text
        .lines()
        .filter_map(|l| l.strip_prefix("f "))
        .map(|l| l.split(' ').map(|i| i.parse().unwrap()).collect())
        .collect();
    let edges: BTreeSet<(usize, usize)> = faces
        .iter()
        .flat_map(|f| (0..4).map(move |i| (f[i].min(f[(i + 1) % 4]), f[i].max(f[(i + 1) % 4]))))
        .collect();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 256);
    assert_eq!(faces.len(), 256);
    assert_eq!(edges.len(), 512);
    assert!(faces.iter().flatten().all(|&i| (1..=256).contains(&i)));
}

#[test]
fn usage_errors_exit_1() {
    for args in [
        &["solve", "--lambda1", "0"][..],
        &["solve", "--no-such-flag"],
        &["frobnicate"],
        &[],
        &["mesh", "--grid", "1x4"],
        &["mesh", "--project", "122"],
        &["dehn", "--twist", "0x1"],
        &["audit", "--convention", "C"],
        &["sample", "--format", "obj"],
        &["solve", "--c-re", "0", "--c-im", "0"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["audit", "--help"]).status.code(), Some(0));
}

#[test]
fn numeric_failure_exits_2() {
    let out = run(&["mesh", "--lambda1", "1", "--lambda2", "400", "--a", "2", "--grid", "4x4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("overflow"));
}

#[test]
fn overflow_in_audit_is_recorded_not_fatal() {
    let out = run(&["audit", "--lambda1", "1", "--lambda2", "400", "--a", "2", "--deterministic"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert!(common::schema_errors(&report).is_empty());
    assert!(report["entries"].as_array().unwrap().iter().any(|e| e["verdict"] == "fail" && e["residual"].is_null()));
}

#[test]
fn outputs_are_byte_deterministic() {
    for args in [
        &["audit", "--deterministic", "--lambda2", "0.7", "--a", "0.2", "--twist", "2x3"][..],
        &["sample", "--grid", "6x5", "--lambda2", "0.5"],
        &["sample", "--grid", "3x3", "--format", "json"],
        &["mesh", "--grid", "8x8", "--project", "134"],
        &["mesh", "--grid", "8x8", "--format", "svg"],
        &["scan", "--lambda2", "1", "--reality-branch", "minus"],
        &["dehn", "--twist", "2x1", "--lambda2", "1"],
        &["solve", "--strict-print"],
    ] {
        let (a, b) = (run(args), run(args));
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn strict_print_changes_only_doublet2_dependent_checks() {
    let base = stdout_json(&run(&["audit", "--deterministic"]));
    let strict = stdout_json(&run(&["audit", "--deterministic", "--strict-print"]));
    // The coordinate one-forms are built from both doublets.
    let touches_doublet2 = |id: &str| {
        id.ends_with("doublet2") || id.starts_with("exactness.") || id.starts_with("quadrature_agreement.")
            || id.starts_with("radii.") || id.starts_with("rewrite.")
    };
    let (eb, es) = (base["entries"].as_array().unwrap(), strict["entries"].as_array().unwrap());
    assert_eq!(eb.len(), es.len());
    let mut changed = Vec::new();
    for (x, y) in eb.iter().zip(es) {
        assert_eq!(x["check_id"], y["check_id"]);
        if x != y {
            changed.push(x["check_id"].as_str().unwrap().to_owned());
        }
    }
    assert!(changed.iter().any(|id| id == "exactness.x1"));
    assert!(changed.iter().all(|id| touches_doublet2(id)), "{changed:?}");
    let header_changes: Vec<&String> = base["header"]
        .as_object()
        .unwrap()
        .keys()
        .filter(|k| base["header"][k.as_str()] != strict["header"][k.as_str()])
        .collect();
    assert_eq!(header_changes, ["exponent_mode", "resolutions"]);
}

#[test]
fn config_file_supplies_defaults_and_cli_wins() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("study.cfg");
    std::fs::write(&cfg, "# study\nlambda2 = 1.5\na = 0.25\nstrict-print = true\n").unwrap();
    let out = run(&["solve", "--config", cfg.to_str().unwrap(), "--a", "-0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["parameters"]["lambda2"], 1.5);
    assert_eq!(v["parameters"]["a"], -0.5);
    assert_eq!(v["solution"]["mode"], "strict_print");

    std::fs::write(&cfg, "bogus-key = 1\n").unwrap();
    assert_eq!(run(&["solve", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
    let missing = dir.path().join("missing.cfg");
    assert_eq!(run(&["solve", "--config", missing.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn sample_csv_shape() {
    let out = run(&["sample", "--grid", "5x7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "iu,iv,z_re,z_im,x1,x2,x3,x4,r12,r34,u1,u2,density,flag");
    assert_eq!(lines.len(), 36);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 14));
}

#[test]
fn dehn_reports_both_channels() {
    let out = run(&["dehn", "--twist", "2x1", "--lambda2", "1", "--reality-branch", "plus"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["after"]["lambda1"].as_f64().unwrap(), 2.0 * std::f64::consts::PI);
    assert_eq!(v["report"]["rows"].as_array().unwrap().len(), 5);
    assert!(v["report"]["max_printed"].as_f64().unwrap() > 0.0);
}

#[test]
fn check_tol_override_is_applied() {
    let out = run(&["audit", "--deterministic", "--check-tol", "exactness.x3=10", "--tol", "1e-9"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let e = v["entries"].as_array().unwrap().iter().find(|e| e["check_id"] == "exactness.x3").unwrap().clone();
    assert_eq!(e["tolerance"], 10.0);
    assert_eq!(e["verdict"], "pass");
}
