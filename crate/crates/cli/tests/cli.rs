use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;

use cavityflow_cli::output::{sha256_hex, MANIFEST};
use cavityflow_cli::plot::{Figure, Series};
use cavityflow_cli::{exit_code, parse_config, presets, run_scenario, RunOptions, ScenarioConfig};

fn read_tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
                out.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn small_run() -> ScenarioConfig {
    let mut cfg = presets::preset("bell").unwrap();
    cfg.audits.bell_jumps.as_mut().unwrap().trajectories = 500;
    cfg
}

#[test]
fn presets_validate_and_round_trip() {
    for name in presets::names() {
        let cfg = presets::preset(name).unwrap_or_else(|e| panic!("{name}: {e}"));
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let again = parse_config(&text).unwrap();
        assert_eq!(cfg, again, "{name}");
        assert_eq!(text, serde_json::to_string_pretty(&again).unwrap(), "{name}");
    }
}

#[test]
fn all_problems_are_reported() {
    let text = r#"{
        "medium": { "q": 1, "mass": 1.0, "eps_imag": -0.1 },
        "grid": { "nx": 32, "ny": 32, "lx": -1.0, "ly": 10.0 },
        "initial_state": { "kind": "gaussian", "packet": { "x0": 0, "y0": 0, "sigma": 0, "kx": 0, "ky": 0 } },
        "run": { "dt": 0.0 }
    }"#;
    let err = parse_config(text).unwrap_err();
    let joined = err.problems.join("\n");
    for needle in ["eps_imag must be >= 0", "grid.lx must be > 0", "sigma must be > 0", "run.dt must be > 0"] {
        assert!(joined.contains(needle), "missing {needle:?} in\n{joined}");
    }
}

#[test]
fn unknown_keys_are_rejected_with_position() {
    let text = "{\n  \"medium\": { \"q\": 1, \"mass\": 1.0, \"colour\": 3 },\n  \"grid\": {}\n}";
    let err = parse_config(text).unwrap_err();
    assert_eq!(err.problems.len(), 1);
    assert!(err.problems[0].contains("line 2"), "{}", err.problems[0]);
    assert!(err.problems[0].contains("colour"), "{}", err.problems[0]);
}

#[test]
fn inconsistent_mass_and_spacing_are_rejected() {
    let text = r#"{
        "medium": { "q": 2, "mass": 1.0, "d0": 1.0 },
        "grid": { "nx": 16, "ny": 16, "lx": 10.0, "ly": 10.0 },
        "initial_state": { "kind": "mode", "mode": { "kind": "plane-wave", "kx": 0, "ky": 0 } }
    }"#;
    let err = parse_config(text).unwrap_err();
    assert!(err.problems[0].contains("disagree"), "{err}");
}

#[test]
fn runs_are_deterministic_and_manifest_is_complete() {
    let cfg = small_run();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = run_scenario(&cfg, &RunOptions { out_dir: Some(a.path().into()), seed: None }).unwrap();
    run_scenario(&cfg, &RunOptions { out_dir: Some(b.path().into()), seed: None }).unwrap();
    let (ta, tb) = (read_tree(a.path()), read_tree(b.path()));
    assert_eq!(ta.keys().collect::<Vec<_>>(), tb.keys().collect::<Vec<_>>());
    for (k, v) in &ta {
        if k != MANIFEST {
            assert!(v == &tb[k], "{k} differs between identical runs");
        }
    }

    let listed: BTreeMap<_, _> = ra.manifest.files.iter().map(|f| (f.path.clone(), f.sha256.clone())).collect();
    let on_disk: Vec<_> = ta.keys().filter(|k| k.as_str() != MANIFEST).cloned().collect();
    assert_eq!(listed.keys().cloned().collect::<Vec<_>>(), on_disk);
    for (k, h) in &listed {
        assert_eq!(&sha256_hex(&ta[k]), h, "{k}");
    }
    let manifest: serde_json::Value = serde_json::from_slice(&ta[MANIFEST]).unwrap();
    assert_eq!(manifest["config_hash"], sha256_hex(serde_json::to_string(&cfg).unwrap().as_bytes()));
    for key in ["survival.csv", "survival.svg", "fields.csv", "trajectories/traj_000.csv", "config.json"] {
        assert!(listed.contains_key(key), "{key} missing");
    }
}

#[test]
fn seed_override_changes_the_ensemble() {
    let cfg = small_run();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_scenario(&cfg, &RunOptions { out_dir: Some(a.path().into()), seed: Some(1) }).unwrap();
    run_scenario(&cfg, &RunOptions { out_dir: Some(b.path().into()), seed: Some(2) }).unwrap();
    let read = |p: &Path| fs::read(p.join("survival.csv")).unwrap();
    assert_ne!(read(a.path()), read(b.path()));
}

#[test]
fn survival_csv_has_schema() {
    let dir = tempfile::tempdir().unwrap();
    run_scenario(&small_run(), &RunOptions { out_dir: Some(dir.path().into()), seed: None }).unwrap();
    let text = fs::read_to_string(dir.path().join("survival.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "t,fraction,ci_lo,ci_hi,expected");
    let traj = fs::read_to_string(dir.path().join("trajectories/traj_000.csv")).unwrap();
    assert_eq!(traj.lines().next().unwrap(), "t,x,y,status");
}

#[test]
fn error_classes_map_to_exit_codes() {
    let cfg_err: anyhow::Error = parse_config("{}").unwrap_err().into();
    assert_eq!(exit_code(&cfg_err), 2);
    let numeric: anyhow::Error = cavityflow::Error::NonFinite { step: 3 }.into();
    assert_eq!(exit_code(&numeric), 3);
    let branch: anyhow::Error = cavityflow::Error::WrongBranch("E < 0".into()).into();
    assert_eq!(exit_code(&branch.context("while running")), 2);
}

#[test]
fn binary_reports_invalid_configs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{ "medium": { "q": 0, "mass": 1.0 }, "grid": { "nx": 16, "ny": 16, "lx": 1, "ly": 1 }, "initial_state": { "kind": "mode", "mode": { "kind": "plane-wave", "kx": 0, "ky": 0 } } }"#).unwrap();
    let exe = env!("CARGO_BIN_EXE_cavityflow");
    let out = Command::new(exe).arg("validate").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("medium.q must be >= 1"));

    let out = Command::new(exe).args(["run", "--preset", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(exe).arg("version").output().unwrap();
    assert!(out.status.success());
}

#[test]
fn binary_runs_a_preset() {
    let dir = tempfile::tempdir().unwrap();
    let exe = env!("CARGO_BIN_EXE_cavityflow");
    let out = Command::new(exe)
        .args(["run", "--preset", "equivalence", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["manifest.json", "equivalence.json", "equivalence.csv", "conservation.csv", "berry.json", "density.svg"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn empty_figure_has_axes_only() {
    let svg = Figure::new("empty", "x", "y").render();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("<rect"));
    assert!(!svg.contains("<polyline"));
    assert!(!svg.contains("<image"));
    let mut fig = Figure::new("line", "x", "y");
    fig.series.push(Series::new(vec![(0.0, 1.0), (1.0, 2.0)], "black"));
    assert_eq!(fig.render(), fig.clone().render());
    assert!(fig.render().contains("<polyline"));
}
