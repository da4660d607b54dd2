//! Smoke tests of the `bisense` binary: exit codes, error JSON, and the
//! simulate -> process -> threshold flow.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bisense"))
}

#[test]
fn presets_lists_builtins() {
    let out = bin().arg("presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("paper-siso"));
    assert!(text.contains("paper-directional"));
}

#[test]
fn error_is_machine_readable_json() {
    let out = bin()
        .args(["simulate", "--preset", "nope"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(parsed["error"]["kind"], "unknown_preset");
    assert!(parsed["error"]["message"]
        .as_str()
        .unwrap()
        .contains("nope"));
}

#[test]
fn config_validation_error_names_field() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = bisense::config::ScenarioConfig::paper_siso();
    cfg.schedule.n_packets = 5; // inconsistent with duration * prf
    let path = dir.path().join("bad.toml");
    cfg.save(&path).unwrap();
    let out = bin()
        .args(["simulate", "--config", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(String::from_utf8(out.stderr).unwrap().trim()).unwrap();
    assert_eq!(parsed["error"]["kind"], "config");
    assert!(parsed["error"]["message"]
        .as_str()
        .unwrap()
        .contains("schedule.n_packets"));
}

fn small_config(dir: &Path) -> std::path::PathBuf {
    let mut cfg = bisense::config::ScenarioConfig::paper_siso();
    cfg.schedule.n_packets = 96;
    cfg.gait.duration = 96.0 / cfg.schedule.prf;
    cfg.gait.end = [4.2, 4.0];
    cfg.threshold.levels = vec![0.0, 0.05];
    let path = dir.join("scenario.toml");
    cfg.save(&path).unwrap();
    path
}

#[test]
fn simulate_process_threshold_flow() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = small_config(dir.path());
    let sim = dir.path().join("sim");
    let out = bin()
        .args([
            "simulate",
            "--config",
            cfg_path.to_str().unwrap(),
            "--out",
            sim.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(sim.join("cir_matrix.bin").exists());
    assert!(sim.join("manifest.json").exists());
    assert!(sim.join("rays.csv").exists());
    assert!(sim.join("config.toml").exists());

    let proc_dir = dir.path().join("proc");
    let out = bin()
        .args([
            "process",
            "--config",
            cfg_path.to_str().unwrap(),
            "--artifact",
            sim.to_str().unwrap(),
            "--out",
            proc_dir.to_str().unwrap(),
            "--format",
            "csv,json,pgm",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(proc_dir.join("micro_doppler.csv").exists());
    assert!(proc_dir.join("micro_doppler.pgm").exists());
    assert!(proc_dir.join("range_doppler.meta.json").exists());

    let th_dir = dir.path().join("th");
    let out = bin()
        .args([
            "threshold",
            "--config",
            cfg_path.to_str().unwrap(),
            "--artifact",
            sim.to_str().unwrap(),
            "--out",
            th_dir.to_str().unwrap(),
            "--levels",
            "0.0,0.1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(th_dir.join("threshold_sweep.csv").exists());
    assert!(th_dir.join("feedback_t0p1.json").exists());

    let render_dir = dir.path().join("render");
    let out = bin()
        .args([
            "render",
            "--meta",
            proc_dir.join("micro_doppler.meta.json").to_str().unwrap(),
            "--out",
            render_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(render_dir.join("micro_doppler.pgm").exists());
}

#[test]
fn directional_flow_with_codebook_override() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = bisense::config::ScenarioConfig::paper_directional();
    cfg.schedule.n_packets = 64;
    cfg.gait.duration = 64.0 / cfg.schedule.prf;
    cfg.noise.snr_db = f64::INFINITY;
    let cfg_path = dir.path().join("dir.toml");
    cfg.save(&cfg_path).unwrap();

    let sim = dir.path().join("sim");
    let out = bin()
        .args([
            "simulate",
            "--config",
            cfg_path.to_str().unwrap(),
            "--codebook",
            "2x8",
            "--out",
            sim.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (cube, codebook, _) = bisense::pipeline::load_cube(&sim).unwrap();
    assert_eq!(codebook.name, "2x8");
    assert_eq!(cube.n_directions(), 85);

    let ang = dir.path().join("angles");
    let out = bin()
        .args([
            "angles",
            "--config",
            cfg_path.to_str().unwrap(),
            "--artifact",
            sim.to_str().unwrap(),
            "--out",
            ang.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(ang.join("angle_estimates.csv").exists());
    assert!(ang.join("accuracy_elevation_histogram.csv").exists());
}

#[test]
fn seed_override_changes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = small_config(dir.path());
    let run = |seed: &str, out: &Path| {
        let st = bin()
            .args([
                "simulate",
                "--config",
                cfg_path.to_str().unwrap(),
                "--seed",
                seed,
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(st.status.success());
        bisense::output::sha256_file(&out.join("cir_matrix.bin")).unwrap()
    };
    let a = run("7", &dir.path().join("a"));
    let b = run("7", &dir.path().join("b"));
    let c = run("8", &dir.path().join("c"));
    assert_eq!(a, b);
    assert_ne!(a, c);
}
