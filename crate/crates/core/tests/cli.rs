//! End-to-end checks of the command-line surface: determinism of artifacts,
//! exit codes, and the documented file formats.

use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shiftlab"))
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("shiftlab-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

#[test]
fn simulate_is_byte_identical_across_runs_and_worker_counts() {
    let d1 = tmp("sim1");
    let d2 = tmp("sim2");
    for (d, workers) in [(&d1, "1"), (&d2, "4")] {
        let out = bin()
            .args([
                "simulate",
                "--seed",
                "42",
                "--workers",
                workers,
                "--out",
                d.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = fs::read(d1.join("dataset.json")).unwrap();
    let b = fs::read(d2.join("dataset.json")).unwrap();
    assert_eq!(a, b);
    // manifest carries the resolved config and seed
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d1.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 42);
    assert!(manifest["config"]["schema_version"].is_number());
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tmp("badcfg");
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("cfg.json");
    fs::write(&cfg, r#"{"schema_version": 1, "bogus": 1}"#).unwrap();
    let out = bin()
        .args([
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.join("out").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("exit_code"), "machine-readable error: {stderr}");
}

#[test]
fn unknown_verb_exits_2() {
    let out = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn posterior_runs_on_simulated_input() {
    let dir = tmp("post");
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("cfg.json");
    fs::write(
        &cfg,
        r#"{
          "schema_version": 1,
          "model": {"s": 1.0, "nu": 1.6, "ball_radius": 2.0, "cutoff": 2, "n_grid": [10]},
          "prior": {"c_lambda": 1.0, "rho": 1.5, "k_max": 4, "grid_len": 64, "n_kl": 32, "max_attempts": 1000},
          "mcmc": {"sweeps": 400, "burn_in": 100, "thin": 4, "proposal_scale": 1.0, "beta_pcn": 0.3, "chains": 1}
        }"#,
    )
    .unwrap();
    let sim = dir.join("sim");
    let status = bin()
        .args([
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "7",
            "--out",
            sim.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());

    let post = dir.join("post");
    let out = bin()
        .args([
            "posterior",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "7",
            "--out",
            post.to_str().unwrap(),
            "--input",
            sim.join("dataset.json").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let chain = fs::read_to_string(post.join("chain.csv")).unwrap();
    let mut lines = chain.lines();
    assert!(lines.next().unwrap().starts_with("# seed="));
    assert_eq!(
        lines.next().unwrap(),
        "iter,level,theta1,dist_f,dist_g,dist_theta1,hellinger"
    );
    assert!(lines.count() > 10);
    assert!(post.join("summary.json").exists());
    assert!(post.join("mass_curve.svg").exists());
}

#[test]
fn report_rebuilds_plots_from_contraction_table() {
    let dir = tmp("report");
    fs::create_dir_all(&dir).unwrap();
    let src = dir.join("src");
    fs::create_dir_all(&src).unwrap();
    fs::write(
        src.join("contraction.csv"),
        "# seed=1\nn,chain,median_hellinger,median_theta1_err,median_f_err,median_g_err,eps_n,log_rate\n\
         25,0,0.5,0.1,0.2,0.3,0.4,0.5\n100,0,0.3,0.08,0.15,0.25,0.3,0.4\n",
    )
    .unwrap();
    let out_dir = dir.join("out");
    let out = bin()
        .args([
            "report",
            "--input",
            src.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("report_hellinger.svg").exists());
    assert!(Path::new(&out_dir).join("manifest.json").exists());
}
