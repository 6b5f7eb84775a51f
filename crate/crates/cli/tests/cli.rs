use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use svnoise::bounds::{theorem_bound, BoundInputs};
use tempfile::TempDir;

fn svnoise(dir: &Path, args: &[&str], config: &str) -> Output {
    let cfg = dir.join("config.toml");
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_svnoise"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn read_json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("out").join(name)).unwrap()).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const CHECK_VECTOR: &str = "eps = 0.1\nn = 4\nk = 1\ngamma = 0.0\nbeta = 0.25\nsigma1 = [1.0]\nu1_max = 0.5\n";

#[test]
fn bound_zero_noise() {
    let d = TempDir::new().unwrap();
    let o = svnoise(
        d.path(),
        &["bound"],
        "eps = 0.0\nn = 10\nk = 2\nsigma1 = [2.0, 1.0]\nu1_max = 0.5\n",
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(read_json(d.path(), "bound_report.json")["rhs"], 0.0);
}

#[test]
fn bound_replays_check_vector_exactly() {
    let d = TempDir::new().unwrap();
    let o = svnoise(d.path(), &["bound"], CHECK_VECTOR);
    assert_eq!(o.status.code(), Some(0));
    let expected = theorem_bound(&BoundInputs {
        eps: 0.1,
        n: 4,
        k: 1,
        gamma: 0.0,
        beta: 0.25,
        sigma1: vec![1.0],
        u1_max: 0.5,
    })
    .unwrap();
    assert_eq!(read_json(d.path(), "bound_report.json"), serde_json::to_value(expected).unwrap());
}

#[test]
fn bound_rejects_beta_out_of_range() {
    let d = TempDir::new().unwrap();
    let o = svnoise(d.path(), &["bound"], &CHECK_VECTOR.replace("beta = 0.25", "beta = 0.7"));
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("`beta`") && err.contains("(0, 1/2)"), "{err}");
}

#[test]
fn unknown_key_is_a_config_error() {
    let d = TempDir::new().unwrap();
    let o = svnoise(d.path(), &["bound"], &format!("{CHECK_VECTOR}sigma = 3\n"));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown field `sigma`"));
}

#[test]
fn violated_precondition_exits_2_with_report() {
    let d = TempDir::new().unwrap();
    let o = svnoise(d.path(), &["bound"], &CHECK_VECTOR.replace("eps = 0.1", "eps = 0.5"));
    assert_eq!(o.status.code(), Some(2));
    let r = read_json(d.path(), "bound_report.json");
    assert_eq!(r["valid"], false);
    assert!(r["violated_conditions"].as_array().unwrap().iter().any(|c| c == "delta1 > 0"));
    assert!(r["rhs"].is_null());
}

#[test]
fn verify_single_noiseless_trial() {
    let d = TempDir::new().unwrap();
    let o = svnoise(
        d.path(),
        &["verify", "--trials", "1"],
        "n = 40\nspectrum = [2.0, 1.0]\neps = 0.0\n",
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(d.path().join("out/trials.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "trial_index,resid_max,rhs,covered,gauss_term_max,rotation_objective,flags"
    );
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("0,0,0,true,"));
}

#[test]
fn verify_is_byte_reproducible() {
    let cfg = "n = 30\nspectrum = [3.0, 1.0]\neps = 1e-3\ntrials = 12\n";
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    svnoise(a.path(), &["verify", "--seed", "77", "--jobs", "1"], cfg);
    svnoise(b.path(), &["verify", "--seed", "77", "--jobs", "3"], cfg);
    let read = |d: &TempDir| std::fs::read(d.path().join("out/trials.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    let m = read_json(a.path(), "manifest.json");
    assert_eq!(m["seed"], 77);
    assert_eq!(m["config"]["noise_seed"], 77);
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn verify_documented_scenario_covers() {
    let d = TempDir::new().unwrap();
    let o = svnoise(
        d.path(),
        &["verify", "--format", "json"],
        "n = 200\nspectrum = [2.0, 1.0]\neps = 1e-3\nbeta = 0.45\ngamma = 1.0\ntrials = 100\n",
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = read_json(d.path(), "summary.json");
    assert_eq!(s["coverage"]["verdict"], "PASS");
    assert!(!d.path().join("out/trials.csv").exists());
}

#[test]
fn plan_modes() {
    let d = TempDir::new().unwrap();
    let o = svnoise(d.path(), &["plan"], "alpha = 0.2\n");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("L >= 100"));

    let o = svnoise(d.path(), &["plan"], "eps = 0.0\nn = 100\nbeta = 0.4\nu1_max = 0.1\n");
    assert_eq!(o.status.code(), Some(0));
    let r = read_json(d.path(), "plan_report.json");
    assert_eq!(r["verdict"], "FEASIBLE");
    assert_eq!(r["margin"], 0.0);

    let o = svnoise(d.path(), &["plan"], "eps = 0.5\nn = 100\nbeta = 0.4\nu1_max = 0.1\n");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read_json(d.path(), "plan_report.json")["verdict"], "INFEASIBLE");

    let o = svnoise(d.path(), &["plan"], "eps = 0.5\n");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn classify_noiseless_qpsk() {
    let d = TempDir::new().unwrap();
    let o = svnoise(d.path(), &["classify"], "m_order = 4\n");
    assert_eq!(o.status.code(), Some(0));
    let s = read_json(d.path(), "classification.json");
    assert_eq!(s["classification"]["m_hat"], 4);
    let pts = std::fs::read_to_string(d.path().join("out/points.csv")).unwrap();
    assert!(pts.starts_with("x,y,true_theta_index,assigned_mode\n"));
    assert_eq!(pts.lines().count(), 201);
}

#[test]
fn classify_reports_radius_and_feasibility() {
    let d = TempDir::new().unwrap();
    let o = svnoise(
        d.path(),
        &["classify", "--seed", "3"],
        "m_order = 4\nf_c = 1e9\nsymbol_period = 1e-7\nsamples_per_symbol = 21\nsymbols = 200\nsnr_db = 10.0\n",
    );
    assert_eq!(o.status.code(), Some(0));
    let c = &read_json(d.path(), "classification.json")["classification"];
    let expected = 2.45 * (2.0 * 0.1 * (1.0 - 2.0 / 200.0) / 4200.0f64).sqrt();
    assert!((c["predicted_radius"].as_f64().unwrap() - expected).abs() < 1e-12);
    assert_eq!(c["feasibility"]["verdict"], "FEASIBLE");
}

#[test]
fn sweep_table_shape() {
    let d = TempDir::new().unwrap();
    let o = svnoise(
        d.path(),
        &["sweep", "--trials", "10"],
        "orders = [2, 4, 8]\nsnr_grid = [12.0, 6.0, 0.0]\n",
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(d.path().join("out/sweep.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("M_order,snr_db,runs,successes,rate"));
    assert_eq!(csv.lines().count(), 10);
    assert!(d.path().join("out/manifest.json").exists());
}
