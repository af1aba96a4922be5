use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const QUICK: &str = r#"seed = 3

[grid]
n = 32
l = 40.0

[time]
dt = 0.25
t_final = 5.0
sample_every = 2

[physics]
viscosity = { kind = "affine", mu0 = 0.5, slope = 1.0 }
density_contrast = 0.05
overshoot = 0.01

[initial]
amplitude = 1.0
target_p = 1.2
regularity = { kind = "h1" }
profile = { kind = "flat_disk", k_c = 0.5 }
"#;

fn lpdecay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpdecay"))
        .args(args)
        .env_remove("LPDECAY_OUT")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p
}

fn report_value(path: &Path, key: &str) -> String {
    let text = fs::read_to_string(path).unwrap();
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("{key} missing from {}", path.display()))
        .to_string()
}

#[test]
fn zero_amplitude_reports_empty_and_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), QUICK);
    let out = dir.path().join("out");
    let o = lpdecay(&[
        "--out", out.to_str().unwrap(),
        "simulate", "--config", cfg.to_str().unwrap(), "--amplitude", "0",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = out.join("seed_3/report.txt");
    assert_eq!(report_value(&report, "status"), "empty");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), QUICK);
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let o = lpdecay(&[
            "--out", out.to_str().unwrap(),
            "simulate", "--config", cfg.to_str().unwrap(), "--seeds", "3,8", "--jobs", "2",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(out);
    }
    for seed in ["seed_3", "seed_8"] {
        for file in ["diagnostics.csv", "extras.csv", "splitting.csv", "ledger_0.csv", "report.txt"] {
            let a = fs::read(outputs[0].join(seed).join(file)).unwrap();
            let b = fs::read(outputs[1].join(seed).join(file)).unwrap();
            assert!(a == b, "{seed}/{file} differs between runs");
        }
    }
    let a = fs::read(outputs[0].join("seed_3/diagnostics.csv")).unwrap();
    let c = fs::read(outputs[0].join("seed_8/diagnostics.csv")).unwrap();
    assert_ne!(a, c);
}

#[test]
fn out_flag_beats_environment_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let from_cfg = dir.path().join("cfg_out");
    let text = format!("output = {:?}\n{QUICK}", from_cfg.to_str().unwrap());
    let cfg = write_config(dir.path(), &text);
    let from_env = dir.path().join("env_out");
    let from_flag = dir.path().join("flag_out");
    let run = |flag: Option<&Path>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_lpdecay"));
        if let Some(f) = flag {
            c.args(["--out", f.to_str().unwrap()]);
        }
        c.args(["simulate", "--config", cfg.to_str().unwrap(), "--t-final", "1"])
            .env("LPDECAY_OUT", &from_env)
            .output()
            .unwrap()
    };
    assert!(run(Some(&from_flag)).status.success());
    assert!(from_flag.join("seed_3/report.txt").exists());
    assert!(!from_env.exists());
    assert!(run(None).status.success());
    assert!(from_env.join("seed_3/report.txt").exists());
    assert!(!from_cfg.exists());
}

#[test]
fn decay_fit_recovers_fixture_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path();
    fs::write(run.join("config.toml"), QUICK).unwrap();
    let mut csv = String::from("t,l2_u,l2_grad_u,l2_ut,p_div,q_div_minus_gradpi,min_rho,max_rho,energy\n");
    for i in 0..200 {
        let t = i as f64 * 0.5;
        let s = t + std::f64::consts::E;
        // |u|^2 ~ (t+e)^-0.5 and |grad u|^2 ~ (t+e)^-1.5
        let u = s.powf(-0.25);
        let gu = s.powf(-0.75);
        csv.push_str(&format!("{t},{u},{gu},0,0,0,1,1,{}\n", 0.5 * u * u));
    }
    fs::write(run.join("diagnostics.csv"), csv).unwrap();
    let o = lpdecay(&["decay-fit", "--run", run.to_str().unwrap(), "--window", "5,90"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = run.join("decay_report.txt");
    let u: f64 = report_value(&report, "u_exponent").parse().unwrap();
    let gu: f64 = report_value(&report, "grad_u_exponent").parse().unwrap();
    assert!((u - 0.5).abs() <= 1e-3, "{u}");
    assert!((gu - 1.5).abs() <= 1e-3, "{gu}");
    assert!(run.join("decay_fit.csv").exists());
}

#[test]
fn decay_fit_on_missing_run_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = lpdecay(&["decay-fit", "--run", dir.path().join("nope").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing run artifact"));
}

#[test]
fn malformed_config_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &QUICK.replace("dt = 0.25", "dt = \"soon\""));
    let o = lpdecay(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("run.toml:8"), "{err}");
}

#[test]
fn out_of_range_override_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), QUICK);
    let o = lpdecay(&["simulate", "--config", cfg.to_str().unwrap(), "--contrast", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn calculus_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = lpdecay(&["--out", dir.path().to_str().unwrap(), "verify-inequalities", "--suite", "calculus"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(dir.path().join("verify/calculus.txt").exists());
}

#[test]
fn unknown_suite_is_an_error() {
    let o = lpdecay(&["verify-inequalities", "--suite", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn frozen_constants_match_a_fresh_fit() {
    let o = lpdecay(&["fit-constants", "--check"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn besov_norm_reads_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), QUICK);
    let out = dir.path().join("out");
    let o = lpdecay(&[
        "--out", out.to_str().unwrap(),
        "simulate", "--config", cfg.to_str().unwrap(), "--t-final", "1", "--snapshot-every", "2",
    ]);
    assert!(o.status.success());
    let snap = out.join("seed_3/snapshots/snap_0000000.bin");
    let o = lpdecay(&["besov-norm", "--field", snap.to_str().unwrap(), "--spec", "classical:0,2,2", "--component", "u1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout);
    let norm: f64 = text.lines().find_map(|l| l.strip_prefix("norm = ")).unwrap().parse().unwrap();
    assert!(norm > 0.0 && norm.is_finite());
    let bad = lpdecay(&["besov-norm", "--field", snap.to_str().unwrap(), "--spec", "log:x"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn smallness_exit_code_follows_require_pass() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), QUICK);
    let out = dir.path().join("out");
    let args = ["--out", out.to_str().unwrap(), "check-smallness", "--config", cfg.to_str().unwrap()];
    // unit amplitude is far from small
    assert!(lpdecay(&args).status.success());
    assert_eq!(report_value(&out.join("smallness_report.txt"), "pass"), "false");
    let mut strict = args.to_vec();
    strict.push("--require-pass");
    assert_eq!(lpdecay(&strict).status.code(), Some(1));
}
