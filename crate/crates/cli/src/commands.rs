use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use lpdecay::analysis::{format_constants, frozen_constants, GammaSweep};
use lpdecay::besov::{besov_norm as field_norm, BesovSpec};
use lpdecay::config::SimConfig;
use lpdecay::harness::{
    beta, check_smallness as evaluate_smallness, decay_report, default_fit_window, energy_ledger, fit_decay_exponent,
    heat_baseline, splitting_tolerance, sweep_m, SmallnessConstants,
};
use lpdecay::report::{fmt_f64, Report};
use lpdecay::solver::{initial_state, read_diagnostics, read_snapshot_fields, run, Trajectory};
use lpdecay::transport::BlockTransportExperiment;
use lpdecay::verify::Suite;
use lpdecay::{Error, Execution, Result};

use crate::Overrides;

const DEFAULT_OUT: &str = "lpdecay-out";

/// `--out` (or `LPDECAY_OUT`) beats the config's `output`, which beats the default.
fn output_root(flag: Option<PathBuf>, cfg: Option<&SimConfig>) -> PathBuf {
    flag.or_else(|| cfg.and_then(|c| c.output.clone()))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn load(path: &Path, o: &Overrides) -> Result<SimConfig> {
    let mut cfg = SimConfig::load(path)?;
    if let Some(v) = o.seed {
        cfg.seed = v;
    }
    if let Some(v) = o.n {
        cfg.grid.n = v;
    }
    if let Some(v) = o.l {
        cfg.grid.l = v;
    }
    if let Some(v) = o.dt {
        cfg.time.dt = v;
    }
    if let Some(v) = o.t_final {
        cfg.time.t_final = v;
    }
    if let Some(v) = o.sample_every {
        cfg.time.sample_every = v;
    }
    if let Some(v) = o.snapshot_every {
        cfg.time.snapshot_every = v;
    }
    if let Some(v) = o.amplitude {
        cfg.initial.amplitude = v;
    }
    if let Some(v) = o.contrast {
        cfg.physics.density_contrast = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_rows(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(Error::from)?;
    w.write_record(header).map_err(Error::from)?;
    for r in rows {
        w.write_record(&r).map_err(Error::from)?;
    }
    w.flush()?;
    Ok(())
}

fn fit_window(cfg: &SimConfig) -> Result<(f64, f64)> {
    match cfg.harness.fit_window {
        Some(w) => Ok(w),
        None => default_fit_window(&cfg.grid()?, cfg.mu0(), cfg.initial.profile.k_c()),
    }
}

/// Decay and heat-baseline fits, or the reason they are unavailable.
fn add_decay(report: &mut Report, cfg: &SimConfig, traj: &Trajectory, window: Option<(f64, f64)>) {
    let window = match window.map(Ok).unwrap_or_else(|| fit_window(cfg)) {
        Ok(w) => w,
        Err(e) => {
            report.push("decay_fit", format!("unavailable: {e}"));
            return;
        }
    };
    let grid = traj.grid;
    let p = cfg.initial.profile.p_effective();
    match decay_report(&traj.samples, window, beta(p), grid.box_cutoff(cfg.mu0())) {
        Ok(d) => {
            report
                .push("fit_window_lo", fmt_f64(window.0))
                .push("fit_window_hi", fmt_f64(window.1))
                .push("two_beta_p", fmt_f64(2.0 * d.beta_p))
                .push("u_exponent", fmt_f64(d.u.exponent))
                .push("u_exponent_ci", fmt_f64(d.u.ci))
                .push("grad_u_exponent", fmt_f64(d.grad_u.exponent))
                .push("grad_u_exponent_ci", fmt_f64(d.grad_u.ci))
                .push("fit_samples", d.u.samples);
        }
        Err(e) => {
            report.push("decay_fit", format!("unavailable: {e}"));
            return;
        }
    }
    let heat = heat_baseline(&traj.initial.u, cfg.mu0(), &traj.times());
    if let Ok(h) = fit_decay_exponent(&heat, window) {
        report.push("heat_u_exponent", fmt_f64(h.exponent));
    }
}

fn simulate_one(cfg: &SimConfig, dir: &Path) -> Result<bool> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.toml"), cfg.to_toml())?;
    let traj = run(cfg, Some(dir))?;
    traj.write_diagnostics(&dir.join("diagnostics.csv"))?;
    traj.write_extras(&dir.join("extras.csv"))?;
    let mut report = Report::new("simulate").with_config(cfg);
    report
        .push("seed", cfg.seed)
        .push("samples", traj.samples.len())
        .push("t_final", fmt_f64(traj.final_state.t));
    let empty = traj.samples.iter().all(|s| s.energy == 0.0);
    if empty {
        report.push("status", "empty");
        report.push("decay_fit", "skipped: zero energy");
        report.write(&dir.join("report.txt"))?;
        return Ok(true);
    }
    report.push("status", "ok");
    add_decay(&mut report, cfg, &traj, None);

    let tol = splitting_tolerance(cfg.time.dt);
    let (table, best) = sweep_m(&traj, &cfg.harness.m_values, cfg.harness.g_numerator, tol)?;
    write_rows(
        &dir.join("splitting.csv"),
        &["m", "worst_relative_violation", "passes"],
        table
            .iter()
            .map(|(m, w)| vec![fmt_f64(*m), fmt_f64(*w), (*w <= tol).to_string()]),
    )?;
    report.push("splitting_tolerance", fmt_f64(tol));
    report.push(
        "splitting_smallest_m",
        best.map_or_else(|| "none".to_string(), fmt_f64),
    );
    for (i, w) in cfg.harness.weights.iter().enumerate() {
        let ledger = energy_ledger(&traj.samples, *w);
        ledger.write_csv(&dir.join(format!("ledger_{i}.csv")))?;
        let name = w.name();
        report
            .push(&format!("ledger_{i}"), &name)
            .push(&format!("ledger_{i}_sup_weighted_grad"), fmt_f64(ledger.sup_weighted_grad()))
            .push(&format!("ledger_{i}_total_weighted_ut"), fmt_f64(ledger.total_weighted_ut()));
    }
    report.write(&dir.join("report.txt"))?;
    Ok(true)
}

pub fn simulate(config: &Path, seeds: &[u64], jobs: usize, o: &Overrides, out: Option<PathBuf>) -> Result<bool> {
    let base = load(config, o)?;
    let root = output_root(out, Some(&base));
    let seeds: Vec<u64> = if seeds.is_empty() { vec![base.seed] } else { seeds.to_vec() };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let results: Vec<(u64, Result<bool>)> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                let mut cfg = base.clone();
                cfg.seed = seed;
                let dir = root.join(format!("seed_{seed}"));
                (seed, simulate_one(&cfg, &dir))
            })
            .collect()
    });
    let mut ok = true;
    for (seed, r) in results {
        match r {
            Ok(pass) => {
                println!("seed {seed}: done -> {}", root.join(format!("seed_{seed}")).display());
                ok &= pass;
            }
            Err(e) if seeds.len() == 1 => return Err(e),
            Err(e) => {
                eprintln!("seed {seed}: error: {e}");
                ok = false;
            }
        }
    }
    Ok(ok)
}

pub fn decay_fit(run_dir: &Path, window: Option<(f64, f64)>) -> Result<bool> {
    let cfg_path = run_dir.join("config.toml");
    if !cfg_path.exists() {
        return Err(Error::MissingArtifact(cfg_path));
    }
    let cfg = SimConfig::load(&cfg_path)?;
    let samples = read_diagnostics(&run_dir.join("diagnostics.csv"))?;
    let window = match window.or(cfg.harness.fit_window) {
        Some(w) => w,
        None => fit_window(&cfg)?,
    };
    let grid = cfg.grid()?;
    let p = cfg.initial.profile.p_effective();
    let d = decay_report(&samples, window, beta(p), grid.box_cutoff(cfg.mu0()))?;
    let u0 = initial_state(&cfg)?.u;
    let times: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let heat = fit_decay_exponent(&heat_baseline(&u0, cfg.mu0(), &times), window)?;

    let mut report = Report::new("decay_fit").with_config(&cfg);
    report
        .push("fit_window_lo", fmt_f64(window.0))
        .push("fit_window_hi", fmt_f64(window.1))
        .push("box_cutoff", fmt_f64(d.box_cutoff))
        .push("two_beta_p", fmt_f64(2.0 * d.beta_p))
        .push("u_exponent", fmt_f64(d.u.exponent))
        .push("u_exponent_ci", fmt_f64(d.u.ci))
        .push("grad_u_exponent", fmt_f64(d.grad_u.exponent))
        .push("grad_u_exponent_ci", fmt_f64(d.grad_u.ci))
        .push("heat_u_exponent", fmt_f64(heat.exponent))
        .push("fit_samples", d.u.samples);
    report.write(&run_dir.join("decay_report.txt"))?;
    write_rows(
        &run_dir.join("decay_fit.csv"),
        &["quantity", "exponent", "ci", "log_prefactor", "samples"],
        [("u_sq", d.u), ("grad_u_sq", d.grad_u), ("heat_u_sq", heat)].iter().map(|(q, f)| {
            vec![
                q.to_string(),
                fmt_f64(f.exponent),
                fmt_f64(f.ci),
                fmt_f64(f.log_prefactor),
                f.samples.to_string(),
            ]
        }),
    )?;
    print!("{}", report.render());
    Ok(true)
}

fn parse_spec(s: &str) -> Result<BesovSpec> {
    let bad = || Error::Config(format!("bad norm spec `{s}`; use log:ETA or classical:S,P,R"));
    let num = |x: &str| -> Result<f64> {
        match x.trim() {
            "inf" => Ok(f64::INFINITY),
            v => v.parse().map_err(|_| bad()),
        }
    };
    let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
    match kind {
        "log" => BesovSpec::logarithmic(num(rest)?),
        "classical" => {
            let v: Vec<f64> = rest.split(',').map(num).collect::<Result<_>>()?;
            if v.len() != 3 {
                return Err(bad());
            }
            BesovSpec::classical(v[0], v[1], v[2])
        }
        _ => Err(bad()),
    }
}

pub fn besov_norm(field: &Path, component: &str, spec: &str) -> Result<bool> {
    let spec = parse_spec(spec)?;
    let (t, fields) = read_snapshot_fields(field)?;
    let idx = match component {
        "u1" => 0,
        "u2" => 1,
        "rho" => 2,
        other => return Err(Error::Config(format!("unknown component `{other}`"))),
    };
    let f = fields
        .get(idx)
        .ok_or_else(|| Error::Config(format!("snapshot has no component `{component}`")))?;
    println!("t = {}", fmt_f64(t));
    println!("norm = {}", fmt_f64(field_norm(f, spec)));
    Ok(true)
}

pub fn transport_reg(config: &Path, o: &Overrides, out: Option<PathBuf>) -> Result<bool> {
    let cfg = load(config, o)?;
    let dir = output_root(out, Some(&cfg)).join("transport");
    fs::create_dir_all(&dir)?;
    let exp = BlockTransportExperiment::from_config(&cfg, Execution::default())?;
    let rep = exp.run()?;
    rep.write_csv(&dir.join("growth.csv"))?;
    rep.write_matrix_csv(rep.rows.len() - 1, &dir.join("block_matrix_final.csv"))?;
    let monotone = rep.rows.windows(2).all(|w| w[1].bound >= w[0].bound);
    let superposed = rep.superposition_error <= 1e-6;
    let mut report = Report::new("transport_reg").with_config(&cfg);
    report
        .push("eta", fmt_f64(rep.eta))
        .push("c_fit", fmt_f64(rep.c_fit))
        .push("initial_strong_norm", fmt_f64(rep.initial_strong_norm))
        .push(
            "fitted_degree",
            rep.degree.map_or_else(|| "none".to_string(), fmt_f64),
        )
        .push("superposition_error", fmt_f64(rep.superposition_error))
        .push("block_linf_growth", fmt_f64(rep.block_linf_growth))
        .push("bound_nondecreasing", monotone)
        .push("superposition_ok", superposed);
    report.write(&dir.join("transport_report.txt"))?;
    print!("{}", report.render());
    Ok(monotone && superposed)
}

pub fn check_smallness(config: &Path, require_pass: bool, o: &Overrides, out: Option<PathBuf>) -> Result<bool> {
    let cfg = load(config, o)?;
    let dir = output_root(out, Some(&cfg));
    fs::create_dir_all(&dir)?;
    let state = initial_state(&cfg)?;
    let h = &cfg.harness;
    let consts = SmallnessConstants {
        c: h.c,
        c0_exp: h.c0_exp,
        c0_small: h.c0_small,
        eta: h.eta,
    };
    let r = evaluate_smallness(&state.rho, &state.u, &cfg.physics.viscosity, cfg.initial.target_p, consts)?;
    let mut report = Report::new("check_smallness").with_config(&cfg);
    report
        .push("rho_deviation", fmt_f64(r.norms.rho_dev))
        .push("u_lp", fmt_f64(r.norms.u_lp))
        .push("u_h1", fmt_f64(r.norms.u_h1))
        .push("u_l2", fmt_f64(r.norms.u_l2))
        .push("k", fmt_f64(r.k))
        .push("g1", fmt_f64(r.g.g1))
        .push("g2", fmt_f64(r.g.g2))
        .push("ln_g", fmt_f64(r.g.ln_g))
        .push("besov_factor", fmt_f64(r.besov_factor))
        .push("lhs", fmt_f64(r.lhs))
        .push("ln_lhs", fmt_f64(r.ln_lhs))
        .push("threshold", fmt_f64(r.threshold))
        .push("pass", r.pass);
    report.write(&dir.join("smallness_report.txt"))?;
    print!("{}", report.render());
    Ok(r.pass || !require_pass)
}

pub fn verify_inequalities(suite: &str, seed: u64, out: Option<PathBuf>) -> Result<bool> {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::parse(suite)?]
    };
    let dir = output_root(out, None).join("verify");
    fs::create_dir_all(&dir)?;
    let mut ok = true;
    for s in suites {
        let rep = s.run(seed, Execution::default())?;
        let mut report = Report::new("verify_inequalities").with_config_text(format!("suite = \"{}\"\nseed = {seed}\n", s.name()));
        println!("[{}]", s.name());
        for c in &rep.checks {
            println!("{c}");
            report.push(&c.name, format!("{} {}", if c.pass { "pass" } else { "fail" }, fmt_f64(c.measured)));
        }
        report.push("passed", rep.passed());
        report.write(&dir.join(format!("{}.txt", s.name())))?;
        write_rows(
            &dir.join(format!("{}.csv", s.name())),
            &["check", "measured", "limit", "pass"],
            rep.checks
                .iter()
                .map(|c| vec![c.name.clone(), fmt_f64(c.measured), fmt_f64(c.limit), c.pass.to_string()]),
        )?;
        ok &= rep.passed();
    }
    println!("{}", if ok { "all checks passed" } else { "some checks FAILED" });
    Ok(ok)
}

pub fn fit_constants(write: Option<&Path>, check: bool) -> Result<bool> {
    let fitted = GammaSweep::default().fit()?;
    let text = format_constants(&fitted);
    print!("{text}");
    if let Some(p) = write {
        fs::write(p, &text)?;
    }
    if check {
        let same = &fitted == frozen_constants();
        if !same {
            eprintln!("fitted constants differ from the frozen file");
        }
        return Ok(same);
    }
    Ok(true)
}
