//! Experiment configuration, read from TOML with one table per concern.
//!
//! Precedence: built-in defaults < config file < command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::harness::{InitialDataSpec, WeightKind};
use crate::solver::{AdvectionScheme, ViscosityLaw};
use crate::spectral::{Grid, DEFAULT_DEALIAS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub l: f64,
    #[serde(default = "default_dealias")]
    pub dealias: f64,
}

fn default_dealias() -> f64 {
    DEFAULT_DEALIAS
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_final: f64,
    /// Diagnostics are recorded every this many steps.
    #[serde(default = "one")]
    pub sample_every: usize,
    /// Snapshot files are written every this many steps (0 disables).
    #[serde(default)]
    pub snapshot_every: usize,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    pub viscosity: ViscosityLaw,
    /// Amplitude of `rho0 - 1` in sup norm.
    #[serde(default)]
    pub density_contrast: f64,
    /// Largest integer wavenumber of the density perturbation.
    #[serde(default = "default_density_k")]
    pub density_k_cut: f64,
    #[serde(default = "default_true")]
    pub nonlinear: bool,
    #[serde(default)]
    pub scheme: AdvectionScheme,
    #[serde(default = "default_cfl")]
    pub cfl_max: f64,
    #[serde(default = "default_overshoot")]
    pub overshoot: f64,
    /// Small loss `epsilon` in the power-ladder weights.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

fn default_density_k() -> f64 {
    4.0
}
fn default_true() -> bool {
    true
}
fn default_cfl() -> f64 {
    0.5
}
fn default_overshoot() -> f64 {
    1e-3
}
fn default_epsilon() -> f64 {
    0.1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarnessConfig {
    /// `M` values swept by the Fourier-splitting check.
    #[serde(default = "default_m")]
    pub m_values: Vec<f64>,
    /// Numerator of `g^2 = num / ((e+t) ln(e+t))`.
    #[serde(default = "default_g")]
    pub g_numerator: f64,
    #[serde(default = "default_weights")]
    pub weights: Vec<WeightKind>,
    /// Overrides the automatic decay-fit window.
    #[serde(default)]
    pub fit_window: Option<(f64, f64)>,
    #[serde(default = "one_f")]
    pub c: f64,
    #[serde(default = "one_f")]
    pub c0_exp: f64,
    #[serde(default = "default_small_c")]
    pub c0_small: f64,
    /// Log-Besov index in the smallness condition (must exceed 1).
    #[serde(default = "default_eta")]
    pub eta: f64,
}

fn default_m() -> Vec<f64> {
    vec![1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0]
}
fn default_g() -> f64 {
    2.0
}
fn default_weights() -> Vec<WeightKind> {
    vec![WeightKind::TPlusE, WeightKind::TPlusELog, WeightKind::TPlusELog2]
}
fn one_f() -> f64 {
    1.0
}
fn default_small_c() -> f64 {
    0.01
}
fn default_eta() -> f64 {
    1.5
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            m_values: default_m(),
            g_numerator: default_g(),
            weights: default_weights(),
            fit_window: None,
            c: 1.0,
            c0_exp: 1.0,
            c0_small: default_small_c(),
            eta: default_eta(),
        }
    }
}

/// Velocity used by the block-transport experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransportFlow {
    /// `(a sin(2 pi m y / l), 0)`
    Shear { amplitude: f64, mode: i64 },
    /// Rigid rotation with angular velocity `omega` about the box centre,
    /// tapered to zero near the boundary.
    Rotation { omega: f64 },
    /// No motion.
    Still,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportConfig {
    #[serde(default = "default_eta")]
    pub eta: f64,
    pub flow: TransportFlow,
    pub horizon: f64,
    pub dt: f64,
    /// Number of recorded samples over the horizon.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Largest integer wavenumber of the random initial density.
    #[serde(default = "default_density_k")]
    pub k_cut: f64,
    #[serde(default)]
    pub scheme: AdvectionScheme,
}

fn default_samples() -> usize {
    20
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub seed: u64,
    pub grid: GridConfig,
    pub time: TimeConfig,
    pub physics: PhysicsConfig,
    pub initial: InitialDataSpec,
    #[serde(default)]
    pub harness: HarnessConfig,
    #[serde(default)]
    pub transport: Option<TransportConfig>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl SimConfig {
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
            message: e.message().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::with_dealias(self.grid.n, self.grid.l, self.grid.dealias)
    }

    pub fn mu0(&self) -> f64 {
        self.physics.viscosity.mu0()
    }

    /// Initial-data spec with the run seed filled in.
    pub fn initial_spec(&self) -> InitialDataSpec {
        InitialDataSpec {
            seed: self.seed,
            ..self.initial.clone()
        }
    }

    /// Number of steps to reach `t_final`.
    pub fn steps(&self) -> usize {
        (self.time.t_final / self.time.dt - 1e-9).ceil().max(0.0) as usize
    }

    pub fn validate(&self) -> Result<()> {
        let g = self.grid()?;
        let t = &self.time;
        if !(t.dt > 0.0) {
            return Err(invalid("time.dt", "must be positive"));
        }
        if !(t.t_final >= 0.0) {
            return Err(invalid("time.t_final", "must be nonnegative"));
        }
        if t.sample_every == 0 {
            return Err(invalid("time.sample_every", "must be at least 1"));
        }
        let p = &self.physics;
        if !(p.density_contrast >= 0.0 && p.density_contrast < 1.0) {
            return Err(invalid("physics.density_contrast", "must lie in [0, 1)"));
        }
        if !(p.cfl_max > 0.0) {
            return Err(invalid("physics.cfl_max", "must be positive"));
        }
        if !(p.overshoot >= 0.0) {
            return Err(invalid("physics.overshoot", "must be nonnegative"));
        }
        if !(p.epsilon > 0.0 && p.epsilon < 1.0) {
            return Err(invalid("physics.epsilon", "must lie in (0, 1)"));
        }
        if p.density_contrast > 0.0 && !(p.density_k_cut >= 1.0 && p.density_k_cut < (g.n() / 2) as f64) {
            return Err(invalid("physics.density_k_cut", "must lie in [1, n/2)"));
        }
        let c = p.density_contrast;
        p.viscosity.validate(1.0 - c, 1.0 + c)?;
        self.initial.validate()?;
        let h = &self.harness;
        if h.m_values.iter().any(|m| !(*m > 0.0)) {
            return Err(invalid("harness.m_values", "must be positive"));
        }
        if !(h.g_numerator > 0.0) {
            return Err(invalid("harness.g_numerator", "must be positive"));
        }
        if let Some((lo, hi)) = h.fit_window {
            if !(lo >= 0.0 && hi > lo) {
                return Err(invalid("harness.fit_window", "need 0 <= lo < hi"));
            }
        }
        if !(h.c > 0.0 && h.c0_exp > 0.0 && h.c0_small > 0.0) {
            return Err(invalid("harness", "constants C, C0, c0 must be positive"));
        }
        if !(h.eta > 1.0) {
            return Err(invalid("harness.eta", "must exceed 1"));
        }
        for w in &h.weights {
            w.validate()?;
        }
        if let Some(tr) = &self.transport {
            if !(tr.eta > 0.0) {
                return Err(invalid("transport.eta", "must be positive"));
            }
            if !(tr.horizon > 0.0 && tr.dt > 0.0) {
                return Err(invalid("transport", "horizon and dt must be positive"));
            }
            if tr.samples < 2 {
                return Err(invalid("transport.samples", "need at least 2"));
            }
            if !(tr.k_cut >= 1.0 && tr.k_cut < (g.n() / 2) as f64) {
                return Err(invalid("transport.k_cut", "must lie in [1, n/2)"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
seed = 11

[grid]
n = 32
l = 20.0

[time]
dt = 0.1
t_final = 2.0
sample_every = 2

[physics]
viscosity = { kind = "affine", mu0 = 0.5, slope = 0.2 }
density_contrast = 0.05

[initial]
amplitude = 1.0
target_p = 1.2
regularity = { kind = "h1" }
profile = { kind = "flat_disk", k_c = 0.5 }
"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = SimConfig::from_toml_str(SAMPLE, Path::new("sample.toml")).unwrap();
        assert_eq!(cfg.grid.n, 32);
        assert_eq!(cfg.steps(), 20);
        assert_eq!(cfg.harness, HarnessConfig::default());
        let again = SimConfig::from_toml_str(&cfg.to_toml(), Path::new("again.toml")).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.to_toml(), again.to_toml());
    }

    #[test]
    fn reports_line_of_bad_field() {
        let bad = SAMPLE.replace("dt = 0.1", "dt = \"fast\"");
        match SimConfig::from_toml_str(&bad, Path::new("bad.toml")) {
            Err(Error::Parse { line, message, .. }) => assert_eq!(line, 9, "{message}"),
            other => panic!("{other:?}"),
        }
        let unknown = SAMPLE.replace("sample_every = 2", "sample_evry = 2");
        assert!(matches!(
            SimConfig::from_toml_str(&unknown, Path::new("u.toml")),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn rejects_out_of_range_values() {
        for (from, to) in [
            ("dt = 0.1", "dt = -0.1"),
            ("n = 32", "n = 6"),
            ("density_contrast = 0.05", "density_contrast = 1.5"),
            ("slope = 0.2", "slope = 20.0"),
        ] {
            let text = SAMPLE.replace(from, to);
            assert!(SimConfig::from_toml_str(&text, Path::new("x.toml")).is_err(), "{to}");
        }
    }
}
