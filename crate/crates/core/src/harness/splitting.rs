use std::f64::consts::E;

use crate::error::{Error, Result};
use crate::solver::{DensityField, FlowState, Sample, ShellSpectra, Trajectory};
use crate::spectral::{heat, laplacian, VelocityField};

/// `g^2(t) = num / ((e+t) ln(e+t))`.
pub fn g_squared(numerator: f64, t: f64) -> f64 {
    numerator / ((E + t) * (E + t).ln())
}

/// One sample of the splitting inequality
/// `dE/dt + g^2 E <= M g^2 int_{|xi| <= sqrt(M/2) g} |u_hat|^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplittingRow {
    pub t: f64,
    pub denergy_dt: f64,
    /// `g^2 E`
    pub damping: f64,
    /// `M g^2 E_S`
    pub forcing: f64,
    /// `E_S`, the low-frequency energy.
    pub low_energy: f64,
    /// `dE/dt + g^2 E - M g^2 E_S`; positive means the inequality fails.
    pub violation: f64,
}

impl SplittingRow {
    /// Violation scaled by `g^2 E` (zero when the state is zero).
    pub fn relative(&self) -> f64 {
        if self.damping > 0.0 {
            self.violation / self.damping
        } else {
            0.0
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplittingReport {
    pub m: f64,
    pub g_numerator: f64,
    pub rows: Vec<SplittingRow>,
}

impl SplittingReport {
    /// Largest signed violation.
    pub fn worst_violation(&self) -> f64 {
        self.rows.iter().map(|r| r.violation).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn worst_relative(&self) -> f64 {
        self.rows.iter().map(SplittingRow::relative).fold(f64::NEG_INFINITY, f64::max)
    }

    /// No sample exceeds `tol` in relative violation.
    pub fn passes(&self, tol: f64) -> bool {
        self.rows.iter().all(|r| r.relative() <= tol)
    }
}

/// Relative violation tolerated along a run with step `dt`: the sampled
/// `dE/dt` is exact for the semi-discrete state, so only an `O(dt^2)`
/// drift of the state itself is allowed for.
pub fn splitting_tolerance(dt: f64) -> f64 {
    0.01 * dt * dt
}

pub fn fourier_splitting_check(traj: &Trajectory, m: f64, g_numerator: f64) -> Result<SplittingReport> {
    let spectra = traj.spectra.as_ref().ok_or(Error::MissingSnapshots)?;
    if spectra.len() != traj.samples.len() {
        return Err(Error::MissingSnapshots);
    }
    let rows = traj
        .samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let g2 = g_squared(g_numerator, s.t);
            let low = spectra.energy_within(i, (0.5 * m * g2).sqrt());
            let damping = g2 * s.energy;
            let forcing = m * g2 * low;
            SplittingRow {
                t: s.t,
                denergy_dt: s.denergy_dt,
                damping,
                forcing,
                low_energy: low,
                violation: s.denergy_dt + damping - forcing,
            }
        })
        .collect();
    Ok(SplittingReport {
        m,
        g_numerator,
        rows,
    })
}

/// Worst relative violation for each `M`, and the smallest passing `M`.
pub fn sweep_m(traj: &Trajectory, ms: &[f64], g_numerator: f64, tol: f64) -> Result<(Vec<(f64, f64)>, Option<f64>)> {
    let mut table = Vec::with_capacity(ms.len());
    let mut best: Option<f64> = None;
    for &m in ms {
        let rep = fourier_splitting_check(traj, m, g_numerator)?;
        table.push((m, rep.worst_relative()));
        if rep.passes(tol) {
            best = Some(best.map_or(m, |b: f64| b.min(m)));
        }
    }
    Ok((table, best))
}

/// Exact heat-flow trajectory `u(t) = e^{mu0 t Delta} u0` with `rho = 1`,
/// sampled at `times`.
pub fn heat_flow_trajectory(u0: &VelocityField, mu0: f64, times: &[f64]) -> Result<Trajectory> {
    let grid = *u0.grid();
    let one = DensityField::constant(grid, 1.0)?;
    let mut spectra = ShellSpectra::new(&grid);
    let mut samples = Vec::with_capacity(times.len());
    let mut last = u0.clone();
    for &t in times {
        let u = u0.map(|c| heat(c, mu0 * t));
        let ut = u.map(|c| laplacian(c).scaled(mu0));
        let grad2 = u.grad_l2_norm().powi(2);
        // d/dt ||u||^2 = -2 mu0 sum |xi|^2 |u_hat|^2, with the full |xi|^2 of the heat multiplier
        let full_grad2: f64 = grid.area()
            * u.u1()
                .coeffs()
                .iter()
                .zip(u.u2().coeffs())
                .enumerate()
                .map(|(i, (a, b))| grid.xi_norm_sq(i) * (a.norm_sqr() + b.norm_sqr()))
                .sum::<f64>();
        let e = u.l2_norm().powi(2);
        samples.push(Sample {
            t,
            l2_u: e.sqrt(),
            l2_grad_u: grad2.sqrt(),
            l2_ut: ut.l2_norm(),
            p_div: ut.l2_norm(),
            q_div_minus_gradpi: 0.0,
            min_rho: 1.0,
            max_rho: 1.0,
            energy: e,
            dissipation: mu0 * grad2,
            rho_ut_sq: ut.l2_norm().powi(2),
            denergy_dt: -2.0 * mu0 * full_grad2,
            iterations: 0,
        });
        spectra.push(&u);
        last = u;
    }
    Ok(Trajectory {
        grid,
        mu0,
        dt: 0.0,
        samples,
        spectra: Some(spectra),
        initial: FlowState::new(0.0, u0.clone(), one.clone())?,
        final_state: FlowState::new(times.last().copied().unwrap_or(0.0), last, one)?,
        snapshots: Vec::new(),
    })
}
