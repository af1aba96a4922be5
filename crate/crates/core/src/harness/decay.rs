use std::f64::consts::{E, PI};

use crate::error::{invalid, Error, Result};
use crate::solver::Sample;
use crate::spectral::{Grid, VelocityField};

/// `||e^{mu0 t Delta} u0||^2_{L^2}` at each time, evaluated mode by mode.
pub fn heat_baseline(u0: &VelocityField, mu0: f64, times: &[f64]) -> Vec<(f64, f64)> {
    let g = *u0.grid();
    let weights: Vec<(f64, f64)> = u0
        .u1()
        .coeffs()
        .iter()
        .zip(u0.u2().coeffs())
        .enumerate()
        .filter_map(|(i, (a, b))| {
            let w = a.norm_sqr() + b.norm_sqr();
            (w > 0.0).then(|| (g.xi_norm_sq(i), w))
        })
        .collect();
    times
        .iter()
        .map(|&t| {
            let s: f64 = weights.iter().map(|(k2, w)| w * (-2.0 * mu0 * t * k2).exp()).sum();
            (t, g.area() * s)
        })
        .collect()
}

/// Whole-plane value `int_{|xi| <= k_c} A^2 e^{-2 mu0 t |xi|^2} d xi
/// = A^2 pi (1 - e^{-2 mu0 t k_c^2}) / (2 mu0 t)`.
pub fn flat_disk_heat_energy(amplitude: f64, k_c: f64, mu0: f64, t: f64) -> f64 {
    let a2 = amplitude * amplitude;
    if t == 0.0 {
        return a2 * PI * k_c * k_c;
    }
    let x = 2.0 * mu0 * t;
    a2 * PI * (-(-x * k_c * k_c).exp_m1()) / x
}

/// Least-squares power law `value ~ (t+e)^{-exponent}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    pub exponent: f64,
    /// Half-width of the 95% interval, `1.96` standard errors.
    pub ci: f64,
    pub log_prefactor: f64,
    pub samples: usize,
}

pub const MIN_FIT_SAMPLES: usize = 10;

/// Fraction of the box cutoff `l^2 / (8 pi^2 mu0)` kept by the default window.
pub const BOX_VALID_FRACTION: f64 = 0.25;

/// Fits `log(value)` against `log(t+e)` over samples with `t` in `window`.
pub fn fit_decay_exponent(series: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit> {
    let (lo, hi) = window;
    if !(hi > lo) {
        return Err(invalid("window", format!("empty window ({lo}, {hi})")));
    }
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, _)| *t >= lo && *t <= hi)
        .copied()
        .collect();
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            need: MIN_FIT_SAMPLES,
            got: pts.len(),
        });
    }
    if let Some(&(t, value)) = pts.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::NonPositive { t, value });
    }
    let xs: Vec<f64> = pts.iter().map(|(t, _)| (t + E).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, v)| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(invalid("window", "all samples share one time"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let se = (ssr / (n - 2.0) / sxx).sqrt();
    Ok(DecayFit {
        exponent: -slope,
        ci: 1.96 * se,
        log_prefactor: intercept,
        samples: pts.len(),
    })
}

/// Fit window from five energy e-folding times of the cutoff wavenumber,
/// `5 / (2 mu0 k_c^2)`, up to a quarter of the box cutoff. Past that the
/// lowest lattice mode has lost a fifth of its energy and the lattice sum
/// visibly decays faster than the whole-plane integral.
pub fn default_fit_window(grid: &Grid, mu0: f64, k_c: f64) -> Result<(f64, f64)> {
    let lo = 5.0 / (2.0 * mu0 * k_c * k_c);
    let hi = BOX_VALID_FRACTION * grid.box_cutoff(mu0);
    if lo >= hi {
        return Err(invalid(
            "fit_window",
            format!("transient ends at {lo:.3} after the box-valid limit {hi:.3}; enlarge l or k_c"),
        ));
    }
    Ok((lo, hi))
}

/// Measured decay of `||u||^2` and `||grad u||^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport {
    /// `beta(p)` at the effective `p` of the data.
    pub beta_p: f64,
    pub u: DecayFit,
    pub grad_u: DecayFit,
    pub window: (f64, f64),
    pub box_cutoff: f64,
}

pub fn decay_report(samples: &[Sample], window: (f64, f64), beta_p: f64, box_cutoff: f64) -> Result<DecayReport> {
    let u: Vec<(f64, f64)> = samples.iter().map(|s| (s.t, s.l2_u * s.l2_u)).collect();
    let gu: Vec<(f64, f64)> = samples.iter().map(|s| (s.t, s.l2_grad_u * s.l2_grad_u)).collect();
    Ok(DecayReport {
        beta_p,
        u: fit_decay_exponent(&u, window)?,
        grad_u: fit_decay_exponent(&gu, window)?,
        window,
        box_cutoff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series<F: Fn(f64) -> f64>(f: F) -> Vec<(f64, f64)> {
        (0..100).map(|i| {
            let t = i as f64;
            (t, f(t))
        }).collect()
    }

    #[test]
    fn exact_power_law() {
        let fit = fit_decay_exponent(&series(|t| (t + E).powf(-0.5)), (0.0, 99.0)).unwrap();
        assert!((fit.exponent - 0.5).abs() < 1e-3);
        assert!(fit.ci < 1e-6);
    }

    #[test]
    fn constant_series() {
        let fit = fit_decay_exponent(&series(|_| 3.0), (0.0, 99.0)).unwrap();
        assert!(fit.exponent.abs() < 1e-6 && fit.ci < 1e-6);
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(
            fit_decay_exponent(&series(|_| 1.0), (0.0, 5.0)),
            Err(Error::InsufficientSamples { .. })
        ));
        assert!(matches!(
            fit_decay_exponent(&series(|t| 1.0 - t / 50.0), (0.0, 99.0)),
            Err(Error::NonPositive { .. })
        ));
    }

    #[test]
    fn disk_closed_form_limits() {
        let v0 = flat_disk_heat_energy(2.0, 0.5, 0.5, 0.0);
        assert!((v0 - 4.0 * PI * 0.25).abs() < 1e-14);
        let small = flat_disk_heat_energy(2.0, 0.5, 0.5, 1e-12);
        assert!((small - v0).abs() < 1e-9);
    }
}
