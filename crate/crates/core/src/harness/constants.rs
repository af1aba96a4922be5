use crate::besov::log_besov_norm;
use crate::error::{invalid, Result};
use crate::solver::{DensityField, ViscosityLaw};
use crate::spectral::{SpectralField, VelocityField};

use super::initial::{velocity_lp_norm, velocity_sobolev_norm};

/// The data norms that enter `K` and `G`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DataNorms {
    /// `||rho0 - 1||_{L^2}`
    pub rho_dev: f64,
    /// `||u0||_{L^p}`
    pub u_lp: f64,
    /// `||u0||_{H^1}`
    pub u_h1: f64,
    /// `||u0||_{L^2}`
    pub u_l2: f64,
}

impl DataNorms {
    pub fn measure(rho0: &DensityField, u0: &VelocityField, p: f64) -> Result<Self> {
        Ok(DataNorms {
            rho_dev: rho0.deviation_l2(),
            u_lp: velocity_lp_norm(u0, p)?,
            u_h1: velocity_sobolev_norm(u0, 1.0),
            u_l2: u0.l2_norm(),
        })
    }
}

/// The five summands of the prefactor of `K`.
pub fn k_terms(d: &DataNorms) -> [f64; 5] {
    let (a2, b2, c2) = (d.rho_dev.powi(2), d.u_lp.powi(2), d.u_h1.powi(2));
    [b2, c2, a2, b2 * c2, (1.0 + a2) * c2 * c2]
}

/// `K = (sum of k_terms) exp(C ||u0||_{L^2}^4)`.
pub fn compute_k(d: &DataNorms, c: f64) -> f64 {
    k_terms(d).iter().sum::<f64>() * (c * d.u_l2.powi(4)).exp()
}

/// The seven summands of `G1`.
pub fn g1_terms(d: &DataNorms) -> [f64; 7] {
    let (a, b, c) = (d.rho_dev, d.u_lp, d.u_h1);
    [
        a,
        a.powi(7),
        b,
        b.powi(7),
        c,
        b.powi(7) * c.powi(7),
        (1.0 + a.powi(7)) * c.powi(14),
    ]
}

/// The five summands of `G2`.
pub fn g2_terms(d: &DataNorms) -> [f64; 5] {
    let (a, b, c) = (d.rho_dev, d.u_lp, d.u_h1);
    [
        b.powi(4),
        c.powi(4),
        a.powi(4),
        b.powi(4) * c.powi(4),
        (1.0 + a.powi(4)) * c.powi(8),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GValues {
    pub g1: f64,
    pub g2: f64,
    /// `G1 exp(G2)`; may overflow to infinity, see `ln_g`.
    pub g: f64,
    /// `ln G = ln G1 + G2` (`-inf` when `G1 = 0`).
    pub ln_g: f64,
}

pub fn compute_g(d: &DataNorms) -> GValues {
    let g1: f64 = g1_terms(d).iter().sum();
    let g2: f64 = g2_terms(d).iter().sum();
    GValues {
        g1,
        g2,
        g: g1 * g2.exp(),
        ln_g: g1.ln() + g2,
    }
}

/// Symbolic constants of the smallness condition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmallnessConstants {
    /// `C` in `K`.
    pub c: f64,
    /// `C0` in the double exponential.
    pub c0_exp: f64,
    /// `c0` in the threshold `c0 mu0`.
    pub c0_small: f64,
    pub eta: f64,
}

impl Default for SmallnessConstants {
    fn default() -> Self {
        SmallnessConstants {
            c: 1.0,
            c0_exp: 1.0,
            c0_small: 0.01,
            eta: 1.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmallnessReport {
    pub norms: DataNorms,
    pub k: f64,
    pub g: GValues,
    /// `||mu(rho0) - mu0||_{B^{(eta+1) ln}_{inf,1}}`
    pub besov_factor: f64,
    pub lhs: f64,
    /// `ln lhs`, finite even when `lhs` overflows.
    pub ln_lhs: f64,
    pub threshold: f64,
    pub pass: bool,
    pub mu0: f64,
    pub constants: SmallnessConstants,
}

impl SmallnessReport {
    /// `threshold - lhs`.
    pub fn margin(&self) -> f64 {
        self.threshold - self.lhs
    }
}

/// Evaluates
/// `||mu(rho0) - mu0||_{B^{(eta+1)ln}} ((1+mu0) G / mu0)^{eta+1} exp((eta+1) exp(C0 ||u0||_2^4))`
/// against `c0 mu0`.
pub fn check_smallness(
    rho0: &DensityField,
    u0: &VelocityField,
    law: &ViscosityLaw,
    p: f64,
    k: SmallnessConstants,
) -> Result<SmallnessReport> {
    if !(k.eta > 1.0) {
        return Err(invalid("eta", format!("{} must exceed 1", k.eta)));
    }
    if !(k.c > 0.0 && k.c0_exp > 0.0 && k.c0_small > 0.0) {
        return Err(invalid("constants", "C, C0 and c0 must be positive"));
    }
    let norms = DataNorms::measure(rho0, u0, p)?;
    let mu0 = law.mu0();
    let dmu = rho0.map(|r| law.eval(r) - mu0);
    let dmu = SpectralField::from_nodal(*rho0.grid(), &dmu)?;
    let besov_factor = log_besov_norm(&dmu, k.eta + 1.0)?;
    let g = compute_g(&norms);
    let e1 = k.eta + 1.0;
    let ln_lhs = besov_factor.ln() + e1 * (((1.0 + mu0) / mu0).ln() + g.ln_g) + e1 * (k.c0_exp * norms.u_l2.powi(4)).exp();
    let lhs = if besov_factor == 0.0 || g.g1 == 0.0 {
        0.0
    } else {
        besov_factor * ((1.0 + mu0) * g.g / mu0).powf(e1) * (e1 * (k.c0_exp * norms.u_l2.powi(4)).exp()).exp()
    };
    let threshold = k.c0_small * mu0;
    let pass = if lhs.is_finite() { lhs <= threshold } else { ln_lhs <= threshold.ln() };
    Ok(SmallnessReport {
        norms,
        k: compute_k(&norms, k.c),
        g,
        besov_factor,
        lhs,
        ln_lhs,
        threshold,
        pass,
        mu0,
        constants: k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn unit() -> DataNorms {
        DataNorms { rho_dev: 0.0, u_lp: 1.0, u_h1: 1.0, u_l2: 1.0 }
    }

    #[test]
    fn term_tables_at_unit_norms() {
        assert_eq!(k_terms(&unit()), [1.0, 1.0, 0.0, 1.0, 1.0]);
        assert!((compute_k(&unit(), 1.0) - 4.0 * E).abs() < 1e-14);
        assert_eq!(g1_terms(&unit()), [0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(g2_terms(&unit()), [1.0, 1.0, 0.0, 1.0, 1.0]);
        let g = compute_g(&unit());
        assert_eq!((g.g1, g.g2), (5.0, 4.0));
        assert!((g.g - 5.0 * 4f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn zero_data_gives_zero_constants() {
        let z = DataNorms { rho_dev: 0.0, u_lp: 0.0, u_h1: 0.0, u_l2: 0.0 };
        assert_eq!(compute_k(&z, 1.0), 0.0);
        let g = compute_g(&z);
        assert_eq!((g.g1, g.g2, g.g), (0.0, 0.0, 0.0));
    }
}
