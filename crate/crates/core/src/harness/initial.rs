use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::random::{random_field_in, set_hermitian, stream_rng, Stream};
use crate::solver::DensityField;
use crate::spectral::{lp_norm_nodal, sobolev_norm, unitary_scale, Grid, SpectralField, VelocityField};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regularity {
    /// Spectrum cut off at `k_c`.
    H1,
    /// Adds a tail `|xi|^{-gamma}` beyond `k_c` with `gamma = (3 + alpha)/2`,
    /// which lies in `H^alpha` but not in `H^1` on the plane.
    HAlpha { alpha: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectralProfile {
    /// `|u_hat| = A` on `|xi| <= k_c`.
    FlatDisk { k_c: f64 },
    /// `|u_hat| = A (|xi|/k_c)^sigma` on `|xi| <= k_c`, `-1 < sigma <= 0`.
    Power { sigma: f64, k_c: f64 },
}

impl SpectralProfile {
    pub fn k_c(&self) -> f64 {
        match *self {
            SpectralProfile::FlatDisk { k_c } | SpectralProfile::Power { k_c, .. } => k_c,
        }
    }

    /// Exponent `p` for which the low-frequency behaviour matches an `L^p`
    /// datum: `|u_hat|^2 ~ |xi|^{2 sigma}` gives `2 beta(p) = 1 + sigma`.
    pub fn p_effective(&self) -> f64 {
        match *self {
            SpectralProfile::FlatDisk { .. } => 1.0,
            SpectralProfile::Power { sigma, .. } => 2.0 / (2.0 + sigma),
        }
    }
}

/// Admissible initial velocity description. The seed is supplied by the run
/// configuration and is not part of the serialised table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialDataSpec {
    pub target_p: f64,
    pub regularity: Regularity,
    pub amplitude: f64,
    pub profile: SpectralProfile,
    #[serde(skip)]
    pub seed: u64,
}

/// `beta(p) = (2/p - 1)/2`.
pub fn beta(p: f64) -> f64 {
    0.5 * (2.0 / p - 1.0)
}

impl InitialDataSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_p > 1.0 && self.target_p < 2.0) {
            return Err(invalid("initial.target_p", "must lie in (1, 2)"));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(invalid("initial.amplitude", "must be nonnegative"));
        }
        if !(self.profile.k_c() > 0.0) {
            return Err(invalid("initial.profile.k_c", "must be positive"));
        }
        if let SpectralProfile::Power { sigma, .. } = self.profile {
            if !(sigma > -1.0 && sigma <= 0.0) {
                return Err(invalid("initial.profile.sigma", "must lie in (-1, 0]"));
            }
        }
        if let Regularity::HAlpha { alpha } = self.regularity {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(invalid("initial.regularity.alpha", "must lie in (0, 1)"));
            }
        }
        Ok(())
    }

    /// `|u_hat(xi)| / A`.
    pub fn profile_at(&self, r: f64) -> f64 {
        let k_c = self.profile.k_c();
        if r <= k_c {
            match self.profile {
                SpectralProfile::FlatDisk { .. } => 1.0,
                SpectralProfile::Power { sigma, .. } => (r / k_c).powf(sigma),
            }
        } else {
            match self.regularity {
                Regularity::H1 => 0.0,
                Regularity::HAlpha { alpha } => (r / k_c).powf(-(3.0 + alpha) / 2.0),
            }
        }
    }
}

/// `u0 = grad^perp psi` with random phases and `|u_hat(xi)| = A profile(|xi|)`
/// on every retained mode (unitary transform convention). Only modes kept by
/// the dealiasing mask are populated.
pub fn gen_initial_velocity(spec: &InitialDataSpec, grid: &Grid) -> Result<VelocityField> {
    spec.validate()?;
    let k0 = grid.k0();
    let k_c = spec.profile.k_c();
    let cut = (grid.dealias_fraction() * (grid.n() / 2) as f64).floor() as i64;
    if k_c < k0 {
        return Err(invalid("initial.profile.k_c", format!("{k_c} is below the box wavenumber {k0}")));
    }
    if k_c > cut as f64 * k0 {
        return Err(invalid(
            "initial.profile.k_c",
            format!("{k_c} exceeds the dealiased band {}", cut as f64 * k0),
        ));
    }
    let k_lim = match spec.regularity {
        Regularity::H1 => k_c / k0,
        Regularity::HAlpha { .. } => cut as f64 * 2f64.sqrt(),
    };
    let scale = spec.amplitude / unitary_scale(grid);
    let mut rng = stream_rng(spec.seed, Stream::InitialVelocity);
    let mut psi = SpectralField::zeros(*grid);
    let kc = k_lim.floor() as i64;
    for ky in 0..=kc.min(cut) {
        for kx in -kc.min(cut)..=kc.min(cut) {
            if ky == 0 && kx <= 0 {
                continue;
            }
            let k2 = (kx * kx + ky * ky) as f64;
            if k2 > k_lim * k_lim * (1.0 + 1e-12) {
                continue;
            }
            let theta = rng.random_range(0.0..2.0 * PI);
            let r = k0 * k2.sqrt();
            let m = scale * spec.profile_at(r) / r;
            set_hermitian(&mut psi, (kx, ky), Complex64::from_polar(m, theta));
        }
    }
    Ok(VelocityField::from_stream_function(&psi))
}

/// `rho0 = 1 + contrast * phi / max|phi|` with `phi` a mean-free random field
/// on integer modes `|k| <= k_cut`. `contrast = 0` gives `rho0 = 1`.
pub fn gen_initial_density(grid: &Grid, seed: u64, contrast: f64, k_cut: f64) -> Result<DensityField> {
    if !(contrast >= 0.0 && contrast < 1.0) {
        return Err(invalid("density_contrast", "must lie in [0, 1)"));
    }
    if contrast == 0.0 {
        return DensityField::constant(*grid, 1.0);
    }
    let mut phi = random_field_in(*grid, seed, k_cut, Stream::InitialDensity);
    phi.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
    let nodal = phi.to_nodal();
    let peak = nodal.iter().map(|v| v.abs()).fold(0.0, f64::max);
    DensityField::new(*grid, nodal.iter().map(|v| 1.0 + contrast * v / peak).collect())
}

/// Norms of a generated datum.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialReport {
    pub p_effective: f64,
    pub beta: f64,
    pub l2: f64,
    /// `||u0||_{L^p}` at the target `p`.
    pub lp: f64,
    /// `||u0_hat||_{L^{p'}}`, `1/p + 1/p' = 1`, unitary convention.
    pub hat_lp_dual: f64,
    /// `sup |u0_hat|`.
    pub hat_sup: f64,
    pub h1: f64,
    pub h_alpha: Option<f64>,
}

fn vector_lp(u: &VelocityField, p: f64) -> Result<f64> {
    let g = *u.grid();
    let (a, b) = u.to_nodal();
    let m: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x * x + y * y).sqrt()).collect();
    lp_norm_nodal(&m, &g, p)
}

fn vector_sobolev(u: &VelocityField, s: f64) -> f64 {
    (sobolev_norm(u.u1(), s).powi(2) + sobolev_norm(u.u2(), s).powi(2)).sqrt()
}

/// Pointwise modulus of the unitary transform, one value per mode.
pub fn hat_modulus(u: &VelocityField) -> Vec<f64> {
    let s = unitary_scale(u.grid());
    u.u1()
        .coeffs()
        .iter()
        .zip(u.u2().coeffs())
        .map(|(a, b)| s * (a.norm_sqr() + b.norm_sqr()).sqrt())
        .collect()
}

pub fn initial_report(u0: &VelocityField, spec: &InitialDataSpec) -> Result<InitialReport> {
    let g = *u0.grid();
    let p = spec.target_p;
    let q = p / (p - 1.0);
    let hat = hat_modulus(u0);
    let dxi = g.k0() * g.k0();
    let hat_lp_dual = (hat.iter().map(|h| h.powf(q)).sum::<f64>() * dxi).powf(1.0 / q);
    Ok(InitialReport {
        p_effective: spec.profile.p_effective(),
        beta: beta(spec.profile.p_effective()),
        l2: u0.l2_norm(),
        lp: vector_lp(u0, p)?,
        hat_lp_dual,
        hat_sup: hat.iter().copied().fold(0.0, f64::max),
        h1: vector_sobolev(u0, 1.0),
        h_alpha: match spec.regularity {
            Regularity::HAlpha { alpha } => Some(vector_sobolev(u0, alpha)),
            Regularity::H1 => None,
        },
    })
}

/// `||u||_{L^p}` of the vector modulus.
pub fn velocity_lp_norm(u: &VelocityField, p: f64) -> Result<f64> {
    vector_lp(u, p)
}

/// `||u||_{H^s}` summed over components.
pub fn velocity_sobolev_norm(u: &VelocityField, s: f64) -> f64 {
    vector_sobolev(u, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(amplitude: f64) -> InitialDataSpec {
        InitialDataSpec {
            target_p: 1.2,
            regularity: Regularity::H1,
            amplitude,
            profile: SpectralProfile::FlatDisk { k_c: 1.0 },
            seed: 3,
        }
    }

    #[test]
    fn zero_amplitude_gives_zero_field() {
        let g = Grid::new(32, 20.0).unwrap();
        assert!(gen_initial_velocity(&spec(0.0), &g).unwrap().is_zero());
    }

    #[test]
    fn flat_disk_sup_equals_amplitude_and_is_solenoidal() {
        let g = Grid::new(64, 20.0).unwrap();
        let u = gen_initial_velocity(&spec(2.5), &g).unwrap();
        let r = initial_report(&u, &spec(2.5)).unwrap();
        assert!((r.hat_sup - 2.5).abs() < 1e-10 * 2.5);
        assert!(u.divergence().l2_norm() <= 1e-10 * u.grad_l2_norm());
        assert_eq!(r.p_effective, 1.0);
        assert!(r.hat_lp_dual > 0.0 && r.lp > 0.0 && r.h1 > r.l2);
    }

    #[test]
    fn same_seed_same_bits() {
        let g = Grid::new(32, 20.0).unwrap();
        let a = gen_initial_velocity(&spec(1.0), &g).unwrap();
        let b = gen_initial_velocity(&spec(1.0), &g).unwrap();
        assert_eq!(a, b);
        let mut other = spec(1.0);
        other.seed = 4;
        assert_ne!(a, gen_initial_velocity(&other, &g).unwrap());
    }

    #[test]
    fn incompatible_profiles_error() {
        let g = Grid::new(32, 20.0).unwrap();
        let mut s = spec(1.0);
        s.profile = SpectralProfile::FlatDisk { k_c: 0.1 };
        assert!(gen_initial_velocity(&s, &g).is_err());
        s.profile = SpectralProfile::FlatDisk { k_c: 10.0 };
        assert!(gen_initial_velocity(&s, &g).is_err());
    }

    #[test]
    fn h_alpha_tail_is_heavier() {
        let g = Grid::new(64, 20.0).unwrap();
        let mut s = spec(1.0);
        s.regularity = Regularity::HAlpha { alpha: 0.5 };
        let u = gen_initial_velocity(&s, &g).unwrap();
        let r = initial_report(&u, &s).unwrap();
        let plain = initial_report(&gen_initial_velocity(&spec(1.0), &g).unwrap(), &spec(1.0)).unwrap();
        assert!(r.h_alpha.unwrap() > 0.0);
        assert!(r.h1 > plain.h1);
    }

    #[test]
    fn density_has_requested_contrast() {
        let g = Grid::new(32, 20.0).unwrap();
        let rho = gen_initial_density(&g, 1, 0.05, 4.0).unwrap();
        let dev = rho.nodal().iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
        assert!((dev - 0.05).abs() < 1e-14);
        assert!((rho.mean() - 1.0).abs() < 1e-14);
        assert_eq!(gen_initial_density(&g, 1, 0.0, 4.0).unwrap().min(), 1.0);
    }
}
