//! Differential operators and Fourier-multiplier projectors.

use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::Grid;
use super::velocity::VelocityField;
use crate::error::{invalid, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn to_spectral(nodal: &[f64], grid: Grid) -> Result<SpectralField> {
    SpectralField::from_nodal(grid, nodal)
}

pub fn to_physical(f: &SpectralField) -> Vec<f64> {
    f.to_nodal()
}

/// Partial derivative along `axis` (0 = x, 1 = y).
pub fn derivative(f: &SpectralField, axis: usize) -> SpectralField {
    let g = *f.grid();
    f.apply(|i| {
        let (a, b) = g.xi_odd(i);
        I * if axis == 0 { a } else { b }
    })
}

pub fn gradient(f: &SpectralField) -> (SpectralField, SpectralField) {
    (derivative(f, 0), derivative(f, 1))
}

pub fn divergence(v1: &SpectralField, v2: &SpectralField) -> SpectralField {
    let mut d = derivative(v1, 0);
    d += &derivative(v2, 1);
    d
}

pub fn laplacian(f: &SpectralField) -> SpectralField {
    let g = *f.grid();
    f.apply(|i| Complex64::new(-g.xi_norm_sq(i), 0.0))
}

/// `e^{nu t Delta} f`.
pub fn heat(f: &SpectralField, nu_t: f64) -> SpectralField {
    let g = *f.grid();
    f.apply(|i| Complex64::new((-nu_t * g.xi_norm_sq(i)).exp(), 0.0))
}

/// Solves `Delta psi = f` for the mean-free part; the `k = 0` output is zero.
pub fn inverse_laplacian(f: &SpectralField) -> SpectralField {
    let g = *f.grid();
    f.apply(|i| {
        let k2 = g.xi_norm_sq(i);
        if k2 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(-1.0 / k2, 0.0)
        }
    })
}

/// Gradient projector `Q = grad Delta^{-1} div` applied to `(v1, v2)`.
pub fn gradient_part(v1: &SpectralField, v2: &SpectralField) -> Result<(SpectralField, SpectralField)> {
    v1.check_grid(v2)?;
    let g = *v1.grid();
    let mut q1 = SpectralField::zeros(g);
    let mut q2 = SpectralField::zeros(g);
    {
        let (c1, c2) = (v1.coeffs(), v2.coeffs());
        let o1 = q1.coeffs_mut();
        for i in 0..g.len() {
            let (a, b) = g.xi_odd(i);
            let k2 = a * a + b * b;
            if k2 > 0.0 {
                let dot = (c1[i] * a + c2[i] * b) / k2;
                o1[i] = dot * a;
            }
        }
        let o2 = q2.coeffs_mut();
        for i in 0..g.len() {
            let (a, b) = g.xi_odd(i);
            let k2 = a * a + b * b;
            if k2 > 0.0 {
                let dot = (c1[i] * a + c2[i] * b) / k2;
                o2[i] = dot * b;
            }
        }
    }
    Ok((q1, q2))
}

/// Leray projector `P = I - Q`. Modes with vanishing (odd) wavevector, in
/// particular `k = 0`, pass through unchanged.
pub fn leray_project(v1: &SpectralField, v2: &SpectralField) -> Result<VelocityField> {
    let (q1, q2) = gradient_part(v1, v2)?;
    Ok(VelocityField::from_parts(v1 - &q1, v2 - &q2))
}

/// Riesz transform `R_axis = d_axis (-Delta)^{-1/2}`, multiplier `i xi_axis / |xi|`.
/// The `k = 0` output is zero.
pub fn riesz(f: &SpectralField, axis: usize) -> SpectralField {
    let g = *f.grid();
    f.apply(|i| {
        let (a, b) = g.xi_odd(i);
        let norm = (a * a + b * b).sqrt();
        if norm == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            I * (if axis == 0 { a } else { b }) / norm
        }
    })
}

/// Validated Lebesgue exponent; `f64::INFINITY` selects the sup norm.
fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(invalid("p", format!("Lebesgue exponent {p} < 1")))
    }
}

/// `L^p` norm of nodal values by the rectangle rule with weight `(l/n)^2`.
pub fn lp_norm_nodal(nodal: &[f64], grid: &Grid, p: f64) -> Result<f64> {
    check_p(p)?;
    if p.is_infinite() {
        return Ok(nodal.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    let w = grid.cell_area();
    let s: f64 = if p == 2.0 {
        nodal.iter().map(|v| v * v).sum()
    } else if p == 1.0 {
        nodal.iter().map(|v| v.abs()).sum()
    } else {
        nodal.iter().map(|v| v.abs().powf(p)).sum()
    };
    Ok((w * s).powf(1.0 / p))
}

pub fn lp_norm(f: &SpectralField, p: f64) -> Result<f64> {
    check_p(p)?;
    lp_norm_nodal(&f.to_nodal(), f.grid(), p)
}

/// `H^s` norm with multiplier `(1 + |xi|^2)^{s/2}`.
pub fn sobolev_norm(f: &SpectralField, s: f64) -> f64 {
    let g = *f.grid();
    let sum: f64 = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| (1.0 + g.xi_norm_sq(i)).powf(s) * c.norm_sqr())
        .sum();
    (g.area() * sum).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_field;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Grid {
        Grid::new(n, 2.0 * PI).unwrap()
    }

    fn rel_err(a: &SpectralField, b: &SpectralField) -> f64 {
        (a - b).l2_norm() / b.l2_norm().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn constant_field_has_only_mean() {
        let g = grid(16);
        let f = to_spectral(&vec![3.5; g.len()], g).unwrap();
        assert!((f.coeffs()[0].re - 3.5).abs() < 1e-14);
        assert!(f.coeffs()[1..].iter().all(|c| c.norm() < 1e-14));
    }

    #[test]
    fn cosine_has_two_half_coefficients() {
        let g = Grid::new(32, 3.0).unwrap();
        let f = SpectralField::from_fn(g, |x, _| (2.0 * PI * x / 3.0).cos());
        for (i, c) in f.coeffs().iter().enumerate() {
            let k = g.k_of(i);
            if k == (1, 0) || k == (-1, 0) {
                assert!((c - Complex64::new(0.5, 0.0)).norm() < 1e-14);
            } else {
                assert!(c.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let g = grid(16);
        assert!(to_spectral(&[1.0; 10], g).is_err());
    }

    #[test]
    fn round_trip_is_identity() {
        let g = grid(64);
        let nodal: Vec<f64> = random_field(g, 7, 30.0).to_nodal();
        let back = to_physical(&to_spectral(&nodal, g).unwrap());
        let num: f64 = nodal.iter().zip(&back).map(|(a, b)| (a - b).powi(2)).sum();
        let den: f64 = nodal.iter().map(|a| a * a).sum();
        assert!((num / den).sqrt() < 1e-12);
        assert!(to_spectral(&nodal, g).unwrap().hermitian_defect() < 1e-12);
    }

    #[test]
    fn gradient_of_sine_and_constant() {
        let l = 5.0;
        let g = Grid::new(32, l).unwrap();
        let k = 2.0 * PI / l;
        let f = SpectralField::from_fn(g, |x, _| (k * x).sin());
        let (dx, dy) = gradient(&f);
        let expect = SpectralField::from_fn(g, |x, _| k * (k * x).cos());
        assert!(rel_err(&dx, &expect) < 1e-13);
        assert!(dy.l2_norm() < 1e-13);
        let (cx, cy) = gradient(&SpectralField::constant(g, 2.0));
        assert!(cx.is_zero() && cy.is_zero());
    }

    #[test]
    fn gradient_matches_centred_differences() {
        // band-limited field, sixth-order centred differences as the oracle
        let g = grid(256);
        let f = random_field(g, 3, 6.0);
        let nodal = f.to_nodal();
        let n = g.n();
        let h = g.dx();
        let mut fd = vec![0.0; g.len()];
        for iy in 0..n {
            for ix in 0..n {
                let at = |d: isize| nodal[iy * n + ((ix as isize + d).rem_euclid(n as isize) as usize)];
                fd[iy * n + ix] = (45.0 * (at(1) - at(-1)) - 9.0 * (at(2) - at(-2)) + (at(3) - at(-3))) / (60.0 * h);
            }
        }
        let spec = derivative(&f, 0).to_nodal();
        let num: f64 = fd.iter().zip(&spec).map(|(a, b)| (a - b).powi(2)).sum();
        let den: f64 = spec.iter().map(|a| a * a).sum();
        assert!((num / den).sqrt() < 1e-6, "{}", (num / den).sqrt());
    }

    #[test]
    fn leray_kills_gradients_and_keeps_solenoidal() {
        let g = grid(64);
        let q = random_field(g, 11, 20.0);
        let (gx, gy) = gradient(&q);
        let p = leray_project(&gx, &gy).unwrap();
        assert!(p.u1().l2_norm() < 1e-12 * gx.l2_norm());
        assert!(p.u2().l2_norm() < 1e-12 * gx.l2_norm());

        let psi = random_field(g, 12, 20.0);
        let (a, b) = gradient(&psi);
        let v = VelocityField::from_parts(-&b, a);
        let pv = leray_project(v.u1(), v.u2()).unwrap();
        assert!(rel_err(pv.u1(), v.u1()) < 1e-12);
        assert!(rel_err(pv.u2(), v.u2()) < 1e-12);
    }

    #[test]
    fn projector_complement_and_mean_passthrough() {
        let g = grid(64);
        let v1 = random_field(g, 1, 20.0);
        let v2 = random_field(g, 2, 20.0);
        let p = leray_project(&v1, &v2).unwrap();
        let (q1, q2) = gradient_part(&v1, &v2).unwrap();
        assert!(rel_err(&(p.u1() + &q1), &v1) < 1e-12);
        assert!(rel_err(&(p.u2() + &q2), &v2) < 1e-12);
        assert_eq!(p.u1().coeffs()[0], v1.coeffs()[0]);
        assert!(divergence(p.u1(), p.u2()).l2_norm() < 1e-10 * p.grad_l2_norm());
    }

    #[test]
    fn riesz_single_mode_and_symbol_identity() {
        let g = grid(32);
        let f = SpectralField::from_fn(g, |x, _| x.cos());
        let r1 = riesz(&f, 0);
        let r2 = riesz(&f, 1);
        assert!((r1.l2_norm() - f.l2_norm()).abs() < 1e-12);
        assert!(r2.l2_norm() < 1e-14);

        let mut h = random_field(grid(128), 5, 50.0);
        h.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
        let mut sum = riesz(&riesz(&h, 0), 0);
        sum += &riesz(&riesz(&h, 1), 1);
        assert!(rel_err(&sum, &(-&h)) < 1e-12);
    }

    #[test]
    fn lp_norms_of_constants_and_modes() {
        let l = 3.0;
        let g = Grid::new(32, l).unwrap();
        let c = SpectralField::constant(g, -2.0);
        for p in [1.0, 1.5, 2.0, 4.0] {
            let expect = 2.0 * l.powf(2.0 / p);
            assert!((lp_norm(&c, p).unwrap() - expect).abs() < 1e-12 * expect);
        }
        assert!((lp_norm(&c, f64::INFINITY).unwrap() - 2.0).abs() < 1e-14);
        assert!(lp_norm(&c, 0.5).is_err());

        let k = 2.0 * PI / l * 3.0;
        let m = SpectralField::from_fn(g, |x, _| (k * x).cos());
        let s = 0.7;
        let h = sobolev_norm(&m, s);
        let expect = ((1.0 + k * k).powf(s)).sqrt() * m.l2_norm();
        assert!((h - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn parseval_nodal_equals_spectral() {
        let g = Grid::new(64, 7.0).unwrap();
        let f = random_field(g, 9, 10.0);
        let nodal = lp_norm(&f, 2.0).unwrap();
        assert!((nodal - f.l2_norm()).abs() < 1e-10 * nodal);
    }
}
