//! Measured ratios for the Bernstein and heat-block inequalities.

use num_complex::Complex64;

use super::dyadic::phi;
use crate::error::{invalid, Result};
use crate::spectral::{heat, lp_norm, SpectralField};

/// `||d^alpha f||_{L^q} / (2^{j|alpha| + 2j(1/p - 1/q)} ||f||_{L^p})`.
///
/// A zero field reports 0.
pub fn verify_bernstein(f: &SpectralField, j: i32, p: f64, q: f64, order: (u32, u32)) -> Result<f64> {
    if p > q {
        return Err(invalid("p", format!("p = {p} exceeds q = {q}")));
    }
    let g = *f.grid();
    let deriv = f.apply(|i| {
        let (a, b) = g.xi_odd(i);
        Complex64::new(0.0, a).powu(order.0) * Complex64::new(0.0, b).powu(order.1)
    });
    let denom_norm = lp_norm(f, p)?;
    if denom_norm == 0.0 {
        return Ok(0.0);
    }
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    let alpha = (order.0 + order.1) as f64;
    let scale = 2f64.powf(j as f64 * alpha + 2.0 * j as f64 * (inv(p) - inv(q)));
    Ok(lp_norm(&deriv, q)? / (scale * denom_norm))
}

/// `phi(lambda^{-1} D) f`.
pub fn annulus_filter(f: &SpectralField, lambda: f64) -> SpectralField {
    f.apply_real(|a, b| phi((a * a + b * b).sqrt() / lambda))
}

/// `||e^{t Delta} g||_{L^p} / ||g||_{L^p}` with `g = phi(lambda^{-1} D) f`.
pub fn heat_block_decay_p(f: &SpectralField, lambda: f64, t: f64, p: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(invalid("t", "negative time"));
    }
    if !(lambda > 0.0) {
        return Err(invalid("lambda", "must be positive"));
    }
    let g = annulus_filter(f, lambda);
    let den = lp_norm(&g, p)?;
    if den == 0.0 {
        return Ok(if t == 0.0 { 1.0 } else { 0.0 });
    }
    Ok(lp_norm(&heat(&g, t), p)? / den)
}

/// The `L^2` version of [`heat_block_decay_p`].
pub fn heat_block_decay(f: &SpectralField, lambda: f64, t: f64) -> Result<f64> {
    heat_block_decay_p(f, lambda, t, 2.0)
}

/// `(e^{-t (8 lambda/3)^2}, e^{-t (3 lambda/4)^2})`: the `L^2` ratio bracket
/// implied by the annulus support.
pub fn heat_block_bracket(lambda: f64, t: f64) -> (f64, f64) {
    let hi = 8.0 * lambda / 3.0;
    let lo = 3.0 * lambda / 4.0;
    ((-t * hi * hi).exp(), (-t * lo * lo).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_field;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    #[test]
    fn bernstein_trivia() {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        assert_eq!(verify_bernstein(&SpectralField::zeros(g), 2, 2.0, 2.0, (1, 0)).unwrap(), 0.0);
        assert!(verify_bernstein(&random_field(g, 1, 5.0), 2, 4.0, 2.0, (0, 0)).is_err());
        // single mode |xi| = 2^j along a diagonal: ratio = |xi_1| / 2^j
        let f = SpectralField::from_fn(g, |x, y| (3.0 * x + 4.0 * y).cos()); // |xi| = 5
        let r = verify_bernstein(&f, 2, 2.0, 2.0, (1, 0)).unwrap();
        assert!((r - 3.0 / 4.0).abs() < 1e-12);
        assert!(verify_bernstein(&f, 2, 2.0, 2.0, (0, 1)).unwrap() <= 5.0 / 4.0 + 1e-12);
    }

    #[test]
    fn heat_ratio_edges() {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        let f = random_field(g, 2, 20.0);
        assert!((heat_block_decay(&f, 8.0, 0.0).unwrap() - 1.0).abs() < 1e-14);
        // single mode |xi| = lambda, where phi(1) > 0
        let m = SpectralField::from_fn(g, |x, _| (8.0 * x).cos());
        let t = 0.003;
        let r = heat_block_decay(&m, 8.0, t).unwrap();
        assert!((r - (-t * 64.0f64).exp()).abs() < 1e-12);
        assert!(heat_block_decay(&f, 8.0, -1.0).is_err());
    }

    #[test]
    fn random_annulus_field_inside_bracket() {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        let f = random_field(g, 3, 25.0);
        let (lo, hi) = heat_block_bracket(8.0, 0.01);
        let r = heat_block_decay(&f, 8.0, 0.01).unwrap();
        assert!(lo <= r && r <= hi, "{lo} <= {r} <= {hi}");
    }
}
