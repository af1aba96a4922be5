use crate::besov::{besov_norm, bony_decompose, BesovSpec};
use crate::error::{invalid, Result};
use crate::spectral::SpectralField;

const B0_INF_2: BesovSpec = BesovSpec::Classical { s: 0.0, p: f64::INFINITY, r: 2.0 };

/// Product law `||ab||_{B^0_{inf,2}} <= C ||a||_{B^{eta ln}_{inf,1}} ||b||_{B^0_{inf,2}}`
/// measured on one pair.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductLawReport {
    pub eta: f64,
    pub ratio: f64,
    pub product_norm: f64,
    pub a_log_norm: f64,
    pub b_norm: f64,
    /// `B^0_{inf,2}` norms of `T_a b`, `T_b a` and `R(a, b)`.
    pub t_ab_norm: f64,
    pub t_ba_norm: f64,
    pub r_ab_norm: f64,
    /// `eta > 1`. Below that the ratio is reported but carries no bound.
    pub hypothesis_holds: bool,
}

pub fn product_law_check(a: &SpectralField, b: &SpectralField, eta: f64) -> Result<ProductLawReport> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(invalid("eta", format!("{eta} must be positive")));
    }
    let parts = bony_decompose(a, b)?;
    let product_norm = besov_norm(&parts.total(), B0_INF_2);
    let a_log_norm = besov_norm(a, BesovSpec::Logarithmic { eta });
    let b_norm = besov_norm(b, B0_INF_2);
    let denom = a_log_norm * b_norm;
    Ok(ProductLawReport {
        eta,
        ratio: if denom > 0.0 { product_norm / denom } else { 0.0 },
        product_norm,
        a_log_norm,
        b_norm,
        t_ab_norm: besov_norm(&parts.t_ab, B0_INF_2),
        t_ba_norm: besov_norm(&parts.t_ba, B0_INF_2),
        r_ab_norm: besov_norm(&parts.r_ab, B0_INF_2),
        hypothesis_holds: eta > 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_field;
    use crate::spectral::Grid;

    #[test]
    fn unit_constant_gives_ratio_one() {
        let g = Grid::new(64, 2.0 * std::f64::consts::PI).unwrap();
        let b = random_field(g, 3, 8.0);
        let r = product_law_check(&SpectralField::constant(g, 1.0), &b, 1.5).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-10, "{}", r.ratio);
    }

    #[test]
    fn zero_factor_gives_zero() {
        let g = Grid::new(32, 1.0).unwrap();
        let a = random_field(g, 1, 5.0);
        let r = product_law_check(&a, &SpectralField::zeros(g), 1.5).unwrap();
        assert_eq!(r.ratio, 0.0);
        assert!(!product_law_check(&a, &a, 0.5).unwrap().hypothesis_holds);
    }
}
