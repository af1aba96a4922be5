use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Density-dependent viscosity `mu(rho)`, normalised so that `mu(1) = mu0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViscosityLaw {
    /// `mu0 + slope (rho - 1)`
    Affine { mu0: f64, slope: f64 },
    /// `mu0 rho^gamma`
    Power { mu0: f64, gamma: f64 },
    /// Natural cubic spline through `(rho, mu)` knots; `mu0` is its value at 1.
    Table { rho: Vec<f64>, mu: Vec<f64> },
}

impl ViscosityLaw {
    pub fn constant(mu0: f64) -> Self {
        ViscosityLaw::Affine { mu0, slope: 0.0 }
    }

    /// Checks the law and its positivity on `[lo, hi]`.
    pub fn validate(&self, lo: f64, hi: f64) -> Result<()> {
        match self {
            ViscosityLaw::Affine { mu0, slope } => {
                if !(*mu0 > 0.0) || !slope.is_finite() {
                    return Err(invalid("viscosity", format!("affine law needs mu0 > 0, got {mu0}")));
                }
            }
            ViscosityLaw::Power { mu0, gamma } => {
                if !(*mu0 > 0.0) || !gamma.is_finite() {
                    return Err(invalid("viscosity", format!("power law needs mu0 > 0, got {mu0}")));
                }
                if !(lo > 0.0) {
                    return Err(invalid("viscosity", "power law needs positive density"));
                }
            }
            ViscosityLaw::Table { rho, mu } => {
                if rho.len() != mu.len() || rho.len() < 2 {
                    return Err(invalid("viscosity", "table needs matching rho/mu with at least two knots"));
                }
                if rho.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(invalid("viscosity", "table densities must increase strictly"));
                }
                if !(rho[0] <= 1.0 && 1.0 <= rho[rho.len() - 1]) {
                    return Err(invalid("viscosity", "table must bracket rho = 1"));
                }
            }
        }
        // sample the admissible range densely enough to catch spline dips
        for i in 0..=256 {
            let r = lo + (hi - lo) * i as f64 / 256.0;
            let m = self.eval(r);
            if !(m > 0.0) {
                return Err(invalid("viscosity", format!("mu({r}) = {m} is not positive")));
            }
        }
        Ok(())
    }

    /// `mu(1)`.
    pub fn mu0(&self) -> f64 {
        match self {
            ViscosityLaw::Affine { mu0, .. } | ViscosityLaw::Power { mu0, .. } => *mu0,
            ViscosityLaw::Table { .. } => self.eval(1.0),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            ViscosityLaw::Affine { mu0, slope } => mu0 + slope * (r - 1.0),
            ViscosityLaw::Power { mu0, gamma } => mu0 * r.powf(*gamma),
            ViscosityLaw::Table { rho, mu } => spline_eval(rho, mu, r),
        }
    }

    /// True when `mu` does not depend on density.
    pub fn is_constant(&self) -> bool {
        match self {
            ViscosityLaw::Affine { slope, .. } => *slope == 0.0,
            ViscosityLaw::Power { gamma, .. } => *gamma == 0.0,
            ViscosityLaw::Table { mu, .. } => mu.iter().all(|&m| m == mu[0]),
        }
    }
}

/// Second derivatives of the natural cubic spline (tridiagonal solve).
fn spline_moments(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    let mut diag = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut sup = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        diag[i] = 2.0 * (h0 + h1);
        sup[i] = h1;
        rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        if i > 1 {
            let w = h0 / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
    }
    for i in (1..n - 1).rev() {
        m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
    }
    m
}

fn spline_eval(x: &[f64], y: &[f64], r: f64) -> f64 {
    let n = x.len();
    // linear extrapolation outside the knots
    if r <= x[0] || r >= x[n - 1] {
        let (i, j) = if r <= x[0] { (0, 1) } else { (n - 2, n - 1) };
        let m = spline_moments(x, y);
        let h = x[j] - x[i];
        let slope = (y[j] - y[i]) / h
            + if r <= x[0] { -h * (2.0 * m[i] + m[j]) / 6.0 } else { h * (m[i] + 2.0 * m[j]) / 6.0 };
        let anchor = if r <= x[0] { i } else { j };
        return y[anchor] + slope * (r - x[anchor]);
    }
    let m = spline_moments(x, y);
    let i = x.partition_point(|&v| v <= r).saturating_sub(1).min(n - 2);
    let h = x[i + 1] - x[i];
    let a = (x[i + 1] - r) / h;
    let b = (r - x[i]) / h;
    a * y[i] + b * y[i + 1] + ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laws_are_normalised_at_unit_density() {
        let laws = [
            ViscosityLaw::Affine { mu0: 0.3, slope: 0.7 },
            ViscosityLaw::Power { mu0: 0.3, gamma: 1.5 },
            ViscosityLaw::Table { rho: vec![0.5, 1.0, 2.0], mu: vec![0.1, 0.3, 0.9] },
        ];
        for law in &laws {
            assert!((law.eval(1.0) - 0.3).abs() < 1e-15);
            assert!((law.mu0() - 0.3).abs() < 1e-15);
            law.validate(0.9, 1.1).unwrap();
        }
    }

    #[test]
    fn spline_reproduces_cubic_free_data_and_knots() {
        let x = vec![0.5, 0.8, 1.0, 1.3, 2.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let law = ViscosityLaw::Table { rho: x.clone(), mu: y.clone() };
        for r in [0.4, 0.55, 0.9, 1.0, 1.7, 2.3] {
            assert!((law.eval(r) - (2.0 * r + 1.0)).abs() < 1e-12);
        }
        let curved = ViscosityLaw::Table { rho: x.clone(), mu: vec![1.0, 0.2, 0.9, 0.4, 1.1] };
        for (a, b) in x.iter().zip([1.0, 0.2, 0.9, 0.4, 1.1]) {
            assert!((curved.eval(*a) - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_nonpositive_viscosity() {
        assert!(ViscosityLaw::Affine { mu0: 0.1, slope: 1.0 }.validate(0.5, 1.5).is_err());
        assert!(ViscosityLaw::Affine { mu0: -1.0, slope: 0.0 }.validate(0.5, 1.5).is_err());
        assert!(ViscosityLaw::Table { rho: vec![1.5, 2.0], mu: vec![1.0, 1.0] }
            .validate(1.0, 1.0)
            .is_err());
    }
}
