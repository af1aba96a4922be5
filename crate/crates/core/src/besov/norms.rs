use serde::{Deserialize, Serialize};

use super::dyadic::DyadicDecomposition;
use crate::error::{invalid, Result};
use crate::spectral::{lp_norm_nodal, SpectralField};

/// Which Besov norm to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BesovSpec {
    /// `B^s_{p,r}`: `l^r` norm of `2^{js} ||Delta_j u||_{L^p}`.
    Classical { s: f64, p: f64, r: f64 },
    /// `B^{eta ln}_{inf,1}`: `sum_j (2+j)^eta ||Delta_j u||_{L^inf}`.
    Logarithmic { eta: f64 },
}

impl BesovSpec {
    pub fn classical(s: f64, p: f64, r: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(invalid("p", format!("{p} < 1")));
        }
        if !(r >= 1.0) {
            return Err(invalid("r", format!("{r} < 1")));
        }
        if !s.is_finite() {
            return Err(invalid("s", "must be finite"));
        }
        Ok(BesovSpec::Classical { s, p, r })
    }

    pub fn logarithmic(eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(invalid("eta", format!("{eta} must be positive")));
        }
        Ok(BesovSpec::Logarithmic { eta })
    }
}

/// `||Delta_j f||_{L^p}` for `j = -1..=J_max`.
pub fn block_norms(dec: &DyadicDecomposition, p: f64) -> Vec<f64> {
    dec.blocks()
        .iter()
        .map(|b| lp_norm_nodal(&b.to_nodal(), dec.grid(), p).expect("p validated by caller"))
        .collect()
}

/// `l^r` norm of a finite sequence; `r = inf` gives the max.
pub fn sequence_norm(seq: impl IntoIterator<Item = f64>, r: f64) -> f64 {
    if r.is_infinite() {
        seq.into_iter().fold(0.0, |m, v| m.max(v.abs()))
    } else {
        seq.into_iter().map(|v| v.abs().powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// Besov norm evaluated from precomputed `L^p` block norms.
pub fn norm_from_blocks(block_norms: &[f64], spec: BesovSpec) -> f64 {
    let js = (0..block_norms.len()).map(|i| i as i32 - 1);
    match spec {
        BesovSpec::Classical { s, r, .. } => {
            sequence_norm(js.zip(block_norms).map(|(j, b)| 2f64.powf(j as f64 * s) * b), r)
        }
        BesovSpec::Logarithmic { eta } => js
            .zip(block_norms)
            .map(|(j, b)| (2.0 + j as f64).powf(eta) * b)
            .sum(),
    }
}

pub fn besov_norm(f: &SpectralField, spec: BesovSpec) -> f64 {
    besov_norm_of(&DyadicDecomposition::new(f), spec)
}

pub fn besov_norm_of(dec: &DyadicDecomposition, spec: BesovSpec) -> f64 {
    let p = match spec {
        BesovSpec::Classical { p, .. } => p,
        BesovSpec::Logarithmic { .. } => f64::INFINITY,
    };
    norm_from_blocks(&block_norms(dec, p), spec)
}

/// `||f||_{B^{eta ln}_{inf,1}}`.
pub fn log_besov_norm(f: &SpectralField, eta: f64) -> Result<f64> {
    Ok(besov_norm(f, BesovSpec::logarithmic(eta)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_field;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    #[test]
    fn zero_field_has_zero_norm() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        let z = SpectralField::zeros(g);
        assert_eq!(besov_norm(&z, BesovSpec::Logarithmic { eta: 1.5 }), 0.0);
        assert_eq!(besov_norm(&z, BesovSpec::classical(1.0, 2.0, 2.0).unwrap()), 0.0);
    }

    #[test]
    fn single_low_block_field() {
        // l = 4 pi puts the k = 1 mode at |xi| = 1/2, inside Delta_{-1} only
        let g = Grid::new(32, 4.0 * PI).unwrap();
        let a = 1.7;
        let f = SpectralField::from_fn(g, |x, _| a * (0.5 * x).cos());
        for s in [0.0, 0.5, 2.0] {
            for r in [1.0, 2.0, f64::INFINITY] {
                let v = besov_norm(&f, BesovSpec::classical(s, f64::INFINITY, r).unwrap());
                assert!((v - 2f64.powf(-s) * a).abs() < 1e-12, "s={s} r={r} v={v}");
            }
        }
        let v = besov_norm(&f, BesovSpec::Logarithmic { eta: 2.3 });
        assert!((v - a).abs() < 1e-12);
    }

    #[test]
    fn spec_validation() {
        assert!(BesovSpec::classical(0.0, 0.5, 1.0).is_err());
        assert!(BesovSpec::classical(0.0, 1.0, 0.9).is_err());
        assert!(BesovSpec::logarithmic(0.0).is_err());
        assert!(BesovSpec::logarithmic(1.0).is_ok());
    }

    #[test]
    fn embedding_chain_on_random_fields() {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        for seed in 0..5 {
            let f = random_field(g, seed, 25.0);
            let dec = DyadicDecomposition::new(&f);
            let b = block_norms(&dec, f64::INFINITY);
            let zero = norm_from_blocks(&b, BesovSpec::Classical { s: 0.0, p: f64::INFINITY, r: 1.0 });
            let log = norm_from_blocks(&b, BesovSpec::Logarithmic { eta: 1.5 });
            let eps = norm_from_blocks(&b, BesovSpec::Classical { s: 0.1, p: f64::INFINITY, r: 1.0 });
            assert!(zero <= log);
            // brute-force embedding constant for B^0.1 in B^{1.5 ln}: max_j (2+j)^1.5 / 2^{0.1 j}
            let c = (-1..=dec.j_max())
                .map(|j| (2.0 + j as f64).powf(1.5) / 2f64.powf(0.1 * j as f64))
                .fold(0.0, f64::max);
            assert!(log <= c * eps * (1.0 + 1e-12));
        }
    }
}
