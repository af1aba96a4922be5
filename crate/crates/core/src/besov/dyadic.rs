//! Littlewood-Paley blocks realised as exact Fourier multipliers.
//!
//! `chi` is a smooth radial cutoff equal to 1 on `|xi| <= 3/4` and 0 on
//! `|xi| >= 4/3`; the annulus function is `phi(xi) = chi(xi/2) - chi(xi)`,
//! supported in `3/4 <= |xi| <= 8/3`. Blocks are formed from differences of
//! dilated `chi`, so the sum over `j = -1..=J_max` telescopes to
//! `chi(2^{-J_max-1} xi) = 1` on every grid mode.

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::spectral::{Grid, SpectralField};

pub const INNER_RADIUS: f64 = 3.0 / 4.0;
pub const OUTER_RADIUS: f64 = 4.0 / 3.0;

fn bump(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// Smooth radial low-pass profile `chi(r)`.
pub fn chi(r: f64) -> f64 {
    if r <= INNER_RADIUS {
        return 1.0;
    }
    if r >= OUTER_RADIUS {
        return 0.0;
    }
    let s = (r - INNER_RADIUS) / (OUTER_RADIUS - INNER_RADIUS);
    let a = bump(1.0 - s);
    a / (a + bump(s))
}

/// Annulus profile `phi(r) = chi(r/2) - chi(r)`.
pub fn phi(r: f64) -> f64 {
    chi(r / 2.0) - chi(r)
}

/// Multiplier of `S_j`: `chi(2^{-j} |xi|)` for `j >= 0`, zero for `j < 0`.
pub fn low_pass_symbol(j: i32, r: f64) -> f64 {
    if j < 0 {
        0.0
    } else {
        chi(r / 2f64.powi(j))
    }
}

/// Multiplier of `Delta_j`.
pub fn block_symbol(j: i32, r: f64) -> f64 {
    if j == -1 {
        chi(r)
    } else {
        low_pass_symbol(j + 1, r) - low_pass_symbol(j, r)
    }
}

/// Smallest `j` with `2^j * 3/4 > k_max`; blocks above it vanish identically.
pub fn j_max(grid: &Grid) -> i32 {
    let k = grid.k_max();
    let mut j = -1;
    while 2f64.powi(j) * INNER_RADIUS <= k {
        j += 1;
    }
    j
}

/// `Delta_j f` for `-1 <= j <= J_max`.
pub fn dyadic_block(f: &SpectralField, j: i32) -> Result<SpectralField> {
    let jm = j_max(f.grid());
    if j < -1 || j > jm {
        return Err(Error::BlockOutOfRange { j, j_max: jm });
    }
    Ok(f.apply_real(|a, b| block_symbol(j, (a * a + b * b).sqrt())))
}

/// `S_j f = sum_{k <= j-1} Delta_k f`; zero for `j <= -1`, `f` itself once
/// `j > J_max`.
pub fn low_pass(f: &SpectralField, j: i32) -> SpectralField {
    if j > j_max(f.grid()) {
        return f.clone();
    }
    f.apply_real(|a, b| low_pass_symbol(j, (a * a + b * b).sqrt()))
}

/// Ordered blocks `Delta_j f`, `j = -1..=J_max`.
#[derive(Clone, Debug)]
pub struct DyadicDecomposition {
    grid: Grid,
    blocks: Vec<SpectralField>,
}

impl DyadicDecomposition {
    pub fn new(f: &SpectralField) -> Self {
        Self::with_execution(f, Execution::default())
    }

    pub fn with_execution(f: &SpectralField, exec: Execution) -> Self {
        let jm = j_max(f.grid());
        let blocks = exec.map_range(0..(jm + 2) as usize, |i| {
            dyadic_block(f, i as i32 - 1).expect("index within range")
        });
        DyadicDecomposition {
            grid: *f.grid(),
            blocks,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn j_max(&self) -> i32 {
        self.blocks.len() as i32 - 2
    }

    /// Block indices `-1..=J_max`.
    pub fn indices(&self) -> std::ops::RangeInclusive<i32> {
        -1..=self.j_max()
    }

    /// `Delta_j f`, or zero outside the stored range.
    pub fn block(&self, j: i32) -> SpectralField {
        if j < -1 || j > self.j_max() {
            SpectralField::zeros(self.grid)
        } else {
            self.blocks[(j + 1) as usize].clone()
        }
    }

    pub fn blocks(&self) -> &[SpectralField] {
        &self.blocks
    }

    /// Sum of all blocks.
    pub fn reconstruct(&self) -> SpectralField {
        let mut out = SpectralField::zeros(self.grid);
        for b in &self.blocks {
            out += b;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_field;
    use std::f64::consts::PI;

    #[test]
    fn profile_supports() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(0.75), 1.0);
        assert_eq!(chi(4.0 / 3.0), 0.0);
        assert!(chi(1.0) > 0.0 && chi(1.0) < 1.0);
        assert_eq!(phi(0.7), 0.0);
        assert_eq!(phi(8.0 / 3.0), 0.0);
        assert!(phi(1.5) > 0.0);
        // chi is nonincreasing so phi is nonnegative
        for i in 0..400 {
            let r = i as f64 * 0.01;
            assert!(phi(r) >= 0.0);
        }
    }

    #[test]
    fn mode_far_above_block_is_removed() {
        let g = Grid::new(128, 2.0 * PI).unwrap();
        // |xi| = 2^{j+4} = 32 for j = 1
        let f = SpectralField::from_fn(g, |x, _| (32.0 * x).cos());
        assert!(dyadic_block(&f, 1).unwrap().l2_norm() <= 1e-14 * f.l2_norm());
        assert!(dyadic_block(&f, 5).unwrap().l2_norm() > 0.0);
    }

    #[test]
    fn out_of_range_blocks_error() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        let f = SpectralField::zeros(g);
        assert!(dyadic_block(&f, -2).is_err());
        assert!(dyadic_block(&f, j_max(&g) + 1).is_err());
        assert!(dyadic_block(&f, j_max(&g)).unwrap().is_zero());
    }

    #[test]
    fn j_max_is_smallest_covering_index() {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        let j = j_max(&g);
        assert!(2f64.powi(j) * 0.75 > g.k_max());
        assert!(2f64.powi(j - 1) * 0.75 <= g.k_max());
    }

    #[test]
    fn low_pass_edges() {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        let f = random_field(g, 1, 30.0);
        assert!(low_pass(&f, -2).is_zero());
        assert!(low_pass(&f, -1).is_zero());
        assert_eq!(low_pass(&f, j_max(&g) + 3), f);
    }

    #[test]
    fn blocks_match_per_mode_oracle() {
        let g = Grid::new(64, 5.0).unwrap();
        let f = random_field(g, 2, 30.0);
        let dec = DyadicDecomposition::new(&f);
        // oracle: explicit bump evaluation per mode, written independently
        let cutoff = |r: f64| -> f64 {
            let (lo, hi) = (0.75, 4.0 / 3.0);
            if r <= lo {
                1.0
            } else if r >= hi {
                0.0
            } else {
                let s = (r - lo) / (hi - lo);
                let e1 = (-1.0 / (1.0 - s)).exp();
                let e2 = (-1.0 / s).exp();
                e1 / (e1 + e2)
            }
        };
        for j in dec.indices() {
            let b = dec.block(j);
            for i in 0..g.len() {
                let r = g.xi_norm(i);
                let m = if j == -1 {
                    cutoff(r)
                } else {
                    cutoff(r / 2f64.powi(j + 1)) - cutoff(r / 2f64.powi(j))
                };
                let expect = f.coeffs()[i] * m;
                assert!((b.coeffs()[i] - expect).norm() <= 1e-12 * f.coeffs()[i].norm().max(1e-300));
            }
        }
    }
}
