//! Bony paraproduct decomposition `ab = T_a b + T_b a + R(a, b)`.

use super::dyadic::DyadicDecomposition;
use crate::error::Result;
use crate::spectral::SpectralField;

/// The three frequency-localised parts of a product.
#[derive(Clone, Debug)]
pub struct BonyParts {
    /// `T_a b = sum_j S_{j-1} a . Delta_j b`
    pub t_ab: SpectralField,
    /// `T_b a = sum_j S_{j-1} b . Delta_j a`
    pub t_ba: SpectralField,
    /// `R(a, b) = sum_j Delta_j a . (Delta_{j-1} + Delta_j + Delta_{j+1}) b`
    pub r_ab: SpectralField,
}

impl BonyParts {
    pub fn total(&self) -> SpectralField {
        let mut s = &self.t_ab + &self.t_ba;
        s += &self.r_ab;
        s
    }
}

fn nodal_blocks(dec: &DyadicDecomposition) -> Vec<Vec<f64>> {
    dec.blocks().iter().map(SpectralField::to_nodal).collect()
}

/// Nodal `S_{j-1} f` for each block index, from the running block sum.
fn shifted_low_passes(blocks: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let len = blocks[0].len();
    let mut acc = vec![0.0; len];
    let mut out = Vec::with_capacity(blocks.len());
    // entry i corresponds to j = i - 1 and holds sum_{k <= j-2} Delta_k
    for i in 0..blocks.len() {
        out.push(acc.clone());
        if i >= 1 {
            for (a, b) in acc.iter_mut().zip(&blocks[i - 1]) {
                *a += b;
            }
        }
    }
    out
}

fn paraproduct(low: &[Vec<f64>], high: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; high[0].len()];
    for (s, d) in low.iter().zip(high) {
        for ((o, x), y) in out.iter_mut().zip(s).zip(d) {
            *o += x * y;
        }
    }
    out
}

/// Products are formed nodally and the dealiasing mask is applied to each
/// part, so `t_ab + t_ba + r_ab` equals the dealiased product `ab`.
pub fn bony_decompose(a: &SpectralField, b: &SpectralField) -> Result<BonyParts> {
    a.check_grid(b)?;
    let grid = *a.grid();
    let da = nodal_blocks(&DyadicDecomposition::new(a));
    let db = nodal_blocks(&DyadicDecomposition::new(b));
    let sa = shifted_low_passes(&da);
    let sb = shifted_low_passes(&db);

    let t_ab = paraproduct(&sa, &db);
    let t_ba = paraproduct(&sb, &da);

    let nb = db.len();
    let mut r = vec![0.0; grid.len()];
    for (i, blk) in da.iter().enumerate() {
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(nb - 1);
        for k in 0..grid.len() {
            let mut tilde = 0.0;
            for bk in &db[lo..=hi] {
                tilde += bk[k];
            }
            r[k] += blk[k] * tilde;
        }
    }
    let finish = |v: Vec<f64>| {
        SpectralField::from_nodal(grid, &v)
            .expect("grid-shaped")
            .dealiased()
    };
    Ok(BonyParts {
        t_ab: finish(t_ab),
        t_ba: finish(t_ba),
        r_ab: finish(r),
    })
}
