//! Numerical Littlewood-Paley calculus on the periodic grid.

mod bony;
mod dyadic;
mod inequalities;
mod norms;

pub use bony::{bony_decompose, BonyParts};
pub use dyadic::{
    block_symbol, chi, dyadic_block, j_max, low_pass, low_pass_symbol, phi, DyadicDecomposition,
};
pub use inequalities::{
    annulus_filter, heat_block_bracket, heat_block_decay, heat_block_decay_p, verify_bernstein,
};
pub use norms::{
    besov_norm, besov_norm_of, block_norms, log_besov_norm, norm_from_blocks, sequence_norm, BesovSpec,
};
