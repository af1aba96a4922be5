//! Transport of dyadic blocks in log-Besov spaces and the log-Besov product law.

mod blocks;
mod flows;
mod product;

pub use blocks::{grad_besov_0_inf_2, BlockTransportExperiment, GrowthReport, GrowthRow, VelocitySource};
pub use flows::{rotation_stream_function, rotation_velocity, shear_velocity};
pub use product::{product_law_check, ProductLawReport};
