//! Bit-wise soft demapping and achievable-rate estimators.

mod gmi;
mod llr;
mod quadrature;

pub use gmi::{
    gmi_from_observations, gmi_monte_carlo, ngmi_from_gmi, required_snr, snr_to_sigma2, GmiReport, MonteCarlo,
    CHUNK_BLOCKS, DEFAULT_BLOCKS, DEFAULT_SEED, MIN_BLOCKS,
};
pub use llr::{bit_llrs, group_llrs, LlrMethod, NoiseModel};
pub use quadrature::{gauss_hermite, mi_reference, mi_reference_with, QuadratureOrder};
