//! Physical-layer simulation of multidimensional optical modulation formats.
//!
//! The crate is organised bottom-up:
//!
//! * [`modfmt`] builds constellations (PM-8QAM, 2A8PSK, parity-extended 8D
//!   formats, time-hybrid schedules), maps bits to 4D symbol streams and
//!   answers geometric questions about the resulting codeword sets.
//! * [`metrics`] computes bit-wise LLRs, Monte-Carlo GMI/NGMI over AWGN and a
//!   quadrature mutual-information oracle.
//! * [`phy`] is the sampled-waveform chain: RRC shaping, WDM multiplexing,
//!   split-step Manakov propagation, EDFA noise, CD compensation and matched
//!   filtering.
//! * [`sim`] runs the SNR, distance and launch-power sweeps and derives reach
//!   figures at an NGMI threshold.
//!
//! Parallel work goes through [`exec`], which falls back to plain iteration
//! when the `parallel` feature is disabled or a single worker is requested.
//! Every random draw is derived from an explicit seed and a work-item index,
//! so results do not depend on the worker count.

pub mod error;
pub mod exec;
pub mod metrics;
pub mod modfmt;
pub mod phy;
pub mod rng;
pub mod sim;
pub mod stats;

pub use error::{Error, Result};
pub use exec::Workers;

/// Version string echoed into sweep metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
