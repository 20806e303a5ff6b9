//! Modulation formats: constellations, bit labelings and block mappings.

mod builders;
mod constellation;
mod file;
pub mod fixtures;
mod format;
mod stream;

pub use builders::{
    build_2a8psk, build_pm8qam, build_pm8qam_with, build_pm_qpsk, build_qpsk, gray, qam8_points, Qam8Geometry,
};
pub use constellation::{BitWord, Constellation, ENERGY_TOLERANCE};
pub use file::{constellation_to_text, load_constellation, parse_constellation};
pub use format::{
    bits_to_labels, build_time_hybrid, decide_labels, extend_to_8d, hard_decision, map_bits, map_labels,
    min_distance_of, min_euclidean_distance, parity_bit, parity_violations, polarisation_identical_count, slot_norm_variance,
    CodeGroup, FormatKind, FormatSpec, ParityType,
};
pub use stream::Symbol4DStream;
