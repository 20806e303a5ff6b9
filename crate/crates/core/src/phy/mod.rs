//! Sampled dual-polarisation waveforms and the optical link: pulse shaping,
//! WDM multiplexing, split-step fibre propagation, amplification and
//! dispersion compensation.

mod edfa;
mod fiber;
mod link;
mod rrc;
mod spectral;
mod waveform;
mod wdm;

pub use edfa::{edfa_amplify, Amplifier, PLANCK};
pub use fiber::{beta2_from_dispersion, cd_compensate, ssfm_span, FiberSpan, SPEED_OF_LIGHT};
pub use link::{launch, propagate_link, propagate_span, LinkSpec, DEFAULT_WAVELENGTH_NM};
pub use rrc::{matched_filter_downsample, raised_cosine, rrc_shape};
pub use waveform::{read_dump, WaveformGrid};
pub use wdm::{channel_select, frequency_shift, wdm_mux};
