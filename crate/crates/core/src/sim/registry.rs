use crate::error::{Error, Result};
use crate::exec::Workers;
use crate::metrics::MonteCarlo;
use crate::modfmt::{
    build_2a8psk, build_pm8qam_with, build_pm_qpsk, build_time_hybrid, extend_to_8d, fixtures, load_constellation,
    FormatSpec, ParityType,
};
use crate::stats::golden_section_max;

use super::config::FormatOptions;

/// Ring ratio of the 2A8PSK slots, from [`optimize_ring_ratio`] with
/// [`RING_SEARCH_BLOCKS`] and [`RING_SEARCH_SEED`].
pub const DEFAULT_RING_RATIO: f64 = 0.716;

/// Arguments that reproduce [`DEFAULT_RING_RATIO`].
pub const RING_SEARCH_BLOCKS: usize = 20_000;
pub const RING_SEARCH_SEED: u64 = 1;

/// Identifiers accepted by [`build_format`].
pub const FORMAT_IDS: [&str; 7] = ["pm8qam", "pm-qpsk", "8d-t1", "8d-t2", "th-2a8psk", "6b-2a8psk", "5b-2a8psk"];

/// Builds the format named `id`.
pub fn build_format(id: &str, options: &FormatOptions) -> Result<FormatSpec> {
    let base = || match &options.base_file {
        Some(path) => load_constellation(path),
        None => Ok(fixtures::prs64_4d()),
    };
    let spec = match id {
        "pm8qam" => FormatSpec::plain_4d(build_pm8qam_with(options.qam8_geometry))?,
        "pm-qpsk" => FormatSpec::plain_4d(build_pm_qpsk())?,
        "8d-t1" => extend_to_8d(&base()?, ParityType::T1)?,
        "8d-t2" => extend_to_8d(&base()?, ParityType::T2)?,
        "th-2a8psk" => time_hybrid(options.ring_ratio)?,
        "6b-2a8psk" => FormatSpec::plain_4d(build_2a8psk(options.ring_ratio, 6)?)?,
        "5b-2a8psk" => FormatSpec::plain_4d(build_2a8psk(options.ring_ratio, 5)?)?,
        _ => return Err(Error::UnknownFormat(format!("{id} (known: {})", FORMAT_IDS.join(", ")))),
    };
    Ok(spec.with_name(id))
}

fn time_hybrid(ring_ratio: f64) -> Result<FormatSpec> {
    build_time_hybrid(&build_2a8psk(ring_ratio, 5)?, &build_2a8psk(ring_ratio, 6)?)
}

/// Outcome of the ring-ratio search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RingRatioSearch {
    pub ring_ratio: f64,
    /// Operating SNR used as the objective point, dB.
    pub snr_db: f64,
    pub gmi: f64,
}

/// Ring ratio of the 5b/6b time-hybrid format maximising AWGN GMI at its
/// NGMI 0.85 operating point.
///
/// The operating SNR is found once with the ratio at 0.6; the GMI at that
/// SNR is then maximised over `[0.3, 1]` by golden-section search with common
/// random numbers, to a tolerance of 0.005.
pub fn optimize_ring_ratio(n_blocks: usize, seed: u64, workers: Workers) -> Result<RingRatioSearch> {
    let mc = MonteCarlo::with_workers(workers);
    let snr_db = mc.required_snr(&time_hybrid(0.6)?, 0.85, (2.0, 16.0), n_blocks, seed)?;
    let mut failure = None;
    let ring_ratio = golden_section_max(
        |r| match time_hybrid(r).and_then(|f| mc.gmi(&f, snr_db, n_blocks, seed)) {
            Ok(rep) => rep.gmi,
            Err(e) => {
                failure = Some(e);
                f64::NEG_INFINITY
            }
        },
        0.3,
        1.0,
        0.005,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let gmi = mc.gmi(&time_hybrid(ring_ratio)?, snr_db, n_blocks, seed)?.gmi;
    Ok(RingRatioSearch { ring_ratio, snr_db, gmi })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_ids_build() {
        let o = FormatOptions::default();
        for id in FORMAT_IDS {
            let f = build_format(id, &o).unwrap();
            assert_eq!(f.name(), id);
        }
        assert_eq!(build_format("8d-t1", &o).unwrap().bits_per_block(), 11);
        assert_eq!(build_format("th-2a8psk", &o).unwrap().bits_per_4d(), 5.5);
        assert!(matches!(build_format("16qam", &o), Err(Error::UnknownFormat(_))));
    }

    #[test]
    fn frozen_ring_ratio_matches_search() {
        let s = optimize_ring_ratio(RING_SEARCH_BLOCKS, RING_SEARCH_SEED, Workers::serial()).unwrap();
        assert!((s.ring_ratio - DEFAULT_RING_RATIO).abs() < 0.005, "{s:?}");
        assert!((0.3..=1.0).contains(&s.ring_ratio));
    }

    #[test]
    fn missing_base_file_names_path() {
        let o = FormatOptions {
            base_file: Some("/nonexistent/base.txt".into()),
            ..FormatOptions::default()
        };
        let e = build_format("8d-t1", &o).unwrap_err();
        assert!(e.to_string().contains("/nonexistent/base.txt"));
    }
}
