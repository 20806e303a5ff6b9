use super::edfa::{edfa_amplify, Amplifier};
use super::fiber::{ssfm_span, FiberSpan};
use super::waveform::WaveformGrid;
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::stats::dbm_to_watt;

pub const DEFAULT_WAVELENGTH_NM: f64 = 1550.116;

/// Multi-span link: fibre spans each followed by an amplifier.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkSpec {
    pub spans: Vec<(FiberSpan, Amplifier)>,
    /// Aggregate over all WDM channels.
    pub launch_power_dbm_total: f64,
}

impl LinkSpec {
    /// `count` copies of `span`, each followed by an amplifier compensating its loss.
    pub fn uniform(count: usize, span: FiberSpan, noise_figure_db: f64, launch_power_dbm_total: f64) -> Self {
        let amp = Amplifier {
            gain_db: span.loss_db(),
            noise_figure_db,
            ase: true,
        };
        LinkSpec {
            spans: vec![(span, amp); count],
            launch_power_dbm_total,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.spans.is_empty() {
            return Err(Error::param("spans", "link has no spans"));
        }
        if !self.launch_power_dbm_total.is_finite() {
            return Err(Error::param("launch_power_dbm_total", "not finite"));
        }
        for (s, a) in &self.spans {
            s.validate()?;
            a.validate()?;
        }
        Ok(())
    }

    pub fn length_km(&self) -> f64 {
        self.spans.iter().map(|(s, _)| s.length_km).sum()
    }

    /// Accumulated dispersion in ps/nm.
    pub fn accumulated_dispersion(&self) -> f64 {
        self.spans.iter().map(|(s, _)| s.accumulated_dispersion()).sum()
    }
}

/// Scales the waveform to `power_dbm` total.
pub fn launch(waveform: &WaveformGrid, power_dbm: f64) -> Result<WaveformGrid> {
    let p = waveform.power();
    if !(p > 0.0) {
        return Err(Error::param("waveform", "zero power cannot be scaled"));
    }
    let mut w = waveform.clone();
    w.scale((dbm_to_watt(power_dbm) / p).sqrt());
    Ok(w)
}

/// Span `index` of a link seeded with `seed`: fibre then amplifier.
pub fn propagate_span(waveform: &WaveformGrid, span: &FiberSpan, amp: &Amplifier, seed: u64, index: usize) -> Result<WaveformGrid> {
    let w = ssfm_span(waveform, span)?;
    let w = edfa_amplify(&w, amp, derive_seed(seed, index as u64))?;
    w.check_finite()?;
    Ok(w)
}

/// Launches the waveform at the link's power and runs every span.
pub fn propagate_link(waveform: &WaveformGrid, link: &LinkSpec, seed: u64) -> Result<WaveformGrid> {
    link.validate()?;
    let mut w = launch(waveform, link.launch_power_dbm_total)?;
    for (i, (s, a)) in link.spans.iter().enumerate() {
        w = propagate_span(&w, s, a, seed, i)?;
    }
    Ok(w)
}
