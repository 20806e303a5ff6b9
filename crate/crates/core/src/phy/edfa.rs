use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::waveform::WaveformGrid;
use crate::error::{Error, Result};
use crate::rng::stream;
use crate::stats::db_to_linear;

pub const PLANCK: f64 = 6.626_070_15e-34;

/// Erbium-doped fibre amplifier.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Amplifier {
    pub gain_db: f64,
    pub noise_figure_db: f64,
    /// Adds amplified spontaneous emission when set.
    pub ase: bool,
}

impl Amplifier {
    pub fn new(gain_db: f64, noise_figure_db: f64) -> Result<Self> {
        let a = Amplifier {
            gain_db,
            noise_figure_db,
            ase: true,
        };
        a.validate()?;
        Ok(a)
    }

    /// Gain only, no ASE.
    pub fn noiseless(gain_db: f64) -> Self {
        Amplifier {
            gain_db,
            noise_figure_db: 0.0,
            ase: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gain_db >= 0.0 && self.gain_db.is_finite()) {
            return Err(Error::param("gain_db", format!("{} must be finite and >= 0", self.gain_db)));
        }
        if !self.noise_figure_db.is_finite() {
            return Err(Error::param("noise_figure_db", "not finite"));
        }
        Ok(())
    }

    /// Non-fatal diagnostic for a noise figure below the 3 dB quantum limit.
    pub fn warning(&self) -> Option<String> {
        (self.ase && self.gain_db > 0.0 && self.noise_figure_db < 3.0)
            .then(|| format!("noise figure {} dB is below the 3 dB quantum limit", self.noise_figure_db))
    }

    /// ASE power spectral density per polarisation, W/Hz.
    pub fn ase_psd(&self, frequency: f64) -> f64 {
        if !self.ase {
            return 0.0;
        }
        let g = db_to_linear(self.gain_db);
        let n_sp = db_to_linear(self.noise_figure_db) / 2.0;
        (g - 1.0) * n_sp * PLANCK * frequency
    }
}

/// Scales the field by `sqrt(G)` and adds circular Gaussian ASE of power
/// `S_ase * sample_rate` per polarisation.
pub fn edfa_amplify(waveform: &WaveformGrid, amp: &Amplifier, seed: u64) -> Result<WaveformGrid> {
    amp.validate()?;
    let mut w = waveform.clone();
    w.scale(db_to_linear(amp.gain_db).sqrt());
    let power = amp.ase_psd(w.center_frequency) * w.sample_rate;
    if power > 0.0 {
        let sd = (power / 2.0).sqrt();
        let mut rng = stream(seed, 0);
        for v in w.x.iter_mut().chain(w.y.iter_mut()) {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *v += Complex64::new(re, im) * sd;
        }
    }
    Ok(w)
}
