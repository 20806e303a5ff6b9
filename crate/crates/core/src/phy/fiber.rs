use std::f64::consts::{LN_10, PI};

use num_complex::Complex64;

use super::spectral::{angular_frequencies, Spectral};
use super::waveform::WaveformGrid;
use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Single-mode fibre span. Units: km, dB/km, ps/(nm km), 1/(W km).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiberSpan {
    pub length_km: f64,
    pub alpha_db_per_km: f64,
    pub dispersion: f64,
    pub gamma: f64,
    pub step_km: f64,
}

impl Default for FiberSpan {
    /// 75 km of standard single-mode fibre with 0.1 km steps.
    fn default() -> Self {
        FiberSpan {
            length_km: 75.0,
            alpha_db_per_km: 0.2,
            dispersion: 17.0,
            gamma: 1.3,
            step_km: 0.1,
        }
    }
}

impl FiberSpan {
    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |name: &'static str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::param(name, format!("{v} must be finite and non-negative")))
            }
        };
        finite_nonneg("alpha_db_per_km", self.alpha_db_per_km)?;
        finite_nonneg("gamma", self.gamma)?;
        if !self.dispersion.is_finite() {
            return Err(Error::param("dispersion", "not finite"));
        }
        if !(self.length_km > 0.0 && self.length_km.is_finite()) {
            return Err(Error::param("length_km", format!("{} is not positive", self.length_km)));
        }
        if !(self.step_km > 0.0 && self.step_km <= self.length_km) {
            return Err(Error::param("step_km", format!("{} outside (0, {}]", self.step_km, self.length_km)));
        }
        Ok(())
    }

    /// Span loss in dB.
    pub fn loss_db(&self) -> f64 {
        self.alpha_db_per_km * self.length_km
    }

    /// Accumulated dispersion in ps/nm.
    pub fn accumulated_dispersion(&self) -> f64 {
        self.dispersion * self.length_km
    }

    /// Step lengths in km: whole steps followed by one shorter remainder.
    pub fn steps(&self) -> Vec<f64> {
        let whole = (self.length_km / self.step_km + 1e-9).floor() as usize;
        let mut out = vec![self.step_km; whole];
        let rest = self.length_km - whole as f64 * self.step_km;
        if rest > 1e-9 * self.length_km {
            out.push(rest);
        }
        out
    }
}

/// Group-velocity dispersion in s^2/m for `D` in ps/(nm km) at `frequency` Hz.
pub fn beta2_from_dispersion(dispersion: f64, frequency: f64) -> f64 {
    let lambda = SPEED_OF_LIGHT / frequency;
    // ps/(nm km) -> s/m^2
    -dispersion * 1e-6 * lambda * lambda / (2.0 * PI * SPEED_OF_LIGHT)
}

/// Linear operator `exp((-alpha/2 + j beta2 w^2 / 2) h)` for a step `h` in m.
fn linear_operator(omega: &[f64], alpha: f64, beta2: f64, h: f64) -> Vec<Complex64> {
    let amp = (-alpha / 2.0 * h).exp();
    omega
        .iter()
        .map(|w| Complex64::from_polar(amp, 0.5 * beta2 * w * w * h))
        .collect()
}

fn apply_nonlinear(w: &mut WaveformGrid, coeff: f64) {
    for (a, b) in w.x.iter_mut().zip(w.y.iter_mut()) {
        let phi = coeff * (a.norm_sqr() + b.norm_sqr());
        let r = Complex64::from_polar(1.0, phi);
        *a *= r;
        *b *= r;
    }
}

/// Propagates through one span with the symmetric split-step Fourier method
/// for the Manakov equation
/// `dA/dz = -(alpha/2) A - j (beta2/2) d^2A/dt^2 + j (8/9) gamma (|Ax|^2 + |Ay|^2) A`.
///
/// Consecutive linear half-steps are merged, so a span of `k` steps costs
/// `k + 1` linear and `k` nonlinear operations.
pub fn ssfm_span(waveform: &WaveformGrid, span: &FiberSpan) -> Result<WaveformGrid> {
    span.validate()?;
    waveform.check_finite()?;
    let n = waveform.len();
    let mut w = waveform.clone();
    if n == 0 {
        return Ok(w);
    }
    let alpha = span.alpha_db_per_km * LN_10 / 10.0 / 1e3;
    let beta2 = beta2_from_dispersion(span.dispersion, waveform.center_frequency);
    let gamma = span.gamma / 1e3 * 8.0 / 9.0;
    let omega = angular_frequencies(n, waveform.sample_rate);
    let steps: Vec<f64> = span.steps().into_iter().map(|h| h * 1e3).collect();
    let mut spec = Spectral::new(n);
    let mut cache: Vec<(f64, Vec<Complex64>)> = Vec::new();
    let mut linear = |w: &mut WaveformGrid, h: f64, spec: &mut Spectral| {
        if h == 0.0 {
            return;
        }
        let pos = match cache.iter().position(|(k, _)| *k == h) {
            Some(p) => p,
            None => {
                cache.push((h, linear_operator(&omega, alpha, beta2, h)));
                cache.len() - 1
            }
        };
        let op = &cache[pos].1;
        spec.filter(&mut w.x, op);
        spec.filter(&mut w.y, op);
    };
    linear(&mut w, steps[0] / 2.0, &mut spec);
    for (i, &h) in steps.iter().enumerate() {
        if gamma != 0.0 {
            apply_nonlinear(&mut w, gamma * h);
        }
        let next = steps.get(i + 1).copied().unwrap_or(0.0);
        linear(&mut w, (h + next) / 2.0, &mut spec);
    }
    w.check_finite()?;
    Ok(w)
}

/// Removes `total_dispersion` ps/nm of accumulated chromatic dispersion with
/// the exact inverse of the fibre's dispersive transfer function.
pub fn cd_compensate(waveform: &WaveformGrid, total_dispersion: f64) -> Result<WaveformGrid> {
    if !total_dispersion.is_finite() {
        return Err(Error::param("total_dispersion", "not finite"));
    }
    let mut w = waveform.clone();
    if total_dispersion == 0.0 || w.is_empty() {
        return Ok(w);
    }
    // beta2 * L in s^2: D*L in ps/nm equals D = 1e3 * D*L ps/(nm km) over 1 m.
    let beta2_l = beta2_from_dispersion(total_dispersion * 1e3, w.center_frequency);
    let omega = angular_frequencies(w.len(), w.sample_rate);
    let h: Vec<Complex64> = omega.iter().map(|o| Complex64::from_polar(1.0, -0.5 * beta2_l * o * o)).collect();
    let mut spec = Spectral::new(w.len());
    spec.filter(&mut w.x, &h);
    spec.filter(&mut w.y, &h);
    Ok(w)
}
