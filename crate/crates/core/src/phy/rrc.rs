use std::f64::consts::PI;

use num_complex::Complex64;

use super::spectral::{bin_frequency, Spectral};
use super::waveform::WaveformGrid;
use crate::error::{Error, Result};
use crate::modfmt::Symbol4DStream;

/// Raised-cosine spectrum at `f` Hz, unit in the passband.
pub fn raised_cosine(f: f64, symbol_rate: f64, rolloff: f64) -> f64 {
    let a = f.abs() / symbol_rate;
    let lo = (1.0 - rolloff) / 2.0;
    let hi = (1.0 + rolloff) / 2.0;
    if a <= lo {
        1.0
    } else if a >= hi {
        0.0
    } else {
        0.5 * (1.0 + (PI / rolloff * (a - lo)).cos())
    }
}

fn check(rolloff: f64, sps: usize, symbol_rate: f64) -> Result<()> {
    if !(rolloff > 0.0 && rolloff <= 1.0) {
        return Err(Error::param("rolloff", format!("{rolloff} outside (0, 1]")));
    }
    if sps < 2 {
        return Err(Error::param("samples_per_symbol", format!("{sps} < 2")));
    }
    if !(symbol_rate > 0.0 && symbol_rate.is_finite()) {
        return Err(Error::param("symbol_rate", format!("{symbol_rate} is not positive")));
    }
    Ok(())
}

fn rrc_response(n: usize, fs: f64, symbol_rate: f64, rolloff: f64) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::new(raised_cosine(bin_frequency(k, n, fs), symbol_rate, rolloff).sqrt(), 0.0))
        .collect()
}

/// Upsamples and root-raised-cosine filters a symbol stream (circularly, in
/// the frequency domain). The waveform power equals the mean symbol energy;
/// the carrier is left at `center_frequency` of the returned grid, which
/// callers set as needed.
pub fn rrc_shape(
    symbols: &Symbol4DStream,
    rolloff: f64,
    samples_per_symbol: usize,
    symbol_rate: f64,
    center_frequency: f64,
) -> Result<WaveformGrid> {
    check(rolloff, samples_per_symbol, symbol_rate)?;
    let sps = samples_per_symbol;
    let n = symbols.len() * sps;
    let fs = symbol_rate * sps as f64;
    let mut x = vec![Complex64::default(); n];
    let mut y = vec![Complex64::default(); n];
    let gain = sps as f64;
    for (i, s) in symbols.slots().iter().enumerate() {
        x[i * sps] = Complex64::new(s[0], s[1]) * gain;
        y[i * sps] = Complex64::new(s[2], s[3]) * gain;
    }
    let h = rrc_response(n, fs, symbol_rate, rolloff);
    let mut spec = Spectral::new(n);
    spec.filter(&mut x, &h);
    spec.filter(&mut y, &h);
    WaveformGrid::new(x, y, fs, center_frequency)
}

/// Applies the matched root-raised-cosine filter and samples every
/// `samples_per_symbol` samples starting at index 0.
pub fn matched_filter_downsample(
    waveform: &WaveformGrid,
    rolloff: f64,
    samples_per_symbol: usize,
    symbol_rate: f64,
) -> Result<Symbol4DStream> {
    check(rolloff, samples_per_symbol, symbol_rate)?;
    let sps = samples_per_symbol;
    let n = waveform.len();
    if n == 0 || n % sps != 0 {
        return Err(Error::param("waveform", format!("{n} samples is not a multiple of {sps}")));
    }
    let expected = symbol_rate * sps as f64;
    if ((waveform.sample_rate - expected) / expected).abs() > 1e-9 {
        return Err(Error::param(
            "sample_rate",
            format!("{} Hz does not match {} x {} Bd", waveform.sample_rate, sps, symbol_rate),
        ));
    }
    let h = rrc_response(n, waveform.sample_rate, symbol_rate, rolloff);
    let mut spec = Spectral::new(n);
    let mut x = waveform.x.clone();
    let mut y = waveform.y.clone();
    spec.filter(&mut x, &h);
    spec.filter(&mut y, &h);
    let xs: Vec<Complex64> = x.iter().step_by(sps).copied().collect();
    let ys: Vec<Complex64> = y.iter().step_by(sps).copied().collect();
    Ok(Symbol4DStream::from_polarisations(&xs, &ys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    const RS: f64 = 41.79e9;
    const FC: f64 = 193.4e12;

    fn random_stream(n: usize, seed: u64) -> Symbol4DStream {
        let mut rng = crate::rng::stream(seed, 0);
        Symbol4DStream::new(
            (0..n)
                .map(|_| [0; 4].map(|_: i32| if rng.random::<bool>() { 0.5 } else { -0.5 }))
                .collect(),
        )
    }

    fn rms(a: &Symbol4DStream, b: &Symbol4DStream) -> f64 {
        let s: f64 = a
            .slots()
            .iter()
            .zip(b.slots())
            .flat_map(|(p, q)| p.iter().zip(q).map(|(u, v)| (u - v) * (u - v)))
            .sum();
        (s / a.len() as f64).sqrt()
    }

    #[test]
    fn back_to_back_identity() {
        let s = random_stream(512, 1);
        for (rolloff, sps) in [(0.01, 2), (0.01, 4), (0.5, 3), (1.0, 8)] {
            let w = rrc_shape(&s, rolloff, sps, RS, FC).unwrap();
            let r = matched_filter_downsample(&w, rolloff, sps, RS).unwrap();
            assert!(rms(&s, &r) < 1e-9, "{rolloff} {sps}");
        }
    }

    #[test]
    fn shaped_power_equals_symbol_energy() {
        let s = random_stream(1024, 2);
        let w = rrc_shape(&s, 0.01, 4, RS, FC).unwrap();
        assert!((w.power() - s.mean_energy()).abs() < 1e-6);
    }

    #[test]
    fn isolated_symbol_is_nyquist() {
        let mut slots = vec![[0.0; 4]; 256];
        slots[128] = [1.0, 0.0, 0.0, 0.0];
        let s = Symbol4DStream::new(slots);
        let w = rrc_shape(&s, 0.01, 4, RS, FC).unwrap();
        let r = matched_filter_downsample(&w, 0.01, 4, RS).unwrap();
        for (i, v) in r.slots().iter().enumerate() {
            if i == 128 {
                assert!((v[0] - 1.0).abs() < 1e-9);
            } else {
                assert!(v[0].abs() < 1e-3 && v[1].abs() < 1e-3);
            }
        }
    }

    #[test]
    fn occupied_bandwidth() {
        let bw = (1.0 + 0.01) * RS;
        assert!((bw - 42.2079e9).abs() < 1e3);
        assert_eq!(raised_cosine(bw / 2.0 + 1.0, RS, 0.01), 0.0);
        assert!(raised_cosine(bw / 2.0 - 1e6, RS, 0.01) > 0.0);
    }

    #[test]
    fn white_noise_output_variance() {
        // Output variance = input variance x noise bandwidth / sample rate = 1/sps.
        let sps = 4;
        let n = 1 << 18;
        let mut rng = crate::rng::stream(9, 0);
        let mut draw = || Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) * 0.5f64.sqrt();
        let x: Vec<Complex64> = (0..n).map(|_| draw()).collect();
        let y: Vec<Complex64> = (0..n).map(|_| draw()).collect();
        let w = WaveformGrid::new(x, y, RS * sps as f64, FC).unwrap();
        let r = matched_filter_downsample(&w, 0.01, sps, RS).unwrap();
        let var = r.mean_energy() / 2.0;
        assert!((var - 1.0 / sps as f64).abs() < 0.02 / sps as f64, "{var}");
    }

    #[test]
    fn mismatched_rolloff_leaves_isi() {
        let s = random_stream(512, 3);
        let w = rrc_shape(&s, 0.5, 4, RS, FC).unwrap();
        let r = matched_filter_downsample(&w, 0.05, 4, RS).unwrap();
        assert!(rms(&s, &r) > 1e-3);
    }

    #[test]
    fn parameter_errors() {
        let s = random_stream(8, 4);
        assert!(rrc_shape(&s, 0.0, 4, RS, FC).is_err());
        assert!(rrc_shape(&s, 1.5, 4, RS, FC).is_err());
        assert!(rrc_shape(&s, 0.1, 1, RS, FC).is_err());
        let w = rrc_shape(&s, 0.1, 4, RS, FC).unwrap();
        assert!(matched_filter_downsample(&w, 0.1, 3, RS).is_err());
    }
}
