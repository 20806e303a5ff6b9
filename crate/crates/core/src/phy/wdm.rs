use std::f64::consts::PI;

use num_complex::Complex64;

use super::spectral::{bin_frequency, Spectral};
use super::waveform::WaveformGrid;
use crate::error::{Error, Result};

/// Shift in whole FFT bins closest to `offset` Hz.
fn shift_bins(offset: f64, n: usize, fs: f64) -> i64 {
    (offset * n as f64 / fs).round() as i64
}

/// Multiplies both polarisations by `exp(j 2 pi k t fs / n)` for the whole-bin
/// shift `k` nearest to `offset`, returning the shift actually applied in Hz.
pub fn frequency_shift(waveform: &mut WaveformGrid, offset: f64) -> f64 {
    let n = waveform.len();
    if n == 0 {
        return 0.0;
    }
    let k = shift_bins(offset, n, waveform.sample_rate).rem_euclid(n as i64) as u64;
    if k == 0 {
        return 0.0;
    }
    let nn = n as u64;
    for (i, (a, b)) in waveform.x.iter_mut().zip(waveform.y.iter_mut()).enumerate() {
        // Exact phase index (k*i mod n) keeps the rotation periodic on the grid.
        let m = (k * i as u64) % nn;
        let r = Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64);
        *a *= r;
        *b *= r;
    }
    bin_frequency(k as usize, n, waveform.sample_rate)
}

/// Frequency offset of channel `i` of `count` with the centre channel at 0.
pub fn channel_offset(i: usize, count: usize, spacing: f64) -> f64 {
    (i as f64 - (count / 2) as f64) * spacing
}

/// Circularly delays each channel by its decorrelation offset (in samples),
/// moves it to its grid slot and sums the fields.
pub fn wdm_mux(channels: &[WaveformGrid], spacing: f64, delays: &[usize]) -> Result<WaveformGrid> {
    let Some(first) = channels.first() else {
        return Err(Error::param("channels", "empty"));
    };
    if delays.len() != channels.len() {
        return Err(Error::param("delays", format!("{} delays for {} channels", delays.len(), channels.len())));
    }
    let n = first.len();
    let fs = first.sample_rate;
    for c in channels {
        if c.len() != n || c.sample_rate != fs || c.center_frequency != first.center_frequency {
            return Err(Error::param("channels", "grids differ in length, sample rate or carrier"));
        }
    }
    if channels.len() > 1 && channels.len() as f64 * spacing > fs * (1.0 + 1e-12) {
        return Err(Error::param(
            "spacing",
            format!(
                "{} channels x {:.4e} Hz exceed the {:.4e} Hz sampling bandwidth",
                channels.len(),
                spacing,
                fs
            ),
        ));
    }
    let mut out = WaveformGrid::new(vec![Complex64::default(); n], vec![Complex64::default(); n], fs, first.center_frequency)?;
    for (i, (c, &d)) in channels.iter().zip(delays).enumerate() {
        let mut ch = c.clone();
        let d = d % n.max(1);
        ch.x.rotate_right(d);
        ch.y.rotate_right(d);
        frequency_shift(&mut ch, channel_offset(i, channels.len(), spacing));
        for (o, v) in out.x.iter_mut().zip(&ch.x) {
            *o += v;
        }
        for (o, v) in out.y.iter_mut().zip(&ch.y) {
            *o += v;
        }
    }
    Ok(out)
}

/// Brings the channel at `offset` Hz to baseband and keeps `|f| <= bandwidth/2`.
pub fn channel_select(waveform: &WaveformGrid, offset: f64, bandwidth: f64) -> Result<WaveformGrid> {
    let fs = waveform.sample_rate;
    if !(bandwidth > 0.0) || offset.abs() + bandwidth / 2.0 > fs / 2.0 {
        return Err(Error::param(
            "channel",
            format!("offset {offset:.4e} Hz with bandwidth {bandwidth:.4e} Hz lies outside +-{:.4e} Hz", fs / 2.0),
        ));
    }
    let mut out = waveform.clone();
    frequency_shift(&mut out, -offset);
    let n = out.len();
    let h: Vec<Complex64> = (0..n)
        .map(|k| {
            let f = bin_frequency(k, n, fs);
            Complex64::new(if f.abs() <= bandwidth / 2.0 { 1.0 } else { 0.0 }, 0.0)
        })
        .collect();
    let mut spec = Spectral::new(n);
    spec.filter(&mut out.x, &h);
    spec.filter(&mut out.y, &h);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modfmt::Symbol4DStream;
    use crate::phy::rrc::rrc_shape;
    use rand::Rng;

    const RS: f64 = 41.79e9;
    const FC: f64 = 193.4e12;

    fn channel(n: usize, sps: usize, seed: u64) -> WaveformGrid {
        let mut rng = crate::rng::stream(seed, 0);
        let s = Symbol4DStream::new(
            (0..n)
                .map(|_| [0; 4].map(|_: i32| if rng.random::<bool>() { 0.5 } else { -0.5 }))
                .collect(),
        );
        rrc_shape(&s, 0.01, sps, RS, FC).unwrap()
    }

    fn rms_diff(a: &WaveformGrid, b: &WaveformGrid) -> f64 {
        let s: f64 = a.x.iter().zip(&b.x).chain(a.y.iter().zip(&b.y)).map(|(u, v)| (u - v).norm_sqr()).sum();
        (s / a.len() as f64).sqrt()
    }

    #[test]
    fn single_channel_is_identity() {
        let c = channel(256, 4, 1);
        let m = wdm_mux(std::slice::from_ref(&c), 50e9, &[0]).unwrap();
        assert_eq!(m, c);
        let back = channel_select(&m, 0.0, 1.01 * RS).unwrap();
        assert!(rms_diff(&back, &c) < 1e-6);
    }

    #[test]
    fn disjoint_channels_add_power() {
        let a = channel(512, 4, 2);
        let b = channel(512, 4, 3);
        let m = wdm_mux(&[a.clone(), b.clone()], 50e9, &[0, 37]).unwrap();
        assert!((m.power() - a.power() - b.power()).abs() < 1e-9);
    }

    #[test]
    fn select_recovers_shifted_channel() {
        let cs: Vec<WaveformGrid> = (0..3).map(|i| channel(512, 4, 10 + i)).collect();
        let m = wdm_mux(&cs, 50e9, &[0, 0, 0]).unwrap();
        // Grid of 512 x 4 samples: 50 GHz is not a whole number of bins, so
        // compare after undoing the same rounded shift.
        let mut expected = cs[2].clone();
        let applied = frequency_shift(&mut expected, 50e9);
        let back = channel_select(&m, applied, 1.01 * RS).unwrap();
        assert!(rms_diff(&back, &cs[2]) < 1e-6);
    }

    #[test]
    fn empty_slot_leakage() {
        let sps = 16;
        let cs: Vec<WaveformGrid> = (0..11).map(|i| channel(1024, sps, 20 + i)).collect();
        let delays: Vec<usize> = (0..11).map(|i| i * 40 * sps).collect();
        let m = wdm_mux(&cs, 50e9, &delays).unwrap();
        let total = m.power();
        // Leakage of the full comb into a neighbouring channel's slot.
        let mut sans = cs.clone();
        for c in sans.iter_mut().step_by(2) {
            c.scale(0.0);
        }
        let mm = wdm_mux(&sans, 50e9, &delays).unwrap();
        let slot = channel_select(&mm, channel_offset(0, 11, 50e9), 1.01 * RS).unwrap();
        assert!(10.0 * (slot.power() / total).log10() < -40.0);
    }

    #[test]
    fn grid_capacity_and_band_errors() {
        let cs: Vec<WaveformGrid> = (0..11).map(|i| channel(64, 4, i)).collect();
        assert!(wdm_mux(&cs, 50e9, &[0; 11]).is_err());
        let c = channel(64, 4, 1);
        assert!(channel_select(&c, 100e9, 42e9).is_err());
    }
}
