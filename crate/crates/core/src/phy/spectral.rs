use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward/inverse FFT pair of one length. The inverse is scaled by `1/n`.
pub(crate) struct Spectral {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    scale: f64,
}

impl Spectral {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Spectral {
            fwd,
            inv,
            scratch: vec![Complex64::default(); len],
            scale: 1.0 / n as f64,
        }
    }

    pub(crate) fn forward(&mut self, buf: &mut [Complex64]) {
        self.fwd.process_with_scratch(buf, &mut self.scratch);
    }

    pub(crate) fn inverse(&mut self, buf: &mut [Complex64]) {
        self.inv.process_with_scratch(buf, &mut self.scratch);
        for v in buf.iter_mut() {
            *v *= self.scale;
        }
    }

    /// `buf <- IFFT(FFT(buf) * h)`.
    pub(crate) fn filter(&mut self, buf: &mut [Complex64], h: &[Complex64]) {
        self.forward(buf);
        for (v, g) in buf.iter_mut().zip(h) {
            *v *= g;
        }
        self.inverse(buf);
    }
}

/// Frequency in Hz of FFT bin `k` out of `n` at sample rate `fs`.
pub(crate) fn bin_frequency(k: usize, n: usize, fs: f64) -> f64 {
    let k = if k < n.div_ceil(2) { k as f64 } else { k as f64 - n as f64 };
    k * fs / n as f64
}

pub(crate) fn angular_frequencies(n: usize, fs: f64) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * bin_frequency(k, n, fs)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_bins() {
        let mut s = Spectral::new(8);
        let orig: Vec<Complex64> = (0..8).map(|i| Complex64::new(i as f64, -(i as f64) / 2.0)).collect();
        let mut buf = orig.clone();
        s.forward(&mut buf);
        s.inverse(&mut buf);
        for (a, b) in buf.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
        assert_eq!(bin_frequency(3, 8, 8.0), 3.0);
        assert_eq!(bin_frequency(4, 8, 8.0), -4.0);
        assert_eq!(bin_frequency(7, 8, 8.0), -1.0);
    }
}
