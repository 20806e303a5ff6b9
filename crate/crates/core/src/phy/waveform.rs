use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dual-polarisation complex envelope on a uniform time grid, in sqrt(W).
#[derive(Clone, Debug, PartialEq)]
pub struct WaveformGrid {
    pub x: Vec<Complex64>,
    pub y: Vec<Complex64>,
    /// Hz.
    pub sample_rate: f64,
    /// Absolute optical carrier, Hz.
    pub center_frequency: f64,
}

impl WaveformGrid {
    pub fn new(x: Vec<Complex64>, y: Vec<Complex64>, sample_rate: f64, center_frequency: f64) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::param("waveform", format!("polarisation lengths {} and {} differ", x.len(), y.len())));
        }
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(Error::param("sample_rate", format!("{sample_rate} is not positive")));
        }
        if !(center_frequency > 0.0 && center_frequency.is_finite()) {
            return Err(Error::param("center_frequency", format!("{center_frequency} is not positive")));
        }
        Ok(WaveformGrid {
            x,
            y,
            sample_rate,
            center_frequency,
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Mean of `|x|^2 + |y|^2`, in W.
    pub fn power(&self) -> f64 {
        if self.x.is_empty() {
            return 0.0;
        }
        let s: f64 = self.x.iter().chain(&self.y).map(|v| v.norm_sqr()).sum();
        s / self.x.len() as f64
    }

    pub fn scale(&mut self, factor: f64) {
        for v in self.x.iter_mut().chain(self.y.iter_mut()) {
            *v *= factor;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.y).all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::Overflow)
        }
    }

    /// Writes little-endian interleaved complex64 samples `(x_re, x_im, y_re, y_im)`
    /// to `path` and a one-line sidecar to `path.txt`.
    pub fn write_dump(&self, path: &Path) -> Result<()> {
        let mut bytes = Vec::with_capacity(self.len() * 16);
        for (a, b) in self.x.iter().zip(&self.y) {
            for v in [a.re, a.im, b.re, b.im] {
                bytes.extend_from_slice(&(v as f32).to_le_bytes());
            }
        }
        let io = |p: &Path, e: std::io::Error| Error::Io {
            path: p.display().to_string(),
            reason: e.to_string(),
        };
        fs::write(path, bytes).map_err(|e| io(path, e))?;
        let side = sidecar(path);
        let meta = format!(
            "sample_rate={:?} center_frequency={:?} samples={}\n",
            self.sample_rate,
            self.center_frequency,
            self.len()
        );
        fs::write(&side, meta).map_err(|e| io(&side, e))
    }
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".txt");
    PathBuf::from(s)
}

/// Reads a waveform written by [`WaveformGrid::write_dump`].
pub fn read_dump(path: &Path) -> Result<WaveformGrid> {
    let io = |p: &Path, e: std::io::Error| Error::Io {
        path: p.display().to_string(),
        reason: e.to_string(),
    };
    let side = sidecar(path);
    let meta = fs::read_to_string(&side).map_err(|e| io(&side, e))?;
    let mut fs_hz = None;
    let mut fc = None;
    for tok in meta.split_whitespace() {
        match tok.split_once('=') {
            Some(("sample_rate", v)) => fs_hz = v.parse::<f64>().ok(),
            Some(("center_frequency", v)) => fc = v.parse::<f64>().ok(),
            _ => {}
        }
    }
    let (Some(fs_hz), Some(fc)) = (fs_hz, fc) else {
        return Err(Error::Format(format!("{}: missing sample_rate or center_frequency", side.display())));
    };
    let bytes = fs::read(path).map_err(|e| io(path, e))?;
    if bytes.len() % 16 != 0 {
        return Err(Error::Format(format!("{}: length {} is not a multiple of 16", path.display(), bytes.len())));
    }
    let f = |c: &[u8]| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64;
    let (x, y) = bytes
        .chunks_exact(16)
        .map(|c| (Complex64::new(f(&c[0..4]), f(&c[4..8])), Complex64::new(f(&c[8..12]), f(&c[12..16]))))
        .unzip();
    WaveformGrid::new(x, y, fs_hz, fc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_round_trip() {
        let dir = std::env::temp_dir().join(format!("octane-dump-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("w.bin");
        let x: Vec<Complex64> = (0..16).map(|i| Complex64::new(i as f64 * 0.25, -0.5)).collect();
        let y: Vec<Complex64> = (0..16).map(|i| Complex64::new(1.0, i as f64)).collect();
        let w = WaveformGrid::new(x, y, 1.6e11, 193.4e12).unwrap();
        w.write_dump(&path).unwrap();
        assert_eq!(fs::metadata(&path).unwrap().len(), 16 * 16);
        let back = read_dump(&path).unwrap();
        assert_eq!(back, w);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn rejects_unequal_polarisations() {
        assert!(WaveformGrid::new(vec![Complex64::default(); 2], vec![], 1.0, 1.0).is_err());
    }
}
