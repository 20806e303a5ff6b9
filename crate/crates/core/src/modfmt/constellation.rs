use std::fmt;

use crate::error::{Error, Result};

/// Tolerance on the unit mean-energy invariant.
pub const ENERGY_TOLERANCE: f64 = 1e-12;

/// A fixed-width binary word. Position 1 (`b1`) is the most significant bit
/// and the first bit consumed from a bit stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitWord {
    value: u32,
    width: u8,
}

impl BitWord {
    pub fn new(value: u32, width: usize) -> Self {
        assert!(width <= 32, "bit words are at most 32 bits wide");
        let mask = if width == 32 { u32::MAX } else { (1u32 << width) - 1 };
        BitWord {
            value: value & mask,
            width: width as u8,
        }
    }

    /// Builds a word from a slice of 0/1 values, `bits[0]` being `b1`.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.len() > 32 {
            return Err(Error::param("bits", "more than 32 bits"));
        }
        let mut value = 0u32;
        for &b in bits {
            if b > 1 {
                return Err(Error::param("bits", format!("bit value {b} is not binary")));
            }
            value = (value << 1) | b as u32;
        }
        Ok(BitWord::new(value, bits.len()))
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    /// Bit at 1-based position `pos`.
    pub fn bit(&self, pos: usize) -> u8 {
        assert!(pos >= 1 && pos <= self.width(), "bit position {pos} out of range");
        ((self.value >> (self.width() - pos)) & 1) as u8
    }

    pub fn bits(&self) -> Vec<u8> {
        (1..=self.width()).map(|p| self.bit(p)).collect()
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in 1..=self.width() {
            write!(f, "{}", self.bit(p))?;
        }
        Ok(())
    }
}

/// A labeled point set in `dimension` real dimensions with `2^bits` points.
///
/// Points are stored ordered by label value, so the point carrying label
/// `l` is `point(l)`. A constellation always has unit mean energy.
#[derive(Clone, Debug, PartialEq)]
pub struct Constellation {
    name: String,
    dimension: usize,
    bits: usize,
    points: Vec<f64>,
}

impl Constellation {
    /// Validates labeled points and builds a constellation.
    ///
    /// With `normalize` the points are scaled to unit mean energy; otherwise
    /// they must already satisfy it.
    pub fn from_labeled<I>(name: impl Into<String>, dimension: usize, bits: usize, entries: I, normalize: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, Vec<f64>)>,
    {
        if dimension == 0 {
            return Err(Error::param("dimension", "must be positive"));
        }
        if bits == 0 || bits > 16 {
            return Err(Error::param("bits", format!("{bits} outside 1..=16")));
        }
        let count = 1usize << bits;
        let mut slots: Vec<Option<Vec<f64>>> = vec![None; count];
        let mut found = 0;
        for (label, coords) in entries {
            found += 1;
            if coords.len() != dimension {
                return Err(Error::Dimension {
                    expected: dimension,
                    found: coords.len(),
                });
            }
            if coords.iter().any(|c| !c.is_finite()) {
                return Err(Error::param("points", "non-finite coordinate"));
            }
            let idx = label as usize;
            if idx >= count {
                return Err(Error::param("labels", format!("label {label} needs more than {bits} bits")));
            }
            if slots[idx].is_some() {
                return Err(Error::DuplicateLabel(BitWord::new(label, bits).to_string()));
            }
            slots[idx] = Some(coords);
        }
        if found != count {
            return Err(Error::PointCount { expected: count, found });
        }
        let points: Vec<f64> = slots.into_iter().flat_map(|p| p.unwrap()).collect();
        let mut c = Constellation {
            name: name.into(),
            dimension,
            bits,
            points,
        };
        if normalize {
            c = c.normalized();
        } else {
            let e = c.mean_energy();
            if (e - 1.0).abs() > ENERGY_TOLERANCE {
                return Err(Error::NotNormalized(e));
            }
        }
        Ok(c)
    }

    /// Rescales to unit mean energy.
    pub fn normalized(mut self) -> Self {
        let e = self.mean_energy();
        if e > 0.0 {
            let s = 1.0 / e.sqrt();
            self.points.iter_mut().for_each(|p| *p *= s);
        }
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Bits per point (`m`).
    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn len(&self) -> usize {
        1 << self.bits
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Point carrying label `label`.
    pub fn point(&self, label: usize) -> &[f64] {
        &self.points[label * self.dimension..(label + 1) * self.dimension]
    }

    /// All coordinates, row-major, ordered by label.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn labels(&self) -> impl Iterator<Item = BitWord> + '_ {
        (0..self.len() as u32).map(move |l| BitWord::new(l, self.bits))
    }

    pub fn mean_energy(&self) -> f64 {
        self.points.iter().map(|c| c * c).sum::<f64>() / self.len() as f64
    }

    /// Variance of the squared norms of the points.
    pub fn norm_variance(&self) -> f64 {
        let norms: Vec<f64> = self
            .points
            .chunks(self.dimension)
            .map(|p| p.iter().map(|c| c * c).sum())
            .collect();
        variance(&norms)
    }
}

pub(crate) fn variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
}
