use std::fmt;

use super::constellation::{variance, BitWord, Constellation};
use super::stream::Symbol4DStream;
use crate::error::{Error, Result};

/// Which information bits the 8D parity bit covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParityType {
    /// `b12 = not(b1 ^ ... ^ b11)`
    T1,
    /// `b12 = not(b3 ^ b6 ^ b9)`
    T2,
}

impl fmt::Display for ParityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParityType::T1 => write!(f, "T1"),
            ParityType::T2 => write!(f, "T2"),
        }
    }
}

/// Parity bit `b12` for an 11-bit information word: the negated XOR of the
/// covered positions.
pub fn parity_bit(parity: ParityType, info: &BitWord) -> Result<u8> {
    if info.width() != 11 {
        return Err(Error::WordLength {
            expected: 11,
            found: info.width(),
        });
    }
    let xor = match parity {
        ParityType::T1 => (info.value().count_ones() & 1) as u8,
        ParityType::T2 => info.bit(3) ^ info.bit(6) ^ info.bit(9),
    };
    Ok(1 ^ xor)
}

/// A jointly demapped group of consecutive 4D slots inside a block.
///
/// Codewords are indexed by their label value.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeGroup {
    slots: usize,
    bits: usize,
    points: Vec<f64>,
}

impl CodeGroup {
    fn from_constellation(c: &Constellation) -> Self {
        CodeGroup {
            slots: 1,
            bits: c.bits(),
            points: c.points().to_vec(),
        }
    }

    /// Number of 4D slots spanned by one codeword.
    pub fn slots(&self) -> usize {
        self.slots
    }

    /// Information bits per codeword.
    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Real dimensions of one codeword.
    pub fn dimension(&self) -> usize {
        4 * self.slots
    }

    pub fn len(&self) -> usize {
        1 << self.bits
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn codeword(&self, label: usize) -> &[f64] {
        let d = self.dimension();
        &self.points[label * d..(label + 1) * d]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Nearest codeword to `y`; ties go to the lowest label.
    pub fn nearest(&self, y: &[f64]) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (l, c) in self.points.chunks_exact(self.dimension()).enumerate() {
            let d: f64 = c.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
            if d < best_d {
                best_d = d;
                best = l;
            }
        }
        best
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FormatKind {
    Plain4D(Constellation),
    Parity8D { base: Constellation, parity: ParityType },
    TimeHybrid { slots: Vec<Constellation> },
}

/// How information bits become a sequence of 4D slots.
///
/// A block is the smallest unit of the mapping: one 4D slot for plain
/// formats, two slots for the parity-extended and time-hybrid formats.
#[derive(Clone, Debug, PartialEq)]
pub struct FormatSpec {
    name: String,
    kind: FormatKind,
    groups: Vec<CodeGroup>,
}

impl FormatSpec {
    pub fn plain_4d(c: Constellation) -> Result<Self> {
        if c.dimension() != 4 {
            return Err(Error::Dimension {
                expected: 4,
                found: c.dimension(),
            });
        }
        Ok(FormatSpec {
            name: c.name().to_string(),
            groups: vec![CodeGroup::from_constellation(&c)],
            kind: FormatKind::Plain4D(c),
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &FormatKind {
        &self.kind
    }

    pub fn groups(&self) -> &[CodeGroup] {
        &self.groups
    }

    pub fn bits_per_block(&self) -> usize {
        self.groups.iter().map(|g| g.bits).sum()
    }

    pub fn slots_per_block(&self) -> usize {
        self.groups.iter().map(|g| g.slots).sum()
    }

    /// Spectral efficiency as `(bits, slots)` per block.
    pub fn bits_per_4d_ratio(&self) -> (usize, usize) {
        (self.bits_per_block(), self.slots_per_block())
    }

    pub fn bits_per_4d(&self) -> f64 {
        self.bits_per_block() as f64 / self.slots_per_block() as f64
    }

    /// Number of codewords in one block.
    pub fn block_codewords(&self) -> u64 {
        self.groups.iter().map(|g| g.len() as u64).product()
    }
}

fn require_bits(c: &Constellation, bits: usize, what: &str) -> Result<()> {
    if c.dimension() != 4 || c.bits() != bits {
        return Err(Error::Format(format!(
            "{what} must be a 4D {bits}-bit constellation, got {}D {}-bit `{}`",
            c.dimension(),
            c.bits(),
            c.name()
        )));
    }
    Ok(())
}

/// Two-slot format from a 64-point base with one parity bit.
///
/// Information bits `b1..b6` label the first slot; `b7..b11` followed by the
/// parity bit `b12` label the second slot.
pub fn extend_to_8d(base: &Constellation, parity: ParityType) -> Result<FormatSpec> {
    require_bits(base, 6, "8D base")?;
    let mut points = Vec::with_capacity(2048 * 8);
    for info in 0..2048u32 {
        let b12 = parity_bit(parity, &BitWord::new(info, 11))? as u32;
        let first = (info >> 5) as usize;
        let second = ((info & 0x1f) << 1 | b12) as usize;
        points.extend_from_slice(base.point(first));
        points.extend_from_slice(base.point(second));
    }
    let tag = match parity {
        ParityType::T1 => "t1",
        ParityType::T2 => "t2",
    };
    Ok(FormatSpec {
        name: format!("8d-{tag}"),
        groups: vec![CodeGroup {
            slots: 2,
            bits: 11,
            points,
        }],
        kind: FormatKind::Parity8D {
            base: base.clone(),
            parity,
        },
    })
}

/// Number of codewords of a parity-extended format whose slot points do not
/// decode to `(info, parity(info))`; `None` for other formats.
pub fn parity_violations(format: &FormatSpec) -> Option<usize> {
    let FormatKind::Parity8D { base, parity } = &format.kind else {
        return None;
    };
    let base_group = CodeGroup::from_constellation(base);
    let group = &format.groups[0];
    let bad = (0..group.len())
        .filter(|&info| {
            let cw = group.codeword(info);
            let first = base_group.nearest(&cw[..4]);
            let second = base_group.nearest(&cw[4..]);
            let exact = base.point(first) == &cw[..4] && base.point(second) == &cw[4..];
            let word = (first << 6 | second) as u32;
            let b12 = parity_bit(*parity, &BitWord::new(word >> 1, 11)).unwrap_or(2) as u32;
            !(exact && word >> 1 == info as u32 && word & 1 == b12)
        })
        .count();
    Some(bad)
}

/// Alternates a 5-bit and a 6-bit 4D constellation slot by slot.
pub fn build_time_hybrid(slot_a: &Constellation, slot_b: &Constellation) -> Result<FormatSpec> {
    require_bits(slot_a, 5, "time-hybrid slot A")?;
    require_bits(slot_b, 6, "time-hybrid slot B")?;
    Ok(FormatSpec {
        name: "th-2a8psk".to_string(),
        groups: vec![CodeGroup::from_constellation(slot_a), CodeGroup::from_constellation(slot_b)],
        kind: FormatKind::TimeHybrid {
            slots: vec![slot_a.clone(), slot_b.clone()],
        },
    })
}

/// Maps per-group codeword labels to slots. `labels` holds one entry per
/// group per block, in block order.
pub fn map_labels(format: &FormatSpec, labels: &[u32]) -> Symbol4DStream {
    let g = format.groups.len();
    assert_eq!(labels.len() % g, 0, "label count must cover whole blocks");
    let mut slots = Vec::with_capacity(labels.len() / g * format.slots_per_block());
    for (i, &l) in labels.iter().enumerate() {
        let group = &format.groups[i % g];
        for s in group.codeword(l as usize).chunks_exact(4) {
            slots.push([s[0], s[1], s[2], s[3]]);
        }
    }
    Symbol4DStream::new(slots)
}

/// Splits a bit stream into per-group labels.
pub fn bits_to_labels(format: &FormatSpec, bits: &[u8]) -> Result<Vec<u32>> {
    let block = format.bits_per_block();
    if bits.len() % block != 0 {
        return Err(Error::BlockLength {
            bits: bits.len(),
            block,
        });
    }
    let mut labels = Vec::with_capacity(bits.len() / block * format.groups.len());
    let mut rest = bits;
    while !rest.is_empty() {
        for group in &format.groups {
            let (word, tail) = rest.split_at(group.bits);
            labels.push(BitWord::from_bits(word)?.value());
            rest = tail;
        }
    }
    Ok(labels)
}

/// Maps a bit stream onto 4D slots; `b1` is the first bit of `bits`.
pub fn map_bits(format: &FormatSpec, bits: &[u8]) -> Result<Symbol4DStream> {
    let labels = bits_to_labels(format, bits)?;
    Ok(map_labels(format, &labels))
}

/// Nearest-codeword decision per group, returned as per-group labels.
pub fn decide_labels(format: &FormatSpec, stream: &Symbol4DStream) -> Result<Vec<u32>> {
    let per_block = format.slots_per_block();
    if stream.len() % per_block != 0 {
        return Err(Error::BlockLength {
            bits: stream.len(),
            block: per_block,
        });
    }
    let mut out = Vec::new();
    let mut y = Vec::with_capacity(8);
    let slots = stream.slots();
    let mut k = 0;
    while k < slots.len() {
        for group in &format.groups {
            y.clear();
            for s in &slots[k..k + group.slots] {
                y.extend_from_slice(s);
            }
            out.push(group.nearest(&y) as u32);
            k += group.slots;
        }
    }
    Ok(out)
}

/// Hard-decision demapping back to bits.
pub fn hard_decision(format: &FormatSpec, stream: &Symbol4DStream) -> Result<Vec<u8>> {
    let labels = decide_labels(format, stream)?;
    let g = format.groups.len();
    Ok(labels
        .iter()
        .enumerate()
        .flat_map(|(i, &l)| BitWord::new(l, format.groups[i % g].bits).bits())
        .collect())
}

/// Minimum pairwise distance of a row-major point set.
pub fn min_distance_of(points: &[f64], dimension: usize) -> f64 {
    let rows: Vec<&[f64]> = points.chunks_exact(dimension).collect();
    let mut best = f64::INFINITY;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let mut d = 0.0;
            for (a, b) in rows[i].iter().zip(rows[j]) {
                d += (a - b) * (a - b);
                if d >= best {
                    break;
                }
            }
            best = best.min(d);
        }
    }
    best.sqrt()
}

/// Minimum Euclidean distance over the block codeword space.
///
/// Blocks made of independent groups form a product space, whose minimum
/// distance is the smallest per-group minimum.
pub fn min_euclidean_distance(format: &FormatSpec) -> f64 {
    format
        .groups
        .iter()
        .map(|g| min_distance_of(&g.points, g.dimension()))
        .fold(f64::INFINITY, f64::min)
}

const POL_TOLERANCE: f64 = 1e-12;

/// Number of block codewords whose X and Y complex symbols coincide in every slot.
pub fn polarisation_identical_count(format: &FormatSpec) -> u64 {
    format
        .groups
        .iter()
        .map(|g| {
            g.points
                .chunks_exact(g.dimension())
                .filter(|cw| {
                    cw.chunks_exact(4)
                        .all(|s| (s[0] - s[2]).abs() < POL_TOLERANCE && (s[1] - s[3]).abs() < POL_TOLERANCE)
                })
                .count() as u64
        })
        .product()
}

/// Variance of per-slot squared norms over all codeword slots.
pub fn slot_norm_variance(format: &FormatSpec) -> f64 {
    let norms: Vec<f64> = format
        .groups
        .iter()
        .flat_map(|g| g.points.chunks_exact(4).map(|s| s.iter().map(|v| v * v).sum()))
        .collect();
    variance(&norms)
}
