use crate::error::{Error, Result};
use crate::modfmt::{CodeGroup, Constellation};

/// Gaussian noise variance per real dimension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    variance: f64,
}

impl NoiseModel {
    pub fn new(variance_per_real_dimension: f64) -> Result<Self> {
        if !(variance_per_real_dimension > 0.0 && variance_per_real_dimension.is_finite()) {
            return Err(Error::param("variance", format!("{variance_per_real_dimension} is not positive")));
        }
        Ok(NoiseModel {
            variance: variance_per_real_dimension,
        })
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LlrMethod {
    /// Log-sum-exp over every codeword.
    #[default]
    Exact,
    /// Keeps only the best codeword of each partition.
    MaxLog,
}

/// Labeled point set viewed by the demapper.
pub(crate) struct PointSet<'a> {
    pub points: &'a [f64],
    pub dimension: usize,
    pub bits: usize,
}

impl<'a> From<&'a CodeGroup> for PointSet<'a> {
    fn from(g: &'a CodeGroup) -> Self {
        PointSet {
            points: g.points(),
            dimension: g.dimension(),
            bits: g.bits(),
        }
    }
}

impl<'a> From<&'a Constellation> for PointSet<'a> {
    fn from(c: &'a Constellation) -> Self {
        PointSet {
            points: c.points(),
            dimension: c.dimension(),
            bits: c.bits(),
        }
    }
}

/// Reusable buffers for one demapping worker.
pub(crate) struct Scratch {
    metric: Vec<f64>,
    weight: Vec<f64>,
}

impl Scratch {
    pub fn new() -> Self {
        Scratch {
            metric: Vec::new(),
            weight: Vec::new(),
        }
    }
}

/// Sum of `w[j]` over labels `j` whose bit at (MSB-first) position `k` is set.
fn partition_sums(w: &[f64], bits: usize, ones: &mut [f64], zeros: &mut [f64]) {
    for k in 0..bits {
        let stride = 1usize << (bits - 1 - k);
        let (mut s0, mut s1) = (0.0, 0.0);
        for chunk in w.chunks_exact(2 * stride) {
            s0 += chunk[..stride].iter().sum::<f64>();
            s1 += chunk[stride..].iter().sum::<f64>();
        }
        zeros[k] = s0;
        ones[k] = s1;
    }
}

fn partition_max(metric: &[f64], bits: usize, k: usize, bit: usize) -> f64 {
    let stride = 1usize << (bits - 1 - k);
    metric
        .chunks_exact(2 * stride)
        .flat_map(|c| c[bit * stride..(bit + 1) * stride].iter())
        .fold(f64::NEG_INFINITY, |a, &b| a.max(b))
}

fn partition_lse(metric: &[f64], bits: usize, k: usize, bit: usize) -> f64 {
    let m = partition_max(metric, bits, k, bit);
    let stride = 1usize << (bits - 1 - k);
    let s: f64 = metric
        .chunks_exact(2 * stride)
        .flat_map(|c| c[bit * stride..(bit + 1) * stride].iter())
        .map(|&v| (v - m).exp())
        .sum();
    m + s.ln()
}

/// Writes the LLRs of `y` into `out` (positive favours bit 0).
pub(crate) fn llrs_into(set: &PointSet<'_>, y: &[f64], sigma2: f64, method: LlrMethod, scratch: &mut Scratch, out: &mut [f64]) {
    let d = set.dimension;
    let n = set.points.len() / d;
    let inv = 1.0 / (2.0 * sigma2);
    scratch.metric.clear();
    let mut best = f64::NEG_INFINITY;
    for x in set.points.chunks_exact(d) {
        let mut dist = 0.0;
        for (a, b) in x.iter().zip(y) {
            dist += (a - b) * (a - b);
        }
        let m = -dist * inv;
        best = best.max(m);
        scratch.metric.push(m);
    }
    debug_assert_eq!(scratch.metric.len(), n);
    match method {
        LlrMethod::MaxLog => {
            for (k, o) in out.iter_mut().enumerate().take(set.bits) {
                *o = partition_max(&scratch.metric, set.bits, k, 0) - partition_max(&scratch.metric, set.bits, k, 1);
            }
        }
        LlrMethod::Exact => {
            scratch.weight.clear();
            scratch.weight.extend(scratch.metric.iter().map(|m| (m - best).exp()));
            let mut ones = [0.0; 32];
            let mut zeros = [0.0; 32];
            partition_sums(&scratch.weight, set.bits, &mut ones, &mut zeros);
            for k in 0..set.bits {
                let (s0, s1) = (zeros[k], ones[k]);
                out[k] = if s0 >= f64::MIN_POSITIVE && s1 >= f64::MIN_POSITIVE {
                    s0.ln() - s1.ln()
                } else {
                    // One partition underflowed relative to the global maximum.
                    partition_lse(&scratch.metric, set.bits, k, 0) - partition_lse(&scratch.metric, set.bits, k, 1)
                };
            }
        }
    }
}

/// LLR of every bit level of `constellation` for the observation `received`.
pub fn bit_llrs(constellation: &Constellation, received: &[f64], noise: NoiseModel, method: LlrMethod) -> Result<Vec<f64>> {
    if received.len() != constellation.dimension() {
        return Err(Error::Dimension {
            expected: constellation.dimension(),
            found: received.len(),
        });
    }
    let mut out = vec![0.0; constellation.bits()];
    llrs_into(&constellation.into(), received, noise.variance(), method, &mut Scratch::new(), &mut out);
    Ok(out)
}

/// LLRs for one codeword group of a format (joint demapping over its slots).
pub fn group_llrs(group: &CodeGroup, received: &[f64], noise: NoiseModel, method: LlrMethod) -> Result<Vec<f64>> {
    if received.len() != group.dimension() {
        return Err(Error::Dimension {
            expected: group.dimension(),
            found: received.len(),
        });
    }
    let mut out = vec![0.0; group.bits()];
    llrs_into(&group.into(), received, noise.variance(), method, &mut Scratch::new(), &mut out);
    Ok(out)
}
