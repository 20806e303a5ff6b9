use std::f64::consts::LN_2;

use rand::Rng;
use rand_distr::StandardNormal;

use super::llr::{llrs_into, LlrMethod, PointSet, Scratch};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Workers};
use crate::modfmt::{FormatSpec, Symbol4DStream};
use crate::rng::stream;
use crate::stats::{db_to_linear, isotonic_increasing};

/// Blocks per independently seeded work item.
pub const CHUNK_BLOCKS: usize = 1024;
/// Smallest accepted Monte-Carlo size.
pub const MIN_BLOCKS: usize = 1000;
pub const DEFAULT_BLOCKS: usize = 100_000;
pub const DEFAULT_SEED: u64 = 1;

/// Outcome of a GMI estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct GmiReport {
    /// Mutual information per bit level of the block, in bit.
    pub per_bit_mi: Vec<f64>,
    /// Sum of `per_bit_mi`, in bit per block.
    pub gmi: f64,
    /// `gmi / m`.
    pub ngmi: f64,
    /// Information bits per block.
    pub m: usize,
    /// Nominal (AWGN) or estimated (link) SNR per 4D slot, dB.
    pub snr_db: f64,
    pub n_blocks: usize,
    /// Standard error of `gmi` from the per-block samples.
    pub std_error: f64,
}

/// Noise variance per real dimension for unit-energy 4D slots at `snr_db`.
pub fn snr_to_sigma2(snr_db: f64) -> f64 {
    1.0 / (4.0 * db_to_linear(snr_db))
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

#[derive(Clone, Debug)]
struct Accumulator {
    penalty: Vec<f64>,
    block_sum: f64,
    block_sq: f64,
    n: usize,
}

impl Accumulator {
    fn new(m: usize) -> Self {
        Accumulator {
            penalty: vec![0.0; m],
            block_sum: 0.0,
            block_sq: 0.0,
            n: 0,
        }
    }

    fn merge(&mut self, other: &Accumulator) {
        for (a, b) in self.penalty.iter_mut().zip(&other.penalty) {
            *a += b;
        }
        self.block_sum += other.block_sum;
        self.block_sq += other.block_sq;
        self.n += other.n;
    }

    fn finish(self, snr_db: f64) -> GmiReport {
        let n = self.n as f64;
        let m = self.penalty.len();
        let per_bit_mi: Vec<f64> = self.penalty.iter().map(|p| (1.0 - p / n).clamp(0.0, 1.0)).collect();
        let gmi: f64 = per_bit_mi.iter().sum();
        let mean = self.block_sum / n;
        let var = (self.block_sq / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
        GmiReport {
            ngmi: gmi / m as f64,
            per_bit_mi,
            gmi,
            m,
            snr_db,
            n_blocks: self.n,
            std_error: (var / n).sqrt(),
        }
    }
}

/// Demaps one block and adds its bit penalties `log2(1 + e^{-+LLR})`.
struct BlockDemapper<'a> {
    format: &'a FormatSpec,
    sigma2: f64,
    method: LlrMethod,
    scratch: Scratch,
    llr: Vec<f64>,
}

impl<'a> BlockDemapper<'a> {
    fn new(format: &'a FormatSpec, sigma2: f64, method: LlrMethod) -> Self {
        BlockDemapper {
            format,
            sigma2,
            method,
            scratch: Scratch::new(),
            llr: vec![0.0; 32],
        }
    }

    /// `labels`: one label per group; `y`: the block's received coordinates.
    fn add(&mut self, labels: &[u32], y: &[f64], acc: &mut Accumulator) {
        let mut offset_bits = 0;
        let mut offset_dim = 0;
        let mut total = 0.0;
        for (group, &label) in self.format.groups().iter().zip(labels) {
            let d = group.dimension();
            let set: PointSet<'_> = group.into();
            llrs_into(&set, &y[offset_dim..offset_dim + d], self.sigma2, self.method, &mut self.scratch, &mut self.llr);
            let bits = group.bits();
            for k in 0..bits {
                let bit = (label >> (bits - 1 - k)) & 1;
                let l = self.llr[k];
                let p = if bit == 0 { softplus(-l) } else { softplus(l) } / LN_2;
                acc.penalty[offset_bits + k] += p;
                total += p;
            }
            offset_bits += bits;
            offset_dim += d;
        }
        acc.block_sum += total;
        acc.block_sq += total * total;
        acc.n += 1;
    }
}

/// Monte-Carlo GMI estimator settings.
#[derive(Clone, Copy, Debug)]
pub struct MonteCarlo {
    pub workers: Workers,
    pub method: LlrMethod,
    /// Demapper variance over true variance; 1 is matched demapping.
    pub mismatch: f64,
}

impl Default for MonteCarlo {
    fn default() -> Self {
        MonteCarlo {
            workers: Workers::from_env(),
            method: LlrMethod::Exact,
            mismatch: 1.0,
        }
    }
}

impl MonteCarlo {
    pub fn with_workers(workers: Workers) -> Self {
        MonteCarlo {
            workers,
            ..MonteCarlo::default()
        }
    }

    /// GMI of `format` over AWGN at `snr_db` per 4D slot.
    ///
    /// Blocks are drawn in chunks of [`CHUNK_BLOCKS`]; chunk `c` uses the
    /// random stream derived from `(seed, c)`, so the report does not depend
    /// on the number of workers.
    pub fn gmi(&self, format: &FormatSpec, snr_db: f64, n_blocks: usize, seed: u64) -> Result<GmiReport> {
        if n_blocks < MIN_BLOCKS {
            return Err(Error::param("n_blocks", format!("{n_blocks} < {MIN_BLOCKS}")));
        }
        if !snr_db.is_finite() {
            return Err(Error::param("snr_db", "not finite"));
        }
        let sigma2 = snr_to_sigma2(snr_db);
        let sigma = sigma2.sqrt();
        let demap_sigma2 = sigma2 * self.mismatch;
        let m = format.bits_per_block();
        let dim = 4 * format.slots_per_block();
        let chunks = n_blocks.div_ceil(CHUNK_BLOCKS);
        let parts = map_indexed(self.workers, chunks, |c| {
            let mut rng = stream(seed, c as u64);
            let mut demapper = BlockDemapper::new(format, demap_sigma2, self.method);
            let mut acc = Accumulator::new(m);
            let mut labels = Vec::with_capacity(format.groups().len());
            let mut y = Vec::with_capacity(dim);
            let count = CHUNK_BLOCKS.min(n_blocks - c * CHUNK_BLOCKS);
            for _ in 0..count {
                labels.clear();
                y.clear();
                for group in format.groups() {
                    let l = rng.random_range(0..group.len() as u32);
                    labels.push(l);
                    for &v in group.codeword(l as usize) {
                        let z: f64 = rng.sample(StandardNormal);
                        y.push(v + sigma * z);
                    }
                }
                demapper.add(&labels, &y, &mut acc);
            }
            acc
        });
        let mut total = Accumulator::new(m);
        for p in &parts {
            total.merge(p);
        }
        Ok(total.finish(snr_db))
    }

    /// SNR at which the isotonic-smoothed NGMI reaches `target_ngmi`.
    ///
    /// Bisection over `bracket` with a fixed seed; stops when the interval is
    /// narrower than 0.05 dB and returns its midpoint.
    pub fn required_snr(
        &self,
        format: &FormatSpec,
        target_ngmi: f64,
        bracket: (f64, f64),
        n_blocks: usize,
        seed: u64,
    ) -> Result<f64> {
        const MAX_ITER: usize = 30;
        const WIDTH_DB: f64 = 0.05;
        if !(target_ngmi > 0.0 && target_ngmi < 1.0) {
            return Err(Error::param("target_ngmi", format!("{target_ngmi} outside (0, 1)")));
        }
        let (mut lo, mut hi) = bracket;
        if !(lo < hi) {
            return Err(Error::param("bracket", format!("[{lo}, {hi}] is empty")));
        }
        let mut seen: Vec<(f64, f64)> = Vec::new();
        let eval = |snr: f64, seen: &mut Vec<(f64, f64)>| -> Result<f64> {
            let r = self.gmi(format, snr, n_blocks, seed)?;
            let pos = seen.partition_point(|&(s, _)| s < snr);
            seen.insert(pos, (snr, r.ngmi));
            let fit = isotonic_increasing(&seen.iter().map(|p| p.1).collect::<Vec<_>>());
            Ok(fit[pos])
        };
        eval(lo, &mut seen)?;
        eval(hi, &mut seen)?;
        let fit = isotonic_increasing(&seen.iter().map(|p| p.1).collect::<Vec<_>>());
        if !(fit[0] < target_ngmi && target_ngmi <= fit[1]) {
            return Err(Error::Bracket {
                low_db: lo,
                high_db: hi,
                target: target_ngmi,
            });
        }
        for _ in 0..MAX_ITER {
            if hi - lo < WIDTH_DB {
                return Ok(0.5 * (lo + hi));
            }
            let mid = 0.5 * (lo + hi);
            if eval(mid, &mut seen)? < target_ngmi {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::NoConvergence(MAX_ITER))
    }
}

/// AWGN Monte-Carlo GMI with default settings.
pub fn gmi_monte_carlo(format: &FormatSpec, snr_db: f64, n_blocks: usize, seed: u64) -> Result<GmiReport> {
    MonteCarlo::default().gmi(format, snr_db, n_blocks, seed)
}

/// Bisection for the SNR reaching `target_ngmi` with the default Monte-Carlo size.
pub fn required_snr(format: &FormatSpec, target_ngmi: f64, bracket: (f64, f64)) -> Result<f64> {
    MonteCarlo::default().required_snr(format, target_ngmi, bracket, DEFAULT_BLOCKS, DEFAULT_SEED)
}

/// NGMI for equiprobable information words: `gmi / m`.
pub fn ngmi_from_gmi(gmi: f64, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::param("m", "must be positive"));
    }
    if !(0.0..=m as f64).contains(&gmi) {
        return Err(Error::param("gmi", format!("{gmi} outside [0, {m}]")));
    }
    Ok(gmi / m as f64)
}

/// GMI from received slots with known transmitted labels.
///
/// `labels` holds one label per group per block (as produced for mapping),
/// `sigma2` is the demapper's noise variance per real dimension.
pub fn gmi_from_observations(
    format: &FormatSpec,
    labels: &[u32],
    received: &Symbol4DStream,
    sigma2: f64,
    snr_db: f64,
    workers: Workers,
) -> Result<GmiReport> {
    let groups = format.groups().len();
    let per_block = format.slots_per_block();
    let blocks = labels.len() / groups;
    if labels.len() % groups != 0 || received.len() != blocks * per_block {
        return Err(Error::BlockLength {
            bits: received.len(),
            block: per_block,
        });
    }
    if !(sigma2 > 0.0) {
        return Err(Error::param("sigma2", format!("{sigma2} is not positive")));
    }
    let m = format.bits_per_block();
    let chunks = blocks.div_ceil(CHUNK_BLOCKS);
    let slots = received.slots();
    let parts = map_indexed(workers, chunks, |c| {
        let mut demapper = BlockDemapper::new(format, sigma2, LlrMethod::Exact);
        let mut acc = Accumulator::new(m);
        let mut y = Vec::with_capacity(4 * per_block);
        let end = ((c + 1) * CHUNK_BLOCKS).min(blocks);
        for b in c * CHUNK_BLOCKS..end {
            y.clear();
            for s in &slots[b * per_block..(b + 1) * per_block] {
                y.extend_from_slice(s);
            }
            demapper.add(&labels[b * groups..(b + 1) * groups], &y, &mut acc);
        }
        acc
    });
    let mut total = Accumulator::new(m);
    for p in &parts {
        total.merge(p);
    }
    Ok(total.finish(snr_db))
}
