use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Workers};
use crate::metrics::{gmi_from_observations, GmiReport};
use crate::modfmt::{map_labels, FormatSpec, Symbol4DStream};
use crate::phy::{cd_compensate, channel_select, matched_filter_downsample, rrc_shape, wdm_mux, WaveformGrid};
use crate::rng::{derive_seed, stream};
use crate::stats::linear_to_db;

use super::config::LinkTemplate;

/// Seed branch for transmitted data; noise uses other branches.
pub(crate) const DATA_BRANCH: u64 = 1;
pub(crate) const NOISE_BRANCH: u64 = 2;

/// Smallest noise variance handed to the demapper.
const SIGMA2_FLOOR: f64 = 1e-12;

/// Multiplexed transmitter output and the centre channel's labels.
#[derive(Clone, Debug)]
pub struct ChannelSet {
    pub waveform: WaveformGrid,
    /// One label per group per block for the centre channel.
    pub labels: Vec<u32>,
}

fn random_labels(format: &FormatSpec, blocks: usize, seed: u64, channel: usize) -> Vec<u32> {
    let mut rng = stream(derive_seed(seed, DATA_BRANCH), channel as u64);
    let mut labels = Vec::with_capacity(blocks * format.groups().len());
    for _ in 0..blocks {
        for g in format.groups() {
            labels.push(rng.random_range(0..g.len() as u32));
        }
    }
    labels
}

/// Draws independent data for every WDM channel, shapes and multiplexes it.
/// Channel `i` is delayed by `((i - centre) mod channels) * decorrelation_symbols`
/// symbols, so the centre channel is not delayed.
pub fn transmit(format: &FormatSpec, link: &LinkTemplate, seed: u64, workers: Workers) -> Result<ChannelSet> {
    let per_block = format.slots_per_block();
    if link.symbols % per_block != 0 {
        return Err(Error::BlockLength {
            bits: link.symbols,
            block: per_block,
        });
    }
    let blocks = link.symbols / per_block;
    let fc = link.center_frequency();
    let shaped = map_indexed(workers, link.channels, |ch| {
        let labels = random_labels(format, blocks, seed, ch);
        let w = rrc_shape(&map_labels(format, &labels), link.rolloff, link.samples_per_symbol, link.symbol_rate, fc);
        w.map(|w| (w, labels))
    });
    let mut waveforms = Vec::with_capacity(link.channels);
    let mut labels = Vec::new();
    let centre = link.channels / 2;
    for (i, r) in shaped.into_iter().enumerate() {
        let (w, l) = r?;
        waveforms.push(w);
        if i == centre {
            labels = l;
        }
    }
    let n = link.symbols * link.samples_per_symbol;
    let delays: Vec<usize> = (0..link.channels)
        .map(|i| ((i + link.channels - centre) % link.channels * link.decorrelation_symbols * link.samples_per_symbol) % n)
        .collect();
    let waveform = wdm_mux(&waveforms, link.spacing_hz, &delays)?;
    Ok(ChannelSet { waveform, labels })
}

/// Ideal coherent receiver for the centre channel: channel selection,
/// dispersion compensation, matched filtering, a data-aided complex gain per
/// polarisation, noise variance estimation and joint demapping.
pub fn receive(
    waveform: &WaveformGrid,
    format: &FormatSpec,
    labels: &[u32],
    link: &LinkTemplate,
    accumulated_dispersion: f64,
    workers: Workers,
) -> Result<GmiReport> {
    let bw = ((1.0 + link.rolloff) * link.symbol_rate).min(waveform.sample_rate);
    let w = channel_select(waveform, 0.0, bw)?;
    let w = cd_compensate(&w, accumulated_dispersion)?;
    let rx = matched_filter_downsample(&w, link.rolloff, link.samples_per_symbol, link.symbol_rate)?;
    let tx = map_labels(format, labels);
    if rx.len() != tx.len() {
        return Err(Error::param("waveform", format!("{} symbols received, {} sent", rx.len(), tx.len())));
    }
    let (rx_x, rx_y) = (rx.x(), rx.y());
    let (tx_x, tx_y) = (tx.x(), tx.y());
    let equalise = |r: &[Complex64], s: &[Complex64]| -> Vec<Complex64> {
        let num: Complex64 = r.iter().zip(s).map(|(a, b)| a * b.conj()).sum();
        let den: f64 = s.iter().map(|b| b.norm_sqr()).sum();
        let h = num / den;
        if h.norm() == 0.0 {
            return r.to_vec();
        }
        r.iter().map(|a| a / h).collect()
    };
    let ex = equalise(&rx_x, &tx_x);
    let ey = equalise(&rx_y, &tx_y);
    let err: f64 = ex
        .iter()
        .zip(&tx_x)
        .chain(ey.iter().zip(&tx_y))
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    let sigma2 = (err / (4 * tx.len()) as f64).max(SIGMA2_FLOOR);
    let snr_db = linear_to_db(tx.mean_energy() / (4.0 * sigma2));
    let eq = Symbol4DStream::from_polarisations(&ex, &ey);
    gmi_from_observations(format, labels, &eq, sigma2, snr_db, workers)
}
