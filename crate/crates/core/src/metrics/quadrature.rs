//! Symbol-wise mutual information by Gauss-Hermite quadrature.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Workers};
use crate::modfmt::Constellation;
use crate::stats::db_to_linear;

/// Nodes and weights for `∫ e^{-t²} f(t) dt ≈ Σ w_i f(t_i)`.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    const PIM4: f64 = 0.751_125_544_464_942_5; // pi^(-1/4)
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 3e-14 {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Quadrature nodes per real dimension.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureOrder {
    pub two_d: usize,
    pub four_d: usize,
}

impl Default for QuadratureOrder {
    fn default() -> Self {
        QuadratureOrder { two_d: 48, four_d: 12 }
    }
}

/// Mutual information (bit per point) of a uniformly used constellation over
/// AWGN at `snr_db` (signal energy over total noise power in its dimensions).
pub fn mi_reference(constellation: &Constellation, snr_db: f64) -> Result<f64> {
    mi_reference_with(constellation, snr_db, QuadratureOrder::default(), Workers::from_env())
}

pub fn mi_reference_with(constellation: &Constellation, snr_db: f64, order: QuadratureOrder, workers: Workers) -> Result<f64> {
    let d = constellation.dimension();
    let n = match d {
        2 => order.two_d,
        4 => order.four_d,
        _ => return Err(Error::Dimension { expected: 4, found: d }),
    };
    if constellation.len() > 256 {
        return Err(Error::param("constellation", "more than 256 points"));
    }
    let sigma2 = constellation.mean_energy() / (d as f64 * db_to_linear(snr_db));
    let (t, w) = gauss_hermite(n);
    // Product rule nodes z = sqrt(2) sigma t with weights normalised to 1.
    let count = n.pow(d as u32);
    let scale = (2.0 * sigma2).sqrt();
    let norm = PI.powf(-(d as f64) / 2.0);
    let mut nodes = Vec::with_capacity(count * d);
    let mut weights = Vec::with_capacity(count);
    for idx in 0..count {
        let mut rem = idx;
        let mut wt = norm;
        for _ in 0..d {
            let k = rem % n;
            rem /= n;
            nodes.push(scale * t[k]);
            wt *= w[k];
        }
        weights.push(wt);
    }
    let m = constellation.len();
    let inv = 1.0 / (2.0 * sigma2);
    let per_point = map_indexed(workers, m, |i| {
        let xi = constellation.point(i);
        // d_ij = x_i - x_j; exponent = -(|d|^2 + 2 d.z) / (2 sigma^2)
        let diffs: Vec<f64> = (0..m)
            .flat_map(|j| xi.iter().zip(constellation.point(j)).map(|(a, b)| a - b).collect::<Vec<_>>())
            .collect();
        let sq: Vec<f64> = diffs.chunks_exact(d).map(|v| v.iter().map(|c| c * c).sum()).collect();
        let mut acc = 0.0;
        let mut expo = vec![0.0; m];
        for (z, &wt) in nodes.chunks_exact(d).zip(&weights) {
            let mut best = f64::NEG_INFINITY;
            for (j, dij) in diffs.chunks_exact(d).enumerate() {
                let dot: f64 = dij.iter().zip(z).map(|(a, b)| a * b).sum();
                let e = -(sq[j] + 2.0 * dot) * inv;
                expo[j] = e;
                best = best.max(e);
            }
            let s: f64 = expo.iter().map(|e| (e - best).exp()).sum();
            acc += wt * (best + s.ln());
        }
        acc
    });
    let mean_log: f64 = per_point.iter().sum::<f64>() / m as f64;
    Ok((m as f64).log2() - mean_log / std::f64::consts::LN_2)
}
