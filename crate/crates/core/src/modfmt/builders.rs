//! Built-in constellations.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::constellation::Constellation;
use crate::error::{Error, Result};

/// Binary-reflected Gray code.
pub fn gray(n: u32) -> u32 {
    n ^ (n >> 1)
}

/// Per-polarisation 8QAM geometry used by PM-8QAM.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Qam8Geometry {
    /// 2x4 rectangular grid, `{±1} x {±1, ±3}`, Gray labeled.
    #[default]
    Rectangular,
    /// Two 4-point rings rotated by 45 degrees, radius ratio `1 + sqrt(3)`.
    Star,
}

impl fmt::Display for Qam8Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Qam8Geometry::Rectangular => write!(f, "rectangular"),
            Qam8Geometry::Star => write!(f, "star"),
        }
    }
}

impl FromStr for Qam8Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rectangular" | "rect" => Ok(Qam8Geometry::Rectangular),
            "star" => Ok(Qam8Geometry::Star),
            other => Err(Error::param("qam8_geometry", format!("unknown geometry `{other}`"))),
        }
    }
}

/// 3-bit labeled complex 8QAM points (unnormalised).
pub fn qam8_points(geometry: Qam8Geometry) -> Vec<(u32, [f64; 2])> {
    match geometry {
        Qam8Geometry::Rectangular => {
            let levels = [-3.0, -1.0, 1.0, 3.0];
            let mut out = Vec::with_capacity(8);
            for (i, re) in [-1.0, 1.0].into_iter().enumerate() {
                for (q, &im) in levels.iter().enumerate() {
                    out.push(((i as u32) << 2 | gray(q as u32), [re, im]));
                }
            }
            out
        }
        Qam8Geometry::Star => {
            // b1 selects the ring, b2b3 the Gray-coded quadrant.
            let outer = 1.0 + 3f64.sqrt();
            let mut out = Vec::with_capacity(8);
            for ring in 0..2u32 {
                let (r, offset) = if ring == 0 { (1.0, 0.0) } else { (outer, PI / 4.0) };
                for k in 0..4u32 {
                    let a = offset + PI / 2.0 * k as f64;
                    out.push((ring << 2 | gray(k), [r * a.cos(), r * a.sin()]));
                }
            }
            out
        }
    }
}

/// Cartesian product of a 2D constellation on both polarisations; the 4D
/// label is the X label followed by the Y label.
fn dual_pol(name: &str, bits_2d: usize, pts: &[(u32, [f64; 2])]) -> Constellation {
    let mut entries = Vec::with_capacity(pts.len() * pts.len());
    for &(lx, x) in pts {
        for &(ly, y) in pts {
            entries.push((lx << bits_2d | ly, vec![x[0], x[1], y[0], y[1]]));
        }
    }
    Constellation::from_labeled(name, 4, 2 * bits_2d, entries, true).expect("product labeling is complete")
}

/// PM-8QAM with the default rectangular geometry.
pub fn build_pm8qam() -> Constellation {
    build_pm8qam_with(Qam8Geometry::default())
}

pub fn build_pm8qam_with(geometry: Qam8Geometry) -> Constellation {
    dual_pol("pm8qam", 3, &qam8_points(geometry))
}

fn qpsk_points() -> Vec<(u32, [f64; 2])> {
    // Gray: b1 picks the sign of I, b2 the sign of Q.
    (0..4u32)
        .map(|l| {
            let re = if l & 0b10 == 0 { 1.0 } else { -1.0 };
            let im = if l & 0b01 == 0 { 1.0 } else { -1.0 };
            (l, [re, im])
        })
        .collect()
}

/// Gray-labeled single-polarisation QPSK (2D).
pub fn build_qpsk() -> Constellation {
    let entries = qpsk_points().into_iter().map(|(l, p)| (l, p.to_vec()));
    Constellation::from_labeled("qpsk", 2, 2, entries, true).expect("qpsk")
}

/// PM-QPSK (4 bits per 4D symbol).
pub fn build_pm_qpsk() -> Constellation {
    dual_pol("pm-qpsk", 2, &qpsk_points())
}

/// Two-amplitude 8PSK in 4D with complementary rings across polarisations.
///
/// Label bits `b1 b2 b3` Gray-select the X phase, `b4 b5 b6` the Y phase.
/// When the sum of the two phase indices is even X sits on the outer ring
/// and Y on the inner one, otherwise the rings are swapped, so every point
/// has the same 4D norm. `ring_ratio` is inner radius over outer radius.
///
/// With `m = 5` the constellation is the 32-point subset whose 6-bit labels
/// have even weight; the 5-bit label is `b1..b5` and `b6` is implied.
pub fn build_2a8psk(ring_ratio: f64, m: usize) -> Result<Constellation> {
    if !(ring_ratio > 0.0 && ring_ratio <= 1.0) {
        return Err(Error::param("ring_ratio", format!("{ring_ratio} outside (0, 1]")));
    }
    if m != 5 && m != 6 {
        return Err(Error::param("m", format!("{m} is not 5 or 6")));
    }
    let outer = 1.0;
    let inner = ring_ratio;
    let mut entries = Vec::new();
    for px in 0..8u32 {
        for py in 0..8u32 {
            let label6 = gray(px) << 3 | gray(py);
            let (rx, ry) = if (px + py) % 2 == 0 { (outer, inner) } else { (inner, outer) };
            let ax = PI / 4.0 * px as f64;
            let ay = PI / 4.0 * py as f64;
            let p = vec![rx * ax.cos(), rx * ax.sin(), ry * ay.cos(), ry * ay.sin()];
            if m == 6 {
                entries.push((label6, p));
            } else if label6.count_ones() % 2 == 0 {
                entries.push((label6 >> 1, p));
            }
        }
    }
    Constellation::from_labeled(format!("{m}b-4d-2a8psk"), 4, m, entries, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn min_distance(c: &Constellation) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                let d: f64 = c.point(i).iter().zip(c.point(j)).map(|(a, b)| (a - b) * (a - b)).sum();
                best = best.min(d);
            }
        }
        best.sqrt()
    }

    #[test]
    fn pm8qam_counts_and_energy() {
        let c = build_pm8qam();
        assert_eq!(c.len(), 64);
        assert_eq!(c.bits(), 6);
        assert!((c.mean_energy() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pm8qam_min_distance_is_per_pol_distance() {
        // Exhaustive scan over the 8 complex points, scaled like the 4D set.
        let pts = qam8_points(Qam8Geometry::Rectangular);
        let e2: f64 = pts.iter().map(|(_, p)| p[0] * p[0] + p[1] * p[1]).sum::<f64>() / 8.0;
        let scale = 1.0 / (2.0 * e2).sqrt();
        let mut d2d = f64::INFINITY;
        for i in 0..8 {
            for j in i + 1..8 {
                let (a, b) = (pts[i].1, pts[j].1);
                d2d = d2d.min(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
            }
        }
        let d4 = min_distance(&build_pm8qam());
        assert!((d4 - d2d * scale).abs() < 1e-12);
        assert!((d4 - 2.0 / 12f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn star_geometry_is_valid() {
        let c = build_pm8qam_with(Qam8Geometry::Star);
        assert_eq!(c.len(), 64);
        assert!((c.mean_energy() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unit_ring_ratio_is_pm8psk() {
        let c = build_2a8psk(1.0, 6).unwrap();
        let r = 1.0 / 2f64.sqrt();
        for l in 0..64 {
            let p = c.point(l);
            assert!(((p[0] * p[0] + p[1] * p[1]).sqrt() - r).abs() < 1e-12);
            assert!(((p[2] * p[2] + p[3] * p[3]).sqrt() - r).abs() < 1e-12);
        }
        // 64 distinct PM-8PSK positions.
        assert!(min_distance(&c) > 0.5);
    }

    #[test]
    fn two_ring_sets_are_constant_modulus() {
        for m in [5, 6] {
            let c = build_2a8psk(0.6, m).unwrap();
            assert_eq!(c.len(), 1 << m);
            assert!(c.norm_variance() < 1e-24);
            for l in 0..c.len() {
                let n: f64 = c.point(l).iter().map(|v| v * v).sum();
                assert!((n - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn five_bit_subset_is_even_weight() {
        // Enumerate the 6-bit set and check each 5-bit point is the even-weight member.
        let full = build_2a8psk(0.6, 6).unwrap();
        let sub = build_2a8psk(0.6, 5).unwrap();
        for l5 in 0..32u32 {
            let parity = l5.count_ones() % 2;
            let l6 = (l5 << 1 | parity) as usize;
            for (a, b) in sub.point(l5 as usize).iter().zip(full.point(l6)) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ring_ratio_range() {
        assert!(build_2a8psk(0.0, 6).is_err());
        assert!(build_2a8psk(1.2, 6).is_err());
        assert!(build_2a8psk(0.5, 4).is_err());
    }
}
