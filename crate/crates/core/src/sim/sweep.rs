use crate::error::{Error, Result};
use crate::exec::{map_indexed, Workers};
use crate::metrics::MonteCarlo;
use crate::modfmt::FormatSpec;
use crate::phy::{launch, propagate_span, Amplifier};
use crate::rng::derive_seed;
use crate::stats::isotonic_decreasing;

use super::chain::{receive, transmit, NOISE_BRANCH};
use super::config::{Axis, SweepConfig};
use super::registry::build_format;
use super::result::{SweepResult, SweepRow};

fn expect_axis(config: &SweepConfig, axis: Axis) -> Result<()> {
    config.validate()?;
    if config.axis != axis {
        return Err(Error::Config(format!("sweep.axis is {}, expected {}", config.axis, axis)));
    }
    Ok(())
}

fn formats(config: &SweepConfig) -> Result<Vec<FormatSpec>> {
    config.formats.iter().map(|id| build_format(id, &config.format)).collect()
}

fn notes(config: &SweepConfig) -> Vec<(String, String)> {
    let base = match &config.format.base_file {
        Some(p) => p.display().to_string(),
        None => "bundled 4d-64prs".to_string(),
    };
    let mut out = vec![
        ("base_constellation".to_string(), base),
        ("center_frequency_hz".to_string(), format!("{}", config.link.center_frequency())),
    ];
    if config.axis != Axis::SnrDb {
        out.push(("amplifier_gain_db".to_string(), format!("{}", config.link.span.loss_db())));
    }
    out
}

/// GMI over AWGN for every format and SNR point. All rows share the seed.
pub fn awgn_sweep(config: &SweepConfig, workers: Workers) -> Result<SweepResult> {
    expect_axis(config, Axis::SnrDb)?;
    let fs = formats(config)?;
    let n = config.axis_points.len();
    let mc = MonteCarlo::with_workers(Workers::serial());
    let rows = map_indexed(workers, fs.len() * n, |t| {
        let (f, snr) = (&fs[t / n], config.axis_points[t % n]);
        mc.gmi(f, snr, config.n_blocks, config.seed).map(|report| SweepRow {
            format: f.name().to_string(),
            axis_value: snr,
            report,
        })
    });
    Ok(SweepResult::new(config.clone(), rows.into_iter().collect::<Result<_>>()?, notes(config)))
}

fn amplifier(config: &SweepConfig) -> Amplifier {
    Amplifier {
        gain_db: config.link.span.loss_db(),
        noise_figure_db: config.link.noise_figure_db,
        ase: true,
    }
}

/// NGMI of the centre channel against span count. Each format's link is
/// propagated once, tapping the field at every requested span count; span
/// `i` always uses the noise seed derived from `(seed, i)`.
pub fn reach_sweep(config: &SweepConfig, workers: Workers) -> Result<SweepResult> {
    expect_axis(config, Axis::DistanceSpans)?;
    let fs = formats(config)?;
    let link = &config.link;
    let amp = amplifier(config);
    let noise_seed = derive_seed(config.seed, NOISE_BRANCH);
    let points: Vec<usize> = config.axis_points.iter().map(|v| *v as usize).collect();
    let max = points.last().copied().unwrap_or(0);
    let per_format = map_indexed(workers, fs.len(), |i| -> Result<Vec<SweepRow>> {
        let f = &fs[i];
        let tx = transmit(f, link, config.seed, Workers::serial())?;
        let mut w = launch(&tx.waveform, link.launch_power_dbm)?;
        let mut rows = Vec::with_capacity(points.len());
        for n in 0..=max {
            if n > 0 {
                w = propagate_span(&w, &link.span, &amp, noise_seed, n - 1)?;
            }
            if points.contains(&n) {
                let dispersion = n as f64 * link.span.accumulated_dispersion();
                let report = receive(&w, f, &tx.labels, link, dispersion, Workers::serial())?;
                rows.push(SweepRow {
                    format: f.name().to_string(),
                    axis_value: n as f64,
                    report,
                });
            }
        }
        Ok(rows)
    });
    let mut rows = Vec::new();
    for r in per_format {
        rows.extend(r?);
    }
    Ok(SweepResult::new(config.clone(), rows, notes(config)))
}

/// NGMI against aggregate launch power over `link.spans` spans. Data and
/// noise seeds are the same at every power.
pub fn launch_power_sweep(config: &SweepConfig, workers: Workers) -> Result<SweepResult> {
    expect_axis(config, Axis::LaunchPowerDbm)?;
    let fs = formats(config)?;
    let link = &config.link;
    let amp = amplifier(config);
    let noise_seed = derive_seed(config.seed, NOISE_BRANCH);
    let n = config.axis_points.len();
    let rows = map_indexed(workers, fs.len() * n, |t| -> Result<SweepRow> {
        let (f, power) = (&fs[t / n], config.axis_points[t % n]);
        let tx = transmit(f, link, config.seed, Workers::serial())?;
        let mut w = launch(&tx.waveform, power)?;
        for s in 0..link.spans {
            w = propagate_span(&w, &link.span, &amp, noise_seed, s)?;
        }
        let dispersion = link.spans as f64 * link.span.accumulated_dispersion();
        let report = receive(&w, f, &tx.labels, link, dispersion, Workers::serial())?;
        Ok(SweepRow {
            format: f.name().to_string(),
            axis_value: power,
            report,
        })
    });
    Ok(SweepResult::new(config.clone(), rows.into_iter().collect::<Result<_>>()?, notes(config)))
}

/// Runs the sweep selected by `config.axis`.
pub fn run_sweep(config: &SweepConfig, workers: Workers) -> Result<SweepResult> {
    match config.axis {
        Axis::SnrDb => awgn_sweep(config, workers),
        Axis::DistanceSpans => reach_sweep(config, workers),
        Axis::LaunchPowerDbm => launch_power_sweep(config, workers),
    }
}

/// Distance at which the isotonic (nonincreasing) fit of `curve` falls to
/// `threshold`, by linear interpolation between the bracketing points.
pub fn reach_at_threshold(curve: &[(f64, f64)], threshold: f64) -> Result<f64> {
    if curve.is_empty() {
        return Err(Error::param("curve", "empty"));
    }
    if curve.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::param("curve", "distances must be strictly increasing"));
    }
    let fit = isotonic_decreasing(&curve.iter().map(|p| p.1).collect::<Vec<_>>());
    if fit[0] < threshold {
        return Err(Error::NotReached(threshold));
    }
    let Some(i) = fit.iter().position(|&v| v <= threshold) else {
        return Err(Error::param("curve", format!("NGMI stays above {threshold} over the swept distances")));
    };
    if fit[i] == threshold {
        return Ok(curve[i].0);
    }
    let (d0, f0) = (curve[i - 1].0, fit[i - 1]);
    let (d1, f1) = (curve[i].0, fit[i]);
    Ok(d0 + (threshold - f0) / (f1 - f0) * (d1 - d0))
}

/// Reach of one format and its gain over the baseline.
#[derive(Clone, Debug, PartialEq)]
pub struct ReachGain {
    pub format: String,
    pub reach_km: f64,
    pub gain_percent: f64,
}

pub fn reach_gain_percent(reach: f64, baseline: f64) -> f64 {
    (reach / baseline - 1.0) * 100.0
}

/// Reach at `threshold` of every format in a distance sweep, relative to `baseline`.
pub fn compare_reach(results: &SweepResult, baseline: &str, threshold: f64) -> Result<Vec<ReachGain>> {
    if results.axis() != Axis::DistanceSpans {
        return Err(Error::Config(format!("reach needs a distance_spans sweep, got {}", results.axis())));
    }
    let km = results.config.link.span.length_km;
    let reach = |f: &str| -> Result<f64> {
        let curve: Vec<(f64, f64)> = results.curve(f).into_iter().map(|(n, v)| (n * km, v)).collect();
        reach_at_threshold(&curve, threshold)
    };
    if results.curve(baseline).is_empty() {
        return Err(Error::MissingBaseline(baseline.to_string()));
    }
    let base = reach(baseline)?;
    let mut names: Vec<&str> = results.rows.iter().map(|r| r.format.as_str()).collect();
    names.dedup();
    names
        .into_iter()
        .map(|f| {
            let r = reach(f)?;
            Ok(ReachGain {
                format: f.to_string(),
                reach_km: r,
                gain_percent: reach_gain_percent(r, base),
            })
        })
        .collect()
}

/// Launch power maximising a least-squares parabola through the highest
/// point of `curve` and up to two neighbours on each side.
pub fn fitted_optimum(curve: &[(f64, f64)]) -> Result<f64> {
    if curve.len() < 3 {
        return Err(Error::param("curve", "need at least three points"));
    }
    let best = (0..curve.len()).max_by(|&a, &b| curve[a].1.total_cmp(&curve[b].1)).unwrap_or(0);
    let lo = best.saturating_sub(2);
    let hi = (best + 2).min(curve.len() - 1);
    let (lo, hi) = if hi - lo < 2 {
        if lo == 0 { (0, 2) } else { (curve.len() - 3, curve.len() - 1) }
    } else {
        (lo, hi)
    };
    let pts = &curve[lo..=hi];
    let x0 = curve[best].0;
    // Normal equations for y = a + b t + c t^2 with t = x - x0.
    let mut s = [0.0f64; 5];
    let mut r = [0.0f64; 3];
    for &(x, y) in pts {
        let t = x - x0;
        let mut p = 1.0;
        for k in 0..5 {
            s[k] += p;
            if k < 3 {
                r[k] += p * y;
            }
            p *= t;
        }
    }
    let m = [[s[0], s[1], s[2]], [s[1], s[2], s[3]], [s[2], s[3], s[4]]];
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    let solve = |col: usize| {
        let mut mm = m;
        for row in 0..3 {
            mm[row][col] = r[row];
        }
        det(&mm) / d
    };
    let (b, c) = (solve(1), solve(2));
    if d.abs() < 1e-300 || c >= 0.0 {
        return Ok(x0);
    }
    Ok((x0 - b / (2.0 * c)).clamp(pts[0].0, pts[pts.len() - 1].0))
}
