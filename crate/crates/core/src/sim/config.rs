use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::modfmt::Qam8Geometry;
use crate::phy::{FiberSpan, SPEED_OF_LIGHT};

use super::registry::DEFAULT_RING_RATIO;

/// Swept quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    SnrDb,
    DistanceSpans,
    LaunchPowerDbm,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::SnrDb => "snr_db",
            Axis::DistanceSpans => "distance_spans",
            Axis::LaunchPowerDbm => "launch_power_dbm",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "snr_db" => Ok(Axis::SnrDb),
            "distance_spans" => Ok(Axis::DistanceSpans),
            "launch_power_dbm" => Ok(Axis::LaunchPowerDbm),
            _ => Err(Error::Config(format!("unknown axis `{s}` (snr_db, distance_spans, launch_power_dbm)"))),
        }
    }
}

/// Choices that select or shape the formats.
#[derive(Clone, Debug, PartialEq)]
pub struct FormatOptions {
    pub qam8_geometry: Qam8Geometry,
    pub ring_ratio: f64,
    /// Base constellation for the 8D formats; the bundled one when `None`.
    pub base_file: Option<PathBuf>,
}

impl Default for FormatOptions {
    fn default() -> Self {
        FormatOptions {
            qam8_geometry: Qam8Geometry::Rectangular,
            ring_ratio: DEFAULT_RING_RATIO,
            base_file: None,
        }
    }
}

/// Transceiver, WDM and fibre parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkTemplate {
    pub span: FiberSpan,
    pub noise_figure_db: f64,
    /// Span count for launch-power sweeps.
    pub spans: usize,
    /// Aggregate launch power for SNR-independent sweeps, dBm.
    pub launch_power_dbm: f64,
    pub wavelength_nm: f64,
    pub symbol_rate: f64,
    pub rolloff: f64,
    pub samples_per_symbol: usize,
    /// 4D symbols per channel.
    pub symbols: usize,
    pub channels: usize,
    pub spacing_hz: f64,
    /// Circular delay between neighbouring channels, in symbols.
    pub decorrelation_symbols: usize,
}

impl LinkTemplate {
    pub fn center_frequency(&self) -> f64 {
        SPEED_OF_LIGHT / (self.wavelength_nm * 1e-9)
    }

    pub fn sample_rate(&self) -> f64 {
        self.symbol_rate * self.samples_per_symbol as f64
    }
}

/// Complete description of one sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub profile: String,
    pub formats: Vec<String>,
    pub axis: Axis,
    pub axis_points: Vec<f64>,
    pub n_blocks: usize,
    pub seed: u64,
    pub threshold: f64,
    pub baseline: String,
    pub format: FormatOptions,
    pub link: LinkTemplate,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig::desk()
    }
}

impl SweepConfig {
    /// Three channels, 2^14 symbols, 1 km steps.
    pub fn desk() -> Self {
        SweepConfig {
            profile: "desk".into(),
            formats: ["8d-t1", "8d-t2", "th-2a8psk", "pm8qam"].map(String::from).to_vec(),
            axis: Axis::SnrDb,
            axis_points: (0..=15).map(f64::from).collect(),
            n_blocks: 100_000,
            seed: 1,
            threshold: 0.85,
            baseline: "pm8qam".into(),
            format: FormatOptions::default(),
            link: LinkTemplate {
                span: FiberSpan {
                    step_km: 1.0,
                    ..FiberSpan::default()
                },
                noise_figure_db: 5.0,
                spans: 100,
                launch_power_dbm: 4.0,
                wavelength_nm: crate::phy::DEFAULT_WAVELENGTH_NM,
                symbol_rate: 41.79e9,
                rolloff: 0.01,
                samples_per_symbol: 4,
                symbols: 1 << 14,
                channels: 3,
                spacing_hz: 50e9,
                decorrelation_symbols: 10_200,
            },
        }
    }

    /// Eleven channels, 2^16 symbols, 0.1 km steps. Hours to days of compute.
    pub fn full() -> Self {
        let mut c = SweepConfig::desk();
        c.profile = "full".into();
        c.link.span.step_km = 0.1;
        c.link.channels = 11;
        // 11 x 50 GHz needs more than 13 samples per symbol at 41.79 GBd.
        c.link.samples_per_symbol = 16;
        c.link.symbols = 1 << 16;
        c.link.launch_power_dbm = 9.5;
        c.link.spans = 126;
        c
    }

    pub fn profile(name: &str) -> Result<Self> {
        match name {
            "desk" => Ok(SweepConfig::desk()),
            "full" => Ok(SweepConfig::full()),
            _ => Err(Error::Config(format!("unknown profile `{name}` (desk, full)"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.formats.is_empty() {
            return bad("format.formats: at least one format is required".into());
        }
        if self.axis_points.is_empty() {
            return bad("sweep.points: empty".into());
        }
        if self.axis_points.iter().any(|v| !v.is_finite()) {
            return bad("sweep.points: values must be finite".into());
        }
        if self.axis_points.windows(2).any(|w| w[0] >= w[1]) {
            return bad("sweep.points: must be strictly increasing".into());
        }
        if self.axis == Axis::DistanceSpans && self.axis_points.iter().any(|v| *v < 0.0 || v.fract() != 0.0) {
            return bad("sweep.points: span counts must be non-negative integers".into());
        }
        if self.n_blocks < crate::metrics::MIN_BLOCKS {
            return bad(format!("sweep.n_blocks: {} < {}", self.n_blocks, crate::metrics::MIN_BLOCKS));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad(format!("sweep.threshold: {} outside (0, 1)", self.threshold));
        }
        if !(self.format.ring_ratio > 0.0 && self.format.ring_ratio <= 1.0) {
            return bad(format!("format.ring_ratio: {} outside (0, 1]", self.format.ring_ratio));
        }
        let l = &self.link;
        l.span.validate().map_err(|e| Error::Config(format!("link: {e}")))?;
        let positive = [
            ("link.wavelength_nm", l.wavelength_nm),
            ("link.symbol_rate", l.symbol_rate),
            ("link.spacing_ghz", l.spacing_hz),
        ];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{k}: {v} must be positive"));
            }
        }
        if !(l.rolloff > 0.0 && l.rolloff <= 1.0) {
            return bad(format!("link.rolloff: {} outside (0, 1]", l.rolloff));
        }
        if l.samples_per_symbol < 2 {
            return bad(format!("link.sps: {} < 2", l.samples_per_symbol));
        }
        if l.channels == 0 {
            return bad("link.channels: must be at least 1".into());
        }
        if l.symbols < 2 || l.symbols % 2 != 0 {
            return bad(format!("link.symbols: {} must be even and at least 2", l.symbols));
        }
        if !l.noise_figure_db.is_finite() || !l.launch_power_dbm.is_finite() {
            return bad("link: noise figure and launch power must be finite".into());
        }
        if self.axis == Axis::LaunchPowerDbm && l.spans == 0 {
            return bad("link.spans: power sweeps need at least one span".into());
        }
        let signal_bw = (1.0 + l.rolloff) * l.symbol_rate;
        if l.channels > 1 && l.spacing_hz < signal_bw {
            return bad(format!("link.spacing_ghz: {} GHz is narrower than the {:.3} GHz signal", l.spacing_hz / 1e9, signal_bw / 1e9));
        }
        if l.channels > 1 && l.channels as f64 * l.spacing_hz > l.sample_rate() * (1.0 + 1e-12) {
            return bad(format!(
                "link: {} channels x {} GHz exceed the {:.3} GHz sampling bandwidth (raise sps)",
                l.channels,
                l.spacing_hz / 1e9,
                l.sample_rate() / 1e9
            ));
        }
        Ok(())
    }

    /// Every setting as `(section, key, value)`, in a form accepted by [`SweepConfig::set`].
    pub fn entries(&self) -> Vec<(&'static str, &'static str, String)> {
        let l = &self.link;
        let list = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",");
        vec![
            ("format", "formats", self.formats.join(",")),
            ("format", "qam8_geometry", self.format.qam8_geometry.to_string()),
            ("format", "ring_ratio", format!("{}", self.format.ring_ratio)),
            (
                "format",
                "base_file",
                self.format.base_file.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
            ),
            ("link", "span_km", format!("{}", l.span.length_km)),
            ("link", "alpha_db_per_km", format!("{}", l.span.alpha_db_per_km)),
            ("link", "dispersion", format!("{}", l.span.dispersion)),
            ("link", "gamma", format!("{}", l.span.gamma)),
            ("link", "step_km", format!("{}", l.span.step_km)),
            ("link", "noise_figure_db", format!("{}", l.noise_figure_db)),
            ("link", "spans", l.spans.to_string()),
            ("link", "launch_power_dbm", format!("{}", l.launch_power_dbm)),
            ("link", "wavelength_nm", format!("{}", l.wavelength_nm)),
            ("link", "symbol_rate", format!("{}", l.symbol_rate)),
            ("link", "rolloff", format!("{}", l.rolloff)),
            ("link", "sps", l.samples_per_symbol.to_string()),
            ("link", "symbols", l.symbols.to_string()),
            ("link", "channels", l.channels.to_string()),
            ("link", "spacing_ghz", format!("{}", l.spacing_hz / 1e9)),
            ("link", "decorrelation_symbols", l.decorrelation_symbols.to_string()),
            ("sweep", "profile", self.profile.clone()),
            ("sweep", "axis", self.axis.to_string()),
            ("sweep", "points", list(&self.axis_points)),
            ("sweep", "n_blocks", self.n_blocks.to_string()),
            ("sweep", "seed", self.seed.to_string()),
            ("sweep", "threshold", format!("{}", self.threshold)),
            ("sweep", "baseline", self.baseline.clone()),
        ]
    }

    /// Section of a key, if the key exists.
    pub fn section_of(key: &str) -> Option<&'static str> {
        SweepConfig::desk().entries().into_iter().find(|e| e.1 == key).map(|e| e.0)
    }

    /// Sets one key. `profile` is accepted but only recorded; use
    /// [`SweepConfig::profile`] to start from a profile.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::Config(format!("{key}: cannot parse `{v}` as {}", std::any::type_name::<T>())))
        }
        let l = &mut self.link;
        match key {
            "formats" => {
                self.formats = value.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
            }
            "qam8_geometry" => self.format.qam8_geometry = value.parse()?,
            "ring_ratio" => self.format.ring_ratio = num(key, value)?,
            "base_file" => self.format.base_file = (!value.is_empty()).then(|| PathBuf::from(value)),
            "span_km" => l.span.length_km = num(key, value)?,
            "alpha_db_per_km" => l.span.alpha_db_per_km = num(key, value)?,
            "dispersion" => l.span.dispersion = num(key, value)?,
            "gamma" => l.span.gamma = num(key, value)?,
            "step_km" => {
                let v: f64 = num(key, value)?;
                if !(v > 0.0) {
                    return Err(Error::Config(format!("step_km: must be > 0, got {value}")));
                }
                l.span.step_km = v;
            }
            "noise_figure_db" => l.noise_figure_db = num(key, value)?,
            "spans" => l.spans = num(key, value)?,
            "launch_power_dbm" => l.launch_power_dbm = num(key, value)?,
            "wavelength_nm" => l.wavelength_nm = num(key, value)?,
            "symbol_rate" => l.symbol_rate = num(key, value)?,
            "rolloff" => l.rolloff = num(key, value)?,
            "sps" => l.samples_per_symbol = num(key, value)?,
            "symbols" => l.symbols = num(key, value)?,
            "channels" => l.channels = num(key, value)?,
            "spacing_ghz" => l.spacing_hz = num::<f64>(key, value)? * 1e9,
            "decorrelation_symbols" => l.decorrelation_symbols = num(key, value)?,
            "profile" => self.profile = value.to_string(),
            "axis" => self.axis = value.parse()?,
            "points" => self.axis_points = parse_points(value)?,
            "n_blocks" => self.n_blocks = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "threshold" => self.threshold = num(key, value)?,
            "baseline" => self.baseline = value.to_string(),
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }
}

/// `a,b,c` or an inclusive range `start:stop:step`.
pub fn parse_points(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    let bad = || Error::Config(format!("points: cannot parse `{s}`"));
    if s.contains(':') {
        let parts: Vec<f64> = s.split(':').map(|p| p.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        if !(step > 0.0) || stop < start {
            return Err(bad());
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        // Round to the step's decimal resolution so 0.1 steps print cleanly.
        return Ok((0..=n).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9).collect());
    }
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect()
}
