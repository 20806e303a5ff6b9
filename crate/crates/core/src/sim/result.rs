use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::metrics::GmiReport;

use super::config::{Axis, SweepConfig};

pub const CSV_HEADER: &str = "format,axis_name,axis_value,gmi,ngmi,snr_db,n_blocks,seed";
const METADATA_PREFIX: &str = "# metadata: ";

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub format: String,
    pub axis_value: f64,
    pub report: GmiReport,
}

/// Rows sorted by `(format, axis_value)` plus the configuration that made them.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
    /// Extra `key=value` facts (resolved constants, derived values).
    pub notes: Vec<(String, String)>,
}

impl SweepResult {
    pub(crate) fn new(config: SweepConfig, mut rows: Vec<SweepRow>, notes: Vec<(String, String)>) -> Self {
        rows.sort_by(|a, b| a.format.cmp(&b.format).then(a.axis_value.total_cmp(&b.axis_value)));
        SweepResult { config, rows, notes }
    }

    pub fn axis(&self) -> Axis {
        self.config.axis
    }

    /// `(axis_value, ngmi)` pairs of one format in axis order.
    pub fn curve(&self, format: &str) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.format == format)
            .map(|r| (r.axis_value, r.report.ngmi))
            .collect()
    }

    pub fn row(&self, format: &str, axis_value: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.format == format && r.axis_value == axis_value)
    }

    /// Metadata comment lines followed by the header and one line per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{METADATA_PREFIX}version={}", crate::VERSION);
        for (section, key, value) in self.config.entries() {
            let _ = writeln!(out, "{METADATA_PREFIX}{section}.{key}={value}");
        }
        for (k, v) in &self.notes {
            let _ = writeln!(out, "{METADATA_PREFIX}note.{k}={v}");
        }
        out.push_str(CSV_HEADER);
        out.push('\n');
        let axis = self.config.axis.name();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.format, axis, r.axis_value, r.report.gmi, r.report.ngmi, r.report.snr_db, r.report.n_blocks, self.config.seed
            );
        }
        out
    }
}

/// Rebuilds the configuration recorded in a CSV's metadata lines.
pub fn config_from_csv(text: &str) -> Result<SweepConfig> {
    let mut entries = Vec::new();
    for line in text.lines() {
        let Some(rest) = line.strip_prefix(METADATA_PREFIX) else {
            continue;
        };
        let Some((key, value)) = rest.split_once('=') else {
            continue;
        };
        if let Some((section, k)) = key.split_once('.') {
            if section != "note" {
                entries.push((k.to_string(), value.to_string()));
            }
        }
    }
    let profile = entries.iter().find(|(k, _)| k == "profile").map(|(_, v)| v.as_str()).unwrap_or("desk");
    let mut cfg = SweepConfig::profile(profile)?;
    if entries.is_empty() {
        return Err(Error::Config("no metadata lines".into()));
    }
    for (k, v) in &entries {
        cfg.set(k, v)?;
    }
    Ok(cfg)
}
