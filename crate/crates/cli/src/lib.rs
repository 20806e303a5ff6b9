//! Command-line front end: config parsing and subcommand dispatch.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use octane::exec::Workers;
use octane::modfmt::{
    min_euclidean_distance, parity_violations, polarisation_identical_count, slot_norm_variance, FormatKind,
    FormatSpec,
};
use octane::phy::Amplifier;
use octane::sim::{build_format, compare_reach, run_sweep, Axis, SweepConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

const SECTIONS: [&str; 3] = ["format", "link", "sweep"];

/// Failure with the exit code it maps to.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

struct Entry {
    line: usize,
    section: String,
    key: String,
    value: String,
}

fn read_entries(text: &str) -> Result<Vec<Entry>, CliError> {
    let mut section: Option<String> = None;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        let err = |m: String| CliError::Config(format!("line {line_no}: {m}"));
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err(format!("malformed section header `{line}`")))?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(err(format!("unknown section [{name}] (format, link, sweep)")));
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, got `{line}`")))?;
        let key = key.trim();
        let Some(sec) = &section else {
            return Err(err(format!("key `{key}` appears before any section")));
        };
        match SweepConfig::section_of(key) {
            Some(s) if s == sec => {}
            Some(s) => return Err(err(format!("key `{key}` belongs in [{s}], not [{sec}]"))),
            None => return Err(err(format!("unknown key `{key}` in [{sec}]"))),
        }
        out.push(Entry {
            line: line_no,
            section: sec.clone(),
            key: key.to_string(),
            value: value.trim().to_string(),
        });
    }
    Ok(out)
}

fn apply(entries: &[Entry], overrides: &[(String, String)]) -> Result<SweepConfig, CliError> {
    let profile = overrides
        .iter()
        .rev()
        .find(|(k, _)| k == "profile")
        .map(|(_, v)| v.as_str())
        .or_else(|| entries.iter().rev().find(|e| e.key == "profile").map(|e| e.value.as_str()))
        .unwrap_or("desk");
    let mut cfg = SweepConfig::profile(profile).map_err(|e| CliError::Config(e.to_string()))?;
    for e in entries {
        cfg.set(&e.key, &e.value)
            .map_err(|err| CliError::Config(format!("line {}: [{}] {}", e.line, e.section, err)))?;
    }
    for (k, v) in overrides {
        if SweepConfig::section_of(k).is_none() {
            return Err(CliError::Config(format!("--set: unknown key `{k}`")));
        }
        cfg.set(k, v).map_err(|err| CliError::Config(format!("--set {k}: {err}")))?;
    }
    cfg.validate().map_err(|err| {
        let msg = err.to_string();
        // Validation messages start with `section.key:`; point at the line that set it.
        let line = entries
            .iter()
            .rev()
            .find(|e| msg.contains(&format!("{}.{}", e.section, e.key)))
            .map(|e| e.line);
        match line {
            Some(l) => CliError::Config(format!("line {l}: {msg}")),
            None => CliError::Config(msg),
        }
    })?;
    Ok(cfg)
}

/// Parses the sectioned `key=value` format into a validated configuration.
pub fn parse_config(text: &str) -> Result<SweepConfig, CliError> {
    apply(&read_entries(text)?, &[])
}

/// Parses `key=value` override strings.
pub fn parse_overrides(items: &[String]) -> Result<Vec<(String, String)>, CliError> {
    items
        .iter()
        .map(|s| {
            s.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| CliError::Config(format!("--set expects key=value, got `{s}`")))
        })
        .collect()
}

/// Parses `text` and applies `overrides` on top of it.
pub fn parse_config_with(text: &str, overrides: &[(String, String)]) -> Result<SweepConfig, CliError> {
    apply(&read_entries(text)?, overrides)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subcommand {
    InspectFormat,
    AwgnSweep,
    ReachSweep,
    PowerSweep,
}

impl Subcommand {
    fn axis(self) -> Option<Axis> {
        match self {
            Subcommand::InspectFormat => None,
            Subcommand::AwgnSweep => Some(Axis::SnrDb),
            Subcommand::ReachSweep => Some(Axis::DistanceSpans),
            Subcommand::PowerSweep => Some(Axis::LaunchPowerDbm),
        }
    }
}

/// One invocation.
#[derive(Clone, Debug)]
pub struct RunManifest {
    pub subcommand: Subcommand,
    pub config_path: Option<PathBuf>,
    pub overrides: Vec<String>,
    pub output_path: Option<PathBuf>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
}

/// Resolves the configuration of a manifest: file, then `--set`, then `--seed`.
pub fn resolve_config(m: &RunManifest) -> Result<SweepConfig, CliError> {
    let text = match &m.config_path {
        Some(p) => fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    let mut overrides = parse_overrides(&m.overrides)?;
    if let Some(axis) = m.subcommand.axis() {
        let explicit = read_entries(&text)?.iter().any(|e| e.key == "axis") || overrides.iter().any(|(k, _)| k == "axis");
        if !explicit {
            overrides.insert(0, ("axis".into(), axis.name().into()));
            if !read_entries(&text)?.iter().any(|e| e.key == "points") && !overrides.iter().any(|(k, _)| k == "points") {
                let points = match axis {
                    Axis::SnrDb => "0:15:1",
                    Axis::DistanceSpans => "0:160:10",
                    Axis::LaunchPowerDbm => "-2:12:2",
                };
                overrides.insert(1, ("points".into(), points.into()));
            }
        }
    }
    if let Some(seed) = m.seed {
        overrides.push(("seed".into(), seed.to_string()));
    }
    let cfg = parse_config_with(&text, &overrides)?;
    if let Some(axis) = m.subcommand.axis() {
        if cfg.axis != axis {
            return Err(CliError::Config(format!("sweep.axis is {} but the subcommand needs {}", cfg.axis, axis)));
        }
    }
    Ok(cfg)
}

/// `key=value` dump of every setting, grouped by section.
pub fn describe_config(cfg: &SweepConfig) -> String {
    let mut out = String::new();
    for sec in SECTIONS {
        let _ = writeln!(out, "[{sec}]");
        for (s, k, v) in cfg.entries() {
            if s == sec {
                let _ = writeln!(out, "{k} = {v}");
            }
        }
    }
    out
}

/// Text report of one format's structural properties.
pub fn inspect_report(format: &FormatSpec) -> String {
    let mut out = String::new();
    let kind = match format.kind() {
        FormatKind::Plain4D(c) => format!("plain 4D ({})", c.name()),
        FormatKind::Parity8D { base, parity } => format!("parity 8D {parity} over {}", base.name()),
        FormatKind::TimeHybrid { slots } => {
            format!("time hybrid {}", slots.iter().map(|c| c.name()).collect::<Vec<_>>().join(" / "))
        }
    };
    let nv = slot_norm_variance(format);
    let _ = writeln!(out, "format: {}", format.name());
    let _ = writeln!(out, "kind: {kind}");
    let _ = writeln!(out, "bits per block: {}", format.bits_per_block());
    let _ = writeln!(out, "slots per block: {}", format.slots_per_block());
    let _ = writeln!(out, "bits per 4D: {}", format.bits_per_4d());
    let _ = writeln!(out, "codewords: {}", format.block_codewords());
    let _ = writeln!(out, "min euclidean distance: {:.6}", min_euclidean_distance(format));
    let _ = writeln!(out, "polarisation-identical slots: {}", polarisation_identical_count(format));
    let _ = writeln!(
        out,
        "slot norm variance: {nv:.3e} (constant modulus {})",
        if nv < 1e-12 { "PASS" } else { "FAIL" }
    );
    if let Some(bad) = parity_violations(format) {
        let _ = writeln!(out, "parity check: {} ({bad} violations)", if bad == 0 { "PASS" } else { "FAIL" });
    }
    out
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Runtime(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn workers(m: &RunManifest) -> Workers {
    m.workers.map(Workers::new).unwrap_or_else(Workers::from_env)
}

/// Executes a manifest, reporting to stderr. Returns the process exit code.
pub fn run(m: &RunManifest) -> i32 {
    match execute(m) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

/// Executes a manifest, returning the error instead of printing it.
pub fn execute(m: &RunManifest) -> Result<(), CliError> {
    let cfg = resolve_config(m)?;
    let w = workers(m);
    eprintln!("# resolved configuration (workers = {})", w.count());
    eprint!("{}", describe_config(&cfg));
    let amp = Amplifier {
        gain_db: cfg.link.span.loss_db(),
        noise_figure_db: cfg.link.noise_figure_db,
        ase: true,
    };
    if let Some(warn) = amp.warning() {
        eprintln!("warning: {warn}");
    }
    let rt = |e: octane::Error| CliError::Runtime(e.to_string());
    match m.subcommand {
        Subcommand::InspectFormat => {
            let mut report = String::new();
            for id in &cfg.formats {
                let f = build_format(id, &cfg.format).map_err(rt)?;
                if !report.is_empty() {
                    report.push('\n');
                }
                report.push_str(&inspect_report(&f));
            }
            write_output(m.output_path.as_deref(), &report)
        }
        _ => {
            eprintln!(
                "running {} sweep: {} formats x {} points",
                cfg.axis,
                cfg.formats.len(),
                cfg.axis_points.len()
            );
            let start = std::time::Instant::now();
            let result = run_sweep(&cfg, w).map_err(rt)?;
            eprintln!("done in {:.1} s", start.elapsed().as_secs_f64());
            if cfg.axis == Axis::DistanceSpans {
                match compare_reach(&result, &cfg.baseline, cfg.threshold) {
                    Ok(gains) => {
                        for g in gains {
                            eprintln!("reach {}: {:.0} km ({:+.1}%)", g.format, g.reach_km, g.gain_percent);
                        }
                    }
                    Err(e) => eprintln!("reach not available: {e}"),
                }
            }
            write_output(m.output_path.as_deref(), &result.to_csv())
        }
    }
}
