//! Text constellation files.
//!
//! ```text
//! # comment
//! dim=4 bits=6 normalize=1 name=4d-64prs
//! 000000 0.7 0.0 0.0 0.5
//! ...
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::constellation::{BitWord, Constellation};
use crate::error::{Error, Result};

struct Header {
    dimension: usize,
    bits: usize,
    normalize: bool,
    name: String,
}

fn parse_header(line: &str, line_no: usize) -> Result<Header> {
    let bad = |reason: String| Error::Parse { line: line_no, reason };
    let (fields, name) = match line.find("name=") {
        Some(i) => (&line[..i], line[i + 5..].trim().to_string()),
        None => return Err(bad("malformed header: missing name=".into())),
    };
    let mut dimension = None;
    let mut bits = None;
    let mut normalize = None;
    for tok in fields.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| bad(format!("malformed header field `{tok}`")))?;
        let n: usize = v
            .parse()
            .map_err(|_| bad(format!("malformed header value `{tok}`")))?;
        match k {
            "dim" => dimension = Some(n),
            "bits" => bits = Some(n),
            "normalize" if n <= 1 => normalize = Some(n == 1),
            _ => return Err(bad(format!("malformed header field `{tok}`"))),
        }
    }
    match (dimension, bits, normalize) {
        (Some(d), Some(b), Some(n)) if d > 0 && (1..=16).contains(&b) => Ok(Header {
            dimension: d,
            bits: b,
            normalize: n,
            name,
        }),
        _ => Err(bad("malformed header: need dim=, bits=, normalize=, name=".into())),
    }
}

/// Parses a constellation from the text format.
pub fn parse_constellation(source: &str) -> Result<Constellation> {
    let mut header: Option<Header> = None;
    let mut entries: Vec<(u32, Vec<f64>)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, raw) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some(h) = &header else {
            header = Some(parse_header(line, line_no)?);
            continue;
        };
        let mut toks = line.split_whitespace();
        let label = toks.next().unwrap_or_default();
        if label.len() != h.bits || !label.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::Parse {
                line: line_no,
                reason: format!("label `{label}` is not {} binary digits", h.bits),
            });
        }
        let value = u32::from_str_radix(label, 2).expect("validated binary");
        if !seen.insert(value) {
            return Err(Error::DuplicateLabel(BitWord::new(value, h.bits).to_string()));
        }
        let coords = toks
            .map(|t| {
                t.parse::<f64>().map_err(|_| Error::Parse {
                    line: line_no,
                    reason: format!("bad coordinate `{t}`"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if coords.len() != h.dimension {
            return Err(Error::Parse {
                line: line_no,
                reason: format!("expected {} coordinates, found {}", h.dimension, coords.len()),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { line: line_no });
        }
        entries.push((value, coords));
    }
    let h = header.ok_or(Error::Parse {
        line: 0,
        reason: "malformed header: file is empty".into(),
    })?;
    if entries.len() != 1 << h.bits {
        return Err(Error::PointCount {
            expected: 1 << h.bits,
            found: entries.len(),
        });
    }
    Constellation::from_labeled(h.name, h.dimension, h.bits, entries, h.normalize)
}

/// Reads and parses a constellation file.
pub fn load_constellation(path: impl AsRef<Path>) -> Result<Constellation> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_constellation(&text)
}

/// Serialises a constellation; coordinates round-trip exactly.
pub fn constellation_to_text(c: &Constellation) -> String {
    let mut out = format!("dim={} bits={} normalize=0 name={}\n", c.dimension(), c.bits(), c.name());
    for label in c.labels() {
        let _ = write!(out, "{label}");
        for v in c.point(label.value() as usize) {
            let _ = write!(out, " {v:?}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modfmt::builders::build_pm8qam;

    #[test]
    fn round_trip() {
        let c = build_pm8qam();
        let back = parse_constellation(&constellation_to_text(&c)).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.len(), 64);
    }

    #[test]
    fn duplicate_label_is_rejected() {
        let text = "dim=2 bits=1 normalize=1 name=x\n0 1 0\n0 -1 0\n";
        let err = parse_constellation(text).unwrap_err();
        assert!(err.to_string().contains("duplicate label"));
    }

    #[test]
    fn normalize_flag_rescales() {
        // mean power 2.0 before normalisation
        let text = "# bpsk-like\ndim=2 bits=1 normalize=1 name=x\n0 1 1 # first\n1 -1 -1\n";
        let c = parse_constellation(text).unwrap();
        assert!((c.mean_energy() - 1.0).abs() < 1e-15);
        let raw = "dim=2 bits=1 normalize=0 name=x\n0 1 1\n1 -1 -1\n";
        assert!(matches!(parse_constellation(raw), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(
            parse_constellation("dim=2 bits=1 name=x\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_constellation("dim=2 bits=2 normalize=1 name=x\n00 1 0\n01 0 1\n"),
            Err(Error::PointCount { expected: 4, found: 2 })
        ));
        assert!(matches!(
            parse_constellation("dim=2 bits=1 normalize=1 name=x\n0 1 0\n1 inf 0\n"),
            Err(Error::NonFinite { line: 3 })
        ));
        assert!(matches!(
            parse_constellation("dim=2 bits=1 normalize=1 name=x\n0 1\n1 0 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
