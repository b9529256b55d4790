//! The `alt-model` text format.
//!
//! ```text
//! {"format":"alt-model","version":1,...,"checksum":"<sha256 of the body>"}
//! bank 1 1 1 4 630          <- config, channel, class, rows, cols
//! <row 1: cols comma-separated decimals>
//! ...
//! sources 1:1,1:2,...       <- instance:start per column
//! bank 1 1 2 4 630
//! ...
//! end
//! ```
//!
//! Banks appear in ascending (config, channel, class) order. Numbers are
//! printed as shortest round-trip decimals, so a load reproduces every
//! matrix bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ColumnSource, ShapeletBank, ShapeletMatrix};
use crate::error::{AltError, Result};
use crate::lawcore::WindowConfig;
use crate::numfmt::format_f64;

pub const FORMAT_NAME: &str = "alt-model";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ConfigEntry {
    r: usize,
    l: usize,
    k: usize,
}

#[derive(Serialize, Deserialize)]
struct BankEntry {
    config: usize,
    channel: usize,
    class: usize,
    rows: usize,
    cols: usize,
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    configs: Vec<ConfigEntry>,
    channels: Vec<usize>,
    labels: Vec<String>,
    banks: Vec<BankEntry>,
    checksum: String,
}

/// Only the fields needed to decide whether the rest can be parsed.
#[derive(Deserialize)]
struct Preamble {
    format: String,
    version: u32,
}

fn sha256_hex(body: &str) -> String {
    Sha256::digest(body.as_bytes())
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

pub fn write_model(bank: &ShapeletBank) -> String {
    let (m, c) = (bank.num_channels(), bank.num_classes());
    let mut body = String::new();
    let mut entries = Vec::with_capacity(bank.matrices().len());
    for (idx, p) in bank.matrices().iter().enumerate() {
        let (g, j, y) = (idx / (m * c), (idx / c) % m, idx % c + 1);
        entries.push(BankEntry {
            config: g + 1,
            channel: j + 1,
            class: y,
            rows: p.rows(),
            cols: p.cols(),
        });
        let _ = writeln!(body, "bank {} {} {} {} {}", g + 1, j + 1, y, p.rows(), p.cols());
        for row in 0..p.rows() {
            let line: Vec<String> = (0..p.cols()).map(|q| format_f64(p.get(row, q))).collect();
            body.push_str(&line.join(","));
            body.push('\n');
        }
        let src: Vec<String> = p
            .sources()
            .iter()
            .map(|s| format!("{}:{}", s.instance, s.start))
            .collect();
        body.push_str("sources ");
        body.push_str(&src.join(","));
        body.push('\n');
    }
    body.push_str("end\n");

    let header = Header {
        format: FORMAT_NAME.to_string(),
        version: FORMAT_VERSION,
        configs: bank
            .configs()
            .iter()
            .map(|c| ConfigEntry {
                r: c.r(),
                l: c.l(),
                k: c.k(),
            })
            .collect(),
        channels: bank.channel_ids().to_vec(),
        labels: bank.label_names().to_vec(),
        banks: entries,
        checksum: sha256_hex(&body),
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    out.push_str(&body);
    out
}

pub fn save_model(bank: &ShapeletBank, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_model(bank)).map_err(|e| AltError::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ShapeletBank> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| AltError::io(path, e))?;
    read_model(&text)
}

pub fn read_model(text: &str) -> Result<ShapeletBank> {
    let bad = |msg: String| AltError::Model(msg);
    let (head, body) = text.split_once('\n').ok_or_else(|| bad("missing header line".into()))?;
    let pre: Preamble = serde_json::from_str(head).map_err(|e| bad(format!("header: {e}")))?;
    if pre.format != FORMAT_NAME {
        return Err(bad(format!("format {:?} is not {FORMAT_NAME:?}", pre.format)));
    }
    if pre.version != FORMAT_VERSION {
        return Err(AltError::UnsupportedVersion {
            found: pre.version,
            expected: FORMAT_VERSION,
        });
    }
    let header: Header = serde_json::from_str(head).map_err(|e| bad(format!("header: {e}")))?;
    if sha256_hex(body) != header.checksum {
        return Err(bad("checksum mismatch (file truncated or edited)".into()));
    }

    let configs = header
        .configs
        .iter()
        .map(|c| WindowConfig::new(c.r, c.l, c.k))
        .collect::<Result<Vec<_>>>()?;
    let (g_count, m, c) = (configs.len(), header.channels.len(), header.labels.len());
    if header.banks.len() != g_count * m * c {
        return Err(bad(format!(
            "{} banks listed, expected {}",
            header.banks.len(),
            g_count * m * c
        )));
    }

    let mut lines = body.lines();
    let mut matrices = Vec::with_capacity(header.banks.len());
    for (idx, entry) in header.banks.iter().enumerate() {
        let (g, j, y) = (idx / (m * c), (idx / c) % m, idx % c + 1);
        let expect = format!("bank {} {} {} {} {}", g + 1, j + 1, y, entry.rows, entry.cols);
        if (entry.config, entry.channel, entry.class) != (g + 1, j + 1, y) || entry.rows != configs[g].l() {
            return Err(bad(format!("bank {} header entry out of order or wrong size", idx + 1)));
        }
        match lines.next() {
            Some(l) if l == expect => {}
            other => return Err(bad(format!("expected {expect:?}, found {other:?}"))),
        }
        let mut columns = vec![0.0; entry.rows * entry.cols];
        for row in 0..entry.rows {
            let line = lines
                .next()
                .ok_or_else(|| bad(format!("bank {} ends early", idx + 1)))?;
            let values: Vec<&str> = if entry.cols == 0 {
                Vec::new()
            } else {
                line.split(',').collect()
            };
            if values.len() != entry.cols {
                return Err(bad(format!(
                    "bank {} row {} has {} values, expected {}",
                    idx + 1,
                    row + 1,
                    values.len(),
                    entry.cols
                )));
            }
            for (q, v) in values.iter().enumerate() {
                let x: f64 = v
                    .parse()
                    .ok()
                    .filter(|x: &f64| x.is_finite())
                    .ok_or_else(|| bad(format!("bank {} has non-numeric entry {v:?}", idx + 1)))?;
                columns[q * entry.rows + row] = x;
            }
        }
        let src_line = lines
            .next()
            .and_then(|l| l.strip_prefix("sources"))
            .ok_or_else(|| bad(format!("bank {} is missing its sources line", idx + 1)))?
            .trim();
        let sources = if src_line.is_empty() {
            Vec::new()
        } else {
            src_line
                .split(',')
                .map(|tok| {
                    let (i, s) = tok.split_once(':')?;
                    Some(ColumnSource {
                        instance: i.parse().ok()?,
                        start: s.parse().ok()?,
                    })
                })
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| bad(format!("bank {} has malformed sources", idx + 1)))?
        };
        if sources.len() != entry.cols {
            return Err(bad(format!(
                "bank {} lists {} sources for {} columns",
                idx + 1,
                sources.len(),
                entry.cols
            )));
        }
        let p = ShapeletMatrix::new(entry.rows, columns, sources);
        for (q, col) in p.columns().enumerate() {
            let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-10 {
                return Err(bad(format!("bank {} column {} is not unit norm", idx + 1, q + 1)));
            }
        }
        matrices.push(p);
    }
    match lines.next() {
        Some("end") if lines.next().is_none() => {}
        _ => return Err(bad("missing or misplaced end marker".into())),
    }
    ShapeletBank::from_parts(configs, header.channels, header.labels, matrices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Instance, TimeSeriesDataset};
    use crate::model::train_bank;

    fn small_bank() -> ShapeletBank {
        let series: Vec<Vec<f64>> = (0..4)
            .map(|i| {
                (0..12)
                    .map(|t| ((t * (i + 1)) as f64 * 0.37).sin() + 0.1 * i as f64)
                    .collect()
            })
            .collect();
        let ds = TimeSeriesDataset::new(
            series.into_iter().map(|s| Instance::univariate(s).unwrap()).collect(),
            vec![1, 2, 1, 2],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let cfgs = [WindowConfig::new(5, 3, 1).unwrap(), WindowConfig::new(7, 2, 2).unwrap()];
        train_bank(&ds, &[0, 1, 2, 3], &cfgs).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let bank = small_bank();
        let text = write_model(&bank);
        let back = read_model(&text).unwrap();
        assert_eq!(back, bank);
        assert_eq!(write_model(&back), text);
    }

    #[test]
    fn version_mismatch() {
        let text = write_model(&small_bank()).replacen("\"version\":1", "\"version\":2", 1);
        assert!(matches!(
            read_model(&text),
            Err(AltError::UnsupportedVersion { found: 2, expected: 1 })
        ));
    }

    #[test]
    fn truncation_detected() {
        let text = write_model(&small_bank());
        let cut = &text[..text.len() - 40];
        assert!(matches!(read_model(cut), Err(AltError::Model(_))));
    }

    #[test]
    fn wrong_format_name() {
        let text = write_model(&small_bank()).replacen("alt-model", "other", 1);
        assert!(read_model(&text).is_err());
    }

    #[test]
    fn unwritable_path() {
        let err = save_model(&small_bank(), "/nonexistent-dir/x/model.alt").unwrap_err();
        assert!(matches!(err, AltError::Io { .. }));
    }
}
