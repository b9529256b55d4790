//! CSV ingestion in two layouts.
//!
//! * `RowPerInstance`: no header, one univariate instance per row, optional
//!   trailing label column. Rows must all have the same width.
//! * `LongFormat`: header row naming `instance,channel,time,value[,label]`
//!   (any column order), one observation per row.

use std::collections::BTreeMap;
use std::path::Path;

use super::{Instance, TimeSeriesDataset};
use crate::error::{AltError, Result};
use crate::numfmt::format_f64;

/// Label given to every instance when a file carries no labels.
pub const UNLABELED: &str = "unlabeled";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsvLayout {
    RowPerInstance,
    LongFormat,
}

pub fn load_csv(path: impl AsRef<Path>, layout: CsvLayout, has_labels: bool) -> Result<TimeSeriesDataset> {
    let path = path.as_ref();
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| AltError::io(path, e))?;
    match layout {
        CsvLayout::RowPerInstance => parse_rows(&text, &origin, has_labels),
        CsvLayout::LongFormat => parse_long(&text, &origin, has_labels),
    }
}

fn reader(text: &str, has_headers: bool) -> ::csv::Reader<&[u8]> {
    ::csv::ReaderBuilder::new()
        .has_headers(has_headers)
        .flexible(true)
        .trim(::csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn record_line(rec: &::csv::StringRecord, fallback: usize) -> usize {
    rec.position().map_or(fallback, |p| p.line() as usize)
}

fn parse_value(origin: &str, line: usize, tok: &str) -> Result<f64> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(AltError::parse(origin, line, format!("non-numeric value {tok:?}"))),
    }
}

fn parse_rows(text: &str, origin: &str, has_labels: bool) -> Result<TimeSeriesDataset> {
    let mut width = None;
    let mut instances = Vec::new();
    let mut labels = Vec::new();
    for (n, rec) in reader(text, false).records().enumerate() {
        let rec = rec.map_err(|e| AltError::parse(origin, n + 1, e.to_string()))?;
        let line = record_line(&rec, n + 1);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        match width {
            None => width = Some(rec.len()),
            Some(w) if w != rec.len() => {
                return Err(AltError::parse(
                    origin,
                    line,
                    format!("ragged row: {} fields, expected {w}", rec.len()),
                ))
            }
            _ => {}
        }
        let fields: Vec<&str> = rec.iter().collect();
        let (values, label) = if has_labels {
            let (l, v) = fields
                .split_last()
                .ok_or_else(|| AltError::parse(origin, line, "empty row"))?;
            (v, l.to_string())
        } else {
            (&fields[..], UNLABELED.to_string())
        };
        let values = values
            .iter()
            .map(|t| parse_value(origin, line, t))
            .collect::<Result<Vec<_>>>()?;
        let inst = Instance::univariate(values).map_err(|e| AltError::parse(origin, line, e.to_string()))?;
        instances.push(inst);
        labels.push(label);
    }
    TimeSeriesDataset::from_raw_labels(instances, labels)
}

#[derive(Default)]
struct LongInstance {
    label: Option<String>,
    // channel -> time -> value
    channels: BTreeMap<OrderKey, BTreeMap<OrderKey, f64>>,
}

/// Sort key for identifiers that are numeric in practice but arrive as text.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum OrderKey {
    Num(i64),
    Text(String),
}

impl OrderKey {
    fn new(s: &str) -> Self {
        s.parse::<i64>()
            .map_or_else(|_| OrderKey::Text(s.to_string()), OrderKey::Num)
    }
}

fn parse_long(text: &str, origin: &str, has_labels: bool) -> Result<TimeSeriesDataset> {
    let mut rdr = reader(text, true);
    let headers = rdr
        .headers()
        .map_err(|e| AltError::parse(origin, 1, e.to_string()))?
        .clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| AltError::parse(origin, 1, format!("missing column {name:?}")))
    };
    let (ci, cc, ct, cv) = (col("instance")?, col("channel")?, col("time")?, col("value")?);
    let cl = if has_labels { Some(col("label")?) } else { None };

    let mut by_instance: BTreeMap<OrderKey, LongInstance> = BTreeMap::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| AltError::parse(origin, n + 2, e.to_string()))?;
        let line = record_line(&rec, n + 2);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let get = |c: usize| {
            rec.get(c)
                .ok_or_else(|| AltError::parse(origin, line, format!("row has only {} fields", rec.len())))
        };
        let inst = by_instance.entry(OrderKey::new(get(ci)?)).or_default();
        if let Some(cl) = cl {
            let label = get(cl)?;
            match &inst.label {
                None => inst.label = Some(label.to_string()),
                Some(l) if l != label => {
                    return Err(AltError::parse(
                        origin,
                        line,
                        format!("instance relabeled from {l:?} to {label:?}"),
                    ))
                }
                _ => {}
            }
        }
        let value = parse_value(origin, line, get(cv)?)?;
        let times = inst.channels.entry(OrderKey::new(get(cc)?)).or_default();
        if times.insert(OrderKey::new(get(ct)?), value).is_some() {
            return Err(AltError::parse(
                origin,
                line,
                format!(
                    "duplicate (instance, channel, time) key ({}, {}, {})",
                    get(ci)?,
                    get(cc)?,
                    get(ct)?
                ),
            ));
        }
    }

    let channel_ids: Vec<OrderKey> = {
        let mut ids: Vec<OrderKey> = by_instance.values().flat_map(|x| x.channels.keys().cloned()).collect();
        ids.sort();
        ids.dedup();
        ids
    };
    let mut instances = Vec::new();
    let mut labels = Vec::new();
    for (pos, (_, li)) in by_instance.into_iter().enumerate() {
        if li.channels.len() != channel_ids.len() {
            return Err(AltError::Instance {
                instance: pos + 1,
                msg: format!("has {} of {} channels", li.channels.len(), channel_ids.len()),
            });
        }
        let channels = li
            .channels
            .into_values()
            .map(|times| times.into_values().collect())
            .collect();
        instances.push(Instance::new(channels).map_err(|e| AltError::Instance {
            instance: pos + 1,
            msg: e.to_string(),
        })?);
        labels.push(li.label.unwrap_or_else(|| UNLABELED.to_string()));
    }
    TimeSeriesDataset::from_raw_labels(instances, labels)
}

/// Write a dataset so that `load_csv` with the same layout and
/// `has_labels = true` reproduces it bit for bit.
pub fn write_csv(ds: &TimeSeriesDataset, path: impl AsRef<Path>, layout: CsvLayout) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    match layout {
        CsvLayout::RowPerInstance => {
            if ds.num_channels() > 1 || (ds.len() > 1 && ds.fixed_length().is_none()) {
                return Err(AltError::Invalid(
                    "row-per-instance CSV needs univariate, equal-length data".into(),
                ));
            }
            for (x, &y) in ds.instances().iter().zip(ds.labels()) {
                for v in x.channel(0) {
                    out.push_str(&format_f64(*v));
                    out.push(',');
                }
                out.push_str(&csv_field(ds.label_name(y)));
                out.push('\n');
            }
        }
        CsvLayout::LongFormat => {
            out.push_str("instance,channel,time,value,label\n");
            for (i, (x, &y)) in ds.instances().iter().zip(ds.labels()).enumerate() {
                let label = csv_field(ds.label_name(y));
                for (j, ch) in x.channels().iter().enumerate() {
                    for (t, v) in ch.iter().enumerate() {
                        out.push_str(&format!("{},{},{},{},{label}\n", i + 1, j + 1, t + 1, format_f64(*v)));
                    }
                }
            }
        }
    }
    std::fs::write(path, out).map_err(|e| AltError::io(path, e))
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) || s != s.trim() {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
