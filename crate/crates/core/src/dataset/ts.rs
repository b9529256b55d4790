//! Reader for the `.ts` text format used by the UCR/UEA archives.
//!
//! ```text
//! # comment
//! @problemName GunPoint
//! @univariate true
//! @classLabel true 1 2
//! @data
//! 0.1,0.2,0.3:1          <- channels separated by ':', label last
//! ```

use std::path::Path;

use super::{canonical_label_order, Instance, TimeSeriesDataset};
use crate::error::{AltError, Result};

pub fn load_ts(path: impl AsRef<Path>) -> Result<TimeSeriesDataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| AltError::io(path, e))?;
    parse_ts(&text, &path.display().to_string())
}

/// Parse `.ts` content; `origin` is used in error messages.
pub fn parse_ts(text: &str, origin: &str) -> Result<TimeSeriesDataset> {
    let mut declared: Option<Vec<String>> = None;
    let mut dimensions: Option<usize> = None;
    let mut univariate: Option<bool> = None;
    let mut in_data = false;
    let mut instances = Vec::new();
    let mut raw_labels = Vec::new();
    let mut saw_problem = false;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !in_data {
            if !line.starts_with('@') {
                return Err(AltError::parse(
                    origin,
                    lineno,
                    "expected a header directive before @data",
                ));
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or_default().to_ascii_lowercase();
            let rest: Vec<&str> = parts.collect();
            match key.as_str() {
                "@problemname" => saw_problem = true,
                "@univariate" => univariate = Some(parse_bool(origin, lineno, &rest)?),
                "@dimensions" => {
                    let d = rest
                        .first()
                        .and_then(|s| s.parse::<usize>().ok())
                        .filter(|&d| d > 0)
                        .ok_or_else(|| AltError::parse(origin, lineno, "@dimensions needs a positive integer"))?;
                    dimensions = Some(d);
                }
                "@classlabel" => {
                    if !parse_bool(origin, lineno, &rest[..rest.len().min(1)])? {
                        return Err(AltError::parse(origin, lineno, "unlabeled .ts files are not supported"));
                    }
                    if rest.len() < 2 {
                        return Err(AltError::parse(origin, lineno, "@classLabel true declares no labels"));
                    }
                    declared = Some(rest[1..].iter().map(|s| s.to_string()).collect());
                }
                "@timestamps" => {
                    if parse_bool(origin, lineno, &rest)? {
                        return Err(AltError::parse(origin, lineno, "timestamped series are not supported"));
                    }
                }
                "@targetlabel" => {
                    return Err(AltError::parse(origin, lineno, "regression targets are not supported"));
                }
                "@data" => {
                    if !saw_problem {
                        return Err(AltError::parse(origin, lineno, "missing @problemName"));
                    }
                    if declared.is_none() {
                        return Err(AltError::parse(origin, lineno, "missing @classLabel"));
                    }
                    if univariate.is_none() && dimensions.is_none() {
                        return Err(AltError::parse(origin, lineno, "missing @univariate or @dimensions"));
                    }
                    in_data = true;
                }
                // @missing, @equalLength, @seriesLength and unknown directives
                // carry nothing we rely on.
                _ => {}
            }
            continue;
        }

        let fields: Vec<&str> = line.split(':').collect();
        if fields.len() < 2 {
            return Err(AltError::parse(
                origin,
                lineno,
                "expected at least one channel and a label",
            ));
        }
        let (label, channel_fields) = fields.split_last().unwrap();
        let label = label.trim();
        let labels_ok = declared.as_ref().unwrap();
        if !labels_ok.iter().any(|d| d == label) {
            return Err(AltError::parse(
                origin,
                lineno,
                format!("label {label:?} is not in the declared set {labels_ok:?}"),
            ));
        }
        let expected = match (univariate, dimensions) {
            (Some(true), _) => Some(1),
            (_, Some(d)) => Some(d),
            _ => None,
        };
        if let Some(d) = expected {
            if channel_fields.len() != d {
                return Err(AltError::parse(
                    origin,
                    lineno,
                    format!("found {} channels, header declares {d}", channel_fields.len()),
                ));
            }
        }
        let channels = channel_fields
            .iter()
            .map(|f| parse_values(origin, lineno, f))
            .collect::<Result<Vec<_>>>()?;
        let inst = Instance::new(channels).map_err(|e| AltError::parse(origin, lineno, e.to_string()))?;
        instances.push(inst);
        raw_labels.push(label.to_string());
    }

    if !in_data {
        return Err(AltError::parse(
            origin,
            text.lines().count().max(1),
            "missing @data section",
        ));
    }
    let names = canonical_label_order(declared.unwrap());
    let labels = raw_labels
        .iter()
        .map(|r| names.iter().position(|n| n == r).unwrap() + 1)
        .collect();
    TimeSeriesDataset::new(instances, labels, names)
}

fn parse_bool(origin: &str, line: usize, rest: &[&str]) -> Result<bool> {
    match rest.first().map(|s| s.to_ascii_lowercase()) {
        Some(s) if s == "true" => Ok(true),
        Some(s) if s == "false" => Ok(false),
        _ => Err(AltError::parse(origin, line, "expected true or false")),
    }
}

fn parse_values(origin: &str, line: usize, field: &str) -> Result<Vec<f64>> {
    field
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            match tok.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ if tok == "?" || tok.eq_ignore_ascii_case("nan") => {
                    Err(AltError::parse(origin, line, "missing values are not supported"))
                }
                _ => Err(AltError::parse(origin, line, format!("non-numeric value {tok:?}"))),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "@problemName t\n@univariate true\n@classLabel true 1\n@data\n";

    #[test]
    fn minimal_file() {
        let ds = parse_ts(&format!("{HEADER}1,2,3:1\n"), "mem").unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.num_channels(), 1);
        assert_eq!(ds.fixed_length(), Some(3));
        assert_eq!(ds.labels(), &[1]);
    }

    #[test]
    fn non_numeric_value_names_line() {
        let err = parse_ts(&format!("{HEADER}1,abc,3:1\n"), "mem").unwrap_err();
        match err {
            AltError::Parse { line, msg, .. } => {
                assert_eq!(line, 5);
                assert!(msg.contains("abc"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn undeclared_label_rejected() {
        let err = parse_ts(&format!("{HEADER}1,2,3:7\n"), "mem").unwrap_err();
        assert!(err.to_string().contains("declared"));
    }

    #[test]
    fn multivariate_variable_length_with_crlf() {
        let text = "#c\r\n@problemName m\r\n@dimensions 2\r\n@classLabel true b a\r\n@data\r\n\
                    1,2,3:4,5,6:b\r\n1,2,3,4:5,6,7,8:a\r\n";
        let ds = parse_ts(text, "mem").unwrap();
        assert_eq!(ds.num_channels(), 2);
        assert_eq!(ds.lengths(), vec![3, 4]);
        assert_eq!(ds.labels(), &[2, 1]);
        assert_eq!(ds.fixed_length(), None);
    }

    #[test]
    fn channel_count_mismatch() {
        let text = "@problemName m\n@dimensions 2\n@classLabel true a\n@data\n1,2,3:a\n";
        assert!(parse_ts(text, "mem").is_err());
    }

    #[test]
    fn missing_values_rejected() {
        assert!(parse_ts(&format!("{HEADER}1,?,3:1\n"), "mem").is_err());
    }
}
