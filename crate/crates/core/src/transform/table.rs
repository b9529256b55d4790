//! Feature tables and their CSV form.
//!
//! The first row is the header of feature names, optionally followed by a
//! trailing `class` column. Values are shortest round-trip decimals.

use std::path::Path;

use crate::dataset::csv_field;
use crate::error::{AltError, Result};
use crate::numfmt::format_f64;

pub const CLASS_COLUMN: &str = "class";

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    names: Vec<String>,
    rows: Vec<Vec<f64>>,
    classes: Option<Vec<String>>,
}

impl FeatureTable {
    pub fn new(names: Vec<String>, rows: Vec<Vec<f64>>, classes: Option<Vec<String>>) -> Result<Self> {
        if let Some(i) = rows.iter().position(|r| r.len() != names.len()) {
            return Err(AltError::Features(format!(
                "row {} has {} values for {} columns",
                i + 1,
                rows[i].len(),
                names.len()
            )));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(AltError::Features("non-finite feature value".into()));
        }
        if let Some(c) = &classes {
            if c.len() != rows.len() {
                return Err(AltError::Features(format!(
                    "{} class labels for {} rows",
                    c.len(),
                    rows.len()
                )));
            }
        }
        let mut sorted: Vec<&String> = names.iter().collect();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(AltError::Features(format!("duplicate column {:?}", w[0])));
        }
        if names.iter().any(|n| n == CLASS_COLUMN) {
            return Err(AltError::Features(format!("{CLASS_COLUMN:?} is reserved for labels")));
        }
        Ok(FeatureTable { names, rows, classes })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn classes(&self) -> Option<&[String]> {
        self.classes.as_deref()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_features(&self) -> usize {
        self.names.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Values of the named column.
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self.column_index(name).ok_or_else(|| {
            AltError::Features(format!(
                "unknown feature {name:?}; available: {}",
                self.names.join(", ")
            ))
        })?;
        Ok(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Keep only the named columns, in the given order.
    pub fn select(&self, names: &[String]) -> Result<FeatureTable> {
        let cols: Vec<Vec<f64>> = names.iter().map(|n| self.column(n)).collect::<Result<_>>()?;
        let rows = (0..self.num_rows())
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect();
        FeatureTable::new(names.to_vec(), rows, self.classes.clone())
    }

    /// Keep only the given zero-based rows.
    pub fn select_rows(&self, rows: &[usize]) -> Result<FeatureTable> {
        if let Some(&r) = rows.iter().find(|&&r| r >= self.num_rows()) {
            return Err(AltError::Features(format!(
                "row {} out of range (table has {})",
                r + 1,
                self.num_rows()
            )));
        }
        Ok(FeatureTable {
            names: self.names.clone(),
            rows: rows.iter().map(|&r| self.rows[r].clone()).collect(),
            classes: self
                .classes
                .as_ref()
                .map(|c| rows.iter().map(|&r| c[r].clone()).collect()),
        })
    }

    fn header_line(&self, include_class: bool) -> String {
        let mut cells = self.names.clone();
        if include_class {
            cells.push(CLASS_COLUMN.to_string());
        }
        cells.join(",")
    }

    fn row_line(&self, i: usize, include_class: bool) -> String {
        let mut cells: Vec<String> = self.rows[i].iter().map(|v| format_f64(*v)).collect();
        if include_class {
            cells.push(csv_field(&self.classes.as_ref().unwrap()[i]));
        }
        cells.join(",")
    }

    /// Whole table as CSV text.
    pub fn to_csv(&self, include_class: bool) -> Result<String> {
        if include_class && self.classes.is_none() {
            return Err(AltError::Features(
                "class column requested but the table has no labels".into(),
            ));
        }
        let mut out = self.header_line(include_class);
        out.push('\n');
        for i in 0..self.num_rows() {
            out.push_str(&self.row_line(i, include_class));
            out.push('\n');
        }
        Ok(out)
    }
}

/// How `write_features` treats an existing file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WriteMode {
    /// Create or truncate.
    NewFile,
    /// Add columns to an existing file with the same rows.
    AppendFeature,
    /// Add rows to an existing file with the same header.
    AppendInstance,
}

impl std::str::FromStr for WriteMode {
    type Err = AltError;

    /// Accepts `new`, `append-feature`, `append-instance`, plus the
    /// `New_file` / `Append feature` / `Append instance` spellings.
    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .map(|c| if c == '_' || c == ' ' { '-' } else { c })
            .collect();
        match norm.as_str() {
            "new" | "new-file" => Ok(WriteMode::NewFile),
            "append-feature" => Ok(WriteMode::AppendFeature),
            "append-instance" => Ok(WriteMode::AppendInstance),
            _ => Err(AltError::Invalid(format!(
                "unknown write mode {s:?} (expected new, append-feature or append-instance)"
            ))),
        }
    }
}

/// Raw CSV cells of an existing feature file.
struct RawFile {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl RawFile {
    fn class_index(&self) -> Option<usize> {
        (self.header.last().map(String::as_str) == Some(CLASS_COLUMN)).then(|| self.header.len() - 1)
    }
}

fn read_raw(path: &Path) -> Result<RawFile> {
    let text = std::fs::read_to_string(path).map_err(|e| AltError::io(path, e))?;
    let mut rdr = ::csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| AltError::Features(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| AltError::Features(format!("{}: {e}", path.display())))?;
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok(RawFile { header, rows })
}

pub fn read_features(path: impl AsRef<Path>) -> Result<FeatureTable> {
    let path = path.as_ref();
    let raw = read_raw(path)?;
    let class_idx = raw.class_index();
    let n_feat = class_idx.unwrap_or(raw.header.len());
    let mut rows = Vec::with_capacity(raw.rows.len());
    let mut classes = class_idx.map(|_| Vec::with_capacity(raw.rows.len()));
    for (i, r) in raw.rows.iter().enumerate() {
        let values = r[..n_feat]
            .iter()
            .map(|v| {
                v.trim().parse::<f64>().map_err(|_| {
                    AltError::Features(format!("{}: row {}: non-numeric value {v:?}", path.display(), i + 1))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(values);
        if let (Some(c), Some(ci)) = (classes.as_mut(), class_idx) {
            c.push(r[ci].clone());
        }
    }
    FeatureTable::new(raw.header[..n_feat].to_vec(), rows, classes)
}

/// Write `table` to `path` according to `mode`.
pub fn write_features(
    table: &FeatureTable,
    path: impl AsRef<Path>,
    mode: WriteMode,
    include_class: bool,
) -> Result<()> {
    let path = path.as_ref();
    let text = match mode {
        WriteMode::NewFile => table.to_csv(include_class)?,
        WriteMode::AppendInstance => {
            if include_class && table.classes.is_none() {
                return Err(AltError::Features(
                    "class column requested but the table has no labels".into(),
                ));
            }
            let raw = read_existing(path)?;
            let header = table.header_line(include_class);
            if raw.header.join(",") != header {
                return Err(AltError::Features(format!(
                    "{}: header does not match the new table",
                    path.display()
                )));
            }
            let mut out = std::fs::read_to_string(path).map_err(|e| AltError::io(path, e))?;
            if !out.is_empty() && !out.ends_with('\n') {
                out.push('\n');
            }
            for i in 0..table.num_rows() {
                out.push_str(&table.row_line(i, include_class));
                out.push('\n');
            }
            out
        }
        WriteMode::AppendFeature => {
            if include_class && table.classes.is_none() {
                return Err(AltError::Features(
                    "class column requested but the table has no labels".into(),
                ));
            }
            let raw = read_existing(path)?;
            if raw.rows.len() != table.num_rows() {
                return Err(AltError::Features(format!(
                    "{}: has {} rows, the new table has {}",
                    path.display(),
                    raw.rows.len(),
                    table.num_rows()
                )));
            }
            let class_idx = raw.class_index();
            let old_names = &raw.header[..class_idx.unwrap_or(raw.header.len())];
            if let Some(dup) = table.names.iter().find(|n| old_names.contains(n)) {
                return Err(AltError::Features(format!(
                    "{}: column {dup:?} already exists",
                    path.display()
                )));
            }
            if let (Some(ci), true) = (class_idx, include_class) {
                let new = table.classes.as_ref().unwrap();
                if let Some(i) = (0..raw.rows.len()).find(|&i| raw.rows[i][ci] != new[i]) {
                    return Err(AltError::Features(format!(
                        "{}: class column differs at row {}",
                        path.display(),
                        i + 1
                    )));
                }
            }
            let mut header: Vec<String> = old_names.to_vec();
            header.extend(table.names.iter().cloned());
            let keep_class = class_idx.is_some() || include_class;
            if keep_class {
                header.push(CLASS_COLUMN.to_string());
            }
            let mut out = header.join(",");
            out.push('\n');
            for (i, old) in raw.rows.iter().enumerate() {
                let mut cells: Vec<String> = old[..old_names.len()].iter().map(|c| csv_field(c)).collect();
                cells.extend(table.rows[i].iter().map(|v| format_f64(*v)));
                if keep_class {
                    let label = match class_idx {
                        Some(ci) => old[ci].clone(),
                        None => table.classes.as_ref().unwrap()[i].clone(),
                    };
                    cells.push(csv_field(&label));
                }
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
    };
    std::fs::write(path, text).map_err(|e| AltError::io(path, e))
}

fn read_existing(path: &Path) -> Result<RawFile> {
    if !path.exists() {
        return Err(AltError::Features(format!(
            "{}: append mode needs an existing file",
            path.display()
        )));
    }
    read_raw(path)
}
