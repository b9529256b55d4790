//! Labeled time series collections: storage, ingestion and partitioning.

mod csv;
mod split;
mod ts;

pub(crate) use self::csv::csv_field;
pub use self::csv::{load_csv, write_csv, CsvLayout, UNLABELED};
pub use split::{stratified_split, Split, SplitMode, SplitSize, SplitSpec};
pub use ts::{load_ts, parse_ts};

use crate::error::{AltError, Result};

/// Minimum number of samples an instance must carry.
pub const MIN_LENGTH: usize = 3;

/// One instance: `channels[j][t]`, every channel the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    channels: Vec<Vec<f64>>,
}

impl Instance {
    pub fn new(channels: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = channels.first() else {
            return Err(AltError::Invalid("instance has no channels".into()));
        };
        let len = first.len();
        if channels.iter().any(|c| c.len() != len) {
            return Err(AltError::Invalid("channels of one instance differ in length".into()));
        }
        if len < MIN_LENGTH {
            return Err(AltError::Invalid(format!(
                "instance length {len} is below the minimum of {MIN_LENGTH}"
            )));
        }
        if channels.iter().flatten().any(|v| !v.is_finite()) {
            return Err(AltError::Invalid("non-finite value in instance".into()));
        }
        Ok(Instance { channels })
    }

    /// Single-channel convenience constructor.
    pub fn univariate(values: Vec<f64>) -> Result<Self> {
        Self::new(vec![values])
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn channel(&self, j: usize) -> &[f64] {
        &self.channels[j]
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.channels
    }

    /// Multiply every value by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Instance {
        Instance {
            channels: self
                .channels
                .iter()
                .map(|c| c.iter().map(|v| v * alpha).collect())
                .collect(),
        }
    }
}

/// Instances with class labels `1..=c`.
///
/// External labels are kept in `label_names`, sorted; label `y` refers to
/// `label_names[y - 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesDataset {
    instances: Vec<Instance>,
    labels: Vec<usize>,
    label_names: Vec<String>,
}

impl TimeSeriesDataset {
    /// Build a dataset from raw external labels, canonicalizing them.
    pub fn from_raw_labels(instances: Vec<Instance>, raw_labels: Vec<String>) -> Result<Self> {
        let names = canonical_label_order(raw_labels.iter().cloned());
        let labels = raw_labels
            .iter()
            .map(|r| names.iter().position(|n| n == r).unwrap() + 1)
            .collect();
        Self::new(instances, labels, names)
    }

    /// Build a dataset from already canonical labels.
    pub fn new(instances: Vec<Instance>, labels: Vec<usize>, label_names: Vec<String>) -> Result<Self> {
        if instances.len() != labels.len() {
            return Err(AltError::Invalid(format!(
                "{} instances but {} labels",
                instances.len(),
                labels.len()
            )));
        }
        if let Some(first) = instances.first() {
            let m = first.num_channels();
            if let Some(i) = instances.iter().position(|x| x.num_channels() != m) {
                return Err(AltError::Instance {
                    instance: i + 1,
                    msg: format!("has {} channels, expected {m}", instances[i].num_channels()),
                });
            }
        }
        let c = label_names.len();
        if let Some(i) = labels.iter().position(|&y| y == 0 || y > c) {
            return Err(AltError::Instance {
                instance: i + 1,
                msg: format!("label {} outside 1..={c}", labels[i]),
            });
        }
        Ok(TimeSeriesDataset {
            instances,
            labels,
            label_names,
        })
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn num_channels(&self) -> usize {
        self.instances.first().map_or(0, Instance::num_channels)
    }

    pub fn num_classes(&self) -> usize {
        self.label_names.len()
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn instance(&self, i: usize) -> &Instance {
        &self.instances[i]
    }

    /// Canonical labels in `1..=c`, one per instance.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn label_name(&self, y: usize) -> &str {
        &self.label_names[y - 1]
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.instances.iter().map(Instance::len).collect()
    }

    /// Common length, or `None` when instances differ in length.
    pub fn fixed_length(&self) -> Option<usize> {
        let first = self.instances.first()?.len();
        self.instances.iter().all(|x| x.len() == first).then_some(first)
    }

    /// Instance count per class, indexed by `y - 1`.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes()];
        for &y in &self.labels {
            counts[y - 1] += 1;
        }
        counts
    }

    /// Checks that every declared class has at least one instance.
    pub fn validate_classes(&self) -> Result<()> {
        let counts = self.class_counts();
        if let Some(q) = counts.iter().position(|&n| n == 0) {
            return Err(AltError::Invalid(format!(
                "class {:?} has no instances",
                self.label_names[q]
            )));
        }
        Ok(())
    }

    /// Subset by zero-based instance indices, keeping the label mapping.
    pub fn subset(&self, indices: &[usize]) -> TimeSeriesDataset {
        TimeSeriesDataset {
            instances: indices.iter().map(|&i| self.instances[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            label_names: self.label_names.clone(),
        }
    }

    /// Keep only the given zero-based channels, in the given order.
    pub fn select_channels(&self, channels: &[usize]) -> Result<TimeSeriesDataset> {
        let m = self.num_channels();
        if let Some(&j) = channels.iter().find(|&&j| j >= m) {
            return Err(AltError::Invalid(format!(
                "channel {} requested but the dataset has {m}",
                j + 1
            )));
        }
        let instances = self
            .instances
            .iter()
            .map(|x| Instance {
                channels: channels.iter().map(|&j| x.channels[j].clone()).collect(),
            })
            .collect();
        Ok(TimeSeriesDataset {
            instances,
            labels: self.labels.clone(),
            label_names: self.label_names.clone(),
        })
    }

    /// Concatenate datasets in order. Label sets are merged and the merged
    /// set is re-canonicalized.
    pub fn concat(parts: &[TimeSeriesDataset]) -> Result<TimeSeriesDataset> {
        let names = canonical_label_order(parts.iter().flat_map(|p| p.label_names.iter().cloned()));
        let mut instances = Vec::new();
        let mut labels = Vec::new();
        for p in parts {
            instances.extend(p.instances.iter().cloned());
            labels.extend(p.labels.iter().map(|&y| {
                let name = &p.label_names[y - 1];
                names.iter().position(|n| n == name).unwrap() + 1
            }));
        }
        TimeSeriesDataset::new(instances, labels, names)
    }

    /// Re-express labels against an externally fixed label list (e.g. a
    /// trained model's). Unknown labels are an error.
    pub fn relabel(&self, names: &[String]) -> Result<TimeSeriesDataset> {
        let map: Vec<usize> = self
            .label_names
            .iter()
            .map(|n| {
                names
                    .iter()
                    .position(|m| m == n)
                    .map(|p| p + 1)
                    .ok_or_else(|| AltError::Invalid(format!("label {n:?} is not known to the model")))
            })
            .collect::<Result<_>>()?;
        Ok(TimeSeriesDataset {
            instances: self.instances.clone(),
            labels: self.labels.iter().map(|&y| map[y - 1]).collect(),
            label_names: names.to_vec(),
        })
    }
}

/// Deduplicate and sort labels: numerically when every label parses as a
/// number, lexicographically otherwise.
pub fn canonical_label_order(labels: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut names: Vec<String> = labels.into_iter().collect();
    names.sort();
    names.dedup();
    let numeric: Option<Vec<f64>> = names.iter().map(|s| s.trim().parse::<f64>().ok()).collect();
    if let Some(keys) = numeric {
        let mut paired: Vec<(f64, String)> = keys.into_iter().zip(names).collect();
        paired.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        names = paired.into_iter().map(|(_, s)| s).collect();
    }
    names
}
