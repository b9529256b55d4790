//! The trained shapelet bank: one matrix of shapelet columns per
//! (configuration, channel, class).

mod format;

pub use format::{load_model, read_model, save_model, write_model, FORMAT_NAME, FORMAT_VERSION};

use crate::dataset::TimeSeriesDataset;
use crate::error::{AltError, Result};
use crate::lawcore::{compute_shapelet, downsample, extract_windows, WindowConfig};
use crate::par;

/// Where a shapelet column came from; both indices 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnSource {
    /// Instance index in the dataset the bank was trained on.
    pub instance: usize,
    /// First sample of the window.
    pub start: usize,
}

/// `l x N` matrix of unit shapelet columns, stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeletMatrix {
    dim: usize,
    columns: Vec<f64>,
    sources: Vec<ColumnSource>,
}

impl ShapeletMatrix {
    pub(crate) fn new(dim: usize, columns: Vec<f64>, sources: Vec<ColumnSource>) -> Self {
        debug_assert_eq!(columns.len(), dim * sources.len());
        ShapeletMatrix { dim, columns, sources }
    }

    /// Build from explicit column vectors (no provenance).
    pub fn from_columns(dim: usize, cols: &[Vec<f64>]) -> Result<Self> {
        if cols.iter().any(|c| c.len() != dim) {
            return Err(AltError::Invalid(format!("every column must have length {dim}")));
        }
        Ok(ShapeletMatrix {
            dim,
            columns: cols.iter().flatten().copied().collect(),
            sources: vec![ColumnSource { instance: 0, start: 0 }; cols.len()],
        })
    }

    /// Rows, i.e. the embedding dimension `l`.
    pub fn rows(&self) -> usize {
        self.dim
    }

    pub fn cols(&self) -> usize {
        self.sources.len()
    }

    pub fn column(&self, q: usize) -> &[f64] {
        &self.columns[q * self.dim..(q + 1) * self.dim]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.columns.chunks_exact(self.dim.max(1))
    }

    pub fn sources(&self) -> &[ColumnSource] {
        &self.sources
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.columns[col * self.dim + row]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeletBank {
    configs: Vec<WindowConfig>,
    channel_ids: Vec<usize>,
    label_names: Vec<String>,
    // indexed by (g * m + j) * c + (y - 1)
    matrices: Vec<ShapeletMatrix>,
}

impl ShapeletBank {
    pub(crate) fn from_parts(
        configs: Vec<WindowConfig>,
        channel_ids: Vec<usize>,
        label_names: Vec<String>,
        matrices: Vec<ShapeletMatrix>,
    ) -> Result<Self> {
        let expected = configs.len() * channel_ids.len() * label_names.len();
        if matrices.len() != expected {
            return Err(AltError::Model(format!(
                "{} matrices, expected {expected}",
                matrices.len()
            )));
        }
        Ok(ShapeletBank {
            configs,
            channel_ids,
            label_names,
            matrices,
        })
    }

    pub fn configs(&self) -> &[WindowConfig] {
        &self.configs
    }

    pub fn num_configs(&self) -> usize {
        self.configs.len()
    }

    pub fn num_channels(&self) -> usize {
        self.channel_ids.len()
    }

    pub fn num_classes(&self) -> usize {
        self.label_names.len()
    }

    /// External (1-based) channel numbers used in feature names.
    pub fn channel_ids(&self) -> &[usize] {
        &self.channel_ids
    }

    /// Rename channels, e.g. after training on a channel subset.
    pub fn with_channel_ids(mut self, ids: Vec<usize>) -> Result<Self> {
        if ids.len() != self.channel_ids.len() {
            return Err(AltError::Invalid(format!(
                "{} channel ids for {} channels",
                ids.len(),
                self.channel_ids.len()
            )));
        }
        self.channel_ids = ids;
        Ok(self)
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    /// Zero-based config and channel, 1-based class label.
    pub fn matrix(&self, g: usize, j: usize, y: usize) -> &ShapeletMatrix {
        let (m, c) = (self.num_channels(), self.num_classes());
        &self.matrices[(g * m + j) * c + (y - 1)]
    }

    pub(crate) fn matrices(&self) -> &[ShapeletMatrix] {
        &self.matrices
    }

    pub fn total_columns(&self) -> usize {
        self.matrices.iter().map(ShapeletMatrix::cols).sum()
    }
}

/// Build the shapelet bank from the learn instances (zero-based indices into `ds`).
///
/// Columns of every matrix are ordered by learn instance (ascending index),
/// then window start. The result does not depend on the thread schedule.
pub fn train_bank(ds: &TimeSeriesDataset, learn: &[usize], configs: &[WindowConfig]) -> Result<ShapeletBank> {
    if configs.is_empty() {
        return Err(AltError::Config("no window configurations".into()));
    }
    if ds.is_empty() {
        return Err(AltError::Invalid("empty dataset".into()));
    }
    let mut learn: Vec<usize> = learn.to_vec();
    learn.sort_unstable();
    learn.dedup();
    if let Some(&i) = learn.iter().find(|&&i| i >= ds.len()) {
        return Err(AltError::Invalid(format!(
            "learn index {} out of range for {} instances",
            i + 1,
            ds.len()
        )));
    }
    let c = ds.num_classes();
    let m = ds.num_channels();
    let mut covered = vec![false; c];
    for &i in &learn {
        covered[ds.labels()[i] - 1] = true;
    }
    if let Some(q) = covered.iter().position(|x| !x) {
        return Err(AltError::Invalid(format!(
            "class {:?} has no learn instance",
            ds.label_name(q + 1)
        )));
    }
    for &i in &learn {
        for (g, cfg) in configs.iter().enumerate() {
            if cfg.r() > ds.instance(i).len() {
                return Err(AltError::Instance {
                    instance: i + 1,
                    msg: format!(
                        "length {} is shorter than r = {} of config {} {cfg}",
                        ds.instance(i).len(),
                        cfg.r(),
                        g + 1
                    ),
                });
            }
        }
    }

    // One task per (learn instance, config, channel); results come back in
    // task order regardless of scheduling.
    let tasks: Vec<(usize, usize, usize)> = learn
        .iter()
        .flat_map(|&i| (0..configs.len()).flat_map(move |g| (0..m).map(move |j| (i, g, j))))
        .collect();
    let results = par::map_collect(tasks.clone(), |(i, g, j)| -> Result<Vec<f64>> {
        let cfg = &configs[g];
        let series = ds.instance(i).channel(j);
        let mut out = Vec::with_capacity(cfg.window_count(series.len()) * cfg.l());
        for w in extract_windows(series, cfg)? {
            out.extend_from_slice(&compute_shapelet(&downsample(w, cfg))?.vector);
        }
        Ok(out)
    });

    let mut builders: Vec<(Vec<f64>, Vec<ColumnSource>)> = vec![(Vec::new(), Vec::new()); configs.len() * m * c];
    for ((i, g, j), res) in tasks.into_iter().zip(results) {
        let cols = res?;
        let y = ds.labels()[i];
        let k = configs[g].k();
        let slot = &mut builders[(g * m + j) * c + (y - 1)];
        let n = cols.len() / configs[g].l();
        slot.0.extend_from_slice(&cols);
        slot.1.extend((0..n).map(|p| ColumnSource {
            instance: i + 1,
            start: p * k + 1,
        }));
    }
    if let Some(idx) = builders.iter().position(|b| b.1.is_empty()) {
        let (g, rest) = (idx / (m * c), idx % (m * c));
        return Err(AltError::Invalid(format!(
            "config {} {} yields no windows for class {:?}, channel {}",
            g + 1,
            configs[g],
            ds.label_name(rest % c + 1),
            rest / c + 1
        )));
    }
    let matrices = builders
        .into_iter()
        .enumerate()
        .map(|(idx, (cols, src))| {
            let g = idx / (m * c);
            ShapeletMatrix::new(configs[g].l(), cols, src)
        })
        .collect();
    ShapeletBank::from_parts(configs.to_vec(), (1..=m).collect(), ds.label_names().to_vec(), matrices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Instance;

    fn dataset(series: &[(Vec<f64>, usize)], c: usize) -> TimeSeriesDataset {
        TimeSeriesDataset::new(
            series
                .iter()
                .map(|(s, _)| Instance::univariate(s.clone()).unwrap())
                .collect(),
            series.iter().map(|(_, y)| *y).collect(),
            (1..=c).map(|q| q.to_string()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_window_single_column() {
        let ds = dataset(&[(vec![1.0, 4.0, 2.0, 8.0, 5.0], 1)], 1);
        let cfg = WindowConfig::new(5, 3, 1).unwrap();
        let bank = train_bank(&ds, &[0], &[cfg]).unwrap();
        assert_eq!(bank.matrix(0, 0, 1).cols(), 1);
        assert_eq!(
            bank.matrix(0, 0, 1).sources()[0],
            ColumnSource { instance: 1, start: 1 }
        );
    }

    #[test]
    fn duplicates_are_kept() {
        let s: Vec<f64> = (0..9).map(|x| (x as f64 * 0.7).cos()).collect();
        let ds = dataset(&[(s.clone(), 1), (s, 1)], 1);
        let cfg = WindowConfig::new(5, 3, 2).unwrap();
        let bank = train_bank(&ds, &[0, 1], &[cfg]).unwrap();
        let p = bank.matrix(0, 0, 1);
        assert_eq!(p.cols(), 2 * cfg.window_count(9));
        let half = p.cols() / 2;
        for q in 0..half {
            assert_eq!(p.column(q), p.column(q + half));
        }
    }

    #[test]
    fn errors_name_the_problem() {
        let ds = dataset(&[(vec![1.0, 2.0, 3.0, 4.0], 1), (vec![0.0; 6], 2)], 2);
        let cfg = WindowConfig::new(5, 2, 1).unwrap();
        let err = train_bank(&ds, &[0, 1], &[cfg]).unwrap_err();
        assert!(matches!(err, AltError::Instance { instance: 1, .. }), "{err}");
        let err = train_bank(&ds, &[1], &[cfg]).unwrap_err();
        assert!(err.to_string().contains("no learn"), "{err}");
    }
}
