//! Instance transformation through a trained bank.
//!
//! For every (channel, config) the instance is embedded into the matrix `A`
//! whose row `p` holds `l` samples spaced `s` apart starting at `p * k`.
//! Each class's shapelet matrix `P_y` then yields `O_y = |A P_y|`; a row of
//! `O_y` is small when that stretch of the instance obeys the laws learned
//! from class `y`. Extraction methods reduce each `O_y` to a feature.

mod method;
mod table;

pub use method::{parse_methods, Aggregator, ExtractionMethod};
pub use table::{read_features, write_features, FeatureTable, WriteMode, CLASS_COLUMN};

use crate::dataset::{Instance, TimeSeriesDataset};
use crate::error::{AltError, Result};
use crate::lawcore::WindowConfig;
use crate::matrix::Matrix;
use crate::model::{ShapeletBank, ShapeletMatrix};
use crate::par;

/// Variance below which skewness and kurtosis are reported as 0.
pub const DEGENERATE_VARIANCE: f64 = 1e-24;

/// The `o x l` embedding matrix, `o = floor((h - s*l + 1) / k)`.
pub fn build_embedding_matrix(series: &[f64], cfg: &WindowConfig) -> Result<Matrix> {
    let o = cfg.embedding_rows(series.len());
    if o < 1 {
        return Err(AltError::Invalid(format!(
            "series of length {} is too short for config {cfg}",
            series.len()
        )));
    }
    let (l, s, k) = (cfg.l(), cfg.stride(), cfg.k());
    let mut data = Vec::with_capacity(o * l);
    for p in 0..o {
        data.extend((0..l).map(|q| series[p * k + q * s]));
    }
    Ok(Matrix::from_vec(o, l, data))
}

/// `|A P|`, elementwise magnitude of the projection.
pub fn project(a: &Matrix, p: &ShapeletMatrix) -> Result<Matrix> {
    if a.cols() != p.rows() {
        return Err(AltError::Invalid(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows(),
            a.cols(),
            p.rows(),
            p.cols()
        )));
    }
    let n = p.cols();
    let mut data = Vec::with_capacity(a.rows() * n);
    for row in a.row_iter() {
        for col in p.columns() {
            let dot: f64 = row.iter().zip(col).map(|(x, v)| x * v).sum();
            data.push(dot.abs());
        }
    }
    Ok(Matrix::from_vec(a.rows(), n, data))
}

/// Quantile by linear interpolation at zero-based position `p * (n - 1)`.
/// Reorders `values`.
pub fn quantile_in_place(values: &mut [f64], p: f64) -> f64 {
    let n = values.len();
    assert!(n > 0, "quantile of an empty row");
    let pos = p * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    let (_, lo_val, upper) = values.select_nth_unstable_by(lo, f64::total_cmp);
    let lo_val = *lo_val;
    if frac == 0.0 || upper.is_empty() {
        return lo_val;
    }
    let hi_val = upper.iter().copied().fold(f64::INFINITY, f64::min);
    lo_val + frac * (hi_val - lo_val)
}

fn aggregate(values: &[f64], agg: Aggregator) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if agg == Aggregator::Mean {
        return mean;
    }
    let central = |e: i32| values.iter().map(|v| (v - mean).powi(e)).sum::<f64>() / n;
    let m2 = central(2);
    match agg {
        Aggregator::StdDev => m2.sqrt(),
        _ if m2 <= DEGENERATE_VARIANCE => 0.0,
        Aggregator::Skewness => central(3) / m2.powf(1.5),
        Aggregator::Kurtosis => central(4) / (m2 * m2),
        Aggregator::Mean => unreachable!(),
    }
}

/// One feature per method for a single class block.
pub fn extract_block(block: &Matrix, methods: &[ExtractionMethod]) -> Result<Vec<f64>> {
    if block.rows() == 0 || block.cols() == 0 {
        return Err(AltError::Invalid("empty class block".into()));
    }
    let mut quantile_cache: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut out = Vec::with_capacity(methods.len());
    for m in methods {
        let v = match *m {
            ExtractionMethod::MeanAll => block.as_slice().iter().sum::<f64>() / block.as_slice().len() as f64,
            ExtractionMethod::PerRow { quantile, aggregator } => {
                let idx = match quantile_cache.iter().position(|(p, _)| *p == quantile) {
                    Some(i) => i,
                    None => {
                        let mut buf = vec![0.0; block.cols()];
                        let qs = block
                            .row_iter()
                            .map(|row| {
                                buf.copy_from_slice(row);
                                quantile_in_place(&mut buf, quantile)
                            })
                            .collect();
                        quantile_cache.push((quantile, qs));
                        quantile_cache.len() - 1
                    }
                };
                aggregate(&quantile_cache[idx].1, aggregator)
            }
        };
        out.push(v);
    }
    Ok(out)
}

/// Features for class blocks given in class order: `[class][method]`, flattened.
pub fn extract_features(blocks: &[Matrix], methods: &[ExtractionMethod]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(blocks.len() * methods.len());
    for b in blocks {
        out.extend(extract_block(b, methods)?);
    }
    Ok(out)
}

/// Canonical feature names: channel, then config, then class, then method.
pub fn feature_names(bank: &ShapeletBank, methods: &[ExtractionMethod]) -> Vec<String> {
    let mut names = Vec::with_capacity(bank.num_channels() * bank.num_configs() * bank.num_classes() * methods.len());
    for &ch in bank.channel_ids() {
        for g in 1..=bank.num_configs() {
            for y in 1..=bank.num_classes() {
                for m in methods {
                    names.push(format!("ch{ch}.cfg{g}.cls{y}.{m}"));
                }
            }
        }
    }
    names
}

/// Feature vector of one instance, `m * c * n * g` values in canonical order.
pub fn transform_instance(x: &Instance, bank: &ShapeletBank, methods: &[ExtractionMethod]) -> Result<Vec<f64>> {
    if methods.is_empty() {
        return Err(AltError::Invalid("no extraction methods given".into()));
    }
    if x.num_channels() != bank.num_channels() {
        return Err(AltError::Invalid(format!(
            "instance has {} channels, the model expects {}",
            x.num_channels(),
            bank.num_channels()
        )));
    }
    let mut out = Vec::with_capacity(bank.num_channels() * bank.num_configs() * bank.num_classes() * methods.len());
    for j in 0..bank.num_channels() {
        for (g, cfg) in bank.configs().iter().enumerate() {
            let a = build_embedding_matrix(x.channel(j), cfg)?;
            for y in 1..=bank.num_classes() {
                let o = project(&a, bank.matrix(g, j, y))?;
                out.extend(extract_block(&o, methods)?);
            }
        }
    }
    Ok(out)
}

/// Transform every instance of `ds`. The class column carries `ds`'s label
/// names when `with_labels` is set.
pub fn transform_set(
    ds: &TimeSeriesDataset,
    bank: &ShapeletBank,
    methods: &[ExtractionMethod],
    with_labels: bool,
) -> Result<FeatureTable> {
    let names = feature_names(bank, methods);
    let results = par::map_collect(ds.instances().iter().collect(), |x| {
        transform_instance(x, bank, methods)
    });
    let mut rows = Vec::with_capacity(results.len());
    let mut errors = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => rows.push(v),
            Err(e) => errors.push((i + 1, e)),
        }
    }
    match errors.len() {
        0 => {}
        1 => {
            let (instance, e) = errors.pop().unwrap();
            return Err(match e {
                e @ AltError::NoConvergence { .. } => e,
                e => AltError::Instance {
                    instance,
                    msg: e.to_string(),
                },
            });
        }
        n => {
            let listed: Vec<String> = errors
                .iter()
                .take(5)
                .map(|(i, e)| format!("instance {i}: {e}"))
                .collect();
            return Err(AltError::Invalid(format!(
                "{n} instances failed to transform; {}{}",
                listed.join("; "),
                if n > 5 { "; ..." } else { "" }
            )));
        }
    }
    let classes = with_labels.then(|| ds.labels().iter().map(|&y| ds.label_name(y).to_string()).collect());
    FeatureTable::new(names, rows, classes)
}
