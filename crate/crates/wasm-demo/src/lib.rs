//! Three operations behind a static page: the shapelet of one window, the
//! sampling layout of a configuration, and a two-feature scatter of a
//! labelled dataset. Each has a plain Rust form (tested natively) and a
//! `#[wasm_bindgen]` wrapper returning JSON.

use alt_core::classify::{evaluate, knn_predict, LabeledFeatures, Lda};
use alt_core::dataset::{parse_ts, stratified_split, SplitSpec, TimeSeriesDataset};
use alt_core::lawcore::{compute_shapelet, hankel_embed, WindowConfig};
use alt_core::model::train_bank;
use alt_core::transform::{transform_set, ExtractionMethod};
use alt_core::{AltError, Result};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Debug, Serialize)]
pub struct ShapeletView {
    pub hankel: Vec<Vec<f64>>,
    pub vector: Vec<f64>,
    pub eigenvalue: f64,
    pub residual: f64,
}

/// Shapelet of a window already thinned to `2l - 1` samples.
pub fn shapelet_of(values: &[f64]) -> Result<ShapeletView> {
    if values.len() < 3 || values.len().is_multiple_of(2) {
        return Err(AltError::Invalid(format!(
            "need an odd number (>= 3) of samples, got {}",
            values.len()
        )));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(AltError::Invalid(format!("non-finite sample {v}")));
    }
    let s = hankel_embed(values);
    let n = s.dim();
    let sh = compute_shapelet(values)?;
    Ok(ShapeletView {
        hankel: (0..n).map(|a| (0..n).map(|b| s.get(a, b)).collect()).collect(),
        vector: sh.vector,
        eigenvalue: sh.eigenvalue,
        residual: sh.residual,
    })
}

#[derive(Debug, Serialize)]
pub struct Layout {
    pub stride: usize,
    pub windows: usize,
    pub embedding_rows: usize,
    /// Sample indices (0-based) of the first few windows after thinning.
    pub window_samples: Vec<Vec<usize>>,
    /// Sample indices of the first few rows of the embedding matrix.
    pub embedding_samples: Vec<Vec<usize>>,
}

pub fn window_layout(h: usize, r: usize, l: usize, k: usize, show: usize) -> Result<Layout> {
    let cfg = WindowConfig::new(r, l, k)?;
    let s = cfg.stride();
    let windows = cfg.window_count(h);
    let rows = cfg.embedding_rows(h);
    Ok(Layout {
        stride: s,
        windows,
        embedding_rows: rows,
        window_samples: (0..windows.min(show))
            .map(|p| (0..2 * l - 1).map(|q| p * k + q * s).collect())
            .collect(),
        embedding_samples: (0..rows.min(show))
            .map(|p| (0..l).map(|q| p * k + q * s).collect())
            .collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub class: String,
    pub test: bool,
}

#[derive(Debug, Serialize)]
pub struct Scatter {
    pub x_name: String,
    pub y_name: String,
    pub classifier: &'static str,
    pub accuracy: f64,
    pub points: Vec<Point>,
    /// LDA separator `w . (x, y) = b` when there are two classes.
    pub separator: Option<[f64; 3]>,
}

#[derive(Debug, Clone)]
pub struct ScatterParams {
    pub r: usize,
    pub l: usize,
    pub k: usize,
    pub learn_count: usize,
    /// 1-based.
    pub channel: usize,
    /// `None` for mean_all, otherwise mean of per-row `quantile`.
    pub quantile: Option<f64>,
    /// 1-based classes whose features go on the x and y axes.
    pub x_class: usize,
    pub y_class: usize,
}

/// The first `learn_count` training instances build the bank; the rest of
/// the training file fits the classifier and the test file scores it.
pub fn scatter(train_text: &str, test_text: &str, p: &ScatterParams) -> Result<Scatter> {
    let train = parse_ts(train_text, "train")?;
    let test = parse_ts(test_text, "test")?;
    let both = TimeSeriesDataset::concat(&[train.clone(), test])?;
    let c = both.num_classes();
    if p.channel == 0 || p.channel > both.num_channels() {
        return Err(AltError::Invalid(format!(
            "channel {} outside 1..={}",
            p.channel,
            both.num_channels()
        )));
    }
    for y in [p.x_class, p.y_class] {
        if y == 0 || y > c {
            return Err(AltError::Invalid(format!("class {y} outside 1..={c}")));
        }
    }
    if p.learn_count >= train.len() {
        return Err(AltError::Invalid(format!(
            "learn count {} leaves no training instances (train file has {})",
            p.learn_count,
            train.len()
        )));
    }
    let ds = both.select_channels(&[p.channel - 1])?;
    let split = stratified_split(&ds, &SplitSpec::take_first(p.learn_count))?;
    let bank =
        train_bank(&ds, &split.learn, &[WindowConfig::new(p.r, p.l, p.k)?])?.with_channel_ids(vec![p.channel])?;
    let method = match p.quantile {
        None => ExtractionMethod::MeanAll,
        Some(q) => ExtractionMethod::per_row(alt_core::transform::Aggregator::Mean, q)?,
    };
    let rest = ds.subset(&split.train);
    let table = transform_set(&rest, &bank, std::slice::from_ref(&method), true)?;
    let x_name = format!("ch{}.cfg1.cls{}.{method}", p.channel, p.x_class);
    let y_name = format!("ch{}.cfg1.cls{}.{method}", p.channel, p.y_class);
    let table = table.select(&[x_name.clone(), y_name.clone()])?;

    let n_train = train.len() - p.learn_count;
    let names = ds.label_names().to_vec();
    let fit_rows: Vec<usize> = (0..n_train).collect();
    let test_rows: Vec<usize> = (n_train..table.num_rows()).collect();
    let fit = LabeledFeatures::from_table(&table.select_rows(&fit_rows)?, &names)?;
    let eval_set = LabeledFeatures::from_table(&table.select_rows(&test_rows)?, &names)?;
    let (classifier, predictions, separator) = if c == 2 {
        let lda = Lda::fit(&fit)?;
        let pred = eval_set.rows().iter().map(|x| lda.predict(x)).collect::<Vec<_>>();
        ("lda", pred, Some([lda.weights[0], lda.weights[1], lda.threshold]))
    } else {
        let pred = eval_set
            .rows()
            .iter()
            .map(|x| knn_predict(&fit, x, 1))
            .collect::<Result<Vec<_>>>()?;
        ("1-nn", pred, None)
    };
    let accuracy = if eval_set.is_empty() {
        f64::NAN
    } else {
        evaluate(&predictions, eval_set.labels(), c)?.accuracy
    };
    let classes = table.classes().unwrap_or_default();
    let points = table
        .rows()
        .iter()
        .enumerate()
        .map(|(i, row)| Point {
            x: row[0],
            y: row[1],
            class: classes[i].clone(),
            test: i >= n_train,
        })
        .collect();
    Ok(Scatter {
        x_name,
        y_name,
        classifier,
        accuracy,
        points,
        separator,
    })
}

fn to_js<T: Serialize>(r: Result<T>) -> std::result::Result<String, JsError> {
    match r {
        Ok(v) => serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string())),
        Err(e) => Err(JsError::new(&e.to_string())),
    }
}

/// JSON `ShapeletView`.
#[wasm_bindgen(js_name = shapeletOf)]
pub fn shapelet_of_js(values: &[f64]) -> std::result::Result<String, JsError> {
    to_js(shapelet_of(values))
}

/// JSON `Layout`.
#[wasm_bindgen(js_name = windowLayout)]
pub fn window_layout_js(h: usize, r: usize, l: usize, k: usize) -> std::result::Result<String, JsError> {
    to_js(window_layout(h, r, l, k, 6))
}

/// JSON `Scatter`. A negative `quantile` selects mean_all.
#[allow(clippy::too_many_arguments)]
#[wasm_bindgen(js_name = scatter)]
pub fn scatter_js(
    train_text: &str,
    test_text: &str,
    r: usize,
    l: usize,
    k: usize,
    learn_count: usize,
    channel: usize,
    quantile: f64,
    x_class: usize,
    y_class: usize,
) -> std::result::Result<String, JsError> {
    let params = ScatterParams {
        r,
        l,
        k,
        learn_count,
        channel,
        quantile: (quantile >= 0.0).then_some(quantile),
        x_class,
        y_class,
    };
    to_js(scatter(train_text, test_text, &params))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gunpoint() -> (String, String) {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/");
        (
            std::fs::read_to_string(format!("{dir}GunPoint_TRAIN.ts")).unwrap(),
            std::fs::read_to_string(format!("{dir}GunPoint_TEST.ts")).unwrap(),
        )
    }

    #[test]
    fn arithmetic_window() {
        let v = shapelet_of(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert!(v.eigenvalue.abs() < 1e-12);
        assert!((v.vector[1] - 2.0 / 6f64.sqrt()).abs() < 1e-12);
        assert_eq!(v.hankel[1], vec![2.0, 3.0, 4.0]);
        assert!(shapelet_of(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn layout_of_gunpoint_config() {
        let l = window_layout(150, 25, 4, 1, 2).unwrap();
        assert_eq!((l.stride, l.windows, l.embedding_rows), (4, 126, 135));
        assert_eq!(l.window_samples[1], vec![1, 5, 9, 13, 17, 21, 25]);
        assert_eq!(l.embedding_samples[0], vec![0, 4, 8, 12]);
        assert!(window_layout(150, 25, 6, 1, 2).is_err());
    }

    #[test]
    fn gunpoint_scatter_matches_the_cli_protocol() {
        let (train, test) = gunpoint();
        let p = ScatterParams {
            r: 25,
            l: 4,
            k: 1,
            learn_count: 10,
            channel: 1,
            quantile: Some(0.05),
            x_class: 1,
            y_class: 2,
        };
        let s = scatter(&train, &test, &p).unwrap();
        assert_eq!(s.points.len(), 190);
        assert_eq!(s.points.iter().filter(|p| p.test).count(), 150);
        assert_eq!(s.classifier, "lda");
        assert_eq!(s.x_name, "ch1.cfg1.cls1.mean@0.05");
        // Same features and classifier as the command-line eval: 129/150.
        assert!((s.accuracy - 0.86).abs() < 1e-12, "{}", s.accuracy);
    }
}
