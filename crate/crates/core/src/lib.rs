//! Adaptive law-based transformation of time series into class-discriminative
//! features.
//!
//! Windows of several lengths are cut from a set of learn instances, each is
//! thinned and embedded into a small Hankel matrix, and the eigenvector of
//! smallest absolute eigenvalue (a linear law the window obeys) becomes a
//! shapelet. Other instances are projected onto every class's shapelets and
//! the projections are summarized into features that simple classifiers
//! separate well.
//!
//! ```no_run
//! use alt_core::prelude::*;
//!
//! let ds = load_ts("GunPoint_TRAIN.ts")?;
//! let split = stratified_split(&ds, &SplitSpec::take_first(10))?;
//! let bank = train_bank(&ds, &split.learn, &[WindowConfig::new(25, 4, 1)?])?;
//! let methods = parse_methods("mean_all,mean@0.05")?;
//! let table = transform_set(&ds.subset(&split.train), &bank, &methods, true)?;
//! # Ok::<(), alt_core::AltError>(())
//! ```

pub mod classify;
pub mod dataset;
pub mod error;
pub mod lawcore;
pub mod matrix;
pub mod model;
pub mod numfmt;
mod par;
pub mod transform;

pub use error::{AltError, ErrorKind, Result};

pub mod prelude {
    pub use crate::classify::{evaluate, knn_predict, Evaluation, LabeledFeatures, Lda};
    pub use crate::dataset::{
        load_csv, load_ts, stratified_split, CsvLayout, Instance, Split, SplitMode, SplitSize, SplitSpec,
        TimeSeriesDataset,
    };
    pub use crate::error::{AltError, Result};
    pub use crate::lawcore::{compute_shapelet, WindowConfig};
    pub use crate::model::{load_model, save_model, train_bank, ShapeletBank};
    pub use crate::transform::{
        parse_methods, read_features, transform_instance, transform_set, write_features, ExtractionMethod,
        FeatureTable, WriteMode,
    };
}
