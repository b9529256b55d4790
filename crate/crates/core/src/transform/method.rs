use std::fmt;
use std::str::FromStr;

use crate::error::AltError;
use crate::numfmt::format_f64;

/// Reduction of the per-row quantiles of a class block to one number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Aggregator {
    Mean,
    /// Population standard deviation.
    StdDev,
    /// Standardized third central moment.
    Skewness,
    /// Standardized fourth central moment (not excess).
    Kurtosis,
}

impl Aggregator {
    pub fn name(self) -> &'static str {
        match self {
            Aggregator::Mean => "mean",
            Aggregator::StdDev => "2nd_moment",
            Aggregator::Skewness => "3rd_moment",
            Aggregator::Kurtosis => "4th_moment",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "mean" => Aggregator::Mean,
            "2nd_moment" => Aggregator::StdDev,
            "3rd_moment" => Aggregator::Skewness,
            "4th_moment" => Aggregator::Kurtosis,
            _ => return None,
        })
    }
}

/// How one class block of the projection matrix becomes a feature.
///
/// Text form: `mean_all`, or `<aggregator>@<p>` such as `mean@0.05` or
/// `4th_moment@0.05`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtractionMethod {
    /// Mean of every entry in the block.
    MeanAll,
    /// `quantile`-quantile of each row, then `aggregator` over the rows.
    PerRow { quantile: f64, aggregator: Aggregator },
}

impl ExtractionMethod {
    pub fn per_row(aggregator: Aggregator, quantile: f64) -> Result<Self, AltError> {
        if !(quantile > 0.0 && quantile < 1.0) {
            return Err(AltError::Invalid(format!(
                "quantile {quantile} must lie strictly inside (0, 1)"
            )));
        }
        Ok(ExtractionMethod::PerRow { quantile, aggregator })
    }
}

impl fmt::Display for ExtractionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtractionMethod::MeanAll => f.write_str("mean_all"),
            ExtractionMethod::PerRow { quantile, aggregator } => {
                write!(f, "{}@{}", aggregator.name(), format_f64(*quantile))
            }
        }
    }
}

impl FromStr for ExtractionMethod {
    type Err = AltError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "mean_all" {
            return Ok(ExtractionMethod::MeanAll);
        }
        let unknown = || {
            AltError::Invalid(format!(
                "unknown extraction method {s:?} (expected mean_all or \
                 mean|2nd_moment|3rd_moment|4th_moment followed by @p)"
            ))
        };
        let (name, p) = s.split_once('@').ok_or_else(unknown)?;
        let aggregator = Aggregator::from_name(name).ok_or_else(unknown)?;
        let quantile: f64 = p
            .parse()
            .map_err(|_| AltError::Invalid(format!("bad quantile {p:?} in {s:?}")))?;
        ExtractionMethod::per_row(aggregator, quantile)
    }
}

/// Parse a comma-separated method list.
pub fn parse_methods(s: &str) -> Result<Vec<ExtractionMethod>, AltError> {
    let methods = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<_>, _>>()?;
    if methods.is_empty() {
        return Err(AltError::Invalid("no extraction methods given".into()));
    }
    Ok(methods)
}
