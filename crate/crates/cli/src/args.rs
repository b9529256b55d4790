//! Small parsers shared by the subcommands, and manifest expansion.

use std::path::{Path, PathBuf};

use alt_core::dataset::{SplitMode, SplitSize, SplitSpec};
use alt_core::lawcore::WindowConfig;
use alt_core::AltError;

pub type Result<T> = std::result::Result<T, AltError>;

fn invalid(msg: impl Into<String>) -> AltError {
    AltError::Invalid(msg.into())
}

pub fn split_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn paths(s: &str) -> Vec<PathBuf> {
    split_list(s).into_iter().map(PathBuf::from).collect()
}

pub fn usize_list(s: &str, what: &str) -> Result<Vec<usize>> {
    split_list(s)
        .iter()
        .map(|t| {
            t.parse()
                .map_err(|_| invalid(format!("{what}: {t:?} is not a non-negative integer")))
        })
        .collect()
}

/// R/L/K lists: a single value broadcasts, otherwise lengths must agree.
pub fn window_configs(r: &str, l: &str, k: &str) -> Result<Vec<WindowConfig>> {
    let (r, l, k) = (usize_list(r, "--r")?, usize_list(l, "--l")?, usize_list(k, "--k")?);
    let n = r.len().max(l.len()).max(k.len());
    if n == 0 || r.is_empty() || l.is_empty() || k.is_empty() {
        return Err(AltError::Config("--r, --l and --k need at least one value".into()));
    }
    for (name, v) in [("--r", &r), ("--l", &l), ("--k", &k)] {
        if v.len() != 1 && v.len() != n {
            return Err(AltError::Config(format!(
                "{name} has {} values; lists must have equal length ({n}) or a single value",
                v.len()
            )));
        }
    }
    let at = |v: &[usize], i: usize| if v.len() == 1 { v[0] } else { v[i] };
    (0..n)
        .map(|i| {
            WindowConfig::new(at(&r, i), at(&l, i), at(&k, i))
                .map_err(|e| AltError::Config(format!("config {}: {e}", i + 1)))
        })
        .collect()
}

/// `1..40,45,50..60`: 1-based inclusive ranges, returned zero-based.
pub fn row_ranges(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in split_list(s) {
        let bad = || invalid(format!("bad row range {part:?}"));
        let (a, b) = match part.split_once("..") {
            Some((a, b)) => (
                a.parse::<usize>().map_err(|_| bad())?,
                b.parse::<usize>().map_err(|_| bad())?,
            ),
            None => {
                let v = part.parse::<usize>().map_err(|_| bad())?;
                (v, v)
            }
        };
        if a == 0 || b < a {
            return Err(bad());
        }
        out.extend(a - 1..b);
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct SplitArgs {
    /// Learn-set size (instances used to build shapelets).
    #[arg(long)]
    pub learn_count: Option<usize>,
    /// Learn-set size as a fraction of all instances.
    #[arg(long)]
    pub learn_fraction: Option<f64>,
    #[arg(long)]
    pub train_count: Option<usize>,
    #[arg(long)]
    pub train_fraction: Option<f64>,
    #[arg(long)]
    pub test_count: Option<usize>,
    #[arg(long)]
    pub test_fraction: Option<f64>,
    /// Seed for the stratified shuffle.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Take instances in file order instead of stratified sampling.
    #[arg(long)]
    pub take_first: bool,
}

fn size(count: Option<usize>, frac: Option<f64>, what: &str) -> Result<Option<SplitSize>> {
    match (count, frac) {
        (Some(_), Some(_)) => Err(invalid(format!("give --{what}-count or --{what}-fraction, not both"))),
        (Some(n), None) => Ok(Some(SplitSize::Count(n))),
        (None, Some(f)) => Ok(Some(SplitSize::Fraction(f))),
        (None, None) => Ok(None),
    }
}

impl SplitArgs {
    pub fn is_given(&self) -> bool {
        self.learn_count.is_some() || self.learn_fraction.is_some()
    }

    /// `--learn-count` without `--seed` means file order; otherwise stratified.
    pub fn spec(&self) -> Result<SplitSpec> {
        let learn = size(self.learn_count, self.learn_fraction, "learn")?
            .ok_or_else(|| invalid("a learn size is required (--learn-count or --learn-fraction)"))?;
        let mode = if self.take_first || (self.learn_count.is_some() && self.seed.is_none()) {
            SplitMode::TakeFirst
        } else {
            SplitMode::Stratified
        };
        Ok(SplitSpec {
            learn,
            train: size(self.train_count, self.train_fraction, "train")?,
            test: size(self.test_count, self.test_fraction, "test")?,
            seed: self.seed.unwrap_or(0),
            mode,
        })
    }
}

/// Read `key = value` lines; `#` starts a comment. Returns flags in order.
pub fn manifest_flags(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| AltError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut flags = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .unwrap_or((line, "true"));
        if key.is_empty() {
            return Err(AltError::Parse {
                path: path.display().to_string(),
                line: n + 1,
                msg: "missing key".into(),
            });
        }
        let key = key.trim_start_matches("--").replace('_', "-");
        let value = value.trim_matches('"');
        match value {
            "true" => flags.push(format!("--{key}")),
            "false" => {}
            v => {
                flags.push(format!("--{key}"));
                flags.push(v.to_string());
            }
        }
    }
    Ok(flags)
}

/// Global options that take a value and may precede the subcommand.
const GLOBAL_WITH_VALUE: [&str; 2] = ["--threads", "--manifest"];

/// Splice manifest flags in right after the subcommand name so that flags
/// given on the command line come later and take precedence.
pub fn expand_manifest(args: Vec<String>) -> Result<Vec<String>> {
    let mut manifest = None;
    let mut sub_pos = None;
    let mut i = 1;
    while i < args.len() {
        let a = &args[i];
        if let Some(v) = a.strip_prefix("--manifest=") {
            manifest = Some(PathBuf::from(v));
        } else if a == "--manifest" {
            manifest = args.get(i + 1).map(PathBuf::from);
            i += 1;
        } else if GLOBAL_WITH_VALUE.contains(&a.as_str()) {
            i += 1;
        } else if sub_pos.is_none() && !a.starts_with('-') {
            sub_pos = Some(i);
        }
        i += 1;
    }
    let (Some(path), Some(pos)) = (manifest, sub_pos) else {
        return Ok(args);
    };
    let extra = manifest_flags(&path)?;
    let mut out = args[..=pos].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}
