mod args;
mod commands;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use alt_core::{AltError, ErrorKind};
use clap::{Parser, Subcommand};

use args::SplitArgs;

const VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    " (model format alt-model v1, feature csv v1, split csv v1)"
);

#[derive(Parser)]
#[command(name = "alt", version = VERSION, about = "Adaptive law-based time series transformation")]
#[command(args_override_self = true)]
struct Cli {
    /// Worker threads (results are identical for any value).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Plain-text `key = value` file supplying flags; command-line flags win.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct InputArgs {
    /// Comma-separated data files, concatenated in order.
    #[arg(long)]
    pub input: String,
    /// auto (by extension), ts, csv-rows or csv-long.
    #[arg(long, default_value = "auto")]
    pub format: String,
    /// CSV inputs carry no label column.
    #[arg(long)]
    pub no_labels: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Partition instances into learn / train / test lists.
    Split {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        split: SplitArgs,
        /// Output CSV (instance,label,subset).
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the shapelet bank from the learn instances.
    Train {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        split: SplitArgs,
        /// Split file from `alt split`; its learn rows are used.
        #[arg(long)]
        split_file: Option<PathBuf>,
        /// Window lengths.
        #[arg(long)]
        r: String,
        /// Embedding dimensions.
        #[arg(long, default_value = "5")]
        l: String,
        /// Window shifts.
        #[arg(long, default_value = "1")]
        k: String,
        /// 1-based channels to use (default: all).
        #[arg(long)]
        channels: Option<String>,
        #[arg(long)]
        model: PathBuf,
    },
    /// Transform instances into a feature CSV.
    Transform {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long)]
        split_file: Option<PathBuf>,
        /// Which split lists to transform: learn, train, test, leftover or all.
        /// Defaults to train,test when a split is given, otherwise all.
        #[arg(long)]
        subsets: Option<String>,
        #[arg(long)]
        model: PathBuf,
        /// Comma-separated extraction methods, e.g. mean_all,mean@0.05.
        #[arg(long, default_value = "mean_all")]
        methods: String,
        #[arg(long)]
        out: PathBuf,
        /// new, append-feature or append-instance.
        #[arg(long, default_value = "new")]
        mode: String,
        /// Append the class label column.
        #[arg(long)]
        with_class: bool,
    },
    /// Fit a classifier on some feature rows and score it on others.
    Eval {
        /// Feature CSV with a class column.
        #[arg(long)]
        input: PathBuf,
        /// knn or lda.
        #[arg(long, default_value = "knn")]
        classifier: String,
        /// Neighbours for knn.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Comma-separated feature columns (default: all).
        #[arg(long)]
        features: Option<String>,
        /// 1-based rows, e.g. 1..40 (default: all).
        #[arg(long)]
        train_rows: Option<String>,
        /// 1-based rows (default: same as train rows).
        #[arg(long)]
        test_rows: Option<String>,
        /// Write a JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Two-feature plot data (CSV) and an optional SVG scatter.
    Scatter {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        /// 1-based rows marked as test (the rest are train).
        #[arg(long)]
        test_rows: Option<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Accuracy for each (r, l, k) configuration, one row per config and method.
    Sweep {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long)]
        r: String,
        #[arg(long, default_value = "5")]
        l: String,
        #[arg(long, default_value = "1")]
        k: String,
        #[arg(long)]
        channels: Option<String>,
        #[arg(long, default_value = "mean_all,mean@0.05")]
        methods: String,
        /// Rows of the transformed (non-learn) table used for fitting.
        #[arg(long)]
        train_rows: String,
        #[arg(long)]
        test_rows: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code(e: &AltError) -> u8 {
    match e.kind() {
        ErrorKind::Validation => 2,
        ErrorKind::Io => 3,
        ErrorKind::Numerical => 4,
    }
}

fn run(cli: Cli) -> Result<(), AltError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(AltError::Invalid("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| AltError::Invalid(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Split { input, split, out } => commands::split(&input, &split, &out),
        Command::Train {
            input,
            split,
            split_file,
            r,
            l,
            k,
            channels,
            model,
        } => commands::train(
            &input,
            &split,
            split_file.as_deref(),
            (&r, &l, &k),
            channels.as_deref(),
            &model,
        ),
        Command::Transform {
            input,
            split,
            split_file,
            subsets,
            model,
            methods,
            out,
            mode,
            with_class,
        } => commands::transform(commands::TransformArgs {
            input: &input,
            split: &split,
            split_file: split_file.as_deref(),
            subsets: subsets.as_deref(),
            model: &model,
            methods: &methods,
            out: &out,
            mode: &mode,
            with_class,
        }),
        Command::Eval {
            input,
            classifier,
            k,
            features,
            train_rows,
            test_rows,
            report,
        } => commands::eval(commands::EvalArgs {
            input: &input,
            classifier: &classifier,
            k,
            features: features.as_deref(),
            train_rows: train_rows.as_deref(),
            test_rows: test_rows.as_deref(),
            report: report.as_deref(),
        }),
        Command::Scatter {
            input,
            x,
            y,
            test_rows,
            out,
            svg,
        } => commands::scatter(&input, &x, &y, test_rows.as_deref(), &out, svg.as_deref()),
        Command::Sweep {
            input,
            split,
            r,
            l,
            k,
            channels,
            methods,
            train_rows,
            test_rows,
            out,
        } => commands::sweep(commands::SweepArgs {
            input: &input,
            split: &split,
            rlk: (&r, &l, &k),
            channels: channels.as_deref(),
            methods: &methods,
            train_rows: &train_rows,
            test_rows: &test_rows,
            out: &out,
        }),
    }
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let argv = match args::expand_manifest(raw) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_kind() {
        assert_eq!(exit_code(&AltError::Config("x".into())), 2);
        assert_eq!(exit_code(&AltError::Model("x".into())), 2);
        let io = AltError::Io {
            path: "f".into(),
            source: std::io::Error::other("gone"),
        };
        assert_eq!(exit_code(&io), 3);
        let nc = AltError::NoConvergence {
            sweeps: 100,
            dim: 2,
            matrix: vec![0.0; 4],
        };
        assert_eq!(exit_code(&nc), 4);
    }
}
