use std::collections::BTreeSet;
use std::path::Path;
use std::time::Instant;

use alt_core::classify::{evaluate, knn_predict, Evaluation, LabeledFeatures, Lda};
use alt_core::dataset::{
    canonical_label_order, load_csv, load_ts, stratified_split, CsvLayout, Split, TimeSeriesDataset,
};
use alt_core::model::{load_model, save_model, train_bank, ShapeletBank};
use alt_core::numfmt::format_f64;
use alt_core::transform::{parse_methods, read_features, transform_set, write_features, FeatureTable, WriteMode};
use alt_core::AltError;

use crate::args::{paths, row_ranges, split_list, usize_list, window_configs, Result, SplitArgs};
use crate::svg;
use crate::InputArgs;

fn invalid(msg: impl Into<String>) -> AltError {
    AltError::Invalid(msg.into())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| AltError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

pub fn load_inputs(input: &InputArgs) -> Result<TimeSeriesDataset> {
    let files = paths(&input.input);
    if files.is_empty() {
        return Err(invalid("--input names no files"));
    }
    let parts = files
        .iter()
        .map(|p| {
            let fmt = match input.format.as_str() {
                "auto" => match p
                    .extension()
                    .and_then(|e| e.to_str())
                    .map(str::to_ascii_lowercase)
                    .as_deref()
                {
                    Some("ts") => "ts",
                    Some("csv") => "csv-rows",
                    _ => {
                        return Err(invalid(format!(
                            "{}: cannot infer format from extension; pass --format",
                            p.display()
                        )))
                    }
                },
                f => f,
            };
            match fmt {
                "ts" => load_ts(p),
                "csv-rows" => load_csv(p, CsvLayout::RowPerInstance, !input.no_labels),
                "csv-long" => load_csv(p, CsvLayout::LongFormat, !input.no_labels),
                f => Err(invalid(format!(
                    "unknown format {f:?} (expected auto, ts, csv-rows or csv-long)"
                ))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    if parts.len() == 1 {
        Ok(parts.into_iter().next().unwrap())
    } else {
        TimeSeriesDataset::concat(&parts)
    }
}

const SUBSETS: [&str; 4] = ["learn", "train", "test", "leftover"];

fn subset_list<'a>(split: &'a Split, name: &str) -> &'a [usize] {
    match name {
        "learn" => &split.learn,
        "train" => &split.train,
        "test" => &split.test,
        _ => &split.leftover,
    }
}

fn split_csv(ds: &TimeSeriesDataset, split: &Split) -> String {
    let mut rows: Vec<(usize, &str)> = Vec::with_capacity(ds.len());
    for name in SUBSETS {
        rows.extend(subset_list(split, name).iter().map(|&i| (i, name)));
    }
    rows.sort_unstable();
    let mut out = String::from("instance,label,subset\n");
    for (i, name) in rows {
        let label = ds.label_name(ds.labels()[i]);
        out.push_str(&format!("{},{},{}\n", i + 1, quote(label), name));
    }
    out
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn read_split(path: &Path, ds: &TimeSeriesDataset) -> Result<Split> {
    let text = std::fs::read_to_string(path).map_err(|e| AltError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let origin = path.display().to_string();
    let parse_err = |line: usize, msg: String| AltError::Parse {
        path: origin.clone(),
        line,
        msg,
    };
    let mut rdr = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header != ["instance", "label", "subset"] {
        return Err(parse_err(1, "expected header instance,label,subset".into()));
    }
    let mut split = Split::default();
    let mut seen = vec![false; ds.len()];
    for (n, rec) in rdr.records().enumerate() {
        let line = n + 2;
        let rec = rec.map_err(|e| parse_err(line, e.to_string()))?;
        let i: usize = rec[0]
            .parse()
            .map_err(|_| parse_err(line, format!("bad instance number {:?}", &rec[0])))?;
        if i == 0 || i > ds.len() {
            return Err(parse_err(line, format!("instance {i} outside 1..={}", ds.len())));
        }
        if std::mem::replace(&mut seen[i - 1], true) {
            return Err(parse_err(line, format!("instance {i} listed twice")));
        }
        if ds.label_name(ds.labels()[i - 1]) != &rec[1] {
            return Err(parse_err(
                line,
                format!(
                    "label {:?} does not match the data ({:?})",
                    &rec[1],
                    ds.label_name(ds.labels()[i - 1])
                ),
            ));
        }
        let list = match &rec[2] {
            "learn" => &mut split.learn,
            "train" => &mut split.train,
            "test" => &mut split.test,
            "leftover" => &mut split.leftover,
            s => return Err(parse_err(line, format!("unknown subset {s:?}"))),
        };
        list.push(i - 1);
    }
    for list in [&mut split.learn, &mut split.train, &mut split.test, &mut split.leftover] {
        list.sort_unstable();
    }
    Ok(split)
}

fn resolve_split(ds: &TimeSeriesDataset, args: &SplitArgs, file: Option<&Path>) -> Result<Option<Split>> {
    match (file, args.is_given()) {
        (Some(_), true) => Err(invalid("give either --split-file or split sizes, not both")),
        (Some(p), false) => read_split(p, ds).map(Some),
        (None, true) => stratified_split(ds, &args.spec()?).map(Some),
        (None, false) => Ok(None),
    }
}

pub fn split(input: &InputArgs, args: &SplitArgs, out: &Path) -> Result<()> {
    let ds = load_inputs(input)?;
    let split = stratified_split(&ds, &args.spec()?)?;
    write_text(out, &split_csv(&ds, &split))?;
    println!(
        "learn {} train {} test {} leftover {}",
        split.learn.len(),
        split.train.len(),
        split.test.len(),
        split.leftover.len()
    );
    Ok(())
}

/// 1-based channel list to the dataset restricted to those channels.
fn pick_channels(ds: &TimeSeriesDataset, channels: Option<&str>) -> Result<(TimeSeriesDataset, Vec<usize>)> {
    let Some(spec) = channels else {
        return Ok((ds.clone(), (1..=ds.num_channels()).collect()));
    };
    let ids = usize_list(spec, "--channels")?;
    if ids.is_empty() {
        return Err(invalid("--channels lists no channels"));
    }
    if let Some(&bad) = ids.iter().find(|&&c| c == 0 || c > ds.num_channels()) {
        return Err(invalid(format!("channel {bad} outside 1..={}", ds.num_channels())));
    }
    let zero: Vec<usize> = ids.iter().map(|c| c - 1).collect();
    Ok((ds.select_channels(&zero)?, ids))
}

fn fit_bank(
    ds: &TimeSeriesDataset,
    learn: &[usize],
    rlk: (&str, &str, &str),
    channels: Option<&str>,
) -> Result<ShapeletBank> {
    let configs = window_configs(rlk.0, rlk.1, rlk.2)?;
    let (sub, ids) = pick_channels(ds, channels)?;
    train_bank(&sub, learn, &configs)?.with_channel_ids(ids)
}

pub fn train(
    input: &InputArgs,
    args: &SplitArgs,
    split_file: Option<&Path>,
    rlk: (&str, &str, &str),
    channels: Option<&str>,
    model: &Path,
) -> Result<()> {
    let ds = load_inputs(input)?;
    let split = resolve_split(&ds, args, split_file)?
        .ok_or_else(|| invalid("a learn set is required (--learn-count, --learn-fraction or --split-file)"))?;
    let bank = fit_bank(&ds, &split.learn, rlk, channels)?;
    save_model(&bank, model)?;
    println!(
        "{} configs x {} channels x {} classes, {} shapelets from {} learn instances",
        bank.num_configs(),
        bank.num_channels(),
        bank.num_classes(),
        bank.total_columns(),
        split.learn.len()
    );
    Ok(())
}

pub struct TransformArgs<'a> {
    pub input: &'a InputArgs,
    pub split: &'a SplitArgs,
    pub split_file: Option<&'a Path>,
    pub subsets: Option<&'a str>,
    pub model: &'a Path,
    pub methods: &'a str,
    pub out: &'a Path,
    pub mode: &'a str,
    pub with_class: bool,
}

fn selected_rows(ds: &TimeSeriesDataset, split: Option<&Split>, subsets: Option<&str>) -> Result<Vec<usize>> {
    let names = match subsets {
        Some(s) => split_list(s),
        None if split.is_some() => vec!["train".into(), "test".into()],
        None => vec!["all".into()],
    };
    if names.is_empty() {
        return Err(invalid("--subsets lists nothing"));
    }
    let mut rows = BTreeSet::new();
    for name in &names {
        if name == "all" {
            rows.extend(0..ds.len());
            continue;
        }
        if !SUBSETS.contains(&name.as_str()) {
            return Err(invalid(format!(
                "unknown subset {name:?} (expected learn, train, test, leftover or all)"
            )));
        }
        let split = split.ok_or_else(|| invalid(format!("subset {name:?} needs a split")))?;
        rows.extend(subset_list(split, name).iter().copied());
    }
    Ok(rows.into_iter().collect())
}

pub fn transform(a: TransformArgs) -> Result<()> {
    let mode: WriteMode = a.mode.parse()?;
    let methods = parse_methods(a.methods)?;
    let bank = load_model(a.model)?;
    let ds = load_inputs(a.input)?;
    let split = resolve_split(&ds, a.split, a.split_file)?;
    let rows = selected_rows(&ds, split.as_ref(), a.subsets)?;
    let ids = bank.channel_ids();
    if let Some(&bad) = ids.iter().find(|&&c| c == 0 || c > ds.num_channels()) {
        return Err(invalid(format!(
            "model uses channel {bad} but the data has {} channels",
            ds.num_channels()
        )));
    }
    let zero: Vec<usize> = ids.iter().map(|c| c - 1).collect();
    let sub = ds.subset(&rows).select_channels(&zero)?;
    let table = transform_set(&sub, &bank, &methods, true)?;
    write_features(&table, a.out, mode, a.with_class)?;
    println!("{} instances x {} features", table.num_rows(), table.num_features());
    Ok(())
}

pub struct EvalArgs<'a> {
    pub input: &'a Path,
    pub classifier: &'a str,
    pub k: usize,
    pub features: Option<&'a str>,
    pub train_rows: Option<&'a str>,
    pub test_rows: Option<&'a str>,
    pub report: Option<&'a Path>,
}

fn rows_or_all(spec: Option<&str>, n: usize) -> Result<Vec<usize>> {
    match spec {
        Some(s) => {
            let rows = row_ranges(s)?;
            if let Some(&bad) = rows.iter().find(|&&r| r >= n) {
                return Err(invalid(format!("row {} outside 1..={n}", bad + 1)));
            }
            Ok(rows)
        }
        None => Ok((0..n).collect()),
    }
}

/// Fit on `train`, predict `test`; `lda` needs exactly two classes.
pub fn classify(classifier: &str, k: usize, train: &LabeledFeatures, test: &LabeledFeatures) -> Result<Evaluation> {
    let predictions: Vec<usize> = match classifier {
        "knn" => test
            .rows()
            .iter()
            .map(|x| knn_predict(train, x, k))
            .collect::<Result<_>>()?,
        "lda" => {
            let lda = Lda::fit(train)?;
            test.rows().iter().map(|x| lda.predict(x)).collect()
        }
        c => return Err(invalid(format!("unknown classifier {c:?} (expected knn or lda)"))),
    };
    evaluate(&predictions, test.labels(), train.num_classes())
}

fn labeled(table: &FeatureTable, rows: &[usize], names: &[String]) -> Result<LabeledFeatures> {
    LabeledFeatures::from_table(&table.select_rows(rows)?, names)
}

pub fn eval(a: EvalArgs) -> Result<()> {
    let mut table = read_features(a.input)?;
    let classes = table
        .classes()
        .ok_or_else(|| AltError::Features(format!("{}: no class column", a.input.display())))?;
    let names = canonical_label_order(classes.iter().cloned());
    if let Some(f) = a.features {
        table = table.select(&split_list(f))?;
    }
    let train_rows = rows_or_all(a.train_rows, table.num_rows())?;
    let test_rows = match a.test_rows {
        Some(_) => rows_or_all(a.test_rows, table.num_rows())?,
        None => train_rows.clone(),
    };
    let train = labeled(&table, &train_rows, &names)?;
    let test = labeled(&table, &test_rows, &names)?;
    let ev = classify(a.classifier, a.k, &train, &test)?;
    println!("accuracy {} ({}/{})", format_f64(ev.accuracy), ev.correct, ev.total);
    if let Some(path) = a.report {
        let report = serde_json::json!({
            "classifier": a.classifier,
            "k": a.k,
            "features": table.names(),
            "labels": names,
            "train_rows": train_rows.len(),
            "test_rows": test_rows.len(),
            "accuracy": ev.accuracy,
            "correct": ev.correct,
            "total": ev.total,
            "confusion": ev.confusion,
        });
        let text = serde_json::to_string_pretty(&report).expect("report serializes");
        write_text(path, &(text + "\n"))?;
    }
    Ok(())
}

pub fn scatter(
    input: &Path,
    x: &str,
    y: &str,
    test_rows: Option<&str>,
    out: &Path,
    svg_out: Option<&Path>,
) -> Result<()> {
    let table = read_features(input)?;
    let xs = table.column(x)?;
    let ys = table.column(y)?;
    let classes: Vec<String> = match table.classes() {
        Some(c) => c.to_vec(),
        None => vec![String::new(); table.num_rows()],
    };
    let mut is_test = vec![false; table.num_rows()];
    if let Some(spec) = test_rows {
        for r in rows_or_all(Some(spec), table.num_rows())? {
            is_test[r] = true;
        }
    }
    let points: Vec<svg::Point> = (0..table.num_rows())
        .map(|i| svg::Point {
            x: xs[i],
            y: ys[i],
            class: classes[i].clone(),
            test: is_test[i],
        })
        .collect();
    let mut csv = String::from("x,y,class,split\n");
    for p in &points {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            format_f64(p.x),
            format_f64(p.y),
            quote(&p.class),
            if p.test { "test" } else { "train" }
        ));
    }
    write_text(out, &csv)?;
    if let Some(path) = svg_out {
        write_text(path, &svg::render(&points, x, y))?;
    }
    Ok(())
}

pub struct SweepArgs<'a> {
    pub input: &'a InputArgs,
    pub split: &'a SplitArgs,
    pub rlk: (&'a str, &'a str, &'a str),
    pub channels: Option<&'a str>,
    pub methods: &'a str,
    pub train_rows: &'a str,
    pub test_rows: &'a str,
    pub out: &'a Path,
}

/// One bank per configuration; all non-learn instances are transformed and
/// the class-wise features of each method are classified (LDA for two
/// classes, 1-NN otherwise).
pub fn sweep(a: SweepArgs) -> Result<()> {
    let ds = load_inputs(a.input)?;
    let split = stratified_split(&ds, &a.split.spec()?)?;
    let configs = window_configs(a.rlk.0, a.rlk.1, a.rlk.2)?;
    let methods = parse_methods(a.methods)?;
    let learn: BTreeSet<usize> = split.learn.iter().copied().collect();
    let rest: Vec<usize> = (0..ds.len()).filter(|i| !learn.contains(i)).collect();
    let (chan_ds, ids) = pick_channels(&ds, a.channels)?;
    let train_rows = rows_or_all(Some(a.train_rows), rest.len())?;
    let test_rows = rows_or_all(Some(a.test_rows), rest.len())?;
    let names = ds.label_names().to_vec();
    let classifier = if ds.num_classes() == 2 { "lda" } else { "knn" };

    let mut csv = String::from("r,l,k,method,accuracy,seconds\n");
    for cfg in &configs {
        let started = Instant::now();
        let bank = train_bank(&chan_ds, &split.learn, std::slice::from_ref(cfg))?.with_channel_ids(ids.clone())?;
        let table = transform_set(&chan_ds.subset(&rest), &bank, &methods, true)?;
        let base = started.elapsed().as_secs_f64();
        for m in &methods {
            let suffix = format!(".{m}");
            let cols: Vec<String> = table.names().iter().filter(|n| n.ends_with(&suffix)).cloned().collect();
            let t = Instant::now();
            let sel = table.select(&cols)?;
            let ev = classify(
                classifier,
                1,
                &labeled(&sel, &train_rows, &names)?,
                &labeled(&sel, &test_rows, &names)?,
            )?;
            let secs = base + t.elapsed().as_secs_f64();
            csv.push_str(&format!(
                "{},{},{},{},{},{:.3}\n",
                cfg.r(),
                cfg.l(),
                cfg.k(),
                m,
                format_f64(ev.accuracy),
                secs
            ));
            println!("{cfg} {m}: accuracy {}", format_f64(ev.accuracy));
        }
    }
    write_text(a.out, &csv)
}
