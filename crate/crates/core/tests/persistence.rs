mod common;

use alt_core::lawcore::WindowConfig;
use alt_core::model::{load_model, read_model, save_model, train_bank, write_model};
use alt_core::transform::{read_features, write_features, FeatureTable, WriteMode};
use alt_core::ErrorKind;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        -1e3f64..1e3,
        Just(0.0),
        Just(-0.0),
        Just(1e-300),
        Just(f64::MAX),
    ]
}

fn table(names: &[&str], rows: Vec<Vec<f64>>, classes: Option<Vec<&str>>) -> FeatureTable {
    FeatureTable::new(
        names.iter().map(|s| s.to_string()).collect(),
        rows,
        classes.map(|c| c.into_iter().map(String::from).collect()),
    )
    .unwrap()
}

fn bits(t: &FeatureTable) -> Vec<Vec<u64>> {
    t.rows()
        .iter()
        .map(|r| r.iter().map(|v| v.to_bits()).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn feature_csv_round_trip_is_bit_exact(
        rows in prop::collection::vec(prop::collection::vec(finite(), 3), 0..12),
        with_class in any::<bool>(),
    ) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        let classes: Vec<String> = (0..rows.len()).map(|i| format!("k,{}", i % 3)).collect();
        let t = FeatureTable::new(
            vec!["a".into(), "b".into(), "c".into()],
            rows,
            with_class.then_some(classes),
        ).unwrap();
        write_features(&t, &path, WriteMode::NewFile, with_class).unwrap();
        let back = read_features(&path).unwrap();
        prop_assert_eq!(back.names(), t.names());
        prop_assert_eq!(bits(&back), bits(&t));
        prop_assert_eq!(back.classes(), t.classes());
    }

    #[test]
    fn append_instance_concatenates_rows(
        a in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 2), 1..8),
        b in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 2), 0..8),
    ) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        let ta = table(&["x", "y"], a.clone(), Some(vec!["1"; a.len()]));
        let tb = table(&["x", "y"], b.clone(), Some(vec!["2"; b.len()]));
        write_features(&ta, &path, WriteMode::NewFile, true).unwrap();
        write_features(&tb, &path, WriteMode::AppendInstance, true).unwrap();
        let back = read_features(&path).unwrap();
        let mut want = a.clone();
        want.extend(b.clone());
        prop_assert_eq!(back.rows(), &want[..]);
        let classes: Vec<&str> = back.classes().unwrap().iter().map(String::as_str).collect();
        prop_assert_eq!(classes.iter().filter(|c| **c == "1").count(), a.len());
        prop_assert_eq!(classes.len(), a.len() + b.len());

        // Header mismatch leaves the file untouched.
        let before = std::fs::read(&path).unwrap();
        let tc = table(&["x", "z"], b, Some(vec!["2"; tb.num_rows()]));
        prop_assert!(write_features(&tc, &path, WriteMode::AppendInstance, true).is_err());
        prop_assert_eq!(std::fs::read(&path).unwrap(), before);
    }

    #[test]
    fn append_feature_adds_columns_before_class(
        rows in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 1..10),
    ) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        let labels: Vec<&str> = (0..rows.len()).map(|i| if i % 2 == 0 { "p" } else { "q" }).collect();
        let ta = table(&["x"], rows.iter().map(|r| vec![r.0]).collect(), Some(labels.clone()));
        let tb = table(&["y"], rows.iter().map(|r| vec![r.1]).collect(), Some(labels.clone()));
        write_features(&ta, &path, WriteMode::NewFile, true).unwrap();
        write_features(&tb, &path, WriteMode::AppendFeature, true).unwrap();
        let back = read_features(&path).unwrap();
        prop_assert_eq!(back.names(), &["x".to_string(), "y".to_string()][..]);
        for (got, want) in back.rows().iter().zip(&rows) {
            prop_assert_eq!(got, &vec![want.0, want.1]);
        }
        prop_assert_eq!(back.classes().unwrap().len(), rows.len());

        let before = std::fs::read(&path).unwrap();
        // Same column again, a row-count mismatch, and disagreeing labels all fail.
        prop_assert!(write_features(&tb, &path, WriteMode::AppendFeature, true).is_err());
        let short = table(&["z"], vec![vec![0.0]; rows.len() + 1], Some(vec!["p"; rows.len() + 1]));
        prop_assert!(write_features(&short, &path, WriteMode::AppendFeature, true).is_err());
        let relabeled = table(&["z"], vec![vec![0.0]; rows.len()], Some(vec!["r"; rows.len()]));
        prop_assert!(write_features(&relabeled, &path, WriteMode::AppendFeature, true).is_err());
        prop_assert_eq!(std::fs::read(&path).unwrap(), before);
    }

    #[test]
    fn model_round_trip_is_bit_exact(seed in any::<u64>(), m in 1usize..3, h in 10usize..20) {
        let mut rng = common::rng(seed);
        let ds = common::random_dataset(&mut rng, 5, m, h, 2);
        let configs = [WindowConfig::new(5, 2, 1).unwrap(), WindowConfig::new(9, 3, 2).unwrap()];
        let bank = train_bank(&ds, &[0, 1, 2, 3, 4], &configs).unwrap();
        let text = write_model(&bank);
        let back = read_model(&text).unwrap();
        prop_assert_eq!(&back, &bank);
        prop_assert_eq!(write_model(&back), text);
    }
}

#[test]
fn append_modes_reject_a_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    let t = table(&["x"], vec![vec![1.0]], Some(vec!["a"]));
    for mode in [WriteMode::AppendFeature, WriteMode::AppendInstance] {
        let err = write_features(&t, dir.path().join("missing.csv"), mode, true).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::Validation, "{err}");
    }
}

#[test]
fn model_file_corruption_is_caught() {
    let mut rng = common::rng(5);
    let ds = common::random_dataset(&mut rng, 4, 1, 12, 2);
    let bank = train_bank(&ds, &[0, 1, 2, 3], &[WindowConfig::new(5, 3, 1).unwrap()]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.alt");
    save_model(&bank, &path).unwrap();
    assert_eq!(load_model(&path).unwrap(), bank);

    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    // Flip one digit in the first matrix row.
    let row = lines[2];
    let pos = row.find(|c: char| c.is_ascii_digit() && c != '0').unwrap();
    let flipped = format!(
        "{}{}{}",
        &row[..pos],
        if &row[pos..=pos] == "1" { "2" } else { "1" },
        &row[pos + 1..]
    );
    let tampered = text.replacen(row, &flipped, 1);
    assert!(read_model(&tampered).unwrap_err().to_string().contains("checksum"));

    let truncated: String = lines[..lines.len() - 2].join("\n");
    assert!(read_model(&truncated).is_err());

    let future = text.replacen("\"version\":1", "\"version\":2", 1);
    assert!(read_model(&future).unwrap_err().to_string().contains("version"));

    assert_eq!(
        save_model(&bank, dir.path().join("no/such/dir/m.alt"))
            .unwrap_err()
            .kind(),
        ErrorKind::Io
    );
}
