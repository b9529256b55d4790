use alt_core::classify::{evaluate, knn_predict, LabeledFeatures, Lda};
use proptest::prelude::*;

fn two_class(points: &[(f64, f64, bool)]) -> LabeledFeatures {
    LabeledFeatures::new(
        points.iter().map(|p| vec![p.0, p.1]).collect(),
        points.iter().map(|p| if p.2 { 2 } else { 1 }).collect(),
        2,
    )
    .unwrap()
}

/// Brute force: sort by (distance, row), vote, ties to the nearest voter.
fn knn_oracle(train: &LabeledFeatures, q: &[f64], k: usize) -> usize {
    let mut d: Vec<(f64, usize)> = train
        .rows()
        .iter()
        .enumerate()
        .map(|(i, r)| (r.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), i))
        .collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let near = &d[..k.min(d.len())];
    let mut votes = vec![0usize; train.num_classes() + 1];
    for &(_, i) in near {
        votes[train.labels()[i]] += 1;
    }
    let best = *votes.iter().max().unwrap();
    near.iter()
        .map(|&(_, i)| train.labels()[i])
        .find(|&y| votes[y] == best)
        .unwrap()
}

proptest! {
    #[test]
    fn knn_matches_brute_force(
        pts in prop::collection::vec((-5i32..5, -5i32..5, any::<bool>()), 3..25),
        q in (-5i32..5, -5i32..5),
        k in 1usize..6,
    ) {
        // Integer grid so distance ties really happen.
        let pts: Vec<(f64, f64, bool)> = pts.into_iter().map(|(a, b, c)| (a as f64, b as f64, c)).collect();
        prop_assume!(pts.iter().any(|p| p.2) && pts.iter().any(|p| !p.2) && k <= pts.len());
        let train = two_class(&pts);
        let q = [q.0 as f64, q.1 as f64];
        prop_assert_eq!(knn_predict(&train, &q, k).unwrap(), knn_oracle(&train, &q, k));
    }

    #[test]
    fn lda_predictions_ignore_common_scaling_and_shift(
        pts in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0, any::<bool>()), 6..30),
        alpha in 0.01f64..100.0,
        shift in (-50.0f64..50.0, -50.0f64..50.0),
    ) {
        prop_assume!(pts.iter().filter(|p| p.2).count() >= 2 && pts.iter().filter(|p| !p.2).count() >= 2);
        let moved: Vec<(f64, f64, bool)> =
            pts.iter().map(|p| (alpha * p.0 + shift.0, alpha * p.1 + shift.1, p.2)).collect();
        let a = Lda::fit(&two_class(&pts)).unwrap();
        let b = Lda::fit(&two_class(&moved)).unwrap();
        for (p, m) in pts.iter().zip(&moved) {
            // Points sitting on the boundary may flip through rounding.
            let score = a.score(&[p.0, p.1]);
            if (score - a.threshold).abs() > 1e-6 * (score.abs() + a.threshold.abs()) {
                prop_assert_eq!(a.predict(&[p.0, p.1]), b.predict(&[m.0, m.1]));
            }
        }
    }
}

#[test]
fn lda_separates_obvious_clusters() {
    let pts = [
        (0.0, 0.0, false),
        (0.1, 0.2, false),
        (0.2, 0.1, false),
        (1.0, 1.0, true),
        (1.1, 0.9, true),
        (0.9, 1.2, true),
    ];
    let train = two_class(&pts);
    let lda = Lda::fit(&train).unwrap();
    let pred: Vec<usize> = train.rows().iter().map(|r| lda.predict(r)).collect();
    let ev = evaluate(&pred, train.labels(), 2).unwrap();
    assert_eq!(ev.accuracy, 1.0);
    assert_eq!(ev.confusion, vec![vec![3, 0], vec![0, 3]]);
}
