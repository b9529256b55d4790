//! Small classifiers for the transformed features: k-nearest neighbours and
//! two-class Fisher discriminant, plus accuracy bookkeeping.

use crate::error::{AltError, Result};
use crate::transform::FeatureTable;

/// Feature rows with labels in `1..=num_classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledFeatures {
    rows: Vec<Vec<f64>>,
    labels: Vec<usize>,
    num_classes: usize,
}

impl LabeledFeatures {
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(AltError::Invalid(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(AltError::Invalid("feature rows differ in length".into()));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(AltError::Invalid("non-finite feature value".into()));
        }
        if labels.iter().any(|&y| y == 0 || y > num_classes) {
            return Err(AltError::Invalid(format!("labels must lie in 1..={num_classes}")));
        }
        Ok(LabeledFeatures {
            rows,
            labels,
            num_classes,
        })
    }

    /// Rows of a feature table, labels taken from its class column and
    /// mapped through `label_names` (label `y` is `label_names[y - 1]`).
    pub fn from_table(table: &FeatureTable, label_names: &[String]) -> Result<Self> {
        let classes = table
            .classes()
            .ok_or_else(|| AltError::Features("table has no class column".into()))?;
        let labels = classes
            .iter()
            .map(|c| {
                label_names
                    .iter()
                    .position(|n| n == c)
                    .map(|p| p + 1)
                    .ok_or_else(|| AltError::Features(format!("unknown class {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(table.rows().to_vec(), labels, label_names.len())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Majority label among the `k` nearest training rows (Euclidean).
///
/// Equal distances go to the lower training row. A tied vote goes to the
/// tied class owning the nearest neighbour, then to the smaller label.
pub fn knn_predict(train: &LabeledFeatures, query: &[f64], k: usize) -> Result<usize> {
    if train.is_empty() {
        return Err(AltError::Invalid("empty training set".into()));
    }
    if k == 0 || k > train.len() {
        return Err(AltError::Invalid(format!("k = {k} must lie in 1..={}", train.len())));
    }
    if query.len() != train.dim() {
        return Err(AltError::Invalid(format!(
            "query has {} features, training rows have {}",
            query.len(),
            train.dim()
        )));
    }
    let mut order: Vec<(f64, usize)> = train
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| (sq_dist(r, query), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let neighbours = &order[..k];

    let mut votes = vec![0usize; train.num_classes + 1];
    for &(_, i) in neighbours {
        votes[train.labels[i]] += 1;
    }
    let top = *votes.iter().max().unwrap();
    // Neighbours are sorted by distance, so the first one from a tied class
    // identifies the class with the nearest member.
    let winner = neighbours
        .iter()
        .map(|&(_, i)| train.labels[i])
        .find(|&y| votes[y] == top)
        .unwrap();
    Ok(winner)
}

/// Two-class Fisher linear discriminant: predict class 2 when `w.x > b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lda {
    pub weights: Vec<f64>,
    pub threshold: f64,
}

impl Lda {
    pub fn fit(train: &LabeledFeatures) -> Result<Lda> {
        if train.num_classes != 2 {
            return Err(AltError::Invalid(format!(
                "linear discriminant needs exactly 2 classes, got {}",
                train.num_classes
            )));
        }
        let d = train.dim();
        let mut means = [vec![0.0; d], vec![0.0; d]];
        let mut counts = [0usize; 2];
        for (r, &y) in train.rows.iter().zip(&train.labels) {
            counts[y - 1] += 1;
            for (m, v) in means[y - 1].iter_mut().zip(r) {
                *m += v;
            }
        }
        if let Some(q) = counts.iter().position(|&n| n == 0) {
            return Err(AltError::Invalid(format!(
                "class {} is absent from the training data",
                q + 1
            )));
        }
        for (m, &n) in means.iter_mut().zip(&counts) {
            m.iter_mut().for_each(|v| *v /= n as f64);
        }

        let mut cov = vec![0.0; d * d];
        for (r, &y) in train.rows.iter().zip(&train.labels) {
            let mu = &means[y - 1];
            for a in 0..d {
                for b in 0..d {
                    cov[a * d + b] += (r[a] - mu[a]) * (r[b] - mu[b]);
                }
            }
        }
        let n = train.len();
        let dof = if n > 2 { n - 2 } else { n } as f64;
        cov.iter_mut().for_each(|v| *v /= dof);

        let trace: f64 = (0..d).map(|a| cov[a * d + a]).sum();
        let ridge = if trace > 0.0 { 1e-9 * trace / d as f64 } else { 1.0 };
        for a in 0..d {
            cov[a * d + a] += ridge;
        }
        let diff: Vec<f64> = (0..d).map(|a| means[1][a] - means[0][a]).collect();
        let weights = solve(cov, diff, d)?;
        let threshold = weights
            .iter()
            .zip(means[0].iter().zip(&means[1]))
            .map(|(w, (m1, m2))| w * (m1 + m2) / 2.0)
            .sum();
        Ok(Lda { weights, threshold })
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum()
    }

    /// 1 or 2; a score exactly on the threshold goes to class 1.
    pub fn predict(&self, x: &[f64]) -> usize {
        if self.score(x) > self.threshold {
            2
        } else {
            1
        }
    }
}

/// Gaussian elimination with partial pivoting on a dense `d x d` system.
fn solve(mut a: Vec<f64>, mut b: Vec<f64>, d: usize) -> Result<Vec<f64>> {
    for col in 0..d {
        let piv = (col..d)
            .max_by(|&i, &j| a[i * d + col].abs().total_cmp(&a[j * d + col].abs()))
            .unwrap();
        if a[piv * d + col] == 0.0 {
            return Err(AltError::Invalid("singular covariance matrix".into()));
        }
        if piv != col {
            for c in 0..d {
                a.swap(piv * d + c, col * d + c);
            }
            b.swap(piv, col);
        }
        for r in col + 1..d {
            let f = a[r * d + col] / a[col * d + col];
            for c in col..d {
                a[r * d + c] -= f * a[col * d + c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; d];
    for r in (0..d).rev() {
        let s: f64 = (r + 1..d).map(|c| a[r * d + c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r * d + r];
    }
    Ok(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub accuracy: f64,
    pub correct: usize,
    pub total: usize,
    /// `confusion[truth - 1][predicted - 1]`.
    pub confusion: Vec<Vec<usize>>,
}

pub fn evaluate(predictions: &[usize], truth: &[usize], num_classes: usize) -> Result<Evaluation> {
    if predictions.len() != truth.len() {
        return Err(AltError::Invalid(format!(
            "{} predictions for {} labels",
            predictions.len(),
            truth.len()
        )));
    }
    let mut confusion = vec![vec![0; num_classes]; num_classes];
    for (&p, &t) in predictions.iter().zip(truth) {
        if p == 0 || t == 0 || p > num_classes || t > num_classes {
            return Err(AltError::Invalid(format!("label outside 1..={num_classes}")));
        }
        confusion[t - 1][p - 1] += 1;
    }
    let correct = predictions.iter().zip(truth).filter(|(p, t)| p == t).count();
    let total = truth.len();
    Ok(Evaluation {
        accuracy: if total == 0 { 0.0 } else { correct as f64 / total as f64 },
        correct,
        total,
        confusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lf(rows: &[&[f64]], labels: &[usize], c: usize) -> LabeledFeatures {
        LabeledFeatures::new(rows.iter().map(|r| r.to_vec()).collect(), labels.to_vec(), c).unwrap()
    }

    #[test]
    fn knn_exact_match_and_ties() {
        let t = lf(&[&[0.0, 0.0], &[1.0, 0.0], &[-1.0, 0.0]], &[1, 2, 1], 2);
        assert_eq!(knn_predict(&t, &[1.0, 0.0], 1).unwrap(), 2);
        // equidistant from rows 0 and 1 -> row 0
        assert_eq!(knn_predict(&t, &[0.5, 0.0], 1).unwrap(), 1);
        let t2 = lf(&[&[1.0], &[-1.0]], &[2, 1], 2);
        assert_eq!(knn_predict(&t2, &[0.0], 1).unwrap(), 2);
        assert!(knn_predict(&t, &[0.0, 0.0], 4).is_err());
        assert!(knn_predict(&t, &[0.0, 0.0], 0).is_err());
    }

    #[test]
    fn knn_majority_vote() {
        let t = lf(&[&[0.0], &[0.1], &[5.0]], &[1, 1, 2], 2);
        assert_eq!(knn_predict(&t, &[4.9], 3).unwrap(), 1);
        // vote tie 1:1 with k=2 -> class of the nearest neighbour
        assert_eq!(knn_predict(&t, &[4.0], 2).unwrap(), 2);
    }

    #[test]
    fn lda_separates_1d_clusters() {
        let t = lf(&[&[0.0], &[0.1], &[1.0], &[1.1]], &[1, 1, 2, 2], 2);
        let lda = Lda::fit(&t).unwrap();
        assert!((lda.threshold / lda.weights[0] - 0.55).abs() < 1e-12);
        for (r, &y) in t.rows().iter().zip(t.labels()) {
            assert_eq!(lda.predict(r), y);
        }
    }

    #[test]
    fn lda_identical_means() {
        let t = lf(&[&[0.0], &[2.0], &[0.0], &[2.0]], &[1, 1, 2, 2], 2);
        let lda = Lda::fit(&t).unwrap();
        assert!(lda.weights[0].abs() < 1e-12);
        assert!(t.rows().iter().all(|r| lda.predict(r) == 1));
    }

    #[test]
    fn lda_needs_both_classes() {
        let t = lf(&[&[0.0], &[1.0]], &[1, 1], 2);
        assert!(Lda::fit(&t).is_err());
    }

    #[test]
    fn evaluate_counts() {
        let e = evaluate(&[1, 2, 2], &[1, 2, 1], 2).unwrap();
        assert_eq!(e.correct, 2);
        assert_eq!(e.confusion, vec![vec![1, 1], vec![0, 1]]);
        assert!(evaluate(&[1], &[1, 2], 2).is_err());
        let truth: Vec<usize> = vec![1; 150];
        let mut pred = truth.clone();
        pred.iter_mut().take(9).for_each(|p| *p = 2);
        assert!((evaluate(&pred, &truth, 2).unwrap().accuracy - 0.94).abs() < 1e-15);
    }
}
