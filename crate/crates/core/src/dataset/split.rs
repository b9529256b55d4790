//! Learn / train / test partitioning.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::TimeSeriesDataset;
use crate::error::{AltError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitSize {
    Count(usize),
    Fraction(f64),
}

impl SplitSize {
    fn resolve(self, total: usize, what: &str) -> Result<usize> {
        match self {
            SplitSize::Count(n) => Ok(n),
            SplitSize::Fraction(f) if (0.0..=1.0).contains(&f) => Ok((f * total as f64).round() as usize),
            SplitSize::Fraction(f) => Err(AltError::Invalid(format!("{what} fraction {f} is outside [0, 1]"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitMode {
    /// Proportional per-class allocation, seeded shuffle within classes.
    Stratified,
    /// Instances in file order.
    TakeFirst,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpec {
    pub learn: SplitSize,
    /// `None`: everything not learned goes to train.
    pub train: Option<SplitSize>,
    /// `None`: the remainder after learn and train.
    pub test: Option<SplitSize>,
    pub seed: u64,
    pub mode: SplitMode,
}

impl SplitSpec {
    pub fn take_first(learn: usize) -> Self {
        SplitSpec {
            learn: SplitSize::Count(learn),
            train: None,
            test: None,
            seed: 0,
            mode: SplitMode::TakeFirst,
        }
    }

    pub fn stratified(learn: SplitSize, train: Option<SplitSize>, seed: u64) -> Self {
        SplitSpec {
            learn,
            train,
            test: None,
            seed,
            mode: SplitMode::Stratified,
        }
    }
}

/// Zero-based instance indices, each list ascending.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Split {
    pub learn: Vec<usize>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub leftover: Vec<usize>,
}

struct Sizes {
    learn: usize,
    train: usize,
    test: usize,
    test_is_remainder: bool,
}

fn resolve_sizes(spec: &SplitSpec, total: usize) -> Result<Sizes> {
    let learn = spec.learn.resolve(total, "learn")?;
    if learn > total {
        return Err(AltError::Invalid(format!(
            "learn size {learn} exceeds {total} instances"
        )));
    }
    let train = match spec.train {
        Some(s) => s.resolve(total, "train")?,
        None => total - learn,
    };
    if learn + train > total {
        return Err(AltError::Invalid(format!(
            "learn + train = {} exceeds {total} instances",
            learn + train
        )));
    }
    let (test, test_is_remainder) = match spec.test {
        Some(s) => (s.resolve(total, "test")?, false),
        None => (total - learn - train, true),
    };
    if learn + train + test > total {
        return Err(AltError::Invalid(format!(
            "learn + train + test = {} exceeds {total} instances",
            learn + train + test
        )));
    }
    Ok(Sizes {
        learn,
        train,
        test,
        test_is_remainder,
    })
}

pub fn stratified_split(ds: &TimeSeriesDataset, spec: &SplitSpec) -> Result<Split> {
    let total = ds.len();
    let sizes = resolve_sizes(spec, total)?;
    let labels = ds.labels();
    let c = ds.num_classes();

    let split = match spec.mode {
        SplitMode::TakeFirst => {
            let a = sizes.learn;
            let b = a + sizes.train;
            let e = b + sizes.test;
            Split {
                learn: (0..a).collect(),
                train: (a..b).collect(),
                test: (b..e).collect(),
                leftover: (e..total).collect(),
            }
        }
        SplitMode::Stratified => {
            let counts = ds.class_counts();
            let share =
                |n: usize| -> Vec<f64> { counts.iter().map(|&tq| n as f64 * tq as f64 / total as f64).collect() };
            let learn_q = apportion(sizes.learn, &share(sizes.learn), &vec![0; c], &counts);
            let avail: Vec<usize> = counts.iter().zip(&learn_q).map(|(t, l)| t - l).collect();

            let train_target = share(sizes.train);
            let train_q = if sizes.test_is_remainder {
                // Keep both train and the implied test list within one of
                // their proportional targets when that is possible.
                let test_target = share(sizes.test);
                let mut lo = Vec::with_capacity(c);
                let mut hi = Vec::with_capacity(c);
                for q in 0..c {
                    let a = avail[q] as f64;
                    let l = train_target[q].floor().max(a - test_target[q].ceil()).max(0.0);
                    let h = train_target[q].ceil().min(a - test_target[q].floor()).min(a);
                    if l <= h {
                        lo.push(l as usize);
                        hi.push(h as usize);
                    } else {
                        lo.push(0);
                        hi.push(avail[q]);
                    }
                }
                if lo.iter().sum::<usize>() <= sizes.train && hi.iter().sum::<usize>() >= sizes.train {
                    apportion(sizes.train, &train_target, &lo, &hi)
                } else {
                    apportion(sizes.train, &train_target, &vec![0; c], &avail)
                }
            } else {
                apportion(sizes.train, &train_target, &vec![0; c], &avail)
            };
            let after_train: Vec<usize> = avail.iter().zip(&train_q).map(|(a, t)| a - t).collect();
            let test_q = if sizes.test_is_remainder {
                after_train.clone()
            } else {
                apportion(sizes.test, &share(sizes.test), &vec![0; c], &after_train)
            };

            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let mut out = Split::default();
            for q in 0..c {
                let mut members: Vec<usize> = (0..total).filter(|&i| labels[i] == q + 1).collect();
                members.shuffle(&mut rng);
                let (l, rest) = members.split_at(learn_q[q]);
                let (t, rest) = rest.split_at(train_q[q]);
                let (e, rest) = rest.split_at(test_q[q]);
                out.learn.extend_from_slice(l);
                out.train.extend_from_slice(t);
                out.test.extend_from_slice(e);
                out.leftover.extend_from_slice(rest);
            }
            out.learn.sort_unstable();
            out.train.sort_unstable();
            out.test.sort_unstable();
            out.leftover.sort_unstable();
            out
        }
    };

    let mut seen = vec![false; c];
    for &i in &split.learn {
        seen[labels[i] - 1] = true;
    }
    if let Some(q) = seen.iter().position(|s| !s) {
        return Err(AltError::Invalid(format!(
            "class {:?} would receive no learn instances",
            ds.label_name(q + 1)
        )));
    }
    Ok(split)
}

/// Largest-remainder rounding of `targets` to integers summing to `total`,
/// each count kept within `lo[q]..=hi[q]`. Remaining units go to classes by
/// descending fractional part, ties to the lower class index.
pub(crate) fn apportion(total: usize, targets: &[f64], lo: &[usize], hi: &[usize]) -> Vec<usize> {
    let n = targets.len();
    let mut counts: Vec<usize> = (0..n)
        .map(|q| (targets[q].floor().max(0.0) as usize).clamp(lo[q], hi[q]))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    let frac = |q: usize| targets[q] - targets[q].floor();
    order.sort_by(|&a, &b| frac(b).total_cmp(&frac(a)).then(a.cmp(&b)));

    let mut assigned: usize = counts.iter().sum();
    // Over-allocation can only come from lower bounds; trim the classes
    // that sit furthest above their targets.
    for &q in order.iter().rev() {
        while assigned > total && counts[q] > lo[q] {
            counts[q] -= 1;
            assigned -= 1;
        }
    }
    for strict in [true, false] {
        loop {
            let mut progressed = false;
            for &q in &order {
                if assigned == total {
                    return counts;
                }
                let room = counts[q] < hi[q] && (!strict || (counts[q] as f64) < targets[q].ceil());
                if room {
                    counts[q] += 1;
                    assigned += 1;
                    progressed = true;
                    if strict {
                        continue;
                    }
                }
            }
            if strict || !progressed {
                break;
            }
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Instance;

    fn ds_with_labels(labels: &[usize]) -> TimeSeriesDataset {
        let c = *labels.iter().max().unwrap();
        let inst = labels
            .iter()
            .enumerate()
            .map(|(i, _)| Instance::univariate(vec![i as f64; 3]).unwrap())
            .collect();
        TimeSeriesDataset::new(inst, labels.to_vec(), (1..=c).map(|q| q.to_string()).collect()).unwrap()
    }

    #[test]
    fn two_per_class_learn_gets_one_each() {
        let ds = ds_with_labels(&[1, 1, 2, 2]);
        for seed in 0..20 {
            let spec = SplitSpec::stratified(SplitSize::Count(2), None, seed);
            let s = stratified_split(&ds, &spec).unwrap();
            let mut got: Vec<usize> = s.learn.iter().map(|&i| ds.labels()[i]).collect();
            got.sort();
            assert_eq!(got, vec![1, 2]);
        }
    }

    #[test]
    fn take_first_is_file_order() {
        let ds = ds_with_labels(&[1, 2, 1, 2, 1, 2]);
        let s = stratified_split(&ds, &SplitSpec::take_first(4)).unwrap();
        assert_eq!(s.learn, vec![0, 1, 2, 3]);
        assert_eq!(s.train, vec![4, 5]);
        assert!(s.test.is_empty());
    }

    #[test]
    fn zero_learn_for_a_class_is_an_error() {
        let ds = ds_with_labels(&[1, 1, 1, 1, 1, 1, 1, 1, 1, 2]);
        let err = stratified_split(&ds, &SplitSpec::stratified(SplitSize::Count(2), None, 1)).unwrap_err();
        assert!(err.to_string().contains("no learn"));
        let err = stratified_split(&ds, &SplitSpec::take_first(3)).unwrap_err();
        assert!(err.to_string().contains("no learn"));
    }

    #[test]
    fn seed_determinism() {
        let ds = ds_with_labels(&[1, 2, 3, 1, 2, 3, 1, 2, 3, 1, 2, 3]);
        let spec = SplitSpec::stratified(SplitSize::Count(3), Some(SplitSize::Count(5)), 42);
        assert_eq!(
            stratified_split(&ds, &spec).unwrap(),
            stratified_split(&ds, &spec).unwrap()
        );
    }

    #[test]
    fn apportion_largest_remainder() {
        // 7 * (1/3, 1/3, 1/3) = 2.33 each -> 3,2,2 (tie to lowest index)
        let t = [7.0 / 3.0; 3];
        assert_eq!(apportion(7, &t, &[0; 3], &[10; 3]), vec![3, 2, 2]);
        // capped class passes its unit on
        assert_eq!(apportion(7, &t, &[0; 3], &[2, 10, 10]), vec![2, 3, 2]);
    }
}
