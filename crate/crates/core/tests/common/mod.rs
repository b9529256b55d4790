#![allow(dead_code)]

pub mod closed_form;
pub mod oracle;

use alt_core::dataset::{Instance, TimeSeriesDataset};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random two-or-more-class dataset; every class gets at least one instance.
pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize, m: usize, h: usize, c: usize) -> TimeSeriesDataset {
    assert!(n >= c);
    let instances = (0..n)
        .map(|_| {
            let chans = (0..m)
                .map(|_| (0..h).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            Instance::new(chans).unwrap()
        })
        .collect();
    let mut labels: Vec<usize> = (0..n)
        .map(|i| if i < c { i + 1 } else { rng.gen_range(1..=c) })
        .collect();
    // Mix the guaranteed ones in so class order is not just positional.
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        labels.swap(i, j);
    }
    let names = (1..=c).map(|y| y.to_string()).collect();
    TimeSeriesDataset::new(instances, labels, names).unwrap()
}

pub fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    let scale = 1f64.max(a.abs()).max(b.abs());
    assert!((a - b).abs() <= tol * scale, "{what}: {a} vs {b}");
}

/// First instance of every class, ascending.
pub fn one_per_class(ds: &TimeSeriesDataset) -> Vec<usize> {
    let mut out: Vec<usize> = (1..=ds.num_classes())
        .map(|y| ds.labels().iter().position(|&l| l == y).unwrap())
        .collect();
    out.sort_unstable();
    out
}
