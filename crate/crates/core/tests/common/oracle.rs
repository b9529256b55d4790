//! Straight-line re-derivation of the pipeline for l = 2: explicit index
//! loops, closed-form 2x2 eigenvectors, full sorts for quantiles.

use alt_core::dataset::TimeSeriesDataset;
use alt_core::lawcore::WindowConfig;

/// Methods the oracle implements, in output order.
pub const METHODS: &str = "mean_all,mean@0.05,2nd_moment@0.3,3rd_moment@0.5,4th_moment@0.9";

/// Near-null unit eigenvector of [[a, b], [b, c]], largest component positive.
fn shapelet_2x2(z: &[f64]) -> [f64; 2] {
    let (a, b, c) = (z[0], z[1], z[2]);
    let mid = (a + c) / 2.0;
    let rad = (((a - c) / 2.0).powi(2) + b * b).sqrt();
    let (lo, hi) = (mid - rad, mid + rad);
    let lam = if lo.abs() <= hi.abs() { lo } else { hi };
    // (S - lam I) v = 0 from the better-conditioned row.
    let v = if (a - lam).abs() >= (c - lam).abs() {
        [-b, a - lam]
    } else {
        [c - lam, -b]
    };
    let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
    let mut v = [v[0] / n, v[1] / n];
    let lead = if v[0].abs() >= v[1].abs() { 0 } else { 1 };
    if v[lead] < 0.0 {
        v = [-v[0], -v[1]];
    }
    v
}

fn quantile(row: &[f64], p: f64) -> f64 {
    let mut s = row.to_vec();
    s.sort_by(f64::total_cmp);
    let pos = p * (s.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(s.len() - 1);
    s[lo] + (pos - lo as f64) * (s[hi] - s[lo])
}

fn moments(v: &[f64]) -> (f64, f64, f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let m = |e| v.iter().map(|x| (x - mean).powi(e)).sum::<f64>() / n;
    (mean, m(2), m(3), m(4))
}

pub fn features(ds: &TimeSeriesDataset, learn: &[usize], configs: &[WindowConfig], rest: &[usize]) -> Vec<Vec<f64>> {
    let c = ds.num_classes();
    let m = ds.num_channels();
    // bank[j][g][y-1] = list of 2-vectors
    let mut bank = vec![vec![vec![Vec::<[f64; 2]>::new(); c]; configs.len()]; m];
    for j in 0..m {
        for (g, cfg) in configs.iter().enumerate() {
            let (r, k) = (cfg.r(), cfg.k());
            let s = (r - 1) / 2;
            for &i in learn {
                let x = ds.instance(i).channel(j);
                let h = x.len();
                let count = (h - r + 1) / k;
                for p in 0..count {
                    let t = p * k;
                    let z = [x[t], x[t + s], x[t + 2 * s]];
                    bank[j][g][ds.labels()[i] - 1].push(shapelet_2x2(&z));
                }
            }
        }
    }
    rest.iter()
        .map(|&i| {
            let mut feats = Vec::new();
            for j in 0..m {
                let x = ds.instance(i).channel(j);
                let h = x.len();
                for (g, cfg) in configs.iter().enumerate() {
                    let (r, k) = (cfg.r(), cfg.k());
                    let s = (r - 1) / 2;
                    let o = (h + 1 - 2 * s) / k;
                    for y in 0..c {
                        let cols = &bank[j][g][y];
                        let mut rows = Vec::new();
                        for p in 0..o {
                            let a = [x[p * k], x[p * k + s]];
                            rows.push(
                                cols.iter()
                                    .map(|v| (a[0] * v[0] + a[1] * v[1]).abs())
                                    .collect::<Vec<_>>(),
                            );
                        }
                        let all: Vec<f64> = rows.iter().flatten().copied().collect();
                        feats.push(all.iter().sum::<f64>() / all.len() as f64);
                        let q = |p| rows.iter().map(|row| quantile(row, p)).collect::<Vec<_>>();
                        feats.push(moments(&q(0.05)).0);
                        feats.push(moments(&q(0.3)).1.sqrt());
                        let (_, m2, m3, _) = moments(&q(0.5));
                        feats.push(if m2 <= 1e-24 { 0.0 } else { m3 / m2.powf(1.5) });
                        let (_, m2, _, m4) = moments(&q(0.9));
                        feats.push(if m2 <= 1e-24 { 0.0 } else { m4 / (m2 * m2) });
                    }
                }
            }
            feats
        })
        .collect()
}
