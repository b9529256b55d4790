//! Window extraction, Hankel embedding and near-null eigenvectors.
//!
//! A window of `r` samples is thinned to `2l - 1` points with stride
//! `s = (r - 1) / (2l - 2)`. Those points form the `l x l` Hankel matrix
//! `S[a][b] = z[a + b]`, and the shapelet is the unit eigenvector of `S`
//! whose eigenvalue is smallest in magnitude: the linear recurrence the
//! window (nearly) obeys.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{AltError, Result};

/// Jacobi sweeps before giving up.
pub const MAX_SWEEPS: usize = 100;
/// Off-diagonal Frobenius norm, relative to the matrix norm, that counts as diagonal.
pub const CONVERGENCE_TOL: f64 = 1e-12;
/// Relative tolerance under which two eigenvalue magnitudes are tied.
pub const EIGEN_TIE_TOL: f64 = 1e-12;
/// Tolerance under which two eigenvector component magnitudes are tied.
pub const SIGN_TIE_TOL: f64 = 1e-12;

/// Window triplet `(r, l, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WindowConfig {
    r: usize,
    l: usize,
    k: usize,
}

impl WindowConfig {
    pub fn new(r: usize, l: usize, k: usize) -> Result<Self> {
        if l < 2 {
            return Err(AltError::Config(format!("l = {l} must be at least 2")));
        }
        if k < 1 {
            return Err(AltError::Config("k must be at least 1".into()));
        }
        if r < 2 * l - 1 {
            return Err(AltError::Config(format!(
                "r = {r} is shorter than 2l-1 = {}",
                2 * l - 1
            )));
        }
        if !(r - 1).is_multiple_of(2 * l - 2) {
            return Err(AltError::Config(format!(
                "(2l-2) = {} does not divide (r-1) = {} for (r, l, k) = ({r}, {l}, {k})",
                2 * l - 2,
                r - 1
            )));
        }
        Ok(WindowConfig { r, l, k })
    }

    /// Window length in samples.
    pub fn r(&self) -> usize {
        self.r
    }

    /// Embedding dimension.
    pub fn l(&self) -> usize {
        self.l
    }

    /// Shift between consecutive windows.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Inner stride `(r - 1) / (2l - 2)`.
    pub fn stride(&self) -> usize {
        (self.r - 1) / (2 * self.l - 2)
    }

    /// Number of windows taken from a series of length `h`: `floor((h - r + 1) / k)`.
    pub fn window_count(&self, h: usize) -> usize {
        if h < self.r {
            0
        } else {
            (h - self.r + 1) / self.k
        }
    }

    /// Rows of the embedding matrix for a series of length `h`:
    /// `floor((h - s*l + 1) / k)`.
    pub fn embedding_rows(&self, h: usize) -> usize {
        let span = self.stride() * self.l;
        if h + 1 < span {
            0
        } else {
            (h + 1 - span) / self.k
        }
    }
}

impl std::fmt::Display for WindowConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(r={}, l={}, k={})", self.r, self.l, self.k)
    }
}

/// Windows of `cfg.r()` samples starting at `0, k, 2k, ...`.
pub fn extract_windows<'a>(series: &'a [f64], cfg: &WindowConfig) -> Result<Vec<&'a [f64]>> {
    let h = series.len();
    if cfg.r() > h {
        return Err(AltError::Config(format!(
            "window length r = {} exceeds series length {h}",
            cfg.r()
        )));
    }
    Ok((0..cfg.window_count(h))
        .map(|p| &series[p * cfg.k()..p * cfg.k() + cfg.r()])
        .collect())
}

/// Every `s`-th sample of a window, `2l - 1` points, both endpoints kept.
pub fn downsample(window: &[f64], cfg: &WindowConfig) -> Vec<f64> {
    assert_eq!(window.len(), cfg.r(), "window length must equal r");
    window.iter().step_by(cfg.stride()).copied().collect()
}

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(AltError::Invalid("matrix is not square".into()));
        }
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        let m = SymMatrix { n, data };
        let tol = 1e-12 * m.frobenius().max(f64::MIN_POSITIVE);
        for a in 0..n {
            for b in a + 1..n {
                if (m.get(a, b) - m.get(b, a)).abs() > tol {
                    return Err(AltError::Invalid(format!("matrix is not symmetric at ({a}, {b})")));
                }
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.n + b]
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|a| (0..self.n).map(|b| self.get(a, b) * v[b]).sum())
            .collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// `l x l` Hankel matrix `S[a][b] = z[a + b]` of a `2l - 1` point sequence.
pub fn hankel_embed(z: &[f64]) -> SymMatrix {
    assert!(
        z.len() % 2 == 1 && z.len() >= 3,
        "Hankel input needs 2l-1 points, l >= 2"
    );
    let n = z.len().div_ceil(2);
    let mut data = Vec::with_capacity(n * n);
    for a in 0..n {
        data.extend_from_slice(&z[a..a + n]);
    }
    SymMatrix { n, data }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    /// Sorted ascending by magnitude, near-ties by signed value.
    pub values: Vec<f64>,
    /// `vectors[i]` belongs to `values[i]`; orthonormal.
    pub vectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
pub fn eig_symmetric(s: &SymMatrix) -> Result<Eigen> {
    let n = s.n;
    let mut a = s.data.clone();
    // v holds eigenvectors as columns, row-major.
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let norm = s.frobenius();
    let target = CONVERGENCE_TOL * norm;

    let off = |a: &[f64]| -> f64 {
        let mut acc = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    acc += a[p * n + q] * a[p * n + q];
                }
            }
        }
        acc.sqrt()
    };

    let mut converged = off(&a) <= target;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        jacobi_sweep(n, &mut a, &mut v);
        sweeps += 1;
        converged = off(&a) <= target;
    }
    // Convergence is quadratic, so one more sweep takes the off-diagonal
    // mass to rounding level and the eigenvectors to full precision.
    if converged && sweeps > 0 {
        jacobi_sweep(n, &mut a, &mut v);
    }
    if !converged {
        return Err(AltError::NoConvergence {
            sweeps,
            dim: n,
            matrix: s.data.clone(),
        });
    }

    let raw_values: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let tie = EIGEN_TIE_TOL * norm.max(1.0);
    let mut order: Vec<usize> = (0..n).collect();
    // Insertion sort: the comparator is tolerance based and n is small.
    for i in 1..n {
        let mut j = i;
        while j > 0 && eigen_order(&raw_values, order[j], order[j - 1], tie) == Ordering::Less {
            order.swap(j, j - 1);
            j -= 1;
        }
    }
    Ok(Eigen {
        values: order.iter().map(|&i| raw_values[i]).collect(),
        vectors: order.iter().map(|&i| (0..n).map(|r| v[r * n + i]).collect()).collect(),
    })
}

/// One cyclic pass of rotations over every (p, q), p < q.
fn jacobi_sweep(n: usize, a: &mut [f64], v: &mut [f64]) {
    for p in 0..n - 1 {
        for q in p + 1..n {
            let apq = a[p * n + q];
            if apq == 0.0 {
                continue;
            }
            let app = a[p * n + p];
            let aqq = a[q * n + q];
            // Rotation zeroing a[p][q] (Golub & Van Loan, sym.schur2).
            let tau = (aqq - app) / (2.0 * apq);
            let t = if tau >= 0.0 {
                1.0 / (tau + (1.0 + tau * tau).sqrt())
            } else {
                -1.0 / (-tau + (1.0 + tau * tau).sqrt())
            };
            let c = 1.0 / (1.0 + t * t).sqrt();
            let sn = t * c;

            for r in 0..n {
                let arp = a[r * n + p];
                let arq = a[r * n + q];
                a[r * n + p] = c * arp - sn * arq;
                a[r * n + q] = sn * arp + c * arq;
            }
            for r in 0..n {
                let apr = a[p * n + r];
                let aqr = a[q * n + r];
                a[p * n + r] = c * apr - sn * aqr;
                a[q * n + r] = sn * apr + c * aqr;
            }
            a[p * n + q] = 0.0;
            a[q * n + p] = 0.0;
            for r in 0..n {
                let vrp = v[r * n + p];
                let vrq = v[r * n + q];
                v[r * n + p] = c * vrp - sn * vrq;
                v[r * n + q] = sn * vrp + c * vrq;
            }
        }
    }
}

fn eigen_order(values: &[f64], i: usize, j: usize, tie: f64) -> Ordering {
    let (a, b) = (values[i], values[j]);
    if (a.abs() - b.abs()).abs() > tie {
        a.abs().total_cmp(&b.abs())
    } else if (a - b).abs() > tie {
        a.total_cmp(&b)
    } else {
        i.cmp(&j)
    }
}

/// Flip `v` so that its largest-magnitude component is positive; among
/// components tied for largest, the first one decides.
pub fn sign_normalize(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(lead) = v.iter().position(|x| x.abs() >= max - SIGN_TIE_TOL) {
        if v[lead] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Near-null eigenvector of one window's Hankel embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct Shapelet {
    pub vector: Vec<f64>,
    pub eigenvalue: f64,
    /// `||S v||_2`.
    pub residual: f64,
}

pub fn compute_shapelet(z: &[f64]) -> Result<Shapelet> {
    let s = hankel_embed(z);
    let eig = eig_symmetric(&s)?;
    let mut vector = eig.vectors[0].clone();
    sign_normalize(&mut vector);
    let residual = s.mul_vec(&vector).iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(Shapelet {
        vector,
        eigenvalue: eig.values[0],
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(rows: &[&[f64]]) -> SymMatrix {
        SymMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(WindowConfig::new(25, 4, 1).is_ok());
        assert!(WindowConfig::new(25, 5, 1).is_ok());
        assert!(WindowConfig::new(25, 6, 1).is_err());
        assert!(WindowConfig::new(53, 27, 1).is_ok());
        assert!(WindowConfig::new(3, 1, 1).is_err());
        assert!(WindowConfig::new(5, 2, 0).is_err());
        assert!(WindowConfig::new(2, 2, 1).is_err());
        assert_eq!(WindowConfig::new(25, 4, 1).unwrap().stride(), 4);
    }

    #[test]
    fn window_counts() {
        let cfg = WindowConfig::new(25, 4, 1).unwrap();
        assert_eq!(cfg.window_count(150), 126);
        let cfg = WindowConfig::new(53, 4, 1).unwrap_err();
        assert!(cfg.to_string().contains("divide"));
        let cfg = WindowConfig::new(53, 27, 1).unwrap();
        assert_eq!(cfg.window_count(150), 98);
    }

    #[test]
    fn windows_too_long() {
        let cfg = WindowConfig::new(5, 2, 1).unwrap();
        assert!(extract_windows(&[1.0; 4], &cfg).is_err());
    }

    #[test]
    fn downsample_stride_and_identity() {
        let cfg = WindowConfig::new(25, 4, 1).unwrap();
        let w: Vec<f64> = (1..=25).map(f64::from).collect();
        assert_eq!(downsample(&w, &cfg), vec![1.0, 5.0, 9.0, 13.0, 17.0, 21.0, 25.0]);
        let cfg = WindowConfig::new(53, 27, 1).unwrap();
        let w: Vec<f64> = (0..53).map(|x| (x as f64).sin()).collect();
        assert_eq!(downsample(&w, &cfg), w);
    }

    #[test]
    fn hankel_examples() {
        assert_eq!(hankel_embed(&[1.0, 2.0, 3.0]), sym(&[&[1.0, 2.0], &[2.0, 3.0]]));
        assert_eq!(
            hankel_embed(&[1.0, 2.0, 3.0, 4.0, 5.0]),
            sym(&[&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0], &[3.0, 4.0, 5.0]])
        );
        assert_eq!(hankel_embed(&[7.0; 3]).as_slice(), &[7.0; 4]);
    }

    #[test]
    fn rank_one_eigenvalues() {
        let e = eig_symmetric(&sym(&[&[1.0, 1.0], &[1.0, 1.0]])).unwrap();
        assert!(e.values[0].abs() < 1e-15);
        assert!((e.values[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn identity_any_basis() {
        let s = sym(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let e = eig_symmetric(&s).unwrap();
        assert_eq!(e.values, vec![1.0; 3]);
        for (i, v) in e.vectors.iter().enumerate() {
            assert_eq!(v[i], 1.0);
        }
    }

    #[test]
    fn tie_prefers_negative() {
        // eigenvalues +1 and -1
        let e = eig_symmetric(&sym(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_symmetric_rejected() {
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 1.0]]).is_err());
    }

    #[test]
    fn shapelet_of_constant_window() {
        let sh = compute_shapelet(&[1.0, 1.0, 1.0]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(sh.eigenvalue.abs() < 1e-15);
        assert!(
            (sh.vector[0] - h).abs() < 1e-12 && (sh.vector[1] + h).abs() < 1e-12,
            "{:?}",
            sh.vector
        );
    }

    #[test]
    fn sign_rule_tie_goes_to_first() {
        let mut v = vec![-0.5, 0.5, -0.5, 0.5];
        sign_normalize(&mut v);
        assert_eq!(v, vec![0.5, -0.5, 0.5, -0.5]);
        let mut v = vec![0.1, -0.9];
        sign_normalize(&mut v);
        assert_eq!(v, vec![-0.1, 0.9]);
    }
}
