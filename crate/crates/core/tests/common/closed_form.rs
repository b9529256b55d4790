//! Eigenvalues of 2x2 and 3x3 symmetric matrices from the characteristic
//! polynomial.

use std::f64::consts::PI;

use alt_core::lawcore::SymMatrix;

pub fn closed_form_2(s: &SymMatrix) -> Vec<f64> {
    let (a, b, c) = (s.get(0, 0), s.get(0, 1), s.get(1, 1));
    let mid = (a + c) / 2.0;
    let rad = (((a - c) / 2.0).powi(2) + b * b).sqrt();
    vec![mid - rad, mid + rad]
}

/// Trigonometric solution of the characteristic cubic.
pub fn closed_form_3(s: &SymMatrix) -> Vec<f64> {
    let g = |a, b| s.get(a, b);
    let p1 = g(0, 1).powi(2) + g(0, 2).powi(2) + g(1, 2).powi(2);
    let q = (g(0, 0) + g(1, 1) + g(2, 2)) / 3.0;
    let p2 = (g(0, 0) - q).powi(2) + (g(1, 1) - q).powi(2) + (g(2, 2) - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p == 0.0 {
        return vec![q; 3];
    }
    let b = |i, j| (g(i, j) - if i == j { q } else { 0.0 }) / p;
    let det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
        + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    let l1 = q + 2.0 * p * phi.cos();
    let l3 = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    let mut v = vec![l1, 3.0 * q - l1 - l3, l3];
    v.sort_by(f64::total_cmp);
    v
}
