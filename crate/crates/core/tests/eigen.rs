mod common;

use alt_core::lawcore::{compute_shapelet, eig_symmetric, hankel_embed, SymMatrix};
use common::closed_form::{closed_form_2, closed_form_3};
use rand::Rng;

fn random_sym(rng: &mut impl Rng, n: usize, scale: f64) -> SymMatrix {
    let mut rows = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in a..n {
            let v = rng.gen_range(-scale..scale);
            rows[a][b] = v;
            rows[b][a] = v;
        }
    }
    SymMatrix::from_rows(&rows).unwrap()
}

#[test]
fn small_matrices_match_characteristic_polynomial() {
    let mut rng = common::rng(11);
    for i in 0..1000 {
        let n = 2 + i % 2;
        let s = random_sym(&mut rng, n, 10.0);
        let eig = eig_symmetric(&s).unwrap();
        let mut got = eig.values.clone();
        got.sort_by(f64::total_cmp);
        let want = if n == 2 { closed_form_2(&s) } else { closed_form_3(&s) };
        let tol = 1e-9 * 1f64.max(s.frobenius());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= tol, "matrix {:?}: {got:?} vs {want:?}", s.as_slice());
        }
        // Magnitude order of the returned list.
        for w in eig.values.windows(2) {
            assert!(w[0].abs() <= w[1].abs() + 1e-12 * 1f64.max(s.frobenius()));
        }
    }
}

#[test]
fn residuals_and_orthonormality_up_to_thirty() {
    let mut rng = common::rng(12);
    for i in 0..1000 {
        let n = 2 + i % 29;
        let s = random_sym(&mut rng, n, 100.0);
        let eig = eig_symmetric(&s).unwrap();
        let bound = 1e-10 * 1f64.max(s.frobenius());
        for (lam, v) in eig.values.iter().zip(&eig.vectors) {
            let sv = s.mul_vec(v);
            let res = sv.iter().zip(v).map(|(a, b)| (a - lam * b).powi(2)).sum::<f64>().sqrt();
            assert!(res <= bound, "n={n} residual {res} > {bound}");
        }
        for a in 0..n {
            for b in a..n {
                let dot: f64 = eig.vectors[a].iter().zip(&eig.vectors[b]).map(|(x, y)| x * y).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-10, "n={n} <v{a},v{b}> = {dot}");
            }
        }
    }
}

#[test]
fn arithmetic_progression_obeys_second_difference() {
    let mut rng = common::rng(13);
    let want = [-1.0, 2.0, -1.0].map(|x: f64| x / 6f64.sqrt());
    for _ in 0..200 {
        let a = rng.gen_range(-10i32..10) as f64;
        let d = rng.gen_range(1i32..5) as f64 * if rng.gen() { 1.0 } else { -1.0 };
        let z: Vec<f64> = (0..5).map(|t| a + d * t as f64).collect();
        let sh = compute_shapelet(&z).unwrap();
        let norm = hankel_embed(&z).frobenius();
        assert!(sh.eigenvalue.abs() <= 1e-12 * 1f64.max(norm), "{}", sh.eigenvalue);
        for (g, w) in sh.vector.iter().zip(&want) {
            assert!((g - w).abs() <= 1e-12, "{:?}", sh.vector);
        }
    }
}

#[test]
fn shapelet_is_scale_equivariant() {
    let mut rng = common::rng(14);
    for _ in 0..300 {
        let l = rng.gen_range(2..8);
        let z: Vec<f64> = (0..2 * l - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let alpha = rng.gen_range(0.01..100.0);
        let scaled: Vec<f64> = z.iter().map(|v| v * alpha).collect();
        let (a, b) = (compute_shapelet(&z).unwrap(), compute_shapelet(&scaled).unwrap());
        for (x, y) in a.vector.iter().zip(&b.vector) {
            assert!((x - y).abs() <= 1e-9, "{:?} vs {:?}", a.vector, b.vector);
        }
    }
}
