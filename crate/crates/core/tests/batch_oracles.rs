mod common;

use adaptive_pca::{dual_pca, gram, sym_eig, Matrix, RngState, DEFAULT_RANK_TOL};
use common::*;
use proptest::prelude::*;

/// Characteristic polynomial coefficients `c[0..=n]` (c[n] = 1) by Faddeev-LeVerrier.
fn char_poly(m: &Matrix) -> Vec<f64> {
    let n = m.order();
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut mk = Matrix::zeros(n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut s: f64 = (0..n).map(|l| m.get(i, l) * mk.get(l, j)).sum();
                if i == j {
                    s += c[n - k + 1];
                }
                next.set(i, j, s);
            }
        }
        let mut tr = 0.0;
        for i in 0..n {
            for l in 0..n {
                tr += m.get(i, l) * next.get(l, i);
            }
        }
        c[n - k] = -tr / k as f64;
        mk = next;
    }
    c
}

fn poly_eval(c: &[f64], x: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &ci in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + ci;
    }
    (p, dp)
}

/// All real roots of a polynomial with only real roots inside [lo, hi].
fn real_roots(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let steps = 400_000;
    let h = (hi - lo) / steps as f64;
    let mut roots = Vec::new();
    let mut prev = poly_eval(c, lo).0;
    for s in 1..=steps {
        let x = lo + s as f64 * h;
        let cur = poly_eval(c, x).0;
        if prev == 0.0 || prev.signum() != cur.signum() {
            let (mut a, mut b) = (x - h, x);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if poly_eval(c, a).0.signum() == poly_eval(c, mid).0.signum() {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            let mut r = 0.5 * (a + b);
            for _ in 0..3 {
                let (p, dp) = poly_eval(c, r);
                if dp != 0.0 {
                    r -= p / dp;
                }
            }
            roots.push(r);
        }
        prev = cur;
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    roots
}

#[test]
fn sym_eig_matches_characteristic_roots() {
    let m = random_symmetric(6, 42);
    let bound = (0..6)
        .map(|i| (0..6).map(|j| m.get(i, j).abs()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1.0;
    let roots = real_roots(&char_poly(&m), -bound, bound);
    assert_eq!(roots.len(), 6, "roots {roots:?}");
    let e = sym_eig(&m, 1e-14, 100).unwrap();
    for (a, b) in e.values.iter().zip(&roots) {
        assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
    }
}

fn check_decomposition(m: &Matrix, tol: f64) {
    let n = m.order();
    let e = sym_eig(m, tol, 100).unwrap();
    assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    assert!(max_gram_deviation(&e.vectors) <= 1e-9);
    let bound = tol.max(1e-9 * m.max_abs());
    for i in 0..n {
        for j in 0..n {
            let r: f64 = (0..n)
                .map(|k| e.values[k] * e.vectors[k][i] * e.vectors[k][j])
                .sum();
            assert!((m.get(i, j) - r).abs() <= bound, "residual at ({i},{j})");
        }
    }
    let sum: f64 = e.values.iter().sum();
    assert!((sum - m.trace()).abs() <= 1e-9 * m.trace().abs().max(1.0));
}

#[test]
fn sym_eig_reconstructs_random_matrices() {
    for (order, seed) in [(1, 0), (2, 1), (7, 2), (15, 3), (40, 4)] {
        check_decomposition(&random_symmetric(order, seed), 1e-12);
    }
    // Repeated eigenvalues.
    let mut m = Matrix::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            m.set(i, j, 1.0);
        }
    }
    check_decomposition(&m, 1e-12);
}

fn compare_with_covariance(d: usize, n: usize, seed: u64, centered: bool) {
    let store = gaussian_store(d, n, seed);
    let space = dual_pca(&store, centered, DEFAULT_RANK_TOL).unwrap();
    let cov = sym_eig(&direct_covariance(&store, centered), 0.0, 200).unwrap();
    let rank = d.min(if centered { n - 1 } else { n });
    assert_eq!(space.len(), rank, "d={d} n={n}");
    let lambdas = space.eigenvalues().unwrap();
    for (k, &lambda) in lambdas.iter().enumerate().take(rank) {
        assert!(
            (lambda - cov.values[k]).abs() <= 1e-8,
            "eigenvalue {k}: {lambda} vs {}",
            cov.values[k]
        );
        let gap_prev = if k > 0 {
            cov.values[k - 1] - cov.values[k]
        } else {
            f64::INFINITY
        };
        let gap_next = if k + 1 < cov.values.len() {
            cov.values[k] - cov.values[k + 1]
        } else {
            f64::INFINITY
        };
        if gap_prev.min(gap_next) > 1e-6 {
            let angle = line_angle(space.component(k), &cov.vectors[k]);
            assert!(angle <= 1e-6, "component {k} angle {angle}");
        }
    }
}

#[test]
fn dual_matches_direct_covariance_fixed_instance() {
    compare_with_covariance(20, 8, 1, false);
    compare_with_covariance(20, 8, 1, true);
}

#[test]
fn dual_matches_direct_covariance_fifty_instances() {
    let mut rng = RngState::new(1000);
    for i in 0..50 {
        let d = 2 + rng.below(24) as usize;
        let n = 3 + rng.below(10) as usize;
        compare_with_covariance(d, n, 5000 + i, i % 2 == 0);
    }
}

#[test]
fn components_follow_dual_map_and_traces_agree() {
    let store = gaussian_store(18, 9, 3);
    for centered in [false, true] {
        let space = dual_pca(&store, centered, DEFAULT_RANK_TOL).unwrap();
        let g = gram(&store, centered).unwrap();
        let eig = sym_eig(&g.entries, 0.0, 100).unwrap();
        let samples = if centered {
            store.centered()
        } else {
            store.clone()
        };
        for (k, u) in eig.vectors.iter().take(space.len()).enumerate() {
            let mut xu = vec![0.0; store.dim()];
            for (j, uj) in u.iter().enumerate() {
                for (a, b) in xu.iter_mut().zip(samples.sample(j)) {
                    *a += uj * b;
                }
            }
            assert!(line_angle(&xu, space.component(k)) <= 1e-8);
        }
        let energy: f64 =
            samples.iter().map(|x| dot(x, x)).sum::<f64>() / (store.count() - 1) as f64;
        let total: f64 = space.eigenvalues().unwrap().iter().sum();
        assert!((energy - total).abs() <= 1e-9 * energy);
        assert!(max_gram_deviation(space.components()) <= 1e-8);
    }
}

#[test]
fn full_basis_round_trip() {
    let store = gaussian_store(10, 10, 11);
    let space = dual_pca(&store, false, DEFAULT_RANK_TOL).unwrap();
    assert_eq!(space.len(), 10);
    for x in store.iter() {
        let back = space.reconstruct(&space.project(x).unwrap()).unwrap();
        for (a, b) in back.iter().zip(x) {
            assert!((a - b).abs() <= 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn eigenvalues_sorted_and_non_negative(d in 2usize..25, n in 2usize..12, seed: u64, centered: bool) {
        let store = gaussian_store(d, n, seed);
        let space = dual_pca(&store, centered, DEFAULT_RANK_TOL).unwrap();
        let l = space.eigenvalues().unwrap();
        prop_assert!(l.iter().all(|&v| v >= 0.0));
        prop_assert!(l.windows(2).all(|w| w[0] + 1e-10 >= w[1]));
        let cap = d.min(if centered { n - 1 } else { n });
        prop_assert!(space.len() <= cap);
    }

    #[test]
    fn gram_is_symmetric_with_non_negative_diagonal(d in 1usize..10, n in 2usize..10, seed: u64, centered: bool) {
        let g = gram(&gaussian_store(d, n, seed), centered).unwrap();
        prop_assert_eq!(g.entries.asymmetry(), 0.0);
        prop_assert!((0..n).all(|i| g.entries.get(i, i) >= 0.0));
    }
}
