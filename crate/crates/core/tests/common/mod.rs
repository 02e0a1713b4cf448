#![allow(dead_code)]

use adaptive_pca::{Matrix, RngState, SampleStore};

pub fn gaussian_store(d: usize, n: usize, seed: u64) -> SampleStore {
    let mut rng = RngState::new(seed);
    let mut s = SampleStore::new(d);
    for _ in 0..n {
        let x: Vec<f64> = (0..d).map(|_| rng.gaussian()).collect();
        s.push(&x).unwrap();
    }
    s
}

pub fn random_symmetric(order: usize, seed: u64) -> Matrix {
    let mut rng = RngState::new(seed);
    let mut m = Matrix::zeros(order);
    for i in 0..order {
        for j in i..order {
            let v = rng.gaussian();
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    m
}

/// Covariance (or second-moment) matrix built elementwise from the samples.
pub fn direct_covariance(store: &SampleStore, centered: bool) -> Matrix {
    let d = store.dim();
    let n = store.count();
    let mean = if centered { store.mean() } else { vec![0.0; d] };
    let mut c = Matrix::zeros(d);
    for a in 0..d {
        for b in a..d {
            let s: f64 = store
                .iter()
                .map(|x| (x[a] - mean[a]) * (x[b] - mean[b]))
                .sum::<f64>()
                / (n - 1) as f64;
            c.set(a, b, s);
            c.set(b, a, s);
        }
    }
    c
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Angle between two lines through the origin, well conditioned near zero.
pub fn line_angle(a: &[f64], b: &[f64]) -> f64 {
    let na = norm(a);
    let nb = norm(b);
    let s = if dot(a, b) < 0.0 { -1.0 } else { 1.0 };
    let diff: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x / na - s * y / nb).powi(2))
        .sum::<f64>()
        .sqrt();
    2.0 * (diff / 2.0).min(1.0).asin()
}

pub fn max_gram_deviation(c: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..c.len() {
        for j in 0..c.len() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(&c[i], &c[j]) - target).abs());
        }
    }
    worst
}

/// Least-squares fit of `f(t) ≈ a sin(ωt) + b cos(ωt)`; returns (a, b, max residual).
pub fn fit_sinusoid(f: &[f64], omega: f64) -> (f64, f64, f64) {
    let (mut ss, mut sc, mut cc, mut fs, mut fc) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (t, y) in f.iter().enumerate() {
        let (s, c) = (omega * t as f64).sin_cos();
        ss += s * s;
        sc += s * c;
        cc += c * c;
        fs += y * s;
        fc += y * c;
    }
    let det = ss * cc - sc * sc;
    let a = (fs * cc - fc * sc) / det;
    let b = (fc * ss - fs * sc) / det;
    let resid = f
        .iter()
        .enumerate()
        .map(|(t, y)| {
            let (s, c) = (omega * t as f64).sin_cos();
            (y - a * s - b * c).abs()
        })
        .fold(0.0, f64::max);
    (a, b, resid)
}
