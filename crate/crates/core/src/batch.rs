//! Batch PCA through the dual (Gram matrix) eigenproblem.
//!
//! With `n` samples of dimension `d >> n`, the non-trivial eigenvectors of the
//! `d×d` covariance are recovered from the `n×n` Gram matrix `XᵀX`: if
//! `XᵀX u = μ u` then `X u` is a covariance eigenvector with eigenvalue
//! `μ / (n-1)`. This is the reference every adaptive run is measured against.

use crate::error::{check_dim, PcaError, Result};
use crate::numeric::{axpy, dot_unchecked, normalize_in_place};
use crate::store::SampleStore;

/// Default relative cutoff below which dual eigenvalues are treated as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    order: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            data: vec![0.0; order * order],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let order = rows.len();
        let mut m = Self::zeros(order);
        for (i, row) in rows.iter().enumerate() {
            check_dim(order, row.len())?;
            m.data[i * order..(i + 1) * order].copy_from_slice(row);
        }
        Ok(m)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.order + j] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.order).map(|i| self.get(i, i)).sum()
    }

    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.order {
            for j in i + 1..self.order {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.order {
            for j in 0..self.order {
                if i != j {
                    s += self.get(i, j).powi(2);
                }
            }
        }
        s.sqrt()
    }
}

/// Inner products of every pair of (optionally centered) samples.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    pub entries: Matrix,
    pub centered: bool,
}

impl GramMatrix {
    pub fn order(&self) -> usize {
        self.entries.order()
    }
}

pub fn gram(store: &SampleStore, centered: bool) -> Result<GramMatrix> {
    require_samples(store)?;
    if centered {
        Ok(gram_of(&store.centered(), true))
    } else {
        Ok(gram_of(store, false))
    }
}

fn gram_of(samples: &SampleStore, centered: bool) -> GramMatrix {
    let n = samples.count();
    let mut m = Matrix::zeros(n);
    for i in 0..n {
        let xi = samples.sample(i);
        for j in i..n {
            let v = dot_unchecked(xi, samples.sample(j));
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    GramMatrix {
        entries: m,
        centered,
    }
}

fn require_samples(store: &SampleStore) -> Result<()> {
    if store.count() < 2 {
        return Err(PcaError::InsufficientData {
            required: 2,
            actual: store.count(),
        });
    }
    Ok(())
}

/// Eigenpairs of a symmetric matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
}

/// Cyclic Jacobi eigensolver.
///
/// Sweeps rotate away every off-diagonal entry in row order until the
/// off-diagonal Frobenius norm drops to `max(tol, n·ε·‖m‖_F)`.
pub fn sym_eig(m: &Matrix, tol: f64, max_sweeps: usize) -> Result<SymEigen> {
    let n = m.order();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    if m.asymmetry() > 1e-9 * scale.max(1.0) {
        return Err(PcaError::InvalidArgument(format!(
            "matrix is not symmetric (max asymmetry {:e})",
            m.asymmetry()
        )));
    }
    let mut a = m.clone();
    // Columns of `v` accumulate the rotations; stored row-major as v[k][col].
    let mut v = Matrix::zeros(n);
    for i in 0..n {
        v.set(i, i, 1.0);
    }
    let threshold = tol.max(n as f64 * f64::EPSILON * m.frobenius());

    let mut sweeps = 0;
    let mut off = a.off_diagonal_norm();
    while off > threshold {
        if sweeps == max_sweeps {
            return Err(PcaError::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s);
            }
        }
        sweeps += 1;
        off = a.off_diagonal_norm();
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(j, j).total_cmp(&a.get(i, i)));
    let values = order.iter().map(|&i| a.get(i, i)).collect();
    let vectors = order
        .iter()
        .map(|&col| (0..n).map(|k| v.get(k, col)).collect())
        .collect();
    Ok(SymEigen {
        values,
        vectors,
        sweeps,
    })
}

// A ← JᵀAJ and V ← VJ with J the (p, q) plane rotation [[c, s], [-s, c]].
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = a.order();
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, c * akp - s * akq);
        a.set(k, q, s * akp + c * akq);
    }
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, c * apk - s * aqk);
        a.set(q, k, s * apk + c * aqk);
    }
    a.set(p, q, 0.0);
    a.set(q, p, 0.0);
    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, c * vkp - s * vkq);
        v.set(k, q, s * vkp + c * vkq);
    }
}

/// An ordered orthonormal basis, with eigenvalues when produced by batch PCA.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSpace {
    dim: usize,
    components: Vec<Vec<f64>>,
    eigenvalues: Option<Vec<f64>>,
    centered: bool,
}

impl EigenSpace {
    /// Wraps unit-norm components (checked within 1e-8).
    pub fn new(dim: usize, components: Vec<Vec<f64>>, centered: bool) -> Result<Self> {
        for c in &components {
            check_dim(dim, c.len())?;
            let n = crate::numeric::norm(c);
            if (n - 1.0).abs() > 1e-8 {
                return Err(PcaError::InvalidArgument(format!(
                    "component norm {n} is not 1"
                )));
            }
        }
        Ok(Self {
            dim,
            components,
            eigenvalues: None,
            centered,
        })
    }

    pub fn with_eigenvalues(mut self, eigenvalues: Vec<f64>) -> Result<Self> {
        check_dim(self.components.len(), eigenvalues.len())?;
        self.eigenvalues = Some(eigenvalues);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &[f64] {
        &self.components[i]
    }

    pub fn eigenvalues(&self) -> Option<&[f64]> {
        self.eigenvalues.as_deref()
    }

    pub fn centered(&self) -> bool {
        self.centered
    }

    /// The leading `k` components (all of them if `k` exceeds the count).
    pub fn truncated(&self, k: usize) -> Self {
        let k = k.min(self.len());
        Self {
            dim: self.dim,
            components: self.components[..k].to_vec(),
            eigenvalues: self.eigenvalues.as_ref().map(|e| e[..k].to_vec()),
            centered: self.centered,
        }
    }

    /// Scores `W_i = ⟨v_i, x⟩`.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x.len())?;
        Ok(self
            .components
            .iter()
            .map(|v| dot_unchecked(v, x))
            .collect())
    }

    /// `Σ_i w_i v_i`.
    pub fn reconstruct(&self, w: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.len(), w.len())?;
        let mut out = vec![0.0; self.dim];
        for (wi, v) in w.iter().zip(&self.components) {
            axpy(*wi, v, &mut out);
        }
        Ok(out)
    }
}

/// Batch PCA via the Gram matrix.
///
/// Dual eigenvectors with eigenvalue `μ <= rank_tol · μ_max` are discarded.
/// Returned eigenvalues are covariance eigenvalues `μ / (n-1)`.
pub fn dual_pca(store: &SampleStore, centered: bool, rank_tol: f64) -> Result<EigenSpace> {
    require_samples(store)?;
    let owned;
    let samples = if centered {
        owned = store.centered();
        &owned
    } else {
        store
    };
    let n = samples.count();
    let g = gram_of(samples, centered);
    let eig = sym_eig(&g.entries, 0.0, 100)?;

    let mu_max = eig.values.first().copied().unwrap_or(0.0);
    if !(mu_max > 0.0) {
        return Err(PcaError::RankZero);
    }
    let max_rank = store.dim().min(if centered { n - 1 } else { n });
    let mut components = Vec::new();
    let mut eigenvalues = Vec::new();
    for (mu, u) in eig.values.iter().zip(&eig.vectors) {
        if *mu <= rank_tol * mu_max || components.len() == max_rank {
            break;
        }
        let mut v = vec![0.0; store.dim()];
        for (j, uj) in u.iter().enumerate() {
            axpy(*uj, samples.sample(j), &mut v);
        }
        if normalize_in_place(&mut v, 0.0).is_err() {
            break;
        }
        components.push(v);
        eigenvalues.push(mu / (n - 1) as f64);
    }
    if components.is_empty() {
        return Err(PcaError::RankZero);
    }
    Ok(EigenSpace {
        dim: store.dim(),
        components,
        eigenvalues: Some(eigenvalues),
        centered,
    })
}
