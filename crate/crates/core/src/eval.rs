//! Explained-variance curves and related comparisons between eigenspaces.

use crate::batch::{sym_eig, EigenSpace, Matrix};
use crate::error::{check_dim, PcaError, Result};
use crate::numeric::dot_unchecked;
use crate::store::SampleStore;

/// Cumulative explained-variance fractions, one value per component.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSeries {
    pub values: Vec<f64>,
    pub label: String,
    pub centered: bool,
}

impl CurveSeries {
    pub fn new(label: impl Into<String>, values: Vec<f64>, centered: bool) -> Self {
        Self {
            values,
            label: label.into(),
            centered,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn last(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// Value after `k` components (one-based); saturates at the final value.
    pub fn at(&self, k: usize) -> Option<f64> {
        if k == 0 || self.values.is_empty() {
            return None;
        }
        Some(self.values[k.min(self.values.len()) - 1])
    }
}

/// Share of the total sample energy captured by each component, accumulated.
///
/// Uses sample projections only: `e_i = Σ_j ⟨v_i, x̂_j⟩² / Σ_j ‖x̂_j‖²` where
/// `x̂` is mean-centered when `centered` is set.
pub fn explained_variance(
    space: &EigenSpace,
    store: &SampleStore,
    centered: bool,
) -> Result<CurveSeries> {
    check_dim(space.dim(), store.dim())?;
    if store.count() < 2 {
        return Err(PcaError::InsufficientData {
            required: 2,
            actual: store.count(),
        });
    }
    let owned;
    let samples = if centered {
        owned = store.centered();
        &owned
    } else {
        store
    };
    let total: f64 = samples.iter().map(|x| dot_unchecked(x, x)).sum();
    if !(total > 0.0) {
        return Err(PcaError::ZeroVariance);
    }
    let mut acc = 0.0;
    let values = space
        .components()
        .iter()
        .map(|v| {
            let captured: f64 = samples.iter().map(|x| dot_unchecked(v, x).powi(2)).sum();
            acc += captured / total;
            acc
        })
        .collect();
    Ok(CurveSeries::new("", values, centered))
}

/// Largest pointwise difference in percentage points over the common prefix.
pub fn curve_gap(a: &CurveSeries, b: &CurveSeries) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        * 100.0
}

pub fn mean_curve(runs: &[CurveSeries]) -> Result<CurveSeries> {
    let first = runs
        .first()
        .ok_or_else(|| PcaError::InvalidArgument("mean of zero curves".into()))?;
    let len = first.len();
    let mut sum = vec![0.0; len];
    for r in runs {
        check_dim(len, r.len())?;
        for (s, v) in sum.iter_mut().zip(&r.values) {
            *s += v;
        }
    }
    let k = runs.len() as f64;
    sum.iter_mut().for_each(|s| *s /= k);
    Ok(CurveSeries::new("mean", sum, first.centered))
}

/// Time-dependent scores `f_i(t) = ⟨v_i, x_t⟩`, one row per component.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenfunctionMatrix {
    rows: Vec<Vec<f64>>,
}

impl EigenfunctionMatrix {
    pub fn components(&self) -> usize {
        self.rows.len()
    }

    pub fn steps(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn function(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    /// `Σ_i v_i f_i(t)`, the projection of time-step `t` onto the space.
    pub fn reconstruct(&self, space: &EigenSpace, t: usize) -> Vec<f64> {
        let w: Vec<f64> = self.rows.iter().map(|r| r[t]).collect();
        space.reconstruct(&w).expect("matrix built from this space")
    }
}

/// Scores of every time-step on every component. Samples are mean-centered
/// first when the space was computed from centered data.
pub fn eigenfunctions(space: &EigenSpace, store: &SampleStore) -> Result<EigenfunctionMatrix> {
    check_dim(space.dim(), store.dim())?;
    let owned;
    let samples = if space.centered() {
        owned = store.centered();
        &owned
    } else {
        store
    };
    let rows = space
        .components()
        .iter()
        .map(|v| samples.iter().map(|x| dot_unchecked(v, x)).collect())
        .collect();
    Ok(EigenfunctionMatrix { rows })
}

/// Mean squared cosine of the principal angles between the leading `k`
/// components of two spaces. 1 iff the spans coincide, 0 iff orthogonal.
pub fn subspace_overlap(a: &EigenSpace, b: &EigenSpace, k: usize) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    if k == 0 || k > a.len() || k > b.len() {
        return Err(PcaError::InvalidArgument(format!(
            "k = {k} must be in 1..={}",
            a.len().min(b.len())
        )));
    }
    let cross: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| dot_unchecked(a.component(i), b.component(j)))
                .collect()
        })
        .collect();
    let mut mmt = Matrix::zeros(k);
    for i in 0..k {
        for j in i..k {
            let v = dot_unchecked(&cross[i], &cross[j]);
            mmt.set(i, j, v);
            mmt.set(j, i, v);
        }
    }
    let eig = sym_eig(&mmt, 0.0, 100)?;
    let mean = eig.values.iter().sum::<f64>() / k as f64;
    Ok(mean.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::batch::{dual_pca, DEFAULT_RANK_TOL};

    fn identity2() -> EigenSpace {
        EigenSpace::new(2, vec![vec![1.0, 0.0], vec![0.0, 1.0]], false).unwrap()
    }

    #[test]
    fn rank_one_data_saturates_immediately() {
        let s = SampleStore::from_samples([[1.0, 0.0], [2.0, 0.0], [-3.0, 0.0]]).unwrap();
        let c = explained_variance(&identity2(), &s, false).unwrap();
        assert_eq!(c.values, vec![1.0, 1.0]);
    }

    #[test]
    fn zero_variance_is_an_error() {
        let s = SampleStore::from_samples([[1.0, 1.0], [1.0, 1.0]]).unwrap();
        assert!(matches!(
            explained_variance(&identity2(), &s, true),
            Err(PcaError::ZeroVariance)
        ));
        let s3 = SampleStore::from_samples([[1.0, 1.0, 0.0]]).unwrap();
        assert!(explained_variance(&identity2(), &s3, false).is_err());
    }

    #[test]
    fn full_batch_basis_reaches_one() {
        let s = SampleStore::from_samples([
            [1.0, 2.0, 0.5],
            [0.0, -1.0, 3.0],
            [2.0, 2.0, 2.0],
            [1.0, 0.0, -1.0],
        ])
        .unwrap();
        for centered in [false, true] {
            let e = dual_pca(&s, centered, DEFAULT_RANK_TOL).unwrap();
            let c = explained_variance(&e, &s, centered).unwrap();
            assert!((c.last().unwrap() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn gap_examples() {
        let a = CurveSeries::new("a", vec![0.5, 1.0], false);
        let b = CurveSeries::new("b", vec![0.4, 1.0], false);
        assert_eq!(curve_gap(&a, &a), 0.0);
        assert!((curve_gap(&a, &b) - 10.0).abs() < 1e-12);
        let short = CurveSeries::new("s", vec![0.5], false);
        assert_eq!(curve_gap(&short, &b), curve_gap(&a, &b));
    }

    #[test]
    fn mean_examples() {
        let a = CurveSeries::new("a", vec![0.2, 0.6], false);
        let b = CurveSeries::new("b", vec![0.4, 0.8], false);
        assert_eq!(
            mean_curve(std::slice::from_ref(&a)).unwrap().values,
            a.values
        );
        let m = mean_curve(&[a, b]).unwrap();
        assert!((m.values[0] - 0.3).abs() < 1e-15 && (m.values[1] - 0.7).abs() < 1e-15);
        assert!(mean_curve(&[]).is_err());
    }

    #[test]
    fn eigenfunctions_of_identity() {
        let s = SampleStore::from_samples([[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let f = eigenfunctions(&identity2(), &s).unwrap();
        assert_eq!(f.function(0), &[1.0, 0.0]);
        assert_eq!(f.function(1), &[0.0, 1.0]);
        assert_eq!((f.components(), f.steps()), (2, 2));
        assert_eq!(f.reconstruct(&identity2(), 1), vec![0.0, 1.0]);
    }

    #[test]
    fn overlap_examples() {
        let id = identity2();
        assert!((subspace_overlap(&id, &id, 2).unwrap() - 1.0).abs() < 1e-15);
        let x = EigenSpace::new(2, vec![vec![1.0, 0.0]], false).unwrap();
        let y = EigenSpace::new(2, vec![vec![0.0, 1.0]], false).unwrap();
        assert_eq!(subspace_overlap(&x, &y, 1).unwrap(), 0.0);
        assert!(subspace_overlap(&x, &y, 2).is_err());
    }
}
