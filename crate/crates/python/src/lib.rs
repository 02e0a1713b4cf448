//! Python bindings. Samples cross the boundary as sequences of float
//! sequences (lists or 2-D NumPy arrays), one row per time-step.

use adaptive_pca::data::{synth as generate, Generator};
use adaptive_pca::{
    AdaptiveConfig, AdaptiveState, CurveSeries, EigenSpace, OjaState, SampleStore, DEFAULT_RANK_TOL,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(adaptive_pca_py, PcaError, PyValueError);

fn err(e: adaptive_pca::PcaError) -> PyErr {
    PcaError::new_err(e.to_string())
}

fn store(samples: Vec<Vec<f64>>) -> PyResult<SampleStore> {
    SampleStore::from_samples(samples).map_err(err)
}

/// Orthonormal components, optionally with eigenvalues.
#[pyclass(name = "EigenSpace", frozen)]
struct PyEigenSpace {
    inner: EigenSpace,
}

#[pymethods]
impl PyEigenSpace {
    #[getter]
    fn components(&self) -> Vec<Vec<f64>> {
        self.inner.components().to_vec()
    }

    /// `None` for spaces built by the adaptive algorithm.
    #[getter]
    fn eigenvalues(&self) -> Option<Vec<f64>> {
        self.inner.eigenvalues().map(<[f64]>::to_vec)
    }

    #[getter]
    fn centered(&self) -> bool {
        self.inner.centered()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// The first `k` components.
    fn truncated(&self, k: usize) -> Self {
        Self {
            inner: self.inner.truncated(k),
        }
    }

    fn project(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.project(&x).map_err(err)
    }

    fn reconstruct(&self, coefficients: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.reconstruct(&coefficients).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "EigenSpace(dim={}, components={}, centered={})",
            self.inner.dim(),
            self.inner.len(),
            self.inner.centered()
        )
    }
}

/// Online PCA. The first two samples passed to `partial_fit` seed the first
/// component; every later call runs one update step.
#[pyclass(name = "AdaptivePca")]
struct PyAdaptivePca {
    config: AdaptiveConfig,
    first: Option<Vec<f64>>,
    state: Option<AdaptiveState>,
}

impl PyAdaptivePca {
    fn state(&self) -> PyResult<&AdaptiveState> {
        self.state
            .as_ref()
            .ok_or_else(|| PyRuntimeError::new_err("needs at least two samples"))
    }
}

#[pymethods]
impl PyAdaptivePca {
    /// `processing_limit=None` selects the deterministic mode.
    #[new]
    #[pyo3(signature = (space_limit, processing_limit=None, seed=0, reorthogonalize=true))]
    fn new(
        space_limit: usize,
        processing_limit: Option<usize>,
        seed: u64,
        reorthogonalize: bool,
    ) -> PyResult<Self> {
        let config = AdaptiveConfig::new(space_limit, processing_limit.unwrap_or(usize::MAX))
            .with_seed(seed)
            .with_reorthogonalize(reorthogonalize);
        config.validate().map_err(err)?;
        Ok(Self {
            config,
            first: None,
            state: None,
        })
    }

    fn partial_fit(&mut self, x: Vec<f64>) -> PyResult<()> {
        match (&mut self.state, self.first.take()) {
            (Some(state), _) => state.ingest(&x).map_err(err),
            (None, None) => {
                self.first = Some(x);
                Ok(())
            }
            (None, Some(x1)) => {
                self.state = Some(AdaptiveState::init(&x1, &x, self.config.clone()).map_err(err)?);
                Ok(())
            }
        }
    }

    /// Feeds every row in order.
    fn fit(&mut self, samples: Vec<Vec<f64>>) -> PyResult<()> {
        samples.into_iter().try_for_each(|x| self.partial_fit(x))
    }

    /// One update step against the given zero-based previous samples.
    fn ingest_with_indices(&mut self, x: Vec<f64>, indices: Vec<usize>) -> PyResult<()> {
        self.state
            .as_mut()
            .ok_or_else(|| PyRuntimeError::new_err("needs at least two samples"))?
            .ingest_with_indices(&x, &indices)
            .map_err(err)
    }

    #[getter]
    fn components(&self) -> PyResult<Vec<Vec<f64>>> {
        Ok(self.state()?.components().to_vec())
    }

    #[getter]
    fn n(&self) -> usize {
        self.state
            .as_ref()
            .map_or(self.first.is_some() as usize, AdaptiveState::n)
    }

    #[getter]
    fn dot_products(&self) -> PyResult<u64> {
        Ok(self.state()?.counter().total())
    }

    /// `(step, dot_products)` pairs, steps counted from 1.
    fn dot_products_per_step(&self) -> PyResult<Vec<(usize, u64)>> {
        Ok(self.state()?.counter().per_step().to_vec())
    }

    /// `(step, component)` pairs where a residual was dropped.
    fn degenerate_events(&self) -> PyResult<Vec<(usize, usize)>> {
        Ok(self
            .state()?
            .degenerate_events()
            .iter()
            .map(|e| (e.step, e.component))
            .collect())
    }

    #[pyo3(signature = (centered=false))]
    fn eigen_space(&self, centered: bool) -> PyResult<PyEigenSpace> {
        Ok(PyEigenSpace {
            inner: self.state()?.eigen_space(centered),
        })
    }
}

/// Single-component Oja rule.
#[pyclass(name = "Oja")]
struct PyOja {
    inner: OjaState,
}

#[pymethods]
impl PyOja {
    #[new]
    fn new(initial: Vec<f64>, learning_rate: f64) -> PyResult<Self> {
        Ok(Self {
            inner: OjaState::new(&initial, learning_rate).map_err(err)?,
        })
    }

    fn update(&mut self, x: Vec<f64>) -> PyResult<()> {
        self.inner.update(&x).map_err(err)
    }

    #[getter]
    fn component(&self) -> Vec<f64> {
        self.inner.component().to_vec()
    }
}

/// Exact PCA through the Gram matrix of the samples.
#[pyfunction]
#[pyo3(signature = (samples, centered=false, rank_tol=DEFAULT_RANK_TOL))]
fn dual_pca(samples: Vec<Vec<f64>>, centered: bool, rank_tol: f64) -> PyResult<PyEigenSpace> {
    Ok(PyEigenSpace {
        inner: adaptive_pca::dual_pca(&store(samples)?, centered, rank_tol).map_err(err)?,
    })
}

/// Cumulative share of sample energy captured by each component.
#[pyfunction]
#[pyo3(signature = (space, samples, centered=false))]
fn explained_variance(
    space: &PyEigenSpace,
    samples: Vec<Vec<f64>>,
    centered: bool,
) -> PyResult<Vec<f64>> {
    Ok(
        adaptive_pca::explained_variance(&space.inner, &store(samples)?, centered)
            .map_err(err)?
            .values,
    )
}

/// Largest pointwise difference in percentage points over the common prefix.
#[pyfunction]
fn curve_gap(a: Vec<f64>, b: Vec<f64>) -> f64 {
    adaptive_pca::curve_gap(
        &CurveSeries::new("a", a, false),
        &CurveSeries::new("b", b, false),
    )
}

/// `f_i(t)` for every component, one list per component.
#[pyfunction]
fn eigenfunctions(space: &PyEigenSpace, samples: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    let f = adaptive_pca::eigenfunctions(&space.inner, &store(samples)?).map_err(err)?;
    Ok((0..f.components())
        .map(|i| f.function(i).to_vec())
        .collect())
}

/// Synthetic stream of `n` samples of dimension `d`.
#[pyfunction]
#[pyo3(signature = (generator, d, n, seed=0, rank=None, sigma=None, speed=None, decay=None))]
#[allow(clippy::too_many_arguments)]
fn synth(
    generator: &str,
    d: usize,
    n: usize,
    seed: u64,
    rank: Option<usize>,
    sigma: Option<f64>,
    speed: Option<f64>,
    decay: Option<f64>,
) -> PyResult<Vec<Vec<f64>>> {
    let g: Generator = generator.parse().map_err(err)?;
    let mut p = g.default_params();
    p.rank = rank.unwrap_or(p.rank);
    p.sigma = sigma.unwrap_or(p.sigma);
    p.speed = speed.unwrap_or(p.speed);
    p.decay = decay.unwrap_or(p.decay);
    let (s, _) = generate(g, d, n, &p, seed).map_err(err)?;
    Ok(s.iter().map(<[f64]>::to_vec).collect())
}

#[pymodule]
fn adaptive_pca_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PcaError", m.py().get_type::<PcaError>())?;
    m.add("DEFAULT_RANK_TOL", DEFAULT_RANK_TOL)?;
    m.add_class::<PyEigenSpace>()?;
    m.add_class::<PyAdaptivePca>()?;
    m.add_class::<PyOja>()?;
    m.add_function(wrap_pyfunction!(dual_pca, m)?)?;
    m.add_function(wrap_pyfunction!(explained_variance, m)?)?;
    m.add_function(wrap_pyfunction!(curve_gap, m)?)?;
    m.add_function(wrap_pyfunction!(eigenfunctions, m)?)?;
    m.add_function(wrap_pyfunction!(synth, m)?)?;
    Ok(())
}
