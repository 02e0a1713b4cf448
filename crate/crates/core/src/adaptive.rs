//! Online eigenspace updates, one step per new time-step.
//!
//! Each eigenvector is treated as a weighted sum of the samples seen so far.
//! When a new sample arrives every maintained eigenvector receives a single
//! update whose weights come from the second-order correlations between the
//! new sample and (a subset of) the previous ones, after which the sample
//! workspace is deflated against it. Whatever survives the deflation of all
//! updated eigenvectors becomes the trailing eigenvector.
//!
//! Full-dimensional mode maintains `min(d, n)` eigenvectors and correlates
//! against every previous sample (`O(n)` dot products per eigenvector per
//! step). `space_limit` caps the number of eigenvectors; `processing_limit`
//! caps the previous samples used, drawing them uniformly at random once
//! `n` exceeds it, which makes the per-step cost constant.

use crate::batch::EigenSpace;
use crate::counter::OpCounter;
use crate::error::{check_dim, PcaError, Result};
use crate::numeric::{axpy, norm, normalize_in_place, sample_indices};
use crate::rng::RngState;
use crate::store::SampleStore;

pub const DEFAULT_DEGENERATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveConfig {
    /// Maximum number of eigenvectors maintained.
    pub space_limit: usize,
    /// Maximum number of previous time-steps correlated per eigenvector per step.
    pub processing_limit: usize,
    /// Gram-Schmidt each updated eigenvector against the ones updated before it.
    pub reorthogonalize: bool,
    /// Relative norm below which an update or residual is dropped.
    pub degenerate_tol: f64,
    pub seed: u64,
}

impl AdaptiveConfig {
    pub fn new(space_limit: usize, processing_limit: usize) -> Self {
        Self {
            space_limit,
            processing_limit,
            reorthogonalize: true,
            degenerate_tol: DEFAULT_DEGENERATE_TOL,
            seed: 0,
        }
    }

    /// Deterministic mode tracking every eigenvector the data supports.
    pub fn full_dimensional(dim: usize) -> Self {
        Self::new(dim, usize::MAX)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_reorthogonalize(mut self, on: bool) -> Self {
        self.reorthogonalize = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.space_limit == 0 {
            return Err(PcaError::InvalidArgument(
                "space_limit must be at least 1".into(),
            ));
        }
        if self.processing_limit == 0 {
            return Err(PcaError::InvalidArgument(
                "processing_limit must be at least 1".into(),
            ));
        }
        if !(self.degenerate_tol >= 0.0) {
            return Err(PcaError::InvalidArgument(
                "degenerate_tol must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// A component that was dropped because its norm collapsed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegenerateEvent {
    /// One-based time-step index of the sample being ingested.
    pub step: usize,
    pub component: usize,
}

#[derive(Debug, Clone)]
pub struct AdaptiveState {
    config: AdaptiveConfig,
    store: SampleStore,
    sample_norms: Vec<f64>,
    components: Vec<Vec<f64>>,
    rng: RngState,
    counter: OpCounter,
    degenerate_events: Vec<DegenerateEvent>,
}

/// Un-normalized single-step update of eigenvector `v`.
///
/// `previous` holds the deflated workspace columns selected for this step and
/// `new` the deflated new time-step. Returns
///
/// ```text
/// v + Σ_j ⟨v,x̃_j⟩⟨x̃_j,x̃_new⟩² x̃_j + ⟨v,x̃_new⟩ (Σ_j ⟨x̃_j,x̃_new⟩ + ⟨x̃_new,x̃_new⟩)² x̃_new
/// ```
///
/// The squared single sum equals the double sum Σ_i Σ_j ⟨x̃_i,x̃_new⟩⟨x̃_j,x̃_new⟩
/// over the same columns plus the new one. Consumes `2·|previous| + 2` dot
/// products.
pub fn update_component<C: AsRef<[f64]>>(
    v: &[f64],
    previous: &[C],
    new: &[f64],
    counter: &mut OpCounter,
) -> Vec<f64> {
    let mut out = v.to_vec();
    let mut corr_sum = counter.dot(new, new);
    for xj in previous {
        let xj = xj.as_ref();
        let corr = counter.dot(xj, new);
        let score = counter.dot(v, xj);
        corr_sum += corr;
        axpy(score * corr * corr, xj, &mut out);
    }
    let score_new = counter.dot(v, new);
    axpy(score_new * corr_sum * corr_sum, new, &mut out);
    out
}

impl AdaptiveState {
    /// Starts from two time-steps with `(x2 - x1) / ‖x2 - x1‖` as the first eigenvector.
    pub fn init(x1: &[f64], x2: &[f64], config: AdaptiveConfig) -> Result<Self> {
        config.validate()?;
        check_dim(x1.len(), x2.len())?;
        if x1.is_empty() {
            return Err(PcaError::InvalidArgument(
                "samples must be non-empty".into(),
            ));
        }
        let mut counter = OpCounter::new();
        let mut v: Vec<f64> = x2.iter().zip(x1).map(|(b, a)| b - a).collect();
        let scale = norm(x1) + norm(x2);
        counter.add(2);
        let diff = norm(&v);
        counter.add(1);
        if !(diff > config.degenerate_tol * scale) {
            return Err(PcaError::DegenerateInit);
        }
        v.iter_mut().for_each(|e| *e /= diff);
        counter.end_step(2);

        let mut store = SampleStore::with_capacity(x1.len(), 64);
        store.push(x1)?;
        store.push(x2)?;
        Ok(Self {
            rng: RngState::new(config.seed),
            config,
            store,
            sample_norms: vec![norm(x1), norm(x2)],
            components: vec![v],
            counter,
            degenerate_events: Vec::new(),
        })
    }

    /// Initializes from the first two samples of `store` and ingests the rest.
    pub fn from_store(store: &SampleStore, config: AdaptiveConfig) -> Result<Self> {
        if store.count() < 2 {
            return Err(PcaError::InsufficientData {
                required: 2,
                actual: store.count(),
            });
        }
        let mut state = Self::init(store.sample(0), store.sample(1), config)?;
        for j in 2..store.count() {
            state.ingest(store.sample(j))?;
        }
        Ok(state)
    }

    /// Processes one new time-step.
    pub fn ingest(&mut self, x_new: &[f64]) -> Result<()> {
        check_dim(self.store.dim(), x_new.len())?;
        let n = self.store.count();
        let indices = sample_indices(n, self.config.processing_limit, &mut self.rng);
        self.step(x_new, &indices)
    }

    /// Like [`ingest`](Self::ingest) but with an explicit set of zero-based
    /// previous time-steps instead of drawing them.
    pub fn ingest_with_indices(&mut self, x_new: &[f64], indices: &[usize]) -> Result<()> {
        check_dim(self.store.dim(), x_new.len())?;
        let n = self.store.count();
        if let Some(&bad) = indices.iter().find(|&&j| j >= n) {
            return Err(PcaError::InvalidArgument(format!(
                "index {bad} out of range for {n} previous samples"
            )));
        }
        self.step(x_new, indices)
    }

    fn step(&mut self, x_new: &[f64], indices: &[usize]) -> Result<()> {
        let n = self.store.count();
        let step_id = n + 1;
        let counter = &mut self.counter;

        self.store.push(x_new)?;
        self.sample_norms.push(counter.dot(x_new, x_new).sqrt());

        // Only the selected columns and the new one are ever read, so only
        // those are copied into the workspace.
        let mut previous: Vec<Vec<f64>> = indices
            .iter()
            .map(|&j| self.store.sample(j).to_vec())
            .collect();
        let mut new = x_new.to_vec();
        let scale: f64 =
            indices.iter().map(|&j| self.sample_norms[j]).sum::<f64>() + self.sample_norms[n];

        let target = n.min(self.config.space_limit);
        let tol = self.config.degenerate_tol;
        let mut i = 0;
        while i < self.components.len().min(target - 1) {
            let tilde = update_component(&self.components[i], &previous, &new, counter);
            let share = counter.dot(&tilde, &self.components[i]);
            let mut vi = tilde;
            axpy(share, &self.components[i], &mut vi);

            let mut ok = normalize_in_place(&mut vi, 0.0).is_ok();
            counter.add(1);
            if ok && self.config.reorthogonalize {
                for k in 0..i {
                    let p = counter.dot(&vi, &self.components[k]);
                    axpy(-p, &self.components[k], &mut vi);
                }
                ok = normalize_in_place(&mut vi, tol).is_ok();
                counter.add(1);
            }
            if !ok {
                self.components.remove(i);
                self.degenerate_events.push(DegenerateEvent {
                    step: step_id,
                    component: i,
                });
                continue;
            }

            for xj in previous.iter_mut().chain(std::iter::once(&mut new)) {
                let p = counter.dot(&vi, xj);
                axpy(-p, &vi, xj);
            }
            self.components[i] = vi;
            i += 1;
        }

        // The deflated workspace is orthogonal to every updated eigenvector.
        let updated = i;
        let mut residual = new;
        for xj in &previous {
            axpy(1.0, xj, &mut residual);
        }
        let raw = norm(&residual);
        counter.add(1);
        let mut ok = raw > tol * scale && raw.is_finite();
        if ok {
            residual.iter_mut().for_each(|e| *e /= raw);
            if self.config.reorthogonalize {
                for k in 0..updated {
                    let p = counter.dot(&residual, &self.components[k]);
                    axpy(-p, &self.components[k], &mut residual);
                }
                ok = normalize_in_place(&mut residual, tol).is_ok();
                counter.add(1);
            }
        }
        self.components.truncate(updated);
        if ok {
            self.components.push(residual);
        } else {
            self.degenerate_events.push(DegenerateEvent {
                step: step_id,
                component: updated,
            });
        }
        counter.end_step(step_id);
        Ok(())
    }

    pub fn config(&self) -> &AdaptiveConfig {
        &self.config
    }

    pub fn store(&self) -> &SampleStore {
        &self.store
    }

    /// Number of ingested time-steps.
    pub fn n(&self) -> usize {
        self.store.count()
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn counter(&self) -> &OpCounter {
        &self.counter
    }

    pub fn degenerate_events(&self) -> &[DegenerateEvent] {
        &self.degenerate_events
    }

    /// Current components as an eigenspace. `centered` records whether the
    /// stream was mean-centered before ingestion.
    pub fn eigen_space(&self, centered: bool) -> EigenSpace {
        EigenSpace::new(self.store.dim(), self.components.clone(), centered)
            .expect("adaptive components are unit-norm")
    }
}

/// Single-vector Oja update `v ← normalize(v + α⟨x, v⟩x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OjaState {
    component: Vec<f64>,
    learning_rate: f64,
}

impl OjaState {
    pub fn new(initial: &[f64], learning_rate: f64) -> Result<Self> {
        if !(learning_rate > 0.0) {
            return Err(PcaError::InvalidArgument(
                "learning rate must be positive".into(),
            ));
        }
        let mut component = initial.to_vec();
        normalize_in_place(&mut component, DEFAULT_DEGENERATE_TOL)?;
        Ok(Self {
            component,
            learning_rate,
        })
    }

    pub fn update(&mut self, x: &[f64]) -> Result<()> {
        check_dim(self.component.len(), x.len())?;
        let score = crate::numeric::dot_unchecked(x, &self.component);
        let mut next = self.component.clone();
        axpy(self.learning_rate * score, x, &mut next);
        normalize_in_place(&mut next, DEFAULT_DEGENERATE_TOL)?;
        self.component = next;
        Ok(())
    }

    pub fn component(&self) -> &[f64] {
        &self.component
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }
}
