use crate::error::{check_dim, PcaError, Result};

/// Time-ordered collection of `dim`-element samples, stored contiguously.
///
/// Sample `j` is time-step `j` (zero-based).
#[derive(Debug, Clone, PartialEq)]
pub struct SampleStore {
    dim: usize,
    data: Vec<f64>,
}

impl SampleStore {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "sample dimension must be positive");
        Self {
            dim,
            data: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, count: usize) -> Self {
        let mut s = Self::new(dim);
        s.data.reserve(dim * count);
        s
    }

    /// Builds a store from a list of equally sized samples.
    pub fn from_samples<I, V>(samples: I) -> Result<Self>
    where
        I: IntoIterator<Item = V>,
        V: AsRef<[f64]>,
    {
        let mut iter = samples.into_iter().peekable();
        let dim = match iter.peek() {
            Some(first) => first.as_ref().len(),
            None => {
                return Err(PcaError::InsufficientData {
                    required: 1,
                    actual: 0,
                })
            }
        };
        if dim == 0 {
            return Err(PcaError::InvalidArgument(
                "samples must be non-empty".into(),
            ));
        }
        let mut store = Self::new(dim);
        for s in iter {
            store.push(s.as_ref())?;
        }
        Ok(store)
    }

    pub fn push(&mut self, sample: &[f64]) -> Result<()> {
        check_dim(self.dim, sample.len())?;
        self.data.extend_from_slice(sample);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn sample(&self, j: usize) -> &[f64] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for x in self.iter() {
            for (mi, xi) in m.iter_mut().zip(x) {
                *mi += xi;
            }
        }
        let inv = 1.0 / self.count().max(1) as f64;
        m.iter_mut().for_each(|v| *v *= inv);
        m
    }

    /// Copy of the store with the sample mean subtracted from every sample.
    pub fn centered(&self) -> Self {
        let m = self.mean();
        let mut out = self.clone();
        for x in out.data.chunks_exact_mut(self.dim) {
            for (xi, mi) in x.iter_mut().zip(&m) {
                *xi -= mi;
            }
        }
        out
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }
}
