/// Dot-product accounting for the complexity claims of the adaptive update.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OpCounter {
    total: u64,
    current: u64,
    per_step: Vec<(usize, u64)>,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, count: u64) {
        self.total += count;
        self.current += count;
    }

    /// Counted inner product. Lengths must already match.
    #[inline]
    pub fn dot(&mut self, a: &[f64], b: &[f64]) -> f64 {
        self.add(1);
        crate::numeric::dot_unchecked(a, b)
    }

    /// Closes the current step, logging the dot products it consumed.
    pub fn end_step(&mut self, step: usize) {
        self.per_step.push((step, self.current));
        self.current = 0;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn per_step(&self) -> &[(usize, u64)] {
        &self.per_step
    }
}
