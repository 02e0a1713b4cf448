use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use adaptive_pca::AdaptiveConfig;

use crate::{CliError, DatasetSpec, Result};

const DEFAULT_SPACE_LIMIT: usize = 20;
const DEFAULT_PROCESSING_LIMIT: usize = 40;
const DEFAULT_RUNS: u64 = 10;
const DEFAULT_LEARNING_RATE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Batch,
    /// Deterministic, `space_limit = min(d, n)`.
    AdaptiveFull,
    /// Deterministic with a bounded number of components.
    AdaptiveLimited,
    /// Bounded components, each step against a random subset of prior samples.
    AdaptiveStochastic,
    /// Single-component Oja rule, for comparison.
    Oja,
}

impl Mode {
    pub const ALL: [Mode; 5] = [
        Mode::Batch,
        Mode::AdaptiveFull,
        Mode::AdaptiveLimited,
        Mode::AdaptiveStochastic,
        Mode::Oja,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Batch => "batch",
            Mode::AdaptiveFull => "adaptive-full",
            Mode::AdaptiveLimited => "adaptive-limited",
            Mode::AdaptiveStochastic => "adaptive-stochastic",
            Mode::Oja => "oja",
        }
    }

    pub fn is_adaptive(self) -> bool {
        matches!(
            self,
            Mode::AdaptiveFull | Mode::AdaptiveLimited | Mode::AdaptiveStochastic
        )
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown mode {s:?}")))
    }
}

/// Everything an experiment needs, as given by the user. Unset options are
/// filled in by [`ExperimentConfig::resolve`] once the dataset size is known.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    /// `None` infers the mode: a processing limit selects the stochastic
    /// mode, a space limit alone the limited one, otherwise full.
    pub mode: Option<Mode>,
    pub space_limit: Option<usize>,
    pub processing_limit: Option<usize>,
    pub runs: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub centered: bool,
    pub reorthogonalize: bool,
    pub learning_rate: Option<f64>,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn new(dataset: DatasetSpec, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            dataset,
            mode: None,
            space_limit: None,
            processing_limit: None,
            runs: None,
            seeds: None,
            centered: false,
            reorthogonalize: true,
            learning_rate: None,
            output_dir: output_dir.into(),
        }
    }

    /// Validates the options against a dataset of `steps` samples of size `dim`.
    pub fn resolve(&self, dim: usize, steps: usize) -> Result<Plan> {
        let mode = self
            .mode
            .unwrap_or(match (self.space_limit, self.processing_limit) {
                (_, Some(_)) => Mode::AdaptiveStochastic,
                (Some(_), None) => Mode::AdaptiveLimited,
                (None, None) => Mode::AdaptiveFull,
            });
        let reject = |flag: &str, set: bool| {
            if set {
                Err(CliError::Config(format!(
                    "{flag} does not apply to mode {mode}"
                )))
            } else {
                Ok(())
            }
        };
        reject(
            "--learning-rate",
            mode != Mode::Oja && self.learning_rate.is_some(),
        )?;
        reject(
            "--runs/--seeds",
            mode != Mode::AdaptiveStochastic && (self.runs.is_some() || self.seeds.is_some()),
        )?;
        let (space_limit, processing_limit) = match mode {
            Mode::Batch | Mode::Oja | Mode::AdaptiveFull => {
                reject("--space-limit", self.space_limit.is_some())?;
                reject("--processing-limit", self.processing_limit.is_some())?;
                (dim.min(steps), usize::MAX)
            }
            Mode::AdaptiveLimited => {
                reject("--processing-limit", self.processing_limit.is_some())?;
                (self.space_limit.unwrap_or(DEFAULT_SPACE_LIMIT), usize::MAX)
            }
            Mode::AdaptiveStochastic => {
                let pl = self.processing_limit.unwrap_or(DEFAULT_PROCESSING_LIMIT);
                if pl >= steps {
                    return Err(CliError::Config(format!(
                        "stochastic mode needs processing limit < n, got {pl} for n = {steps}"
                    )));
                }
                (self.space_limit.unwrap_or(DEFAULT_SPACE_LIMIT), pl)
            }
        };
        if space_limit == 0 || processing_limit == 0 {
            return Err(CliError::Config("limits must be positive".into()));
        }

        let seeds = if mode == Mode::AdaptiveStochastic {
            let seeds = match (&self.seeds, self.runs) {
                (Some(s), Some(r)) if s.len() != r => {
                    return Err(CliError::Config(format!(
                        "--runs {r} but {} seeds given",
                        s.len()
                    )));
                }
                (Some(s), _) => s.clone(),
                (None, Some(r)) => (1..=r as u64).collect(),
                (None, None) => (1..=DEFAULT_RUNS).collect(),
            };
            if seeds.is_empty() {
                return Err(CliError::Config("at least one run is required".into()));
            }
            seeds
        } else {
            Vec::new()
        };

        let learning_rate = self.learning_rate.unwrap_or(DEFAULT_LEARNING_RATE);
        if !(learning_rate > 0.0 && learning_rate.is_finite()) {
            return Err(CliError::Config(format!(
                "learning rate must be positive, got {learning_rate}"
            )));
        }
        Ok(Plan {
            mode,
            space_limit,
            processing_limit,
            seeds,
            centered: self.centered,
            reorthogonalize: self.reorthogonalize,
            learning_rate,
        })
    }
}

/// Fully resolved run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub mode: Mode,
    pub space_limit: usize,
    /// `usize::MAX` for the deterministic modes.
    pub processing_limit: usize,
    /// One per stochastic run; empty otherwise.
    pub seeds: Vec<u64>,
    pub centered: bool,
    pub reorthogonalize: bool,
    pub learning_rate: f64,
}

impl Plan {
    pub fn deterministic_config(&self) -> AdaptiveConfig {
        AdaptiveConfig::new(self.space_limit, usize::MAX).with_reorthogonalize(self.reorthogonalize)
    }

    pub fn stochastic_config(&self, seed: u64) -> AdaptiveConfig {
        AdaptiveConfig::new(self.space_limit, self.processing_limit)
            .with_reorthogonalize(self.reorthogonalize)
            .with_seed(seed)
    }
}

/// `"1..10"` (inclusive), `"1..=10"`, `"4"` or `"1,4,9"`.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = || CliError::Config(format!("bad seed list {s:?}"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b): (u64, u64) = (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        );
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| bad()))
        .collect()
}

/// `"432x432x432"` or `"432,432,432"`, fastest axis first.
pub fn parse_shape(s: &str) -> Result<Vec<usize>> {
    let shape: Vec<usize> = s
        .split(['x', ','])
        .map(|t| t.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| CliError::Config(format!("bad shape {s:?}")))?;
    if shape.is_empty() || shape.contains(&0) {
        return Err(CliError::Config(format!("bad shape {s:?}")));
    }
    Ok(shape)
}
