//! Experiment runner for adaptive PCA.
//!
//! Each experiment loads a dataset, runs batch and/or adaptive PCA and writes
//! fixed-schema CSV files into an output directory. The `adaptive-pca` binary
//! is a thin argument parser over [`run_compare`], [`run_eigenfunctions`],
//! [`run_counters`] and [`run_synth_dump`].

mod config;
mod dataset;
mod output;
mod run;

pub use config::{parse_seeds, parse_shape, ExperimentConfig, Mode, Plan};
pub use dataset::{Dataset, DatasetSpec, FileFormat};
pub use output::{format_value, OutputSet};
pub use run::{
    compare_dataset, counters_dataset, eigenfunctions_dataset, run_compare, run_counters,
    run_eigenfunctions, run_synth_dump, CompareReport, DumpFormat, FinalValues, GapEntry,
    RunSummary,
};

use std::path::PathBuf;

use adaptive_pca::PcaError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Pca(#[from] PcaError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, CliError>;
