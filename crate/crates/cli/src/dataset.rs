use std::path::PathBuf;

use adaptive_pca::data::{
    load_pgm_files, load_pgm_sequence, load_raw_files, load_raw_volumes, read_manifest, synth,
    DatasetMeta, ElementType, Generator, RawOptions, Source, SynthParams,
};
use adaptive_pca::SampleStore;

use crate::Result;

/// Decoding of files listed in a manifest.
#[derive(Debug, Clone, PartialEq)]
pub enum FileFormat {
    Raw(RawOptions),
    Pgm,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSpec {
    Synthetic {
        generator: Generator,
        dim: usize,
        steps: usize,
        params: SynthParams,
        seed: u64,
    },
    /// Headerless volumes matched by a glob pattern, in lexicographic order.
    Volumes {
        pattern: String,
        options: RawOptions,
    },
    /// Every `.pgm` file of a directory, in lexicographic order.
    Frames { dir: PathBuf },
    /// Files listed one per line, in listed order.
    Manifest { path: PathBuf, format: FileFormat },
}

impl DatasetSpec {
    /// A generator with its default parameters.
    pub fn synthetic(generator: Generator, dim: usize, steps: usize, seed: u64) -> Self {
        DatasetSpec::Synthetic {
            generator,
            dim,
            steps,
            params: generator.default_params(),
            seed,
        }
    }

    pub fn load(&self) -> Result<Dataset> {
        let (store, meta) = match self {
            DatasetSpec::Synthetic {
                generator,
                dim,
                steps,
                params,
                seed,
            } => synth(*generator, *dim, *steps, params, *seed)?,
            DatasetSpec::Volumes { pattern, options } => load_raw_volumes(pattern, options)?,
            DatasetSpec::Frames { dir } => load_pgm_sequence(dir)?,
            DatasetSpec::Manifest { path, format } => {
                let files = read_manifest(path)?;
                match format {
                    FileFormat::Raw(options) => load_raw_files(&files, options)?,
                    FileFormat::Pgm => load_pgm_files(&files)?,
                }
            }
        };
        Ok(Dataset { store, meta })
    }
}

/// Samples plus their description.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub store: SampleStore,
    pub meta: DatasetMeta,
}

impl Dataset {
    /// Wraps an in-memory store as a flat `f64` dataset.
    pub fn from_store(name: impl Into<String>, store: SampleStore) -> Self {
        let meta = DatasetMeta {
            name: name.into(),
            shape: vec![store.dim()],
            element_type: ElementType::F64,
            steps: store.count(),
            source: Source::Files(Vec::new()),
        };
        Self { store, meta }
    }

    /// Files in time order, empty for generated data.
    pub fn files(&self) -> &[PathBuf] {
        match &self.meta.source {
            Source::Files(f) => f,
            Source::Synthetic { .. } => &[],
        }
    }
}
