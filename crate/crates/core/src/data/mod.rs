//! Dataset ingestion: raw voxel volumes, PGM frame sequences and seeded
//! synthetic generators. Every loader yields one flattened sample per
//! time-step, with lexicographic file order (or a manifest) defining time.

mod pgm;
mod raw;
mod synth;

use std::fmt;
use std::path::{Path, PathBuf};

pub use pgm::{load_pgm_files, load_pgm_sequence, parse_pgm, write_pgm, PgmImage};
pub use raw::{load_raw_files, load_raw_volumes, write_raw_volume, ByteOrder, RawOptions};
pub use synth::{synth, Generator, SynthParams};

use crate::error::{PcaError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementType {
    U8,
    U16,
    F32,
    F64,
}

impl ElementType {
    pub fn size(self) -> usize {
        match self {
            ElementType::U8 => 1,
            ElementType::U16 => 2,
            ElementType::F32 => 4,
            ElementType::F64 => 8,
        }
    }

    /// Divisor that maps integer types onto `[0, 1]`.
    pub fn max_value(self) -> Option<f64> {
        match self {
            ElementType::U8 => Some(f64::from(u8::MAX)),
            ElementType::U16 => Some(f64::from(u16::MAX)),
            ElementType::F32 | ElementType::F64 => None,
        }
    }
}

impl fmt::Display for ElementType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ElementType::U8 => "u8",
            ElementType::U16 => "u16",
            ElementType::F32 => "f32",
            ElementType::F64 => "f64",
        })
    }
}

impl std::str::FromStr for ElementType {
    type Err = PcaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "u8" => Ok(ElementType::U8),
            "u16" => Ok(ElementType::U16),
            "f32" => Ok(ElementType::F32),
            "f64" => Ok(ElementType::F64),
            other => Err(PcaError::InvalidArgument(format!(
                "unknown element type {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Files(Vec<PathBuf>),
    Synthetic {
        generator: Generator,
        params: SynthParams,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetMeta {
    pub name: String,
    /// Elements per time-step along each axis, fastest axis first.
    pub shape: Vec<usize>,
    pub element_type: ElementType,
    pub steps: usize,
    pub source: Source,
}

impl DatasetMeta {
    pub fn dim(&self) -> usize {
        self.shape.iter().product()
    }
}

/// Reads a line-delimited list of paths. Relative entries resolve against the
/// manifest's directory; blank lines and `#` comments are skipped.
pub fn read_manifest(path: &Path) -> Result<Vec<PathBuf>> {
    let text = std::fs::read_to_string(path).map_err(|source| PcaError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new(""));
    let files: Vec<PathBuf> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let p = PathBuf::from(l);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        })
        .collect();
    if files.is_empty() {
        return Err(PcaError::EmptyDataset(path.display().to_string()));
    }
    Ok(files)
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| PcaError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| PcaError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn dataset_name(paths: &[PathBuf]) -> String {
    paths
        .first()
        .and_then(|p| p.parent())
        .and_then(|p| p.file_name())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string())
}
