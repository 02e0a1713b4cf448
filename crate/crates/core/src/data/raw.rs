use std::path::{Path, PathBuf};

use super::{dataset_name, read_file, write_file, DatasetMeta, ElementType, Source};
use crate::error::{PcaError, Result};
use crate::store::SampleStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ByteOrder {
    #[default]
    Little,
    Big,
}

impl std::str::FromStr for ByteOrder {
    type Err = PcaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "little" | "le" => Ok(ByteOrder::Little),
            "big" | "be" => Ok(ByteOrder::Big),
            other => Err(PcaError::InvalidArgument(format!(
                "unknown byte order {other:?}"
            ))),
        }
    }
}

/// How headerless volume files are decoded.
#[derive(Debug, Clone, PartialEq)]
pub struct RawOptions {
    pub shape: Vec<usize>,
    pub element_type: ElementType,
    pub byte_order: ByteOrder,
    /// Keep integer voxels as-is instead of scaling them to `[0, 1]`.
    pub raw_values: bool,
}

impl RawOptions {
    pub fn new(shape: Vec<usize>, element_type: ElementType) -> Self {
        Self {
            shape,
            element_type,
            byte_order: ByteOrder::Little,
            raw_values: false,
        }
    }
}

/// Loads every file matching a glob pattern, in lexicographic order.
pub fn load_raw_volumes(pattern: &str, opts: &RawOptions) -> Result<(SampleStore, DatasetMeta)> {
    let entries = glob::glob(pattern)
        .map_err(|e| PcaError::InvalidArgument(format!("bad pattern {pattern:?}: {e}")))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok())
        .filter(|p| p.is_file())
        .collect();
    if paths.is_empty() {
        return Err(PcaError::EmptyDataset(pattern.to_string()));
    }
    paths.sort();
    load_raw_files(&paths, opts)
}

/// Loads the given files in the given order.
pub fn load_raw_files(paths: &[PathBuf], opts: &RawOptions) -> Result<(SampleStore, DatasetMeta)> {
    if paths.is_empty() {
        return Err(PcaError::EmptyDataset("<no files>".into()));
    }
    let dim: usize = opts.shape.iter().product();
    if dim == 0 {
        return Err(PcaError::InvalidArgument(
            "shape must have positive extents".into(),
        ));
    }
    let expected = dim * opts.element_type.size();
    let mut store = SampleStore::with_capacity(dim, paths.len());
    for path in paths {
        let bytes = read_file(path)?;
        if bytes.len() != expected {
            return Err(PcaError::MalformedFile {
                path: path.clone(),
                reason: format!(
                    "{} bytes, expected {expected} for shape {:?} of {}",
                    bytes.len(),
                    opts.shape,
                    opts.element_type
                ),
            });
        }
        store.push(&decode(&bytes, opts))?;
    }
    let meta = DatasetMeta {
        name: dataset_name(paths),
        shape: opts.shape.clone(),
        element_type: opts.element_type,
        steps: store.count(),
        source: Source::Files(paths.to_vec()),
    };
    debug_assert_eq!(meta.dim(), store.dim());
    Ok((store, meta))
}

fn decode(bytes: &[u8], opts: &RawOptions) -> Vec<f64> {
    let big = opts.byte_order == ByteOrder::Big;
    let divisor = match (opts.raw_values, opts.element_type.max_value()) {
        (false, Some(m)) => m,
        _ => 1.0,
    };
    match opts.element_type {
        ElementType::U8 => bytes.iter().map(|&b| f64::from(b) / divisor).collect(),
        ElementType::U16 => bytes
            .chunks_exact(2)
            .map(|c| {
                let a = [c[0], c[1]];
                let v = if big {
                    u16::from_be_bytes(a)
                } else {
                    u16::from_le_bytes(a)
                };
                f64::from(v) / divisor
            })
            .collect(),
        ElementType::F32 => bytes
            .chunks_exact(4)
            .map(|c| {
                let a = [c[0], c[1], c[2], c[3]];
                f64::from(if big {
                    f32::from_be_bytes(a)
                } else {
                    f32::from_le_bytes(a)
                })
            })
            .collect(),
        ElementType::F64 => bytes
            .chunks_exact(8)
            .map(|c| {
                let a: [u8; 8] = c.try_into().expect("chunk of 8");
                if big {
                    f64::from_be_bytes(a)
                } else {
                    f64::from_le_bytes(a)
                }
            })
            .collect(),
    }
}

/// Writes one time-step as a headerless volume.
///
/// Integer types expect values in `[0, 1]` (scaled by the type maximum and
/// rounded) unless `opts.raw_values` is set.
pub fn write_raw_volume(path: &Path, sample: &[f64], opts: &RawOptions) -> Result<()> {
    let big = opts.byte_order == ByteOrder::Big;
    let scale = match (opts.raw_values, opts.element_type.max_value()) {
        (false, Some(m)) => m,
        _ => 1.0,
    };
    let mut out = Vec::with_capacity(sample.len() * opts.element_type.size());
    for &v in sample {
        match opts.element_type {
            ElementType::U8 => out.push((v * scale).round().clamp(0.0, 255.0) as u8),
            ElementType::U16 => {
                let q = (v * scale).round().clamp(0.0, 65535.0) as u16;
                out.extend_from_slice(&if big {
                    q.to_be_bytes()
                } else {
                    q.to_le_bytes()
                });
            }
            ElementType::F32 => {
                let q = v as f32;
                out.extend_from_slice(&if big {
                    q.to_be_bytes()
                } else {
                    q.to_le_bytes()
                });
            }
            ElementType::F64 => {
                out.extend_from_slice(&if big {
                    v.to_be_bytes()
                } else {
                    v.to_le_bytes()
                });
            }
        }
    }
    write_file(path, &out)
}
