use std::path::{Path, PathBuf};

use super::{dataset_name, read_file, write_file, DatasetMeta, ElementType, Source};
use crate::error::{PcaError, Result};
use crate::store::SampleStore;

/// A decoded binary greymap.
#[derive(Debug, Clone, PartialEq)]
pub struct PgmImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    /// Row-major samples, unscaled.
    pub pixels: Vec<u16>,
}

impl PgmImage {
    /// Pixels scaled to `[0, 1]` by `maxval`.
    pub fn normalized(&self) -> Vec<f64> {
        let m = f64::from(self.maxval);
        self.pixels.iter().map(|&p| f64::from(p) / m).collect()
    }
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> Option<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()?
            .parse()
            .ok()
    }
}

/// Parses a single binary (`P5`) Netpbm greymap.
pub fn parse_pgm(bytes: &[u8], path: &Path) -> Result<PgmImage> {
    let malformed = |reason: &str| PcaError::MalformedFile {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(malformed("not a binary PGM (magic P5)"));
    }
    let mut h = Header { bytes, pos: 2 };
    let width = h.number().ok_or_else(|| malformed("bad width"))?;
    let height = h.number().ok_or_else(|| malformed("bad height"))?;
    let maxval = h.number().ok_or_else(|| malformed("bad maxval"))?;
    if width == 0 || height == 0 {
        return Err(malformed("zero-sized image"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(malformed("maxval must be in 1..=65535"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if h.pos >= bytes.len() || !bytes[h.pos].is_ascii_whitespace() {
        return Err(malformed("missing raster"));
    }
    let raster = &bytes[h.pos + 1..];
    let count = width * height;
    let wide = maxval > 255;
    let needed = if wide { 2 * count } else { count };
    if raster.len() < needed {
        return Err(malformed(&format!(
            "truncated raster: {} of {needed} bytes",
            raster.len()
        )));
    }
    let pixels = if wide {
        raster[..needed]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect()
    } else {
        raster[..needed].iter().map(|&b| u16::from(b)).collect()
    };
    Ok(PgmImage {
        width,
        height,
        maxval: maxval as u16,
        pixels,
    })
}

/// Loads every `.pgm` file in `dir`, lexicographic order as time order.
pub fn load_pgm_sequence(dir: &Path) -> Result<(SampleStore, DatasetMeta)> {
    let entries = std::fs::read_dir(dir).map_err(|source| PcaError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")))
        .collect();
    if paths.is_empty() {
        return Err(PcaError::EmptyDataset(dir.display().to_string()));
    }
    paths.sort();
    load_pgm_files(&paths)
}

/// Loads the given PGM frames in order. All frames must share one size.
pub fn load_pgm_files(paths: &[PathBuf]) -> Result<(SampleStore, DatasetMeta)> {
    let mut store: Option<SampleStore> = None;
    let mut shape = Vec::new();
    let mut element_type = ElementType::U8;
    for path in paths {
        let img = parse_pgm(&read_file(path)?, path)?;
        let this_shape = vec![img.width, img.height];
        match store.as_mut() {
            None => {
                shape = this_shape;
                element_type = if img.maxval > 255 {
                    ElementType::U16
                } else {
                    ElementType::U8
                };
                let mut s = SampleStore::with_capacity(img.width * img.height, paths.len());
                s.push(&img.normalized())?;
                store = Some(s);
            }
            Some(s) => {
                if this_shape != shape {
                    return Err(PcaError::MixedDimensions {
                        path: path.clone(),
                        expected: shape,
                        actual: this_shape,
                    });
                }
                s.push(&img.normalized())?;
            }
        }
    }
    let store = store.ok_or_else(|| PcaError::EmptyDataset("<no files>".into()))?;
    let meta = DatasetMeta {
        name: dataset_name(paths),
        shape,
        element_type,
        steps: store.count(),
        source: Source::Files(paths.to_vec()),
    };
    Ok((store, meta))
}

/// Writes `sample` (values in `[0, 1]`) as a `width × height` P5 frame.
pub fn write_pgm(
    path: &Path,
    sample: &[f64],
    width: usize,
    height: usize,
    maxval: u16,
) -> Result<()> {
    if sample.len() != width * height || maxval == 0 {
        return Err(PcaError::InvalidArgument(format!(
            "cannot write {} values as {width}x{height} (maxval {maxval})",
            sample.len()
        )));
    }
    let mut out = format!("P5\n{width} {height}\n{maxval}\n").into_bytes();
    let m = f64::from(maxval);
    for &v in sample {
        let q = (v * m).round().clamp(0.0, m) as u16;
        if maxval > 255 {
            out.extend_from_slice(&q.to_be_bytes());
        } else {
            out.push(q as u8);
        }
    }
    write_file(path, &out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructed_header() {
        let mut bytes = b"P5\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 255, 0, 255]);
        let img = parse_pgm(&bytes, Path::new("x.pgm")).unwrap();
        assert_eq!(img.normalized(), vec![0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn comments_and_sixteen_bit() {
        let mut bytes = b"P5 # comment\n2 # w\n1\n1000\n".to_vec();
        bytes.extend_from_slice(&[0x01, 0xf4, 0x03, 0xe8]);
        let img = parse_pgm(&bytes, Path::new("x.pgm")).unwrap();
        assert_eq!(img.pixels, vec![500, 1000]);
        assert_eq!(img.normalized(), vec![0.5, 1.0]);
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        assert!(parse_pgm(b"P2\n1 1\n255\n0", Path::new("a")).is_err());
        assert!(parse_pgm(b"P5\n2 2\n255\n\x00\x01", Path::new("a")).is_err());
        assert!(parse_pgm(b"P5\n2 2\n70000\n", Path::new("a")).is_err());
    }

    #[test]
    fn mixed_dimensions() {
        let dir = tempfile::tempdir().unwrap();
        write_pgm(&dir.path().join("a.pgm"), &[0.0; 4], 2, 2, 255).unwrap();
        write_pgm(&dir.path().join("b.pgm"), &[0.0; 6], 3, 2, 255).unwrap();
        assert!(matches!(
            load_pgm_sequence(dir.path()),
            Err(PcaError::MixedDimensions { .. })
        ));
    }

    #[test]
    fn lexicographic_time_order() {
        let dir = tempfile::tempdir().unwrap();
        for (name, v) in [("c.pgm", 1.0), ("a.pgm", 0.0), ("b.pgm", 0.5)] {
            write_pgm(&dir.path().join(name), &[v], 1, 1, 2).unwrap();
        }
        let (s, meta) = load_pgm_sequence(dir.path()).unwrap();
        assert_eq!(s.as_flat(), &[0.0, 0.5, 1.0]);
        assert_eq!(meta.shape, vec![1, 1]);
    }
}
