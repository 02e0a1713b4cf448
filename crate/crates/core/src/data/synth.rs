use std::f64::consts::PI;
use std::fmt;

use super::{DatasetMeta, ElementType, Source};
use crate::error::{PcaError, Result};
use crate::rng::RngState;
use crate::store::SampleStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// `X = A·B + σN` with Gaussian `A` (d×r), `B` (r×n) and noise `N`.
    LowRank,
    /// `x_t[i] = sin(2π(i - c·t)/d)`, a rank-2 stream.
    TravelingWave,
    /// A Gaussian bump orbiting the centre of a square grid.
    RotatingBlob,
    /// Low-rank with smooth oscillating temporal coefficients and
    /// geometrically decaying energy per mode.
    Cascade,
}

impl Generator {
    pub const ALL: [Generator; 4] = [
        Generator::LowRank,
        Generator::TravelingWave,
        Generator::RotatingBlob,
        Generator::Cascade,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Generator::LowRank => "lowrank",
            Generator::TravelingWave => "traveling_wave",
            Generator::RotatingBlob => "rotating_blob",
            Generator::Cascade => "cascade",
        }
    }

    pub fn default_params(self) -> SynthParams {
        let base = SynthParams::default();
        match self {
            Generator::Cascade => SynthParams {
                rank: 20,
                sigma: 0.01,
                ..base
            },
            _ => base,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Generator {
    type Err = PcaError;

    fn from_str(s: &str) -> Result<Self> {
        Generator::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| PcaError::UnknownGenerator(s.to_string()))
    }
}

/// Generator parameters. Each generator reads only the fields it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    /// Number of latent modes (`lowrank`, `cascade`).
    pub rank: usize,
    /// Standard deviation of additive Gaussian noise (`lowrank`, `cascade`).
    pub sigma: f64,
    /// Wave speed in elements per step (`traveling_wave`).
    pub speed: f64,
    /// Energy ratio between consecutive modes (`cascade`).
    pub decay: f64,
    /// Bump standard deviation as a fraction of the grid side (`rotating_blob`).
    pub blob_width: f64,
    /// Orbit radius as a fraction of the grid side (`rotating_blob`).
    pub orbit_radius: f64,
    /// Steps per revolution (`rotating_blob`).
    pub period: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            rank: 3,
            sigma: 0.0,
            speed: 1.0,
            decay: 0.8,
            blob_width: 0.08,
            orbit_radius: 0.25,
            period: 50.0,
        }
    }
}

impl SynthParams {
    /// `name=value` pairs for run records.
    pub fn describe(&self, generator: Generator) -> Vec<(&'static str, String)> {
        match generator {
            Generator::LowRank => vec![
                ("rank", self.rank.to_string()),
                ("sigma", self.sigma.to_string()),
            ],
            Generator::TravelingWave => vec![("speed", self.speed.to_string())],
            Generator::RotatingBlob => vec![
                ("blob_width", self.blob_width.to_string()),
                ("orbit_radius", self.orbit_radius.to_string()),
                ("period", self.period.to_string()),
            ],
            Generator::Cascade => vec![
                ("rank", self.rank.to_string()),
                ("sigma", self.sigma.to_string()),
                ("decay", self.decay.to_string()),
            ],
        }
    }
}

/// Generates `n` time-steps of dimension `d`. Bit-reproducible for a fixed
/// `(generator, params, seed)`.
pub fn synth(
    generator: Generator,
    d: usize,
    n: usize,
    params: &SynthParams,
    seed: u64,
) -> Result<(SampleStore, DatasetMeta)> {
    if d < 4 || n < 3 {
        return Err(PcaError::InvalidArgument(format!(
            "synthetic data needs d >= 4 and n >= 3 (got d={d}, n={n})"
        )));
    }
    let mut rng = RngState::new(seed);
    let (store, shape) = match generator {
        Generator::LowRank => (low_rank(d, n, params, &mut rng)?, vec![d]),
        Generator::TravelingWave => (traveling_wave(d, n, params.speed), vec![d]),
        Generator::RotatingBlob => rotating_blob(d, n, params, &mut rng)?,
        Generator::Cascade => (cascade(d, n, params, &mut rng)?, vec![d]),
    };
    let meta = DatasetMeta {
        name: generator.name().to_string(),
        shape,
        element_type: ElementType::F64,
        steps: n,
        source: Source::Synthetic {
            generator,
            params: params.clone(),
            seed,
        },
    };
    Ok((store, meta))
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut RngState) -> Vec<f64> {
    (0..rows * cols).map(|_| rng.gaussian()).collect()
}

fn require_rank(params: &SynthParams) -> Result<()> {
    if params.rank == 0 {
        return Err(PcaError::InvalidArgument("rank must be at least 1".into()));
    }
    if !(params.sigma >= 0.0) {
        return Err(PcaError::InvalidArgument(
            "sigma must be non-negative".into(),
        ));
    }
    Ok(())
}

// Draw order: A row-major (d×r), then B row-major (r×n), then noise sample by sample.
fn low_rank(d: usize, n: usize, params: &SynthParams, rng: &mut RngState) -> Result<SampleStore> {
    require_rank(params)?;
    let r = params.rank;
    let a = gaussian_matrix(d, r, rng);
    let b = gaussian_matrix(r, n, rng);
    let mut store = SampleStore::with_capacity(d, n);
    let mut x = vec![0.0; d];
    for t in 0..n {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = (0..r).map(|k| a[i * r + k] * b[k * n + t]).sum();
        }
        if params.sigma > 0.0 {
            for xi in &mut x {
                *xi += params.sigma * rng.gaussian();
            }
        }
        store.push(&x)?;
    }
    Ok(store)
}

fn traveling_wave(d: usize, n: usize, speed: f64) -> SampleStore {
    let mut store = SampleStore::with_capacity(d, n);
    for t in 0..n {
        let x: Vec<f64> = (0..d)
            .map(|i| (2.0 * PI * (i as f64 - speed * t as f64) / d as f64).sin())
            .collect();
        store.push(&x).expect("fixed dimension");
    }
    store
}

fn rotating_blob(
    d: usize,
    n: usize,
    params: &SynthParams,
    rng: &mut RngState,
) -> Result<(SampleStore, Vec<usize>)> {
    let side = (d as f64).sqrt().round() as usize;
    if side * side != d {
        return Err(PcaError::InvalidArgument(format!(
            "rotating_blob needs a square dimension, got {d}"
        )));
    }
    if !(params.period > 0.0) || !(params.blob_width > 0.0) {
        return Err(PcaError::InvalidArgument(
            "period and blob_width must be positive".into(),
        ));
    }
    let phase = 2.0 * PI * rng.next_f64();
    let s = side as f64;
    let centre = (s - 1.0) / 2.0;
    let radius = params.orbit_radius * s;
    let two_w2 = 2.0 * (params.blob_width * s).powi(2);
    let mut store = SampleStore::with_capacity(d, n);
    for t in 0..n {
        let theta = phase + 2.0 * PI * t as f64 / params.period;
        let cx = centre + radius * theta.cos();
        let cy = centre + radius * theta.sin();
        let x: Vec<f64> = (0..d)
            .map(|k| {
                let (px, py) = ((k % side) as f64, (k / side) as f64);
                (-((px - cx).powi(2) + (py - cy).powi(2)) / two_w2).exp()
            })
            .collect();
        store.push(&x)?;
    }
    Ok((store, vec![side, side]))
}

// Mode k has spatial pattern a_k ~ N(0, I), amplitude decay^k and temporal
// coefficient sin(2π f_k t / n + φ_k) with f_k = 1 + k/2 and random phase.
fn cascade(d: usize, n: usize, params: &SynthParams, rng: &mut RngState) -> Result<SampleStore> {
    require_rank(params)?;
    if !(params.decay > 0.0 && params.decay <= 1.0) {
        return Err(PcaError::InvalidArgument("decay must be in (0, 1]".into()));
    }
    let r = params.rank;
    let patterns = gaussian_matrix(r, d, rng);
    let phases: Vec<f64> = (0..r).map(|_| 2.0 * PI * rng.next_f64()).collect();
    let mut store = SampleStore::with_capacity(d, n);
    let mut x = vec![0.0; d];
    for t in 0..n {
        x.iter_mut().for_each(|v| *v = 0.0);
        let mut amp = 1.0;
        for k in 0..r {
            let freq = 1.0 + k as f64 / 2.0;
            let c = amp * (2.0 * PI * freq * t as f64 / n as f64 + phases[k]).sin();
            for (xi, ai) in x.iter_mut().zip(&patterns[k * d..(k + 1) * d]) {
                *xi += c * ai;
            }
            amp *= params.decay;
        }
        if params.sigma > 0.0 {
            for xi in &mut x {
                *xi += params.sigma * rng.gaussian();
            }
        }
        store.push(&x)?;
    }
    Ok(store)
}
