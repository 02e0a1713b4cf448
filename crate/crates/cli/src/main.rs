use std::path::PathBuf;
use std::process::ExitCode;

use adaptive_pca::data::{ByteOrder, ElementType, Generator, RawOptions};
use adaptive_pca_cli::{
    compare_dataset, counters_dataset, eigenfunctions_dataset, parse_seeds, parse_shape,
    run_synth_dump, Dataset, DatasetSpec, DumpFormat, ExperimentConfig, FileFormat, Mode,
};
use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

/// Adaptive PCA experiments: explained-variance comparisons against batch
/// PCA, time-dependent eigenfunctions and dot-product counters.
#[derive(Parser, Debug)]
#[command(name = "adaptive-pca", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write curves.csv, gap.txt and meta.json
    Compare(RunArgs),
    /// Write eigenfunctions.csv
    Eigenfunctions {
        #[command(flatten)]
        run: RunArgs,
        /// One-based component indices, e.g. 1,5,10 (default: all)
        #[arg(long, value_delimiter = ',')]
        components: Option<Vec<usize>>,
    },
    /// Write counters.csv
    Counters(RunArgs),
    /// Write a dataset as one file per time-step
    SynthDump {
        #[command(flatten)]
        data: DataArgs,
        /// raw-u8, raw-u16, raw-f32, raw-f64, pgm8 or pgm16
        #[arg(long, default_value = "raw-f32")]
        format: String,
        /// Byte order of raw output
        #[arg(long, default_value = "little")]
        out_byte_order: String,
        #[arg(long, default_value = "dump")]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct DataArgs {
    /// Synthetic generator: lowrank, traveling_wave, rotating_blob, cascade
    #[arg(long)]
    synth: Option<String>,
    /// Dimension of a synthetic time-step
    #[arg(long)]
    d: Option<usize>,
    /// Number of synthetic time-steps
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    speed: Option<f64>,
    #[arg(long)]
    decay: Option<f64>,
    #[arg(long)]
    blob_width: Option<f64>,
    #[arg(long)]
    orbit_radius: Option<f64>,
    #[arg(long)]
    period: Option<f64>,
    /// Generator seed
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Glob pattern of headerless volumes, taken in lexicographic order
    #[arg(long)]
    volumes: Option<String>,
    /// Directory of PGM frames, taken in lexicographic order
    #[arg(long)]
    frames_dir: Option<PathBuf>,
    /// File listing one input path per line, in time order
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Volume extents, fastest axis first, e.g. 432x432x432
    #[arg(long)]
    shape: Option<String>,
    /// Volume element type: u8, u16, f32 or f64
    #[arg(long)]
    dtype: Option<String>,
    #[arg(long, default_value = "little")]
    byte_order: String,
    /// Keep integer voxel values instead of scaling them to [0, 1]
    #[arg(long)]
    raw_values: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    data: DataArgs,
    /// batch, adaptive-full, adaptive-limited, adaptive-stochastic or oja
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    space_limit: Option<usize>,
    #[arg(long)]
    processing_limit: Option<usize>,
    /// Number of stochastic runs (seeds 1..=runs unless --seeds is given)
    #[arg(long)]
    runs: Option<usize>,
    /// Stochastic seeds: 1..10 (inclusive), 1..=10 or 3,5,8
    #[arg(long)]
    seeds: Option<String>,
    /// Mean-center the data before analysis
    #[arg(long)]
    centered: bool,
    /// Skip Gram-Schmidt re-orthogonalization of the adaptive components
    #[arg(long)]
    no_reorthogonalize: bool,
    /// Oja learning rate
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl DataArgs {
    fn spec(&self) -> anyhow::Result<DatasetSpec> {
        let chosen = [
            self.synth.is_some(),
            self.volumes.is_some(),
            self.frames_dir.is_some(),
            self.manifest.is_some(),
        ];
        if chosen.iter().filter(|&&c| c).count() != 1 {
            bail!("give exactly one of --synth, --volumes, --frames-dir, --manifest");
        }
        if let Some(name) = &self.synth {
            let generator: Generator = name.parse()?;
            let mut params = generator.default_params();
            params.rank = self.rank.unwrap_or(params.rank);
            params.sigma = self.sigma.unwrap_or(params.sigma);
            params.speed = self.speed.unwrap_or(params.speed);
            params.decay = self.decay.unwrap_or(params.decay);
            params.blob_width = self.blob_width.unwrap_or(params.blob_width);
            params.orbit_radius = self.orbit_radius.unwrap_or(params.orbit_radius);
            params.period = self.period.unwrap_or(params.period);
            return Ok(DatasetSpec::Synthetic {
                generator,
                dim: self.d.context("--synth needs --d")?,
                steps: self.n.context("--synth needs --n")?,
                params,
                seed: self.seed,
            });
        }
        if let Some(dir) = &self.frames_dir {
            return Ok(DatasetSpec::Frames { dir: dir.clone() });
        }
        let raw = match (&self.shape, &self.dtype) {
            (Some(shape), Some(dtype)) => {
                let mut opts = RawOptions::new(parse_shape(shape)?, dtype.parse::<ElementType>()?);
                opts.byte_order = self.byte_order.parse()?;
                opts.raw_values = self.raw_values;
                Some(opts)
            }
            (None, None) => None,
            _ => bail!("--shape and --dtype go together"),
        };
        if let Some(pattern) = &self.volumes {
            let options = raw.context("--volumes needs --shape and --dtype")?;
            return Ok(DatasetSpec::Volumes {
                pattern: pattern.clone(),
                options,
            });
        }
        let path = self.manifest.clone().expect("one source is set");
        let format = raw.map_or(FileFormat::Pgm, FileFormat::Raw);
        Ok(DatasetSpec::Manifest { path, format })
    }

    fn load(&self) -> anyhow::Result<Dataset> {
        let data = self.spec()?.load().context("loading dataset")?;
        let files = data.files();
        if !files.is_empty() {
            eprintln!("time order ({} files):", files.len());
            let show = |i: usize| eprintln!("  {:>5} {}", i + 1, files[i].display());
            if files.len() <= 10 {
                (0..files.len()).for_each(show);
            } else {
                (0..5).for_each(show);
                eprintln!("  ...");
                (files.len() - 5..files.len()).for_each(show);
            }
        }
        Ok(data)
    }
}

impl RunArgs {
    fn config(&self, dataset: DatasetSpec) -> anyhow::Result<ExperimentConfig> {
        let mut c = ExperimentConfig::new(dataset, &self.out);
        c.mode = self.mode.as_deref().map(str::parse::<Mode>).transpose()?;
        c.space_limit = self.space_limit;
        c.processing_limit = self.processing_limit;
        c.runs = self.runs;
        c.seeds = self.seeds.as_deref().map(parse_seeds).transpose()?;
        c.centered = self.centered;
        c.reorthogonalize = !self.no_reorthogonalize;
        c.learning_rate = self.learning_rate;
        Ok(c)
    }
}

fn parse_dump_format(format: &str, byte_order: &str) -> anyhow::Result<DumpFormat> {
    let byte_order: ByteOrder = byte_order.parse()?;
    Ok(match format {
        "pgm8" => DumpFormat::Pgm { maxval: 255 },
        "pgm16" => DumpFormat::Pgm { maxval: 65535 },
        other => match other.strip_prefix("raw-") {
            Some(t) => DumpFormat::Raw {
                element_type: t.parse()?,
                byte_order,
            },
            None => bail!("unknown dump format {other:?}"),
        },
    })
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Compare(args) => {
            let data = args.data.load()?;
            let config = args.config(args.data.spec()?)?;
            let report = compare_dataset(&config, &data)?;
            for g in &report.gaps {
                println!(
                    "{}-vs-{}: gap {:.4} pp over {} components",
                    g.left, g.right, g.gap_pp, g.compared
                );
                if g.truncated() {
                    println!(
                        "  note: {} has {} components, {} has {}",
                        g.left, g.left_len, g.right, g.right_len
                    );
                }
            }
            for (label, events) in &report.degenerate_events {
                if *events > 0 {
                    println!("{label}: {events} degenerate residuals dropped");
                }
            }
            for f in &report.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Eigenfunctions { run, components } => {
            let data = run.data.load()?;
            let config = run.config(run.data.spec()?)?;
            let summary = eigenfunctions_dataset(&config, &data, components.as_deref())?;
            summary
                .files
                .iter()
                .for_each(|f| println!("wrote {}", f.display()));
        }
        Command::Counters(args) => {
            let data = args.data.load()?;
            let config = args.config(args.data.spec()?)?;
            let summary = counters_dataset(&config, &data)?;
            summary
                .files
                .iter()
                .for_each(|f| println!("wrote {}", f.display()));
        }
        Command::SynthDump {
            data,
            format,
            out_byte_order,
            out,
        } => {
            let format = parse_dump_format(&format, &out_byte_order)?;
            let summary = run_synth_dump(&data.spec()?, &out, format)?;
            println!("wrote {} files to {}", summary.files.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
