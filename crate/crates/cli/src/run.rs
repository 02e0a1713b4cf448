use std::borrow::Cow;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use adaptive_pca::data::{write_pgm, write_raw_volume, ByteOrder, ElementType, RawOptions, Source};
use adaptive_pca::{
    curve_gap, dual_pca, eigenfunctions, explained_variance, mean_curve, AdaptiveConfig,
    AdaptiveState, CurveSeries, EigenSpace, OjaState, PcaError, SampleStore, DEFAULT_RANK_TOL,
};
use serde_json::{json, Value};

use crate::output::{csv, format_value};
use crate::{CliError, Dataset, DatasetSpec, ExperimentConfig, Mode, OutputSet, Plan, Result};

/// One `curve_gap` between two labelled curves.
#[derive(Debug, Clone, PartialEq)]
pub struct GapEntry {
    pub left: String,
    pub right: String,
    /// Percentage points.
    pub gap_pp: f64,
    /// Length of the common prefix that was compared.
    pub compared: usize,
    pub left_len: usize,
    pub right_len: usize,
}

impl GapEntry {
    fn between(a: &CurveSeries, b: &CurveSeries) -> Self {
        Self {
            left: a.label.clone(),
            right: b.label.clone(),
            gap_pp: curve_gap(a, b),
            compared: a.len().min(b.len()),
            left_len: a.len(),
            right_len: b.len(),
        }
    }

    pub fn truncated(&self) -> bool {
        self.left_len != self.right_len
    }
}

/// Last value of each curve.
#[derive(Debug, Clone, PartialEq)]
pub struct FinalValues(pub Vec<(String, f64)>);

impl FinalValues {
    pub fn get(&self, label: &str) -> Option<f64> {
        self.0.iter().find(|(l, _)| l == label).map(|e| e.1)
    }
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub plan: Plan,
    /// `batch` first, then the mode-specific curves in CSV column order.
    pub curves: Vec<CurveSeries>,
    pub gaps: Vec<GapEntry>,
    pub finals: FinalValues,
    /// Dot products consumed by each adaptive run.
    pub counter_totals: Vec<(String, u64)>,
    pub degenerate_events: Vec<(String, usize)>,
    pub wall_time: Duration,
    pub files: Vec<PathBuf>,
}

impl CompareReport {
    pub fn curve(&self, label: &str) -> Option<&CurveSeries> {
        self.curves.iter().find(|c| c.label == label)
    }

    pub fn gap(&self, left: &str, right: &str) -> Option<&GapEntry> {
        self.gaps
            .iter()
            .find(|g| g.left == left && g.right == right)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub mode: Option<Mode>,
    pub files: Vec<PathBuf>,
}

struct Fitted {
    label: String,
    space: EigenSpace,
    counter_total: u64,
    per_step: Vec<(usize, u64)>,
    degenerate: usize,
}

fn fit_adaptive(
    stream: &SampleStore,
    cfg: AdaptiveConfig,
    centered: bool,
    label: String,
) -> Result<Fitted> {
    let state = AdaptiveState::from_store(stream, cfg)?;
    Ok(Fitted {
        label,
        space: state.eigen_space(centered),
        counter_total: state.counter().total(),
        per_step: state.counter().per_step().to_vec(),
        degenerate: state.degenerate_events().len(),
    })
}

fn fit_oja(stream: &SampleStore, learning_rate: f64, centered: bool) -> Result<Fitted> {
    if stream.count() < 2 {
        return Err(PcaError::InsufficientData {
            required: 2,
            actual: stream.count(),
        }
        .into());
    }
    let init: Vec<f64> = stream
        .sample(1)
        .iter()
        .zip(stream.sample(0))
        .map(|(b, a)| b - a)
        .collect();
    let mut oja = OjaState::new(&init, learning_rate)?;
    for x in stream.iter().skip(2) {
        oja.update(x)?;
    }
    Ok(Fitted {
        label: "oja".into(),
        space: EigenSpace::new(stream.dim(), vec![oja.component().to_vec()], centered)?,
        counter_total: 0,
        per_step: Vec::new(),
        degenerate: 0,
    })
}

/// Independent stochastic runs, spread over the available cores. Results come
/// back in seed order.
fn fit_stochastic(stream: &SampleStore, plan: &Plan) -> Result<Vec<Fitted>> {
    let workers = thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(plan.seeds.len());
    let chunk = plan.seeds.len().div_ceil(workers);
    let results: Vec<Result<Fitted>> = thread::scope(|s| {
        let handles: Vec<_> = plan
            .seeds
            .chunks(chunk)
            .map(|seeds| {
                s.spawn(move || {
                    seeds
                        .iter()
                        .map(|&seed| {
                            fit_adaptive(
                                stream,
                                plan.stochastic_config(seed),
                                plan.centered,
                                format!("stochastic_seed_{seed}"),
                            )
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("stochastic worker panicked"))
            .collect()
    });
    results.into_iter().collect()
}

fn stream_for<'a>(store: &'a SampleStore, plan: &Plan) -> Cow<'a, SampleStore> {
    if plan.centered {
        Cow::Owned(store.centered())
    } else {
        Cow::Borrowed(store)
    }
}

/// Loads the dataset and runs [`compare_dataset`].
pub fn run_compare(config: &ExperimentConfig) -> Result<CompareReport> {
    compare_dataset(config, &config.dataset.load()?)
}

/// Explained-variance curves of batch PCA and the configured mode, written
/// as `curves.csv`, `gap.txt` and `meta.json`.
pub fn compare_dataset(config: &ExperimentConfig, data: &Dataset) -> Result<CompareReport> {
    let start = Instant::now();
    let store = &data.store;
    let plan = config.resolve(store.dim(), store.count())?;
    let centered = plan.centered;
    let stream = stream_for(store, &plan);
    let curve_of = |f: &Fitted| -> Result<CurveSeries> {
        let mut c = explained_variance(&f.space, store, centered)?;
        c.label = f.label.clone();
        Ok(c)
    };

    let mut batch = explained_variance(
        &dual_pca(store, centered, DEFAULT_RANK_TOL)?,
        store,
        centered,
    )?;
    batch.label = "batch".into();
    let mut fitted = Vec::new();
    match plan.mode {
        Mode::Batch => {}
        Mode::Oja => fitted.push(fit_oja(&stream, plan.learning_rate, centered)?),
        Mode::AdaptiveFull | Mode::AdaptiveLimited => fitted.push(fit_adaptive(
            &stream,
            plan.deterministic_config(),
            centered,
            "adaptive".into(),
        )?),
        Mode::AdaptiveStochastic => {
            fitted.push(fit_adaptive(
                &stream,
                plan.deterministic_config(),
                centered,
                "adaptive".into(),
            )?);
            fitted.extend(fit_stochastic(&stream, &plan)?);
        }
    }

    let mut curves = vec![batch];
    for f in &fitted {
        curves.push(curve_of(f)?);
    }
    let mut gaps: Vec<GapEntry> = curves[1..]
        .iter()
        .map(|c| GapEntry::between(c, &curves[0]))
        .collect();
    if plan.mode == Mode::AdaptiveStochastic {
        let runs = &curves[2..];
        let len = runs.iter().map(CurveSeries::len).min().unwrap_or(0);
        let prefix: Vec<CurveSeries> = runs
            .iter()
            .map(|c| CurveSeries::new(c.label.clone(), c.values[..len].to_vec(), c.centered))
            .collect();
        let mut mean = mean_curve(&prefix)?;
        mean.label = "stochastic_mean".into();
        gaps.push(GapEntry::between(&mean, &curves[0]));
        for c in runs.iter().chain(std::iter::once(&mean)) {
            gaps.push(GapEntry::between(c, &curves[1]));
        }
        curves.push(mean);
    }
    let finals = FinalValues(
        curves
            .iter()
            .filter_map(|c| c.last().map(|v| (c.label.clone(), v)))
            .collect(),
    );
    let adaptive_runs = if plan.mode.is_adaptive() {
        &fitted[..]
    } else {
        &[]
    };
    let counter_totals = adaptive_runs
        .iter()
        .map(|f| (f.label.clone(), f.counter_total))
        .collect();
    let degenerate_events = adaptive_runs
        .iter()
        .map(|f| (f.label.clone(), f.degenerate))
        .collect();

    let mut report = CompareReport {
        plan,
        curves,
        gaps,
        finals,
        counter_totals,
        degenerate_events,
        wall_time: Duration::ZERO,
        files: Vec::new(),
    };
    let mut out = OutputSet::create(&config.output_dir)?;
    out.write("curves.csv", curves_csv(&report.curves))?;
    out.write("gap.txt", gap_text(&report))?;
    report.wall_time = start.elapsed();
    let meta = run_record(data, &report);
    out.write(
        "meta.json",
        serde_json::to_string_pretty(&meta).expect("json") + "\n",
    )?;
    report.files = out.commit();
    Ok(report)
}

fn curves_csv(curves: &[CurveSeries]) -> String {
    let mut header = vec!["component".to_string()];
    header.extend(curves.iter().map(|c| c.label.clone()));
    let rows_needed = curves.iter().map(CurveSeries::len).max().unwrap_or(0);
    let rows: Vec<Vec<Option<String>>> = (0..rows_needed)
        .map(|k| {
            let mut row = vec![Some((k + 1).to_string())];
            row.extend(
                curves
                    .iter()
                    .map(|c| c.values.get(k).map(|&v| format_value(v))),
            );
            row
        })
        .collect();
    csv(&header, &rows)
}

fn gap_text(report: &CompareReport) -> String {
    let mut s = String::from(
        "# largest pointwise curve difference, percentage points, over the common prefix\n",
    );
    s.push_str("comparison gap_pp compared left_len right_len\n");
    for g in &report.gaps {
        s.push_str(&format!(
            "{}-vs-{} {} {} {} {}{}\n",
            g.left,
            g.right,
            format_value(g.gap_pp),
            g.compared,
            g.left_len,
            g.right_len,
            if g.truncated() { " truncated" } else { "" }
        ));
    }
    s.push_str("# final curve values\n");
    for (label, v) in &report.finals.0 {
        s.push_str(&format!("final {label} {}\n", format_value(*v)));
    }
    if let (Some(mean), Some(det)) = (
        report.finals.get("stochastic_mean"),
        report.finals.get("adaptive"),
    ) {
        s.push_str(&format!(
            "final_difference_pp stochastic_mean-vs-adaptive {}\n",
            format_value((mean - det).abs() * 100.0)
        ));
    }
    s
}

fn limit_json(v: usize) -> Value {
    if v == usize::MAX {
        Value::Null
    } else {
        json!(v)
    }
}

fn dataset_json(data: &Dataset) -> Value {
    let m = &data.meta;
    let source = match &m.source {
        Source::Synthetic {
            generator,
            params,
            seed,
        } => {
            let params: serde_json::Map<String, Value> = params
                .describe(*generator)
                .into_iter()
                .map(|(k, v)| (k.to_string(), Value::String(v)))
                .collect();
            json!({ "generator": generator.name(), "seed": seed, "params": params })
        }
        Source::Files(files) => json!({
            "files": files.len(),
            "first": files.first().map(|p| p.display().to_string()),
            "last": files.last().map(|p| p.display().to_string()),
        }),
    };
    json!({
        "name": m.name,
        "shape": m.shape,
        "element_type": m.element_type.to_string(),
        "steps": m.steps,
        "source": source,
    })
}

fn run_record(data: &Dataset, report: &CompareReport) -> Value {
    let plan = &report.plan;
    let adaptive = plan.mode.is_adaptive();
    let counters: serde_json::Map<String, Value> = report
        .counter_totals
        .iter()
        .zip(&report.degenerate_events)
        .map(|((label, total), (_, events))| {
            (
                label.clone(),
                json!({ "dot_products": total, "degenerate_events": events }),
            )
        })
        .collect();
    let created = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    json!({
        "dataset": dataset_json(data),
        "config": {
            "mode": plan.mode.name(),
            "space_limit": if adaptive { limit_json(plan.space_limit) } else { Value::Null },
            "processing_limit": if adaptive { limit_json(plan.processing_limit) } else { Value::Null },
            "runs": plan.seeds.len(),
            "seeds": plan.seeds,
            "centered": plan.centered,
            "reorthogonalize": plan.reorthogonalize,
            "learning_rate": if plan.mode == Mode::Oja { json!(plan.learning_rate) } else { Value::Null },
        },
        "counters": counters,
        "final_values": report.finals.0.iter().map(|(l, v)| (l.clone(), json!(v))).collect::<serde_json::Map<_, _>>(),
        "wall_time_seconds": report.wall_time.as_secs_f64(),
        "created_unix_seconds": created,
    })
}

fn fitted_for(plan: &Plan, store: &SampleStore) -> Result<Fitted> {
    let stream = stream_for(store, plan);
    match plan.mode {
        Mode::Batch => Ok(Fitted {
            label: "batch".into(),
            space: dual_pca(store, plan.centered, DEFAULT_RANK_TOL)?,
            counter_total: 0,
            per_step: Vec::new(),
            degenerate: 0,
        }),
        Mode::Oja => fit_oja(&stream, plan.learning_rate, plan.centered),
        Mode::AdaptiveFull | Mode::AdaptiveLimited => fit_adaptive(
            &stream,
            plan.deterministic_config(),
            plan.centered,
            "adaptive".into(),
        ),
        // The first seed stands for the whole batch of runs.
        Mode::AdaptiveStochastic => fit_adaptive(
            &stream,
            plan.stochastic_config(plan.seeds[0]),
            plan.centered,
            format!("stochastic_seed_{}", plan.seeds[0]),
        ),
    }
}

pub fn run_eigenfunctions(
    config: &ExperimentConfig,
    components: Option<&[usize]>,
) -> Result<RunSummary> {
    eigenfunctions_dataset(config, &config.dataset.load()?, components)
}

/// Writes `eigenfunctions.csv` with `f_i(t) = ⟨v_i, x_t⟩` for the requested
/// one-based components (all of them when `None`), `t` counted from 1.
pub fn eigenfunctions_dataset(
    config: &ExperimentConfig,
    data: &Dataset,
    components: Option<&[usize]>,
) -> Result<RunSummary> {
    let plan = config.resolve(data.store.dim(), data.store.count())?;
    let fitted = fitted_for(&plan, &data.store)?;
    let count = fitted.space.len();
    let wanted: Vec<usize> = match components {
        Some([]) => return Err(CliError::Config("no components requested".into())),
        Some(c) => c.to_vec(),
        None => (1..=count).collect(),
    };
    if let Some(&index) = wanted.iter().find(|&&i| i == 0 || i > count) {
        return Err(PcaError::ComponentOutOfRange { index, count }.into());
    }
    let f = eigenfunctions(&fitted.space, &data.store)?;
    let mut header = vec!["t".to_string()];
    header.extend(wanted.iter().map(|i| format!("f_{i}")));
    let rows: Vec<Vec<Option<String>>> = (0..f.steps())
        .map(|t| {
            let mut row = vec![Some((t + 1).to_string())];
            row.extend(
                wanted
                    .iter()
                    .map(|&i| Some(format_value(f.function(i - 1)[t]))),
            );
            row
        })
        .collect();
    let mut out = OutputSet::create(&config.output_dir)?;
    out.write("eigenfunctions.csv", csv(&header, &rows))?;
    Ok(RunSummary {
        mode: Some(plan.mode),
        files: out.commit(),
    })
}

pub fn run_counters(config: &ExperimentConfig) -> Result<RunSummary> {
    counters_dataset(config, &config.dataset.load()?)
}

/// Writes `counters.csv`: dot products consumed by each ingest step, the
/// step being the one-based index of the newest sample. For the stochastic
/// mode the first seed's run is recorded.
pub fn counters_dataset(config: &ExperimentConfig, data: &Dataset) -> Result<RunSummary> {
    let plan = config.resolve(data.store.dim(), data.store.count())?;
    if !plan.mode.is_adaptive() {
        return Err(CliError::Config(format!(
            "counters need an adaptive mode, not {}",
            plan.mode
        )));
    }
    let fitted = fitted_for(&plan, &data.store)?;
    let header = vec!["step".to_string(), "dot_products".to_string()];
    let rows: Vec<Vec<Option<String>>> = fitted
        .per_step
        .iter()
        .map(|&(step, count)| vec![Some(step.to_string()), Some(count.to_string())])
        .collect();
    let mut out = OutputSet::create(&config.output_dir)?;
    out.write("counters.csv", csv(&header, &rows))?;
    Ok(RunSummary {
        mode: Some(plan.mode),
        files: out.commit(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DumpFormat {
    Raw {
        element_type: ElementType,
        byte_order: ByteOrder,
    },
    /// 16-bit when `maxval > 255`.
    Pgm { maxval: u16 },
}

/// Writes a dataset as one file per time-step plus `manifest.txt` (file order)
/// and `dump.json`. Integer outputs are min-max scaled over the whole dataset;
/// the affine map is recorded so values can be restored.
pub fn run_synth_dump(
    spec: &DatasetSpec,
    output_dir: &Path,
    format: DumpFormat,
) -> Result<RunSummary> {
    let data = spec.load()?;
    let store = &data.store;
    let integer = match format {
        DumpFormat::Raw { element_type, .. } => element_type.max_value().is_some(),
        DumpFormat::Pgm { .. } => true,
    };
    let (lo, hi) = store
        .as_flat()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let (offset, scale) = if integer {
        (lo, if hi > lo { hi - lo } else { 1.0 })
    } else {
        (0.0, 1.0)
    };
    let shape = &data.meta.shape;
    let (width, height) = match (format, shape.as_slice()) {
        (DumpFormat::Pgm { .. }, [w]) => (*w, 1),
        (DumpFormat::Pgm { .. }, [w, h]) => (*w, *h),
        (DumpFormat::Pgm { .. }, _) => {
            return Err(CliError::Config(format!(
                "PGM output needs a 1-D or 2-D shape, got {shape:?}"
            )))
        }
        _ => (0, 0),
    };
    if let DumpFormat::Pgm { maxval: 0 } = format {
        return Err(CliError::Config("PGM maxval must be positive".into()));
    }

    let digits = store.count().to_string().len().max(4);
    let ext = if matches!(format, DumpFormat::Pgm { .. }) {
        "pgm"
    } else {
        "raw"
    };
    let mut out = OutputSet::create(output_dir)?;
    let mut names = Vec::with_capacity(store.count());
    let mut scaled = vec![0.0; store.dim()];
    for (t, x) in store.iter().enumerate() {
        let name = format!("step_{t:0digits$}.{ext}");
        let path = out.reserve(&name);
        for (s, v) in scaled.iter_mut().zip(x) {
            *s = (v - offset) / scale;
        }
        match format {
            DumpFormat::Raw {
                element_type,
                byte_order,
            } => {
                let mut opts = RawOptions::new(shape.clone(), element_type);
                opts.byte_order = byte_order;
                write_raw_volume(&path, &scaled, &opts)?;
            }
            DumpFormat::Pgm { maxval } => write_pgm(&path, &scaled, width, height, maxval)?,
        }
        names.push(name);
    }
    out.write("manifest.txt", names.join("\n") + "\n")?;
    let element_type = match format {
        DumpFormat::Raw { element_type, .. } => element_type.to_string(),
        DumpFormat::Pgm { maxval } => if maxval > 255 { "u16" } else { "u8" }.to_string(),
    };
    let record = json!({
        "dataset": dataset_json(&data),
        "format": ext,
        "element_type": element_type,
        "byte_order": match format {
            DumpFormat::Raw { byte_order: ByteOrder::Big, .. } => "big",
            _ => "little",
        },
        // value = offset + scale * stored, with stored in [0, 1] for integer types
        "offset": offset,
        "scale": scale,
    });
    out.write(
        "dump.json",
        serde_json::to_string_pretty(&record).expect("json") + "\n",
    )?;
    Ok(RunSummary {
        mode: None,
        files: out.commit(),
    })
}
