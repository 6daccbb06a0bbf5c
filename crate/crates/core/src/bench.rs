//! Repetition/median benchmark protocol and CSV output.
//!
//! Each repetition spawns fresh ranks, initializes untimed, then times every
//! kernel of the simulation loop into per-category buckets. A repetition's
//! category time is the maximum over ranks; the summary reports the median,
//! min and max of those over repetitions.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::grid::{self, VorticityConfig, VorticityRank};
use crate::nbody::{self, NBodyConfig, NBodyRank};
use crate::portability::Backend;
use crate::timing::{Clock, KernelTimer};
use crate::transport::{spawn_ranks, TopologyKind};
use crate::vtk::{nbody_dataset, vorticity_dataset, write_vtk};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum App {
    Nbody,
    Vorticity,
}

impl App {
    pub fn name(self) -> &'static str {
        match self {
            App::Nbody => "nbody",
            App::Vorticity => "vorticity",
        }
    }

    /// Timing buckets in reporting order.
    pub fn categories(self) -> &'static [&'static str] {
        match self {
            App::Nbody => &nbody::CATEGORIES,
            App::Vorticity => &grid::CATEGORIES,
        }
    }
}

impl fmt::Display for App {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Total time of one category on one rank in one repetition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRecord {
    pub app: App,
    pub category: String,
    pub rep: usize,
    pub rank: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategorySummary {
    pub app: App,
    pub category: String,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSummary {
    pub rows: Vec<CategorySummary>,
}

/// Median with the even-count convention of averaging the two central values.
/// `NaN` for an empty sample.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}

impl BenchSummary {
    /// Aggregates raw records: max over ranks within each repetition, then
    /// median/min/max over repetitions. Rows follow each app's bucket order,
    /// unknown categories last in first-seen order.
    pub fn from_records(records: &[TimingRecord]) -> Self {
        let mut keys: Vec<(App, String)> = Vec::new();
        for r in records {
            if !keys.iter().any(|(a, c)| *a == r.app && *c == r.category) {
                keys.push((r.app, r.category.clone()));
            }
        }
        let rank_of = |(app, cat): &(App, String)| {
            app.categories()
                .iter()
                .position(|c| c == cat)
                .unwrap_or(usize::MAX)
        };
        keys.sort_by_key(|k| (k.0.name(), rank_of(k)));
        let rows = keys
            .into_iter()
            .map(|(app, category)| {
                let mut per_rep: Vec<(usize, f64)> = Vec::new();
                for r in records.iter().filter(|r| r.app == app && r.category == category) {
                    match per_rep.iter_mut().find(|(rep, _)| *rep == r.rep) {
                        Some((_, t)) => *t = t.max(r.seconds),
                        None => per_rep.push((r.rep, r.seconds)),
                    }
                }
                let samples: Vec<f64> = per_rep.into_iter().map(|(_, t)| t).collect();
                CategorySummary {
                    app,
                    category,
                    median: median(&samples),
                    min: samples.iter().copied().fold(f64::INFINITY, f64::min),
                    max: samples.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                }
            })
            .collect();
        Self { rows }
    }

    pub fn get(&self, category: &str) -> Option<&CategorySummary> {
        self.rows.iter().find(|r| r.category == category)
    }
}

impl fmt::Display for BenchSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<10} {:<14} {:>12} {:>12} {:>12}", "app", "category", "median[s]", "min[s]", "max[s]")?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<10} {:<14} {:>12.6} {:>12.6} {:>12.6}",
                r.app.name(),
                r.category,
                r.median,
                r.min,
                r.max
            )?;
        }
        Ok(())
    }
}

/// `out.csv` -> `out.summary.csv`
pub fn summary_path(raw: &Path) -> PathBuf {
    let stem = raw.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    raw.with_file_name(format!("{stem}.summary.csv"))
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error {
    let path = path.to_path_buf();
    move |source| Error::Csv { path, source }
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for row in rows {
        w.serialize(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize().collect::<Result<_, _>>().map_err(csv_err(path))
}

/// Writes the raw records to `path` and the summary to its `.summary.csv`
/// sibling. Returns the summary path.
pub fn write_csv(records: &[TimingRecord], summary: &BenchSummary, path: &Path) -> Result<PathBuf> {
    write_rows(path, records)?;
    let sp = summary_path(path);
    write_rows(&sp, &summary.rows)?;
    Ok(sp)
}

pub fn read_records(path: &Path) -> Result<Vec<TimingRecord>> {
    read_rows(path)
}

pub fn read_summary(path: &Path) -> Result<Vec<CategorySummary>> {
    read_rows(path)
}

#[derive(Debug, Clone, PartialEq)]
pub enum AppConfig {
    Nbody(NBodyConfig),
    Vorticity(VorticityConfig),
}

impl AppConfig {
    pub fn app(&self) -> App {
        match self {
            AppConfig::Nbody(_) => App::Nbody,
            AppConfig::Vorticity(_) => App::Vorticity,
        }
    }

    /// Checks the configuration against a rank count.
    pub fn validate(&self, ranks: usize) -> Result<()> {
        match self {
            AppConfig::Nbody(c) => c.validate(ranks),
            AppConfig::Vorticity(c) => {
                c.validate()?;
                let dims = crate::transport::dims_create(ranks, 2);
                if dims[0] > c.nx || dims[1] > c.ny {
                    return Err(Error::Config(format!(
                        "{ranks} ranks ({}x{}) exceed the {}x{} grid",
                        dims[0], dims[1], c.nx, c.ny
                    )));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub app: AppConfig,
    pub reps: usize,
    pub ranks: usize,
    pub backend: Backend,
    /// Per-rank VTK files of the final step go here when set.
    pub vtk_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FinalState {
    Nbody(Vec<NBodyRank>),
    Vorticity(Vec<VorticityRank>),
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub records: Vec<TimingRecord>,
    pub summary: BenchSummary,
    /// Whole simulation-loop time, indexed `[rep][rank]`.
    pub loop_seconds: Vec<Vec<f64>>,
    /// Rank states after the last repetition.
    pub final_state: FinalState,
    pub vtk_files: Vec<PathBuf>,
}

struct LoopTiming {
    totals: Vec<(String, f64)>,
    loop_seconds: f64,
    vtk: Option<PathBuf>,
}

/// Runs `cfg.reps` repetitions of the configured miniapp on `cfg.ranks`
/// ranks, timing with `clock`.
pub fn run_benchmark(cfg: &BenchConfig, clock: Arc<dyn Clock>) -> Result<BenchReport> {
    if cfg.reps == 0 || cfg.ranks == 0 {
        return Err(Error::Config("reps and ranks must be at least 1".into()));
    }
    cfg.app.validate(cfg.ranks)?;
    let app = cfg.app.app();
    let backend = &cfg.backend;
    let vtk_dir = cfg.vtk_dir.as_deref();
    let mut records = Vec::new();
    let mut loop_seconds = Vec::new();
    let mut vtk_files = Vec::new();
    let mut final_state = None;
    for rep in 0..cfg.reps {
        let mut collect = |runs: Vec<LoopTiming>| {
            let mut loops = Vec::new();
            vtk_files.clear();
            for (rank, run) in runs.into_iter().enumerate() {
                for (category, seconds) in run.totals {
                    records.push(TimingRecord { app, category, rep, rank, seconds });
                }
                loops.push(run.loop_seconds);
                vtk_files.extend(run.vtk);
            }
            loop_seconds.push(loops);
        };
        match &cfg.app {
            AppConfig::Nbody(c) => {
                let runs = spawn_ranks(cfg.ranks, TopologyKind::Ring1D, |comm| {
                    let mut state = NBodyRank::new(c, comm, backend)?;
                    timed_loop(&clock, backend, c.steps, &mut state, |s, timer| {
                        s.step(c, comm, backend, timer)?;
                        Ok(())
                    }, |s, timer| match vtk_dir {
                        Some(dir) => timer
                            .time(backend, nbody::OTHER_OPS, || {
                                let rank = comm.rank().get();
                                write_vtk(&nbody_dataset(&s.particles, rank, s.steps_done), "nbody", rank, s.steps_done, dir)
                            })
                            .map(Some),
                        None => Ok(None),
                    })
                    .map(|r| (r, state))
                })?;
                let (runs, states): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
                collect(runs);
                final_state = Some(FinalState::Nbody(states));
            }
            AppConfig::Vorticity(c) => {
                let runs = spawn_ranks(cfg.ranks, TopologyKind::Grid2D, |comm| {
                    let mut state = VorticityRank::new(c, comm)?;
                    timed_loop(&clock, backend, c.steps, &mut state, |s, timer| {
                        s.step(c, comm, backend, timer)
                    }, |s, timer| match vtk_dir {
                        Some(dir) => timer
                            .time(backend, grid::OTHER_OPS, || {
                                write_vtk(&vorticity_dataset(s, c), "vorticity", comm.rank().get(), s.steps_done, dir)
                            })
                            .map(Some),
                        None => Ok(None),
                    })
                    .map(|r| (r, state))
                })?;
                let (runs, states): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
                collect(runs);
                final_state = Some(FinalState::Vorticity(states));
            }
        }
    }
    let summary = BenchSummary::from_records(&records);
    Ok(BenchReport {
        records,
        summary,
        loop_seconds,
        final_state: final_state.expect("reps >= 1"),
        vtk_files,
    })
}

/// Times the simulation loop of one rank. Initialization happened before
/// this is called and is never on the clock.
fn timed_loop<S>(
    clock: &Arc<dyn Clock>,
    backend: &Backend,
    steps: usize,
    state: &mut S,
    mut step: impl FnMut(&mut S, &mut KernelTimer) -> Result<()>,
    output: impl FnOnce(&S, &mut KernelTimer) -> Result<Option<PathBuf>>,
) -> Result<LoopTiming> {
    let mut timer = KernelTimer::new(Arc::clone(clock));
    let start = clock.now();
    for _ in 0..steps {
        step(state, &mut timer)?;
    }
    let vtk = output(state, &mut timer)?;
    backend.synchronize();
    let loop_seconds = clock.now() - start;
    Ok(LoopTiming {
        totals: timer.totals().to_vec(),
        loop_seconds,
        vtk,
    })
}
