use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{psd, summarize, DetectorConfig, EventCounts, RunSeries, Summary, WaveEvent};
use crate::error::{Error, Result};
use crate::lattice::{law_report, parse_generator_spec, to_dot, Lattice, LawReport, Relation};
use crate::params::{NoiseSchedule, SimParams};
use crate::sim::SimState;

use super::checks::{lock_in, LockIn};
use super::{ScenarioConfig, ScenarioKind};

/// One written file and its SHA-256 digest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    /// Path relative to the output directory, `/`-separated.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub scenario: String,
    pub kind: ScenarioKind,
    pub files: Vec<Artifact>,
}

struct Writer {
    root: PathBuf,
    files: Vec<Artifact>,
}

impl Writer {
    fn new(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|source| Error::Io {
            path: root.to_path_buf(),
            source,
        })?;
        Ok(Writer {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, rel: &str, contents: &[u8]) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|source| Error::Io {
                path: dir.to_path_buf(),
                source,
            })?;
        }
        fs::write(&path, contents).map_err(|source| Error::Io { path, source })?;
        self.files.push(Artifact {
            path: rel.to_string(),
            bytes: contents.len() as u64,
            sha256: hex_digest(contents),
        });
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).expect("artifact types serialize");
        text.push('\n');
        self.write(rel, text.as_bytes())
    }

    fn finish(mut self, cfg: &ScenarioConfig) -> Result<Manifest> {
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = Manifest {
            scenario: cfg.name.clone(),
            kind: cfg.kind,
            files: self.files.clone(),
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        let path = self.root.join("manifest.json");
        fs::write(&path, text).map_err(|source| Error::Io { path, source })?;
        Ok(manifest)
    }
}

pub fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Runs `burn_in` unrecorded steps, then records `params.max_steps` steps.
/// Fails if the state is inconsistent at the end.
pub fn simulate(params: &SimParams, burn_in: u64) -> Result<RunSeries> {
    let mut state = SimState::new(params)?;
    for _ in 0..burn_in {
        state.step(params);
    }
    let mut series = RunSeries::with_capacity(params.clone(), params.max_steps as usize);
    for _ in 0..params.max_steps {
        let r = state.step(params);
        series.push(r.t, state.c_max(), state.active_count(), r.noise_p);
    }
    let violations = state.audit();
    if !violations.is_empty() {
        return Err(Error::Audit(
            violations.iter().map(ToString::to_string).collect(),
        ));
    }
    Ok(series)
}

/// Contents of `summary.json` for simulation runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    pub kind: ScenarioKind,
    pub seed: u64,
    pub burn_in: u64,
    pub steps: u64,
    pub record_every: usize,
    pub detector: DetectorConfig,
    pub final_cluster_count: usize,
    pub final_active_count: usize,
    /// Step at which the first event of each class completes.
    pub first_event_t: Option<u64>,
    pub first_sawtooth_t: Option<u64>,
    pub first_spike_t: Option<u64>,
    pub lock_in: LockIn,
    pub analysis: Summary,
}

/// A finished simulation run with its detected events.
#[derive(Debug, Clone)]
pub struct SimRun {
    pub series: RunSeries,
    pub events: Vec<WaveEvent>,
    pub summary: RunSummary,
}

/// Simulates, detects events and summarises, without touching the disk.
pub fn execute(cfg: &ScenarioConfig, params: &SimParams) -> Result<SimRun> {
    let series = simulate(params, cfg.burn_in)?;
    let detector = cfg.detector_config();
    let events = series.detect(&detector);
    let band = cfg.spectrum_config();
    let spectrum = psd(&series.trace(band.trace)).ok();
    let analysis = summarize(&series, &events, spectrum.as_ref(), &band);
    let step_of = |pred: &dyn Fn(&WaveEvent) -> bool| {
        events
            .iter()
            .filter(|e| pred(e))
            .map(|e| series.t[e.t_end])
            .min()
    };
    let summary = RunSummary {
        scenario: cfg.name.clone(),
        kind: cfg.kind,
        seed: params.seed,
        burn_in: cfg.burn_in,
        steps: params.max_steps,
        record_every: cfg.record_every,
        detector,
        final_cluster_count: series
            .cluster_count
            .last()
            .copied()
            .unwrap_or(params.n_molecules),
        final_active_count: series.active_count.last().copied().unwrap_or(0),
        first_event_t: step_of(&|_| true),
        first_sawtooth_t: step_of(&|e| !e.is_spike()),
        first_spike_t: step_of(&|e| e.is_spike()),
        lock_in: lock_in(&series),
        analysis,
    };
    Ok(SimRun {
        series,
        events,
        summary,
    })
}

pub fn series_csv(series: &RunSeries, record_every: usize) -> String {
    let mut out = String::from("t,cluster_count,active_count,noise_p\n");
    for i in (0..series.len()).step_by(record_every.max(1)) {
        out.push_str(&format!(
            "{},{},{},{}\n",
            series.t[i], series.cluster_count[i], series.active_count[i], series.noise_trace[i]
        ));
    }
    out
}

pub fn events_csv(series: &RunSeries, events: &[WaveEvent]) -> String {
    let mut out = String::from("kind,direction,t_start,t_peak,t_end,amplitude\n");
    for e in events {
        let kind = serde_json::to_value(e.kind).expect("enum serializes");
        let dir = serde_json::to_value(e.direction).expect("enum serializes");
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            kind.as_str().unwrap_or_default(),
            dir.as_str().unwrap_or_default(),
            series.t[e.t_start],
            series.t[e.t_peak],
            series.t[e.t_end],
            e.amplitude
        ));
    }
    out
}

fn write_run(w: &mut Writer, prefix: &str, run: &SimRun, record_every: usize) -> Result<()> {
    w.write(
        &format!("{prefix}series.csv"),
        series_csv(&run.series, record_every).as_bytes(),
    )?;
    w.write(
        &format!("{prefix}events.csv"),
        events_csv(&run.series, &run.events).as_bytes(),
    )?;
    w.write_json(&format!("{prefix}summary.json"), &run.summary)
}

/// Per-run record kept by sweeps, which drop the full series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRun {
    pub dir: String,
    pub seed: u64,
    pub events: EventCounts,
    pub lock_in: LockIn,
    pub psd_slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint {
    pub index: usize,
    pub noise_p: f64,
    pub spike_up: usize,
    pub spike_down: usize,
    pub sawtooth: usize,
    pub spike_fraction: f64,
    pub sawtooth_fraction: f64,
    pub runs: Vec<SweepRun>,
}

/// Contents of `grid.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    pub scenario: String,
    pub master_seed: u64,
    pub seeds_per_value: usize,
    pub steps: u64,
    pub points: Vec<GridPoint>,
}

/// Contents of `summary.json` for lattice runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeSummary {
    pub scenario: String,
    pub relation_source: String,
    pub rows: usize,
    pub cols: usize,
    pub relation: Vec<String>,
    pub elements: usize,
    pub atoms: usize,
    pub covers: usize,
    pub height: usize,
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Sim(Box<SimRun>),
    Sweep(Grid),
    Lattice {
        lattice: Lattice,
        report: Box<LawReport>,
    },
}

#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub manifest: Manifest,
    pub outcome: Outcome,
}

/// Executes a validated scenario and writes its artifacts to
/// `cfg.output_dir()`, finishing with `manifest.json`.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    cfg.validate()?;
    match cfg.kind {
        ScenarioKind::Single | ScenarioKind::Ramp => {
            let run = execute(cfg, &cfg.sim_params())?;
            let mut w = Writer::new(&cfg.output_dir())?;
            write_run(&mut w, "", &run, cfg.record_every)?;
            Ok(ScenarioOutput {
                manifest: w.finish(cfg)?,
                outcome: Outcome::Sim(Box::new(run)),
            })
        }
        ScenarioKind::Sweep => run_sweep(cfg, 1),
        ScenarioKind::Lattice => run_lattice(cfg),
    }
}

/// splitmix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for sub-run `index` of a sweep. Depends only on the master seed
/// and the index, so extending a grid leaves earlier runs untouched.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(master ^ mix64(index.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

/// Runs every `(value, replicate)` pair, using up to `jobs` threads.
pub fn run_sweep(cfg: &ScenarioConfig, jobs: usize) -> Result<ScenarioOutput> {
    cfg.validate()?;
    let values = cfg
        .sweep_values
        .clone()
        .ok_or_else(|| crate::error::ConfigError::MissingField("sweep_values".into()))?;
    let reps = cfg.seeds_per_value.unwrap_or(1);
    let base = cfg.sim_params();
    let tasks: Vec<(usize, usize)> = (0..values.len())
        .flat_map(|v| (0..reps).map(move |r| (v, r)))
        .collect();

    let run_task = |&(v, r): &(usize, usize)| -> Result<(SweepRun, Vec<Artifact>)> {
        let params = SimParams {
            noise: NoiseSchedule::constant(values[v]),
            seed: derive_seed(derive_seed(base.seed, v as u64), r as u64),
            ..base.clone()
        };
        let run = execute(cfg, &params)?;
        let dir = format!("v{v:02}_r{r:02}");
        let mut w = Writer::new(&cfg.output_dir().join(&dir))?;
        write_run(&mut w, "", &run, cfg.record_every)?;
        let files = w
            .files
            .into_iter()
            .map(|a| Artifact {
                path: format!("{dir}/{}", a.path),
                ..a
            })
            .collect();
        Ok((
            SweepRun {
                dir,
                seed: params.seed,
                events: run.summary.analysis.events,
                lock_in: run.summary.lock_in,
                psd_slope: run.summary.analysis.psd_slope.map(|f| f.slope),
            },
            files,
        ))
    };

    let jobs = jobs.clamp(1, tasks.len().max(1));
    let results: Vec<Result<(SweepRun, Vec<Artifact>)>> = if jobs == 1 {
        tasks.iter().map(run_task).collect()
    } else {
        let chunk = tasks.len().div_ceil(jobs);
        std::thread::scope(|scope| {
            let handles: Vec<_> = tasks
                .chunks(chunk)
                .map(|part| scope.spawn(move || part.iter().map(run_task).collect::<Vec<_>>()))
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("sweep worker panicked"))
                .collect()
        })
    };

    let mut w = Writer::new(&cfg.output_dir())?;
    let mut points: Vec<GridPoint> = values
        .iter()
        .enumerate()
        .map(|(index, &noise_p)| GridPoint {
            index,
            noise_p,
            spike_up: 0,
            spike_down: 0,
            sawtooth: 0,
            spike_fraction: 0.0,
            sawtooth_fraction: 0.0,
            runs: Vec::new(),
        })
        .collect();
    for (&(v, _), res) in tasks.iter().zip(results) {
        let (run, files) = res?;
        w.files.extend(files);
        let p = &mut points[v];
        p.spike_up += run.events.spike_up;
        p.spike_down += run.events.spike_down;
        p.sawtooth += run.events.sawtooth;
        p.runs.push(run);
    }
    for p in &mut points {
        let c = EventCounts {
            spike_up: p.spike_up,
            spike_down: p.spike_down,
            sawtooth: p.sawtooth,
        };
        p.spike_fraction = c.spike_fraction();
        p.sawtooth_fraction = c.sawtooth_fraction();
    }
    let grid = Grid {
        scenario: cfg.name.clone(),
        master_seed: base.seed,
        seeds_per_value: reps,
        steps: base.max_steps,
        points,
    };
    w.write_json("grid.json", &grid)?;
    Ok(ScenarioOutput {
        manifest: w.finish(cfg)?,
        outcome: Outcome::Sweep(grid),
    })
}

/// Reads a relation from a generator spec or a file path.
pub fn load_relation(source: &str) -> Result<Relation> {
    if let Some(rel) = parse_generator_spec(source) {
        return Ok(rel?);
    }
    let text = fs::read_to_string(source).map_err(|source_err| Error::Io {
        path: PathBuf::from(source),
        source: source_err,
    })?;
    Ok(Relation::parse(&text)?)
}

fn run_lattice(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let source = cfg
        .relation_source
        .as_deref()
        .ok_or_else(|| crate::error::ConfigError::MissingField("relation_source".into()))?;
    let rel = load_relation(source)?;
    let lattice = Lattice::enumerate(&rel)?;
    let report = law_report(&lattice)?;
    let summary = LatticeSummary {
        scenario: cfg.name.clone(),
        relation_source: source.to_string(),
        rows: rel.n_rows(),
        cols: rel.n_cols(),
        relation: rel.to_string().lines().map(str::to_string).collect(),
        elements: lattice.len(),
        atoms: lattice.atoms().len(),
        covers: lattice.covers().len(),
        height: lattice.heights().into_iter().max().unwrap_or(0),
    };
    let mut w = Writer::new(&cfg.output_dir())?;
    w.write("lattice.dot", to_dot(&lattice).as_bytes())?;
    w.write_json("laws.json", &report)?;
    w.write_json("summary.json", &summary)?;
    Ok(ScenarioOutput {
        manifest: w.finish(cfg)?,
        outcome: Outcome::Lattice {
            lattice,
            report: Box::new(report),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_derivation_is_stable_and_spread() {
        assert_eq!(derive_seed(7, 3), derive_seed(7, 3));
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| derive_seed(7, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(derive_seed(7, 0), derive_seed(8, 0));
    }

    #[test]
    fn csv_thinning() {
        let mut s = RunSeries::new(SimParams::default());
        for t in 1..=5 {
            s.push(t, 200, 0, 0.0);
        }
        let csv = series_csv(&s, 2);
        assert_eq!(
            csv,
            "t,cluster_count,active_count,noise_p\n1,200,0,0\n3,200,0,0\n5,200,0,0\n"
        );
    }

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            hex_digest(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
