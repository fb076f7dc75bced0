use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use opencomp::error::{ConfigError, Error};
use opencomp::scenario::{
    builtin, checks, parse_config, run_scenario, run_sweep, ScenarioConfig, ScenarioKind,
    ScenarioOutput, BUILTIN_NAMES,
};

/// Cluster/activity simulator with spectral, event and lattice analysis.
#[derive(Parser)]
#[command(name = "opencomp", version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a JSON config file or a builtin name.
    ///
    /// Builtins: fig9a, fig9b, fig9c, fig10, fig11, fig12, fig5-lattice,
    /// fig4-lattice. Config fields left out take their defaults
    /// (record_every = 1, burn_in = 0, output_dir = out/<name>, and the
    /// simulation defaults N = 200, theta_c = theta_dec = 0.5,
    /// theta_a = 0.3, p_coh = 0.95, no noise, no interplay, 100000 steps, seed 0).
    Run {
        target: String,
        #[command(flatten)]
        opts: Overrides,
    },
    /// Run a sweep config: one group of sub-runs per noise value.
    Sweep {
        target: String,
        #[command(flatten)]
        opts: Overrides,
        /// Worker threads for sub-runs.
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
    },
    /// Enumerate and check the lattice of a relation file or generator spec
    /// such as `blocks=3,3,2;overlap=3;fill`.
    Lattice {
        source: String,
        /// Output directory (default out/lattice).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exit with status 4 if a builtin check fails.
        #[arg(long)]
        check: bool,
    },
    /// List builtin scenario names.
    Builtins,
}

#[derive(Args)]
struct Overrides {
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Recorded steps per run.
    #[arg(long)]
    steps: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write every k-th sample to series.csv.
    #[arg(long)]
    record_every: Option<usize>,
    /// Evaluate the builtin's pass/fail checks; exit with status 4 on failure.
    #[arg(long)]
    check: bool,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

enum Failure {
    Config(String),
    Runtime(String),
    Check,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Config(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn load(target: &str) -> Result<ScenarioConfig, Failure> {
    let path = Path::new(target);
    if path.exists() {
        return Ok(parse_config(path)?);
    }
    builtin(target).ok_or_else(|| {
        Failure::Config(format!(
            "`{target}` is neither a config file nor a builtin ({})",
            BUILTIN_NAMES.join(", ")
        ))
    })
}

fn apply(cfg: &mut ScenarioConfig, o: &Overrides) -> Result<(), Failure> {
    if o.seed.is_some() || o.steps.is_some() {
        if cfg.kind == ScenarioKind::Lattice {
            return Err(
                ConfigError::invalid("--seed/--steps", "not used by lattice scenarios").into(),
            );
        }
        let sim = cfg.sim.get_or_insert_with(Default::default);
        if let Some(seed) = o.seed {
            sim.seed = seed;
        }
        if let Some(steps) = o.steps {
            sim.max_steps = steps;
        }
    }
    if let Some(k) = o.record_every {
        cfg.record_every = k;
    }
    if let Some(out) = &o.out {
        cfg.output_dir = Some(out.clone());
    }
    cfg.validate()?;
    Ok(())
}

fn report(cfg: &ScenarioConfig, out: &ScenarioOutput, check: bool) -> Result<(), Failure> {
    println!("scenario {} -> {}", cfg.name, cfg.output_dir().display());
    for f in &out.manifest.files {
        println!(
            "  {:<24} {:>10} bytes  sha256 {}",
            f.path, f.bytes, f.sha256
        );
    }
    if !check {
        return Ok(());
    }
    let results = checks::scenario_checks(cfg, &out.outcome);
    if results.is_empty() {
        println!("no checks defined for `{}`", cfg.name);
    }
    for r in &results {
        println!("{r}");
    }
    if results.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { target, opts } => {
            let mut cfg = load(&target)?;
            apply(&mut cfg, &opts)?;
            let out = if cfg.kind == ScenarioKind::Sweep {
                run_sweep(&cfg, default_jobs())?
            } else {
                run_scenario(&cfg)?
            };
            report(&cfg, &out, opts.check)
        }
        Command::Sweep { target, opts, jobs } => {
            let mut cfg = load(&target)?;
            if cfg.kind != ScenarioKind::Sweep {
                return Err(ConfigError::invalid(
                    "kind",
                    "the sweep command needs a `sweep` scenario",
                )
                .into());
            }
            apply(&mut cfg, &opts)?;
            let out = run_sweep(&cfg, jobs)?;
            report(&cfg, &out, opts.check)
        }
        Command::Lattice { source, out, check } => {
            let mut cfg = match builtin(&source) {
                Some(b) if b.kind == ScenarioKind::Lattice => b,
                _ => {
                    let mut c = ScenarioConfig::new("lattice", ScenarioKind::Lattice);
                    c.relation_source = Some(source);
                    c
                }
            };
            if out.is_some() {
                cfg.output_dir = out;
            }
            let result = run_scenario(&cfg)?;
            if let opencomp::scenario::Outcome::Lattice {
                lattice,
                report: laws,
            } = &result.outcome
            {
                println!(
                    "{} elements, distributive {}, orthomodular {}, {} blocks, shared [{}]",
                    lattice.len(),
                    laws.distributive,
                    laws.orthomodular,
                    laws.blocks.len(),
                    laws.shared
                        .iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join(", ")
                );
            }
            report(&cfg, &result, check)
        }
        Command::Builtins => {
            for name in BUILTIN_NAMES {
                let cfg = builtin(name).expect("listed builtin exists");
                println!(
                    "{name}\t{}",
                    serde_json::to_string(&cfg).expect("config serializes")
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Check) => {
            eprintln!("acceptance check failed");
            ExitCode::from(4)
        }
    }
}
