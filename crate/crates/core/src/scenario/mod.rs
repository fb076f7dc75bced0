//! Scenario configs, builtin parameter sets, runners and artifact output.

mod builtins;
pub mod checks;
mod config;
mod run;

pub use builtins::{builtin, BUILTIN_NAMES, RAMP_ONSET, RAMP_RATE, RAMP_STEPS, SWEEP_GRID};
pub use config::{parse_config, parse_config_str, ScenarioConfig, ScenarioKind};
pub use run::{
    derive_seed, events_csv, execute, hex_digest, load_relation, run_scenario, run_sweep,
    series_csv, simulate, Artifact, Grid, GridPoint, LatticeSummary, Manifest, Outcome, RunSummary,
    ScenarioOutput, SimRun, SweepRun,
};
