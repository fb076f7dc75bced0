use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{DetectorConfig, SpectrumConfig};
use crate::error::ConfigError;
use crate::params::{NoiseSchedule, SimParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Single,
    Sweep,
    Ramp,
    Lattice,
}

/// One scenario file. Kind-specific fields must be present exactly when the
/// kind needs them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub kind: ScenarioKind,
    /// Simulation constants; omitted fields take their defaults.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimParams>,
    /// Constant noise levels, one sub-run group per value (sweep only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_values: Option<Vec<f64>>,
    /// Independent seeds per sweep value; defaults to 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds_per_value: Option<usize>,
    /// Noise schedule replacing `sim.noise` (ramp only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp: Option<NoiseSchedule>,
    /// Relation file path or generator spec such as `blocks=4,4;fill` (lattice only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation_source: Option<String>,
    /// Defaults to `out/<name>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    /// Steps simulated before recording starts.
    #[serde(default)]
    pub burn_in: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumConfig>,
    /// Defaults to 25-step windows and an amplitude of 80% of the population.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detector: Option<DetectorConfig>,
}

fn default_record_every() -> usize {
    1
}

impl ScenarioConfig {
    /// Bare config of the given kind with every optional field unset.
    pub fn new(name: impl Into<String>, kind: ScenarioKind) -> Self {
        ScenarioConfig {
            name: name.into(),
            kind,
            sim: None,
            sweep_values: None,
            seeds_per_value: None,
            ramp: None,
            relation_source: None,
            output_dir: None,
            record_every: 1,
            burn_in: 0,
            spectrum: None,
            detector: None,
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .unwrap_or_else(|| Path::new("out").join(&self.name))
    }

    /// Simulation constants with the ramp schedule applied.
    pub fn sim_params(&self) -> SimParams {
        let mut p = self.sim.clone().unwrap_or_default();
        if let Some(ramp) = self.ramp {
            p.noise = ramp;
        }
        p
    }

    pub fn spectrum_config(&self) -> SpectrumConfig {
        self.spectrum.unwrap_or_default()
    }

    pub fn detector_config(&self) -> DetectorConfig {
        self.detector
            .unwrap_or_else(|| DetectorConfig::for_population(self.sim_params().n_molecules))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        use ScenarioKind::*;
        if self.name.trim().is_empty() {
            return Err(ConfigError::invalid("name", "must not be empty"));
        }
        if self.record_every == 0 {
            return Err(ConfigError::invalid("record_every", "must be positive"));
        }
        let is_sim = self.kind != Lattice;
        let presence = [
            (
                "sweep_values",
                self.sweep_values.is_some(),
                self.kind == Sweep,
            ),
            (
                "seeds_per_value",
                self.seeds_per_value.is_some(),
                self.kind == Sweep,
            ),
            ("ramp", self.ramp.is_some(), self.kind == Ramp),
            (
                "relation_source",
                self.relation_source.is_some(),
                self.kind == Lattice,
            ),
            ("sim", self.sim.is_some(), is_sim),
            ("spectrum", self.spectrum.is_some(), is_sim),
            ("detector", self.detector.is_some(), is_sim),
            ("burn_in", self.burn_in > 0, is_sim),
        ];
        for (field, present, allowed) in presence {
            if present && !allowed {
                return Err(ConfigError::invalid(
                    field,
                    format!("not used by `{}` scenarios", kind_name(self.kind)),
                ));
            }
        }
        let required = match self.kind {
            Sweep => Some(("sweep_values", self.sweep_values.is_some())),
            Ramp => Some(("ramp", self.ramp.is_some())),
            Lattice => Some(("relation_source", self.relation_source.is_some())),
            Single => None,
        };
        if let Some((field, false)) = required {
            return Err(ConfigError::MissingField(field.into()));
        }
        if !is_sim {
            return Ok(());
        }

        self.sim_params().validate().map_err(|e| match e {
            ConfigError::Invalid { field, reason } => ConfigError::Invalid {
                field: if self.ramp.is_some() && field.starts_with("noise.") {
                    field.replacen("noise", "ramp", 1)
                } else {
                    format!("sim.{field}")
                },
                reason,
            },
            other => other,
        })?;
        if let Some(values) = &self.sweep_values {
            if values.is_empty() {
                return Err(ConfigError::invalid("sweep_values", "must not be empty"));
            }
            if let Some(i) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
                return Err(ConfigError::invalid(
                    format!("sweep_values[{i}]"),
                    "must lie in [0, 1]",
                ));
            }
        }
        if self.seeds_per_value == Some(0) {
            return Err(ConfigError::invalid("seeds_per_value", "must be positive"));
        }
        if let Some(ramp) = self.ramp {
            if !matches!(ramp, NoiseSchedule::Ramp { .. }) {
                return Err(ConfigError::invalid("ramp.kind", "must be `ramp`"));
            }
        }
        let spec = self.spectrum_config();
        if !(spec.f_lo > 0.0 && spec.f_lo < spec.f_hi && spec.f_hi <= 0.5) {
            return Err(ConfigError::invalid(
                "spectrum",
                "need 0 < f_lo < f_hi <= 0.5",
            ));
        }
        let det = self.detector_config();
        if det.rise_window == 0 || det.fall_window == 0 {
            return Err(ConfigError::invalid(
                "detector",
                "windows must be at least 1",
            ));
        }
        if det.min_amplitude.is_nan() || det.min_amplitude < 1.0 {
            return Err(ConfigError::invalid(
                "detector.min_amplitude",
                "must be at least 1",
            ));
        }
        if !(0.0..=1.0).contains(&det.relax_fraction) || det.relax_fraction == 0.0 {
            return Err(ConfigError::invalid(
                "detector.relax_fraction",
                "must lie in (0, 1]",
            ));
        }
        Ok(())
    }
}

fn kind_name(kind: ScenarioKind) -> &'static str {
    match kind {
        ScenarioKind::Single => "single",
        ScenarioKind::Sweep => "sweep",
        ScenarioKind::Ramp => "ramp",
        ScenarioKind::Lattice => "lattice",
    }
}

/// Strict JSON parse followed by validation. `origin` names the source in
/// error messages.
pub fn parse_config_str(text: &str, origin: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let cfg: ScenarioConfig = serde_path_to_error::deserialize(&mut de).map_err(|err| {
        let field = err.path().to_string();
        let inner = err.into_inner();
        let full = inner.to_string();
        let message = full
            .rsplit_once(" at line ")
            .map_or(full.as_str(), |(m, _)| m)
            .to_string();
        ConfigError::Parse {
            path: origin.to_string(),
            line: inner.line(),
            column: inner.column(),
            message: if field == "." {
                message
            } else {
                format!("at `{field}`: {message}")
            },
        }
    })?;
    de.end().map_err(|e| ConfigError::Parse {
        path: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: "trailing characters after the config object".into(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<ScenarioConfig, crate::error::Error> {
    let text = std::fs::read_to_string(path).map_err(|source| crate::error::Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_config_str(&text, &path.display().to_string())?)
}
