//! Model constants and the noise schedule.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// Time-dependent per-molecule flip probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseSchedule {
    Constant {
        p0: f64,
    },
    /// Zero before `onset_step`, then `p0 + rate * (t - onset_step)`, clamped to 1.
    Ramp {
        p0: f64,
        rate: f64,
        onset_step: u64,
    },
}

impl NoiseSchedule {
    pub fn constant(p0: f64) -> Self {
        NoiseSchedule::Constant { p0 }
    }

    /// Probability applied at step `t`, always within `[0, 1]`.
    pub fn at(&self, t: u64) -> f64 {
        let p = match *self {
            NoiseSchedule::Constant { p0 } => p0,
            NoiseSchedule::Ramp {
                p0,
                rate,
                onset_step,
            } => {
                if t < onset_step {
                    0.0
                } else {
                    p0 + rate * (t - onset_step) as f64
                }
            }
        };
        p.clamp(0.0, 1.0)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match *self {
            NoiseSchedule::Constant { p0 } => check_unit("noise.p0", p0),
            NoiseSchedule::Ramp { p0, rate, .. } => {
                check_unit("noise.p0", p0)?;
                if !(rate.is_finite() && rate >= 0.0) {
                    return Err(ConfigError::invalid(
                        "noise.rate",
                        "must be finite and >= 0",
                    ));
                }
                Ok(())
            }
        }
    }
}

impl Default for NoiseSchedule {
    fn default() -> Self {
        NoiseSchedule::Constant { p0: 0.0 }
    }
}

/// How the active ratio of the modal cluster size is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioMode {
    /// Ratio of the lowest-index cluster of the modal size.
    Representative,
    /// Active fraction over all molecules in clusters of the modal size.
    #[default]
    Pooled,
}

/// All constants of one simulation run. Missing fields take their defaults
/// when deserialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimParams {
    pub n_molecules: usize,
    /// Clustering threshold: both clusters need an active ratio strictly below it.
    pub theta_c: f64,
    /// De-clustering threshold: the cluster needs an active ratio strictly above it.
    pub theta_dec: f64,
    pub noise: NoiseSchedule,
    /// Half-width of the mixed band `[theta_a, 1 - theta_a]` that triggers a coherence kick.
    pub theta_a: f64,
    pub p_coh: f64,
    pub interplay_enabled: bool,
    pub ratio_mode: RatioMode,
    pub max_steps: u64,
    pub seed: u64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            n_molecules: 200,
            theta_c: 0.5,
            theta_dec: 0.5,
            noise: NoiseSchedule::default(),
            theta_a: 0.3,
            p_coh: 0.95,
            interplay_enabled: false,
            ratio_mode: RatioMode::Pooled,
            max_steps: 100_000,
            seed: 0,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_molecules < 2 {
            return Err(ConfigError::invalid("n_molecules", "must be >= 2"));
        }
        check_unit("theta_c", self.theta_c)?;
        check_unit("theta_dec", self.theta_dec)?;
        check_unit("p_coh", self.p_coh)?;
        if !(0.0..=0.5).contains(&self.theta_a) {
            return Err(ConfigError::invalid("theta_a", "must lie in [0, 0.5]"));
        }
        if self.max_steps == 0 {
            return Err(ConfigError::invalid("max_steps", "must be positive"));
        }
        self.noise.validate()
    }
}

fn check_unit(field: &str, v: f64) -> Result<(), ConfigError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(ConfigError::invalid(field, "must lie in [0, 1]"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_schedule_ignores_time() {
        let s = NoiseSchedule::constant(0.05);
        assert_eq!(s.at(0), 0.05);
        assert_eq!(s.at(1_000_000), 0.05);
    }

    #[test]
    fn ramp_is_zero_before_onset() {
        let s = NoiseSchedule::Ramp {
            p0: 0.01,
            rate: 1e-3,
            onset_step: 1000,
        };
        assert_eq!(s.at(999), 0.0);
        assert_eq!(s.at(1000), 0.01);
    }

    #[test]
    fn ramp_is_linear_then_clamped() {
        let s = NoiseSchedule::Ramp {
            p0: 0.0,
            rate: 1e-6,
            onset_step: 0,
        };
        assert!((s.at(5000) - 0.005).abs() < 1e-15);
        let steep = NoiseSchedule::Ramp {
            p0: 0.5,
            rate: 0.1,
            onset_step: 0,
        };
        assert_eq!(steep.at(100), 1.0);
    }

    #[test]
    fn rejects_out_of_range_thresholds() {
        for p in [
            SimParams {
                theta_a: 0.6,
                ..SimParams::default()
            },
            SimParams {
                n_molecules: 1,
                ..SimParams::default()
            },
            SimParams {
                theta_c: -0.1,
                ..SimParams::default()
            },
        ] {
            assert!(p.validate().is_err());
        }
        assert!(SimParams::default().validate().is_ok());
    }
}
