use crate::params::{NoiseSchedule, SimParams};

use super::{ScenarioConfig, ScenarioKind};

pub const BUILTIN_NAMES: [&str; 8] = [
    "fig9a",
    "fig9b",
    "fig9c",
    "fig10",
    "fig11",
    "fig12",
    "fig5-lattice",
    "fig4-lattice",
];

/// Noise levels of the regime sweep.
pub const SWEEP_GRID: [f64; 6] = [0.0, 1e-6, 5e-4, 5e-3, 7.5e-3, 5e-2];

/// Ramp start and slope of `fig12`: 0 to 0.05 over 20 000 steps.
pub const RAMP_ONSET: u64 = 5_000;
pub const RAMP_RATE: f64 = 2.5e-6;
pub const RAMP_STEPS: u64 = 25_000;

fn sim(noise: f64, interplay: bool, max_steps: u64) -> SimParams {
    SimParams {
        noise: NoiseSchedule::constant(noise),
        interplay_enabled: interplay,
        theta_a: 0.3,
        p_coh: 0.95,
        max_steps,
        seed: 1,
        ..SimParams::default()
    }
}

fn single(name: &str, params: SimParams) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(name, ScenarioKind::Single);
    cfg.sim = Some(params);
    cfg
}

fn lattice(name: &str, generator: &str) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(name, ScenarioKind::Lattice);
    cfg.relation_source = Some(generator.into());
    cfg
}

/// Pinned parameter set for a named scenario.
pub fn builtin(name: &str) -> Option<ScenarioConfig> {
    let cfg = match name {
        "fig9a" => single(name, sim(0.0, false, 100_000)),
        "fig9b" => single(name, sim(0.05, false, 100_000)),
        "fig9c" => single(name, sim(0.05, true, 100_000)),
        "fig10" => {
            let mut cfg = single(name, sim(0.05, false, 1 << 16));
            cfg.burn_in = 1_000;
            cfg
        }
        "fig11" => {
            let mut cfg = ScenarioConfig::new(name, ScenarioKind::Sweep);
            cfg.sim = Some(sim(0.0, true, 100_000));
            cfg.sweep_values = Some(SWEEP_GRID.to_vec());
            cfg.seeds_per_value = Some(5);
            cfg.record_every = 10;
            cfg
        }
        "fig12" => {
            let mut cfg = ScenarioConfig::new(name, ScenarioKind::Ramp);
            cfg.sim = Some(sim(0.0, true, RAMP_STEPS));
            cfg.ramp = Some(NoiseSchedule::Ramp {
                p0: 0.0,
                rate: RAMP_RATE,
                onset_step: RAMP_ONSET,
            });
            cfg
        }
        "fig5-lattice" => lattice(name, "blocks=4,4;fill"),
        "fig4-lattice" => lattice(name, "blocks=3,3,2;overlap=3;fill"),
        _ => return None,
    };
    Some(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_is_valid() {
        for name in BUILTIN_NAMES {
            let cfg = builtin(name).unwrap();
            assert_eq!(cfg.name, name);
            cfg.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(builtin("fig13").is_none());
    }

    #[test]
    fn ramp_traverses_to_five_percent() {
        let p = builtin("fig12").unwrap().sim_params();
        assert_eq!(p.noise.at(RAMP_ONSET - 1), 0.0);
        assert!((p.noise.at(RAMP_STEPS) - 0.05).abs() < 1e-12);
        assert!(p.interplay_enabled);
    }
}
