use proptest::prelude::*;

use opencomp::params::{NoiseSchedule, RatioMode, SimParams};
use opencomp::sim::{Boundary, SimState};

fn params_strategy() -> impl Strategy<Value = SimParams> {
    (
        2usize..=48,
        0.0..=1.0f64,
        0.0..=1.0f64,
        0.0..=0.3f64,
        0.0..=0.5f64,
        0.0..=1.0f64,
        any::<bool>(),
        any::<bool>(),
        any::<u64>(),
    )
        .prop_map(
            |(n, tc, td, p, ta, pc, interplay, pooled, seed)| SimParams {
                n_molecules: n,
                theta_c: tc,
                theta_dec: td,
                noise: NoiseSchedule::constant(p),
                theta_a: ta,
                p_coh: pc,
                interplay_enabled: interplay,
                ratio_mode: if pooled {
                    RatioMode::Pooled
                } else {
                    RatioMode::Representative
                },
                max_steps: 200,
                seed,
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn invariants_hold_after_every_step(params in params_strategy()) {
        let mut state = SimState::new(&params).unwrap();
        for _ in 0..params.max_steps {
            let report = state.step(&params);
            let violations = state.audit();
            prop_assert!(violations.is_empty(), "t={} {:?}", report.t, violations);
            let c = state.c_max();
            prop_assert!((1..=params.n_molecules).contains(&c));
            prop_assert!(state.active_count() <= params.n_molecules);
            prop_assert_eq!(state.c0.iter().sum::<usize>(), params.n_molecules);
        }
    }

    #[test]
    fn same_seed_same_trajectory(params in params_strategy()) {
        let mut a = SimState::new(&params).unwrap();
        let mut b = SimState::new(&params).unwrap();
        for _ in 0..params.max_steps {
            prop_assert_eq!(a.step(&params), b.step(&params));
        }
        prop_assert_eq!(a, b);
    }

    #[test]
    fn noise_free_boundaries_match_activity(params in params_strategy()) {
        let params = SimParams { noise: NoiseSchedule::constant(0.0), interplay_enabled: false, ..params };
        let mut state = SimState::new(&params).unwrap();
        for _ in 0..params.max_steps {
            let report = state.step(&params);
            match report.boundary {
                Boundary::AllActivated => prop_assert_eq!(state.active_count(), params.n_molecules),
                Boundary::AllInactivated => prop_assert_eq!(state.active_count(), 0),
                Boundary::None => {}
            }
        }
    }
}

#[test]
fn starts_fully_split_and_inactive() {
    let params = SimParams::default();
    let state = SimState::new(&params).unwrap();
    assert_eq!(state.c_max(), params.n_molecules);
    assert_eq!(state.active_count(), 0);
}

#[test]
fn invalid_parameters_are_rejected() {
    for bad in [
        SimParams {
            n_molecules: 0,
            ..SimParams::default()
        },
        SimParams {
            theta_c: 1.5,
            ..SimParams::default()
        },
        SimParams {
            theta_a: 0.7,
            ..SimParams::default()
        },
        SimParams {
            noise: NoiseSchedule::constant(-0.1),
            ..SimParams::default()
        },
    ] {
        assert!(SimState::new(&bad).is_err(), "{bad:?}");
    }
}
