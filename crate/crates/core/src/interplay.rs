//! Feedback from the relational layer onto the molecules.
//!
//! Each step the most frequent cluster size is sampled. If that cluster
//! mixes active and inactive molecules within `[theta_a, 1 - theta_a]`, the
//! whole population is pushed towards the minority activity: every molecule
//! independently, with probability `p_coh`, takes the value `h(r_a)`.

use std::collections::BTreeMap;

use rand::distributions::{Bernoulli, Distribution};
use serde::Serialize;
use thiserror::Error;

use crate::params::{RatioMode, SimParams};
use crate::sim::SimState;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterplayOutcome {
    pub mode_size: usize,
    pub representative: usize,
    pub r_a: f64,
    pub kicked: bool,
    /// `h(r_a)`: the activity the kick drives molecules to.
    pub target_value: bool,
    pub flips: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("active ratio {r_a} lies outside the mixed band [{theta_a}, {}]", 1.0 - theta_a)]
pub struct OutOfBand {
    pub r_a: f64,
    pub theta_a: f64,
}

/// Step function: active iff the ratio is below one half.
pub fn h(x: f64) -> bool {
    x < 0.5
}

pub fn in_mixed_band(r_a: f64, theta_a: f64) -> bool {
    theta_a <= r_a && r_a <= 1.0 - theta_a
}

/// Most frequent cluster size (smallest size on ties) and the lowest-index
/// cluster of that size.
pub fn modal_cluster(state: &SimState) -> (usize, usize) {
    let mut freq: BTreeMap<usize, usize> = BTreeMap::new();
    for &size in &state.c0 {
        *freq.entry(size).or_default() += 1;
    }
    let mut best = (0usize, 0usize);
    for (&size, &count) in &freq {
        if count > best.1 {
            best = (size, count);
        }
    }
    let mode_size = best.0;
    let representative = state
        .c0
        .iter()
        .position(|&s| s == mode_size)
        .expect("mode size comes from an existing cluster");
    (mode_size, representative)
}

pub fn active_ratio(state: &SimState, cluster: usize) -> f64 {
    state.active_ratio(cluster)
}

/// Active ratio pooled over every cluster of the given size.
pub fn pooled_ratio(state: &SimState, size: usize) -> f64 {
    let (active, total) = state
        .c0
        .iter()
        .zip(&state.c1)
        .filter(|(&s, _)| s == size)
        .fold((0usize, 0usize), |(a, t), (&s, &c1)| (a + c1, t + s));
    active as f64 / total as f64
}

/// Sets each molecule to `h(r_a)` with probability `p_coh`. Returns the
/// number of molecules whose activity changed.
pub fn coherence_kick(
    state: &mut SimState,
    r_a: f64,
    theta_a: f64,
    p_coh: f64,
) -> Result<usize, OutOfBand> {
    if !in_mixed_band(r_a, theta_a) {
        return Err(OutOfBand { r_a, theta_a });
    }
    let target = h(r_a);
    let coin = Bernoulli::new(p_coh.clamp(0.0, 1.0)).expect("clamped probability");
    let mut changed = 0;
    for k in 0..state.n_molecules() {
        if coin.sample(state.rng()) && state.m1[k] != target {
            state.m1[k] = target;
            changed += 1;
        }
    }
    if changed > 0 {
        state.recount_activity();
    }
    Ok(changed)
}

/// Full interplay sequence for one step.
pub fn run(state: &mut SimState, params: &SimParams) -> InterplayOutcome {
    let (mode_size, representative) = modal_cluster(state);
    let r_a = match params.ratio_mode {
        RatioMode::Representative => active_ratio(state, representative),
        RatioMode::Pooled => pooled_ratio(state, mode_size),
    };
    let kicked = in_mixed_band(r_a, params.theta_a);
    let flips = if kicked {
        coherence_kick(state, r_a, params.theta_a, params.p_coh).expect("band checked above")
    } else {
        0
    };
    InterplayOutcome {
        mode_size,
        representative,
        r_a,
        kicked,
        target_value: h(r_a),
        flips,
    }
}
