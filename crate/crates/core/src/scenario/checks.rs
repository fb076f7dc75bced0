//! Pass/fail checks run by `--check` on the builtin scenarios.

use std::fmt;

use serde::Serialize;

use crate::analysis::{EventCounts, RunSeries, WaveEvent};
use crate::lattice::{Lattice, LawReport, Subset};

use super::run::{Grid, Outcome};
use super::ScenarioConfig;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

/// Whether the population stays aggregated after it first activates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LockIn {
    /// First step at which the cluster count reaches 1.
    pub first_activation_t: Option<u64>,
    /// Times the cluster count re-enters N after that step.
    pub returns_to_n: usize,
    pub last_return_t: Option<u64>,
    /// Activated at least once and never returned to N.
    pub locked: bool,
}

pub fn lock_in(series: &RunSeries) -> LockIn {
    let n = series.params.n_molecules;
    let cc = &series.cluster_count;
    let Some(first) = cc.iter().position(|&c| c == 1) else {
        return LockIn {
            first_activation_t: None,
            returns_to_n: 0,
            last_return_t: None,
            locked: false,
        };
    };
    let mut returns = 0;
    let mut last = None;
    for i in first + 1..cc.len() {
        if cc[i] == n && cc[i - 1] != n {
            returns += 1;
            last = Some(series.t[i]);
        }
    }
    LockIn {
        first_activation_t: Some(series.t[first]),
        returns_to_n: returns,
        last_return_t: last,
        locked: returns == 0,
    }
}

/// Cluster count alternates between visits to 1 and to N, and activity is
/// all-or-nothing: 0 while aggregating, N while fragmenting.
pub fn oscillation(series: &RunSeries) -> CheckResult {
    let n = series.params.n_molecules;
    let mut aggregating = true;
    let mut last_extreme: Option<usize> = None;
    let (mut ones, mut alternations_ok) = (0usize, true);
    for i in 0..series.len() {
        let (c, a) = (series.cluster_count[i], series.active_count[i]);
        if c == 1 || c == n {
            if last_extreme == Some(c) && (i == 0 || series.cluster_count[i - 1] != c) {
                alternations_ok = false;
            }
            if last_extreme != Some(c) && c == 1 {
                ones += 1;
            }
            last_extreme = Some(c);
            aggregating = c == n;
        }
        let expected = if aggregating { 0 } else { n };
        if a != expected {
            return CheckResult::new(
                "oscillation",
                false,
                format!(
                    "step {}: active {a}, expected {expected} (clusters {c})",
                    series.t[i]
                ),
            );
        }
    }
    let passed = alternations_ok && ones >= 1;
    CheckResult::new(
        "oscillation",
        passed,
        format!("{ones} full activations, strict alternation {alternations_ok}"),
    )
}

pub fn slope_band(slopes: &[f64], lo: f64, hi: f64) -> CheckResult {
    if slopes.is_empty() {
        return CheckResult::new("psd slope", false, "no slope could be fitted");
    }
    let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
    CheckResult::new(
        "psd slope",
        (lo..=hi).contains(&mean),
        format!(
            "mean slope {mean:.3} over {} run(s), band [{lo}, {hi}]",
            slopes.len()
        ),
    )
}

pub fn spikes(events: &[WaveEvent], n_molecules: usize, min_count: usize) -> CheckResult {
    let big: Vec<&WaveEvent> = events
        .iter()
        .filter(|e| e.is_spike() && e.amplitude >= 0.8 * n_molecules as f64)
        .collect();
    let c = EventCounts::tally(&big.iter().map(|e| **e).collect::<Vec<_>>());
    CheckResult::new(
        "spikes",
        big.len() >= min_count && c.spike_up > 0 && c.spike_down > 0,
        format!(
            "{} up, {} down (need {min_count} total, both directions)",
            c.spike_up, c.spike_down
        ),
    )
}

/// Sample-window length for the spike-dominance check.
const DOMINANCE_WINDOW: usize = 1_000;

/// Oscillation before the noise onset, then a sawtooth, then a spike, then
/// spikes outnumbering sawtooth events in every window of the last fifth.
pub fn ramp_order(series: &RunSeries, events: &[WaveEvent]) -> Vec<CheckResult> {
    let n = series.params.n_molecules;
    let onset = series
        .noise_trace
        .iter()
        .position(|&p| p > 0.0)
        .unwrap_or(series.len());
    let quiet = &series.cluster_count[..onset];
    let visits_both = quiet.contains(&1) && quiet.contains(&n);
    let early = events.iter().filter(|e| e.t_end < onset).count();
    let first_saw = events
        .iter()
        .filter(|e| !e.is_spike())
        .min_by_key(|e| e.t_end);
    let first_spike = events
        .iter()
        .filter(|e| e.is_spike())
        .min_by_key(|e| e.t_end);
    let t = |i: usize| series.t[i];

    let mut out = vec![CheckResult::new(
        "oscillation-only segment",
        onset < series.len() && visits_both && early == 0,
        format!(
            "noise starts at step {}; cycles before it {visits_both}; events completed before it {early}",
            t(onset.min(series.len() - 1))
        ),
    )];
    out.push(match (first_saw, first_spike) {
        (Some(s), Some(k)) => CheckResult::new(
            "sawtooth before spike",
            s.t_end <= k.t_start,
            format!(
                "first sawtooth ends at step {}, first spike starts at step {}",
                t(s.t_end),
                t(k.t_start)
            ),
        ),
        _ => CheckResult::new(
            "sawtooth before spike",
            false,
            format!(
                "first sawtooth {:?}, first spike {:?}",
                first_saw.map(|e| t(e.t_end)),
                first_spike.map(|e| t(e.t_start))
            ),
        ),
    });

    let tail_start = series.len() - series.len() / 5;
    let mut windows = Vec::new();
    let mut start = tail_start;
    while start < series.len() {
        let end = (start + DOMINANCE_WINDOW).min(series.len());
        let inside: Vec<WaveEvent> = events
            .iter()
            .filter(|e| (start..end).contains(&e.t_peak))
            .copied()
            .collect();
        windows.push((start, EventCounts::tally(&inside)));
        start = end;
    }
    let failing: Vec<String> = windows
        .iter()
        .filter(|(_, c)| c.spikes() <= c.sawtooth)
        .map(|(s, c)| {
            format!(
                "step {}: {} spikes vs {} sawtooth",
                t(*s),
                c.spikes(),
                c.sawtooth
            )
        })
        .collect();
    out.push(CheckResult::new(
        "spike dominance to the end",
        failing.is_empty() && !windows.is_empty(),
        if failing.is_empty() {
            format!("{} windows from step {}", windows.len(), t(tail_start))
        } else {
            failing.join("; ")
        },
    ));
    out
}

fn point(grid: &Grid, noise: f64) -> Option<&super::run::GridPoint> {
    grid.points
        .iter()
        .find(|p| (p.noise_p - noise).abs() <= 1e-12 * noise.max(1e-300))
}

/// Regime orderings across the noise grid.
pub fn regimes(grid: &Grid) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let missing =
        |name: &str, v: f64| CheckResult::new(name, false, format!("grid lacks noise {v}"));
    out.push(match point(grid, 0.0) {
        Some(p) => {
            let events: usize = p.runs.iter().map(|r| r.events.total()).sum();
            let cycling = p.runs.iter().all(|r| r.lock_in.returns_to_n > 0);
            CheckResult::new(
                "noise 0: pure oscillation",
                events == 0 && cycling,
                format!(
                    "{events} events over {} runs; every run cycles {cycling}",
                    p.runs.len()
                ),
            )
        }
        None => missing("noise 0: pure oscillation", 0.0),
    });
    out.push(match point(grid, 1e-6) {
        Some(p) => {
            let locked = p.runs.iter().filter(|r| r.lock_in.locked).count();
            let returns: Vec<usize> = p.runs.iter().map(|r| r.lock_in.returns_to_n).collect();
            CheckResult::new(
                "noise 1e-6: lock-in",
                locked == p.runs.len(),
                format!("{locked}/{} runs never return to N after first activation; returns per run {returns:?}", p.runs.len()),
            )
        }
        None => missing("noise 1e-6: lock-in", 1e-6),
    });
    out.push(match point(grid, 5e-3) {
        Some(p) => CheckResult::new(
            "noise 5e-3: sawtooth dominant",
            p.sawtooth_fraction > p.spike_fraction,
            format!(
                "sawtooth {:.3} vs spike {:.3} ({} events)",
                p.sawtooth_fraction,
                p.spike_fraction,
                p.sawtooth + p.spike_up + p.spike_down
            ),
        ),
        None => missing("noise 5e-3: sawtooth dominant", 5e-3),
    });
    out.push(match (point(grid, 5e-2), point(grid, 5e-3)) {
        (Some(hi), Some(lo)) => CheckResult::new(
            "noise 5e-2: spike dominant",
            hi.spike_fraction > hi.sawtooth_fraction && hi.spike_fraction > lo.spike_fraction,
            format!(
                "spike {:.3} vs sawtooth {:.3}; spike fraction at 5e-3 {:.3}",
                hi.spike_fraction, hi.sawtooth_fraction, lo.spike_fraction
            ),
        ),
        _ => missing("noise 5e-2: spike dominant", 5e-2),
    });
    out
}

fn idx(one_based: &[usize]) -> Subset {
    Subset::from_indices(one_based.iter().map(|i| i - 1))
}

fn shared_check(report: &LawReport, expected: &[Subset]) -> CheckResult {
    let got: Vec<String> = report.shared.iter().map(ToString::to_string).collect();
    CheckResult::new(
        "shared elements",
        report.shared == expected,
        format!("[{}]", got.join(", ")),
    )
}

/// Checks for the two-block relation with filled off-diagonal blocks.
pub fn two_block_lattice(lattice: &Lattice, report: &LawReport) -> Vec<CheckResult> {
    vec![
        CheckResult::new(
            "element count",
            lattice.len() == 30,
            format!("{} elements", lattice.len()),
        ),
        shared_check(report, &[lattice.bottom(), lattice.top()]),
        CheckResult::new(
            "non-distributive",
            !report.distributive && report.witness.is_some(),
            format!(
                "witness {:?}",
                report.witness.map(|w| w.map(|s| s.to_string()))
            ),
        ),
        CheckResult::new(
            "orthomodular",
            report.orthomodular,
            report.orthocomplement.to_string(),
        ),
    ]
}

/// Checks for the three-block worked example with an overlapping class.
pub fn overlap_lattice(lattice: &Lattice, report: &LawReport) -> Vec<CheckResult> {
    let top = lattice.top();
    let mut out = Vec::new();
    if let Some(rel) = lattice.relation() {
        let cases = [
            (idx(&[1]), idx(&[1])),
            (idx(&[3]), idx(&[3])),
            (idx(&[1, 2]), idx(&[1, 2, 4, 5])),
            (idx(&[1, 6]), top),
        ];
        for (x, want) in cases {
            let got = rel.closure(x);
            out.push(CheckResult::new(
                format!("closure {x}"),
                got == want,
                format!("{got} (expected {want})"),
            ));
        }
    } else {
        out.push(CheckResult::new(
            "closures",
            false,
            "lattice has no relation",
        ));
    }
    out.push(shared_check(
        report,
        &[Subset::EMPTY, idx(&[3]), idx(&[1, 2, 4, 5]), top],
    ));
    out
}

/// Checks matching the builtin `cfg.name`; other scenarios get none.
pub fn scenario_checks(cfg: &ScenarioConfig, outcome: &Outcome) -> Vec<CheckResult> {
    match (cfg.name.as_str(), outcome) {
        ("fig9a", Outcome::Sim(run)) => vec![oscillation(&run.series)],
        ("fig9b" | "fig10", Outcome::Sim(run)) => {
            let slopes: Vec<f64> = run
                .summary
                .analysis
                .psd_slope
                .iter()
                .map(|f| f.slope)
                .collect();
            vec![slope_band(&slopes, -1.35, -0.65)]
        }
        ("fig9c", Outcome::Sim(run)) => {
            vec![spikes(&run.events, run.series.params.n_molecules, 10)]
        }
        ("fig11", Outcome::Sweep(grid)) => regimes(grid),
        ("fig12", Outcome::Sim(run)) => ramp_order(&run.series, &run.events),
        ("fig5-lattice", Outcome::Lattice { lattice, report }) => {
            two_block_lattice(lattice, report)
        }
        ("fig4-lattice", Outcome::Lattice { lattice, report }) => overlap_lattice(lattice, report),
        _ => Vec::new(),
    }
}
