//! Spike and sawtooth detection on a count trace.
//!
//! The trace is first cut into *jumps*: transitions of at least
//! `min_amplitude` completed within `rise_window` steps. Each jump is timed
//! by the step at which it crosses half of `min_amplitude`. Consecutive
//! jumps delimit plateaus, and events are read off the plateau pattern:
//!
//! * spike: a jump answered by an opposite jump after at most `fall_window`
//!   steps, where that short plateau is also strictly shorter than the
//!   plateaus on either side (it is the excursion, not the baseline);
//! * sawtooth: a jump followed by a plateau longer than `fall_window` during
//!   which the trace gives back at least `relax_fraction` of the jump;
//! * anything else (for instance a flat plateau between two switches) is a
//!   level change, not an event.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    SpikeUp,
    SpikeDown,
    Sawtooth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Up => 1.0,
            Direction::Down => -1.0,
        }
    }

    fn flip(self) -> Self {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveEvent {
    pub kind: EventKind,
    pub direction: Direction,
    pub t_start: usize,
    pub t_peak: usize,
    pub t_end: usize,
    pub amplitude: f64,
}

impl WaveEvent {
    pub fn is_spike(&self) -> bool {
        matches!(self.kind, EventKind::SpikeUp | EventKind::SpikeDown)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    pub rise_window: usize,
    pub fall_window: usize,
    pub min_amplitude: f64,
    #[serde(default = "default_relax")]
    pub relax_fraction: f64,
}

fn default_relax() -> f64 {
    0.25
}

impl DetectorConfig {
    /// Thresholds used for population traces: 25-step windows and an
    /// amplitude of 80% of the population.
    pub fn for_population(n_molecules: usize) -> Self {
        DetectorConfig {
            rise_window: 25,
            fall_window: 25,
            min_amplitude: 0.8 * n_molecules as f64,
            relax_fraction: default_relax(),
        }
    }
}

/// A fast transition of at least `min_amplitude`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub direction: Direction,
    /// Last extreme before the transition.
    pub start: usize,
    /// First step past the half-amplitude level.
    pub cross: usize,
    /// Extreme reached after the transition.
    pub end: usize,
    pub amplitude: f64,
}

pub fn find_jumps(x: &[f64], rise_window: usize, min_amplitude: f64) -> Vec<Jump> {
    let n = x.len();
    let mut jumps = Vec::new();
    let mut floor = 0;
    let mut t = 1;
    while t < n {
        let lo = floor.max(t.saturating_sub(rise_window));
        let (mut min_i, mut max_i) = (lo, lo);
        for j in lo..t {
            if x[j] <= x[min_i] {
                min_i = j;
            }
            if x[j] >= x[max_i] {
                max_i = j;
            }
        }
        let up = x[t] - x[min_i];
        let down = x[max_i] - x[t];
        let pick = match (up >= min_amplitude, down >= min_amplitude) {
            (false, false) => None,
            (true, false) => Some((Direction::Up, min_i)),
            (false, true) => Some((Direction::Down, max_i)),
            (true, true) => {
                if up > down || (up == down && min_i > max_i) {
                    Some((Direction::Up, min_i))
                } else {
                    Some((Direction::Down, max_i))
                }
            }
        };
        let Some((direction, start)) = pick else {
            t += 1;
            continue;
        };
        let s = direction.sign();
        let mid = s * x[start] + min_amplitude / 2.0;
        let cross = (start + 1..=t)
            .find(|&k| s * x[k] >= mid)
            .expect("x[t] is past the midpoint");
        let mut end = t;
        let mut k = t + 1;
        while k < n && k <= t + rise_window && s * x[k] >= mid {
            if s * x[k] > s * x[end] {
                end = k;
            }
            k += 1;
        }
        jumps.push(Jump {
            direction,
            start,
            cross,
            end,
            amplitude: s * (x[end] - x[start]),
        });
        floor = end;
        t = end + 1;
    }
    jumps
}

pub fn detect_events(x: &[f64], cfg: &DetectorConfig) -> Vec<WaveEvent> {
    let jumps = find_jumps(x, cfg.rise_window, cfg.min_amplitude);
    let m = jumps.len();
    // Plateau after jump k, cross to cross; `None` when open-ended.
    let plateau =
        |k: usize| -> Option<usize> { (k + 1 < m).then(|| jumps[k + 1].cross - jumps[k].cross) };
    let shorter = |len: usize, other: Option<usize>| other.is_none_or(|o| len < o);

    let mut events = Vec::new();
    let mut k = 0;
    while k < m {
        let jump = jumps[k];
        let before = if k == 0 { None } else { plateau(k - 1) };
        if let Some(len) = plateau(k) {
            let ret = jumps[k + 1];
            if ret.direction == jump.direction.flip()
                && len <= cfg.fall_window
                && shorter(len, before)
                && shorter(len, plateau(k + 1))
            {
                events.push(WaveEvent {
                    kind: match jump.direction {
                        Direction::Up => EventKind::SpikeUp,
                        Direction::Down => EventKind::SpikeDown,
                    },
                    direction: jump.direction,
                    t_start: jump.start,
                    t_peak: jump.end,
                    t_end: ret.end,
                    amplitude: jump.amplitude,
                });
                k += 2;
                continue;
            }
        }

        let (span, plateau_end) = match plateau(k) {
            Some(len) => (len, jumps[k + 1].start),
            None => (x.len() - 1 - jump.cross, x.len() - 1),
        };
        if span > cfg.fall_window && plateau_end > jump.end {
            let s = jump.direction.sign();
            let mut low = jump.end;
            for j in jump.end..=plateau_end {
                if s * x[j] < s * x[low] {
                    low = j;
                }
            }
            let relax = s * (x[jump.end] - x[low]);
            if relax > 0.0 && relax >= cfg.relax_fraction * jump.amplitude {
                events.push(WaveEvent {
                    kind: EventKind::Sawtooth,
                    direction: jump.direction,
                    t_start: jump.start,
                    t_peak: jump.end,
                    t_end: low,
                    amplitude: jump.amplitude,
                });
            }
        }
        k += 1;
    }
    events
}
