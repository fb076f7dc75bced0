//! Spectra, event detection and run summaries.

pub mod events;
pub mod fft;
pub mod spectrum;

use serde::{Deserialize, Serialize};

pub use events::{detect_events, DetectorConfig, Direction, EventKind, WaveEvent};
pub use spectrum::{fit_loglog_slope, psd, SlopeFit, Spectrum};

use crate::params::SimParams;

/// Per-step trajectory of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSeries {
    pub t: Vec<u64>,
    pub cluster_count: Vec<usize>,
    pub active_count: Vec<usize>,
    pub noise_trace: Vec<f64>,
    pub params: SimParams,
}

impl RunSeries {
    pub fn new(params: SimParams) -> Self {
        RunSeries {
            t: Vec::new(),
            cluster_count: Vec::new(),
            active_count: Vec::new(),
            noise_trace: Vec::new(),
            params,
        }
    }

    pub fn with_capacity(params: SimParams, cap: usize) -> Self {
        RunSeries {
            t: Vec::with_capacity(cap),
            cluster_count: Vec::with_capacity(cap),
            active_count: Vec::with_capacity(cap),
            noise_trace: Vec::with_capacity(cap),
            params,
        }
    }

    pub fn push(&mut self, t: u64, clusters: usize, active: usize, noise_p: f64) {
        self.t.push(t);
        self.cluster_count.push(clusters);
        self.active_count.push(active);
        self.noise_trace.push(noise_p);
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn trace(&self, which: Trace) -> Vec<f64> {
        let src = match which {
            Trace::Active => &self.active_count,
            Trace::Clusters => &self.cluster_count,
        };
        src.iter().map(|&v| v as f64).collect()
    }

    /// Samples from index `from` onwards.
    pub fn tail(&self, from: usize) -> RunSeries {
        let from = from.min(self.len());
        RunSeries {
            t: self.t[from..].to_vec(),
            cluster_count: self.cluster_count[from..].to_vec(),
            active_count: self.active_count[from..].to_vec(),
            noise_trace: self.noise_trace[from..].to_vec(),
            params: self.params.clone(),
        }
    }

    /// Runs the detector on the active-molecule trace. Event times are
    /// sample indices into this series.
    pub fn detect(&self, cfg: &DetectorConfig) -> Vec<WaveEvent> {
        detect_events(&self.trace(Trace::Active), cfg)
    }
}

/// Which count trace to analyse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trace {
    #[default]
    Active,
    Clusters,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    #[serde(default)]
    pub trace: Trace,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            trace: Trace::Active,
            f_lo: 1e-3,
            f_hi: 1e-1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceStats {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
}

impl TraceStats {
    fn of(values: &[usize]) -> Option<Self> {
        let min = *values.iter().min()?;
        let max = *values.iter().max()?;
        let mean = values.iter().sum::<usize>() as f64 / values.len() as f64;
        Some(TraceStats { min, max, mean })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct EventCounts {
    pub spike_up: usize,
    pub spike_down: usize,
    pub sawtooth: usize,
}

impl EventCounts {
    pub fn tally(events: &[WaveEvent]) -> Self {
        let mut c = EventCounts::default();
        for e in events {
            match e.kind {
                EventKind::SpikeUp => c.spike_up += 1,
                EventKind::SpikeDown => c.spike_down += 1,
                EventKind::Sawtooth => c.sawtooth += 1,
            }
        }
        c
    }

    pub fn spikes(&self) -> usize {
        self.spike_up + self.spike_down
    }

    pub fn total(&self) -> usize {
        self.spikes() + self.sawtooth
    }

    /// Share of spikes among all events; zero when there are none.
    pub fn spike_fraction(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            n => self.spikes() as f64 / n as f64,
        }
    }

    pub fn sawtooth_fraction(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            n => self.sawtooth as f64 / n as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub samples: usize,
    pub events: EventCounts,
    pub spike_fraction: f64,
    pub sawtooth_fraction: f64,
    pub psd_trace: Trace,
    pub psd_band: [f64; 2],
    /// `None` when the series is too short or the band too sparse.
    pub psd_slope: Option<SlopeFit>,
    pub cluster_count: Option<TraceStats>,
    pub active_count: Option<TraceStats>,
    pub params: SimParams,
}

pub fn summarize(
    series: &RunSeries,
    events: &[WaveEvent],
    spectrum: Option<&Spectrum>,
    band: &SpectrumConfig,
) -> Summary {
    let counts = EventCounts::tally(events);
    let psd_slope = spectrum.and_then(|s| fit_loglog_slope(s, band.f_lo, band.f_hi).ok());
    Summary {
        samples: series.len(),
        events: counts,
        spike_fraction: counts.spike_fraction(),
        sawtooth_fraction: counts.sawtooth_fraction(),
        psd_trace: band.trace,
        psd_band: [band.f_lo, band.f_hi],
        psd_slope,
        cluster_count: TraceStats::of(&series.cluster_count),
        active_count: TraceStats::of(&series.active_count),
        params: series.params.clone(),
    }
}
