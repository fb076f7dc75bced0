//! Welch power spectra and log-log slope fits.

use std::f64::consts::PI;

use serde::Serialize;

use super::fft::fft_real;
use crate::error::AnalysisError;

pub const MIN_SERIES_LEN: usize = 256;
pub const MIN_FIT_BINS: usize = 8;

/// One-sided spectrum over positive frequencies, DC excluded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// Cycles per step, strictly increasing.
    pub freq: Vec<f64>,
    pub power: Vec<f64>,
    pub n_segments: usize,
}

impl Spectrum {
    pub fn total_power(&self) -> f64 {
        self.power.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub bins: usize,
}

fn hann(len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / len as f64).cos())
        .collect()
}

/// Welch estimate: mean removed, Hann-tapered segments of the largest power
/// of two not above `len / 4`, 50% overlap, averaged.
///
/// Normalised so that the summed power approximates the series variance.
pub fn psd(series: &[f64]) -> Result<Spectrum, AnalysisError> {
    let n = series.len();
    if n < MIN_SERIES_LEN {
        return Err(AnalysisError::TooShort {
            len: n,
            min: MIN_SERIES_LEN,
        });
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = series.iter().map(|v| v - mean).collect();

    let seg_len = 1usize << (usize::BITS - 1 - (n / 4).leading_zeros());
    let hop = seg_len / 2;
    let window = hann(seg_len);
    let window_energy: f64 = window.iter().map(|w| w * w).sum();
    let half = seg_len / 2;

    let mut acc = vec![0.0; half];
    let mut n_segments = 0;
    let mut start = 0;
    let mut tapered = vec![0.0; seg_len];
    while start + seg_len <= n {
        for ((dst, &x), &w) in tapered
            .iter_mut()
            .zip(&centered[start..start + seg_len])
            .zip(&window)
        {
            *dst = x * w;
        }
        let spec = fft_real(&tapered);
        for (k, slot) in acc.iter_mut().enumerate() {
            *slot += spec[k + 1].norm_sqr();
        }
        n_segments += 1;
        start += hop;
    }

    let scale = 1.0 / (n_segments as f64 * seg_len as f64 * window_energy);
    let power = acc
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            // Every bin below Nyquist folds in its negative-frequency twin.
            let fold = if i + 1 == half { 1.0 } else { 2.0 };
            p * scale * fold
        })
        .collect();
    let freq = (1..=half).map(|k| k as f64 / seg_len as f64).collect();
    Ok(Spectrum {
        freq,
        power,
        n_segments,
    })
}

/// Ordinary least squares of `log10(power)` on `log10(freq)` inside
/// `[f_lo, f_hi]`. Bins with zero power are skipped.
pub fn fit_loglog_slope(spec: &Spectrum, f_lo: f64, f_hi: f64) -> Result<SlopeFit, AnalysisError> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = spec
        .freq
        .iter()
        .zip(&spec.power)
        .filter(|(&f, &p)| f >= f_lo && f <= f_hi && p > 0.0)
        .map(|(&f, &p)| (f.log10(), p.log10()))
        .unzip();
    let m = xs.len();
    if m < MIN_FIT_BINS {
        return Err(AnalysisError::SparseBand {
            lo: f_lo,
            hi: f_hi,
            bins: m,
            min: MIN_FIT_BINS,
        });
    }
    let mx = xs.iter().sum::<f64>() / m as f64;
    let my = ys.iter().sum::<f64>() / m as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = (ssr / (m as f64 - 2.0) / sxx).sqrt();
    Ok(SlopeFit {
        slope,
        stderr,
        intercept,
        bins: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn white(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    fn variance(x: &[f64]) -> f64 {
        let m = x.iter().sum::<f64>() / x.len() as f64;
        x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / x.len() as f64
    }

    #[test]
    fn rejects_short_series() {
        assert!(matches!(
            psd(&[0.0; 255]),
            Err(AnalysisError::TooShort { .. })
        ));
        assert!(psd(&[0.0; 256]).is_ok());
    }

    #[test]
    fn segment_layout() {
        let s = psd(&white(1, 4096)).unwrap();
        // 1024-sample segments with hop 512.
        assert_eq!(s.n_segments, 7);
        assert_eq!(s.freq.len(), 512);
        assert_eq!(s.freq[0], 1.0 / 1024.0);
        assert_eq!(*s.freq.last().unwrap(), 0.5);
        assert!(s.freq.windows(2).all(|w| w[0] < w[1]));
        let odd = psd(&white(1, 1000)).unwrap();
        assert_eq!(odd.freq.len(), 64);
    }

    #[test]
    fn constant_series_has_no_power() {
        let s = psd(&vec![42.0; 2048]).unwrap();
        assert!(s.power.iter().all(|&p| p.abs() < 1e-12));
    }

    #[test]
    fn tone_lands_in_its_bin() {
        let x: Vec<f64> = (0..4096)
            .map(|t| (2.0 * PI * t as f64 / 8.0).sin())
            .collect();
        let s = psd(&x).unwrap();
        let peak = s
            .power
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(s.freq[peak], 0.125);
        // A Hann taper spreads an on-bin tone over the peak and its two neighbours.
        let lobe: f64 = s.power[peak - 1..=peak + 1].iter().sum();
        assert!(lobe / s.total_power() >= 0.99);
    }

    #[test]
    fn parseval_on_white_noise() {
        for seed in 0..5 {
            let x = white(seed, 1 << 14);
            let s = psd(&x).unwrap();
            let ratio = s.total_power() / variance(&x);
            assert!((ratio - 1.0).abs() < 0.01, "seed {seed}: ratio {ratio}");
        }
    }

    #[test]
    fn parseval_on_tone_mixture() {
        let x: Vec<f64> = (0..8192)
            .map(|t| {
                let t = t as f64;
                (2.0 * PI * t / 16.0).sin() + 0.5 * (2.0 * PI * t / 64.0).cos()
            })
            .collect();
        let s = psd(&x).unwrap();
        let ratio = s.total_power() / variance(&x);
        assert!((ratio - 1.0).abs() < 0.01, "ratio {ratio}");
    }

    #[test]
    fn lag_leaves_spectrum_unchanged() {
        // On-bin tones at least three bins apart do not interfere through
        // the taper, so a delay only rotates phases.
        let tone = |t: f64| {
            (2.0 * PI * 8.0 * t / 512.0).sin()
                + 0.7 * (2.0 * PI * 40.0 * t / 512.0 + 0.3).cos()
                + 0.2 * (2.0 * PI * 100.0 * t / 512.0).sin()
        };
        let x: Vec<f64> = (0..2048).map(|t| tone(t as f64)).collect();
        let lagged: Vec<f64> = (0..2048).map(|t| tone(t as f64 + 37.0)).collect();
        let a = psd(&x).unwrap();
        let b = psd(&lagged).unwrap();
        let scale = a.total_power();
        for (p, q) in a.power.iter().zip(&b.power) {
            assert!((p - q).abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn exact_power_laws() {
        let freq: Vec<f64> = (1..=512).map(|k| k as f64 / 1024.0).collect();
        let inv = Spectrum {
            power: freq.iter().map(|f| 1.0 / f).collect(),
            freq: freq.clone(),
            n_segments: 1,
        };
        let fit = fit_loglog_slope(&inv, 1e-3, 1e-1).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-3);
        assert!(fit.stderr < 1e-3);
        let flat = Spectrum {
            power: vec![3.0; 512],
            freq,
            n_segments: 1,
        };
        assert!(fit_loglog_slope(&flat, 1e-3, 1e-1).unwrap().slope.abs() < 1e-12);
    }

    #[test]
    fn empty_band_is_an_error() {
        let s = psd(&white(3, 4096)).unwrap();
        assert!(matches!(
            fit_loglog_slope(&s, 0.6, 0.9),
            Err(AnalysisError::SparseBand { bins: 0, .. })
        ));
    }

    #[test]
    fn white_noise_slope_is_flat() {
        // Oracle: average over 20 independent seeds.
        let mean: f64 = (0..20)
            .map(|seed| {
                let s = psd(&white(100 + seed, 1 << 16)).unwrap();
                fit_loglog_slope(&s, 1e-3, 1e-1).unwrap().slope
            })
            .sum::<f64>()
            / 20.0;
        assert!(mean.abs() < 0.15, "mean slope {mean}");
    }
}
