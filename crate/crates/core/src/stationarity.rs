//! Sliding-window wide-sense-stationarity screen.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hurst::{HurstEstimate, Persistence};

pub const DEFAULT_MEAN_TOL_DB: f64 = 1.0;
pub const DEFAULT_VAR_RATIO_TOL: f64 = 3.0;
pub const MIN_WINDOWS: usize = 4;

/// Default window: an eighth of the trace.
pub fn default_window_len(n: usize) -> usize {
    n / 8
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WssVerdict {
    #[serde(rename = "WSS-consistent")]
    WssConsistent,
    #[serde(rename = "non-stationary")]
    NonStationary,
}

impl fmt::Display for WssVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WssVerdict::WssConsistent => "WSS-consistent",
            WssVerdict::NonStationary => "non-stationary",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationarityReport {
    pub window_len: usize,
    pub windows: usize,
    pub mean_tol: f64,
    pub var_ratio_tol: f64,
    /// Largest minus smallest window mean (dB).
    pub mean_spread: f64,
    /// Largest over smallest non-zero window variance; 1 when every window is constant.
    pub var_ratio: f64,
    /// Zero-variance windows left out of `var_ratio`.
    pub zero_variance_windows: usize,
    pub verdict: WssVerdict,
    pub per_window: Vec<WindowStats>,
}

pub fn wss_screen(
    samples: &[f64],
    window_len: usize,
    mean_tol: f64,
    var_ratio_tol: f64,
) -> Result<StationarityReport> {
    if window_len == 0 {
        return Err(Error::argument("window length must be positive"));
    }
    if samples.len() < MIN_WINDOWS * window_len {
        return Err(Error::argument(format!(
            "stationarity screen needs at least {} samples for window {window_len}, got {}",
            MIN_WINDOWS * window_len,
            samples.len()
        )));
    }
    let per_window: Vec<WindowStats> = samples
        .chunks_exact(window_len)
        .map(|w| {
            let n = w.len() as f64;
            let mean = w.iter().sum::<f64>() / n;
            let variance = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
            WindowStats { mean, variance }
        })
        .collect();

    let (lo, hi) = per_window
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), w| {
            (lo.min(w.mean), hi.max(w.mean))
        });
    let mean_spread = hi - lo;

    let nonzero: Vec<f64> = per_window
        .iter()
        .map(|w| w.variance)
        .filter(|&v| v > 0.0)
        .collect();
    let zero_variance_windows = per_window.len() - nonzero.len();
    let var_ratio = if nonzero.is_empty() {
        1.0
    } else {
        let max = nonzero.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = nonzero.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    };

    let verdict = if mean_spread <= mean_tol && var_ratio <= var_ratio_tol {
        WssVerdict::WssConsistent
    } else {
        WssVerdict::NonStationary
    };

    Ok(StationarityReport {
        window_len,
        windows: per_window.len(),
        mean_tol,
        var_ratio_tol,
        mean_spread,
        var_ratio,
        zero_variance_windows,
        verdict,
        per_window,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QualifiedVerdict {
    #[serde(rename = "reliably predictable")]
    ReliablyPredictable,
    #[serde(rename = "long-memory but unreliable")]
    LongMemoryUnreliable,
    #[serde(rename = "no long memory")]
    NoLongMemory,
}

impl fmt::Display for QualifiedVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QualifiedVerdict::ReliablyPredictable => "reliably predictable",
            QualifiedVerdict::LongMemoryUnreliable => "long-memory but unreliable",
            QualifiedVerdict::NoLongMemory => "no long memory",
        })
    }
}

/// Long memory is only usable for prediction on a WSS-consistent trace.
pub fn qualify(classification: Persistence, wss: WssVerdict) -> QualifiedVerdict {
    match (classification, wss) {
        (Persistence::Persistent, WssVerdict::WssConsistent) => {
            QualifiedVerdict::ReliablyPredictable
        }
        (Persistence::Persistent, WssVerdict::NonStationary) => {
            QualifiedVerdict::LongMemoryUnreliable
        }
        _ => QualifiedVerdict::NoLongMemory,
    }
}

pub fn qualify_verdict(
    hurst: &HurstEstimate,
    stationarity: &StationarityReport,
) -> QualifiedVerdict {
    qualify(hurst.classification, stationarity.verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{SynthKind, SynthSpec};

    #[test]
    fn white_noise_passes_in_most_seeds() {
        let n = 1 << 14;
        let passes = (0..40)
            .filter(|&seed| {
                let x = SynthSpec::new(SynthKind::White, n, 1.0, seed)
                    .unwrap()
                    .generate()
                    .unwrap();
                wss_screen(&x, 1 << 11, 0.5, 2.0).unwrap().verdict == WssVerdict::WssConsistent
            })
            .count();
        assert!(passes >= 38, "{passes}/40");
    }

    #[test]
    fn ramp_is_non_stationary() {
        let n = 1 << 14;
        let x: Vec<f64> = (0..n).map(|t| 10.0 * t as f64 / (n - 1) as f64).collect();
        let r = wss_screen(&x, 1 << 11, 0.5, 2.0).unwrap();
        assert_eq!(r.windows, 8);
        // Consecutive window means step by 10 * 2048 / (n - 1).
        let expected = 7.0 * 10.0 * 2048.0 / (n - 1) as f64;
        assert!((r.mean_spread - expected).abs() < 1e-9);
        assert!((r.var_ratio - 1.0).abs() < 1e-9);
        assert_eq!(r.verdict, WssVerdict::NonStationary);
    }

    #[test]
    fn constant_trace_is_consistent() {
        let r = wss_screen(&[-70.0; 64], 16, 1.0, 3.0).unwrap();
        assert_eq!(r.mean_spread, 0.0);
        assert_eq!(r.var_ratio, 1.0);
        assert_eq!(r.zero_variance_windows, 4);
        assert_eq!(r.verdict, WssVerdict::WssConsistent);
    }

    #[test]
    fn zero_variance_windows_are_excluded() {
        let mut x = vec![0.0; 16];
        x.extend((0..48).map(|t| if t % 2 == 0 { 1.0 } else { -1.0 }));
        let r = wss_screen(&x, 16, 10.0, 3.0).unwrap();
        assert_eq!(r.zero_variance_windows, 1);
        assert_eq!(r.var_ratio, 1.0);
    }

    #[test]
    fn too_short_is_error() {
        assert!(wss_screen(&[0.0; 63], 16, 1.0, 3.0).is_err());
        assert!(wss_screen(&[0.0; 63], 0, 1.0, 3.0).is_err());
    }

    #[test]
    fn offset_changes_only_means() {
        // Multiples of 1/8 keep every sum exact, so the comparison is bitwise.
        let x: Vec<f64> = (0..256).map(|t| ((t * 37 % 29) as f64) / 8.0).collect();
        let y: Vec<f64> = x.iter().map(|v| v + 17.0).collect();
        let a = wss_screen(&x, 32, 1.0, 3.0).unwrap();
        let b = wss_screen(&y, 32, 1.0, 3.0).unwrap();
        assert_eq!(a.mean_spread, b.mean_spread);
        assert_eq!(a.var_ratio, b.var_ratio);
        assert_eq!(a.verdict, b.verdict);
        for (wa, wb) in a.per_window.iter().zip(&b.per_window) {
            assert_eq!(wa.variance, wb.variance);
            assert_eq!(wa.mean + 17.0, wb.mean);
        }
    }

    #[test]
    fn verdict_grid() {
        use Persistence::*;
        use QualifiedVerdict::*;
        use WssVerdict::*;
        let table = [
            (Persistent, WssConsistent, ReliablyPredictable),
            (Persistent, NonStationary, LongMemoryUnreliable),
            (Uncorrelated, WssConsistent, NoLongMemory),
            (Uncorrelated, NonStationary, NoLongMemory),
            (Antipersistent, WssConsistent, NoLongMemory),
            (Antipersistent, NonStationary, NoLongMemory),
        ];
        for (c, w, expected) in table {
            assert_eq!(qualify(c, w), expected);
        }
    }
}
