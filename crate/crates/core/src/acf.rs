//! Sample autocorrelation with the biased (1/N) estimator.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::ChannelTrace;

/// Correlation level the decay is fitted down to.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Minimum number of lags at or above the threshold needed for a fit.
pub const MIN_FIT_POINTS: usize = 5;

const MAX_LAG_CAP: usize = 4096;

/// Above this many multiply-adds the ACF is computed through an FFT.
const DIRECT_WORK_LIMIT: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfCurve {
    /// `values[k]` is the correlation at lag `k` samples; `values[0] == 1`.
    pub values: Vec<f64>,
    /// Length of the series the curve was estimated from (minimum over an average).
    pub source_len: usize,
    /// Smallest lag whose correlation fell below the threshold.
    pub truncation_lag: Option<usize>,
    /// Inclusive lag range retained for fitting, set by [`truncate_at_threshold`].
    pub fit_range: Option<(usize, usize)>,
}

impl AcfCurve {
    pub fn max_lag(&self) -> usize {
        self.values.len() - 1
    }

    /// `(lag, acf)` pairs over the fit range, or over lags `1..=max_lag` when
    /// no range has been set.
    pub fn fit_points(&self) -> Vec<(f64, f64)> {
        let (lo, hi) = self.fit_range.unwrap_or((1, self.max_lag()));
        (lo..=hi).map(|k| (k as f64, self.values[k])).collect()
    }
}

pub fn default_max_lag(n: usize) -> usize {
    (n / 4).clamp(1, MAX_LAG_CAP)
}

/// Biased autocorrelation estimate up to `max_lag`:
/// `rho(k) = sum_{t<N-k} d_t d_{t+k} / sum_t d_t^2` with `d = x - mean(x)`.
pub fn acf_estimate(samples: &[f64], max_lag: usize) -> Result<AcfCurve> {
    let n = samples.len();
    if max_lag >= n {
        return Err(Error::argument(format!(
            "max_lag {max_lag} must be below series length {n}"
        )));
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let dev: Vec<f64> = samples.iter().map(|x| x - mean).collect();
    let denom: f64 = dev.iter().map(|d| d * d).sum();
    if denom.is_nan() || denom <= 0.0 || !denom.is_finite() {
        return Err(Error::DegenerateSeries);
    }

    let mut values = if n.saturating_mul(max_lag + 1) <= DIRECT_WORK_LIMIT {
        lagged_products_direct(&dev, max_lag)
    } else {
        lagged_products_fft(&dev, max_lag)
    };
    for v in values.iter_mut() {
        *v /= denom;
    }
    values[0] = 1.0;

    Ok(AcfCurve {
        values,
        source_len: n,
        truncation_lag: None,
        fit_range: None,
    })
}

pub fn acf_of_trace(trace: &ChannelTrace, max_lag: Option<usize>) -> Result<AcfCurve> {
    let x = trace.values()?;
    acf_estimate(x, max_lag.unwrap_or_else(|| default_max_lag(x.len())))
}

fn lagged_products_direct(dev: &[f64], max_lag: usize) -> Vec<f64> {
    (0..=max_lag)
        .map(|k| dev.iter().zip(&dev[k..]).map(|(a, b)| a * b).sum())
        .collect()
}

/// Wiener–Khinchin with zero padding, so the circular products equal the linear ones.
fn lagged_products_fft(dev: &[f64], max_lag: usize) -> Vec<f64> {
    let len = (dev.len() + max_lag + 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(len);
    let inverse = planner.plan_fft_inverse(len);

    let mut buf: Vec<Complex<f64>> = dev
        .iter()
        .map(|&d| Complex::new(d, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(len)
        .collect();
    forward.process(&mut buf);
    for z in buf.iter_mut() {
        *z = Complex::new(z.norm_sqr(), 0.0);
    }
    inverse.process(&mut buf);
    let scale = 1.0 / len as f64;
    buf[..=max_lag].iter().map(|z| z.re * scale).collect()
}

/// Marks the first lag below `threshold` and retains lags `1..truncation_lag`
/// for fitting. If the curve never drops below the threshold, every lag from
/// 1 is retained and `truncation_lag` stays unset.
pub fn truncate_at_threshold(curve: &AcfCurve, threshold: f64) -> Result<AcfCurve> {
    if curve.values.len() < 2 {
        return Err(Error::InsufficientDecayRange {
            retained: 0,
            threshold,
            required: MIN_FIT_POINTS,
        });
    }
    let crossing = (1..curve.values.len()).find(|&k| curve.values[k] < threshold);
    let last_kept = crossing.map_or(curve.max_lag(), |k| k - 1);
    if last_kept < MIN_FIT_POINTS {
        return Err(Error::InsufficientDecayRange {
            retained: last_kept,
            threshold,
            required: MIN_FIT_POINTS,
        });
    }
    Ok(AcfCurve {
        values: curve.values.clone(),
        source_len: curve.source_len,
        truncation_lag: crossing,
        fit_range: Some((1, last_kept)),
    })
}

/// Pointwise mean over the lags every curve covers.
pub fn average_acf(curves: &[AcfCurve]) -> Result<AcfCurve> {
    let len = curves
        .iter()
        .map(|c| c.values.len())
        .min()
        .ok_or_else(|| Error::argument("cannot average an empty list of ACF curves"))?;
    let count = curves.len() as f64;
    let mut values: Vec<f64> = (0..len)
        .map(|k| curves.iter().map(|c| c.values[k]).sum::<f64>() / count)
        .collect();
    values[0] = 1.0;
    Ok(AcfCurve {
        values,
        source_len: curves.iter().map(|c| c.source_len).min().unwrap_or(0),
        truncation_lag: None,
        fit_range: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;
    use rand_distr::StandardNormal;

    fn curve(values: Vec<f64>) -> AcfCurve {
        AcfCurve {
            source_len: 1000,
            values,
            truncation_lag: None,
            fit_range: None,
        }
    }

    #[test]
    fn alternating_lag_one() {
        let c = acf_estimate(&[1.0, -1.0, 1.0, -1.0], 1).unwrap();
        assert_eq!(c.values[0], 1.0);
        assert!((c.values[1] + 0.75).abs() < 1e-12);
    }

    #[test]
    fn constant_series_is_degenerate() {
        assert!(matches!(
            acf_estimate(&[3.0; 10], 2),
            Err(Error::DegenerateSeries)
        ));
    }

    #[test]
    fn max_lag_must_be_below_length() {
        assert!(matches!(
            acf_estimate(&[1.0, 2.0, 3.0], 3),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn fft_path_matches_direct_sums() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let x: Vec<f64> = (0..3000).map(|_| rng.sample(StandardNormal)).collect();
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let dev: Vec<f64> = x.iter().map(|v| v - mean).collect();
        let direct = lagged_products_direct(&dev, 200);
        let fft = lagged_products_fft(&dev, 200);
        for (a, b) in direct.iter().zip(&fft) {
            assert!((a - b).abs() < 1e-9 * direct[0], "{a} vs {b}");
        }
    }

    #[test]
    fn white_noise_acf_is_small() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..1 << 14).map(|_| rng.sample(StandardNormal)).collect();
        let c = acf_estimate(&x, 20).unwrap();
        for k in 1..=20 {
            assert!(c.values[k].abs() < 0.05, "lag {k}: {}", c.values[k]);
        }
    }

    #[test]
    fn truncation_first_crossing() {
        let c = curve(vec![1.0, 0.9, 0.8, 0.7, 0.6, 0.55, 0.45, 0.4, 0.3]);
        let t = truncate_at_threshold(&c, 0.5).unwrap();
        assert_eq!(t.truncation_lag, Some(6));
        assert_eq!(t.fit_range, Some((1, 5)));
        assert_eq!(t.fit_points().len(), 5);
    }

    #[test]
    fn truncation_keeps_values_equal_to_threshold() {
        let c = curve(vec![1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.49]);
        let t = truncate_at_threshold(&c, 0.5).unwrap();
        assert_eq!(t.truncation_lag, Some(6));
    }

    #[test]
    fn immediate_crossing_is_insufficient() {
        let c = curve(vec![1.0, 0.3, 0.2, 0.1]);
        assert!(matches!(
            truncate_at_threshold(&c, 0.5),
            Err(Error::InsufficientDecayRange { retained: 0, .. })
        ));
    }

    #[test]
    fn power_law_curve_crossing() {
        // 1.067 * k^-0.152 = 0.5  =>  k = (1.067/0.5)^(1/0.152) = 146.5...
        let crossing = ((1.067f64 / 0.5).ln() / 0.152).exp();
        assert!(crossing > 146.0 && crossing < 147.0);
        let values: Vec<f64> = (0..400)
            .map(|k| {
                if k == 0 {
                    1.0
                } else {
                    1.067 * (k as f64).powf(-0.152)
                }
            })
            .collect();
        let t = truncate_at_threshold(&curve(values), 0.5).unwrap();
        assert_eq!(t.truncation_lag, Some(147));
        assert_eq!(t.fit_range, Some((1, 146)));
    }

    #[test]
    fn no_crossing_retains_everything() {
        let c = curve(vec![1.0, 0.99, 0.98, 0.97, 0.96, 0.95, 0.94]);
        let t = truncate_at_threshold(&c, 0.5).unwrap();
        assert_eq!(t.truncation_lag, None);
        assert_eq!(t.fit_range, Some((1, 6)));
    }

    #[test]
    fn averaging() {
        let a = curve(vec![1.0, 0.8]);
        let b = curve(vec![1.0, 0.6]);
        let m = average_acf(&[a.clone(), b]).unwrap();
        assert!((m.values[1] - 0.7).abs() < 1e-15);
        assert_eq!(
            average_acf(&[a.clone(), a.clone()]).unwrap().values,
            a.values
        );
        assert!(average_acf(&[]).is_err());
    }

    #[test]
    fn averaging_uses_common_length() {
        let mut a = curve(vec![1.0, 0.8, 0.6]);
        a.source_len = 500;
        let b = curve(vec![1.0, 0.6]);
        let m = average_acf(&[a, b]).unwrap();
        assert_eq!(m.values.len(), 2);
        assert_eq!(m.source_len, 500);
    }

    proptest! {
        #[test]
        fn affine_invariance(
            x in prop::collection::vec(-100.0f64..100.0, 16..64),
            alpha in prop_oneof![-50.0f64..-0.1, 0.1f64..50.0],
            beta in -1e3f64..1e3,
        ) {
            let base = match acf_estimate(&x, 8) { Ok(c) => c, Err(_) => return Ok(()) };
            let y: Vec<f64> = x.iter().map(|v| alpha * v + beta).collect();
            let moved = acf_estimate(&y, 8).unwrap();
            for (a, b) in base.values.iter().zip(&moved.values) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn bounded_by_one(x in prop::collection::vec(-10.0f64..10.0, 8..128)) {
            let max_lag = x.len() - 1;
            if let Ok(c) = acf_estimate(&x, max_lag) {
                prop_assert_eq!(c.values[0], 1.0);
                for v in &c.values {
                    prop_assert!(v.abs() <= 1.0 + 1e-9);
                }
            }
        }
    }
}
