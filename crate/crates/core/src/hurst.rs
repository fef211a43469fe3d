//! Rescaled-range (R/S) analysis over dyadic spans and Hurst regression.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{ChannelTrace, MIN_ANALYSIS_LEN};

pub const DEFAULT_MIN_SPAN: usize = 8;

/// Regression needs at least this many spans.
pub const MIN_SPANS: usize = 4;

/// Half-width of the band around 0.5 classified as uncorrelated.
pub const PERSISTENCE_BAND: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RsPoint {
    /// Window length in samples.
    pub span: usize,
    /// R/S averaged over the non-degenerate windows of this span.
    pub mean_rs: f64,
    pub window_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Persistence {
    Antipersistent,
    Uncorrelated,
    Persistent,
}

impl fmt::Display for Persistence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Persistence::Antipersistent => "antipersistent",
            Persistence::Uncorrelated => "uncorrelated",
            Persistence::Persistent => "persistent",
        })
    }
}

pub fn classify(h: f64) -> Persistence {
    if h < 0.5 - PERSISTENCE_BAND {
        Persistence::Antipersistent
    } else if h > 0.5 + PERSISTENCE_BAND {
        Persistence::Persistent
    } else {
        Persistence::Uncorrelated
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurstEstimate {
    pub points: Vec<RsPoint>,
    /// Slope of `ln E[R/S]` against `ln τ`.
    pub h: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub classification: Persistence,
    /// False when `h` falls outside `[0, 1]`.
    pub in_unit_interval: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RsOptions {
    pub min_span: usize,
    /// Largest number of halvings `k` (spans down to `N / 2^k`); unbounded if `None`.
    pub max_halvings: Option<u32>,
}

impl Default for RsOptions {
    fn default() -> Self {
        RsOptions {
            min_span: DEFAULT_MIN_SPAN,
            max_halvings: None,
        }
    }
}

/// R/S of one window: range of the cumulative mean-adjusted sums divided
/// by the population standard deviation.
pub fn rs_statistic(window: &[f64]) -> Result<f64> {
    if window.len() < 2 {
        return Err(Error::argument("R/S window needs at least 2 samples"));
    }
    let n = window.len() as f64;
    let mean = window.iter().sum::<f64>() / n;
    let mut z = 0.0f64;
    let mut z_max = f64::NEG_INFINITY;
    let mut z_min = f64::INFINITY;
    let mut ss = 0.0f64;
    for &x in window {
        let y = x - mean;
        z += y;
        z_max = z_max.max(z);
        z_min = z_min.min(z);
        ss += y * y;
    }
    let s = (ss / n).sqrt();
    if s.is_nan() || s <= 0.0 {
        return Err(Error::DegenerateWindow);
    }
    Ok((z_max - z_min) / s)
}

/// Dyadic spans `N, N/2, N/4, ...` (floor division) down to `min_span`.
pub fn dyadic_spans(n: usize, opts: &RsOptions) -> Vec<usize> {
    let min_span = opts.min_span.max(2);
    (0u32..usize::BITS)
        .take_while(|&k| opts.max_halvings.is_none_or(|max| k <= max))
        .map(|k| n >> k)
        .take_while(|&span| span >= min_span)
        .collect()
}

/// Mean R/S per dyadic span over consecutive non-overlapping windows.
/// Degenerate windows are skipped; spans with no valid window are omitted.
pub fn rs_curve(samples: &[f64], opts: &RsOptions) -> Result<Vec<RsPoint>> {
    let n = samples.len();
    if n < MIN_ANALYSIS_LEN {
        return Err(Error::argument(format!(
            "R/S analysis needs at least {MIN_ANALYSIS_LEN} samples, got {n}"
        )));
    }
    let points: Vec<RsPoint> = dyadic_spans(n, opts)
        .into_par_iter()
        .filter_map(|span| {
            let values: Vec<f64> = samples
                .chunks_exact(span)
                .filter_map(|w| rs_statistic(w).ok())
                .collect();
            (!values.is_empty()).then(|| RsPoint {
                span,
                mean_rs: values.iter().sum::<f64>() / values.len() as f64,
                window_count: values.len(),
            })
        })
        .collect();
    if points.len() < MIN_SPANS {
        return Err(Error::InsufficientSpans {
            found: points.len(),
            required: MIN_SPANS,
        });
    }
    Ok(points)
}

/// OLS of `ln(mean_rs)` on `ln(span)`.
pub fn hurst_regress(points: &[RsPoint]) -> Result<HurstEstimate> {
    if points.len() < MIN_SPANS {
        return Err(Error::argument(format!(
            "Hurst regression needs at least {MIN_SPANS} points, got {}",
            points.len()
        )));
    }
    let mut spans: Vec<usize> = points.iter().map(|p| p.span).collect();
    spans.sort_unstable();
    spans.dedup();
    if spans.len() != points.len() {
        return Err(Error::argument("Hurst regression needs distinct spans"));
    }
    if let Some(p) = points
        .iter()
        .find(|p| !(p.mean_rs > 0.0 && p.mean_rs.is_finite()))
    {
        return Err(Error::argument(format!(
            "non-positive mean R/S at span {}",
            p.span
        )));
    }

    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|p| ((p.span as f64).ln(), p.mean_rs.ln()))
        .collect();
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|&(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = xy.iter().map(|&(_, y)| (y - my).powi(2)).sum();
    let h = sxy / sxx;
    let intercept = my - h * mx;
    let ss_res: f64 = xy
        .iter()
        .map(|&(x, y)| (y - intercept - h * x).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };

    Ok(HurstEstimate {
        points: points.to_vec(),
        h,
        intercept,
        r_squared,
        classification: classify(h),
        in_unit_interval: (0.0..=1.0).contains(&h),
    })
}

pub fn hurst_of_samples(samples: &[f64], opts: &RsOptions) -> Result<HurstEstimate> {
    hurst_regress(&rs_curve(samples, opts)?)
}

pub fn hurst_of_trace(trace: &ChannelTrace, opts: &RsOptions) -> Result<HurstEstimate> {
    hurst_of_samples(trace.values()?, opts)
}

/// Averages mean R/S across a group of same-class traces, then regresses.
///
/// Every trace is trimmed to the shortest length so the dyadic spans line
/// up; only spans present for every trace are kept.
pub fn group_hurst(traces: &[ChannelTrace], opts: &RsOptions) -> Result<HurstEstimate> {
    let first = traces
        .first()
        .ok_or_else(|| Error::argument("cannot estimate Hurst exponent of an empty group"))?;
    if let Some(t) = traces.iter().find(|t| t.class() != first.class()) {
        return Err(Error::argument(format!(
            "mixed link classes in group: {} and {}",
            first.class(),
            t.class()
        )));
    }
    let len = traces.iter().map(ChannelTrace::len).min().unwrap_or(0);
    let curves: Vec<Vec<RsPoint>> = traces
        .par_iter()
        .map(|t| rs_curve(&t.values()?[..len], opts))
        .collect::<Result<_>>()?;

    let points: Vec<RsPoint> = curves[0]
        .iter()
        .filter_map(|p| {
            let matching: Vec<&RsPoint> = curves
                .iter()
                .filter_map(|c| c.iter().find(|q| q.span == p.span))
                .collect();
            (matching.len() == curves.len()).then(|| RsPoint {
                span: p.span,
                mean_rs: matching.iter().map(|q| q.mean_rs).sum::<f64>() / matching.len() as f64,
                window_count: matching.iter().map(|q| q.window_count).sum(),
            })
        })
        .collect();
    if points.len() < MIN_SPANS {
        return Err(Error::InsufficientSpans {
            found: points.len(),
            required: MIN_SPANS,
        });
    }
    hurst_regress(&points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{LinkDescriptor, NodePosition};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;
    use rand_distr::StandardNormal;

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.sample(StandardNormal)).collect()
    }

    fn trace(samples: Vec<f64>, tx: u8, rx: u8) -> ChannelTrace {
        let link = LinkDescriptor::new(tx, NodePosition::LH, rx, NodePosition::LH).unwrap();
        ChannelTrace::new(link, 20.0, samples).unwrap()
    }

    /// Independent transcription of the R/S definition: explicit mean,
    /// deviations, cumulative sums as a vector, and population deviation.
    fn rs_oracle(window: &[f64]) -> Option<f64> {
        let tau = window.len();
        let mut mean = 0.0;
        for x in window {
            mean += x;
        }
        mean /= tau as f64;
        let y: Vec<f64> = window.iter().map(|x| x - mean).collect();
        let mut z = Vec::with_capacity(tau);
        let mut acc = 0.0;
        for v in &y {
            acc += v;
            z.push(acc);
        }
        let r =
            z.iter().cloned().fold(f64::MIN, f64::max) - z.iter().cloned().fold(f64::MAX, f64::min);
        let mut var = 0.0;
        for v in &y {
            var += v * v;
        }
        let s = (var / tau as f64).sqrt();
        (s > 0.0).then(|| r / s)
    }

    #[test]
    fn rs_hand_examples() {
        let v = rs_statistic(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((v - 2.0 / 1.25f64.sqrt()).abs() < 1e-12);
        assert!((v - 1.78885).abs() < 1e-5);
        assert!((rs_statistic(&[1.0, -1.0, 1.0, -1.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            rs_statistic(&[5.0; 4]),
            Err(Error::DegenerateWindow)
        ));
    }

    #[test]
    fn spans_for_64_and_100() {
        let x = noise(64, 1);
        let c = rs_curve(&x, &RsOptions::default()).unwrap();
        let spans: Vec<usize> = c.iter().map(|p| p.span).collect();
        let counts: Vec<usize> = c.iter().map(|p| p.window_count).collect();
        assert_eq!(spans, vec![64, 32, 16, 8]);
        assert_eq!(counts, vec![1, 2, 4, 8]);

        let x = noise(100, 2);
        let c = rs_curve(&x, &RsOptions::default()).unwrap();
        assert_eq!(
            c.iter().map(|p| p.span).collect::<Vec<_>>(),
            vec![100, 50, 25, 12]
        );
        assert_eq!(
            c.iter().map(|p| p.window_count).collect::<Vec<_>>(),
            vec![1, 2, 4, 8]
        );
    }

    #[test]
    fn max_halvings_limits_spans() {
        let opts = RsOptions {
            min_span: 8,
            max_halvings: Some(4),
        };
        assert_eq!(dyadic_spans(1024, &opts), vec![1024, 512, 256, 128, 64]);
        let strict = RsOptions {
            min_span: 8,
            max_halvings: Some(2),
        };
        assert!(matches!(
            rs_curve(&noise(1024, 3), &strict),
            Err(Error::InsufficientSpans { found: 3, .. })
        ));
    }

    #[test]
    fn degenerate_windows_are_skipped() {
        // First half constant: the 32-span window over it is skipped.
        let mut x = vec![1.0; 32];
        x.extend(noise(32, 4));
        let c = rs_curve(&x, &RsOptions::default()).unwrap();
        assert_eq!(c[1].span, 32);
        assert_eq!(c[1].window_count, 1);
        assert_eq!(c[3].window_count, 4);
    }

    #[test]
    fn constant_series_has_no_spans() {
        assert!(matches!(
            rs_curve(&[2.0; 64], &RsOptions::default()),
            Err(Error::InsufficientSpans { found: 0, .. })
        ));
    }

    #[test]
    fn brute_force_equivalence_small_n() {
        for (seed, n) in [(7u64, 64usize), (8, 50 + 14), (9, 64)] {
            let x = noise(n, seed);
            let c = rs_curve(&x, &RsOptions::default()).unwrap();
            for p in &c {
                let mut vals = Vec::new();
                let mut start = 0;
                while start + p.span <= n {
                    if let Some(v) = rs_oracle(&x[start..start + p.span]) {
                        vals.push(v);
                    }
                    start += p.span;
                }
                let mut sum = 0.0;
                for v in &vals {
                    sum += v;
                }
                assert_eq!(p.window_count, vals.len());
                assert!((p.mean_rs - sum / vals.len() as f64).abs() <= 1e-12 * p.mean_rs);
            }
        }
    }

    #[test]
    fn exact_line_regression() {
        let points: Vec<RsPoint> = [8usize, 16, 32, 64, 128]
            .iter()
            .map(|&s| RsPoint {
                span: s,
                mean_rs: (0.7 * (s as f64).ln() + 0.1).exp(),
                window_count: 1,
            })
            .collect();
        let h = hurst_regress(&points).unwrap();
        assert!((h.h - 0.7).abs() < 1e-12);
        assert!((h.intercept - 0.1).abs() < 1e-12);
        assert!((h.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(h.classification, Persistence::Persistent);
        assert!(hurst_regress(&points[..3]).is_err());
    }

    #[test]
    fn classification_band() {
        assert_eq!(classify(0.44), Persistence::Antipersistent);
        assert_eq!(classify(0.45), Persistence::Uncorrelated);
        assert_eq!(classify(0.55), Persistence::Uncorrelated);
        assert_eq!(classify(0.56), Persistence::Persistent);
    }

    #[test]
    fn ramp_reads_as_strongly_persistent() {
        let ramp: Vec<f64> = (0..4096).map(|t| t as f64).collect();
        let h = hurst_of_samples(&ramp, &RsOptions::default()).unwrap();
        assert!(h.h >= 0.9, "h = {}", h.h);
    }

    #[test]
    fn group_of_one_and_duplicates() {
        let x = noise(2048, 10);
        let single = hurst_of_samples(&x, &RsOptions::default()).unwrap();
        let g1 = group_hurst(&[trace(x.clone(), 1, 2)], &RsOptions::default()).unwrap();
        assert_eq!(single.h, g1.h);
        let g2 = group_hurst(
            &[trace(x.clone(), 1, 2), trace(x.clone(), 2, 1)],
            &RsOptions::default(),
        )
        .unwrap();
        assert!((g2.h - single.h).abs() < 1e-12);
    }

    #[test]
    fn group_trims_to_shortest() {
        let long = noise(3000, 11);
        let short = noise(1100, 12);
        let g = group_hurst(
            &[trace(long, 1, 2), trace(short, 3, 4)],
            &RsOptions::default(),
        )
        .unwrap();
        assert_eq!(g.points[0].span, 1100);
    }

    #[test]
    fn group_errors() {
        assert!(group_hurst(&[], &RsOptions::default()).is_err());
        let a = trace(noise(128, 1), 1, 2);
        let on_body = ChannelTrace::new(
            LinkDescriptor::new(1, NodePosition::LH, 1, NodePosition::RA).unwrap(),
            20.0,
            noise(128, 2),
        )
        .unwrap();
        assert!(matches!(
            group_hurst(&[a, on_body], &RsOptions::default()),
            Err(Error::Argument(_))
        ));
    }

    proptest! {
        #[test]
        fn rs_affine_and_sign_invariant(
            x in prop::collection::vec(-50.0f64..50.0, 8..64),
            alpha in 0.01f64..100.0,
            beta in -1e3f64..1e3,
        ) {
            let Ok(base) = rs_statistic(&x) else { return Ok(()) };
            let moved: Vec<f64> = x.iter().map(|v| alpha * v + beta).collect();
            let flipped: Vec<f64> = x.iter().map(|v| -v).collect();
            prop_assert!((rs_statistic(&moved).unwrap() - base).abs() <= 1e-9 * base.max(1.0));
            prop_assert!((rs_statistic(&flipped).unwrap() - base).abs() <= 1e-9 * base.max(1.0));
        }

        #[test]
        fn slope_ignores_common_scale(scale in 0.01f64..100.0, seed in 0u64..1000) {
            let pts = rs_curve(&noise(512, seed), &RsOptions::default()).unwrap();
            let scaled: Vec<RsPoint> = pts.iter().map(|p| RsPoint { mean_rs: p.mean_rs * scale, ..*p }).collect();
            let a = hurst_regress(&pts).unwrap();
            let b = hurst_regress(&scaled).unwrap();
            prop_assert!((a.h - b.h).abs() < 1e-9);
            prop_assert!((b.intercept - a.intercept - scale.ln()).abs() < 1e-9);
        }
    }
}
