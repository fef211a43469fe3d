//! Estimator validation against synthetic processes of known memory.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::acf;
use crate::error::Result;
use crate::fit::{self, ModelKind};
use crate::hurst::{self, Persistence, RsOptions};
use crate::stationarity::{self, QualifiedVerdict, WssVerdict};
use crate::synth::{SynthKind, SynthSpec};

/// Seed count the tolerances below were set for.
pub const RECOMMENDED_SEEDS: usize = 20;

pub const HURST_MEAN_TOL: f64 = 0.08;
pub const HURST_RUN_TOL: f64 = 0.15;
pub const WHITE_MEAN_RANGE: (f64, f64) = (0.45, 0.62);
pub const WHITE_NON_PERSISTENT_SHARE: f64 = 0.5;
pub const DECAY_SHARE: f64 = 0.8;
pub const TREND_MIN_H: f64 = 0.9;

/// Truncation threshold for the decay-discrimination rows. fGn correlations
/// drop below 0.5 after one lag, so the default would leave nothing to fit.
pub const DECAY_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationOptions {
    pub seeds: usize,
    pub base_seed: u64,
    pub n: usize,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            seeds: RECOMMENDED_SEEDS,
            base_seed: 0,
            n: 1 << 15,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationRow {
    pub name: String,
    pub observed: String,
    pub passed: bool,
}

impl fmt::Display for ValidationRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}  ({})",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.observed
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationTable {
    pub options: ValidationOptions,
    pub warnings: Vec<String>,
    pub rows: Vec<ValidationRow>,
}

impl ValidationTable {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }
}

impl fmt::Display for ValidationTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        for row in &self.rows {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

fn generate(kind: &SynthKind, n: usize, seed: u64) -> Result<Vec<f64>> {
    SynthSpec::new(kind.clone(), n, 1.0, seed)?.generate()
}

fn hurst_runs(kind: &SynthKind, opts: &ValidationOptions) -> Result<Vec<f64>> {
    (0..opts.seeds as u64)
        .into_par_iter()
        .map(|i| {
            let x = generate(kind, opts.n, opts.base_seed.wrapping_add(i))?;
            Ok(hurst::hurst_of_samples(&x, &RsOptions::default())?.h)
        })
        .collect()
}

/// Count of runs where the expected model has the lower SSE.
fn decay_wins(kind: &SynthKind, expected: ModelKind, opts: &ValidationOptions) -> Result<usize> {
    let wins: Vec<bool> = (0..opts.seeds as u64)
        .into_par_iter()
        .map(|i| {
            let x = generate(kind, opts.n, opts.base_seed.wrapping_add(i))?;
            let curve = acf::acf_estimate(&x, acf::default_max_lag(x.len()))?;
            let curve = acf::truncate_at_threshold(&curve, DECAY_THRESHOLD)?;
            let power = fit::fit_model(&curve, ModelKind::Power)?;
            let exponential = fit::fit_model(&curve, ModelKind::Exponential)?;
            Ok(match expected {
                ModelKind::Power => power.sse < exponential.sse,
                ModelKind::Exponential => exponential.sse < power.sse,
            })
        })
        .collect::<Result<_>>()?;
    Ok(wins.into_iter().filter(|&w| w).count())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn trend_rows(label: &str, x: &[f64], rows: &mut Vec<ValidationRow>) -> Result<()> {
    let estimate = hurst::hurst_of_samples(x, &RsOptions::default())?;
    let screen = stationarity::wss_screen(
        x,
        stationarity::default_window_len(x.len()),
        stationarity::DEFAULT_MEAN_TOL_DB,
        stationarity::DEFAULT_VAR_RATIO_TOL,
    )?;
    let qualified = stationarity::qualify_verdict(&estimate, &screen);
    rows.push(ValidationRow {
        name: format!("{label} → trend inflates ĥ ≥ {TREND_MIN_H}"),
        observed: format!("ĥ = {:.4}", estimate.h),
        passed: estimate.h >= TREND_MIN_H,
    });
    rows.push(ValidationRow {
        name: format!("{label} → stationarity screen non-stationary"),
        observed: format!(
            "mean spread {:.3}, verdict {}",
            screen.mean_spread, screen.verdict
        ),
        passed: screen.verdict == WssVerdict::NonStationary,
    });
    rows.push(ValidationRow {
        name: format!("{label} → long-memory but unreliable"),
        observed: qualified.to_string(),
        passed: qualified == QualifiedVerdict::LongMemoryUnreliable,
    });
    Ok(())
}

pub fn run_validation(opts: &ValidationOptions) -> Result<ValidationTable> {
    let mut warnings = Vec::new();
    if opts.seeds < RECOMMENDED_SEEDS {
        warnings.push(format!(
            "tolerances assume at least {RECOMMENDED_SEEDS} seeds; running {}",
            opts.seeds
        ));
    }
    let mut rows = Vec::new();
    let seeds = opts.seeds.max(1);
    let opts = &ValidationOptions {
        seeds,
        ..opts.clone()
    };

    for h in [0.6, 0.7, 0.8] {
        let runs = hurst_runs(&SynthKind::Fgn { hurst: h }, opts)?;
        let m = mean(&runs);
        let (lo, hi) = (h - HURST_MEAN_TOL, h + HURST_MEAN_TOL);
        rows.push(ValidationRow {
            name: format!("fgn H={h} → ĥ mean within [{lo:.2},{hi:.2}]"),
            observed: format!("mean ĥ = {m:.4}"),
            passed: (lo..=hi).contains(&m),
        });
        let worst = runs.iter().map(|e| (e - h).abs()).fold(0.0, f64::max);
        rows.push(ValidationRow {
            name: format!("fgn H={h} → every ĥ within ±{HURST_RUN_TOL}"),
            observed: format!("max |ĥ − H| = {worst:.4}"),
            passed: worst <= HURST_RUN_TOL,
        });
    }

    let white = hurst_runs(&SynthKind::White, opts)?;
    let m = mean(&white);
    rows.push(ValidationRow {
        name: format!(
            "white → ĥ mean within [{:.2},{:.2}]",
            WHITE_MEAN_RANGE.0, WHITE_MEAN_RANGE.1
        ),
        observed: format!("mean ĥ = {m:.4}"),
        passed: (WHITE_MEAN_RANGE.0..=WHITE_MEAN_RANGE.1).contains(&m),
    });
    let not_persistent = white
        .iter()
        .filter(|&&h| hurst::classify(h) != Persistence::Persistent)
        .count();
    rows.push(ValidationRow {
        name: "white → not persistent in ≥ 50% of runs".into(),
        observed: format!("{not_persistent}/{seeds}"),
        passed: not_persistent as f64 >= WHITE_NON_PERSISTENT_SHARE * seeds as f64,
    });

    let ar1 = decay_wins(&SynthKind::Ar1 { phi: 0.9 }, ModelKind::Exponential, opts)?;
    rows.push(ValidationRow {
        name: "ar1 φ=0.9 → exponential SSE < power SSE in ≥ 80% of runs".into(),
        observed: format!("{ar1}/{seeds}"),
        passed: ar1 as f64 >= DECAY_SHARE * seeds as f64,
    });
    let fgn = decay_wins(&SynthKind::Fgn { hurst: 0.8 }, ModelKind::Power, opts)?;
    rows.push(ValidationRow {
        name: "fgn H=0.8 → power SSE < exponential SSE in ≥ 80% of runs".into(),
        observed: format!("{fgn}/{seeds}"),
        passed: fgn as f64 >= DECAY_SHARE * seeds as f64,
    });

    let ramp = generate(&SynthKind::Ramp { slope: 1.0 }, opts.n, opts.base_seed)?;
    trend_rows("ramp", &ramp, &mut rows)?;
    let composite = generate(
        &SynthKind::Composite {
            base: Box::new(SynthKind::White),
            slope: 0.01,
        },
        opts.n,
        opts.base_seed,
    )?;
    trend_rows("white + 0.01σ/sample ramp", &composite, &mut rows)?;

    Ok(ValidationTable {
        options: opts.clone(),
        warnings,
        rows,
    })
}
