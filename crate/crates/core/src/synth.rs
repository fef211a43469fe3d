//! Reference processes with known memory: fractional Gaussian noise, white
//! noise, AR(1), linear ramps and ramp-contaminated composites.
//!
//! fGn is generated with exact covariance by circulant embedding. Should the
//! embedding ever produce a negative eigenvalue, generation falls back to
//! Durbin–Levinson conditional simulation, which is also exact but O(n²).
//!
//! Every generator draws from a ChaCha20 stream seeded with
//! `ChaCha20Rng::seed_from_u64(seed)`, so a spec and seed pin the sequence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Recorded in reports alongside generated data.
pub const RNG_ALGORITHM: &str = "ChaCha20Rng::seed_from_u64 (rand_chacha 0.9)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SynthKind {
    Fgn {
        hurst: f64,
    },
    White,
    Ar1 {
        phi: f64,
    },
    /// `slope * t`; the only kind that ignores `sigma`.
    Ramp {
        slope: f64,
    },
    /// `base + slope * t`.
    Composite {
        base: Box<SynthKind>,
        slope: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub n: usize,
    pub sigma: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(kind: SynthKind, n: usize, sigma: f64, seed: u64) -> Result<Self> {
        let spec = SynthSpec {
            kind,
            n,
            sigma,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidSpec(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        validate_kind(&self.kind)
    }

    pub fn generate(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        Ok(generate_kind(&self.kind, self.n, self.sigma, &mut rng))
    }
}

fn validate_kind(kind: &SynthKind) -> Result<()> {
    match kind {
        SynthKind::Fgn { hurst } if !(*hurst > 0.0 && *hurst < 1.0) => Err(Error::InvalidSpec(
            format!("Hurst exponent must lie in (0, 1), got {hurst}"),
        )),
        SynthKind::Ar1 { phi } if phi.is_nan() || phi.abs() >= 1.0 => Err(Error::InvalidSpec(
            format!("AR(1) coefficient must satisfy |phi| < 1, got {phi}"),
        )),
        SynthKind::Ramp { slope } | SynthKind::Composite { slope, .. } if !slope.is_finite() => {
            Err(Error::InvalidSpec(format!(
                "slope must be finite, got {slope}"
            )))
        }
        SynthKind::Composite { base, .. } => validate_kind(base),
        _ => Ok(()),
    }
}

fn generate_kind<R: Rng>(kind: &SynthKind, n: usize, sigma: f64, rng: &mut R) -> Vec<f64> {
    match kind {
        SynthKind::Fgn { hurst } => gen_fgn(*hurst, n, sigma, rng),
        SynthKind::White => gen_white(n, sigma, rng),
        SynthKind::Ar1 { phi } => gen_ar1(*phi, n, sigma, rng),
        SynthKind::Ramp { slope } => gen_ramp(*slope, n),
        SynthKind::Composite { base, slope } => {
            let mut x = generate_kind(base, n, sigma, rng);
            for (t, v) in x.iter_mut().enumerate() {
                *v += slope * t as f64;
            }
            x
        }
    }
}

/// `γ(k) = σ²/2 (|k+1|^{2H} − 2|k|^{2H} + |k−1|^{2H})`.
pub fn fgn_autocovariance(hurst: f64, sigma: f64, k: usize) -> f64 {
    let two_h = 2.0 * hurst;
    let k = k as f64;
    0.5 * sigma
        * sigma
        * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).abs().powf(two_h))
}

pub fn gen_white<R: Rng>(n: usize, sigma: f64, rng: &mut R) -> Vec<f64> {
    (0..n)
        .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Stationary AR(1): `x_0 ~ N(0, σ²)`, innovations with variance `σ²(1 − φ²)`.
pub fn gen_ar1<R: Rng>(phi: f64, n: usize, sigma: f64, rng: &mut R) -> Vec<f64> {
    let innovation = sigma * (1.0 - phi * phi).sqrt();
    let mut x = Vec::with_capacity(n);
    let mut prev = sigma * rng.sample::<f64, _>(StandardNormal);
    x.push(prev);
    for _ in 1..n {
        prev = phi * prev + innovation * rng.sample::<f64, _>(StandardNormal);
        x.push(prev);
    }
    x
}

pub fn gen_ramp(slope: f64, n: usize) -> Vec<f64> {
    (0..n).map(|t| slope * t as f64).collect()
}

/// Eigenvalues of the minimal power-of-two circulant embedding of the fGn
/// covariance for `n` samples, or `None` if any is negative.
fn circulant_eigenvalues(hurst: f64, sigma: f64, n: usize) -> Option<Vec<f64>> {
    let m = (n - 1).max(1).next_power_of_two();
    let size = 2 * m;
    let mut row: Vec<Complex<f64>> = (0..size)
        .map(|j| {
            let k = if j <= m { j } else { size - j };
            Complex::new(fgn_autocovariance(hurst, sigma, k), 0.0)
        })
        .collect();
    FftPlanner::<f64>::new()
        .plan_fft_forward(size)
        .process(&mut row);
    let largest = row.iter().map(|z| z.re).fold(0.0f64, f64::max);
    let mut eig = Vec::with_capacity(size);
    for z in row {
        if z.re < -1e-10 * largest {
            return None;
        }
        eig.push(z.re.max(0.0));
    }
    Some(eig)
}

pub fn gen_fgn<R: Rng>(hurst: f64, n: usize, sigma: f64, rng: &mut R) -> Vec<f64> {
    match circulant_eigenvalues(hurst, sigma, n) {
        Some(eig) => gen_fgn_circulant(&eig, n, rng),
        None => gen_fgn_conditional(hurst, n, sigma, rng),
    }
}

/// Real part of `FFT(sqrt(λ/M) · (A + iB))`, `A, B` iid standard normal, has
/// covariance equal to the first row of the circulant.
fn gen_fgn_circulant<R: Rng>(eig: &[f64], n: usize, rng: &mut R) -> Vec<f64> {
    let size = eig.len();
    let scale = 1.0 / size as f64;
    let mut buf: Vec<Complex<f64>> = eig
        .iter()
        .map(|&lambda| {
            let w = (lambda * scale).sqrt();
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(w * re, w * im)
        })
        .collect();
    FftPlanner::<f64>::new()
        .plan_fft_forward(size)
        .process(&mut buf);
    buf[..n].iter().map(|z| z.re).collect()
}

/// Durbin–Levinson recursion: each sample is drawn from its exact Gaussian
/// conditional given all previous samples.
pub fn gen_fgn_conditional<R: Rng>(hurst: f64, n: usize, sigma: f64, rng: &mut R) -> Vec<f64> {
    let gamma: Vec<f64> = (0..n)
        .map(|k| fgn_autocovariance(hurst, sigma, k))
        .collect();
    let mut x = Vec::with_capacity(n);
    let mut coeffs: Vec<f64> = Vec::with_capacity(n);
    let mut variance = gamma[0];
    x.push(variance.sqrt() * rng.sample::<f64, _>(StandardNormal));
    for t in 1..n {
        let num = gamma[t]
            - coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c * gamma[t - 1 - j])
                .sum::<f64>();
        let reflection = num / variance;
        let previous = coeffs.clone();
        for (j, c) in coeffs.iter_mut().enumerate() {
            *c -= reflection * previous[t - 2 - j];
        }
        coeffs.push(reflection);
        variance *= 1.0 - reflection * reflection;
        // coeffs[j] multiplies x[t-1-j]
        let mean: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * x[t - 1 - j])
            .sum();
        x.push(mean + variance.max(0.0).sqrt() * rng.sample::<f64, _>(StandardNormal));
    }
    x
}
