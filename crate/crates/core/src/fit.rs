//! Power and exponential decay fits by damped Gauss–Newton
//! (Levenberg–Marquardt) least squares.
//!
//! Both models have two parameters, so the normal equations are solved in
//! closed form. Damping is Marquardt-scaled: the diagonal of `JᵀJ` is
//! inflated by `(1 + λ)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::acf::{AcfCurve, MIN_FIT_POINTS};
use crate::error::{Error, Result};

/// Ordinates at or below zero are clamped here before log-linearisation.
const LOG_FLOOR: f64 = 1e-6;

/// SSE differences below this are a tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

const MAX_DAMPING: f64 = 1e30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// `a * x^b`
    Power,
    /// `a * exp(b * x)`
    Exponential,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Power => "power",
            ModelKind::Exponential => "exponential",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" | "pow" => Ok(ModelKind::Power),
            "exponential" | "exp" => Ok(ModelKind::Exponential),
            other => Err(Error::argument(format!("unknown model kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayModel {
    pub kind: ModelKind,
    pub a: f64,
    pub b: f64,
}

impl DecayModel {
    pub fn power(a: f64, b: f64) -> Self {
        DecayModel {
            kind: ModelKind::Power,
            a,
            b,
        }
    }

    pub fn exponential(a: f64, b: f64) -> Self {
        DecayModel {
            kind: ModelKind::Exponential,
            a,
            b,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            ModelKind::Power => self.a * x.powf(self.b),
            ModelKind::Exponential => self.a * (self.b * x).exp(),
        }
    }

    /// `[∂f/∂a, ∂f/∂b]` at `x`.
    pub fn jacobian(&self, x: f64) -> [f64; 2] {
        match self.kind {
            ModelKind::Power => {
                let base = x.powf(self.b);
                [base, self.a * x.ln() * base]
            }
            ModelKind::Exponential => {
                let base = (self.b * x).exp();
                [base, self.a * x * base]
            }
        }
    }

    /// `a > 0` and `b < 0`.
    pub fn is_decaying(&self) -> bool {
        self.a > 0.0 && self.b < 0.0
    }

    fn with_params(&self, a: f64, b: f64) -> Self {
        DecayModel {
            kind: self.kind,
            a,
            b,
        }
    }
}

/// Sum of squared residuals `Σ (y - f(x))²`.
pub fn sse(points: &[(f64, f64)], model: &DecayModel) -> f64 {
    points
        .iter()
        .map(|&(x, y)| {
            let r = y - model.eval(x);
            r * r
        })
        .sum()
}

/// Gradient of [`sse`] with respect to `(a, b)`.
pub fn sse_gradient(points: &[(f64, f64)], model: &DecayModel) -> [f64; 2] {
    let mut g = [0.0; 2];
    for &(x, y) in points {
        let r = y - model.eval(x);
        let j = model.jacobian(x);
        g[0] -= 2.0 * r * j[0];
        g[1] -= 2.0 * r * j[1];
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Converged when the ∞-norm of the SSE gradient falls below this.
    pub gradient_tolerance: f64,
    /// Converged when a step is this small relative to the parameters.
    pub step_tolerance: f64,
    pub initial_damping: f64,
    pub damping_factor: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 200,
            gradient_tolerance: 1e-10,
            step_tolerance: 1e-12,
            initial_damping: 1e-3,
            damping_factor: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    GradientTolerance,
    StepTolerance,
    MaxIterations,
    DampingOverflow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: DecayModel,
    pub sse: f64,
    /// SSE at the log-linear starting point.
    pub initial_sse: f64,
    pub iterations: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
    /// ∞-norm of the SSE gradient at the returned parameters.
    pub gradient_norm: f64,
    /// Inclusive abscissa range of the fitted points.
    pub fit_range: (f64, f64),
    pub points: usize,
    /// Ordinates at or below zero clamped for the starting point.
    pub clamped_points: usize,
    /// False when the fit is not a decay (`a <= 0` or `b >= 0`).
    pub decaying: bool,
}

fn validate_points(points: &[(f64, f64)], kind: ModelKind) -> Result<()> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::argument(format!(
            "fit needs at least {MIN_FIT_POINTS} points, got {}",
            points.len()
        )));
    }
    if let Some(&(x, y)) = points
        .iter()
        .find(|(x, y)| !x.is_finite() || !y.is_finite())
    {
        return Err(Error::argument(format!("non-finite point ({x}, {y})")));
    }
    if kind == ModelKind::Power {
        if let Some(&(x, _)) = points.iter().find(|(x, _)| *x < 1.0) {
            return Err(Error::argument(format!(
                "power model needs abscissae >= 1, got {x}"
            )));
        }
    }
    let first = points[0].0;
    if points.iter().all(|&(x, _)| x == first) {
        return Err(Error::argument("all abscissae are identical"));
    }
    Ok(())
}

/// Starting point from ordinary least squares on `ln y` against `ln x`
/// (power) or `x` (exponential). Returns the model and the clamp count.
pub fn initial_guess(points: &[(f64, f64)], kind: ModelKind) -> Result<(DecayModel, usize)> {
    validate_points(points, kind)?;
    let mut clamped = 0usize;
    let transformed: Vec<(f64, f64)> = points
        .iter()
        .map(|&(x, y)| {
            let y = if y > 0.0 {
                y
            } else {
                clamped += 1;
                LOG_FLOOR
            };
            let u = match kind {
                ModelKind::Power => x.ln(),
                ModelKind::Exponential => x,
            };
            (u, y.ln())
        })
        .collect();
    let (slope, intercept) = ols(&transformed);
    Ok((
        DecayModel {
            kind,
            a: intercept.exp(),
            b: slope,
        },
        clamped,
    ))
}

fn ols(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Normal-equation pieces `JᵀJ` (symmetric, stored as `[m00, m01, m11]`)
/// and `Jᵀr` at `model`.
fn normal_equations(points: &[(f64, f64)], model: &DecayModel) -> ([f64; 3], [f64; 2]) {
    let mut m = [0.0; 3];
    let mut g = [0.0; 2];
    for &(x, y) in points {
        let r = y - model.eval(x);
        let [ja, jb] = model.jacobian(x);
        m[0] += ja * ja;
        m[1] += ja * jb;
        m[2] += jb * jb;
        g[0] += ja * r;
        g[1] += jb * r;
    }
    (m, g)
}

fn solve_damped(m: [f64; 3], g: [f64; 2], damping: f64) -> Option<[f64; 2]> {
    let d0 = m[0] * (1.0 + damping);
    let d1 = m[2] * (1.0 + damping);
    let det = d0 * d1 - m[1] * m[1];
    if !(det.is_finite() && det > 0.0) {
        return None;
    }
    Some([
        (d1 * g[0] - m[1] * g[1]) / det,
        (d0 * g[1] - m[1] * g[0]) / det,
    ])
}

pub fn fit_points(points: &[(f64, f64)], kind: ModelKind, opts: &FitOptions) -> Result<FitResult> {
    let (start, clamped) = initial_guess(points, kind)?;
    let initial_sse = sse(points, &start);

    let mut model = start;
    let mut current = initial_sse;
    let mut damping = opts.initial_damping;
    let mut iterations = 0usize;
    let mut stop = StopReason::MaxIterations;

    // A non-finite start (overflowing exponent) cannot be improved on.
    if !current.is_finite() {
        stop = StopReason::DampingOverflow;
    } else {
        while iterations < opts.max_iterations {
            let (m, g) = normal_equations(points, &model);
            // dSSE/dθ = -2 Jᵀr
            let grad_norm = 2.0 * g[0].abs().max(g[1].abs());
            if grad_norm < opts.gradient_tolerance {
                stop = StopReason::GradientTolerance;
                break;
            }
            iterations += 1;

            let step = solve_damped(m, g, damping);
            let Some([da, db]) = step else {
                damping *= opts.damping_factor;
                if damping > MAX_DAMPING {
                    stop = StopReason::DampingOverflow;
                    break;
                }
                continue;
            };

            let step_norm = da.hypot(db);
            let scale = model.a.hypot(model.b);
            if step_norm <= opts.step_tolerance * (scale + opts.step_tolerance) {
                stop = StopReason::StepTolerance;
                break;
            }

            let candidate = model.with_params(model.a + da, model.b + db);
            let trial = sse(points, &candidate);
            if trial.is_finite() && trial < current {
                model = candidate;
                current = trial;
                damping /= opts.damping_factor;
            } else {
                damping *= opts.damping_factor;
                if damping > MAX_DAMPING {
                    stop = StopReason::DampingOverflow;
                    break;
                }
            }
        }
    }

    let grad = sse_gradient(points, &model);
    let converged = matches!(
        stop,
        StopReason::GradientTolerance | StopReason::StepTolerance
    );
    Ok(FitResult {
        model,
        sse: current,
        initial_sse,
        iterations,
        converged,
        stop_reason: stop,
        gradient_norm: grad[0].abs().max(grad[1].abs()),
        fit_range: (points[0].0, points[points.len() - 1].0),
        points: points.len(),
        clamped_points: clamped,
        decaying: model.is_decaying(),
    })
}

/// Fits `kind` to a truncated ACF over its fit range.
pub fn fit_model(curve: &AcfCurve, kind: ModelKind) -> Result<FitResult> {
    fit_points(&curve.fit_points(), kind, &FitOptions::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecayKind {
    PowerLike,
    ExponentialLike,
    Indeterminate,
}

impl fmt::Display for DecayKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecayKind::PowerLike => "PowerLike",
            DecayKind::ExponentialLike => "ExponentialLike",
            DecayKind::Indeterminate => "Indeterminate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayVerdict {
    pub kind: DecayKind,
    /// `power.sse / exponential.sse`; absent when the exponential SSE is zero.
    pub sse_ratio: Option<f64>,
}

pub fn compare_fits(power: &FitResult, exponential: &FitResult) -> Result<DecayVerdict> {
    if power.model.kind != ModelKind::Power || exponential.model.kind != ModelKind::Exponential {
        return Err(Error::argument(
            "compare_fits expects a power fit and an exponential fit",
        ));
    }
    if power.fit_range != exponential.fit_range || power.points != exponential.points {
        return Err(Error::argument(format!(
            "fit ranges differ: {:?} vs {:?}",
            power.fit_range, exponential.fit_range
        )));
    }
    let kind = if (power.sse - exponential.sse).abs() < TIE_TOLERANCE {
        DecayKind::Indeterminate
    } else if power.sse < exponential.sse {
        DecayKind::PowerLike
    } else {
        DecayKind::ExponentialLike
    };
    let sse_ratio = (exponential.sse > 0.0).then(|| power.sse / exponential.sse);
    Ok(DecayVerdict { kind, sse_ratio })
}
