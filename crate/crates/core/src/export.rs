//! Plot-ready CSV tables.

use std::fmt::Write as _;

use crate::acf::AcfCurve;
use crate::fit::FitResult;
use crate::hurst::HurstEstimate;

/// `lag,acf` for every lag of the curve.
pub fn acf_csv(curve: &AcfCurve) -> String {
    let mut out = String::from("lag,acf\n");
    for (k, v) in curve.values.iter().enumerate() {
        let _ = writeln!(out, "{k},{v}");
    }
    out
}

/// `lag,acf,power_fit,exp_fit` over the curve's fit range.
pub fn fit_csv(curve: &AcfCurve, power: &FitResult, exponential: &FitResult) -> String {
    let mut out = String::from("lag,acf,power_fit,exp_fit\n");
    for (x, y) in curve.fit_points() {
        let _ = writeln!(
            out,
            "{},{y},{},{}",
            x as usize,
            power.model.eval(x),
            exponential.model.eval(x)
        );
    }
    out
}

/// `log_tau,log_rs,regression` per span, largest span first.
pub fn rs_csv(estimate: &HurstEstimate) -> String {
    let mut out = String::from("log_tau,log_rs,regression\n");
    for p in &estimate.points {
        let log_tau = (p.span as f64).ln();
        let _ = writeln!(
            out,
            "{log_tau},{},{}",
            p.mean_rs.ln(),
            estimate.intercept + estimate.h * log_tau
        );
    }
    out
}
