//! Python bindings for `lrd-core`.
//!
//! Structured results expose their main fields as attributes and the full
//! record through `to_json()`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use lrd_core::acf::{self, AcfCurve};
use lrd_core::analysis::{self, AnalysisConfig, Provenance};
use lrd_core::fit::{self, FitResult, ModelKind};
use lrd_core::hurst::{self, HurstEstimate, Persistence, RsOptions};
use lrd_core::ingest::{self, GapPolicy, LinkDescriptor, Manifest, NodePosition};
use lrd_core::stationarity::{self, StationarityReport, WssVerdict};
use lrd_core::synth::{self, SynthKind, SynthSpec};
use lrd_core::validate::{self, ValidationOptions};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::de::DeserializeOwned;

create_exception!(lrd_kit, LrdError, PyValueError);

fn err(e: lrd_core::Error) -> PyErr {
    LrdError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = lrd_core::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

/// Parses an enum from its serialized label.
fn label<T: DeserializeOwned>(s: &str, what: &str) -> PyResult<T> {
    serde_json::from_value(serde_json::Value::String(s.to_owned()))
        .map_err(|_| LrdError::new_err(format!("unknown {what} {s:?}")))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

#[pyclass(
    name = "LinkDescriptor",
    module = "lrd_kit",
    frozen,
    skip_from_py_object,
    eq
)]
#[derive(Clone, PartialEq)]
struct PyLink(LinkDescriptor);

#[pymethods]
impl PyLink {
    #[new]
    fn new(tx_subject: u8, tx_pos: &str, rx_subject: u8, rx_pos: &str) -> PyResult<Self> {
        let tx_pos: NodePosition = parse(tx_pos)?;
        let rx_pos: NodePosition = parse(rx_pos)?;
        LinkDescriptor::new(tx_subject, tx_pos, rx_subject, rx_pos)
            .map(PyLink)
            .map_err(err)
    }

    /// Parses `"3:LH-7:LW"`.
    #[staticmethod]
    fn parse(s: &str) -> PyResult<Self> {
        parse(s).map(PyLink)
    }

    #[getter]
    fn tx_subject(&self) -> u8 {
        self.0.tx_subject()
    }

    #[getter]
    fn tx_pos(&self) -> String {
        self.0.tx_pos().to_string()
    }

    #[getter]
    fn rx_subject(&self) -> u8 {
        self.0.rx_subject()
    }

    #[getter]
    fn rx_pos(&self) -> String {
        self.0.rx_pos().to_string()
    }

    #[getter]
    fn is_on_body(&self) -> bool {
        self.0.is_on_body()
    }

    #[getter]
    fn link_class(&self) -> &'static str {
        self.0.class().name()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("LinkDescriptor('{}')", self.0)
    }
}

/// A gain trace in dB. NaN samples are missing slots.
#[pyclass(name = "ChannelTrace", module = "lrd_kit", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTrace(ingest::ChannelTrace);

#[pymethods]
impl PyTrace {
    #[new]
    #[pyo3(signature = (link, samples, sample_rate=ingest::DEFAULT_SAMPLE_RATE))]
    fn new(link: &PyLink, samples: Vec<f64>, sample_rate: f64) -> PyResult<Self> {
        let missing = samples.iter().map(|x| x.is_nan()).collect();
        ingest::ChannelTrace::with_missing(link.0, sample_rate, samples, missing)
            .map(PyTrace)
            .map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (path, link, sample_rate=ingest::DEFAULT_SAMPLE_RATE))]
    fn load(path: PathBuf, link: &PyLink, sample_rate: f64) -> PyResult<Self> {
        ingest::load_trace(&path, link.0, sample_rate)
            .map(PyTrace)
            .map_err(err)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.0.save(&path).map_err(err)
    }

    /// `"drop"`, `"hold-last"` or `"linear-interpolate"`.
    fn apply_gap_policy(&self, policy: &str) -> PyResult<Self> {
        ingest::apply_gap_policy(&self.0, parse(policy)?)
            .map(PyTrace)
            .map_err(err)
    }

    #[getter]
    fn link(&self) -> PyLink {
        PyLink(*self.0.link())
    }

    #[getter]
    fn link_class(&self) -> &'static str {
        self.0.class().name()
    }

    #[getter]
    fn sample_rate(&self) -> f64 {
        self.0.sample_rate()
    }

    #[getter]
    fn samples(&self) -> Vec<f64> {
        self.0.samples().to_vec()
    }

    #[getter]
    fn missing_mask(&self) -> Vec<bool> {
        self.0.missing_mask().to_vec()
    }

    #[getter]
    fn missing_count(&self) -> usize {
        self.0.missing_count()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "ChannelTrace('{}', len={}, missing={})",
            self.0.link(),
            self.0.len(),
            self.0.missing_count()
        )
    }
}

#[pyclass(name = "AcfCurve", module = "lrd_kit", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyAcf(AcfCurve);

#[pymethods]
impl PyAcf {
    #[getter]
    fn values(&self) -> Vec<f64> {
        self.0.values.clone()
    }

    #[getter]
    fn source_len(&self) -> usize {
        self.0.source_len
    }

    #[getter]
    fn max_lag(&self) -> usize {
        self.0.max_lag()
    }

    #[getter]
    fn truncation_lag(&self) -> Option<usize> {
        self.0.truncation_lag
    }

    #[getter]
    fn fit_range(&self) -> Option<(usize, usize)> {
        self.0.fit_range
    }

    fn fit_points(&self) -> Vec<(f64, f64)> {
        self.0.fit_points()
    }

    #[pyo3(signature = (threshold=acf::DEFAULT_THRESHOLD))]
    fn truncate(&self, threshold: f64) -> PyResult<Self> {
        acf::truncate_at_threshold(&self.0, threshold)
            .map(PyAcf)
            .map_err(err)
    }

    /// `lag,acf` table.
    fn to_csv(&self) -> String {
        lrd_core::export::acf_csv(&self.0)
    }

    fn to_json(&self) -> String {
        to_json(&self.0)
    }

    fn __len__(&self) -> usize {
        self.0.values.len()
    }
}

#[pyclass(name = "FitResult", module = "lrd_kit", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFit(FitResult);

#[pymethods]
impl PyFit {
    #[getter]
    fn kind(&self) -> String {
        self.0.model.kind.to_string()
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.model.a
    }

    #[getter]
    fn b(&self) -> f64 {
        self.0.model.b
    }

    #[getter]
    fn sse(&self) -> f64 {
        self.0.sse
    }

    #[getter]
    fn initial_sse(&self) -> f64 {
        self.0.initial_sse
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.0.iterations
    }

    #[getter]
    fn converged(&self) -> bool {
        self.0.converged
    }

    #[getter]
    fn decaying(&self) -> bool {
        self.0.decaying
    }

    #[getter]
    fn points(&self) -> usize {
        self.0.points
    }

    fn eval(&self, x: f64) -> f64 {
        self.0.model.eval(x)
    }

    /// `[d/da, d/db]` of the model at `x`.
    fn jacobian(&self, x: f64) -> [f64; 2] {
        self.0.model.jacobian(x)
    }

    fn to_json(&self) -> String {
        to_json(&self.0)
    }

    fn __repr__(&self) -> String {
        format!(
            "FitResult({}, a={}, b={}, sse={})",
            self.0.model.kind, self.0.model.a, self.0.model.b, self.0.sse
        )
    }
}

#[pyclass(
    name = "HurstEstimate",
    module = "lrd_kit",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
struct PyHurst(HurstEstimate);

#[pymethods]
impl PyHurst {
    #[getter]
    fn h(&self) -> f64 {
        self.0.h
    }

    #[getter]
    fn intercept(&self) -> f64 {
        self.0.intercept
    }

    #[getter]
    fn r_squared(&self) -> f64 {
        self.0.r_squared
    }

    #[getter]
    fn classification(&self) -> String {
        self.0.classification.to_string()
    }

    #[getter]
    fn in_unit_interval(&self) -> bool {
        self.0.in_unit_interval
    }

    /// `(span, mean_rs, window_count)` per span, largest first.
    #[getter]
    fn points(&self) -> Vec<(usize, f64, usize)> {
        self.0
            .points
            .iter()
            .map(|p| (p.span, p.mean_rs, p.window_count))
            .collect()
    }

    /// `log_tau,log_rs,regression` table.
    fn to_csv(&self) -> String {
        lrd_core::export::rs_csv(&self.0)
    }

    fn to_json(&self) -> String {
        to_json(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("HurstEstimate(h={}, {})", self.0.h, self.0.classification)
    }
}

#[pyclass(
    name = "StationarityReport",
    module = "lrd_kit",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
struct PyWss(StationarityReport);

#[pymethods]
impl PyWss {
    #[getter]
    fn verdict(&self) -> String {
        self.0.verdict.to_string()
    }

    #[getter]
    fn mean_spread(&self) -> f64 {
        self.0.mean_spread
    }

    #[getter]
    fn var_ratio(&self) -> f64 {
        self.0.var_ratio
    }

    #[getter]
    fn window_len(&self) -> usize {
        self.0.window_len
    }

    #[getter]
    fn windows(&self) -> usize {
        self.0.windows
    }

    fn to_json(&self) -> String {
        to_json(&self.0)
    }

    fn __repr__(&self) -> String {
        format!(
            "StationarityReport({}, mean_spread={}, var_ratio={})",
            self.0.verdict, self.0.mean_spread, self.0.var_ratio
        )
    }
}

fn rs_options(min_span: usize) -> RsOptions {
    RsOptions {
        min_span,
        ..RsOptions::default()
    }
}

#[pyfunction]
#[pyo3(signature = (samples, max_lag=None))]
fn acf_estimate(samples: Vec<f64>, max_lag: Option<usize>) -> PyResult<PyAcf> {
    let max_lag = max_lag.unwrap_or_else(|| acf::default_max_lag(samples.len()));
    acf::acf_estimate(&samples, max_lag).map(PyAcf).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (trace, max_lag=None))]
fn acf_of_trace(trace: &PyTrace, max_lag: Option<usize>) -> PyResult<PyAcf> {
    acf::acf_of_trace(&trace.0, max_lag).map(PyAcf).map_err(err)
}

#[pyfunction]
fn average_acf(curves: Vec<PyRef<'_, PyAcf>>) -> PyResult<PyAcf> {
    let curves: Vec<AcfCurve> = curves.iter().map(|c| c.0.clone()).collect();
    acf::average_acf(&curves).map(PyAcf).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (curve, threshold=acf::DEFAULT_THRESHOLD))]
fn truncate_at_threshold(curve: &PyAcf, threshold: f64) -> PyResult<PyAcf> {
    curve.truncate(threshold)
}

/// Fits `"power"` or `"exponential"` over the curve's fit range.
#[pyfunction]
fn fit_decay(curve: &PyAcf, kind: &str) -> PyResult<PyFit> {
    let kind: ModelKind = parse(kind)?;
    fit::fit_model(&curve.0, kind).map(PyFit).map_err(err)
}

/// Fits `(x, y)` pairs directly.
#[pyfunction]
fn fit_points(points: Vec<(f64, f64)>, kind: &str) -> PyResult<PyFit> {
    let kind: ModelKind = parse(kind)?;
    fit::fit_points(&points, kind, &fit::FitOptions::default())
        .map(PyFit)
        .map_err(err)
}

/// Returns `(decay_kind, sse_ratio)`.
#[pyfunction]
fn compare_fits(power: &PyFit, exponential: &PyFit) -> PyResult<(String, Option<f64>)> {
    let v = fit::compare_fits(&power.0, &exponential.0).map_err(err)?;
    Ok((v.kind.to_string(), v.sse_ratio))
}

#[pyfunction]
fn rs_statistic(window: Vec<f64>) -> PyResult<f64> {
    hurst::rs_statistic(&window).map_err(err)
}

/// `(span, mean_rs, window_count)` per dyadic span.
#[pyfunction]
#[pyo3(signature = (samples, min_span=hurst::DEFAULT_MIN_SPAN))]
fn rs_curve(samples: Vec<f64>, min_span: usize) -> PyResult<Vec<(usize, f64, usize)>> {
    let points = hurst::rs_curve(&samples, &rs_options(min_span)).map_err(err)?;
    Ok(points
        .iter()
        .map(|p| (p.span, p.mean_rs, p.window_count))
        .collect())
}

#[pyfunction]
#[pyo3(signature = (samples, min_span=hurst::DEFAULT_MIN_SPAN))]
fn hurst_of_samples(samples: Vec<f64>, min_span: usize) -> PyResult<PyHurst> {
    hurst::hurst_of_samples(&samples, &rs_options(min_span))
        .map(PyHurst)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (trace, min_span=hurst::DEFAULT_MIN_SPAN))]
fn hurst_of_trace(trace: &PyTrace, min_span: usize) -> PyResult<PyHurst> {
    hurst::hurst_of_trace(&trace.0, &rs_options(min_span))
        .map(PyHurst)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (traces, min_span=hurst::DEFAULT_MIN_SPAN))]
fn group_hurst(traces: Vec<PyRef<'_, PyTrace>>, min_span: usize) -> PyResult<PyHurst> {
    let traces: Vec<_> = traces.iter().map(|t| t.0.clone()).collect();
    hurst::group_hurst(&traces, &rs_options(min_span))
        .map(PyHurst)
        .map_err(err)
}

#[pyfunction]
fn classify(h: f64) -> String {
    hurst::classify(h).to_string()
}

/// Traces keyed by link class name; every class is present.
#[pyfunction]
fn group_traces(traces: Vec<PyRef<'_, PyTrace>>) -> BTreeMap<&'static str, Vec<PyTrace>> {
    ingest::group_traces(traces.iter().map(|t| t.0.clone()))
        .into_iter()
        .map(|(class, ts)| (class.name(), ts.into_iter().map(PyTrace).collect()))
        .collect()
}

fn synth_kind(
    kind: &str,
    hurst: Option<f64>,
    phi: Option<f64>,
    slope: Option<f64>,
    base: Option<&str>,
) -> PyResult<SynthKind> {
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| LrdError::new_err(format!("kind {kind:?} needs {name}")))
    };
    Ok(match kind {
        "fgn" => SynthKind::Fgn {
            hurst: need(hurst, "hurst")?,
        },
        "white" => SynthKind::White,
        "ar1" => SynthKind::Ar1 {
            phi: need(phi, "phi")?,
        },
        "ramp" => SynthKind::Ramp {
            slope: need(slope, "slope")?,
        },
        "composite" => {
            let base = base.unwrap_or("white");
            if base == "composite" {
                return Err(LrdError::new_err("composite base cannot be composite"));
            }
            SynthKind::Composite {
                base: Box::new(synth_kind(base, hurst, phi, Some(0.0), None)?),
                slope: need(slope, "slope")?,
            }
        }
        other => return Err(LrdError::new_err(format!("unknown synth kind {other:?}"))),
    })
}

/// Deterministic synthetic series: `"fgn"`, `"white"`, `"ar1"`, `"ramp"`
/// or `"composite"` (a `base` kind plus a `slope` ramp).
#[pyfunction]
#[pyo3(signature = (kind, n, seed=0, sigma=1.0, hurst=None, phi=None, slope=None, base=None))]
#[allow(clippy::too_many_arguments)]
fn synthesize(
    py: Python<'_>,
    kind: &str,
    n: usize,
    seed: u64,
    sigma: f64,
    hurst: Option<f64>,
    phi: Option<f64>,
    slope: Option<f64>,
    base: Option<&str>,
) -> PyResult<Vec<f64>> {
    let spec =
        SynthSpec::new(synth_kind(kind, hurst, phi, slope, base)?, n, sigma, seed).map_err(err)?;
    py.detach(|| spec.generate()).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (hurst, k, sigma=1.0))]
fn fgn_autocovariance(hurst: f64, k: usize, sigma: f64) -> f64 {
    synth::fgn_autocovariance(hurst, sigma, k)
}

#[pyfunction]
#[pyo3(signature = (
    samples,
    window_len=None,
    mean_tol=stationarity::DEFAULT_MEAN_TOL_DB,
    var_ratio_tol=stationarity::DEFAULT_VAR_RATIO_TOL,
))]
fn wss_screen(
    samples: Vec<f64>,
    window_len: Option<usize>,
    mean_tol: f64,
    var_ratio_tol: f64,
) -> PyResult<PyWss> {
    let window_len = window_len.unwrap_or_else(|| stationarity::default_window_len(samples.len()));
    stationarity::wss_screen(&samples, window_len, mean_tol, var_ratio_tol)
        .map(PyWss)
        .map_err(err)
}

/// Combines a persistence class and a WSS verdict, e.g.
/// `qualify("persistent", "WSS-consistent")`.
#[pyfunction]
fn qualify(classification: &str, wss: &str) -> PyResult<String> {
    let c: Persistence = label(classification, "classification")?;
    let w: WssVerdict = label(wss, "stationarity verdict")?;
    Ok(stationarity::qualify(c, w).to_string())
}

#[pyfunction]
fn qualify_verdict(hurst: &PyHurst, report: &PyWss) -> String {
    stationarity::qualify_verdict(&hurst.0, &report.0).to_string()
}

#[allow(clippy::too_many_arguments)]
fn config(
    gap_policy: Option<&str>,
    acf_threshold: Option<f64>,
    max_lag: Option<usize>,
    min_span: Option<usize>,
    window_len: Option<usize>,
    mean_tol: Option<f64>,
    var_ratio_tol: Option<f64>,
) -> PyResult<AnalysisConfig> {
    let mut cfg = AnalysisConfig::default();
    if let Some(p) = gap_policy {
        cfg.gap_policy = parse::<GapPolicy>(p)?;
    }
    cfg.acf_threshold = acf_threshold.unwrap_or(cfg.acf_threshold);
    cfg.max_lag = max_lag.or(cfg.max_lag);
    cfg.min_span = min_span.unwrap_or(cfg.min_span);
    cfg.window_len = window_len.or(cfg.window_len);
    cfg.mean_tol = mean_tol.unwrap_or(cfg.mean_tol);
    cfg.var_ratio_tol = var_ratio_tol.unwrap_or(cfg.var_ratio_tol);
    cfg.validate().map_err(err)?;
    Ok(cfg)
}

type AnalysisOutput = (String, BTreeMap<String, String>);
type ValidationOutput = (bool, Vec<(String, String, bool)>);

fn analysis_output(a: analysis::Analysis) -> AnalysisOutput {
    let plots = a
        .plots
        .into_iter()
        .map(|p| (p.file_name, p.contents))
        .collect();
    (a.report.to_json(), plots)
}

/// Analyses a manifest file. Returns the report JSON and the plot CSVs
/// keyed by file name.
#[pyfunction]
#[pyo3(signature = (
    manifest,
    gap_policy=None,
    acf_threshold=None,
    max_lag=None,
    min_span=None,
    window_len=None,
    mean_tol=None,
    var_ratio_tol=None,
))]
#[allow(clippy::too_many_arguments)]
fn analyze_manifest(
    py: Python<'_>,
    manifest: PathBuf,
    gap_policy: Option<&str>,
    acf_threshold: Option<f64>,
    max_lag: Option<usize>,
    min_span: Option<usize>,
    window_len: Option<usize>,
    mean_tol: Option<f64>,
    var_ratio_tol: Option<f64>,
) -> PyResult<AnalysisOutput> {
    let cfg = config(
        gap_policy,
        acf_threshold,
        max_lag,
        min_span,
        window_len,
        mean_tol,
        var_ratio_tol,
    )?;
    let manifest = Manifest::load(Path::new(&manifest)).map_err(err)?;
    let a = py
        .detach(|| analysis::analyze_manifest(&manifest, &cfg))
        .map_err(err)?;
    Ok(analysis_output(a))
}

/// Analyses in-memory traces. Returns the report JSON and the plot CSVs.
#[pyfunction]
#[pyo3(signature = (
    traces,
    gap_policy=None,
    acf_threshold=None,
    max_lag=None,
    min_span=None,
    window_len=None,
    mean_tol=None,
    var_ratio_tol=None,
))]
#[allow(clippy::too_many_arguments)]
fn analyze_traces(
    py: Python<'_>,
    traces: Vec<PyRef<'_, PyTrace>>,
    gap_policy: Option<&str>,
    acf_threshold: Option<f64>,
    max_lag: Option<usize>,
    min_span: Option<usize>,
    window_len: Option<usize>,
    mean_tol: Option<f64>,
    var_ratio_tol: Option<f64>,
) -> PyResult<AnalysisOutput> {
    let cfg = config(
        gap_policy,
        acf_threshold,
        max_lag,
        min_span,
        window_len,
        mean_tol,
        var_ratio_tol,
    )?;
    let traces: Vec<_> = traces.iter().map(|t| t.0.clone()).collect();
    let provenance = Provenance {
        tool: analysis::TOOL_NAME.into(),
        tool_version: analysis::TOOL_VERSION.into(),
        manifest_sha256: None,
        inputs_sha256: None,
    };
    let a = py
        .detach(|| analysis::analyze_traces(traces, &cfg, provenance))
        .map_err(err)?;
    Ok(analysis_output(a))
}

/// Estimator validation table as `(all_passed, [(name, observed, passed)])`.
#[pyfunction]
#[pyo3(signature = (seeds=validate::RECOMMENDED_SEEDS, base_seed=0, n=1 << 15))]
fn run_validation(
    py: Python<'_>,
    seeds: usize,
    base_seed: u64,
    n: usize,
) -> PyResult<ValidationOutput> {
    let opts = ValidationOptions {
        seeds,
        base_seed,
        n,
    };
    let table = py.detach(|| validate::run_validation(&opts)).map_err(err)?;
    let passed = table.all_passed();
    let rows = table
        .rows
        .into_iter()
        .map(|r| (r.name, r.observed, r.passed))
        .collect();
    Ok((passed, rows))
}

#[pymodule]
fn lrd_kit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("LrdError", m.py().get_type::<LrdError>())?;
    m.add("__version__", analysis::TOOL_VERSION)?;
    m.add_class::<PyLink>()?;
    m.add_class::<PyTrace>()?;
    m.add_class::<PyAcf>()?;
    m.add_class::<PyFit>()?;
    m.add_class::<PyHurst>()?;
    m.add_class::<PyWss>()?;
    m.add_function(wrap_pyfunction!(acf_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(acf_of_trace, m)?)?;
    m.add_function(wrap_pyfunction!(average_acf, m)?)?;
    m.add_function(wrap_pyfunction!(truncate_at_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(fit_decay, m)?)?;
    m.add_function(wrap_pyfunction!(fit_points, m)?)?;
    m.add_function(wrap_pyfunction!(compare_fits, m)?)?;
    m.add_function(wrap_pyfunction!(rs_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(rs_curve, m)?)?;
    m.add_function(wrap_pyfunction!(hurst_of_samples, m)?)?;
    m.add_function(wrap_pyfunction!(hurst_of_trace, m)?)?;
    m.add_function(wrap_pyfunction!(group_hurst, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(group_traces, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(fgn_autocovariance, m)?)?;
    m.add_function(wrap_pyfunction!(wss_screen, m)?)?;
    m.add_function(wrap_pyfunction!(qualify, m)?)?;
    m.add_function(wrap_pyfunction!(qualify_verdict, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_manifest, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_traces, m)?)?;
    m.add_function(wrap_pyfunction!(run_validation, m)?)?;
    Ok(())
}
