//! End-to-end analysis of a manifest: per link class, the averaged ACF is
//! fitted with both decay models, the group Hurst exponent is estimated from
//! averaged R/S, every trace is screened for stationarity, and the results
//! are combined into a qualified verdict.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::acf::{self, AcfCurve};
use crate::error::{Error, Result};
use crate::export;
use crate::fit::{self, DecayVerdict, FitResult, ModelKind};
use crate::hurst::{self, HurstEstimate, RsOptions};
use crate::ingest::{
    apply_gap_policy, group_traces, parse_trace, ChannelTrace, GapPolicy, LinkClass, Manifest,
    MIN_ANALYSIS_LEN,
};
use crate::stationarity::{self, QualifiedVerdict, StationarityReport, WssVerdict};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_NAME: &str = "lrd-kit";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub gap_policy: GapPolicy,
    pub acf_threshold: f64,
    /// Largest ACF lag; `min(N/4, 4096)` when unset.
    pub max_lag: Option<usize>,
    pub min_span: usize,
    /// Stationarity window; an eighth of each trace when unset.
    pub window_len: Option<usize>,
    pub mean_tol: f64,
    pub var_ratio_tol: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            gap_policy: GapPolicy::default(),
            acf_threshold: acf::DEFAULT_THRESHOLD,
            max_lag: None,
            min_span: hurst::DEFAULT_MIN_SPAN,
            window_len: None,
            mean_tol: stationarity::DEFAULT_MEAN_TOL_DB,
            var_ratio_tol: stationarity::DEFAULT_VAR_RATIO_TOL,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.acf_threshold.is_finite() && self.acf_threshold < 1.0) {
            return Err(Error::argument(format!(
                "ACF threshold must be finite and below 1, got {}",
                self.acf_threshold
            )));
        }
        if self.min_span < 2 {
            return Err(Error::argument("minimum R/S span must be at least 2"));
        }
        if self.window_len == Some(0) {
            return Err(Error::argument("stationarity window must be positive"));
        }
        if !(self.mean_tol >= 0.0 && self.var_ratio_tol >= 1.0) {
            return Err(Error::argument(
                "mean tolerance must be >= 0 and variance-ratio tolerance >= 1",
            ));
        }
        Ok(())
    }

    fn rs_options(&self) -> RsOptions {
        RsOptions {
            min_span: self.min_span,
            max_halvings: None,
        }
    }
}

/// Success or a recorded failure for one stage of a class analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome<T> {
    Ok(T),
    Error(String),
}

impl<T> Outcome<T> {
    pub fn ok(&self) -> Option<&T> {
        match self {
            Outcome::Ok(v) => Some(v),
            Outcome::Error(_) => None,
        }
    }
}

impl<T> From<Result<T>> for Outcome<T> {
    fn from(r: Result<T>) -> Self {
        match r {
            Ok(v) => Outcome::Ok(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfSummary {
    pub source_len: usize,
    pub max_lag: usize,
    pub truncation_lag: Option<usize>,
    pub fit_range: Option<(usize, usize)>,
    /// Averaged ACF through the truncation lag (all lags if never truncated).
    pub head: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayAnalysis {
    pub power: FitResult,
    pub exponential: FitResult,
    pub verdict: DecayVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub link: String,
    /// Samples after the gap policy.
    pub samples: usize,
    pub missing_slots: usize,
    pub stationarity: Outcome<StationarityReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStationarity {
    pub wss_consistent: usize,
    pub non_stationary: usize,
    /// Majority of the screened traces; ties count as non-stationary.
    pub verdict: Option<WssVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub class: LinkClass,
    pub trace_count: usize,
    pub traces: Vec<TraceSummary>,
    pub acf: Outcome<AcfSummary>,
    pub decay: Outcome<DecayAnalysis>,
    pub hurst: Outcome<HurstEstimate>,
    pub stationarity: GroupStationarity,
    pub qualified: Option<QualifiedVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedTrace {
    pub link: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub tool_version: String,
    /// SHA-256 of the manifest bytes.
    pub manifest_sha256: Option<String>,
    /// SHA-256 over every trace file's bytes, in manifest order.
    pub inputs_sha256: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub provenance: Provenance,
    pub config: AnalysisConfig,
    pub classes: Vec<ClassReport>,
    #[serde(default)]
    pub skipped: Vec<SkippedTrace>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn class(&self, class: LinkClass) -> Option<&ClassReport> {
        self.classes.iter().find(|c| c.class == class)
    }
}

/// A named CSV table produced alongside the report.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotTable {
    pub file_name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub report: AnalysisReport,
    pub plots: Vec<PlotTable>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Loads and analyses every trace named by `manifest`.
pub fn analyze_manifest(manifest: &Manifest, config: &AnalysisConfig) -> Result<Analysis> {
    if manifest.entries.is_empty() {
        return Err(Error::argument("no traces"));
    }
    let loaded: Vec<(Vec<u8>, ChannelTrace)> = manifest
        .entries
        .par_iter()
        .map(|entry| {
            let path = manifest.resolve(entry);
            let bytes = std::fs::read(&path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            let parsed = parse_trace(bytes.as_slice(), entry.sample_rate_hz, &path)?;
            let trace = ChannelTrace::with_missing(
                entry.link()?,
                entry.sample_rate_hz,
                parsed.samples,
                parsed.missing,
            )?;
            Ok((bytes, trace))
        })
        .collect::<Result<_>>()?;

    let mut inputs = Sha256::new();
    for (bytes, _) in &loaded {
        inputs.update((bytes.len() as u64).to_le_bytes());
        inputs.update(bytes);
    }
    let provenance = Provenance {
        tool: TOOL_NAME.into(),
        tool_version: TOOL_VERSION.into(),
        manifest_sha256: Some(hex(&Sha256::digest(&manifest.raw))),
        inputs_sha256: Some(hex(&inputs.finalize())),
    };
    analyze_traces(
        loaded.into_iter().map(|(_, t)| t).collect(),
        config,
        provenance,
    )
}

/// Runs the full pipeline on in-memory traces.
pub fn analyze_traces(
    traces: Vec<ChannelTrace>,
    config: &AnalysisConfig,
    provenance: Provenance,
) -> Result<Analysis> {
    config.validate()?;
    let mut skipped = Vec::new();
    let mut usable = Vec::new();
    for trace in traces {
        let missing = trace.missing_count();
        let result = apply_gap_policy(&trace, config.gap_policy).and_then(|t| {
            if t.len() < MIN_ANALYSIS_LEN {
                Err(Error::argument(format!(
                    "{} samples after gap policy, need {MIN_ANALYSIS_LEN}",
                    t.len()
                )))
            } else {
                Ok(t)
            }
        });
        match result {
            Ok(t) => usable.push((t, missing)),
            Err(e) => skipped.push(SkippedTrace {
                link: trace.link().to_string(),
                reason: e.to_string(),
            }),
        }
    }
    if usable.is_empty() {
        return Err(Error::argument("no traces"));
    }
    usable.sort_by_key(|(t, _)| *t.link());

    let missing_by_link: BTreeMap<_, _> = usable.iter().map(|(t, m)| (*t.link(), *m)).collect();
    let groups = group_traces(usable.into_iter().map(|(t, _)| t));

    let analysed: Vec<(ClassReport, Vec<PlotTable>)> = groups
        .into_par_iter()
        .filter(|(_, traces)| !traces.is_empty())
        .map(|(class, traces)| analyze_class(class, &traces, &missing_by_link, config))
        .collect();

    let mut classes = Vec::new();
    let mut plots = Vec::new();
    for (report, tables) in analysed {
        classes.push(report);
        plots.extend(tables);
    }

    Ok(Analysis {
        report: AnalysisReport {
            schema_version: SCHEMA_VERSION,
            provenance,
            config: config.clone(),
            classes,
            skipped,
        },
        plots,
    })
}

fn analyze_class(
    class: LinkClass,
    traces: &[ChannelTrace],
    missing_by_link: &BTreeMap<crate::ingest::LinkDescriptor, usize>,
    config: &AnalysisConfig,
) -> (ClassReport, Vec<PlotTable>) {
    let mut plots = Vec::new();

    let curves: Result<Vec<AcfCurve>> = traces
        .iter()
        .map(|t| acf::acf_of_trace(t, config.max_lag))
        .collect();
    let averaged = curves.and_then(|c| acf::average_acf(&c));
    if let Ok(curve) = &averaged {
        plots.push(PlotTable {
            file_name: format!("acf_{class}.csv"),
            contents: export::acf_csv(curve),
        });
    }
    let truncated = averaged
        .as_ref()
        .map_err(|e| Error::argument(e.to_string()))
        .and_then(|c| acf::truncate_at_threshold(c, config.acf_threshold));

    let acf_summary: Outcome<AcfSummary> = match (&averaged, &truncated) {
        (Err(e), _) => Outcome::Error(e.to_string()),
        (Ok(c), t) => {
            let t = t.as_ref().ok();
            let truncation_lag = t.and_then(|t| t.truncation_lag);
            let end = truncation_lag.unwrap_or(c.max_lag());
            Outcome::Ok(AcfSummary {
                source_len: c.source_len,
                max_lag: c.max_lag(),
                truncation_lag,
                fit_range: t.and_then(|t| t.fit_range),
                head: c.values[..=end].to_vec(),
            })
        }
    };

    let decay: Outcome<DecayAnalysis> = truncated
        .and_then(|curve| {
            let power = fit::fit_model(&curve, ModelKind::Power)?;
            let exponential = fit::fit_model(&curve, ModelKind::Exponential)?;
            let verdict = fit::compare_fits(&power, &exponential)?;
            plots.push(PlotTable {
                file_name: format!("fit_{class}.csv"),
                contents: export::fit_csv(&curve, &power, &exponential),
            });
            Ok(DecayAnalysis {
                power,
                exponential,
                verdict,
            })
        })
        .into();

    let hurst_estimate: Outcome<HurstEstimate> =
        hurst::group_hurst(traces, &config.rs_options()).into();
    if let Some(h) = hurst_estimate.ok() {
        plots.push(PlotTable {
            file_name: format!("rs_{class}.csv"),
            contents: export::rs_csv(h),
        });
    }

    let summaries: Vec<TraceSummary> = traces
        .iter()
        .map(|t| {
            let x = t.samples();
            let window = config
                .window_len
                .unwrap_or_else(|| stationarity::default_window_len(x.len()));
            TraceSummary {
                link: t.link().to_string(),
                samples: x.len(),
                missing_slots: missing_by_link.get(t.link()).copied().unwrap_or(0),
                stationarity: stationarity::wss_screen(
                    x,
                    window,
                    config.mean_tol,
                    config.var_ratio_tol,
                )
                .into(),
            }
        })
        .collect();

    let verdicts = summaries
        .iter()
        .filter_map(|s| s.stationarity.ok().map(|r| r.verdict));
    let (mut wss_consistent, mut non_stationary) = (0, 0);
    for v in verdicts {
        match v {
            WssVerdict::WssConsistent => wss_consistent += 1,
            WssVerdict::NonStationary => non_stationary += 1,
        }
    }
    let group_verdict = match wss_consistent + non_stationary {
        0 => None,
        _ if wss_consistent > non_stationary => Some(WssVerdict::WssConsistent),
        _ => Some(WssVerdict::NonStationary),
    };
    let qualified = match (hurst_estimate.ok(), group_verdict) {
        (Some(h), Some(v)) => Some(stationarity::qualify(h.classification, v)),
        _ => None,
    };

    (
        ClassReport {
            class,
            trace_count: traces.len(),
            traces: summaries,
            acf: acf_summary,
            decay,
            hurst: hurst_estimate,
            stationarity: GroupStationarity {
                wss_consistent,
                non_stationary,
                verdict: group_verdict,
            },
            qualified,
        },
        plots,
    )
}

/// Text table with one row per analysed class.
pub fn summary_csv(report: &AnalysisReport) -> String {
    let mut out = String::from(
        "class,traces,truncation_lag,power_a,power_b,power_sse,exp_a,exp_b,exp_sse,decay,hurst,r_squared,persistence,wss,qualified\n",
    );
    for c in &report.classes {
        let opt = |v: Option<String>| v.unwrap_or_default();
        let decay = c.decay.ok();
        let fit_cols = |f: Option<&FitResult>| match f {
            Some(f) => format!("{:.4},{:.4},{:.4}", f.model.a, f.model.b, f.sse),
            None => ",,".into(),
        };
        let h = c.hurst.ok();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            c.class,
            c.trace_count,
            opt(c
                .acf
                .ok()
                .and_then(|a| a.truncation_lag)
                .map(|l| l.to_string())),
            fit_cols(decay.map(|d| &d.power)),
            fit_cols(decay.map(|d| &d.exponential)),
            opt(decay.map(|d| d.verdict.kind.to_string())),
            opt(h.map(|h| format!("{:.4}", h.h))),
            opt(h.map(|h| format!("{:.4}", h.r_squared))),
            opt(h.map(|h| h.classification.to_string())),
            opt(c.stationarity.verdict.map(|v| v.to_string())),
            opt(c.qualified.map(|q| q.to_string())),
        ));
    }
    out
}
