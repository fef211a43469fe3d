use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lrd_core::acf::{self, AcfCurve};
use lrd_core::analysis::{self, AnalysisConfig};
use lrd_core::export;
use lrd_core::fit::{self, ModelKind};
use lrd_core::hurst::{self, RsOptions};
use lrd_core::ingest::{self, ChannelTrace, GapPolicy, LinkDescriptor, Manifest};
use lrd_core::synth::{SynthKind, SynthSpec};
use lrd_core::validate::{self, ValidationOptions};
use lrd_core::Error;

const SEED_ENV: &str = "LRD_KIT_SEED";

#[derive(Parser)]
#[command(
    name = "lrd-kit",
    version,
    about = "Long-range dependence analysis of wireless channel-gain traces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Fgn,
    White,
    Ar1,
    Ramp,
    Composite,
}

#[derive(Subcommand)]
enum Command {
    /// Analyse every trace in a manifest, grouped by link class
    Analyze {
        #[arg(long)]
        manifest: PathBuf,
        /// TOML file with analysis settings; flags take precedence
        #[arg(long)]
        config: Option<PathBuf>,
        /// drop, hold-last or linear-interpolate [default: hold-last]
        #[arg(long)]
        gap_policy: Option<GapPolicy>,
        /// ACF truncation threshold [default: 0.5]
        #[arg(long)]
        acf_threshold: Option<f64>,
        /// Largest ACF lag [default: min(N/4, 4096)]
        #[arg(long)]
        max_lag: Option<usize>,
        /// Smallest R/S span [default: 8]
        #[arg(long)]
        min_span: Option<usize>,
        /// Stationarity window in samples [default: N/8]
        #[arg(long)]
        window_len: Option<usize>,
        /// Largest window-mean spread in dB [default: 1]
        #[arg(long)]
        mean_tol: Option<f64>,
        /// Largest window-variance ratio [default: 3]
        #[arg(long)]
        var_ratio_tol: Option<f64>,
        /// Directory for report.json and the plot CSVs
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Check the estimators against synthetic processes of known memory
    Validate {
        #[arg(long, default_value_t = validate::RECOMMENDED_SEEDS)]
        seeds: usize,
        /// First seed; defaults to $LRD_KIT_SEED or 0
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1 << 15)]
        n: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Generate a synthetic trace in the ingest CSV format
    Synth {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Hurst exponent for fgn
        #[arg(long)]
        h: Option<f64>,
        /// AR(1) coefficient
        #[arg(long)]
        phi: Option<f64>,
        /// Ramp slope per sample
        #[arg(long, default_value_t = 0.0)]
        slope: f64,
        /// Base process of a composite
        #[arg(long, value_enum)]
        base: Option<Kind>,
        #[arg(long, default_value_t = 1 << 15)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Defaults to $LRD_KIT_SEED or 0
        #[arg(long)]
        seed: Option<u64>,
        /// Constant added to every sample (dB)
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        offset: f64,
        #[arg(long, default_value_t = ingest::DEFAULT_SAMPLE_RATE)]
        rate: f64,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Autocorrelation of one trace file
    Acf {
        trace: PathBuf,
        #[arg(long, default_value_t = ingest::DEFAULT_SAMPLE_RATE)]
        rate: f64,
        #[arg(long, default_value = "1:LH-1:RA")]
        link: LinkDescriptor,
        #[arg(long, default_value = "hold-last")]
        gap_policy: GapPolicy,
        #[arg(long)]
        max_lag: Option<usize>,
        #[arg(long, default_value_t = acf::DEFAULT_THRESHOLD)]
        acf_threshold: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Rescaled-range Hurst estimate of one trace file
    Hurst {
        trace: PathBuf,
        #[arg(long, default_value_t = ingest::DEFAULT_SAMPLE_RATE)]
        rate: f64,
        #[arg(long, default_value = "1:LH-1:RA")]
        link: LinkDescriptor,
        #[arg(long, default_value = "hold-last")]
        gap_policy: GapPolicy,
        #[arg(long, default_value_t = hurst::DEFAULT_MIN_SPAN)]
        min_span: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

/// Exit status 1: the analysis ran but a check or estimate failed.
/// Exit status 2: bad usage or unreadable input.
enum Failure {
    Analysis(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DegenerateSeries
            | Error::DegenerateWindow
            | Error::InsufficientDecayRange { .. }
            | Error::InsufficientSpans { .. } => Failure::Analysis(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

fn default_seed() -> Result<u64, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::Input(format!("{SEED_ENV} must be an unsigned integer, got {v:?}"))
        }),
        Err(_) => Ok(0),
    }
}

fn write_stdout(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::Input(format!("stdout: {e}")))
}

fn load_single(
    path: &Path,
    link: LinkDescriptor,
    rate: f64,
    policy: GapPolicy,
) -> Result<ChannelTrace, Failure> {
    let trace = ingest::load_trace(path, link, rate)?;
    Ok(ingest::apply_gap_policy(&trace, policy)?)
}

fn synth_kind(
    kind: Kind,
    h: Option<f64>,
    phi: Option<f64>,
    slope: f64,
    base: Option<Kind>,
) -> Result<SynthKind, Failure> {
    let need = |v: Option<f64>, flag: &str| {
        v.ok_or_else(|| Failure::Input(format!("--kind {kind:?} requires --{flag}").to_lowercase()))
    };
    Ok(match kind {
        Kind::Fgn => SynthKind::Fgn {
            hurst: need(h, "h")?,
        },
        Kind::White => SynthKind::White,
        Kind::Ar1 => SynthKind::Ar1 {
            phi: need(phi, "phi")?,
        },
        Kind::Ramp => SynthKind::Ramp { slope },
        Kind::Composite => {
            let base =
                base.ok_or_else(|| Failure::Input("--kind composite requires --base".into()))?;
            if matches!(base, Kind::Composite) {
                return Err(Failure::Input(
                    "composite base cannot itself be composite".into(),
                ));
            }
            SynthKind::Composite {
                base: Box::new(synth_kind(base, h, phi, 0.0, None)?),
                slope,
            }
        }
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze {
            manifest,
            config,
            gap_policy,
            acf_threshold,
            max_lag,
            min_span,
            window_len,
            mean_tol,
            var_ratio_tol,
            out_dir,
            format,
        } => {
            let mut cfg = match &config {
                Some(path) => {
                    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
                    toml::from_str::<AnalysisConfig>(&text)
                        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
                }
                None => AnalysisConfig::default(),
            };
            if let Some(v) = gap_policy {
                cfg.gap_policy = v;
            }
            if let Some(v) = acf_threshold {
                cfg.acf_threshold = v;
            }
            if max_lag.is_some() {
                cfg.max_lag = max_lag;
            }
            if let Some(v) = min_span {
                cfg.min_span = v;
            }
            if window_len.is_some() {
                cfg.window_len = window_len;
            }
            if let Some(v) = mean_tol {
                cfg.mean_tol = v;
            }
            if let Some(v) = var_ratio_tol {
                cfg.var_ratio_tol = v;
            }

            let manifest = Manifest::load(&manifest)?;
            if manifest.entries.is_empty() {
                return Err(Failure::Input("no traces".into()));
            }
            let result = analysis::analyze_manifest(&manifest, &cfg)?;
            let json = result.report.to_json();
            if let Some(dir) = out_dir {
                fs::create_dir_all(&dir).map_err(|e| io_failure(&dir, e))?;
                let path = dir.join("report.json");
                fs::write(&path, &json).map_err(|e| io_failure(&path, e))?;
                for table in &result.plots {
                    let path = dir.join(&table.file_name);
                    fs::write(&path, &table.contents).map_err(|e| io_failure(&path, e))?;
                }
            }
            match format {
                Format::Json => write_stdout(&json),
                Format::Csv => write_stdout(&analysis::summary_csv(&result.report)),
            }
        }

        Command::Validate {
            seeds,
            seed,
            n,
            format,
        } => {
            let opts = ValidationOptions {
                seeds,
                base_seed: match seed {
                    Some(s) => s,
                    None => default_seed()?,
                },
                n,
            };
            let table = validate::run_validation(&opts)?;
            match format {
                Format::Json => write_stdout(
                    &(serde_json::to_string_pretty(&table).expect("table serializes") + "\n"),
                )?,
                Format::Csv => {
                    for w in &table.warnings {
                        eprintln!("warning: {w}");
                    }
                    let body: String = table.rows.iter().map(|r| format!("{r}\n")).collect();
                    write_stdout(&body)?;
                }
            }
            if table.all_passed() {
                Ok(())
            } else {
                Err(Failure::Analysis("validation failed".into()))
            }
        }

        Command::Synth {
            kind,
            h,
            phi,
            slope,
            base,
            n,
            sigma,
            seed,
            offset,
            rate,
            out,
        } => {
            let seed = match seed {
                Some(s) => s,
                None => default_seed()?,
            };
            let spec = SynthSpec::new(synth_kind(kind, h, phi, slope, base)?, n, sigma, seed)?;
            let samples: Vec<f64> = spec.generate()?.into_iter().map(|x| x + offset).collect();
            let link: LinkDescriptor = "1:LH-2:LH".parse()?;
            let trace = ChannelTrace::new(link, rate, samples)?;
            match out {
                Some(path) => trace.save(&path)?,
                None => {
                    let mut buf = Vec::new();
                    trace.write_csv(&mut buf)?;
                    write_stdout(&String::from_utf8_lossy(&buf))?;
                }
            }
            Ok(())
        }

        Command::Acf {
            trace,
            rate,
            link,
            gap_policy,
            max_lag,
            acf_threshold,
            format,
        } => {
            let trace = load_single(&trace, link, rate, gap_policy)?;
            let curve = acf::acf_of_trace(&trace, max_lag)?;
            match format {
                Format::Csv => write_stdout(&export::acf_csv(&curve)),
                Format::Json => write_stdout(&acf_json(&curve, acf_threshold, rate)),
            }
        }

        Command::Hurst {
            trace,
            rate,
            link,
            gap_policy,
            min_span,
            format,
        } => {
            let trace = load_single(&trace, link, rate, gap_policy)?;
            let opts = RsOptions {
                min_span,
                max_halvings: None,
            };
            let estimate = hurst::hurst_of_trace(&trace, &opts)?;
            match format {
                Format::Csv => write_stdout(&export::rs_csv(&estimate)),
                Format::Json => write_stdout(
                    &(serde_json::to_string_pretty(&estimate).expect("estimate serializes") + "\n"),
                ),
            }
        }
    }
}

/// Curve plus both fits when the decay reaches the threshold.
fn acf_json(curve: &AcfCurve, threshold: f64, rate: f64) -> String {
    let fits = acf::truncate_at_threshold(curve, threshold).and_then(|t| {
        let power = fit::fit_model(&t, ModelKind::Power)?;
        let exponential = fit::fit_model(&t, ModelKind::Exponential)?;
        let verdict = fit::compare_fits(&power, &exponential)?;
        Ok(serde_json::json!({
            "truncation_lag": t.truncation_lag,
            "truncation_lag_s": t.truncation_lag.map(|k| k as f64 / rate),
            "fit_range": t.fit_range,
            "power": power,
            "exponential": exponential,
            "verdict": verdict,
        }))
    });
    let value = serde_json::json!({
        "source_len": curve.source_len,
        "sample_rate_hz": rate,
        "acf": curve.values,
        "decay": match fits {
            Ok(v) => v,
            Err(e) => serde_json::json!({ "error": e.to_string() }),
        },
    });
    serde_json::to_string_pretty(&value).expect("json") + "\n"
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Analysis(msg)) => {
            eprintln!("lrd-kit: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("lrd-kit: {msg}");
            ExitCode::from(2)
        }
    }
}
