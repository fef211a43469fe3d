//! Channel-gain trace ingestion.
//!
//! Traces are CSV files with either `time_s,gain_db` or a single `gain_db`
//! column (header optional). A JSON manifest maps each file to the link it
//! was recorded on. Gaps in the time column become missing slots, which a
//! [`GapPolicy`] later removes.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default sampling rate of the body-worn radios, in Hz.
pub const DEFAULT_SAMPLE_RATE: f64 = 20.0;

/// Shortest gap-free trace accepted by the analysis pipeline.
pub const MIN_ANALYSIS_LEN: usize = 64;

/// Largest subject id in a measurement campaign.
pub const MAX_SUBJECT: u8 = 10;

/// Relative deviation from the nominal sample spacing tolerated in the time column.
const SPACING_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodePosition {
    /// Left hip, where the hub (transmitter) sits.
    LH,
    /// Right upper arm.
    RA,
    /// Left wrist.
    LW,
}

impl fmt::Display for NodePosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodePosition::LH => "LH",
            NodePosition::RA => "RA",
            NodePosition::LW => "LW",
        })
    }
}

impl FromStr for NodePosition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "LH" => Ok(NodePosition::LH),
            "RA" => Ok(NodePosition::RA),
            "LW" => Ok(NodePosition::LW),
            other => Err(Error::InvalidLink(format!(
                "unknown node position {other:?}"
            ))),
        }
    }
}

/// Subject (person) wearing a body area network, numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct SubjectId(u8);

impl SubjectId {
    pub fn new(id: u8) -> Result<Self> {
        if (1..=MAX_SUBJECT).contains(&id) {
            Ok(SubjectId(id))
        } else {
            Err(Error::InvalidLink(format!(
                "subject id {id} outside 1..={MAX_SUBJECT}"
            )))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl TryFrom<u8> for SubjectId {
    type Error = Error;

    fn try_from(id: u8) -> Result<Self> {
        SubjectId::new(id)
    }
}

impl From<SubjectId> for u8 {
    fn from(id: SubjectId) -> u8 {
        id.0
    }
}

/// A directed radio link from a hub on one subject to a node on a (possibly
/// different) subject. Construction enforces the hub-at-left-hip topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LinkDescriptor {
    tx_subject: SubjectId,
    tx_pos: NodePosition,
    rx_subject: SubjectId,
    rx_pos: NodePosition,
}

impl LinkDescriptor {
    pub fn new(
        tx_subject: u8,
        tx_pos: NodePosition,
        rx_subject: u8,
        rx_pos: NodePosition,
    ) -> Result<Self> {
        let tx_subject = SubjectId::new(tx_subject)?;
        let rx_subject = SubjectId::new(rx_subject)?;
        if tx_pos != NodePosition::LH {
            return Err(Error::InvalidLink(format!(
                "transmitter must sit at LH, got {tx_pos}"
            )));
        }
        if tx_subject == rx_subject && rx_pos == NodePosition::LH {
            return Err(Error::InvalidLink(
                "on-body link cannot terminate at the hub itself".into(),
            ));
        }
        Ok(LinkDescriptor {
            tx_subject,
            tx_pos,
            rx_subject,
            rx_pos,
        })
    }

    pub fn tx_subject(&self) -> u8 {
        self.tx_subject.get()
    }

    pub fn tx_pos(&self) -> NodePosition {
        self.tx_pos
    }

    pub fn rx_subject(&self) -> u8 {
        self.rx_subject.get()
    }

    pub fn rx_pos(&self) -> NodePosition {
        self.rx_pos
    }

    pub fn is_on_body(&self) -> bool {
        self.tx_subject == self.rx_subject
    }

    pub fn class(&self) -> LinkClass {
        classify_link(self)
    }
}

impl fmt::Display for LinkDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}-{}:{}",
            self.tx_subject(),
            self.tx_pos,
            self.rx_subject(),
            self.rx_pos
        )
    }
}

/// Parses the `3:LH-7:LW` form produced by `Display`.
impl FromStr for LinkDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidLink(format!("expected TX:POS-RX:POS, got {s:?}"));
        let (tx, rx) = s.split_once('-').ok_or_else(bad)?;
        let endpoint = |part: &str| -> Result<(u8, NodePosition)> {
            let (id, pos) = part.split_once(':').ok_or_else(bad)?;
            let id = id.trim().parse::<u8>().map_err(|_| bad())?;
            Ok((id, pos.parse()?))
        };
        let (tx_subject, tx_pos) = endpoint(tx)?;
        let (rx_subject, rx_pos) = endpoint(rx)?;
        LinkDescriptor::new(tx_subject, tx_pos, rx_subject, rx_pos)
    }
}

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LinkClass {
    OnBody_LH_RA,
    OnBody_LH_LW,
    B2B_LH_LH,
    B2B_LH_RA,
    B2B_LH_LW,
}

impl LinkClass {
    pub const ALL: [LinkClass; 5] = [
        LinkClass::OnBody_LH_RA,
        LinkClass::OnBody_LH_LW,
        LinkClass::B2B_LH_LH,
        LinkClass::B2B_LH_RA,
        LinkClass::B2B_LH_LW,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LinkClass::OnBody_LH_RA => "OnBody_LH_RA",
            LinkClass::OnBody_LH_LW => "OnBody_LH_LW",
            LinkClass::B2B_LH_LH => "B2B_LH_LH",
            LinkClass::B2B_LH_RA => "B2B_LH_RA",
            LinkClass::B2B_LH_LW => "B2B_LH_LW",
        }
    }

    pub fn is_on_body(self) -> bool {
        matches!(self, LinkClass::OnBody_LH_RA | LinkClass::OnBody_LH_LW)
    }
}

impl fmt::Display for LinkClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn classify_link(link: &LinkDescriptor) -> LinkClass {
    match (link.is_on_body(), link.rx_pos) {
        (true, NodePosition::RA) => LinkClass::OnBody_LH_RA,
        (true, NodePosition::LW) => LinkClass::OnBody_LH_LW,
        // Rejected by LinkDescriptor::new.
        (true, NodePosition::LH) => unreachable!("on-body link terminating at the hub"),
        (false, NodePosition::LH) => LinkClass::B2B_LH_LH,
        (false, NodePosition::RA) => LinkClass::B2B_LH_RA,
        (false, NodePosition::LW) => LinkClass::B2B_LH_LW,
    }
}

/// Uniformly sampled channel gain (dB) on one link.
///
/// Missing slots hold `NaN` in `samples` and `true` in the mask. Every
/// non-missing sample is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTrace {
    link: LinkDescriptor,
    sample_rate: f64,
    samples: Vec<f64>,
    missing: Vec<bool>,
}

impl ChannelTrace {
    /// A gap-free trace.
    pub fn new(link: LinkDescriptor, sample_rate: f64, samples: Vec<f64>) -> Result<Self> {
        let missing = vec![false; samples.len()];
        Self::with_missing(link, sample_rate, samples, missing)
    }

    pub fn with_missing(
        link: LinkDescriptor,
        sample_rate: f64,
        mut samples: Vec<f64>,
        missing: Vec<bool>,
    ) -> Result<Self> {
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::argument(format!(
                "sample rate must be positive, got {sample_rate}"
            )));
        }
        if samples.is_empty() {
            return Err(Error::argument("trace has no samples"));
        }
        if samples.len() != missing.len() {
            return Err(Error::argument(
                "missing mask length differs from sample count",
            ));
        }
        for (i, (x, &gap)) in samples.iter_mut().zip(&missing).enumerate() {
            if gap {
                *x = f64::NAN;
            } else if !x.is_finite() {
                return Err(Error::argument(format!("non-finite sample at index {i}")));
            }
        }
        Ok(ChannelTrace {
            link,
            sample_rate,
            samples,
            missing,
        })
    }

    pub fn link(&self) -> &LinkDescriptor {
        &self.link
    }

    pub fn class(&self) -> LinkClass {
        classify_link(&self.link)
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    /// Raw slots, `NaN` where missing.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn missing_mask(&self) -> &[bool] {
        &self.missing
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn missing_count(&self) -> usize {
        self.missing.iter().filter(|&&m| m).count()
    }

    pub fn is_gap_free(&self) -> bool {
        !self.missing.iter().any(|&m| m)
    }

    /// Samples of a gap-free trace; errors if any slot is missing.
    pub fn values(&self) -> Result<&[f64]> {
        if self.is_gap_free() {
            Ok(&self.samples)
        } else {
            Err(Error::argument(format!(
                "trace {} has {} missing slots; apply a gap policy first",
                self.link,
                self.missing_count()
            )))
        }
    }

    /// Keeps only the first `len` slots.
    pub fn truncated(&self, len: usize) -> Result<ChannelTrace> {
        if len == 0 || len > self.len() {
            return Err(Error::argument(format!(
                "cannot truncate trace of {} samples to {len}",
                self.len()
            )));
        }
        Ok(ChannelTrace {
            link: self.link,
            sample_rate: self.sample_rate,
            samples: self.samples[..len].to_vec(),
            missing: self.missing[..len].to_vec(),
        })
    }

    /// Writes the trace as `time_s,gain_db` CSV. Missing slots are omitted so
    /// that reloading reproduces them from the time column.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io {
            path: PathBuf::from("<csv writer>"),
            source: std::io::Error::other(e),
        };
        w.write_record(["time_s", "gain_db"]).map_err(io)?;
        for (i, (&x, &gap)) in self.samples.iter().zip(&self.missing).enumerate() {
            if gap {
                continue;
            }
            let t = i as f64 / self.sample_rate;
            w.write_record([t.to_string(), x.to_string()]).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io {
            path: PathBuf::from("<csv writer>"),
            source: e,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// Sample slots parsed from a trace file, before a link is attached.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSeries {
    pub samples: Vec<f64>,
    pub missing: Vec<bool>,
}

/// Parses trace CSV text. `source` is only used in error messages.
pub fn parse_trace<R: Read>(input: R, sample_rate: f64, source: &Path) -> Result<ParsedSeries> {
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(Error::argument(format!(
            "sample rate must be positive, got {sample_rate}"
        )));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);

    let mut samples = Vec::new();
    let mut missing = Vec::new();
    let mut columns: Option<usize> = None;
    let mut prev_time: Option<f64> = None;
    let mut first = true;

    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let fields: Vec<&str> = record.iter().collect();
        let parsed: std::result::Result<Vec<f64>, _> =
            fields.iter().map(|f| f.parse::<f64>()).collect();
        let values = match parsed {
            Ok(v) => v,
            // A non-numeric first row is a header.
            Err(_) if first => {
                first = false;
                if !(1..=2).contains(&fields.len()) {
                    return Err(Error::Parse {
                        line,
                        message: format!("expected 1 or 2 columns, found {}", fields.len()),
                    });
                }
                columns = Some(fields.len());
                continue;
            }
            Err(e) => {
                return Err(Error::Parse {
                    line,
                    message: format!("{e} in {fields:?}"),
                })
            }
        };
        first = false;
        let ncols = *columns.get_or_insert(values.len());
        if values.len() != ncols || !(1..=2).contains(&ncols) {
            return Err(Error::Parse {
                line,
                message: format!("expected {ncols} columns, found {}", values.len()),
            });
        }
        let gain = *values.last().expect("at least one column");
        if !gain.is_finite() {
            return Err(Error::NonFinite {
                line,
                index: samples.len(),
            });
        }
        if ncols == 2 {
            let t = values[0];
            if !t.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("non-finite timestamp {t}"),
                });
            }
            if let Some(prev) = prev_time {
                let steps_exact = (t - prev) * sample_rate;
                let steps = steps_exact.round();
                if steps < 1.0 || (steps_exact - steps).abs() > SPACING_TOLERANCE {
                    return Err(Error::Timestamp {
                        line,
                        message: format!(
                            "spacing {:.6} s is not a whole multiple of {:.6} s",
                            t - prev,
                            1.0 / sample_rate
                        ),
                    });
                }
                for _ in 1..(steps as usize) {
                    samples.push(f64::NAN);
                    missing.push(true);
                }
            }
            prev_time = Some(t);
        }
        samples.push(gain);
        missing.push(false);
    }

    if samples.is_empty() {
        return Err(Error::EmptyFile(source.to_path_buf()));
    }
    Ok(ParsedSeries { samples, missing })
}

pub fn load_trace(path: &Path, link: LinkDescriptor, sample_rate: f64) -> Result<ChannelTrace> {
    let file = File::open(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let parsed = parse_trace(std::io::BufReader::new(file), sample_rate, path)?;
    ChannelTrace::with_missing(link, sample_rate, parsed.samples, parsed.missing)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapPolicy {
    Drop,
    #[default]
    HoldLast,
    LinearInterpolate,
}

impl fmt::Display for GapPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GapPolicy::Drop => "drop",
            GapPolicy::HoldLast => "hold-last",
            GapPolicy::LinearInterpolate => "linear-interpolate",
        })
    }
}

impl FromStr for GapPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drop" => Ok(GapPolicy::Drop),
            "hold-last" => Ok(GapPolicy::HoldLast),
            "linear-interpolate" | "linear" => Ok(GapPolicy::LinearInterpolate),
            other => Err(Error::argument(format!("unknown gap policy {other:?}"))),
        }
    }
}

/// Removes missing slots. Leading missing slots are always dropped; a
/// trailing run under `LinearInterpolate` has no right neighbour and is held.
pub fn apply_gap_policy(trace: &ChannelTrace, policy: GapPolicy) -> Result<ChannelTrace> {
    let start = trace
        .missing
        .iter()
        .position(|&m| !m)
        .ok_or(Error::AllMissing)?;
    let slots = &trace.samples[start..];
    let mask = &trace.missing[start..];

    let filled: Vec<f64> = match policy {
        GapPolicy::Drop => slots
            .iter()
            .zip(mask)
            .filter(|(_, &m)| !m)
            .map(|(&x, _)| x)
            .collect(),
        GapPolicy::HoldLast => {
            let mut last = slots[0];
            slots
                .iter()
                .zip(mask)
                .map(|(&x, &m)| {
                    if !m {
                        last = x;
                    }
                    last
                })
                .collect()
        }
        GapPolicy::LinearInterpolate => {
            let mut out = slots.to_vec();
            let mut left = 0usize;
            let mut i = 1usize;
            while i < out.len() {
                if !mask[i] {
                    left = i;
                    i += 1;
                    continue;
                }
                let run_end = (i..out.len()).find(|&j| !mask[j]);
                match run_end {
                    Some(right) => {
                        let (y0, y1) = (out[left], out[right]);
                        let span = (right - left) as f64;
                        for (j, slot) in out.iter_mut().enumerate().take(right).skip(i) {
                            let w = (j - left) as f64 / span;
                            *slot = y0 + w * (y1 - y0);
                        }
                        i = right;
                    }
                    None => {
                        let hold = out[left];
                        out[i..].iter_mut().for_each(|s| *s = hold);
                        break;
                    }
                }
            }
            out
        }
    };

    ChannelTrace::new(trace.link, trace.sample_rate, filled)
}

/// Partitions traces by link class. Every class is present in the result,
/// and traces keep their input order within a class.
pub fn group_traces<I>(traces: I) -> BTreeMap<LinkClass, Vec<ChannelTrace>>
where
    I: IntoIterator<Item = ChannelTrace>,
{
    let mut groups: BTreeMap<LinkClass, Vec<ChannelTrace>> =
        LinkClass::ALL.iter().map(|&c| (c, Vec::new())).collect();
    for trace in traces {
        groups.entry(trace.class()).or_default().push(trace);
    }
    groups
}

fn default_rate() -> f64 {
    DEFAULT_SAMPLE_RATE
}

/// One entry of the JSON manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub tx_subject: u8,
    pub tx_pos: NodePosition,
    pub rx_subject: u8,
    pub rx_pos: NodePosition,
    #[serde(default = "default_rate")]
    pub sample_rate_hz: f64,
}

impl ManifestEntry {
    pub fn link(&self) -> Result<LinkDescriptor> {
        LinkDescriptor::new(self.tx_subject, self.tx_pos, self.rx_subject, self.rx_pos)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
    /// Directory relative paths are resolved against.
    pub base_dir: PathBuf,
    /// Raw manifest bytes, kept for provenance hashing.
    pub raw: Vec<u8>,
}

impl Manifest {
    pub fn from_json(raw: Vec<u8>, base_dir: PathBuf) -> Result<Self> {
        let entries: Vec<ManifestEntry> =
            serde_json::from_slice(&raw).map_err(|e| Error::Manifest(e.to_string()))?;
        for (i, entry) in entries.iter().enumerate() {
            entry
                .link()
                .map_err(|e| Error::Manifest(format!("entry {i}: {e}")))?;
        }
        Ok(Manifest {
            entries,
            base_dir,
            raw,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let base_dir = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Self::from_json(raw, base_dir)
    }

    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        if entry.path.is_absolute() {
            entry.path.clone()
        } else {
            self.base_dir.join(&entry.path)
        }
    }

    /// Loads every entry, in manifest order. Files are read in parallel.
    pub fn load_traces(&self) -> Result<Vec<ChannelTrace>> {
        self.entries
            .par_iter()
            .map(|entry| load_trace(&self.resolve(entry), entry.link()?, entry.sample_rate_hz))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn link(tx: u8, rx: u8, pos: NodePosition) -> LinkDescriptor {
        LinkDescriptor::new(tx, NodePosition::LH, rx, pos).unwrap()
    }

    fn parse(text: &str) -> Result<ParsedSeries> {
        parse_trace(text.as_bytes(), 20.0, Path::new("mem.csv"))
    }

    #[test]
    fn two_rows_two_samples() {
        let p = parse("0.00,-60.1\n0.05,-61.0\n").unwrap();
        assert_eq!(p.samples, vec![-60.1, -61.0]);
        assert_eq!(p.missing, vec![false, false]);
    }

    #[test]
    fn gap_in_time_column_becomes_missing_slots() {
        let p = parse("0.00,-60.1\n0.15,-61.0\n").unwrap();
        assert_eq!(p.missing, vec![false, true, true, false]);
        assert_eq!(p.samples[0], -60.1);
        assert_eq!(p.samples[3], -61.0);
    }

    #[test]
    fn header_and_single_column() {
        let p = parse("gain_db\n-60\n-61\n").unwrap();
        assert_eq!(p.samples, vec![-60.0, -61.0]);
        let p = parse("time_s,gain_db\n0,-60\n0.05,-61\n").unwrap();
        assert_eq!(p.samples.len(), 2);
    }

    #[test]
    fn nan_reports_line() {
        match parse("0.00,-60.1\n0.05,NaN\n") {
            Err(Error::NonFinite { line, index }) => {
                assert_eq!(line, 2);
                assert_eq!(index, 1);
            }
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn malformed_row_reports_line() {
        match parse("0.00,-60.1\n0.05,abc\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected Parse, got {other:?}"),
        }
        assert!(matches!(
            parse("0,-60\n0.05\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn empty_file_is_error() {
        assert!(matches!(parse(""), Err(Error::EmptyFile(_))));
        assert!(matches!(
            parse("time_s,gain_db\n"),
            Err(Error::EmptyFile(_))
        ));
    }

    #[test]
    fn jittered_or_backwards_time_is_error() {
        assert!(matches!(
            parse("0.00,-60\n0.075,-61\n"),
            Err(Error::Timestamp { line: 2, .. })
        ));
        assert!(matches!(
            parse("0.05,-60\n0.00,-61\n"),
            Err(Error::Timestamp { .. })
        ));
        // 4% jitter is tolerated.
        assert!(parse("0.00,-60\n0.052,-61\n").is_ok());
    }

    #[test]
    fn gap_policies() {
        let l = link(1, 1, NodePosition::RA);
        let t =
            ChannelTrace::with_missing(l, 20.0, vec![-60.0, 0.0, -62.0], vec![false, true, false])
                .unwrap();
        let lin = apply_gap_policy(&t, GapPolicy::LinearInterpolate).unwrap();
        assert_eq!(lin.samples(), &[-60.0, -61.0, -62.0]);
        let hold = apply_gap_policy(&t, GapPolicy::HoldLast).unwrap();
        assert_eq!(hold.samples(), &[-60.0, -60.0, -62.0]);
        let drop = apply_gap_policy(&t, GapPolicy::Drop).unwrap();
        assert_eq!(drop.samples(), &[-60.0, -62.0]);

        let lead =
            ChannelTrace::with_missing(l, 20.0, vec![0.0, -60.0], vec![true, false]).unwrap();
        for policy in [
            GapPolicy::Drop,
            GapPolicy::HoldLast,
            GapPolicy::LinearInterpolate,
        ] {
            let out = apply_gap_policy(&lead, policy).unwrap();
            assert_eq!(out.samples(), &[-60.0]);
            assert!(out.is_gap_free());
        }
    }

    #[test]
    fn linear_interpolate_long_gap_and_tail() {
        let l = link(1, 1, NodePosition::RA);
        let t = ChannelTrace::with_missing(
            l,
            20.0,
            vec![0.0, 0.0, 0.0, 0.0, 4.0, 0.0],
            vec![false, true, true, true, false, true],
        )
        .unwrap();
        let out = apply_gap_policy(&t, GapPolicy::LinearInterpolate).unwrap();
        assert_eq!(out.samples(), &[0.0, 1.0, 2.0, 3.0, 4.0, 4.0]);
    }

    #[test]
    fn all_missing_is_error() {
        let l = link(1, 1, NodePosition::RA);
        let t = ChannelTrace::with_missing(l, 20.0, vec![0.0; 3], vec![true; 3]).unwrap();
        assert!(matches!(
            apply_gap_policy(&t, GapPolicy::HoldLast),
            Err(Error::AllMissing)
        ));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify_link(&link(3, 3, NodePosition::RA)),
            LinkClass::OnBody_LH_RA
        );
        assert_eq!(
            classify_link(&link(3, 3, NodePosition::LW)),
            LinkClass::OnBody_LH_LW
        );
        assert_eq!(
            classify_link(&link(3, 7, NodePosition::LH)),
            LinkClass::B2B_LH_LH
        );
        assert_eq!(
            classify_link(&link(3, 7, NodePosition::RA)),
            LinkClass::B2B_LH_RA
        );
        assert_eq!(
            classify_link(&link(3, 7, NodePosition::LW)),
            LinkClass::B2B_LH_LW
        );
    }

    #[test]
    fn descriptor_validation() {
        assert!(LinkDescriptor::new(0, NodePosition::LH, 1, NodePosition::RA).is_err());
        assert!(LinkDescriptor::new(1, NodePosition::LH, 11, NodePosition::RA).is_err());
        assert!(LinkDescriptor::new(1, NodePosition::RA, 2, NodePosition::LH).is_err());
        assert!(LinkDescriptor::new(4, NodePosition::LH, 4, NodePosition::LH).is_err());
    }

    #[test]
    fn descriptor_text_form() {
        let l: LinkDescriptor = "3:LH-7:LW".parse().unwrap();
        assert_eq!(l, link(3, 7, NodePosition::LW));
        assert_eq!(l.to_string(), "3:LH-7:LW");
        assert!("3:LH7:LW".parse::<LinkDescriptor>().is_err());
    }

    #[test]
    fn grouping_counts() {
        let mk = |l| ChannelTrace::new(l, 20.0, vec![1.0, 2.0]).unwrap();
        let traces = vec![
            mk(link(1, 1, NodePosition::RA)),
            mk(link(2, 2, NodePosition::RA)),
            mk(link(1, 2, NodePosition::LH)),
        ];
        let g = group_traces(traces);
        assert_eq!(g.len(), 5);
        assert_eq!(g[&LinkClass::OnBody_LH_RA].len(), 2);
        assert_eq!(g[&LinkClass::B2B_LH_LH].len(), 1);
        assert_eq!(g[&LinkClass::OnBody_LH_LW].len(), 0);
        assert_eq!(g[&LinkClass::B2B_LH_RA].len(), 0);

        let empty = group_traces(Vec::new());
        assert!(empty.values().all(Vec::is_empty));
        assert_eq!(empty.len(), 5);
    }

    #[test]
    fn full_mesh_b2b_lh_lh() {
        let mut traces = Vec::new();
        for tx in 1..=10 {
            for rx in 1..=10 {
                if tx != rx {
                    traces.push(
                        ChannelTrace::new(link(tx, rx, NodePosition::LH), 20.0, vec![0.0]).unwrap(),
                    );
                }
            }
        }
        let g = group_traces(traces);
        assert_eq!(g[&LinkClass::B2B_LH_LH].len(), 90);
    }

    #[test]
    fn manifest_rejects_bad_link() {
        let raw = br#"[{"path":"a.csv","tx_subject":1,"tx_pos":"RA","rx_subject":2,"rx_pos":"LH","sample_rate_hz":20}]"#;
        assert!(matches!(
            Manifest::from_json(raw.to_vec(), PathBuf::from(".")),
            Err(Error::Manifest(_))
        ));
        let ok = br#"[{"path":"a.csv","tx_subject":1,"tx_pos":"LH","rx_subject":2,"rx_pos":"LW"}]"#;
        let m = Manifest::from_json(ok.to_vec(), PathBuf::from("/data")).unwrap();
        assert_eq!(m.entries[0].sample_rate_hz, 20.0);
        assert_eq!(m.resolve(&m.entries[0]), PathBuf::from("/data/a.csv"));
    }
}
