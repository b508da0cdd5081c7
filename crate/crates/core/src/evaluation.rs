//! Baseline strategies, side-by-side comparison and report emission.
//!
//! Reconstruction-quality metrics need a reconstruction backend, which this
//! crate does not have. Reports instead carry two error-based proxies computed
//! from the per-frame trace of each strategy:
//!
//! * `mean_skipped_error`: mean hybrid error of skipped frames against their
//!   preceding keyframe (how redundant the discarded frames were);
//! * `max_inter_keyframe_error`: the largest such error (the worst change the
//!   keyframe set fails to represent).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::SelectorConfig;
use crate::controller::Decision;
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::metrics::hybrid_error;
use crate::pipeline::{compute_kfcr, select, select_fixed_threshold, SelectionResult, TraceRow};

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrategySpec {
    Adaptive { config: SelectorConfig },
    UniformEveryN { stride: usize },
    FixedThreshold { theta: f64, config: SelectorConfig },
}

impl StrategySpec {
    pub fn adaptive(config: SelectorConfig) -> Self {
        Self::Adaptive { config }
    }

    pub fn uniform(stride: usize) -> Self {
        Self::UniformEveryN { stride }
    }

    pub fn fixed(theta: f64, config: SelectorConfig) -> Self {
        Self::FixedThreshold { theta, config }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Adaptive { .. } => "adaptive".to_string(),
            Self::UniformEveryN { stride } => format!("uniform-{stride}"),
            Self::FixedThreshold { theta, .. } => format!("fixed-{theta}"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Adaptive { config } => config.validate().map(|_| ()),
            Self::UniformEveryN { stride } if *stride == 0 => {
                Err(Error::InvalidStrategy("uniform stride must be >= 1".into()))
            }
            Self::UniformEveryN { .. } => Ok(()),
            Self::FixedThreshold { theta, config } => {
                if theta.is_nan() || *theta < 0.0 {
                    return Err(Error::InvalidStrategy(format!("fixed threshold must be >= 0, got {theta}")));
                }
                config.validate().map(|_| ())
            }
        }
    }
}

/// Runs one strategy. `scoring` supplies the error weights used to fill the
/// trace of threshold-free strategies; the others use their own config.
pub fn run_strategy(frames: &[Frame], strategy: &StrategySpec, scoring: &SelectorConfig) -> Result<SelectionResult> {
    strategy.validate()?;
    match strategy {
        StrategySpec::Adaptive { config } => select(frames, config),
        StrategySpec::FixedThreshold { theta, config } => select_fixed_threshold(frames, *theta, config),
        StrategySpec::UniformEveryN { stride } => uniform(frames, *stride, scoring),
    }
}

fn uniform(frames: &[Frame], stride: usize, scoring: &SelectorConfig) -> Result<SelectionResult> {
    let scoring = scoring.validate()?;
    let first = frames.first().ok_or(Error::EmptySequence)?;
    let mut keyframe = first;
    let mut keyframes = Vec::new();
    let mut trace = Vec::with_capacity(frames.len());
    for (pos, frame) in frames.iter().enumerate() {
        let score = if pos == 0 {
            None
        } else {
            Some(hybrid_error(frame, keyframe, &scoring)?)
        };
        let decision = match pos {
            0 => Decision::ForcedSelect,
            p if p % stride == 0 => Decision::Select,
            _ => Decision::Skip,
        };
        trace.push(TraceRow {
            frame_index: frame.index(),
            timestamp: frame.timestamp(),
            e_photo: score.map_or(0.0, |s| s.e_photo),
            e_ssim: score.map_or(0.0, |s| s.e_ssim),
            e_t: score.map_or(0.0, |s| s.e_t),
            theta_effective: None,
            mu: None,
            sigma: None,
            valid_fraction: score.map_or(1.0, |s| s.valid_fraction),
            decision,
            keyframe_ref: keyframe.index(),
        });
        if decision.is_keyframe() {
            keyframes.push(frame.index());
            keyframe = frame;
        }
    }
    Ok(SelectionResult {
        kfcr: compute_kfcr(frames.len(), keyframes.len())?,
        keyframes,
        trace,
        config: scoring,
    })
}

/// Largest stride whose uniform selection keeps at least `keyframes` frames
/// out of `n_frames`. Used to give the uniform baseline a budget no smaller
/// than a reference strategy's.
pub fn matched_uniform_stride(n_frames: usize, keyframes: usize) -> usize {
    let keyframes = keyframes.max(1);
    (1..=n_frames.max(1))
        .rev()
        .find(|&s| n_frames.div_ceil(s) >= keyframes)
        .unwrap_or(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proxies {
    pub mean_skipped_error: f64,
    pub max_inter_keyframe_error: f64,
}

impl Proxies {
    pub fn from_trace(trace: &[TraceRow]) -> Self {
        let skipped: Vec<f64> = trace
            .iter()
            .filter(|r| r.decision == Decision::Skip)
            .map(|r| r.e_t)
            .collect();
        if skipped.is_empty() {
            return Self {
                mean_skipped_error: 0.0,
                max_inter_keyframe_error: 0.0,
            };
        }
        Self {
            mean_skipped_error: skipped.iter().sum::<f64>() / skipped.len() as f64,
            max_inter_keyframe_error: skipped.iter().copied().fold(0.0, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub config: SelectorConfig,
    pub input: String,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyReport {
    pub name: String,
    pub strategy: StrategySpec,
    pub keyframes: Vec<usize>,
    pub keyframe_count: usize,
    pub kfcr: f64,
    pub proxies: Proxies,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyTraceRow {
    pub strategy: String,
    #[serde(flatten)]
    pub row: TraceRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub meta: ReportMeta,
    pub strategies: Vec<StrategyReport>,
    pub trace: Vec<StrategyTraceRow>,
}

impl ComparisonReport {
    pub fn new(config: SelectorConfig, input: impl Into<String>) -> Self {
        Self {
            meta: ReportMeta {
                config,
                input: input.into(),
                tool_version: TOOL_VERSION.to_string(),
            },
            strategies: Vec::new(),
            trace: Vec::new(),
        }
    }

    pub fn push(&mut self, strategy: &StrategySpec, result: SelectionResult) {
        let name = strategy.name();
        self.trace.extend(result.trace.iter().map(|row| StrategyTraceRow {
            strategy: name.clone(),
            row: *row,
        }));
        self.strategies.push(StrategyReport {
            name,
            strategy: strategy.clone(),
            keyframe_count: result.keyframes.len(),
            keyframes: result.keyframes,
            kfcr: result.kfcr,
            proxies: Proxies::from_trace(&result.trace),
        });
    }

    pub fn strategy(&self, name: &str) -> Option<&StrategyReport> {
        self.strategies.iter().find(|s| s.name == name)
    }

    pub fn trace_of<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a TraceRow> + 'a {
        self.trace.iter().filter(move |r| r.strategy == name).map(|r| &r.row)
    }
}

/// Runs every strategy on the same frames, in order.
pub fn compare(
    frames: &[Frame],
    strategies: &[StrategySpec],
    scoring: &SelectorConfig,
    input: &str,
) -> Result<ComparisonReport> {
    if strategies.is_empty() {
        return Err(Error::InvalidStrategy("no strategies requested".into()));
    }
    let mut report = ComparisonReport::new(*scoring, input);
    for s in strategies {
        let result = run_strategy(frames, s, scoring)?;
        report.push(s, result);
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

pub const CSV_HEADER: &str = "strategy,frame,timestamp,e_photo,e_ssim,e_t,theta,decision";

pub fn emit_report(report: &ComparisonReport, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report)?;
            out.push(b'\n');
            Ok(out)
        }
        ReportFormat::Csv => Ok(trace_csv(&report.trace).into_bytes()),
    }
}

pub fn trace_csv(rows: &[StrategyTraceRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for StrategyTraceRow { strategy, row } in rows {
        let theta = row.theta_effective.map(|t| t.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{strategy},{},{},{},{},{},{theta},{}",
            row.frame_index, row.timestamp, row.e_photo, row.e_ssim, row.e_t, row.decision
        );
    }
    out
}

pub fn parse_report(bytes: &[u8]) -> Result<ComparisonReport> {
    Ok(serde_json::from_slice(bytes)?)
}
