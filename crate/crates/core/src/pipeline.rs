//! The online selection loop.
//!
//! The first frame always becomes a keyframe. Every later frame is scored
//! against the most recent keyframe and handed to the threshold policy; a
//! selected frame replaces the keyframe reference. A warp that covers less than
//! `min_valid_fraction` of the image makes the score meaningless, so such a
//! frame is admitted as a [`Decision::ForcedSelect`] and its score is kept out
//! of the controller history.

use std::fmt::Display;

use serde::{Deserialize, Serialize};

use crate::config::SelectorConfig;
use crate::controller::{ControllerState, Decision};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::metrics::{hybrid_error, ErrorScore};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub frame_index: usize,
    pub timestamp: f64,
    pub e_photo: f64,
    pub e_ssim: f64,
    pub e_t: f64,
    /// Threshold `e_t` was compared against; absent for threshold-free strategies.
    pub theta_effective: Option<f64>,
    pub mu: Option<f64>,
    pub sigma: Option<f64>,
    pub valid_fraction: f64,
    pub decision: Decision,
    /// Index of the keyframe this frame was scored against.
    pub keyframe_ref: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub keyframes: Vec<usize>,
    pub trace: Vec<TraceRow>,
    pub kfcr: f64,
    pub config: SelectorConfig,
}

/// Percentage of frames discarded: `100 * (1 - selected / total)`.
pub fn compute_kfcr(n_total: usize, n_selected: usize) -> Result<f64> {
    if n_total == 0 {
        return Err(Error::InvalidCount("total frame count is zero".into()));
    }
    if n_selected == 0 || n_selected > n_total {
        return Err(Error::InvalidCount(format!(
            "selected count {n_selected} outside 1..={n_total}"
        )));
    }
    Ok(100.0 * (1.0 - n_selected as f64 / n_total as f64))
}

#[derive(Debug, Clone)]
enum Policy {
    Adaptive(ControllerState),
    Fixed(f64),
}

/// Incremental selector: feed frames in order with [`KeyframeSelector::push`].
///
/// Holds at most the last keyframe and the controller state between calls.
#[derive(Debug, Clone)]
pub struct KeyframeSelector {
    cfg: SelectorConfig,
    policy: Policy,
    last_keyframe: Option<Frame>,
    last_index: Option<usize>,
    keyframes: Vec<usize>,
    frames_seen: usize,
}

impl KeyframeSelector {
    pub fn new(cfg: SelectorConfig) -> Result<Self> {
        let controller = ControllerState::new(cfg)?;
        Ok(Self::with_policy(cfg, Policy::Adaptive(controller)))
    }

    /// Same loop with the adaptive controller replaced by a constant threshold.
    pub fn fixed_threshold(theta: f64, cfg: SelectorConfig) -> Result<Self> {
        let cfg = cfg.validate()?;
        if theta.is_nan() || theta < 0.0 {
            return Err(Error::InvalidStrategy(format!("fixed threshold must be >= 0, got {theta}")));
        }
        Ok(Self::with_policy(cfg, Policy::Fixed(theta)))
    }

    fn with_policy(cfg: SelectorConfig, policy: Policy) -> Self {
        Self {
            cfg,
            policy,
            last_keyframe: None,
            last_index: None,
            keyframes: Vec::new(),
            frames_seen: 0,
        }
    }

    pub fn config(&self) -> &SelectorConfig {
        &self.cfg
    }

    pub fn controller(&self) -> Option<&ControllerState> {
        match &self.policy {
            Policy::Adaptive(c) => Some(c),
            Policy::Fixed(_) => None,
        }
    }

    pub fn keyframes(&self) -> &[usize] {
        &self.keyframes
    }

    pub fn frames_seen(&self) -> usize {
        self.frames_seen
    }

    pub fn last_keyframe(&self) -> Option<&Frame> {
        self.last_keyframe.as_ref()
    }

    fn current_theta(&self) -> f64 {
        match &self.policy {
            Policy::Adaptive(c) => c.theta(),
            Policy::Fixed(t) => *t,
        }
    }

    pub fn kfcr(&self) -> Result<f64> {
        compute_kfcr(self.frames_seen, self.keyframes.len())
    }

    pub fn push(&mut self, frame: Frame) -> Result<TraceRow> {
        if let Some(prev) = self.last_index {
            if frame.index() <= prev {
                return Err(Error::OutOfOrder {
                    previous: prev,
                    got: frame.index(),
                });
            }
        }

        let Some(keyframe) = self.last_keyframe.as_ref() else {
            let row = TraceRow {
                frame_index: frame.index(),
                timestamp: frame.timestamp(),
                e_photo: 0.0,
                e_ssim: 0.0,
                e_t: 0.0,
                theta_effective: Some(self.current_theta()),
                mu: None,
                sigma: None,
                valid_fraction: 1.0,
                decision: Decision::ForcedSelect,
                keyframe_ref: frame.index(),
            };
            self.admit(frame);
            return Ok(row);
        };

        let (w, h) = keyframe.dims();
        let (fw, fh) = frame.dims();
        if (w, h) != (fw, fh) {
            return Err(Error::DimensionMismatch {
                expected_w: w,
                expected_h: h,
                got_w: fw,
                got_h: fh,
            });
        }

        let score = hybrid_error(&frame, keyframe, &self.cfg)?;
        let keyframe_ref = keyframe.index();
        let row = |decision, theta_effective, mu, sigma| {
            let ErrorScore {
                e_photo,
                e_ssim,
                e_t,
                valid_fraction,
                ..
            } = score;
            TraceRow {
                frame_index: frame.index(),
                timestamp: frame.timestamp(),
                e_photo,
                e_ssim,
                e_t,
                theta_effective,
                mu,
                sigma,
                valid_fraction,
                decision,
                keyframe_ref,
            }
        };

        let row = if score.degenerate {
            row(Decision::ForcedSelect, Some(self.current_theta()), None, None)
        } else {
            match &mut self.policy {
                Policy::Adaptive(controller) => {
                    let o = controller.observe(score.e_t)?;
                    row(o.decision, Some(o.theta_effective), o.mu, o.sigma)
                }
                Policy::Fixed(theta) => {
                    let decision = if score.e_t > *theta {
                        Decision::Select
                    } else {
                        Decision::Skip
                    };
                    row(decision, Some(*theta), None, None)
                }
            }
        };

        if row.decision.is_keyframe() {
            self.admit(frame);
        } else {
            self.last_index = Some(frame.index());
            self.frames_seen += 1;
        }
        Ok(row)
    }

    fn admit(&mut self, frame: Frame) {
        self.last_index = Some(frame.index());
        self.frames_seen += 1;
        self.keyframes.push(frame.index());
        self.last_keyframe = Some(frame);
    }
}

fn run(mut selector: KeyframeSelector, frames: &[Frame]) -> Result<SelectionResult> {
    if frames.is_empty() {
        return Err(Error::EmptySequence);
    }
    let trace = frames
        .iter()
        .map(|f| selector.push(f.clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(SelectionResult {
        kfcr: selector.kfcr()?,
        keyframes: selector.keyframes,
        trace,
        config: selector.cfg,
    })
}

/// Runs the adaptive selector over a whole sequence.
pub fn select(frames: &[Frame], cfg: &SelectorConfig) -> Result<SelectionResult> {
    run(KeyframeSelector::new(*cfg)?, frames)
}

/// Runs the selection loop with a constant threshold.
pub fn select_fixed_threshold(frames: &[Frame], theta: f64, cfg: &SelectorConfig) -> Result<SelectionResult> {
    run(KeyframeSelector::fixed_threshold(theta, *cfg)?, frames)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamSummary {
    pub frames: usize,
    pub keyframes: Vec<usize>,
    pub kfcr: f64,
}

/// Pull-based variant of [`select`].
///
/// Each decision reaches `sink` before the next frame is pulled. Only the
/// in-flight frame and the last keyframe are alive at any time. If the source
/// fails, everything decided so far has already been delivered and the
/// source's error is returned.
pub fn select_streaming<I, E>(
    source: I,
    mut sink: impl FnMut(&TraceRow),
    cfg: &SelectorConfig,
) -> Result<StreamSummary>
where
    I: IntoIterator<Item = std::result::Result<Frame, E>>,
    E: Display,
{
    let mut selector = KeyframeSelector::new(*cfg)?;
    for item in source {
        let frame = item.map_err(|e| Error::Source(e.to_string()))?;
        let row = selector.push(frame)?;
        sink(&row);
    }
    if selector.frames_seen() == 0 {
        return Err(Error::EmptySequence);
    }
    Ok(StreamSummary {
        frames: selector.frames_seen(),
        kfcr: selector.kfcr()?,
        keyframes: selector.keyframes,
    })
}
