//! Momentum-aware threshold controller.
//!
//! Each observed error is appended to a sliding window. Once the window holds
//! `W` errors the threshold is the upper control limit
//! `max(theta_0, mu + k * sigma)` with the population standard deviation of the
//! last `W` errors. Before that, the threshold interpolates linearly from
//! `theta_init` towards `theta_0`, where `t` counts the observation being
//! processed plus one (the first compared frame is frame 2 of the sequence).
//!
//! A frame is selected iff its error is strictly greater than the effective
//! threshold. What happens after a selection depends on [`DecayMode`].

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::config::{DecayMode, SelectorConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Decision {
    Select,
    Skip,
    /// Admitted without a threshold comparison: the first frame of a
    /// sequence, or a frame whose warp covered too little of the image.
    ForcedSelect,
}

impl Decision {
    pub fn is_keyframe(self) -> bool {
        !matches!(self, Decision::Skip)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Select => "Select",
            Decision::Skip => "Skip",
            Decision::ForcedSelect => "ForcedSelect",
        }
    }
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub decision: Decision,
    /// The value `e_t` was compared against.
    pub theta_effective: f64,
    /// Window statistics; `None` during warm-up.
    pub mu: Option<f64>,
    pub sigma: Option<f64>,
}

/// Mean and population standard deviation (divisor `n`), two-pass.
pub fn window_stats(errors: &[f64]) -> (f64, f64) {
    let n = errors.len() as f64;
    let mu = errors.iter().sum::<f64>() / n;
    let var = errors.iter().map(|e| (e - mu) * (e - mu)).sum::<f64>() / n;
    (mu, var.sqrt())
}

/// `max(theta_0, mu + k * sigma)`.
#[inline]
pub fn adaptive_threshold(base: f64, mu: f64, sigma: f64, sensitivity: f64) -> f64 {
    base.max(mu + sensitivity * sigma)
}

/// Warm-up interpolation; `t` is the 1-based sequence position of the frame
/// being compared.
#[inline]
pub fn warmup_threshold(base: f64, init: f64, t: usize, window: usize) -> f64 {
    let r = t as f64 / window as f64;
    base * r + init * (1.0 - r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerState {
    window: VecDeque<f64>,
    observed: usize,
    theta: f64,
    decay_pending: bool,
    cfg: SelectorConfig,
}

impl ControllerState {
    pub fn new(cfg: SelectorConfig) -> Result<Self> {
        let cfg = cfg.validate()?;
        Ok(Self {
            window: VecDeque::with_capacity(cfg.window_size),
            observed: 0,
            theta: cfg.init_threshold,
            decay_pending: false,
            cfg,
        })
    }

    /// Number of errors observed so far.
    pub fn observed(&self) -> usize {
        self.observed
    }

    /// Current stored threshold (after any literal-mode decay).
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn decay_pending(&self) -> bool {
        self.decay_pending
    }

    pub fn config(&self) -> &SelectorConfig {
        &self.cfg
    }

    /// The last `min(W, observed)` errors, oldest first.
    pub fn recent_errors(&self) -> impl Iterator<Item = f64> + '_ {
        self.window.iter().copied()
    }

    pub fn in_warmup(&self) -> bool {
        self.observed < self.cfg.window_size
    }

    pub fn observe(&mut self, e_t: f64) -> Result<Observation> {
        if !e_t.is_finite() || e_t < 0.0 {
            return Err(Error::InvalidErrorValue(e_t));
        }
        let w = self.cfg.window_size;
        if self.window.len() == w {
            self.window.pop_front();
        }
        self.window.push_back(e_t);
        self.observed += 1;

        let (mu, sigma) = if self.observed >= w {
            let (mu, sigma) = window_stats(self.window.make_contiguous());
            self.theta = adaptive_threshold(self.cfg.base_threshold, mu, sigma, self.cfg.sensitivity);
            (Some(mu), Some(sigma))
        } else {
            self.theta = warmup_threshold(
                self.cfg.base_threshold,
                self.cfg.init_threshold,
                self.observed + 1,
                w,
            );
            (None, None)
        };

        let theta_effective = if self.cfg.decay_mode == DecayMode::Multiplier && self.decay_pending {
            self.cfg.decay * self.theta
        } else {
            self.theta
        };
        self.decay_pending = false;

        let decision = if e_t > theta_effective {
            match self.cfg.decay_mode {
                DecayMode::Literal => self.theta *= self.cfg.decay,
                DecayMode::Multiplier => self.decay_pending = true,
            }
            Decision::Select
        } else {
            Decision::Skip
        };

        Ok(Observation {
            decision,
            theta_effective,
            mu,
            sigma,
        })
    }
}

/// Fresh controller: empty history, `theta = theta_init`, no pending decay.
pub fn reset(cfg: SelectorConfig) -> Result<ControllerState> {
    ControllerState::new(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::default_config;
    use approx::assert_abs_diff_eq;

    fn cfg(mode: DecayMode) -> SelectorConfig {
        SelectorConfig {
            decay_mode: mode,
            ..default_config()
        }
    }

    #[test]
    fn window_stats_hand_values() {
        let (mu, sigma) = window_stats(&[0.1, 0.2, 0.3, 0.4, 0.5]);
        assert_abs_diff_eq!(mu, 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(sigma, 0.02_f64.sqrt(), epsilon = 1e-15);
        let (mu, sigma) = window_stats(&[0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_abs_diff_eq!(mu, 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(sigma, 0.4, epsilon = 1e-15);
        let (mu, sigma) = window_stats(&[0.37; 5]);
        assert_abs_diff_eq!(mu, 0.37, epsilon = 1e-15);
        assert_abs_diff_eq!(sigma, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn warmup_hand_value() {
        assert_abs_diff_eq!(warmup_threshold(0.05, 0.25, 2, 5), 0.17, epsilon = 1e-15);
    }

    #[test]
    fn first_observation_uses_warmup_with_t_two() {
        let mut c = reset(SelectorConfig {
            init_threshold: 0.25,
            ..default_config()
        })
        .unwrap();
        let o = c.observe(0.0).unwrap();
        assert_abs_diff_eq!(o.theta_effective, 0.17, epsilon = 1e-15);
        assert_eq!(o.mu, None);
    }

    #[test]
    fn full_window_threshold_and_strict_comparison() {
        let mut c = reset(cfg(DecayMode::Literal)).unwrap();
        for v in [0.1, 0.2, 0.3, 0.4] {
            assert_eq!(c.observe(v).unwrap().mu, None);
        }
        // The fifth value fills the window [0.1 .. 0.5].
        let o = c.observe(0.5).unwrap();
        assert_abs_diff_eq!(o.theta_effective, 0.3 + 1.5 * 0.02_f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(o.theta_effective, 0.512132, epsilon = 1e-6);
        assert_eq!(o.decision, Decision::Skip);
        assert!(0.6 > o.theta_effective);
    }

    #[test]
    fn tie_skips() {
        let mut c = reset(SelectorConfig {
            base_threshold: 0.1,
            init_threshold: 0.1,
            ..default_config()
        })
        .unwrap();
        assert_eq!(c.observe(0.1).unwrap().decision, Decision::Skip);
    }

    #[test]
    fn literal_decay_scales_stored_theta() {
        let mut c = reset(SelectorConfig {
            base_threshold: 0.4,
            init_threshold: 0.4,
            decay_mode: DecayMode::Literal,
            ..default_config()
        })
        .unwrap();
        let o = c.observe(0.9).unwrap();
        assert_eq!(o.decision, Decision::Select);
        assert_abs_diff_eq!(c.theta(), 0.38, epsilon = 1e-15);
    }

    #[test]
    fn multiplier_decay_applies_to_next_comparison_only() {
        let mut c = reset(SelectorConfig {
            base_threshold: 0.4,
            init_threshold: 0.4,
            decay: 0.5,
            ..cfg(DecayMode::Multiplier)
        })
        .unwrap();
        assert_eq!(c.observe(0.9).unwrap().decision, Decision::Select);
        assert!(c.decay_pending());
        let o = c.observe(0.0).unwrap();
        assert_abs_diff_eq!(o.theta_effective, 0.2, epsilon = 1e-15);
        assert!(!c.decay_pending());
        let o = c.observe(0.0).unwrap();
        assert_abs_diff_eq!(o.theta_effective, 0.4, epsilon = 1e-15);
    }

    #[test]
    fn non_finite_error_is_rejected() {
        let mut c = reset(default_config()).unwrap();
        assert!(c.observe(f64::NAN).is_err());
        assert!(c.observe(f64::INFINITY).is_err());
        assert!(c.observe(-0.1).is_err());
        assert_eq!(c.observed(), 0);
    }

    #[test]
    fn reset_is_deterministic() {
        let a = reset(default_config()).unwrap();
        let b = reset(default_config()).unwrap();
        assert_eq!(a, b);
        assert_abs_diff_eq!(a.theta(), 0.20, epsilon = 0.0);
        assert!(a.in_warmup());
    }

    #[test]
    fn history_is_bounded_by_window() {
        let mut c = reset(default_config()).unwrap();
        for i in 0..100 {
            c.observe(i as f64 * 0.01).unwrap();
        }
        assert_eq!(c.recent_errors().count(), 5);
        assert_eq!(c.observed(), 100);
    }
}
