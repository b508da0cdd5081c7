//! Selector configuration.
//!
//! The configuration is a single flat record. The same field names are used
//! in TOML config files and in the `config` block of JSON reports, so a report's
//! config can be fed straight back in. Missing keys fall back to
//! [`SelectorConfig::default`]; unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the post-selection decay factor is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecayMode {
    /// `theta <- gamma * theta` right after a selection. The next observation
    /// recomputes theta from scratch, so the decayed value is never compared
    /// against anything.
    Literal,
    /// The comparison immediately following a selection uses
    /// `gamma * theta` instead of `theta`.
    Multiplier,
}

impl std::str::FromStr for DecayMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "literal" => Ok(Self::Literal),
            "multiplier" => Ok(Self::Multiplier),
            other => Err(Error::InvalidConfig {
                field: "decay_mode",
                reason: format!("must be `literal` or `multiplier`, got `{other}`"),
            }),
        }
    }
}

/// Gaussian-window SSIM parameters on a unit dynamic range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimParams {
    pub window: usize,
    pub sigma: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Default for SsimParams {
    fn default() -> Self {
        Self {
            window: 11,
            sigma: 1.5,
            c1: 0.01 * 0.01,
            c2: 0.03 * 0.03,
        }
    }
}

impl SsimParams {
    pub fn validate(&self) -> Result<()> {
        if self.window < 3 || self.window.is_multiple_of(2) {
            return invalid("ssim_window", format!("must be odd and >= 3, got {}", self.window));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return invalid("ssim_sigma", format!("must be > 0, got {}", self.sigma));
        }
        if !(self.c1.is_finite() && self.c1 > 0.0) {
            return invalid("ssim_c1", format!("must be > 0, got {}", self.c1));
        }
        if !(self.c2.is_finite() && self.c2 > 0.0) {
            return invalid("ssim_c2", format!("must be > 0, got {}", self.c2));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectorConfig {
    /// Photometric weight.
    pub alpha: f64,
    /// Structural (SSIM) weight.
    pub beta: f64,
    /// Momentum window length, in frames.
    pub window_size: usize,
    /// Multiplier on the window standard deviation.
    pub sensitivity: f64,
    /// Post-selection decay factor.
    pub decay: f64,
    /// Threshold floor.
    pub base_threshold: f64,
    /// Threshold the warm-up phase starts from.
    pub init_threshold: f64,
    pub decay_mode: DecayMode,
    pub ssim_window: usize,
    pub ssim_sigma: f64,
    pub ssim_c1: f64,
    pub ssim_c2: f64,
    /// Warps covering less than this fraction of the image force a keyframe.
    pub min_valid_fraction: f64,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        let ssim = SsimParams::default();
        Self {
            alpha: 0.7,
            beta: 0.3,
            window_size: 5,
            sensitivity: 1.5,
            decay: 0.95,
            base_threshold: 0.05,
            init_threshold: 0.20,
            decay_mode: DecayMode::Multiplier,
            ssim_window: ssim.window,
            ssim_sigma: ssim.sigma,
            ssim_c1: ssim.c1,
            ssim_c2: ssim.c2,
            min_valid_fraction: 0.05,
        }
    }
}

pub fn default_config() -> SelectorConfig {
    SelectorConfig::default()
}

/// Returns `cfg` unchanged if every invariant holds, otherwise names the
/// first field that violates one.
pub fn validate_config(cfg: SelectorConfig) -> Result<SelectorConfig> {
    let non_negative = |field: &'static str, v: f64| {
        if v.is_finite() && v >= 0.0 {
            Ok(())
        } else {
            invalid(field, format!("must be finite and >= 0, got {v}"))
        }
    };
    non_negative("alpha", cfg.alpha)?;
    non_negative("beta", cfg.beta)?;
    if cfg.alpha + cfg.beta <= 0.0 {
        return invalid("beta", "alpha + beta must be > 0".into());
    }
    if cfg.window_size < 2 {
        return invalid("window_size", format!("must be >= 2, got {}", cfg.window_size));
    }
    non_negative("sensitivity", cfg.sensitivity)?;
    if !(cfg.decay > 0.0 && cfg.decay <= 1.0) {
        return invalid("decay", format!("must satisfy 0 < decay <= 1, got {}", cfg.decay));
    }
    non_negative("base_threshold", cfg.base_threshold)?;
    non_negative("init_threshold", cfg.init_threshold)?;
    cfg.ssim().validate()?;
    if !(0.0..=1.0).contains(&cfg.min_valid_fraction) {
        return invalid(
            "min_valid_fraction",
            format!("must lie in [0, 1], got {}", cfg.min_valid_fraction),
        );
    }
    Ok(cfg)
}

impl SelectorConfig {
    pub fn ssim(&self) -> SsimParams {
        SsimParams {
            window: self.ssim_window,
            sigma: self.ssim_sigma,
            c1: self.ssim_c1,
            c2: self.ssim_c2,
        }
    }

    pub fn validate(self) -> Result<Self> {
        validate_config(self)
    }

    /// Parses a TOML document; keys not present keep their default value.
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: SelectorConfig = toml::from_str(s).map_err(|e| Error::Parse {
            path: "<config>".into(),
            line: e
                .span()
                .map(|span| s[..span.start].matches('\n').count() + 1)
                .unwrap_or(0),
            message: e.message().to_string(),
        })?;
        validate_config(cfg)
    }

    pub fn from_toml_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Parse { line, message, .. } => Error::Parse {
                path: path.to_path_buf(),
                line,
                message,
            },
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }
}

fn invalid<T>(field: &'static str, reason: String) -> Result<T> {
    Err(Error::InvalidConfig { field, reason })
}
