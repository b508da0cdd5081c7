//! Adaptive selection on a synthetic sequence, next to a uniform baseline
//! with the same keyframe budget.

use keyframe_core::dataio::{generate_synthetic, MotionSegment, SyntheticSpec, Texture, STANDARD_SPEED};
use keyframe_core::evaluation::{matched_uniform_stride, run_strategy, ComparisonReport, StrategySpec};
use keyframe_core::{Error, Result, SelectorConfig};
use serde::{Deserialize, Serialize};

/// Upper bound on sequence length, to keep a browser tab responsive.
pub const MAX_FRAMES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// First half still, second half sliding sideways at `speed`.
    StaticDynamic,
    /// Random pauses, drifts and pans.
    Random,
    Still,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExplorerParams {
    pub preset: Preset,
    pub frames: usize,
    /// m/frame; only used by `static_dynamic`.
    pub speed: f64,
    pub seed: u64,
    pub texture: Texture,
    pub config: SelectorConfig,
}

impl Default for ExplorerParams {
    fn default() -> Self {
        Self {
            preset: Preset::StaticDynamic,
            frames: 100,
            speed: STANDARD_SPEED,
            seed: 7,
            texture: Texture::GradientNoise,
            config: SelectorConfig::default(),
        }
    }
}

impl ExplorerParams {
    pub fn spec(&self) -> Result<SyntheticSpec> {
        let n = self.frames;
        if n == 0 || n > MAX_FRAMES {
            return Err(Error::InvalidCount(format!("frames must be in 1..={MAX_FRAMES}, got {n}")));
        }
        if !self.speed.is_finite() {
            return Err(Error::InvalidFrame(format!("speed must be finite, got {}", self.speed)));
        }
        let mut spec = match self.preset {
            Preset::StaticDynamic => SyntheticSpec::static_then_dynamic(n / 2, n - n / 2, self.speed, self.seed),
            Preset::Random => SyntheticSpec::random_dynamic(n, self.seed),
            Preset::Still => SyntheticSpec::small(n, self.texture, vec![MotionSegment::still(n)], self.seed),
        };
        spec.texture = self.texture;
        spec.validate()?;
        Ok(spec)
    }
}

/// The report holds two strategies, `adaptive` first, and both traces.
pub fn explore(params: &ExplorerParams) -> Result<ComparisonReport> {
    let cfg = params.config.validate()?;
    let frames = generate_synthetic(&params.spec()?)?;
    let adaptive = StrategySpec::adaptive(cfg);
    let result = run_strategy(&frames, &adaptive, &cfg)?;
    let uniform = StrategySpec::uniform(matched_uniform_stride(frames.len(), result.keyframes.len()));
    let baseline = run_strategy(&frames, &uniform, &cfg)?;

    let input = format!("synthetic {} seed {}", serde_json::to_value(params.preset)?, params.seed);
    let mut report = ComparisonReport::new(cfg, input.replace('"', ""));
    report.push(&adaptive, result);
    report.push(&uniform, baseline);
    Ok(report)
}
