//! One keyframe warped into a second, displaced view, with the images and
//! scores behind the hybrid error.

use keyframe_core::dataio::{generate_synthetic, MotionSegment, SyntheticSpec, Texture};
use keyframe_core::image::Grid;
use keyframe_core::metrics::{luminance_image, ssim_map};
use keyframe_core::{hybrid_error, mask_coverage, warp_frame, Result, SelectorConfig};
use serde::{Deserialize, Serialize};

/// RGBA of warped pixels no keyframe point landed on.
pub const HOLE_RGBA: [u8; 4] = [255, 0, 255, 255];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ViewParams {
    pub texture: Texture,
    pub seed: u64,
    /// Camera-frame motion from keyframe to current view, meters.
    pub translation: [f64; 3],
    /// Rotation about the vertical axis, radians.
    pub yaw: f64,
    pub config: SelectorConfig,
}

impl Default for ViewParams {
    fn default() -> Self {
        Self {
            texture: Texture::GradientNoise,
            seed: 7,
            translation: [0.01, 0.0, 0.0],
            yaw: 0.0,
            config: SelectorConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WarpView {
    pub width: usize,
    pub height: usize,
    /// Row-major RGBA buffers, `width * height * 4` bytes each.
    pub keyframe: Vec<u8>,
    pub current: Vec<u8>,
    pub warped: Vec<u8>,
    /// Per-pixel SSIM dissimilarity `1 - ssim`, white at 0, dark red at 1 and
    /// above; holes as [`HOLE_RGBA`].
    pub ssim: Vec<u8>,
    pub e_photo: f64,
    pub e_ssim: f64,
    pub e_t: f64,
    pub coverage: f64,
    pub degenerate: bool,
}

fn to_byte(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

fn rgba(image: &Grid<[f64; 3]>, mask: Option<&Grid<bool>>) -> Vec<u8> {
    let mut out = Vec::with_capacity(image.len() * 4);
    for (i, c) in image.as_slice().iter().enumerate() {
        if mask.is_some_and(|m| !m.as_slice()[i]) {
            out.extend_from_slice(&HOLE_RGBA);
        } else {
            out.extend_from_slice(&[to_byte(c[0]), to_byte(c[1]), to_byte(c[2]), 255]);
        }
    }
    out
}

fn heat(map: &Grid<Option<f64>>) -> Vec<u8> {
    let mut out = Vec::with_capacity(map.len() * 4);
    for v in map.as_slice() {
        match v {
            None => out.extend_from_slice(&HOLE_RGBA),
            Some(s) => {
                let d = (1.0 - s).clamp(0.0, 1.0);
                out.extend_from_slice(&[to_byte(1.0 - 0.4 * d), to_byte(1.0 - d), to_byte(1.0 - d), 255]);
            }
        }
    }
    out
}

pub fn view(params: &ViewParams) -> Result<WarpView> {
    let cfg = params.config.validate()?;
    let motion = MotionSegment {
        frames: 2,
        velocity: params.translation,
        angular_velocity: [0.0, params.yaw, 0.0],
    };
    let spec = SyntheticSpec::small(2, params.texture, vec![motion], params.seed);
    spec.validate()?;
    let frames = generate_synthetic(&spec)?;
    let (key, current) = (&frames[0], &frames[1]);

    let warp = warp_frame(key, current.pose(), current.intrinsics())?;
    let score = hybrid_error(current, key, &cfg)?;
    let map = ssim_map(
        &luminance_image(current.rgb()),
        &luminance_image(&warp.warped),
        &warp.mask,
        &cfg.ssim(),
    )?;
    let (width, height) = key.dims();
    Ok(WarpView {
        width,
        height,
        keyframe: rgba(key.rgb(), None),
        current: rgba(current.rgb(), None),
        warped: rgba(&warp.warped, Some(&warp.mask)),
        ssim: heat(&map),
        e_photo: score.e_photo,
        e_ssim: score.e_ssim,
        e_t: score.e_t,
        coverage: mask_coverage(&warp),
        degenerate: score.degenerate,
    })
}
