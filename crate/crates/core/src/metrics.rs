//! Hybrid change score between a frame and the warped keyframe.
//!
//! * photometric term: masked mean absolute difference, averaged over the
//!   three color channels;
//! * structural term: `1 - mean SSIM` on BT.601 luminance, Gaussian-weighted
//!   local statistics;
//! * combined: `alpha * photometric + beta * structural`.
//!
//! Local SSIM statistics only draw on pixels that are inside the image *and*
//! inside the validity mask; the window weights are renormalized over that
//! set. An SSIM value contributes to the mean iff its center pixel is valid.
//! With a full mask this reduces to the usual border-clamped, renormalized
//! window, and pixels outside the mask never influence any error value.

use serde::{Deserialize, Serialize};

use crate::config::{SelectorConfig, SsimParams};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::geometry::{coverage, warp_frame};
use crate::image::{luminance, Grid, Mask, RgbImage};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorScore {
    pub e_photo: f64,
    pub e_ssim: f64,
    pub e_t: f64,
    pub valid_fraction: f64,
    /// Set when the warp covered less than `min_valid_fraction` of the image.
    /// The score values are then zero if the mask was empty.
    pub degenerate: bool,
}

fn check_inputs(current: &RgbImage, warped: &RgbImage, mask: &Mask) -> Result<()> {
    let (w, h) = current.dims();
    warped.ensure_dims(w, h)?;
    mask.ensure_dims(w, h)?;
    if mask.count_true() == 0 {
        return Err(Error::EmptyMask);
    }
    Ok(())
}

pub fn photometric_error(current: &RgbImage, warped: &RgbImage, mask: &Mask) -> Result<f64> {
    check_inputs(current, warped, mask)?;
    let mut sum = 0.0;
    let mut n = 0usize;
    for ((a, b), &m) in current
        .as_slice()
        .iter()
        .zip(warped.as_slice())
        .zip(mask.as_slice())
    {
        if m {
            sum += ((a[0] - b[0]).abs() + (a[1] - b[1]).abs() + (a[2] - b[2]).abs()) / 3.0;
            n += 1;
        }
    }
    Ok(sum / n as f64)
}

/// Unnormalized 1D Gaussian taps for offsets `-r..=r`.
pub fn gaussian_taps(params: &SsimParams) -> Vec<f64> {
    let r = (params.window / 2) as isize;
    let two_s2 = 2.0 * params.sigma * params.sigma;
    (-r..=r).map(|i| (-((i * i) as f64) / two_s2).exp()).collect()
}

/// Zero-padded separable correlation with a symmetric kernel.
fn blur(src: &Grid<f64>, taps: &[f64]) -> Grid<f64> {
    let (w, h) = src.dims();
    let r = (taps.len() / 2) as isize;
    let mut tmp = Grid::filled(w, h, 0.0);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, t) in taps.iter().enumerate() {
                let sx = x as isize + k as isize - r;
                if sx >= 0 && (sx as usize) < w {
                    acc += t * src.get(sx as usize, y);
                }
            }
            *tmp.get_mut(x, y) = acc;
        }
    }
    let mut out = Grid::filled(w, h, 0.0);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, t) in taps.iter().enumerate() {
                let sy = y as isize + k as isize - r;
                if sy >= 0 && (sy as usize) < h {
                    acc += t * tmp.get(x, sy as usize);
                }
            }
            *out.get_mut(x, y) = acc;
        }
    }
    out
}

/// Per-pixel SSIM between two single-channel images. Mask-false centers are
/// `None`.
pub fn ssim_map(a: &Grid<f64>, b: &Grid<f64>, mask: &Mask, params: &SsimParams) -> Result<Grid<Option<f64>>> {
    params.validate()?;
    let (w, h) = a.dims();
    b.ensure_dims(w, h)?;
    mask.ensure_dims(w, h)?;
    let taps = gaussian_taps(params);

    let m = mask.map(|&v| if v { 1.0 } else { 0.0 });
    let masked = |f: &dyn Fn(f64, f64) -> f64| {
        let mut g = Grid::filled(w, h, 0.0);
        for (i, out) in g.as_mut_slice().iter_mut().enumerate() {
            if mask.as_slice()[i] {
                *out = f(a.as_slice()[i], b.as_slice()[i]);
            }
        }
        blur(&g, &taps)
    };
    let norm = blur(&m, &taps);
    let sx = masked(&|x, _| x);
    let sy = masked(&|_, y| y);
    let sxx = masked(&|x, _| x * x);
    let syy = masked(&|_, y| y * y);
    let sxy = masked(&|x, y| x * y);

    let (c1, c2) = (params.c1, params.c2);
    let data = (0..w * h)
        .map(|i| {
            if !mask.as_slice()[i] {
                return None;
            }
            let n = norm.as_slice()[i];
            let mx = sx.as_slice()[i] / n;
            let my = sy.as_slice()[i] / n;
            let vx = sxx.as_slice()[i] / n - mx * mx;
            let vy = syy.as_slice()[i] / n - my * my;
            let cxy = sxy.as_slice()[i] / n - mx * my;
            Some(((2.0 * mx * my + c1) * (2.0 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2)))
        })
        .collect();
    Grid::from_vec(w, h, data)
}

pub fn luminance_image(rgb: &RgbImage) -> Grid<f64> {
    rgb.map(luminance)
}

/// Mean SSIM over mask-true centers, on luminance.
pub fn mean_ssim(current: &RgbImage, warped: &RgbImage, mask: &Mask, params: &SsimParams) -> Result<f64> {
    check_inputs(current, warped, mask)?;
    let map = ssim_map(&luminance_image(current), &luminance_image(warped), mask, params)?;
    let (sum, n) = map
        .as_slice()
        .iter()
        .flatten()
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    Ok(sum / n as f64)
}

pub fn ssim_error(current: &RgbImage, warped: &RgbImage, mask: &Mask, params: &SsimParams) -> Result<f64> {
    let s = mean_ssim(current, warped, mask, params)?;
    Ok((1.0 - s).clamp(0.0, 2.0))
}

#[inline]
pub fn combine(e_photo: f64, e_ssim: f64, alpha: f64, beta: f64) -> f64 {
    alpha * e_photo + beta * e_ssim
}

/// Warps `keyframe` into `current`'s view and scores the difference.
pub fn hybrid_error(current: &Frame, keyframe: &Frame, cfg: &SelectorConfig) -> Result<ErrorScore> {
    let (w, h) = keyframe.dims();
    current.rgb().ensure_dims(w, h)?;
    let warp = warp_frame(keyframe, current.pose(), current.intrinsics())?;
    let valid_fraction = coverage(&warp.mask);
    if warp.mask.count_true() == 0 {
        return Ok(ErrorScore {
            e_photo: 0.0,
            e_ssim: 0.0,
            e_t: 0.0,
            valid_fraction,
            degenerate: true,
        });
    }
    let e_photo = photometric_error(current.rgb(), &warp.warped, &warp.mask)?;
    let e_ssim = ssim_error(current.rgb(), &warp.warped, &warp.mask, &cfg.ssim())?;
    Ok(ErrorScore {
        e_photo,
        e_ssim,
        e_t: combine(e_photo, e_ssim, cfg.alpha, cfg.beta),
        valid_fraction,
        degenerate: valid_fraction < cfg.min_valid_fraction,
    })
}
