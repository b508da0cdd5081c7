//! Depth-based forward warping of a keyframe into another camera view.
//!
//! Every keyframe pixel with a valid depth is lifted to 3D, moved into the
//! target camera and splatted to the nearest target pixel. When several
//! points land on the same pixel the closest one wins; remaining ties go to
//! the smaller source linear index. Pixels that receive no point stay
//! mask-false and black. There is no hole filling.

use crate::camera::{Intrinsics, Pose};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::image::{is_valid_depth, DepthMap, Grid, Mask, RgbImage};

#[derive(Debug, Clone, PartialEq)]
pub struct WarpResult {
    /// Keyframe colors as seen from the target view.
    pub warped: RgbImage,
    /// True where at least one keyframe point landed.
    pub mask: Mask,
    /// Target-camera depth of the winning point; 0 where the mask is false.
    pub zbuffer: DepthMap,
}

pub fn warp_frame(keyframe: &Frame, target_pose: &Pose, target_intrinsics: &Intrinsics) -> Result<WarpResult> {
    let (w, h) = keyframe.dims();
    if target_intrinsics.width != w || target_intrinsics.height != h {
        return Err(Error::DimensionMismatch {
            expected_w: w,
            expected_h: h,
            got_w: target_intrinsics.width,
            got_h: target_intrinsics.height,
        });
    }
    if target_pose
        .rotation()
        .iter()
        .chain(target_pose.translation().iter())
        .any(|v| !v.is_finite())
    {
        return Err(Error::InvalidPose("target pose has non-finite entries".into()));
    }

    let rel = Pose::relative(target_pose, keyframe.pose());
    let src_k = keyframe.intrinsics();
    let rgb = keyframe.rgb();
    let depth = keyframe.depth();

    let mut warped = Grid::filled(w, h, [0.0; 3]);
    let mut mask = Grid::filled(w, h, false);
    let mut zbuffer = Grid::filled(w, h, 0.0);

    // Source pixels are visited in increasing linear index and only a strictly
    // closer point replaces an existing one, which implements the tie rule.
    for v in 0..h {
        for u in 0..w {
            let d = *depth.get(u, v);
            if !is_valid_depth(d) {
                continue;
            }
            let p = rel.transform_point(&src_k.back_project(u as f64, v as f64, d));
            if !p.z.is_finite() || p.z <= 0.0 {
                continue;
            }
            let (x, y) = target_intrinsics.project(&p);
            let (tx, ty) = (x.round(), y.round());
            if !(tx >= 0.0 && ty >= 0.0 && tx < w as f64 && ty < h as f64) {
                continue;
            }
            let (tx, ty) = (tx as usize, ty as usize);
            let hit = mask.get_mut(tx, ty);
            let z = zbuffer.get_mut(tx, ty);
            if !*hit || p.z < *z {
                *hit = true;
                *z = p.z;
                *warped.get_mut(tx, ty) = *rgb.get(u, v);
            }
        }
    }

    Ok(WarpResult { warped, mask, zbuffer })
}

/// Fraction of pixels with a valid correspondence.
pub fn mask_coverage(result: &WarpResult) -> f64 {
    coverage(&result.mask)
}

pub(crate) fn coverage(mask: &Mask) -> f64 {
    if mask.is_empty() {
        return 0.0;
    }
    mask.count_true() as f64 / mask.len() as f64
}
