#![allow(dead_code)]

use keyframe_core::image::{DepthMap, Grid, Mask, RgbImage};
use keyframe_core::{Frame, Intrinsics, Pose};
use nalgebra::{Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::oracles::Cam;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_rgb(rng: &mut ChaCha8Rng, w: usize, h: usize) -> RgbImage {
    Grid::from_fn(w, h, |_, _| [rng.gen(), rng.gen(), rng.gen()])
}

pub fn random_gray(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Grid<f64> {
    Grid::from_fn(w, h, |_, _| rng.gen())
}

pub fn random_mask(rng: &mut ChaCha8Rng, w: usize, h: usize, p_true: f64) -> Mask {
    let mut m = Grid::from_fn(w, h, |_, _| rng.gen_bool(p_true));
    *m.get_mut(rng.gen_range(0..w), rng.gen_range(0..h)) = true;
    m
}

/// Depth in [1, 3] m with a sprinkling of invalid pixels.
pub fn random_depth(rng: &mut ChaCha8Rng, w: usize, h: usize) -> DepthMap {
    Grid::from_fn(w, h, |_, _| if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(1.0..3.0) })
}

pub fn random_pose(rng: &mut ChaCha8Rng, max_t: f64, max_angle: f64) -> Pose {
    let t = Vector3::new(
        rng.gen_range(-max_t..=max_t),
        rng.gen_range(-max_t..=max_t),
        rng.gen_range(-max_t..=max_t),
    );
    let axis = Vector3::new(
        rng.gen_range(-max_angle..=max_angle),
        rng.gen_range(-max_angle..=max_angle),
        rng.gen_range(-max_angle..=max_angle),
    );
    Pose::new(*Rotation3::new(axis).matrix(), t).unwrap()
}

pub fn intrinsics(w: usize, h: usize) -> Intrinsics {
    Intrinsics::new(w as f64, w as f64, w as f64 / 2.0, h as f64 / 2.0, w, h).unwrap()
}

pub fn frame(index: usize, rgb: RgbImage, depth: DepthMap, pose: Pose, k: Intrinsics) -> Frame {
    Frame::new(index, index as f64 / 30.0, rgb, depth, pose, k).unwrap()
}

pub fn cam(pose: &Pose, k: &Intrinsics) -> Cam {
    let r = pose.rotation();
    let t = pose.translation();
    Cam {
        fx: k.fx,
        fy: k.fy,
        cx: k.cx,
        cy: k.cy,
        r: [
            [r[(0, 0)], r[(0, 1)], r[(0, 2)]],
            [r[(1, 0)], r[(1, 1)], r[(1, 2)]],
            [r[(2, 0)], r[(2, 1)], r[(2, 2)]],
        ],
        t: [t.x, t.y, t.z],
    }
}

/// Copy of `f` with fresh pixel buffers.
pub fn deep_copy(f: &Frame) -> Frame {
    Frame::new(
        f.index(),
        f.timestamp(),
        f.rgb().clone(),
        f.depth().clone(),
        *f.pose(),
        *f.intrinsics(),
    )
    .unwrap()
}
