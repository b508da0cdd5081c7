//! Seeded synthetic RGB-D sequences with exact ground truth.
//!
//! The scene is a single textured plane at world `z = plane_depth`, parallel
//! to the image plane of the first camera. The first camera sits at the world
//! origin; every later pose applies one body-frame increment per frame
//! (`R <- R * exp(omega)`, `t <- t + R * v`, with `R` taken before the
//! update). Depth is the exact ray/plane intersection, so warping with the
//! true poses reproduces the scene up to nearest-pixel rounding.

use nalgebra::{Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::camera::{Intrinsics, Pose};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::image::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Texture {
    Checkerboard,
    GradientNoise,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotionSegment {
    /// Number of frames this segment spans.
    pub frames: usize,
    /// Camera-frame translation per frame, meters.
    #[serde(default)]
    pub velocity: [f64; 3],
    /// Camera-frame rotation per frame, axis-angle radians.
    #[serde(default)]
    pub angular_velocity: [f64; 3],
}

impl MotionSegment {
    pub fn still(frames: usize) -> Self {
        Self {
            frames,
            velocity: [0.0; 3],
            angular_velocity: [0.0; 3],
        }
    }

    pub fn translating(frames: usize, velocity: [f64; 3]) -> Self {
        Self {
            frames,
            velocity,
            angular_velocity: [0.0; 3],
        }
    }
}

/// Sideways speed of the standard moving segment, m/frame. At the preset
/// geometry (fx = 100, plane at 2 m) this is 0.55 px/frame, so consecutive
/// frames never line up on whole pixels.
pub const STANDARD_SPEED: f64 = 0.011;

fn default_focal() -> f64 {
    100.0
}

fn default_fps() -> f64 {
    30.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub width: usize,
    pub height: usize,
    /// Focal length in pixels (fx = fy); principal point at the image center.
    #[serde(default = "default_focal")]
    pub focal_length: f64,
    pub frame_count: usize,
    #[serde(default = "default_fps")]
    pub fps: f64,
    pub texture: Texture,
    pub plane_depth: f64,
    /// Segments cover frames in order; frames past the last segment hold still.
    #[serde(default)]
    pub motion: Vec<MotionSegment>,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidFrame(format!("synthetic spec: {m}")));
        if self.frame_count == 0 {
            return bad("frame_count must be >= 1".into());
        }
        if !(self.plane_depth.is_finite() && self.plane_depth > 0.0) {
            return bad(format!("plane_depth must be > 0, got {}", self.plane_depth));
        }
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return bad(format!("fps must be > 0, got {}", self.fps));
        }
        for seg in &self.motion {
            if seg.velocity.iter().chain(&seg.angular_velocity).any(|v| !v.is_finite()) {
                return bad("non-finite motion segment".into());
            }
        }
        self.intrinsics().map(|_| ())
    }

    pub fn intrinsics(&self) -> Result<Intrinsics> {
        Intrinsics::new(
            self.focal_length,
            self.focal_length,
            self.width as f64 / 2.0,
            self.height as f64 / 2.0,
            self.width,
            self.height,
        )
    }

    /// 64x64, fx = 100, plane at 2 m.
    pub fn small(frame_count: usize, texture: Texture, motion: Vec<MotionSegment>, seed: u64) -> Self {
        Self {
            width: 64,
            height: 64,
            focal_length: 100.0,
            frame_count,
            fps: 30.0,
            texture,
            plane_depth: 2.0,
            motion,
            seed,
        }
    }

    /// `still` static frames followed by `moving` frames of steady sideways
    /// motion at `speed` m/frame.
    pub fn static_then_dynamic(still: usize, moving: usize, speed: f64, seed: u64) -> Self {
        Self::small(
            still + moving,
            Texture::GradientNoise,
            vec![MotionSegment::still(still), MotionSegment::translating(moving, [speed, 0.0, 0.0])],
            seed,
        )
    }

    /// 50 still frames, then 50 frames sliding sideways at
    /// [`STANDARD_SPEED`].
    pub fn standard_static_dynamic(seed: u64) -> Self {
        Self::static_then_dynamic(50, 50, STANDARD_SPEED, seed)
    }

    /// Irregular motion: a random mix of pauses, slow drifts and fast pans,
    /// fully determined by `seed`.
    pub fn random_dynamic(frame_count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_d1ce);
        let mut motion = Vec::new();
        let mut covered = 0;
        while covered < frame_count {
            let frames = rng.gen_range(8..=20).min(frame_count - covered);
            covered += frames;
            let kind = rng.gen_range(0..3);
            let speed = match kind {
                0 => 0.0,
                1 => rng.gen_range(0.002..0.006),
                _ => rng.gen_range(0.015..0.04),
            };
            let angle = rng.gen_range(0.0..std::f64::consts::TAU);
            let yaw = if kind == 2 { rng.gen_range(-0.004..0.004) } else { 0.0 };
            motion.push(MotionSegment {
                frames,
                velocity: [speed * angle.cos(), speed * angle.sin(), 0.0],
                angular_velocity: [0.0, yaw, 0.0],
            });
        }
        Self::small(frame_count, Texture::GradientNoise, motion, seed)
    }

    /// Camera-to-world pose of every frame.
    pub fn poses(&self) -> Vec<Pose> {
        let mut per_step = Vec::with_capacity(self.frame_count);
        for seg in &self.motion {
            per_step.extend(std::iter::repeat_n(*seg, seg.frames));
        }
        let mut rotation = Rotation3::identity();
        let mut translation = Vector3::zeros();
        let mut poses = Vec::with_capacity(self.frame_count);
        poses.push(Pose::identity());
        for f in 1..self.frame_count {
            // Frame f moves according to the segment containing f.
            if let Some(seg) = per_step.get(f) {
                translation += rotation * Vector3::from(seg.velocity);
                rotation *= Rotation3::new(Vector3::from(seg.angular_velocity));
            }
            poses.push(Pose::new(*rotation.matrix(), translation).expect("integrated pose is rigid"));
        }
        poses
    }
}

/// Stateless, seeded color pattern on the world plane.
#[derive(Debug, Clone, Copy)]
struct PlaneTexture {
    kind: Texture,
    seed: u64,
    colors: [[f64; 3]; 2],
    phase: [f64; 2],
}

const CHECKER_CELL: f64 = 0.1;
const NOISE_CELL: f64 = 0.06;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn lattice_color(seed: u64, ix: i64, iy: i64) -> [f64; 3] {
    let h = splitmix(seed ^ splitmix((ix as u64).wrapping_mul(0x1f1f_1f1f) ^ splitmix(iy as u64)));
    let c = |shift: u32| ((h >> shift) & 0xffff) as f64 / 65535.0;
    [c(0), c(16), c(32)]
}

fn smoothstep(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

impl PlaneTexture {
    fn new(kind: Texture, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut color = || -> [f64; 3] { [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)] };
        let a = color();
        let b = color();
        // Keep the two checker colors clearly apart and the cell edges away
        // from exact pixel centers.
        let b = if (a[0] - b[0]).abs() + (a[1] - b[1]).abs() + (a[2] - b[2]).abs() < 0.6 {
            a.map(|c| 1.0 - c)
        } else {
            b
        };
        let phase = [
            rng.gen_range(0.13..0.87) * CHECKER_CELL,
            rng.gen_range(0.13..0.87) * CHECKER_CELL,
        ];
        Self {
            kind,
            seed,
            colors: [a, b],
            phase,
        }
    }

    fn noise(&self, x: f64, y: f64, cell: f64, salt: u64) -> [f64; 3] {
        let (gx, gy) = (x / cell, y / cell);
        let (ix, iy) = (gx.floor(), gy.floor());
        let (tx, ty) = (smoothstep(gx - ix), smoothstep(gy - iy));
        let (ix, iy) = (ix as i64, iy as i64);
        let seed = self.seed ^ salt;
        let c00 = lattice_color(seed, ix, iy);
        let c10 = lattice_color(seed, ix + 1, iy);
        let c01 = lattice_color(seed, ix, iy + 1);
        let c11 = lattice_color(seed, ix + 1, iy + 1);
        std::array::from_fn(|k| {
            let top = c00[k] + (c10[k] - c00[k]) * tx;
            let bottom = c01[k] + (c11[k] - c01[k]) * tx;
            top + (bottom - top) * ty
        })
    }

    fn sample(&self, x: f64, y: f64) -> [f64; 3] {
        match self.kind {
            Texture::Checkerboard => {
                let cx = ((x + self.phase[0]) / CHECKER_CELL).floor() as i64;
                let cy = ((y + self.phase[1]) / CHECKER_CELL).floor() as i64;
                self.colors[((cx + cy).rem_euclid(2)) as usize]
            }
            Texture::GradientNoise => {
                let coarse = self.noise(x, y, NOISE_CELL, 0);
                let fine = self.noise(x, y, NOISE_CELL / 2.5, 0xf1ae);
                std::array::from_fn(|k| (0.65 * coarse[k] + 0.35 * fine[k]).clamp(0.0, 1.0))
            }
        }
    }
}

/// Renders the sequence described by `spec`. Identical specs give bit-identical frames.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Vec<Frame>> {
    spec.validate()?;
    let k = spec.intrinsics()?;
    let texture = PlaneTexture::new(spec.texture, spec.seed);
    spec.poses()
        .into_iter()
        .enumerate()
        .map(|(i, pose)| {
            let (rgb, depth) = render(&texture, &k, &pose, spec.plane_depth);
            Frame::new(i, i as f64 / spec.fps, rgb, depth, pose, k)
        })
        .collect()
}

fn render(texture: &PlaneTexture, k: &Intrinsics, pose: &Pose, plane_z: f64) -> (Grid<[f64; 3]>, Grid<f64>) {
    let mut rgb = Grid::filled(k.width, k.height, [0.0; 3]);
    let mut depth = Grid::filled(k.width, k.height, 0.0);
    let origin = pose.translation();
    for v in 0..k.height {
        for u in 0..k.width {
            let ray_cam = k.back_project(u as f64, v as f64, 1.0);
            let ray = pose.rotation() * ray_cam;
            if ray.z <= 0.0 {
                continue;
            }
            let s = (plane_z - origin.z) / ray.z;
            if s.is_nan() || s <= 0.0 {
                continue;
            }
            let hit = origin + ray * s;
            *rgb.get_mut(u, v) = texture.sample(hit.x, hit.y);
            // ray_cam.z == 1, so the ray parameter is the camera-frame depth.
            *depth.get_mut(u, v) = s;
        }
    }
    (rgb, depth)
}
