//! Slow, direct reference implementations used to cross-check the library.
//!
//! Everything here works on plain slices and arrays and shares no code with
//! the crate under test.

#![allow(dead_code)]

/// Two-pass mean and population standard deviation.
pub fn stats(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mut sum = 0.0;
    for x in xs {
        sum += x;
    }
    let mu = sum / n;
    let mut ss = 0.0;
    for x in xs {
        ss += (x - mu) * (x - mu);
    }
    (mu, (ss / n).sqrt())
}

/// Threshold once the window is full.
pub fn threshold(xs: &[f64], base: f64, k: f64) -> f64 {
    let (mu, sigma) = stats(xs);
    let t = mu + k * sigma;
    if t > base {
        t
    } else {
        base
    }
}

pub fn luma(c: [f64; 3]) -> f64 {
    0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2]
}

/// Mean SSIM over mask-true centers.
///
/// Each center uses the Gaussian-weighted statistics of the in-image,
/// mask-true pixels of its window, accumulated with an explicit loop over
/// window offsets.
#[allow(clippy::too_many_arguments)]
pub fn mean_ssim(
    a: &[f64],
    b: &[f64],
    mask: &[bool],
    w: usize,
    h: usize,
    window: usize,
    sigma: f64,
    c1: f64,
    c2: f64,
) -> f64 {
    let r = (window / 2) as i64;
    let mut total = 0.0;
    let mut centers = 0usize;
    for cy in 0..h as i64 {
        for cx in 0..w as i64 {
            if !mask[(cy as usize) * w + cx as usize] {
                continue;
            }
            let mut wsum = 0.0;
            let mut ma = 0.0;
            let mut mb = 0.0;
            for dy in -r..=r {
                for dx in -r..=r {
                    let (x, y) = (cx + dx, cy + dy);
                    if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
                        continue;
                    }
                    let i = (y as usize) * w + x as usize;
                    if !mask[i] {
                        continue;
                    }
                    let g = (-((dx * dx + dy * dy) as f64) / (2.0 * sigma * sigma)).exp();
                    wsum += g;
                    ma += g * a[i];
                    mb += g * b[i];
                }
            }
            ma /= wsum;
            mb /= wsum;
            let mut va = 0.0;
            let mut vb = 0.0;
            let mut cov = 0.0;
            for dy in -r..=r {
                for dx in -r..=r {
                    let (x, y) = (cx + dx, cy + dy);
                    if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
                        continue;
                    }
                    let i = (y as usize) * w + x as usize;
                    if !mask[i] {
                        continue;
                    }
                    let g = (-((dx * dx + dy * dy) as f64) / (2.0 * sigma * sigma)).exp();
                    va += g * (a[i] - ma) * (a[i] - ma);
                    vb += g * (b[i] - mb) * (b[i] - mb);
                    cov += g * (a[i] - ma) * (b[i] - mb);
                }
            }
            va /= wsum;
            vb /= wsum;
            cov /= wsum;
            total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            centers += 1;
        }
    }
    total / centers as f64
}

/// Pinhole camera with a camera-to-world pose given as row-major rotation
/// and translation.
#[derive(Debug, Clone, Copy)]
pub struct Cam {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub r: [[f64; 3]; 3],
    pub t: [f64; 3],
}

impl Cam {
    fn world_point(&self, p: [f64; 3]) -> [f64; 3] {
        let mut out = self.t;
        for (i, o) in out.iter_mut().enumerate() {
            *o += (0..3).map(|j| self.r[i][j] * p[j]).sum::<f64>();
        }
        out
    }

    fn camera_point(&self, p: [f64; 3]) -> [f64; 3] {
        let d = [p[0] - self.t[0], p[1] - self.t[1], p[2] - self.t[2]];
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o += (0..3).map(|j| self.r[j][i] * d[j]).sum::<f64>();
        }
        out
    }
}

/// Brute-force forward warp: for every target pixel, scans all source pixels
/// and keeps the closest one that rounds onto it (ties to the lowest source
/// index). Returns per-target `(color, depth)`.
pub fn warp(
    rgb: &[[f64; 3]],
    depth: &[f64],
    w: usize,
    h: usize,
    src: &Cam,
    dst: &Cam,
) -> Vec<Option<([f64; 3], f64)>> {
    let mut landing = Vec::with_capacity(w * h);
    for v in 0..h {
        for u in 0..w {
            let d = depth[v * w + u];
            if !(d.is_finite() && d > 0.0) {
                landing.push(None);
                continue;
            }
            let pc = [(u as f64 - src.cx) / src.fx * d, (v as f64 - src.cy) / src.fy * d, d];
            let q = dst.camera_point(src.world_point(pc));
            if q[2].is_nan() || q[2] <= 0.0 {
                landing.push(None);
                continue;
            }
            let x = (dst.fx * q[0] / q[2] + dst.cx).round();
            let y = (dst.fy * q[1] / q[2] + dst.cy).round();
            if x < 0.0 || y < 0.0 || x >= w as f64 || y >= h as f64 {
                landing.push(None);
            } else {
                landing.push(Some((x as usize, y as usize, q[2])));
            }
        }
    }
    let mut out = vec![None; w * h];
    for ty in 0..h {
        for tx in 0..w {
            let mut best: Option<(usize, f64)> = None;
            for (i, l) in landing.iter().enumerate() {
                if let Some((x, y, z)) = *l {
                    if x == tx && y == ty && best.is_none_or(|(_, bz)| z < bz) {
                        best = Some((i, z));
                    }
                }
            }
            out[ty * w + tx] = best.map(|(i, z)| (rgb[i], z));
        }
    }
    out
}

/// Closed-form camera-to-world pose for the motion "`n1` frames translating
/// by `v1` per frame, then sideways at `vx` per frame while yawing `phi` per
/// frame about the camera y axis". Returns `(rotation, translation)` of
/// `frame`.
pub fn two_segment_pose(n1: usize, v1: [f64; 3], vx: f64, phi: f64, frame: usize) -> ([[f64; 3]; 3], [f64; 3]) {
    let a = frame.min(n1.saturating_sub(1)) as f64;
    let mut t = [a * v1[0], a * v1[1], a * v1[2]];
    let m = (frame + 1).saturating_sub(n1);
    let (sum_cos, sum_sin) = if m == 0 {
        (0.0, 0.0)
    } else if phi == 0.0 {
        (m as f64, 0.0)
    } else {
        let mf = m as f64;
        let k = (mf * phi / 2.0).sin() / (phi / 2.0).sin();
        (k * ((mf - 1.0) * phi / 2.0).cos(), k * ((mf - 1.0) * phi / 2.0).sin())
    };
    // Yaw by angle q maps the x axis to (cos q, 0, -sin q).
    t[0] += vx * sum_cos;
    t[2] -= vx * sum_sin;
    let q = m as f64 * phi;
    let r = [[q.cos(), 0.0, q.sin()], [0.0, 1.0, 0.0], [-q.sin(), 0.0, q.cos()]];
    (r, t)
}
