//! TUM RGB-D directory layout.
//!
//! ```text
//! root/
//!   rgb.txt          # timestamp rgb/<file>.png
//!   depth.txt        # timestamp depth/<file>.png
//!   groundtruth.txt  # timestamp tx ty tz qx qy qz qw
//!   intrinsics.toml  # fx fy cx cy width height depth_scale
//!   rgb/   depth/
//! ```
//!
//! List files are whitespace separated; blank lines and lines starting with
//! `#` are ignored. Depth images are 16-bit single channel and divided by
//! `depth_scale` to obtain meters. Trajectory poses are camera-to-world.

use std::fs;
use std::path::{Path, PathBuf};

use image::{ImageBuffer, Luma, Rgb};
use log::{info, warn};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::associate::associate;
use crate::camera::{Intrinsics, Pose};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::image::{is_valid_depth, DepthMap, Grid, RgbImage};

pub const RGB_LIST: &str = "rgb.txt";
pub const DEPTH_LIST: &str = "depth.txt";
pub const TRAJECTORY: &str = "groundtruth.txt";
pub const INTRINSICS: &str = "intrinsics.toml";

fn default_depth_scale() -> f64 {
    5000.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntrinsicsFile {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
    #[serde(default = "default_depth_scale")]
    pub depth_scale: f64,
}

impl IntrinsicsFile {
    pub fn intrinsics(&self) -> Result<Intrinsics> {
        Intrinsics::new(self.fx, self.fy, self.cx, self.cy, self.width, self.height)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuaternionOrder {
    /// `qx qy qz qw`, the TUM convention.
    #[default]
    Xyzw,
    Wxyz,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadOptions {
    pub max_time_delta: f64,
    pub quaternion_order: QuaternionOrder,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            max_time_delta: 0.02,
            quaternion_order: QuaternionOrder::Xyzw,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimedPath {
    pub timestamp: f64,
    pub path: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryEntry {
    pub timestamp: f64,
    pub translation: [f64; 3],
    /// Always stored as `(w, x, y, z)` regardless of the file order.
    pub rotation_wxyz: [f64; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceManifest {
    pub root: PathBuf,
    pub rgb: Vec<TimedPath>,
    pub depth: Vec<TimedPath>,
    pub trajectory: Vec<TrajectoryEntry>,
    pub depth_scale: f64,
    pub intrinsics: Intrinsics,
}

fn data_lines(path: &Path) -> Result<Vec<(usize, Vec<String>)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                None
            } else {
                Some((i + 1, line.split_whitespace().map(str::to_owned).collect()))
            }
        })
        .collect())
}

fn parse_f64(path: &Path, line: usize, token: &str) -> Result<f64> {
    let v: f64 = token.parse().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("expected a number, got `{token}`"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("non-finite value `{token}`"),
        });
    }
    Ok(v)
}

fn parse_image_list(path: &Path) -> Result<Vec<TimedPath>> {
    let mut out = Vec::new();
    for (line, tokens) in data_lines(path)? {
        if tokens.len() < 2 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: "expected `timestamp filename`".into(),
            });
        }
        out.push(TimedPath {
            timestamp: parse_f64(path, line, &tokens[0])?,
            path: PathBuf::from(&tokens[1]),
        });
    }
    out.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
    Ok(out)
}

fn parse_trajectory(path: &Path, order: QuaternionOrder) -> Result<Vec<TrajectoryEntry>> {
    let mut out = Vec::new();
    for (line, tokens) in data_lines(path)? {
        if tokens.len() != 8 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("expected 8 fields (timestamp tx ty tz q0 q1 q2 q3), got {}", tokens.len()),
            });
        }
        let v = tokens
            .iter()
            .map(|t| parse_f64(path, line, t))
            .collect::<Result<Vec<_>>>()?;
        let rotation_wxyz = match order {
            QuaternionOrder::Xyzw => [v[7], v[4], v[5], v[6]],
            QuaternionOrder::Wxyz => [v[4], v[5], v[6], v[7]],
        };
        out.push(TrajectoryEntry {
            timestamp: v[0],
            translation: [v[1], v[2], v[3]],
            rotation_wxyz,
        });
    }
    out.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
    Ok(out)
}

fn require(path: PathBuf) -> Result<PathBuf> {
    if path.is_file() {
        Ok(path)
    } else {
        Err(Error::io(
            &path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "required file is missing"),
        ))
    }
}

pub fn load_manifest(root: impl AsRef<Path>, options: &LoadOptions) -> Result<SequenceManifest> {
    let root = root.as_ref();
    let rgb_list = require(root.join(RGB_LIST))?;
    let depth_list = require(root.join(DEPTH_LIST))?;
    let traj = require(root.join(TRAJECTORY))?;
    let intr_path = require(root.join(INTRINSICS))?;

    let intr_text = fs::read_to_string(&intr_path).map_err(|e| Error::io(&intr_path, e))?;
    let intr: IntrinsicsFile = toml::from_str(&intr_text).map_err(|e| Error::Parse {
        path: intr_path.clone(),
        line: e
            .span()
            .map(|s| intr_text[..s.start].matches('\n').count() + 1)
            .unwrap_or(0),
        message: e.message().to_string(),
    })?;
    if !(intr.depth_scale.is_finite() && intr.depth_scale > 0.0) {
        return Err(Error::Parse {
            path: intr_path,
            line: 0,
            message: format!("depth_scale must be > 0, got {}", intr.depth_scale),
        });
    }

    Ok(SequenceManifest {
        root: root.to_path_buf(),
        rgb: parse_image_list(&rgb_list)?,
        depth: parse_image_list(&depth_list)?,
        trajectory: parse_trajectory(&traj, options.quaternion_order)?,
        depth_scale: intr.depth_scale,
        intrinsics: intr.intrinsics()?,
    })
}

fn read_rgb(path: &Path, k: &Intrinsics) -> Result<RgbImage> {
    let img = image::open(path)
        .map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })?
        .to_rgb8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let grid = Grid::from_vec(
        w,
        h,
        img.pixels()
            .map(|p| [p[0] as f64 / 255.0, p[1] as f64 / 255.0, p[2] as f64 / 255.0])
            .collect(),
    )?;
    grid.ensure_dims(k.width, k.height)?;
    Ok(grid)
}

fn read_depth(path: &Path, k: &Intrinsics, scale: f64) -> Result<DepthMap> {
    let img = image::open(path)
        .map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })?
        .to_luma16();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let grid = Grid::from_vec(w, h, img.pixels().map(|p| p[0] as f64 / scale).collect())?;
    grid.ensure_dims(k.width, k.height)?;
    Ok(grid)
}

impl SequenceManifest {
    /// Triples `(rgb, depth, pose)` whose timestamps associate within
    /// `max_time_delta`, in rgb timestamp order.
    pub fn associations(&self, max_time_delta: f64) -> Vec<(usize, usize, usize)> {
        let rgb_t: Vec<f64> = self.rgb.iter().map(|e| e.timestamp).collect();
        let depth_t: Vec<f64> = self.depth.iter().map(|e| e.timestamp).collect();
        let pose_t: Vec<f64> = self.trajectory.iter().map(|e| e.timestamp).collect();
        let with_depth = associate(&rgb_t, &depth_t, max_time_delta);
        let with_pose = associate(&rgb_t, &pose_t, max_time_delta);
        let mut pose_of = vec![None; rgb_t.len()];
        for (i, p) in with_pose {
            pose_of[i] = Some(p);
        }
        with_depth
            .into_iter()
            .filter_map(|(i, d)| pose_of[i].map(|p| (i, d, p)))
            .collect()
    }
}

pub fn load_sequence(root: impl AsRef<Path>, options: &LoadOptions) -> Result<Vec<Frame>> {
    let manifest = load_manifest(root, options)?;
    let triples = manifest.associations(options.max_time_delta);
    let dropped = manifest.rgb.len() - triples.len();
    if dropped > 0 {
        warn!("dropped {dropped} of {} rgb entries without depth/pose within {} s", manifest.rgb.len(), options.max_time_delta);
    }
    if triples.is_empty() {
        return Err(Error::NoAssociatedFrames);
    }
    let k = manifest.intrinsics;
    let frames = triples
        .into_iter()
        .enumerate()
        .map(|(index, (ri, di, pi))| {
            let rgb_entry = &manifest.rgb[ri];
            let rgb = read_rgb(&manifest.root.join(&rgb_entry.path), &k)?;
            let depth = read_depth(&manifest.root.join(&manifest.depth[di].path), &k, manifest.depth_scale)?;
            let t = &manifest.trajectory[pi];
            let [w, x, y, z] = t.rotation_wxyz;
            let pose = Pose::from_quaternion(Vector3::from(t.translation), w, x, y, z)?;
            Frame::new(index, rgb_entry.timestamp, rgb, depth, pose, k)
        })
        .collect::<Result<Vec<_>>>()?;
    info!("loaded {} frames from {}", frames.len(), manifest.root.display());
    Ok(frames)
}

/// Writes frames in the layout [`load_sequence`] reads.
///
/// Colors are quantized to 8 bits and depth to `1 / depth_scale` meters;
/// invalid or out-of-range depth is stored as 0.
pub fn write_sequence(root: impl AsRef<Path>, frames: &[Frame], depth_scale: f64) -> Result<()> {
    let root = root.as_ref();
    let first = frames.first().ok_or(Error::EmptySequence)?;
    for dir in [root.to_path_buf(), root.join("rgb"), root.join("depth")] {
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    }
    let k = *first.intrinsics();

    let mut rgb_list = String::from("# timestamp filename\n");
    let mut depth_list = String::from("# timestamp filename\n");
    let mut traj = String::from("# timestamp tx ty tz qx qy qz qw\n");
    for f in frames {
        let (w, h) = f.dims();
        let name = format!("{:.6}.png", f.timestamp());

        let rgb: ImageBuffer<Rgb<u8>, Vec<u8>> = ImageBuffer::from_fn(w as u32, h as u32, |x, y| {
            let p = f.rgb().get(x as usize, y as usize);
            Rgb(p.map(|c| (c * 255.0).round().clamp(0.0, 255.0) as u8))
        });
        let rgb_path = root.join("rgb").join(&name);
        rgb.save(&rgb_path).map_err(|source| Error::Image {
            path: rgb_path.clone(),
            source,
        })?;

        let depth: ImageBuffer<Luma<u16>, Vec<u16>> = ImageBuffer::from_fn(w as u32, h as u32, |x, y| {
            let d = *f.depth().get(x as usize, y as usize);
            let q = if is_valid_depth(d) { (d * depth_scale).round() } else { 0.0 };
            Luma([if q > u16::MAX as f64 { 0 } else { q as u16 }])
        });
        let depth_path = root.join("depth").join(&name);
        depth.save(&depth_path).map_err(|source| Error::Image {
            path: depth_path.clone(),
            source,
        })?;

        let ts = format!("{:.6}", f.timestamp());
        rgb_list.push_str(&format!("{ts} rgb/{name}\n"));
        depth_list.push_str(&format!("{ts} depth/{name}\n"));
        let t = f.pose().translation();
        let [qw, qx, qy, qz] = f.pose().quaternion_wxyz();
        traj.push_str(&format!("{ts} {} {} {} {qx} {qy} {qz} {qw}\n", t.x, t.y, t.z));
    }

    let intr = IntrinsicsFile {
        fx: k.fx,
        fy: k.fy,
        cx: k.cx,
        cy: k.cy,
        width: k.width,
        height: k.height,
        depth_scale,
    };
    let files = [
        (RGB_LIST, rgb_list),
        (DEPTH_LIST, depth_list),
        (TRAJECTORY, traj),
        (INTRINSICS, toml::to_string(&intr).expect("intrinsics serialize")),
    ];
    for (name, body) in files {
        let path = root.join(name);
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(root: &Path, name: &str, body: &str) {
        fs::write(root.join(name), body).unwrap();
    }

    fn tiny_dataset(root: &Path) {
        fs::create_dir_all(root.join("rgb")).unwrap();
        fs::create_dir_all(root.join("depth")).unwrap();
        ImageBuffer::<Rgb<u8>, _>::from_pixel(4, 3, Rgb([255, 0, 51]))
            .save(root.join("rgb/a.png"))
            .unwrap();
        ImageBuffer::<Luma<u16>, _>::from_pixel(4, 3, Luma([10000]))
            .save(root.join("depth/a.png"))
            .unwrap();
        write(root, INTRINSICS, "fx = 10.0\nfy = 10.0\ncx = 2.0\ncy = 1.5\nwidth = 4\nheight = 3\n");
        write(root, RGB_LIST, "# comment\n1.000 rgb/a.png\n");
        write(root, DEPTH_LIST, "1.002 depth/a.png\n");
    }

    #[test]
    fn loads_one_associated_frame() {
        let dir = tempfile::tempdir().unwrap();
        tiny_dataset(dir.path());
        write(dir.path(), TRAJECTORY, "1.001 0.5 0 0 0 0 0 1\n");
        let frames = load_sequence(dir.path(), &LoadOptions::default()).unwrap();
        assert_eq!(frames.len(), 1);
        let f = &frames[0];
        assert_eq!(f.timestamp(), 1.0);
        assert_eq!(*f.rgb().get(0, 0), [1.0, 0.0, 0.2]);
        assert_eq!(*f.depth().get(3, 2), 2.0);
        assert_eq!(f.pose().translation().x, 0.5);
    }

    #[test]
    fn distant_depth_drops_frame() {
        let dir = tempfile::tempdir().unwrap();
        tiny_dataset(dir.path());
        write(dir.path(), DEPTH_LIST, "1.500 depth/a.png\n");
        write(dir.path(), TRAJECTORY, "1.001 0 0 0 0 0 0 1\n");
        assert!(matches!(
            load_sequence(dir.path(), &LoadOptions::default()),
            Err(Error::NoAssociatedFrames)
        ));
    }

    #[test]
    fn empty_trajectory_yields_no_frames() {
        let dir = tempfile::tempdir().unwrap();
        tiny_dataset(dir.path());
        write(dir.path(), TRAJECTORY, "# nothing\n");
        let err = load_sequence(dir.path(), &LoadOptions::default()).unwrap_err();
        assert_eq!(err.to_string(), "zero associated frames");
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        tiny_dataset(dir.path());
        write(dir.path(), TRAJECTORY, "# header\n1.0 0 0 0 0 0 0 1\n1.1 0 0 zero 0 0 0 1\n");
        match load_sequence(dir.path(), &LoadOptions::default()).unwrap_err() {
            Error::Parse { line, path, .. } => {
                assert_eq!(line, 3);
                assert!(path.ends_with(TRAJECTORY));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn missing_groundtruth_is_named() {
        let dir = tempfile::tempdir().unwrap();
        tiny_dataset(dir.path());
        let err = load_sequence(dir.path(), &LoadOptions::default()).unwrap_err();
        assert!(err.to_string().contains("groundtruth.txt"), "{err}");
    }

    #[test]
    fn wxyz_order_is_honored() {
        let dir = tempfile::tempdir().unwrap();
        tiny_dataset(dir.path());
        // 90 degrees about z, written w first.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        write(dir.path(), TRAJECTORY, &format!("1.0 0 0 0 {h} 0 0 {h}\n"));
        let opts = LoadOptions {
            quaternion_order: QuaternionOrder::Wxyz,
            ..LoadOptions::default()
        };
        let f = &load_sequence(dir.path(), &opts).unwrap()[0];
        let r = f.pose().rotation();
        assert!((r[(0, 1)] + 1.0).abs() < 1e-12 && (r[(1, 0)] - 1.0).abs() < 1e-12);
    }
}
