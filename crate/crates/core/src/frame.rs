use std::sync::Arc;

use crate::camera::{Intrinsics, Pose};
use crate::error::{Error, Result};
use crate::image::{DepthMap, RgbImage};

/// One timestamped, posed RGB-D observation.
///
/// Pixel buffers are reference counted so handing a frame to the selector as
/// the new keyframe never copies image data.
#[derive(Debug, Clone)]
pub struct Frame {
    index: usize,
    timestamp: f64,
    rgb: Arc<RgbImage>,
    depth: Arc<DepthMap>,
    pose: Pose,
    intrinsics: Intrinsics,
}

impl Frame {
    pub fn new(
        index: usize,
        timestamp: f64,
        rgb: impl Into<Arc<RgbImage>>,
        depth: impl Into<Arc<DepthMap>>,
        pose: Pose,
        intrinsics: Intrinsics,
    ) -> Result<Self> {
        let rgb = rgb.into();
        let depth = depth.into();
        intrinsics.validate()?;
        rgb.ensure_dims(intrinsics.width, intrinsics.height)?;
        depth.ensure_dims(intrinsics.width, intrinsics.height)?;
        if !timestamp.is_finite() {
            return Err(Error::InvalidFrame(format!("frame {index}: non-finite timestamp")));
        }
        if let Some(px) = rgb
            .as_slice()
            .iter()
            .flatten()
            .find(|c| !(0.0..=1.0).contains(*c))
        {
            return Err(Error::InvalidFrame(format!(
                "frame {index}: rgb value {px} outside [0, 1]"
            )));
        }
        Ok(Self {
            index,
            timestamp,
            rgb,
            depth,
            pose,
            intrinsics,
        })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn timestamp(&self) -> f64 {
        self.timestamp
    }

    pub fn rgb(&self) -> &RgbImage {
        &self.rgb
    }

    pub fn depth(&self) -> &DepthMap {
        &self.depth
    }

    pub fn pose(&self) -> &Pose {
        &self.pose
    }

    pub fn intrinsics(&self) -> &Intrinsics {
        &self.intrinsics
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.intrinsics.width, self.intrinsics.height)
    }

    /// Shared handle to the color buffer; lets callers observe buffer lifetime.
    pub fn rgb_handle(&self) -> &Arc<RgbImage> {
        &self.rgb
    }

    /// Same pixels, different slot in the sequence.
    pub fn with_index(mut self, index: usize, timestamp: f64) -> Self {
        self.index = index;
        self.timestamp = timestamp;
        self
    }
}
