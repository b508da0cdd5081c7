//! Online, content-aware keyframe selection for posed RGB-D streams.
//!
//! Each incoming frame is compared with the most recent keyframe: the
//! keyframe is forward-warped into the frame's view using depth and the
//! known poses ([`geometry`]), then a hybrid photometric/structural error is
//! measured over the pixels the warp covers ([`metrics`]). A momentum-aware
//! controller turns the error stream into select/skip decisions
//! ([`controller`]), and [`pipeline`] ties the two together.
//!
//! ```
//! use keyframe_core::{dataio, pipeline, SelectorConfig};
//!
//! let spec = dataio::SyntheticSpec::static_then_dynamic(10, 10, 0.02, 7);
//! let frames = dataio::generate_synthetic(&spec).unwrap();
//! let result = pipeline::select(&frames, &SelectorConfig::default()).unwrap();
//! assert_eq!(result.keyframes[0], 0);
//! println!("KFCR: {:.1}%", result.kfcr);
//! ```

pub mod camera;
pub mod config;
pub mod controller;
pub mod dataio;
pub mod error;
pub mod evaluation;
pub mod frame;
pub mod geometry;
pub mod image;
pub mod metrics;
pub mod pipeline;

pub use camera::{Intrinsics, Pose};
pub use config::{default_config, validate_config, DecayMode, SelectorConfig, SsimParams};
pub use controller::{ControllerState, Decision};
pub use error::{Error, Result};
pub use frame::Frame;
pub use geometry::{mask_coverage, warp_frame, WarpResult};
pub use metrics::{combine, hybrid_error, photometric_error, ssim_error, ErrorScore};
pub use pipeline::{compute_kfcr, select, select_streaming, KeyframeSelector, SelectionResult, TraceRow};
