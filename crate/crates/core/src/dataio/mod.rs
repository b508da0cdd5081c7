//! Sequence ingestion and synthesis.

mod associate;
pub mod synthetic;
pub mod tum;

pub use associate::associate;
pub use synthetic::{generate_synthetic, MotionSegment, SyntheticSpec, Texture, STANDARD_SPEED};
pub use tum::{
    load_manifest, load_sequence, write_sequence, IntrinsicsFile, LoadOptions, QuaternionOrder,
    SequenceManifest, TimedPath, TrajectoryEntry,
};
