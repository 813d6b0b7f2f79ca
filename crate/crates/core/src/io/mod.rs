//! Configuration, frame files and bitmap ingestion.

pub mod bitmap;
pub mod config;
pub mod frames;

pub use bitmap::bitmap_momentum;
pub use config::{CheckKind, DomainSpec, FrameFormat, ImmersionPreset, MomentumPreset, OutputSpec, RunConfig};
pub use frames::{load_frame, read_scalar_csv, write_csv, write_obj, write_scalar_csv, write_table};
