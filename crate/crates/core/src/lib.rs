//! Insect-vision-inspired small target motion detection.
//!
//! The processing chain mirrors the layers of the insect optic lobe:
//! ommatidia (spatial blur) -> LMC (temporal band-pass) -> medulla
//! (ON/OFF rectification and temporal delays) -> STMD (small-field
//! directional correlator with lateral inhibition) and LPTC (wide-field
//! correlator) -> TSDN (integration that suppresses responses moving
//! with the background).
//!
//! Alongside the detector, [`stimulus`] synthesizes moving-target scenes
//! with ground truth and [`eval`] scores detections (detection rate,
//! false alarm rate, ROC sweeps, tuning curves).

pub mod config;
pub mod conv;
pub mod detect;
pub mod error;
pub mod eval;
pub mod frame;
pub mod io;
pub mod kernels;
pub mod lptc;
pub mod medulla;
pub mod pipeline;
pub mod retina;
pub mod stimulus;
pub mod stmd;
pub mod tsdn;
pub mod volume;

pub use config::{DirectionSet, ModelConfig};
pub use detect::Detection;
pub use error::{Error, Result};
pub use frame::{Frame, ImageSequence};
pub use pipeline::{Pipeline, PipelineOutput};
pub use volume::ResponseVolume;
