//! Detection of hand-held phone use from frontal driver images.
//!
//! The pipeline takes a frame plus an externally detected face box,
//! expands the box, segments the driver's skin by intersecting HSV and
//! YCrCb histogram masks learned from a per-frame skin sample, reduces
//! the mask to two features (hand-region skin fraction and the first Hu
//! moment invariant), classifies the frame with a from-scratch nu-SVM,
//! and aggregates frame verdicts over fixed time windows into phone-use
//! alarms. A binary-encoded genetic algorithm searches the kernel
//! hyperparameters against cross-validation accuracy.

pub mod error;
pub mod eval;
pub mod features;
pub mod ga;
pub mod imaging;
pub mod pipeline;
pub mod pnm;
pub mod roi;
pub mod segmentation;
pub mod svm;

pub use error::{Error, Result};
