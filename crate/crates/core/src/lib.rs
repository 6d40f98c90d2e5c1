//! Colorization evaluation toolkit.
//!
//! - [`colorspace`]: sRGB / CIELAB / YUV conversions, grayscale extraction
//!   and luminance replacement.
//! - [`metrics`]: colorfulness, ΔCF, CLIP score and loss, PSNR, SSIM.
//! - [`distribution`]: Gaussian fitting, Fréchet distance, chroma scaling,
//!   the global α search and hue-invariant FID.
//! - [`features`]: feature matrices, the CFS v1 file format and the
//!   pixel-statistics extractor.
//! - [`harness`]: dataset ingestion, caption cleaning, synthetic sets, the
//!   saturation sweep and benchmark reports.

pub mod colorspace;
pub mod distribution;
pub mod error;
pub mod features;
pub mod harness;
pub mod metrics;

pub use colorspace::{ColorSpace, GrayImage, PlanarImage};
pub use error::{Error, Result};
pub use features::{FeatureExtractor, FeatureSet, PixelStatsExtractor};
