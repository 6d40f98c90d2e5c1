//! Distribution distances between image sets: Gaussian fitting, the
//! Fréchet distance, chroma rescaling and the hue-invariant FID built on it.

mod chroma;
mod gaussian;
mod hifid;

pub use chroma::{
    chroma_scale, chroma_scale_pixel, optimize_alpha, scaled_colorfulness, AlphaSearch,
    AlphaSolution,
};
pub use gaussian::{
    fid, fit_gaussian, fit_gaussian_matrix, frechet_distance, sqrtm_psd, GaussianStats,
    FRECHET_EPS, SINGULAR_THRESHOLD,
};
pub use hifid::{hue_invariant_fid, hue_invariant_fid_with, HueInvariantFid};
