//! Per-image and per-set scalar metrics.

mod clip;
mod colorfulness;
mod fidelity;

pub use clip::{clip_loss, clip_score, cosine_similarity, Embedding, EmbeddingKind};
pub use colorfulness::{colorfulness, delta_colorfulness, CfSummary, OpponentStats};
pub use fidelity::{luma_plane, psnr, ssim, SSIM_WINDOW};
