//! Model-free 48-dimensional image descriptor.
//!
//! The image is bilinearly resized to 64×64 and six per-pixel channels are
//! derived: R, G, B, BT.601 luma, and CIELAB a, b (divided by 128). The
//! vector layout is
//!
//! | dims    | content                                               |
//! |---------|-------------------------------------------------------|
//! | 0..6    | channel means (R, G, B, luma, a, b)                   |
//! | 6..12   | channel population standard deviations                |
//! | 12..48  | 6-bin histogram per channel, channel-major            |
//!
//! Histograms use linear (triangular) soft binning between bin centers so
//! the descriptor varies continuously with pixel values. They are computed
//! on each cell of a 4×4 spatial grid and mean-pooled over the cells.
//! R, G, B and luma bin over `[0, 1]`; a and b over `[-1, 1]`.
//!
//! Every entry is finally multiplied by [`PIXEL_STATS_SCALE`] (percent
//! units), which puts Fréchet distances between typical image sets in the
//! same numeric range as Inception-feature FID.

use super::FeatureExtractor;
use crate::colorspace::{srgb_pixel_to_lab, ColorSpace, PlanarImage, Y_WEIGHTS};
use crate::error::{Error, Result};

pub const PIXEL_STATS_DIM: usize = 48;
/// Working resolution; inputs are resized to this square first.
pub const PIXEL_STATS_SIZE: usize = 64;
pub const PIXEL_STATS_SCALE: f64 = 100.0;

const CHANNELS: usize = 6;
const BINS: usize = 6;
const GRID: usize = 4;
const CHANNEL_RANGE: [(f64, f64); CHANNELS] =
    [(0.0, 1.0), (0.0, 1.0), (0.0, 1.0), (0.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)];

#[derive(Debug, Clone, Copy, Default)]
pub struct PixelStatsExtractor;

impl PixelStatsExtractor {
    pub const NAME: &'static str = "pixel-stats";
    pub const VERSION: &'static str = "1";
}

fn channels(rgb: [f64; 3]) -> [f64; CHANNELS] {
    let luma = Y_WEIGHTS[0] * rgb[0] + Y_WEIGHTS[1] * rgb[1] + Y_WEIGHTS[2] * rgb[2];
    let lab = srgb_pixel_to_lab(rgb);
    [rgb[0], rgb[1], rgb[2], luma, lab[1] / 128.0, lab[2] / 128.0]
}

fn soft_bin(hist: &mut [f64; BINS], v: f64, (lo, hi): (f64, f64)) {
    let pos = ((v - lo) / (hi - lo) * BINS as f64 - 0.5).clamp(0.0, (BINS - 1) as f64);
    let i = (pos.floor() as usize).min(BINS - 2);
    let frac = pos - i as f64;
    hist[i] += 1.0 - frac;
    hist[i + 1] += frac;
}

impl FeatureExtractor for PixelStatsExtractor {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn version(&self) -> &str {
        Self::VERSION
    }

    fn dim(&self) -> usize {
        PIXEL_STATS_DIM
    }

    fn extract(&self, img: &PlanarImage) -> Result<Vec<f32>> {
        if img.space() != ColorSpace::Srgb {
            return Err(Error::InvalidColorSpace { expected: ColorSpace::Srgb, found: img.space() });
        }
        if img.is_empty() {
            return Err(Error::EmptyInput("image has no pixels"));
        }
        let size = PIXEL_STATS_SIZE;
        let small = img.resized(size, size);
        let px: Vec<[f64; CHANNELS]> = small.pixels().map(channels).collect();
        let n = px.len() as f64;

        let mut mean = [0.0; CHANNELS];
        for p in &px {
            for c in 0..CHANNELS {
                mean[c] += p[c];
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = [0.0; CHANNELS];
        for p in &px {
            for c in 0..CHANNELS {
                var[c] += (p[c] - mean[c]).powi(2);
            }
        }

        let cell = size / GRID;
        let mut pooled = [[0.0; BINS]; CHANNELS];
        for gy in 0..GRID {
            for gx in 0..GRID {
                let mut hist = [[0.0; BINS]; CHANNELS];
                for y in gy * cell..(gy + 1) * cell {
                    for x in gx * cell..(gx + 1) * cell {
                        let p = &px[y * size + x];
                        for c in 0..CHANNELS {
                            soft_bin(&mut hist[c], p[c], CHANNEL_RANGE[c]);
                        }
                    }
                }
                let cell_px = (cell * cell) as f64;
                for c in 0..CHANNELS {
                    for b in 0..BINS {
                        pooled[c][b] += hist[c][b] / cell_px;
                    }
                }
            }
        }

        let cells = (GRID * GRID) as f64;
        let mut out = Vec::with_capacity(PIXEL_STATS_DIM);
        let scaled = |v: f64| (v * PIXEL_STATS_SCALE) as f32;
        out.extend(mean.iter().map(|&m| scaled(m)));
        out.extend(var.iter().map(|&v| scaled((v / n).sqrt())));
        out.extend(pooled.iter().flatten().map(|&h| scaled(h / cells)));
        debug_assert_eq!(out.len(), PIXEL_STATS_DIM);
        Ok(out)
    }
}
