//! Deterministic synthetic image sets for tests and demos.

use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::colorspace::{
    quantize_channel, save_image, yuv_pixel_to_srgb, ColorSpace, PlanarImage, YUV_U_SCALE,
    YUV_V_SCALE, Y_WEIGHTS,
};
use crate::distribution::chroma_scale;
use crate::error::{Error, Result};

/// Largest chroma factor guaranteed clip-free on `SmoothNonclipping` sets.
pub const SYNTH_MAX_ALPHA: f64 = 2.5;
// Headroom over SYNTH_MAX_ALPHA absorbing 8-bit quantization.
const HEADROOM_ALPHA: f64 = 2.75;
const WAVES: usize = 4;
const MAX_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthMode {
    /// Low-frequency images whose chroma stays within 1/2.5 of the gamut
    /// boundary, so chroma scaling by any factor up to 2.5 never clips.
    SmoothNonclipping,
    /// Low-frequency images spanning the full RGB cube.
    General,
}

struct Field {
    waves: [(f64, f64, f64, f64); WAVES],
    norm: f64,
}

impl Field {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        let mut waves = [(0.0, 0.0, 0.0, 0.0); WAVES];
        for w in &mut waves {
            *w = (
                rng.random_range(0.2..1.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(0.0..TAU),
            );
        }
        let norm = waves.iter().map(|w| w.0).sum();
        Self { waves, norm }
    }

    /// Value in `[-1, 1]` at normalized coordinates.
    fn at(&self, u: f64, v: f64) -> f64 {
        self.waves
            .iter()
            .map(|&(amp, fx, fy, phase)| amp * (TAU * (fx * u + fy * v) + phase).cos())
            .sum::<f64>()
            / self.norm
    }
}

fn quantized(width: usize, height: usize, rgb: impl Fn(f64, f64) -> [f64; 3]) -> PlanarImage {
    let mut data = Vec::with_capacity(width * height * 3);
    for y in 0..height {
        for x in 0..width {
            let p = rgb((x as f64 + 0.5) / width as f64, (y as f64 + 0.5) / height as f64);
            data.extend(p.iter().map(|&c| f64::from(quantize_channel(c)) / 255.0));
        }
    }
    PlanarImage::from_raw(width, height, ColorSpace::Srgb, data)
}

// Largest t such that luma + t·(chroma contribution) stays in [0, 1].
fn max_chroma_factor(y: f64, u: f64, v: f64) -> f64 {
    let k_r = v / YUV_V_SCALE;
    let k_b = u / YUV_U_SCALE;
    let k_g = -(Y_WEIGHTS[0] * k_r + Y_WEIGHTS[2] * k_b) / Y_WEIGHTS[1];
    [k_r, k_g, k_b]
        .into_iter()
        .map(|k| {
            if k > 0.0 {
                (1.0 - y) / k
            } else if k < 0.0 {
                y / -k
            } else {
                f64::INFINITY
            }
        })
        .fold(f64::INFINITY, f64::min)
}

fn smooth_nonclipping(rng: &mut ChaCha8Rng, width: usize, height: usize) -> Result<PlanarImage> {
    for _ in 0..MAX_ATTEMPTS {
        let luma = Field::random(rng);
        let (fu, fv) = (Field::random(rng), Field::random(rng));
        let base_y = rng.random_range(0.4..0.6);
        let saturation = rng.random_range(0.35..1.0);
        let chroma = |u: f64, v: f64| (base_y + 0.15 * luma.at(u, v), fu.at(u, v), fv.at(u, v));

        let mut limit = f64::INFINITY;
        for y in 0..height {
            for x in 0..width {
                let (yy, cu, cv) =
                    chroma((x as f64 + 0.5) / width as f64, (y as f64 + 0.5) / height as f64);
                limit = limit.min(max_chroma_factor(yy, cu, cv));
            }
        }
        if !limit.is_finite() {
            continue;
        }
        let scale = saturation * limit / HEADROOM_ALPHA;
        let img = quantized(width, height, |u, v| {
            let (yy, cu, cv) = chroma(u, v);
            yuv_pixel_to_srgb([yy, scale * cu, scale * cv])
        });
        if chroma_scale(&img, SYNTH_MAX_ALPHA)?.1 == 0.0 {
            return Ok(img);
        }
    }
    Err(Error::InvalidArgument(format!(
        "could not generate a clip-free {width}x{height} image"
    )))
}

fn general(rng: &mut ChaCha8Rng, width: usize, height: usize) -> PlanarImage {
    let fields = [Field::random(rng), Field::random(rng), Field::random(rng)];
    quantized(width, height, |u, v| fields.each_ref().map(|f| 0.5 + 0.5 * f.at(u, v)))
}

/// Generates `n` images named `synth_0000`, `synth_0001`, … in memory.
/// Pixel values are already on the 8-bit grid, so writing and re-reading
/// them as PNG is lossless.
pub fn synth_images(
    seed: u64,
    n: usize,
    (width, height): (usize, usize),
    mode: SynthMode,
) -> Result<Vec<(String, PlanarImage)>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 images, got {n}")));
    }
    if width == 0 || height == 0 {
        return Err(Error::InvalidArgument(format!("empty size {width}x{height}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let img = match mode {
                SynthMode::SmoothNonclipping => smooth_nonclipping(&mut rng, width, height)?,
                SynthMode::General => general(&mut rng, width, height),
            };
            Ok((format!("synth_{i:04}"), img))
        })
        .collect()
}

/// Writes a synthetic set as PNG files into `out_dir` (created if missing).
pub fn synth_set(
    seed: u64,
    n: usize,
    size: (usize, usize),
    mode: SynthMode,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    let images = synth_images(seed, n, size, mode)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    images
        .iter()
        .map(|(id, img)| {
            let path = out_dir.join(format!("{id}.png"));
            save_image(img, &path)?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_tiny_sets() {
        assert!(matches!(
            synth_images(0, 0, (8, 8), SynthMode::General),
            Err(Error::InvalidArgument(_))
        ));
        assert!(synth_images(0, 1, (8, 8), SynthMode::General).is_err());
    }

    #[test]
    fn same_seed_same_images() {
        let a = synth_images(7, 3, (16, 12), SynthMode::SmoothNonclipping).unwrap();
        let b = synth_images(7, 3, (16, 12), SynthMode::SmoothNonclipping).unwrap();
        assert_eq!(a, b);
        let c = synth_images(8, 3, (16, 12), SynthMode::SmoothNonclipping).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn smooth_images_do_not_clip_up_to_max_alpha() {
        for (_, img) in synth_images(3, 8, (32, 32), SynthMode::SmoothNonclipping).unwrap() {
            for alpha in [0.25, 1.7, SYNTH_MAX_ALPHA] {
                assert_eq!(chroma_scale(&img, alpha).unwrap().1, 0.0);
            }
        }
    }

    #[test]
    fn general_images_stay_in_gamut() {
        for (_, img) in synth_images(1, 2, (10, 10), SynthMode::General).unwrap() {
            assert!(img.data().iter().all(|c| (0.0..=1.0).contains(c)));
        }
    }

    #[test]
    fn chroma_factor_limit() {
        let t = max_chroma_factor(0.5, 0.0, 0.1);
        let rgb = yuv_pixel_to_srgb([0.5, 0.0, t * 0.1]);
        assert!(rgb.iter().all(|c| (-1e-12..=1.0 + 1e-12).contains(c)));
        assert!(rgb.iter().any(|c| (c - 1.0).abs() < 1e-12 || c.abs() < 1e-12));
    }
}
