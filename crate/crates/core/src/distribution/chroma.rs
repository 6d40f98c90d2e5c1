use std::borrow::Borrow;

use rayon::prelude::*;

use crate::colorspace::{
    srgb_pixel_to_yuv, yuv_pixel_to_srgb, ColorSpace, PlanarImage, GAMUT_EPS,
};
use crate::error::{Error, Result};
use crate::metrics::{CfSummary, OpponentStats};

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

/// Scales the YUV chroma of one sRGB pixel by `alpha` and maps it back,
/// clamping to `[0, 1]`. The flag reports whether clamping changed anything
/// beyond floating rounding.
#[inline]
pub fn chroma_scale_pixel(rgb: [f64; 3], alpha: f64) -> ([f64; 3], bool) {
    let [y, u, v] = srgb_pixel_to_yuv(rgb);
    let out = yuv_pixel_to_srgb([y, alpha * u, alpha * v]);
    let clipped = out.iter().any(|c| !(-GAMUT_EPS..=1.0 + GAMUT_EPS).contains(c));
    (out.map(|c| c.clamp(0.0, 1.0)), clipped)
}

/// Multiplies the U and V channels of an sRGB image by `alpha` (luma kept),
/// returning the re-encoded image and the fraction of pixels that had to be
/// clamped back into gamut. `alpha == 1` returns the input unchanged.
pub fn chroma_scale(img: &PlanarImage, alpha: f64) -> Result<(PlanarImage, f64)> {
    check_alpha(alpha)?;
    if img.space() != ColorSpace::Srgb {
        return Err(Error::InvalidColorSpace { expected: ColorSpace::Srgb, found: img.space() });
    }
    if alpha == 1.0 {
        return Ok((img.clone(), 0.0));
    }
    let mut clipped = 0usize;
    let mut data = Vec::with_capacity(img.data().len());
    for p in img.pixels() {
        let (q, c) = chroma_scale_pixel(p, alpha);
        clipped += usize::from(c);
        data.extend_from_slice(&q);
    }
    let n = img.pixel_count();
    let fraction = if n == 0 { 0.0 } else { clipped as f64 / n as f64 };
    Ok((PlanarImage::from_raw(img.width(), img.height(), ColorSpace::Srgb, data), fraction))
}

/// Colorfulness of `chroma_scale(img, alpha)` without materializing it,
/// together with the number of clamped pixels.
pub fn scaled_colorfulness(img: &PlanarImage, alpha: f64) -> Result<(f64, usize)> {
    check_alpha(alpha)?;
    if img.space() != ColorSpace::Srgb {
        return Err(Error::InvalidColorSpace { expected: ColorSpace::Srgb, found: img.space() });
    }
    let mut stats = OpponentStats::default();
    let mut clipped = 0usize;
    if alpha == 1.0 {
        img.pixels().for_each(|p| stats.push(p));
    } else {
        for p in img.pixels() {
            let (q, c) = chroma_scale_pixel(p, alpha);
            clipped += usize::from(c);
            stats.push(q);
        }
    }
    let cf = stats.colorfulness().ok_or(Error::EmptyInput("image has no pixels"))?;
    Ok((cf, clipped))
}

/// Search interval and tolerance for the global chroma factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaSearch {
    pub lo: f64,
    pub hi: f64,
    /// Bracket width at which bisection stops.
    pub tol: f64,
}

impl Default for AlphaSearch {
    fn default() -> Self {
        Self { lo: 0.05, hi: 4.0, tol: 1e-3 }
    }
}

impl AlphaSearch {
    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && 0.0 < self.lo && self.lo < self.hi) {
            return Err(Error::InvalidArgument(format!(
                "alpha bounds must satisfy 0 < lo < hi, got ({}, {})",
                self.lo, self.hi
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("alpha tolerance {} must be positive", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaSolution {
    pub alpha_star: f64,
    /// `|meanCF(F_α*(pred)) − meanCF(gt)|`.
    pub residual: f64,
    /// Bisection steps taken.
    pub iterations: usize,
    /// Fraction of predicted pixels clamped at `alpha_star`.
    pub clipped_fraction: f64,
}

struct Probe {
    alpha: f64,
    gap: f64,
    clipped_fraction: f64,
}

fn probe<P: Borrow<PlanarImage> + Sync>(pred: &[P], target: f64, alpha: f64) -> Result<Probe> {
    let per_image = pred
        .par_iter()
        .map(|img| scaled_colorfulness(img.borrow(), alpha))
        .collect::<Result<Vec<_>>>()?;
    let mean = per_image.iter().map(|(cf, _)| cf).sum::<f64>() / per_image.len() as f64;
    let clipped: usize = per_image.iter().map(|(_, c)| c).sum();
    let pixels: usize = pred.iter().map(|p| p.borrow().pixel_count()).sum();
    Ok(Probe { alpha, gap: mean - target, clipped_fraction: clipped as f64 / pixels as f64 })
}

impl Probe {
    fn into_solution(self, iterations: usize) -> AlphaSolution {
        AlphaSolution {
            alpha_star: self.alpha,
            residual: self.gap.abs(),
            iterations,
            clipped_fraction: self.clipped_fraction,
        }
    }
}

/// Finds the global chroma factor α* that brings the mean colorfulness of
/// the chroma-scaled predictions closest to `gt_cf.mean_cf()`.
///
/// `g(α) = meanCF(F_α(pred)) − meanCF(gt)` is continuous and non-decreasing,
/// so its root is bracketed by bisection down to `search.tol`; the final
/// bracket is then refined with one false-position step, which is exact
/// while no pixel clips (g is linear in α there). Without a sign change the
/// bound with the smaller residual is returned.
pub fn optimize_alpha<P: Borrow<PlanarImage> + Sync>(
    gt_cf: &CfSummary,
    pred: &[P],
    search: &AlphaSearch,
) -> Result<AlphaSolution> {
    if gt_cf.is_empty() {
        return Err(Error::EmptyInput("ground-truth colorfulness summary"));
    }
    if pred.is_empty() {
        return Err(Error::EmptyInput("predicted image set"));
    }
    search.validate()?;
    let target = gt_cf.mean_cf();

    let mut lo = probe(pred, target, search.lo)?;
    let mut hi = probe(pred, target, search.hi)?;
    if lo.gap >= 0.0 || hi.gap <= 0.0 {
        let best = if lo.gap.abs() <= hi.gap.abs() { lo } else { hi };
        return Ok(best.into_solution(0));
    }

    let mut iterations = 0;
    while hi.alpha - lo.alpha > search.tol {
        iterations += 1;
        let mid = probe(pred, target, 0.5 * (lo.alpha + hi.alpha))?;
        if mid.gap == 0.0 {
            return Ok(mid.into_solution(iterations));
        }
        if mid.gap < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let secant = lo.alpha - lo.gap * (hi.alpha - lo.alpha) / (hi.gap - lo.gap);
    let refined = probe(pred, target, secant.clamp(lo.alpha, hi.alpha))?;
    let best = [lo, hi, refined]
        .into_iter()
        .min_by(|a, b| a.gap.abs().total_cmp(&b.gap.abs()))
        .expect("three candidates");
    Ok(best.into_solution(iterations))
}
