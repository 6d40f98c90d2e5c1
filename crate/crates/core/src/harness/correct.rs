use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::load_dir;
use crate::colorspace::save_image;
use crate::distribution::{chroma_scale, optimize_alpha, AlphaSearch, AlphaSolution};
use crate::error::{Error, Result};
use crate::metrics::CfSummary;

#[derive(Debug, Clone, PartialEq)]
pub struct Correction {
    pub alpha: AlphaSolution,
    pub gt_mean_cf: f64,
    pub written: usize,
}

/// Rescales the chroma of every image in `pred_dir` by the factor that
/// matches the mean colorfulness of `gt_dir`, writing PNGs with the same
/// stems into `out_dir`. Features of the written set can then be computed
/// externally for HI-FID.
pub fn correct_dir(
    gt_dir: &Path,
    pred_dir: &Path,
    out_dir: &Path,
    search: &AlphaSearch,
) -> Result<Correction> {
    let gt = load_dir(gt_dir)?;
    if gt.is_empty() {
        return Err(Error::EmptyInput("ground-truth directory has no images"));
    }
    let pred = load_dir(pred_dir)?;
    let gt_cf = CfSummary::from_images(gt.par_iter().map(|(id, img)| (id.as_str(), img)))?;
    let images: Vec<_> = pred.iter().map(|(_, img)| img).collect();
    let alpha = optimize_alpha(&gt_cf, &images, search)?;

    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    pred.par_iter().try_for_each(|(id, img)| {
        let (scaled, _) = chroma_scale(img, alpha.alpha_star)?;
        save_image(&scaled, &out_dir.join(format!("{id}.png")))
    })?;
    Ok(Correction { alpha, gt_mean_cf: gt_cf.mean_cf(), written: pred.len() })
}
