use rayon::prelude::*;

use super::{chroma_scale, fid, optimize_alpha, AlphaSearch, AlphaSolution};
use crate::colorspace::PlanarImage;
use crate::error::{Error, Result};
use crate::features::{extract_features, FeatureExtractor, FeatureSet};
use crate::metrics::CfSummary;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HueInvariantFid {
    pub value: f64,
    pub alpha: AlphaSolution,
}

/// FID between the ground truth and the predictions after a single global
/// chroma rescale that matches their mean colorfulness.
pub fn hue_invariant_fid<E: FeatureExtractor + ?Sized>(
    gt: &[(String, PlanarImage)],
    pred: &[(String, PlanarImage)],
    extractor: &E,
    search: &AlphaSearch,
) -> Result<HueInvariantFid> {
    if gt.is_empty() {
        return Err(Error::EmptyInput("ground-truth image set"));
    }
    let gt_cf = CfSummary::from_images(gt.par_iter().map(|(id, img)| (id.as_str(), img)))?;
    let gt_features = extract_features(extractor, gt)?;
    hue_invariant_fid_with(&gt_cf, &gt_features, pred, extractor, search)
}

/// Same as [`hue_invariant_fid`] with ground-truth colorfulness and features
/// already computed, so several prediction sets can share them.
pub fn hue_invariant_fid_with<E: FeatureExtractor + ?Sized>(
    gt_cf: &CfSummary,
    gt_features: &FeatureSet,
    pred: &[(String, PlanarImage)],
    extractor: &E,
    search: &AlphaSearch,
) -> Result<HueInvariantFid> {
    if pred.is_empty() {
        return Err(Error::EmptyInput("predicted image set"));
    }
    let images: Vec<&PlanarImage> = pred.iter().map(|(_, img)| img).collect();
    let alpha = optimize_alpha(gt_cf, &images, search)?;
    let corrected = pred
        .par_iter()
        .map(|(id, img)| chroma_scale(img, alpha.alpha_star).map(|(c, _)| (id.clone(), c)))
        .collect::<Result<Vec<_>>>()?;
    let pred_features = extract_features(extractor, &corrected)?;
    Ok(HueInvariantFid { value: fid(gt_features, &pred_features)?, alpha })
}
