//! Colorfulness–FID trade-off under global chroma scaling of a fixed set.

use std::path::Path;

use rayon::prelude::*;

use super::load_dir;
use crate::colorspace::PlanarImage;
use crate::distribution::{chroma_scale, fid};
use crate::error::{Error, Result};
use crate::features::{extract_features, FeatureExtractor};
use crate::metrics::CfSummary;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub alpha: f64,
    pub mean_cf: f64,
    /// FID between the scaled set and the unmodified set.
    pub fid: f64,
}

pub fn saturation_sweep_images<E: FeatureExtractor + ?Sized>(
    images: &[(String, PlanarImage)],
    alphas: &[f64],
    extractor: &E,
) -> Result<Vec<SweepPoint>> {
    if images.is_empty() {
        return Err(Error::EmptyInput("image set"));
    }
    if let Some(a) = alphas.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
        return Err(Error::InvalidAlpha(*a));
    }
    let reference = extract_features(extractor, images)?;
    alphas
        .iter()
        .map(|&alpha| {
            let scaled = images
                .par_iter()
                .map(|(id, img)| chroma_scale(img, alpha).map(|(s, _)| (id.clone(), s)))
                .collect::<Result<Vec<_>>>()?;
            let cf = CfSummary::from_images(scaled.par_iter().map(|(id, img)| (id.as_str(), img)))?;
            let features = extract_features(extractor, &scaled)?;
            Ok(SweepPoint { alpha, mean_cf: cf.mean_cf(), fid: fid(&reference, &features)? })
        })
        .collect()
}

/// Loads every image in `dir` and sweeps it over `alphas`.
pub fn saturation_sweep<E: FeatureExtractor + ?Sized>(
    dir: &Path,
    alphas: &[f64],
    extractor: &E,
) -> Result<Vec<SweepPoint>> {
    saturation_sweep_images(&load_dir(dir)?, alphas, extractor)
}

/// CSV with header `alpha,mean_cf,fid`.
pub fn sweep_csv(points: &[SweepPoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["alpha", "mean_cf", "fid"])?;
    for p in points {
        w.write_record([p.alpha.to_string(), p.mean_cf.to_string(), p.fid.to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
