//! End-to-end evaluation of one or more prediction directories against a
//! ground-truth directory.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;

use super::captions::parse_prompts;
use super::config::{EvalConfig, ExtractorKind, PredDir};
use super::ingest::{ingest_pairs, list_images, IngestOptions, Pairing};
use super::load_images;
use super::report::{Cell, MethodRow, Metric, MetricReport};
use crate::colorspace::{luminance_replace, to_grayscale, PlanarImage, LUMINANCE_REPLACE_SIZE};
use crate::distribution::{fid, hue_invariant_fid_with, optimize_alpha, AlphaSolution};
use crate::error::{Error, Result};
use crate::features::{extract_features, load_cfs, FeatureSet, PixelStatsExtractor};
use crate::metrics::{
    clip_score, delta_colorfulness, psnr, ssim, CfSummary, Embedding, EmbeddingKind,
};

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Unpaired files and metric failures abort the run.
    pub strict: bool,
    /// Replace predicted lightness with the ground truth's (at 512×512)
    /// before computing any metric.
    pub luminance_replace: bool,
}

/// Shared inputs whose failure is reported per cell rather than aborting.
type Shared<T> = Option<std::result::Result<T, String>>;

fn shared<T>(wanted: bool, strict: bool, f: impl FnOnce() -> Result<T>) -> Result<Shared<T>> {
    if !wanted {
        return Ok(None);
    }
    match f() {
        Ok(v) => Ok(Some(Ok(v))),
        Err(e) if strict => Err(e),
        Err(e) => Ok(Some(Err(e.to_string()))),
    }
}

fn borrow_shared<T>(s: &Shared<T>) -> Result<&T> {
    match s {
        Some(Ok(v)) => Ok(v),
        Some(Err(e)) => Err(Error::InvalidArgument(e.clone())),
        None => Err(Error::InvalidArgument("input was not prepared".into())),
    }
}

/// Mean CLIP score over prompts. A prompt id maps to the image id before an
/// optional `#suffix` (`img_1#2` → `img_1`); prompts without both embeddings
/// are skipped.
pub fn mean_clip_score(
    image_emb: &FeatureSet,
    text_emb: &FeatureSet,
    prompt_ids: &[String],
) -> Result<f64> {
    let as_f64 = |row: &[f32]| row.iter().map(|&v| f64::from(v)).collect::<Vec<_>>();
    let mut total = 0.0;
    let mut count = 0usize;
    for pid in prompt_ids {
        let image_id = pid.split_once('#').map_or(pid.as_str(), |(a, _)| a);
        let (Some(t), Some(i)) = (text_emb.row_by_id(pid), image_emb.row_by_id(image_id)) else {
            log::warn!("prompt {pid}: missing image or text embedding, skipped");
            continue;
        };
        let img = Embedding::new(image_id, EmbeddingKind::Image, as_f64(i))?;
        let txt = Embedding::new(pid.as_str(), EmbeddingKind::Text, as_f64(t))?;
        total += clip_score(&img, &txt)?;
        count += 1;
    }
    if count == 0 {
        return Err(Error::EmptyInput("no (image, prompt) pairs with embeddings"));
    }
    Ok(total / count as f64)
}

struct GtContext {
    images: Vec<(String, PlanarImage)>,
    cf: Shared<CfSummary>,
    features: Shared<FeatureSet>,
    text_emb: Shared<FeatureSet>,
    prompt_ids: Shared<Vec<String>>,
}

impl GtContext {
    fn image(&self, id: &str) -> Option<&PlanarImage> {
        self.images
            .binary_search_by(|(k, _)| k.as_str().cmp(id))
            .ok()
            .map(|i| &self.images[i].1)
    }
}

/// Runs every requested metric for every method in `cfg`.
///
/// The report is a pure function of the config and the input bytes. With
/// `strict` unset, a metric that cannot be computed is recorded as an error
/// cell and the run continues.
pub fn run_benchmark(cfg: &EvalConfig, opts: &RunOptions) -> Result<MetricReport> {
    cfg.validate()?;
    let metrics = cfg.metric_columns();
    let wants = |m: Metric| metrics.contains(&m);
    let pixel = cfg.extractor == ExtractorKind::PixelStats;
    let needs_images = metrics.iter().any(|&m| match m {
        Metric::Fid => pixel,
        Metric::ClipScore => false,
        _ => true,
    });

    let gt_list = list_images(&cfg.gt_dir)?;
    if gt_list.is_empty() {
        return Err(Error::EmptyInput("ground-truth directory has no images"));
    }
    let images = if needs_images { load_images(&gt_list)? } else { Vec::new() };
    log::info!("ground truth: {} images", gt_list.len());

    let wants_cf = wants(Metric::Cf) || wants(Metric::DeltaCf) || wants(Metric::HiFid);
    let cf = shared(wants_cf, opts.strict, || {
        CfSummary::from_images(images.par_iter().map(|(id, img)| (id.as_str(), img)))
    })?;
    let features = shared(wants(Metric::Fid) || wants(Metric::HiFid), opts.strict, || {
        if pixel {
            extract_features(&PixelStatsExtractor, &images)
        } else {
            load_cfs(cfg.features.gt_cfs.as_deref().expect("validated"))
        }
    })?;
    let text_emb = shared(wants(Metric::ClipScore), opts.strict, || {
        load_cfs(cfg.features.text_embeddings_cfs.as_deref().expect("validated"))
    })?;
    let prompt_ids = shared(wants(Metric::ClipScore), opts.strict, || match &cfg.prompts_file {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            let prompts = parse_prompts(&text)
                .map_err(|e| Error::InvalidArgument(format!("{}: {e}", p.display())))?;
            Ok(prompts.into_iter().map(|(id, _)| id).collect())
        }
        None => Ok(borrow_shared(&text_emb)?.ids().to_vec()),
    })?;
    let gt = GtContext { images, cf, features, text_emb, prompt_ids };

    let rows = cfg
        .pred_dirs
        .iter()
        .map(|pred| {
            log::info!("evaluating {}", pred.name);
            evaluate_method(cfg, opts, &metrics, &gt, pred)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(MetricReport {
        dataset_name: cfg.dataset_label(),
        n_images: gt_list.len(),
        luminance_replace: opts.luminance_replace,
        metrics,
        gt_mean_cf: gt.cf.as_ref().and_then(|c| c.as_ref().ok()).map(CfSummary::mean_cf),
        rows,
    })
}

fn evaluate_method(
    cfg: &EvalConfig,
    opts: &RunOptions,
    metrics: &[Metric],
    gt: &GtContext,
    pred: &PredDir,
) -> Result<MethodRow> {
    let mut row = MethodRow { method: pred.name.clone(), cells: BTreeMap::new(), alpha: None };
    let record = |cells: &mut BTreeMap<Metric, Cell>, m: Metric, r: Result<f64>| -> Result<()> {
        match r {
            Ok(v) => cells.insert(m, Cell::Value(v)),
            Err(e) if opts.strict => return Err(e),
            Err(e) => cells.insert(m, Cell::Error(e.to_string())),
        };
        Ok(())
    };
    let wants = |m: Metric| metrics.contains(&m);
    let any_paired = metrics.iter().any(|m| m.is_paired());
    let pixel = cfg.extractor == ExtractorKind::PixelStats;

    let ingest = IngestOptions { strict: opts.strict, require_pairs: opts.strict && any_paired };
    let pairing = match ingest_pairs(&cfg.gt_dir, &pred.path, ingest) {
        Ok(p) => p,
        Err(e) if opts.strict => return Err(e),
        Err(e) => {
            let msg = e.to_string();
            for &m in metrics {
                row.cells.insert(m, Cell::Error(msg.clone()));
            }
            return Ok(row);
        }
    };

    let needs_images = metrics.iter().any(|&m| match m {
        Metric::Fid => pixel,
        Metric::ClipScore => false,
        _ => true,
    });
    let pred_set = if needs_images {
        match prediction_set(&pairing, &pred.path, gt, opts) {
            Ok(s) => s,
            Err(e) if opts.strict => return Err(e),
            Err(e) => {
                let msg = e.to_string();
                for &m in metrics.iter().filter(|&&m| m != Metric::ClipScore) {
                    row.cells.insert(m, Cell::Error(msg.clone()));
                }
                Vec::new()
            }
        }
    } else {
        Vec::new()
    };
    let images_ok = !needs_images || !pred_set.is_empty();

    if images_ok && (wants(Metric::Cf) || wants(Metric::DeltaCf)) {
        let pred_cf =
            CfSummary::from_images(pred_set.par_iter().map(|(id, img)| (id.as_str(), img)));
        if wants(Metric::Cf) {
            let r = pred_cf.as_ref().map(CfSummary::mean_cf).map_err(clone_err);
            record(&mut row.cells, Metric::Cf, r)?;
        }
        if wants(Metric::DeltaCf) {
            let r = borrow_shared(&gt.cf).and_then(|g| {
                delta_colorfulness(g, pred_cf.as_ref().map_err(clone_err)?)
            });
            record(&mut row.cells, Metric::DeltaCf, r)?;
        }
    }

    if wants(Metric::Fid) && images_ok {
        let r = borrow_shared(&gt.features).and_then(|g| {
            let p = if pixel {
                extract_features(&PixelStatsExtractor, &pred_set)?
            } else {
                load_cfs(&cfg.features.pred_cfs[&pred.name])?
            };
            fid(g, &p)
        });
        record(&mut row.cells, Metric::Fid, r)?;
    }

    if wants(Metric::HiFid) && images_ok {
        let search = cfg.alpha_search();
        let r = borrow_shared(&gt.cf).and_then(|gcf| {
            let gfeat = borrow_shared(&gt.features)?;
            if pixel {
                let h = hue_invariant_fid_with(gcf, gfeat, &pred_set, &PixelStatsExtractor, &search)?;
                Ok((h.value, h.alpha))
            } else {
                let imgs: Vec<&PlanarImage> = pred_set.iter().map(|(_, i)| i).collect();
                let alpha: AlphaSolution = optimize_alpha(gcf, &imgs, &search)?;
                let corrected = load_cfs(&cfg.features.corrected_pred_cfs[&pred.name])?;
                Ok((fid(gfeat, &corrected)?, alpha))
            }
        });
        match r {
            Ok((v, alpha)) => {
                row.alpha = Some(alpha);
                record(&mut row.cells, Metric::HiFid, Ok(v))?;
            }
            Err(e) => record(&mut row.cells, Metric::HiFid, Err(e))?,
        }
    }

    if wants(Metric::ClipScore) {
        let r = borrow_shared(&gt.text_emb).and_then(|text| {
            let ids = borrow_shared(&gt.prompt_ids)?;
            let img = load_cfs(&cfg.features.image_embeddings_cfs[&pred.name])?;
            mean_clip_score(&img, text, ids)
        });
        record(&mut row.cells, Metric::ClipScore, r)?;
    }

    if any_paired && images_ok {
        let paired = paired_metrics(&pairing, &pred_set, gt, opts, &pred.path);
        for m in [Metric::Psnr, Metric::Ssim] {
            if wants(m) {
                let r = match &paired {
                    Ok((p, s)) => Ok(if m == Metric::Psnr { *p } else { *s }),
                    Err(e) => Err(clone_err(e)),
                };
                record(&mut row.cells, m, r)?;
            }
        }
    }

    Ok(row)
}

fn clone_err(e: &Error) -> Error {
    Error::InvalidArgument(e.to_string())
}

/// Loads a method's outputs; with luminance replacement only paired files
/// survive, each recombined with its ground truth's lightness.
fn prediction_set(
    pairing: &Pairing,
    pred_dir: &Path,
    gt: &GtContext,
    opts: &RunOptions,
) -> Result<Vec<(String, PlanarImage)>> {
    let listing = list_images(pred_dir)?;
    if !opts.luminance_replace {
        let set = load_images(&listing)?;
        if set.is_empty() {
            return Err(Error::EmptyInput("prediction directory has no images"));
        }
        return Ok(set);
    }
    for id in &pairing.pred_only {
        log::warn!("{id}: no ground truth to take lightness from, dropped");
    }
    let set = pairing
        .pairs
        .par_iter()
        .map(|pair| {
            let gt_img = gt
                .image(&pair.id)
                .ok_or_else(|| Error::InvalidArgument(format!("{}: ground truth not loaded", pair.id)))?;
            let pred_img = crate::colorspace::load_image(&pair.pred)?;
            let replaced = luminance_replace(&pred_img, &to_grayscale(gt_img)?)?;
            Ok((pair.id.clone(), replaced))
        })
        .collect::<Result<Vec<_>>>()?;
    if set.is_empty() {
        return Err(Error::NoPairs { gt: "ground truth".into(), pred: pred_dir.into() });
    }
    Ok(set)
}

fn paired_metrics(
    pairing: &Pairing,
    pred_set: &[(String, PlanarImage)],
    gt: &GtContext,
    opts: &RunOptions,
    pred_dir: &Path,
) -> Result<(f64, f64)> {
    if pairing.pairs.is_empty() {
        return Err(Error::NoPairs { gt: "ground truth".into(), pred: pred_dir.into() });
    }
    let pred_by_id: BTreeMap<&str, &PlanarImage> =
        pred_set.iter().map(|(id, img)| (id.as_str(), img)).collect();
    let size = LUMINANCE_REPLACE_SIZE;
    let results: Vec<Result<(f64, f64)>> = pairing
        .pairs
        .par_iter()
        .map(|pair| {
            let g = gt
                .image(&pair.id)
                .ok_or_else(|| Error::InvalidArgument(format!("{}: ground truth not loaded", pair.id)))?;
            let p = pred_by_id
                .get(pair.id.as_str())
                .ok_or_else(|| Error::InvalidArgument(format!("{}: prediction not loaded", pair.id)))?;
            let resized;
            let g = if opts.luminance_replace && (g.width(), g.height()) != (size, size) {
                resized = g.resized(size, size);
                &resized
            } else {
                g
            };
            Ok((psnr(g, p)?, ssim(g, p)?))
        })
        .collect();

    let mut sums = (0.0, 0.0);
    let mut count = 0usize;
    for (pair, r) in pairing.pairs.iter().zip(results) {
        match r {
            Ok((p, s)) => {
                sums.0 += p;
                sums.1 += s;
                count += 1;
            }
            Err(e) if opts.strict => return Err(e),
            Err(e) => log::warn!("{}: skipped for PSNR/SSIM: {e}", pair.id),
        }
    }
    if count == 0 {
        return Err(Error::EmptyInput("no pair could be compared"));
    }
    Ok((sums.0 / count as f64, sums.1 / count as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureMeta;

    fn set(ids: &[&str], rows: &[[f32; 2]]) -> FeatureSet {
        FeatureSet::from_rows(
            FeatureMeta::new("clip-test", "1"),
            ids.iter().zip(rows).map(|(i, r)| (i.to_string(), r.to_vec())).collect(),
        )
        .unwrap()
    }

    #[test]
    fn clip_score_pairs_prompts_with_images() {
        let images = set(&["a", "b"], &[[1.0, 0.0], [0.0, 1.0]]);
        let texts = set(&["a", "a#2", "b"], &[[2.0, 0.0], [0.0, 1.0], [0.0, 3.0]]);
        let ids: Vec<String> = texts.ids().to_vec();
        // a: 100, a#2: 0, b: 100.
        let s = mean_clip_score(&images, &texts, &ids).unwrap();
        assert!((s - 200.0 / 3.0).abs() < 1e-9);
        let missing = vec!["zzz".to_owned()];
        assert!(mean_clip_score(&images, &texts, &missing).is_err());
    }
}
