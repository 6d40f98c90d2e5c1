use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::report::{Metric, ReportFormat};
use crate::distribution::AlphaSearch;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractorKind {
    /// Built-in pixel-statistics descriptor computed from the images.
    #[default]
    PixelStats,
    /// Precomputed CFS files listed under `features`.
    ExternalCfs,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredDir {
    pub name: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeaturePaths {
    pub gt_cfs: Option<PathBuf>,
    /// Method name → features of its raw outputs.
    pub pred_cfs: BTreeMap<String, PathBuf>,
    /// Method name → features of its outputs after chroma correction
    /// (written by `chromabench correct`).
    pub corrected_pred_cfs: BTreeMap<String, PathBuf>,
    /// Method name → image embeddings of its outputs.
    pub image_embeddings_cfs: BTreeMap<String, PathBuf>,
    pub text_embeddings_cfs: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    pub format: ReportFormat,
}

fn default_bounds() -> (f64, f64) {
    let d = AlphaSearch::default();
    (d.lo, d.hi)
}

fn default_tol() -> f64 {
    AlphaSearch::default().tol
}

/// One benchmark run, as read from a JSON config file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    #[serde(default)]
    pub dataset_name: Option<String>,
    pub gt_dir: PathBuf,
    pub pred_dirs: Vec<PredDir>,
    #[serde(default)]
    pub prompts_file: Option<PathBuf>,
    #[serde(default)]
    pub features: FeaturePaths,
    pub metrics: Vec<Metric>,
    #[serde(default = "default_bounds")]
    pub alpha_bounds: (f64, f64),
    #[serde(default = "default_tol")]
    pub alpha_tol: f64,
    #[serde(default)]
    pub extractor: ExtractorKind,
    pub output: OutputSpec,
}

impl EvalConfig {
    /// Parses and validates a config; relative paths are resolved against
    /// the config file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: EvalConfig = serde_json::from_str(&text)
            .map_err(|source| Error::Json { path: path.into(), source })?;
        if let Some(base) = path.parent() {
            cfg.resolve_paths(base);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.gt_dir);
        self.pred_dirs.iter_mut().for_each(|d| fix(&mut d.path));
        if let Some(p) = &mut self.prompts_file {
            fix(p);
        }
        let f = &mut self.features;
        f.gt_cfs.iter_mut().for_each(fix);
        f.text_embeddings_cfs.iter_mut().for_each(fix);
        for map in [&mut f.pred_cfs, &mut f.corrected_pred_cfs, &mut f.image_embeddings_cfs] {
            map.values_mut().for_each(fix);
        }
        fix(&mut self.output.path);
    }

    pub fn alpha_search(&self) -> AlphaSearch {
        AlphaSearch { lo: self.alpha_bounds.0, hi: self.alpha_bounds.1, tol: self.alpha_tol }
    }

    /// Requested metrics, deduplicated, in table column order.
    pub fn metric_columns(&self) -> Vec<Metric> {
        let mut m = self.metrics.clone();
        m.sort();
        m.dedup();
        m
    }

    pub fn dataset_label(&self) -> String {
        self.dataset_name.clone().unwrap_or_else(|| {
            self.gt_dir
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| self.gt_dir.display().to_string())
        })
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.metrics.is_empty() {
            return fail("no metrics requested".into());
        }
        if self.pred_dirs.is_empty() {
            return fail("no prediction directories".into());
        }
        let mut names: Vec<&str> = self.pred_dirs.iter().map(|d| d.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return fail(format!("duplicate method name {:?}", w[0]));
        }
        self.alpha_search()
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;

        let f = &self.features;
        let need_per_method = |map: &BTreeMap<String, PathBuf>, key: &str| -> Result<()> {
            match self.pred_dirs.iter().find(|d| !map.contains_key(&d.name)) {
                Some(d) => fail(format!("features.{key} has no entry for method {:?}", d.name)),
                None => Ok(()),
            }
        };
        if self.extractor == ExtractorKind::ExternalCfs {
            let wants = |m| self.metrics.contains(&m);
            if (wants(Metric::Fid) || wants(Metric::HiFid)) && f.gt_cfs.is_none() {
                return fail("FID/HI_FID with external_cfs needs features.gt_cfs".into());
            }
            if wants(Metric::Fid) {
                need_per_method(&f.pred_cfs, "pred_cfs")?;
            }
            if wants(Metric::HiFid) {
                need_per_method(&f.corrected_pred_cfs, "corrected_pred_cfs")?;
            }
        }
        if self.metrics.contains(&Metric::ClipScore) {
            if f.text_embeddings_cfs.is_none() {
                return fail("CLIP_SCORE needs features.text_embeddings_cfs".into());
            }
            need_per_method(&f.image_embeddings_cfs, "image_embeddings_cfs")?;
        }
        Ok(())
    }
}
