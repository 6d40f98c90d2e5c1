//! Dataset ingestion, benchmark orchestration and reporting.

mod benchmark;
mod captions;
mod config;
mod correct;
mod ingest;
mod report;
mod sweep;
mod synth;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use benchmark::{mean_clip_score, run_benchmark, RunOptions};
pub use captions::{clean_caption, clean_prompts, parse_prompts};
pub use config::{EvalConfig, ExtractorKind, FeaturePaths, OutputSpec, PredDir};
pub use correct::{correct_dir, Correction};
pub use ingest::{ingest_pairs, list_images, ImagePair, IngestOptions, Pairing};
pub use report::{Cell, MethodRow, Metric, MetricReport, ReportFormat};
pub use sweep::{saturation_sweep, saturation_sweep_images, sweep_csv, SweepPoint};
pub use synth::{synth_images, synth_set, SynthMode, SYNTH_MAX_ALPHA};

use crate::colorspace::{load_image, PlanarImage};
use crate::error::Result;

/// Decodes a listing from [`list_images`] in parallel, keeping its order.
pub fn load_images(listing: &BTreeMap<String, PathBuf>) -> Result<Vec<(String, PlanarImage)>> {
    let entries: Vec<_> = listing.iter().collect();
    entries
        .into_par_iter()
        .map(|(id, path)| load_image(path).map(|img| (id.clone(), img)))
        .collect()
}

/// Every image in `dir`, sorted by file stem.
pub fn load_dir(dir: &Path) -> Result<Vec<(String, PlanarImage)>> {
    load_images(&list_images(dir)?)
}
