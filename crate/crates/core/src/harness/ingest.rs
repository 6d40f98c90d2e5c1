use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

const IMAGE_EXTENSIONS: [&str; 3] = ["png", "jpg", "jpeg"];

/// Image files of a directory keyed by filename stem (case-sensitive).
/// Extensions are matched case-insensitively; two files sharing a stem are
/// an error.
pub fn list_images(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = BTreeMap::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if !path.is_file() {
            continue;
        }
        let is_image = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()));
        if !is_image {
            continue;
        }
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()).map(str::to_owned) else {
            continue;
        };
        if let Some(prev) = out.insert(stem.clone(), path.clone()) {
            return Err(Error::InvalidArgument(format!(
                "{} and {} share the stem {stem:?}",
                prev.display(),
                path.display()
            )));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImagePair {
    pub id: String,
    pub gt: PathBuf,
    pub pred: PathBuf,
}

#[derive(Debug, Clone, Default)]
pub struct Pairing {
    /// Matched files, sorted by id.
    pub pairs: Vec<ImagePair>,
    pub gt_only: Vec<String>,
    pub pred_only: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IngestOptions {
    /// Any unmatched file is an error.
    pub strict: bool,
    /// An empty intersection is an error.
    pub require_pairs: bool,
}

/// Matches ground-truth and predicted images by filename stem.
pub fn ingest_pairs(gt_dir: &Path, pred_dir: &Path, opts: IngestOptions) -> Result<Pairing> {
    let gt = list_images(gt_dir)?;
    let pred = list_images(pred_dir)?;
    let mut pairing = Pairing::default();
    for (id, gt_path) in &gt {
        match pred.get(id) {
            Some(pred_path) => pairing.pairs.push(ImagePair {
                id: id.clone(),
                gt: gt_path.clone(),
                pred: pred_path.clone(),
            }),
            None => {
                pairing.warnings.push(format!("{id}: missing from {}", pred_dir.display()));
                pairing.gt_only.push(id.clone());
            }
        }
    }
    for id in pred.keys().filter(|id| !gt.contains_key(*id)) {
        pairing.warnings.push(format!("{id}: missing from {}", gt_dir.display()));
        pairing.pred_only.push(id.clone());
    }

    if opts.strict && !pairing.warnings.is_empty() {
        return Err(Error::UnpairedFiles(pairing.warnings.join("; ")));
    }
    if opts.require_pairs && pairing.pairs.is_empty() {
        return Err(Error::NoPairs { gt: gt_dir.into(), pred: pred_dir.into() });
    }
    for w in &pairing.warnings {
        log::warn!("unpaired image {w}");
    }
    Ok(pairing)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn touch(dir: &Path, names: &[&str]) {
        for n in names {
            fs::write(dir.join(n), b"").unwrap();
        }
    }

    #[test]
    fn pairs_by_stem_ignoring_extension() {
        let (g, p) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        touch(g.path(), &["a.png", "b.jpg", "notes.txt"]);
        touch(p.path(), &["a.JPG", "b.png"]);
        let r = ingest_pairs(g.path(), p.path(), IngestOptions::default()).unwrap();
        assert_eq!(r.pairs.iter().map(|p| p.id.as_str()).collect::<Vec<_>>(), ["a", "b"]);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn missing_predictions_become_warnings() {
        let (g, p) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        touch(g.path(), &["1.png", "2.png", "3.png", "4.png", "5.png"]);
        touch(p.path(), &["1.png", "2.png"]);
        let r = ingest_pairs(g.path(), p.path(), IngestOptions::default()).unwrap();
        assert_eq!(r.pairs.len(), 2);
        assert_eq!(r.warnings.len(), 3);
        assert_eq!(r.gt_only, ["3", "4", "5"]);

        let strict = IngestOptions { strict: true, require_pairs: false };
        assert!(matches!(ingest_pairs(g.path(), p.path(), strict), Err(Error::UnpairedFiles(_))));
    }

    #[test]
    fn disjoint_listings() {
        let (g, p) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        touch(g.path(), &["a.png"]);
        touch(p.path(), &["b.png"]);
        let opts = IngestOptions { strict: false, require_pairs: true };
        assert!(matches!(ingest_pairs(g.path(), p.path(), opts), Err(Error::NoPairs { .. })));
    }

    #[test]
    fn stems_are_case_sensitive_and_unique() {
        let d = tempfile::tempdir().unwrap();
        touch(d.path(), &["A.png", "a.png"]);
        assert_eq!(list_images(d.path()).unwrap().len(), 2);
        touch(d.path(), &["a.jpg"]);
        assert!(list_images(d.path()).is_err());
    }
}
