//! CFS v1: a little-endian binary feature matrix with a JSON sidecar.
//!
//! ```text
//! "CFS1" | u8 version = 1 | u32 N | u32 D | N·D f32, row-major
//! <name>.manifest.json: {"extractor": str, "version": str, "ids": [str; N]}
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{FeatureMeta, FeatureSet};
use crate::error::{Error, Result};

pub const CFS_MAGIC: [u8; 4] = *b"CFS1";
pub const CFS_VERSION: u8 = 1;
const HEADER_LEN: usize = 4 + 1 + 4 + 4;

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    extractor: String,
    version: String,
    ids: Vec<String>,
}

/// Sidecar path for a CFS file: `feats.cfs` → `feats.manifest.json`.
pub fn manifest_path(path: &Path) -> PathBuf {
    path.with_extension("manifest.json")
}

pub fn save_cfs(fs: &FeatureSet, path: &Path) -> Result<()> {
    let n = u32::try_from(fs.len())
        .map_err(|_| Error::InvalidFeatureSet(format!("{} rows exceed u32", fs.len())))?;
    let d = u32::try_from(fs.dim())
        .map_err(|_| Error::InvalidFeatureSet(format!("dimension {} exceeds u32", fs.dim())))?;

    let mut bytes = Vec::with_capacity(HEADER_LEN + fs.data().len() * 4);
    bytes.extend_from_slice(&CFS_MAGIC);
    bytes.push(CFS_VERSION);
    bytes.extend_from_slice(&n.to_le_bytes());
    bytes.extend_from_slice(&d.to_le_bytes());
    for v in fs.data() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, &bytes).map_err(|e| Error::io(path, e))?;

    let manifest = Manifest {
        extractor: fs.meta().extractor.clone(),
        version: fs.meta().version.clone(),
        ids: fs.ids().to_vec(),
    };
    let mpath = manifest_path(path);
    let mut json = serde_json::to_string_pretty(&manifest)
        .map_err(|source| Error::Json { path: mpath.clone(), source })?;
    json.push('\n');
    fs::write(&mpath, json).map_err(|e| Error::io(&mpath, e))
}

pub fn load_cfs(path: &Path) -> Result<FeatureSet> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let corrupt = |reason: String| Error::CorruptPayload { path: path.into(), reason };

    let magic_len = bytes.len().min(4);
    if bytes[..magic_len] != CFS_MAGIC[..magic_len] {
        return Err(Error::BadMagic(path.into()));
    }
    if bytes.len() < HEADER_LEN {
        return Err(corrupt(format!("{} bytes is shorter than the header", bytes.len())));
    }
    let version = bytes[4];
    if version != CFS_VERSION {
        return Err(Error::VersionUnsupported { path: path.into(), version });
    }
    let read_u32 = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as usize;
    let (n, d) = (read_u32(5), read_u32(9));
    if n == 0 || d == 0 {
        return Err(corrupt(format!("empty shape {n}x{d}")));
    }
    let expected = n
        .checked_mul(d)
        .and_then(|c| c.checked_mul(4))
        .and_then(|c| c.checked_add(HEADER_LEN))
        .ok_or_else(|| corrupt(format!("shape {n}x{d} overflows")))?;
    if bytes.len() != expected {
        return Err(corrupt(format!(
            "expected {expected} bytes for {n}x{d}, found {}",
            bytes.len()
        )));
    }
    let data: Vec<f32> = bytes[HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if let Some(i) = data.iter().position(|v| !v.is_finite()) {
        return Err(corrupt(format!("non-finite value at row {}, column {}", i / d, i % d)));
    }

    let mpath = manifest_path(path);
    let text = fs::read_to_string(&mpath).map_err(|e| Error::io(&mpath, e))?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|source| Error::Json { path: mpath.clone(), source })?;
    let mismatch = |reason: String| Error::ManifestMismatch { path: mpath.clone(), reason };
    if manifest.ids.len() != n {
        return Err(mismatch(format!("{} ids for {n} rows", manifest.ids.len())));
    }
    if manifest.ids.windows(2).any(|w| w[0] >= w[1]) {
        return Err(mismatch("ids are not strictly ascending".into()));
    }

    FeatureSet::new(manifest.ids, data, d, FeatureMeta::new(manifest.extractor, manifest.version))
}
