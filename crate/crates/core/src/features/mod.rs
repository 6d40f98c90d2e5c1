//! Feature matrices, the CFS v1 container and the built-in extractor.

mod cfs;
mod pixel_stats;

pub use cfs::{load_cfs, manifest_path, save_cfs, CFS_MAGIC, CFS_VERSION};
pub use pixel_stats::{PixelStatsExtractor, PIXEL_STATS_DIM, PIXEL_STATS_SCALE, PIXEL_STATS_SIZE};

use std::collections::HashSet;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::colorspace::PlanarImage;
use crate::error::{Error, Result};

/// Name and version of the extractor that produced a [`FeatureSet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureMeta {
    pub extractor: String,
    pub version: String,
}

impl FeatureMeta {
    pub fn new(extractor: impl Into<String>, version: impl Into<String>) -> Self {
        Self { extractor: extractor.into(), version: version.into() }
    }
}

/// N×D `f32` feature matrix with one unique identifier per row.
///
/// Rows are kept sorted by id so that downstream statistics do not depend on
/// directory traversal order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    data: Vec<f32>,
    dim: usize,
    ids: Vec<String>,
    meta: FeatureMeta,
}

impl FeatureSet {
    /// Validates shape, id uniqueness and finiteness, then reorders rows so
    /// that ids are ascending.
    pub fn new(ids: Vec<String>, data: Vec<f32>, dim: usize, meta: FeatureMeta) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::InvalidFeatureSet("no rows".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidFeatureSet("zero feature dimension".into()));
        }
        if data.len() != ids.len() * dim {
            return Err(Error::InvalidFeatureSet(format!(
                "{} values for {} rows of dimension {dim}",
                data.len(),
                ids.len()
            )));
        }
        let mut seen = HashSet::with_capacity(ids.len());
        if let Some(dup) = ids.iter().find(|id| !seen.insert(id.as_str())) {
            return Err(Error::InvalidFeatureSet(format!("duplicate id {dup:?}")));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidFeatureSet("non-finite feature value".into()));
        }

        let mut order: Vec<usize> = (0..ids.len()).collect();
        order.sort_by(|&a, &b| ids[a].cmp(&ids[b]));
        if order.iter().enumerate().all(|(i, &j)| i == j) {
            return Ok(Self { data, dim, ids, meta });
        }
        let sorted_ids = order.iter().map(|&i| ids[i].clone()).collect();
        let sorted_data = order
            .iter()
            .flat_map(|&i| data[i * dim..(i + 1) * dim].iter().copied())
            .collect();
        Ok(Self { data: sorted_data, dim, ids: sorted_ids, meta })
    }

    pub fn from_rows(meta: FeatureMeta, rows: Vec<(String, Vec<f32>)>) -> Result<Self> {
        let dim = rows.first().map_or(0, |(_, r)| r.len());
        if let Some((id, r)) = rows.iter().find(|(_, r)| r.len() != dim) {
            return Err(Error::InvalidFeatureSet(format!(
                "row {id:?} has dimension {} instead of {dim}",
                r.len()
            )));
        }
        let mut ids = Vec::with_capacity(rows.len());
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (id, r) in rows {
            ids.push(id);
            data.extend(r);
        }
        Self::new(ids, data, dim, meta)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn meta(&self) -> &FeatureMeta {
        &self.meta
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_by_id(&self, id: &str) -> Option<&[f32]> {
        self.ids
            .binary_search_by(|probe| probe.as_str().cmp(id))
            .ok()
            .map(|i| self.row(i))
    }

    /// Rows upcast to `f64`.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_iterator(self.len(), self.dim, self.data.iter().map(|&v| f64::from(v)))
    }
}

/// A deterministic image → vector map: identical image bits must give
/// identical output.
pub trait FeatureExtractor: Sync {
    fn name(&self) -> &str;
    fn version(&self) -> &str;
    fn dim(&self) -> usize;
    fn extract(&self, img: &PlanarImage) -> Result<Vec<f32>>;

    fn meta(&self) -> FeatureMeta {
        FeatureMeta::new(self.name(), self.version())
    }
}

/// Runs `extractor` over `(id, image)` pairs in parallel.
pub fn extract_features<E: FeatureExtractor + ?Sized>(
    extractor: &E,
    images: &[(String, PlanarImage)],
) -> Result<FeatureSet> {
    let rows = images
        .par_iter()
        .map(|(id, img)| extractor.extract(img).map(|v| (id.clone(), v)))
        .collect::<Result<Vec<_>>>()?;
    FeatureSet::from_rows(extractor.meta(), rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> FeatureMeta {
        FeatureMeta::new("test", "1")
    }

    #[test]
    fn rows_are_sorted_by_id() {
        let fs = FeatureSet::new(
            vec!["b".into(), "a".into(), "c".into()],
            vec![2.0, 2.5, 1.0, 1.5, 3.0, 3.5],
            2,
            meta(),
        )
        .unwrap();
        assert_eq!(fs.ids(), ["a", "b", "c"]);
        assert_eq!(fs.data(), [1.0, 1.5, 2.0, 2.5, 3.0, 3.5]);
        assert_eq!(fs.row_by_id("b"), Some(&[2.0, 2.5][..]));
        assert_eq!(fs.row_by_id("z"), None);
    }

    #[test]
    fn invalid_sets_are_rejected() {
        assert!(FeatureSet::new(vec![], vec![], 2, meta()).is_err());
        assert!(FeatureSet::new(vec!["a".into(), "a".into()], vec![0.0; 4], 2, meta()).is_err());
        assert!(FeatureSet::new(vec!["a".into()], vec![0.0; 3], 2, meta()).is_err());
        assert!(FeatureSet::new(vec!["a".into()], vec![f32::NAN, 0.0], 2, meta()).is_err());
        assert!(FeatureSet::from_rows(meta(), vec![("a".into(), vec![1.0]), ("b".into(), vec![])]).is_err());
    }
}
