use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::features::FeatureSet;

/// Offset added to both covariances when either is near-singular.
pub const FRECHET_EPS: f64 = 1e-6;
/// Smallest eigenvalue below which a covariance counts as near-singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-10;

const SYMMETRY_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-8;

/// Mean, unbiased covariance and sample count of a feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianStats {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    n: usize,
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in i + 1..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

impl GaussianStats {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>, n: usize) -> Result<Self> {
        let d = mean.len();
        if d == 0 || cov.shape() != (d, d) {
            return Err(Error::InvalidStats(format!(
                "mean of length {d} with covariance {:?}",
                cov.shape()
            )));
        }
        if n < 2 {
            return Err(Error::InsufficientSamples(n));
        }
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidStats("non-finite entry".into()));
        }
        let asym = asymmetry(&cov);
        if asym > SYMMETRY_TOL * max_abs(&cov).max(1.0) {
            return Err(Error::InvalidStats(format!("covariance asymmetry {asym:e}")));
        }
        Ok(Self { mean, cov, n })
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Column means and unbiased (divisor `N − 1`) covariance of the rows of `x`.
pub fn fit_gaussian_matrix(x: &DMatrix<f64>) -> Result<GaussianStats> {
    let n = x.nrows();
    if n < 2 {
        return Err(Error::InsufficientSamples(n));
    }
    let mean: DVector<f64> = x.row_mean().transpose();
    let mut centered = x.clone();
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }
    let mut cov = centered.tr_mul(&centered) / (n - 1) as f64;
    symmetrize(&mut cov);
    GaussianStats::new(mean, cov, n)
}

pub fn fit_gaussian(features: &FeatureSet) -> Result<GaussianStats> {
    fit_gaussian_matrix(&features.to_matrix())
}

fn symmetrize(m: &mut DMatrix<f64>) {
    for i in 0..m.nrows() {
        for j in i + 1..m.ncols() {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

fn reconstruct(eig: &SymmetricEigen<f64, nalgebra::Dyn>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= f(eig.eigenvalues[j]);
    }
    let mut out = scaled * v.transpose();
    symmetrize(&mut out);
    out
}

/// Symmetric PSD square root through an eigendecomposition.
///
/// Eigenvalues down to `-1e-8·max(1, ‖a‖_max)` are treated as rounding and
/// clamped to zero; anything more negative, or an asymmetry above the same
/// tolerance, is rejected.
pub fn sqrtm_psd(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(Error::NotPsd(format!("matrix is {:?}, not square", a.shape())));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotPsd("non-finite entry".into()));
    }
    let scale = max_abs(a).max(1.0);
    let asym = asymmetry(a);
    if asym > PSD_TOL * scale {
        return Err(Error::NotPsd(format!("asymmetry {asym:e}")));
    }
    let mut sym = a.clone();
    symmetrize(&mut sym);
    let eig = SymmetricEigen::new(sym);
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -PSD_TOL * scale {
        return Err(Error::NotPsd(format!("eigenvalue {min:e}")));
    }
    Ok(reconstruct(&eig, |l| l.max(0.0).sqrt()))
}

/// Squared Fréchet distance between two Gaussians:
/// `‖μ1 − μ2‖² + Tr(Σ1 + Σ2 − 2·(Σ1^{1/2} Σ2 Σ1^{1/2})^{1/2})`.
///
/// When either covariance has an eigenvalue below [`SINGULAR_THRESHOLD`],
/// both get `FRECHET_EPS·I` added before the trace terms. The result is
/// clamped at zero.
pub fn frechet_distance(g1: &GaussianStats, g2: &GaussianStats) -> Result<f64> {
    if g1.dim() != g2.dim() {
        return Err(Error::ShapeMismatch(format!(
            "feature dimension {} vs {}",
            g1.dim(),
            g2.dim()
        )));
    }
    let d = g1.dim();
    let mean_term = (&g1.mean - &g2.mean).norm_squared();

    let eig1 = SymmetricEigen::new(g1.cov.clone());
    let min1 = eig1.eigenvalues.min();
    let min2 = SymmetricEigen::new(g2.cov.clone()).eigenvalues.min();
    let offset = if min1.min(min2) < SINGULAR_THRESHOLD { FRECHET_EPS } else { 0.0 };

    let sqrt1 = reconstruct(&eig1, |l| (l + offset).max(0.0).sqrt());
    let cov2 = &g2.cov + DMatrix::identity(d, d) * offset;
    let mut inner = &sqrt1 * &cov2 * &sqrt1;
    symmetrize(&mut inner);
    let tr_sqrt: f64 = SymmetricEigen::new(inner)
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .sum();

    let tr1 = g1.cov.trace() + offset * d as f64;
    let tr2 = g2.cov.trace() + offset * d as f64;
    Ok((mean_term + tr1 + tr2 - 2.0 * tr_sqrt).max(0.0))
}

/// Fréchet distance between Gaussians fitted to two feature sets.
pub fn fid(gt: &FeatureSet, pred: &FeatureSet) -> Result<f64> {
    if gt.dim() != pred.dim() {
        return Err(Error::ShapeMismatch(format!(
            "feature dimension {} vs {}",
            gt.dim(),
            pred.dim()
        )));
    }
    frechet_distance(&fit_gaussian(gt)?, &fit_gaussian(pred)?)
}
