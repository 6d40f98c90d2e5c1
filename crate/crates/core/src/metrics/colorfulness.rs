use rayon::prelude::*;

use crate::colorspace::{ColorSpace, PlanarImage};
use crate::error::{Error, Result};

/// Running opponent-channel moments on the 0–255 scale.
///
/// `rg = R − G`, `yb = ½(R + G) − B`; means and population variances are
/// tracked with Welford updates.
#[derive(Debug, Clone, Default)]
pub struct OpponentStats {
    n: u64,
    mean_rg: f64,
    mean_yb: f64,
    m2_rg: f64,
    m2_yb: f64,
}

impl OpponentStats {
    #[inline]
    pub fn push(&mut self, rgb: [f64; 3]) {
        let [r, g, b] = rgb.map(|c| c * 255.0);
        let rg = r - g;
        let yb = 0.5 * (r + g) - b;
        self.n += 1;
        let n = self.n as f64;
        let d_rg = rg - self.mean_rg;
        self.mean_rg += d_rg / n;
        self.m2_rg += d_rg * (rg - self.mean_rg);
        let d_yb = yb - self.mean_yb;
        self.mean_yb += d_yb / n;
        self.m2_yb += d_yb * (yb - self.mean_yb);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    /// `0.3·√(μ_rg² + μ_yb²) + √(σ_rg² + σ_yb²)`; `None` when no pixel was pushed.
    pub fn colorfulness(&self) -> Option<f64> {
        if self.n == 0 {
            return None;
        }
        let n = self.n as f64;
        let var_rg = (self.m2_rg / n).max(0.0);
        let var_yb = (self.m2_yb / n).max(0.0);
        Some(0.3 * self.mean_rg.hypot(self.mean_yb) + (var_rg + var_yb).sqrt())
    }
}

/// Hasler–Süsstrunk colorfulness of an sRGB image, on the 0–255 pixel scale.
pub fn colorfulness(img: &PlanarImage) -> Result<f64> {
    if img.space() != ColorSpace::Srgb {
        return Err(Error::InvalidColorSpace { expected: ColorSpace::Srgb, found: img.space() });
    }
    let mut stats = OpponentStats::default();
    img.pixels().for_each(|p| stats.push(p));
    stats.colorfulness().ok_or(Error::EmptyInput("image has no pixels"))
}

/// Per-image colorfulness of a set together with its arithmetic mean.
#[derive(Debug, Clone, PartialEq)]
pub struct CfSummary {
    per_image: Vec<(String, f64)>,
    mean_cf: f64,
}

impl CfSummary {
    pub fn new(per_image: Vec<(String, f64)>) -> Result<Self> {
        if let Some((id, cf)) = per_image.iter().find(|(_, cf)| !(cf.is_finite() && *cf >= 0.0)) {
            return Err(Error::InvalidArgument(format!("colorfulness of {id} is {cf}")));
        }
        let mean_cf = if per_image.is_empty() {
            0.0
        } else {
            per_image.iter().map(|(_, cf)| cf).sum::<f64>() / per_image.len() as f64
        };
        Ok(Self { per_image, mean_cf })
    }

    /// Scores every image in parallel; order of `per_image` follows the input.
    pub fn from_images<'a, I>(images: I) -> Result<Self>
    where
        I: IntoParallelIterator<Item = (&'a str, &'a PlanarImage)>,
        I::Iter: IndexedParallelIterator,
    {
        let per_image = images
            .into_par_iter()
            .map(|(id, img)| colorfulness(img).map(|cf| (id.to_owned(), cf)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(per_image)
    }

    pub fn per_image(&self) -> &[(String, f64)] {
        &self.per_image
    }

    pub fn mean_cf(&self) -> f64 {
        self.mean_cf
    }

    pub fn len(&self) -> usize {
        self.per_image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_image.is_empty()
    }
}

/// `|mean CF(gt) − mean CF(pred)|`.
pub fn delta_colorfulness(gt: &CfSummary, pred: &CfSummary) -> Result<f64> {
    if gt.is_empty() || pred.is_empty() {
        return Err(Error::EmptyInput("colorfulness summary"));
    }
    Ok((gt.mean_cf - pred.mean_cf).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(p: [f64; 3]) -> PlanarImage {
        PlanarImage::filled(4, 3, ColorSpace::Srgb, p).unwrap()
    }

    #[test]
    fn fixed_points() {
        assert_eq!(colorfulness(&constant([0.3, 0.3, 0.3])).unwrap(), 0.0);
        let red = colorfulness(&constant([1.0, 0.0, 0.0])).unwrap();
        let expected = 0.3 * (65025.0_f64 + 16256.25).sqrt();
        assert!((red - expected).abs() < 1e-9);
        assert!((red - 85.5296).abs() < 1e-4);
        let blue = colorfulness(&constant([0.0, 0.0, 1.0])).unwrap();
        assert!((blue - 76.5).abs() < 1e-9);
    }

    #[test]
    fn spread_term_uses_population_std() {
        // Half the pixels (1,0,0), half (0,0,0): rg ∈ {255, 0}, yb ∈ {127.5, 0}.
        let img = PlanarImage::from_fn(2, 1, ColorSpace::Srgb, |x, _| {
            if x == 0 { [1.0, 0.0, 0.0] } else { [0.0; 3] }
        })
        .unwrap();
        let mu = 0.3 * (127.5_f64.powi(2) + 63.75_f64.powi(2)).sqrt();
        let sigma = (127.5_f64.powi(2) + 63.75_f64.powi(2)).sqrt();
        assert!((colorfulness(&img).unwrap() - (mu + sigma)).abs() < 1e-9);
    }

    #[test]
    fn empty_and_wrong_space() {
        let empty = PlanarImage::new(0, 0, ColorSpace::Srgb, vec![]).unwrap();
        assert!(matches!(colorfulness(&empty), Err(Error::EmptyInput(_))));
        let lab = PlanarImage::filled(1, 1, ColorSpace::Lab, [50.0, 0.0, 0.0]).unwrap();
        assert!(matches!(colorfulness(&lab), Err(Error::InvalidColorSpace { .. })));
    }

    #[test]
    fn delta_is_absolute_difference_of_means() {
        let gt = CfSummary::new(vec![("a".into(), 40.85)]).unwrap();
        let pred = CfSummary::new(vec![("a".into(), 43.46)]).unwrap();
        assert!((delta_colorfulness(&gt, &pred).unwrap() - 2.61).abs() < 1e-9);
        assert_eq!(delta_colorfulness(&gt, &gt).unwrap(), 0.0);
        let empty = CfSummary::new(vec![]).unwrap();
        assert!(matches!(delta_colorfulness(&gt, &empty), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn summary_mean() {
        let s = CfSummary::new(vec![("a".into(), 1.0), ("b".into(), 2.0), ("c".into(), 6.0)]).unwrap();
        assert_eq!(s.mean_cf(), 3.0);
        assert!(CfSummary::new(vec![("a".into(), -1.0)]).is_err());
    }
}
