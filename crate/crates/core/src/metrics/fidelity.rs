//! Paired full-reference metrics: PSNR over all channels and single-scale
//! SSIM on BT.601 luma.

use crate::colorspace::{ColorSpace, PlanarImage, Y_WEIGHTS};
use crate::error::{Error, Result};

/// Side length of the SSIM Gaussian window.
pub const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

fn check_pair(a: &PlanarImage, b: &PlanarImage) -> Result<()> {
    for img in [a, b] {
        if img.space() != ColorSpace::Srgb {
            return Err(Error::InvalidColorSpace { expected: ColorSpace::Srgb, found: img.space() });
        }
    }
    if (a.width(), a.height()) != (b.width(), b.height()) {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    Ok(())
}

/// `10·log10(1 / MSE)` on `[0, 1]` channels; identical images give `+∞`.
pub fn psnr(a: &PlanarImage, b: &PlanarImage) -> Result<f64> {
    check_pair(a, b)?;
    if a.is_empty() {
        return Err(Error::EmptyInput("image has no pixels"));
    }
    let sse: f64 = a.data().iter().zip(b.data()).map(|(x, y)| (x - y) * (x - y)).sum();
    let mse = sse / a.data().len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (1.0 / mse).log10())
}

/// BT.601 luma of an sRGB image, row-major.
pub fn luma_plane(img: &PlanarImage) -> Vec<f64> {
    img.pixels()
        .map(|[r, g, b]| Y_WEIGHTS[0] * r + Y_WEIGHTS[1] * g + Y_WEIGHTS[2] * b)
        .collect()
}

fn gaussian_window() -> [f64; SSIM_WINDOW] {
    let half = (SSIM_WINDOW / 2) as f64;
    let mut w = [0.0; SSIM_WINDOW];
    for (i, v) in w.iter_mut().enumerate() {
        let d = i as f64 - half;
        *v = (-(d * d) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let sum: f64 = w.iter().sum();
    w.map(|v| v / sum)
}

// Separable 'valid' filtering: output is (w - 10) x (h - 10).
fn filter_valid(plane: &[f64], w: usize, h: usize, k: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let ow = w + 1 - SSIM_WINDOW;
    let oh = h + 1 - SSIM_WINDOW;
    let mut horiz = vec![0.0; ow * h];
    for y in 0..h {
        let row = &plane[y * w..(y + 1) * w];
        for x in 0..ow {
            horiz[y * ow + x] = k.iter().zip(&row[x..x + SSIM_WINDOW]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = k
                .iter()
                .enumerate()
                .map(|(i, kv)| kv * horiz[(y + i) * ow + x])
                .sum();
        }
    }
    out
}

/// Mean structural similarity over all 11×11 window positions of the luma
/// planes (Gaussian σ = 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1).
pub fn ssim(a: &PlanarImage, b: &PlanarImage) -> Result<f64> {
    check_pair(a, b)?;
    let (w, h) = (a.width(), a.height());
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::ShapeMismatch(format!(
            "SSIM needs both sides >= {SSIM_WINDOW}, got {w}x{h}"
        )));
    }
    let x = luma_plane(a);
    let y = luma_plane(b);
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p * q).collect();

    let k = gaussian_window();
    let mu_x = filter_valid(&x, w, h, &k);
    let mu_y = filter_valid(&y, w, h, &k);
    let e_xx = filter_valid(&xx, w, h, &k);
    let e_yy = filter_valid(&yy, w, h, &k);
    let e_xy = filter_valid(&xy, w, h, &k);

    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;
    let total: f64 = (0..mu_x.len())
        .map(|i| {
            let (mx, my) = (mu_x[i], mu_y[i]);
            let sxx = e_xx[i] - mx * mx;
            let syy = e_yy[i] - my * my;
            let sxy = e_xy[i] - mx * my;
            ((2.0 * mx * my + c1) * (2.0 * sxy + c2)) / ((mx * mx + my * my + c1) * (sxx + syy + c2))
        })
        .sum();
    Ok(total / mu_x.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(w: usize, h: usize, v: f64) -> PlanarImage {
        PlanarImage::filled(w, h, ColorSpace::Srgb, [v; 3]).unwrap()
    }

    fn checker(w: usize, h: usize) -> PlanarImage {
        PlanarImage::from_fn(w, h, ColorSpace::Srgb, |x, y| {
            let v = if (x / 2 + y / 3) % 2 == 0 { 0.05 } else { 0.95 };
            [v, (v + 0.1 * (x % 3) as f64).min(1.0), v * 0.5]
        })
        .unwrap()
    }

    #[test]
    fn psnr_reference_values() {
        let a = constant(4, 4, 0.0);
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
        assert_eq!(psnr(&a, &constant(4, 4, 1.0)).unwrap(), 0.0);
        let v = psnr(&a, &constant(4, 4, 0.5)).unwrap();
        assert!((v - 6.020599913279624).abs() < 1e-12);
    }

    #[test]
    fn psnr_shape_mismatch() {
        assert!(matches!(
            psnr(&constant(4, 4, 0.0), &constant(4, 5, 0.0)),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn ssim_identity_and_constants() {
        let img = checker(32, 24);
        assert!((ssim(&img, &img).unwrap() - 1.0).abs() < 1e-12);
        let c = constant(16, 16, 0.2);
        assert!((ssim(&c, &c).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ssim_too_small() {
        let a = constant(10, 20, 0.2);
        assert!(matches!(ssim(&a, &a), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn ssim_symmetric_and_bounded() {
        let a = checker(30, 20);
        let b = PlanarImage::from_fn(30, 20, ColorSpace::Srgb, |x, y| {
            let t = ((x * 7 + y * 13) % 17) as f64 / 16.0;
            [t, 1.0 - t, 0.5]
        })
        .unwrap();
        let ab = ssim(&a, &b).unwrap();
        let ba = ssim(&b, &a).unwrap();
        assert!((ab - ba).abs() < 1e-12);
        assert!((-1.0..=1.0).contains(&ab));
    }

    #[test]
    fn gaussian_window_is_normalized() {
        let w = gaussian_window();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(w[0], w[10]);
    }
}
