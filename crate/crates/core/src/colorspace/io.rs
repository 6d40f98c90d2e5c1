use std::path::Path;

use image::{GrayImage as Luma8Image, RgbImage};

use super::{ColorSpace, GrayImage, PlanarImage};
use crate::error::{Error, Result};

/// Decodes a PNG/JPEG file to an sRGB image with channels in `[0, 1]`.
/// Embedded ICC profiles are ignored.
pub fn load_image(path: &Path) -> Result<PlanarImage> {
    let decoded = image::open(path).map_err(|source| Error::Image { path: path.into(), source })?;
    let rgb = decoded.to_rgb8();
    let (w, h) = rgb.dimensions();
    let data = rgb.as_raw().iter().map(|&v| f64::from(v) / 255.0).collect();
    Ok(PlanarImage::from_raw(w as usize, h as usize, ColorSpace::Srgb, data))
}

/// Maps a `[0, 1]` channel to 8 bits, rounding half to even.
pub fn quantize_channel(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round_ties_even() as u8
}

/// Encodes an sRGB image as 8-bit PNG or JPEG, chosen by file extension.
pub fn save_image(img: &PlanarImage, path: &Path) -> Result<()> {
    img.expect_space(ColorSpace::Srgb)?;
    let raw = img.data().iter().map(|&v| quantize_channel(v)).collect();
    let buf = RgbImage::from_raw(img.width() as u32, img.height() as u32, raw)
        .ok_or_else(|| Error::InvalidImage("buffer does not match dimensions".into()))?;
    buf.save(path).map_err(|source| Error::Image { path: path.into(), source })
}

/// Writes a lightness image as 8-bit grayscale (`L / 100`).
pub fn save_gray(img: &GrayImage, path: &Path) -> Result<()> {
    let raw = img.luminance().iter().map(|&l| quantize_channel(l / 100.0)).collect();
    let buf = Luma8Image::from_raw(img.width() as u32, img.height() as u32, raw)
        .ok_or_else(|| Error::InvalidImage("buffer does not match dimensions".into()))?;
    buf.save(path).map_err(|source| Error::Image { path: path.into(), source })
}
