//! Pixel containers and conversions among sRGB, linear RGB, CIELAB and YUV.
//!
//! Images are stored interleaved (row-major, three `f64` channels per pixel).
//! sRGB and linear RGB channels live in `[0, 1]`; CIELAB uses `L ∈ [0, 100]`
//! with unbounded `a`, `b`; YUV is full-range analog BT.601 computed on the
//! nonlinear sRGB values.

mod convert;
mod io;
mod resize;

pub use convert::{
    lab_pixel_to_linear, lab_pixel_to_srgb, lab_to_srgb, lab_to_srgb_preserving_lightness,
    linear_pixel_to_lab, linear_to_srgb, luminance_replace, srgb_decode, srgb_encode,
    srgb_pixel_to_lab, srgb_pixel_to_yuv, srgb_to_lab, srgb_to_linear, srgb_to_yuv,
    to_grayscale, yuv_pixel_to_srgb, yuv_to_srgb, Decoded, D65_WHITE, LUMINANCE_REPLACE_SIZE,
    SRGB_TO_XYZ, YUV_U_SCALE, YUV_V_SCALE, Y_WEIGHTS,
};
pub use io::{load_image, quantize_channel, save_gray, save_image};
pub use resize::resize_bilinear;

use crate::error::{Error, Result};

/// Slack allowed on the `[0, 1]` range checks to absorb floating rounding.
pub const GAMUT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColorSpace {
    Srgb,
    LinearRgb,
    Lab,
    Yuv,
}

/// H×W×3 floating image tagged with the color space its channels are in.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarImage {
    width: usize,
    height: usize,
    space: ColorSpace,
    data: Vec<f64>,
}

impl PlanarImage {
    /// Builds an image from interleaved channel data, checking the length
    /// and, for RGB spaces, that every channel is within `[0, 1]`.
    pub fn new(width: usize, height: usize, space: ColorSpace, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height * 3 {
            return Err(Error::InvalidImage(format!(
                "data length {} does not match {width}x{height}x3",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidImage(format!("non-finite channel value {v}")));
        }
        if matches!(space, ColorSpace::Srgb | ColorSpace::LinearRgb) {
            if let Some(v) = data
                .iter()
                .find(|&&v| !(-GAMUT_EPS..=1.0 + GAMUT_EPS).contains(&v))
            {
                return Err(Error::InvalidImage(format!(
                    "{space:?} channel value {v} outside [0, 1]"
                )));
            }
        }
        Ok(Self { width, height, space, data })
    }

    pub fn filled(width: usize, height: usize, space: ColorSpace, pixel: [f64; 3]) -> Result<Self> {
        let data = std::iter::repeat_n(pixel, width * height).flatten().collect();
        Self::new(width, height, space, data)
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        space: ColorSpace,
        mut f: impl FnMut(usize, usize) -> [f64; 3],
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self::new(width, height, space, data)
    }

    pub(crate) fn from_raw(width: usize, height: usize, space: ColorSpace, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height * 3);
        Self { width, height, space, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn space(&self) -> ColorSpace {
        self.space
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn pixels(&self) -> impl ExactSizeIterator<Item = [f64; 3]> + '_ {
        self.data.chunks_exact(3).map(|p| [p[0], p[1], p[2]])
    }

    /// Bilinear resize with half-pixel centers; keeps the color space tag.
    pub fn resized(&self, width: usize, height: usize) -> Self {
        let data = resize_bilinear(&self.data, self.width, self.height, 3, width, height);
        Self::from_raw(width, height, self.space, data)
    }

    pub(crate) fn expect_space(&self, expected: ColorSpace) -> Result<()> {
        if self.space == expected {
            Ok(())
        } else {
            Err(Error::InvalidColorSpace { expected, found: self.space })
        }
    }

    pub(crate) fn map_pixels(&self, space: ColorSpace, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for p in self.pixels() {
            data.extend_from_slice(&f(p));
        }
        Self::from_raw(self.width, self.height, space, data)
    }
}

/// Single-channel lightness image on the CIELAB `L` scale `[0, 100]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    luminance: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, luminance: Vec<f64>) -> Result<Self> {
        if luminance.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "luminance length {} does not match {width}x{height}",
                luminance.len()
            )));
        }
        if let Some(v) = luminance
            .iter()
            .find(|&&v| !(v.is_finite() && (-GAMUT_EPS..=100.0 + GAMUT_EPS).contains(&v)))
        {
            return Err(Error::InvalidImage(format!("lightness {v} outside [0, 100]")));
        }
        Ok(Self { width, height, luminance })
    }

    pub(crate) fn from_raw(width: usize, height: usize, luminance: Vec<f64>) -> Self {
        Self { width, height, luminance }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn luminance(&self) -> &[f64] {
        &self.luminance
    }

    pub fn is_empty(&self) -> bool {
        self.luminance.is_empty()
    }

    pub fn resized(&self, width: usize, height: usize) -> Self {
        let data = resize_bilinear(&self.luminance, self.width, self.height, 1, width, height);
        Self::from_raw(width, height, data)
    }
}
