use super::{ColorSpace, GrayImage, PlanarImage, GAMUT_EPS};
use crate::error::{Error, Result};

/// Linear sRGB → CIE XYZ (D65, 2° observer).
pub const SRGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
];

/// Reference white, taken as the image of RGB (1, 1, 1) under [`SRGB_TO_XYZ`]
/// so that white maps to exactly `L = 100, a = b = 0`.
pub const D65_WHITE: [f64; 3] = [
    SRGB_TO_XYZ[0][0] + SRGB_TO_XYZ[0][1] + SRGB_TO_XYZ[0][2],
    SRGB_TO_XYZ[1][0] + SRGB_TO_XYZ[1][1] + SRGB_TO_XYZ[1][2],
    SRGB_TO_XYZ[2][0] + SRGB_TO_XYZ[2][1] + SRGB_TO_XYZ[2][2],
];

const XYZ_TO_SRGB: [[f64; 3]; 3] = invert3(SRGB_TO_XYZ);

/// BT.601 luma weights for R, G, B.
pub const Y_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];
pub const YUV_U_SCALE: f64 = 0.492;
pub const YUV_V_SCALE: f64 = 0.877;

/// Side length of the canvas used by [`luminance_replace`].
pub const LUMINANCE_REPLACE_SIZE: usize = 512;

const LAB_EPSILON: f64 = 216.0 / 24389.0;
const LAB_KAPPA: f64 = 24389.0 / 27.0;

const fn invert3(m: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    let c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
    let c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    let det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
    let inv = 1.0 / det;
    [
        [
            c00 * inv,
            (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv,
            (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv,
        ],
        [
            c01 * inv,
            (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv,
            (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv,
        ],
        [
            c02 * inv,
            (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv,
            (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv,
        ],
    ]
}

#[inline]
fn mul3(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// sRGB transfer function, nonlinear → linear.
#[inline]
pub fn srgb_decode(c: f64) -> f64 {
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

/// sRGB transfer function, linear → nonlinear. Input is clamped to `[0, 1]`.
#[inline]
pub fn srgb_encode(l: f64) -> f64 {
    let l = l.clamp(0.0, 1.0);
    if l <= 0.0031308 {
        12.92 * l
    } else {
        1.055 * l.powf(1.0 / 2.4) - 0.055
    }
}

#[inline]
fn lab_f(t: f64) -> f64 {
    if t > LAB_EPSILON {
        t.cbrt()
    } else {
        (LAB_KAPPA * t + 16.0) / 116.0
    }
}

#[inline]
fn lab_f_inv(f: f64) -> f64 {
    let f3 = f * f * f;
    if f3 > LAB_EPSILON {
        f3
    } else {
        (116.0 * f - 16.0) / LAB_KAPPA
    }
}

pub fn linear_pixel_to_lab(rgb: [f64; 3]) -> [f64; 3] {
    let xyz = mul3(&SRGB_TO_XYZ, rgb);
    let fx = lab_f(xyz[0] / D65_WHITE[0]);
    let fy = lab_f(xyz[1] / D65_WHITE[1]);
    let fz = lab_f(xyz[2] / D65_WHITE[2]);
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

#[inline]
pub fn srgb_pixel_to_lab(rgb: [f64; 3]) -> [f64; 3] {
    linear_pixel_to_lab(rgb.map(srgb_decode))
}

/// CIELAB → linear RGB without any gamut handling.
pub fn lab_pixel_to_linear(lab: [f64; 3]) -> [f64; 3] {
    let fy = (lab[0] + 16.0) / 116.0;
    let fx = fy + lab[1] / 500.0;
    let fz = fy - lab[2] / 200.0;
    let xyz = [
        D65_WHITE[0] * lab_f_inv(fx),
        D65_WHITE[1] * lab_f_inv(fy),
        D65_WHITE[2] * lab_f_inv(fz),
    ];
    mul3(&XYZ_TO_SRGB, xyz)
}

/// CIELAB → sRGB with per-channel clipping.
#[inline]
pub fn lab_pixel_to_srgb(lab: [f64; 3]) -> [f64; 3] {
    lab_pixel_to_linear(lab).map(srgb_encode)
}

#[inline]
fn in_unit_cube(v: [f64; 3]) -> bool {
    v.iter().all(|c| (-GAMUT_EPS..=1.0 + GAMUT_EPS).contains(c))
}

/// CIELAB → sRGB keeping `L` fixed: out-of-gamut colors are pulled toward
/// the neutral axis (`a`, `b` scaled by the largest factor in `[0, 1]` that
/// lands inside the gamut) instead of being clipped per channel.
pub fn lab_to_srgb_preserving_lightness(lab: [f64; 3]) -> [f64; 3] {
    let l = lab[0].clamp(0.0, 100.0);
    let direct = lab_pixel_to_linear([l, lab[1], lab[2]]);
    if in_unit_cube(direct) {
        return direct.map(srgb_encode);
    }
    // The neutral point (L, 0, 0) is always in gamut.
    let (mut inside, mut outside) = (0.0_f64, 1.0_f64);
    for _ in 0..48 {
        let mid = 0.5 * (inside + outside);
        if in_unit_cube(lab_pixel_to_linear([l, mid * lab[1], mid * lab[2]])) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    lab_pixel_to_linear([l, inside * lab[1], inside * lab[2]]).map(srgb_encode)
}

#[inline]
pub fn srgb_pixel_to_yuv(rgb: [f64; 3]) -> [f64; 3] {
    let y = Y_WEIGHTS[0] * rgb[0] + Y_WEIGHTS[1] * rgb[1] + Y_WEIGHTS[2] * rgb[2];
    [y, YUV_U_SCALE * (rgb[2] - y), YUV_V_SCALE * (rgb[0] - y)]
}

/// Exact inverse of [`srgb_pixel_to_yuv`]; no clipping.
#[inline]
pub fn yuv_pixel_to_srgb(yuv: [f64; 3]) -> [f64; 3] {
    let [y, u, v] = yuv;
    let r = y + v / YUV_V_SCALE;
    let b = y + u / YUV_U_SCALE;
    let g = (y - Y_WEIGHTS[0] * r - Y_WEIGHTS[2] * b) / Y_WEIGHTS[1];
    [r, g, b]
}

pub fn srgb_to_lab(img: &PlanarImage) -> Result<PlanarImage> {
    img.expect_space(ColorSpace::Srgb)?;
    Ok(img.map_pixels(ColorSpace::Lab, srgb_pixel_to_lab))
}

pub fn lab_to_srgb(img: &PlanarImage) -> Result<PlanarImage> {
    img.expect_space(ColorSpace::Lab)?;
    Ok(img.map_pixels(ColorSpace::Srgb, lab_pixel_to_srgb))
}

pub fn srgb_to_linear(img: &PlanarImage) -> Result<PlanarImage> {
    img.expect_space(ColorSpace::Srgb)?;
    Ok(img.map_pixels(ColorSpace::LinearRgb, |p| p.map(srgb_decode)))
}

pub fn linear_to_srgb(img: &PlanarImage) -> Result<PlanarImage> {
    img.expect_space(ColorSpace::LinearRgb)?;
    Ok(img.map_pixels(ColorSpace::Srgb, |p| p.map(srgb_encode)))
}

pub fn srgb_to_yuv(img: &PlanarImage) -> Result<PlanarImage> {
    img.expect_space(ColorSpace::Srgb)?;
    Ok(img.map_pixels(ColorSpace::Yuv, srgb_pixel_to_yuv))
}

/// Result of a conversion into sRGB that may have left the gamut.
#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub image: PlanarImage,
    /// Pixels with at least one channel outside `[0, 1]` before clamping.
    pub clamped_pixels: usize,
}

impl Decoded {
    pub fn clamped(&self) -> bool {
        self.clamped_pixels > 0
    }

    pub fn clamped_fraction(&self) -> f64 {
        let n = self.image.pixel_count();
        if n == 0 {
            0.0
        } else {
            self.clamped_pixels as f64 / n as f64
        }
    }
}

/// YUV → sRGB. With `clip`, channels are clamped to `[0, 1]` and the number
/// of affected pixels is reported; without it, any out-of-gamut pixel is an
/// error since the result could not be a valid sRGB image.
pub fn yuv_to_srgb(img: &PlanarImage, clip: bool) -> Result<Decoded> {
    img.expect_space(ColorSpace::Yuv)?;
    let mut clamped_pixels = 0;
    let mut data = Vec::with_capacity(img.data().len());
    for p in img.pixels() {
        let rgb = yuv_pixel_to_srgb(p);
        if !in_unit_cube(rgb) {
            clamped_pixels += 1;
        }
        if clip {
            data.extend(rgb.iter().map(|c| c.clamp(0.0, 1.0)));
        } else {
            data.extend_from_slice(&rgb);
        }
    }
    if !clip && clamped_pixels > 0 {
        return Err(Error::OutOfGamut(clamped_pixels));
    }
    let image = PlanarImage::from_raw(img.width(), img.height(), ColorSpace::Srgb, data);
    Ok(Decoded { image, clamped_pixels })
}

/// CIELAB lightness of an sRGB image.
pub fn to_grayscale(img: &PlanarImage) -> Result<GrayImage> {
    img.expect_space(ColorSpace::Srgb)?;
    let luminance = img
        .pixels()
        .map(|p| srgb_pixel_to_lab(p)[0].clamp(0.0, 100.0))
        .collect();
    Ok(GrayImage::from_raw(img.width(), img.height(), luminance))
}

/// Resizes `colorized` to 512×512, swaps its CIELAB lightness for that of
/// `gray` (resized to match) and converts back to sRGB.
///
/// Chroma that would leave the gamut at the new lightness is reduced toward
/// neutral rather than clipped per channel, so the output lightness equals
/// the gray input up to floating rounding.
pub fn luminance_replace(colorized: &PlanarImage, gray: &GrayImage) -> Result<PlanarImage> {
    colorized.expect_space(ColorSpace::Srgb)?;
    if colorized.is_empty() {
        return Err(Error::EmptyInput("colorized image"));
    }
    if gray.is_empty() {
        return Err(Error::EmptyInput("grayscale image"));
    }
    let size = LUMINANCE_REPLACE_SIZE;
    let color = if colorized.width() == size && colorized.height() == size {
        colorized.clone()
    } else {
        colorized.resized(size, size)
    };
    let gray = if gray.width() == size && gray.height() == size {
        gray.clone()
    } else {
        gray.resized(size, size)
    };
    let mut data = Vec::with_capacity(size * size * 3);
    for (p, &l) in color.pixels().zip(gray.luminance()) {
        let lab = srgb_pixel_to_lab(p);
        data.extend_from_slice(&lab_to_srgb_preserving_lightness([l, lab[1], lab[2]]));
    }
    Ok(PlanarImage::from_raw(size, size, ColorSpace::Srgb, data))
}
