/// Bilinear resampling of an interleaved `channels`-plane buffer.
///
/// Uses half-pixel centers (`src = (dst + 0.5) * scale - 0.5`) with edge
/// clamping, so resizing to the same size is the identity and every output
/// value is a convex combination of input values.
pub fn resize_bilinear(
    src: &[f64],
    width: usize,
    height: usize,
    channels: usize,
    new_width: usize,
    new_height: usize,
) -> Vec<f64> {
    assert_eq!(src.len(), width * height * channels, "buffer does not match dimensions");
    if new_width == 0 || new_height == 0 || width == 0 || height == 0 {
        return vec![0.0; new_width * new_height * channels];
    }
    if width == new_width && height == new_height {
        return src.to_vec();
    }

    let taps = |dst: usize, src_len: usize, dst_len: usize| -> (usize, usize, f64) {
        let scale = src_len as f64 / dst_len as f64;
        let pos = ((dst as f64 + 0.5) * scale - 0.5).clamp(0.0, (src_len - 1) as f64);
        let i0 = pos.floor() as usize;
        let i1 = (i0 + 1).min(src_len - 1);
        (i0, i1, pos - i0 as f64)
    };
    let xs: Vec<_> = (0..new_width).map(|x| taps(x, width, new_width)).collect();

    let mut out = Vec::with_capacity(new_width * new_height * channels);
    for y in 0..new_height {
        let (y0, y1, fy) = taps(y, height, new_height);
        let row0 = &src[y0 * width * channels..(y0 + 1) * width * channels];
        let row1 = &src[y1 * width * channels..(y1 + 1) * width * channels];
        for &(x0, x1, fx) in &xs {
            for c in 0..channels {
                let top = row0[x0 * channels + c] * (1.0 - fx) + row0[x1 * channels + c] * fx;
                let bottom = row1[x0 * channels + c] * (1.0 - fx) + row1[x1 * channels + c] * fx;
                out.push(top * (1.0 - fy) + bottom * fy);
            }
        }
    }
    out
}
