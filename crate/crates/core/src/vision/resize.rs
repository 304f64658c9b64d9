use super::raster::RasterImage;

/// Separable bilinear resample with half-pixel-centre alignment: output pixel
/// `x` samples the source at `(x + 0.5) · w_in / w_out − 0.5`, clamped to the
/// image. Resizing to the same size returns the input unchanged.
pub fn resize_bilinear(img: &RasterImage, target: (u32, u32)) -> RasterImage {
    let (tw, th) = target;
    assert!(tw >= 1 && th >= 1, "resize target must be at least 1x1");
    if img.dims() == target {
        return img.clone();
    }
    let channels = img.channels() as usize;
    let xs = sample_taps(img.width(), tw);
    let ys = sample_taps(img.height(), th);
    let src = img.data();
    let stride = img.width() as usize * channels;

    let mut out = Vec::with_capacity(tw as usize * th as usize * channels);
    for &(y0, y1, fy) in &ys {
        let row0 = &src[y0 * stride..(y0 + 1) * stride];
        let row1 = &src[y1 * stride..(y1 + 1) * stride];
        for &(x0, x1, fx) in &xs {
            for c in 0..channels {
                let p00 = row0[x0 * channels + c] as f64;
                let p01 = row0[x1 * channels + c] as f64;
                let p10 = row1[x0 * channels + c] as f64;
                let p11 = row1[x1 * channels + c] as f64;
                let top = p00 + (p01 - p00) * fx;
                let bottom = p10 + (p11 - p10) * fx;
                let v = top + (bottom - top) * fy;
                out.push(v.round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    RasterImage::new(tw, th, img.channels(), out).expect("dimensions are consistent")
}

/// For each output coordinate: the two source taps and the weight of the second.
fn sample_taps(src_len: u32, dst_len: u32) -> Vec<(usize, usize, f64)> {
    let scale = src_len as f64 / dst_len as f64;
    let last = (src_len - 1) as f64;
    (0..dst_len)
        .map(|d| {
            let s = ((d as f64 + 0.5) * scale - 0.5).clamp(0.0, last);
            let s0 = s.floor();
            let i0 = s0 as usize;
            let i1 = (i0 + 1).min(src_len as usize - 1);
            (i0, i1, s - s0)
        })
        .collect()
}
