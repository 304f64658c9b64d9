//! Grayscale conversion, 5x5 Gaussian smoothing and CLAHE.

use super::raster::RasterImage;
use crate::types::{ClaheParams, CompressionConfig};

const LUMA: [f64; 3] = [0.299, 0.587, 0.114];
const LEVELS: usize = 256;

/// Gray → 5x5 Gaussian → CLAHE, the input stage of edge detection.
pub fn preprocess_gray(img: &RasterImage, config: &CompressionConfig) -> RasterImage {
    let gray = to_gray(img);
    let smooth = gaussian_blur_5x5(&gray, config.gaussian_sigma);
    clahe(&smooth, &config.clahe)
}

/// Rec. 601 luma. Single-channel input is returned as is.
pub fn to_gray(img: &RasterImage) -> RasterImage {
    if img.channels() == 1 {
        return img.clone();
    }
    let data = img
        .data()
        .chunks_exact(3)
        .map(|p| {
            let y = LUMA[0] * p[0] as f64 + LUMA[1] * p[1] as f64 + LUMA[2] * p[2] as f64;
            y.round().clamp(0.0, 255.0) as u8
        })
        .collect();
    RasterImage::new(img.width(), img.height(), 1, data).expect("same dims")
}

fn gaussian_kernel_5(sigma: f64) -> [f64; 5] {
    let mut k = [0.0; 5];
    for (i, v) in k.iter_mut().enumerate() {
        let d = i as f64 - 2.0;
        *v = (-d * d / (2.0 * sigma * sigma)).exp();
    }
    let sum: f64 = k.iter().sum();
    k.map(|v| v / sum)
}

/// Separable 5x5 Gaussian blur of a gray image, replicating border pixels.
pub fn gaussian_blur_5x5(gray: &RasterImage, sigma: f64) -> RasterImage {
    assert_eq!(gray.channels(), 1);
    let k = gaussian_kernel_5(sigma);
    let (w, h) = (gray.width() as usize, gray.height() as usize);
    let src = gray.data();
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;

    let mut tmp = vec![0.0f64; w * h];
    for y in 0..h {
        for x in 0..w {
            tmp[y * w + x] = (0..5)
                .map(|i| k[i] * src[y * w + clamp(x as isize + i as isize - 2, w)] as f64)
                .sum();
        }
    }
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let v: f64 = (0..5)
                .map(|i| k[i] * tmp[clamp(y as isize + i as isize - 2, h) * w + x])
                .sum();
            out.push(v.round().clamp(0.0, 255.0) as u8);
        }
    }
    RasterImage::new(gray.width(), gray.height(), 1, out).expect("same dims")
}

/// Contrast-limited adaptive histogram equalisation.
///
/// The image is split into a `tiles_x × tiles_y` grid. Each tile's histogram
/// is clipped at `clip_limit · area / 256` with the excess spread evenly over
/// all bins, and turned into a lookup table. Pixels blend the tables of the
/// four nearest tile centres bilinearly.
pub fn clahe(gray: &RasterImage, params: &ClaheParams) -> RasterImage {
    assert_eq!(gray.channels(), 1);
    let (w, h) = (gray.width() as usize, gray.height() as usize);
    let tiles_x = (params.tiles_x as usize).clamp(1, w);
    let tiles_y = (params.tiles_y as usize).clamp(1, h);
    let src = gray.data();
    let bounds = |n: usize, tiles: usize| (0..=tiles).map(|i| i * n / tiles).collect::<Vec<_>>();
    let xb = bounds(w, tiles_x);
    let yb = bounds(h, tiles_y);

    let mut luts = vec![[0u8; LEVELS]; tiles_x * tiles_y];
    for ty in 0..tiles_y {
        for tx in 0..tiles_x {
            let mut hist = [0usize; LEVELS];
            for y in yb[ty]..yb[ty + 1] {
                for &v in &src[y * w + xb[tx]..y * w + xb[tx + 1]] {
                    hist[v as usize] += 1;
                }
            }
            let area = (xb[tx + 1] - xb[tx]) * (yb[ty + 1] - yb[ty]);
            luts[ty * tiles_x + tx] = tile_lut(&mut hist, area, params.clip_limit);
        }
    }

    let tile_w = w as f64 / tiles_x as f64;
    let tile_h = h as f64 / tiles_y as f64;
    let taps = |pos: usize, size: f64, tiles: usize| {
        let f = pos as f64 / size - 0.5;
        let lo = f.floor();
        let a = f - lo;
        let i0 = (lo as isize).clamp(0, tiles as isize - 1) as usize;
        let i1 = (lo as isize + 1).clamp(0, tiles as isize - 1) as usize;
        (i0, i1, a)
    };
    let xtaps: Vec<_> = (0..w).map(|x| taps(x, tile_w, tiles_x)).collect();

    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        let (ty0, ty1, ya) = taps(y, tile_h, tiles_y);
        for (x, &(tx0, tx1, xa)) in xtaps.iter().enumerate() {
            let v = src[y * w + x] as usize;
            let l = |ty: usize, tx: usize| luts[ty * tiles_x + tx][v] as f64;
            let top = l(ty0, tx0) * (1.0 - xa) + l(ty0, tx1) * xa;
            let bottom = l(ty1, tx0) * (1.0 - xa) + l(ty1, tx1) * xa;
            let r = top * (1.0 - ya) + bottom * ya;
            out.push(r.round().clamp(0.0, 255.0) as u8);
        }
    }
    RasterImage::new(gray.width(), gray.height(), 1, out).expect("same dims")
}

fn tile_lut(hist: &mut [usize; LEVELS], area: usize, clip_limit: f64) -> [u8; LEVELS] {
    let limit = ((clip_limit * area as f64 / LEVELS as f64) as usize).max(1);
    let mut clipped = 0usize;
    for h in hist.iter_mut() {
        if *h > limit {
            clipped += *h - limit;
            *h = limit;
        }
    }
    let per_bin = clipped / LEVELS;
    let mut residual = clipped % LEVELS;
    for h in hist.iter_mut() {
        *h += per_bin;
    }
    if let Some(step) = LEVELS.checked_div(residual) {
        let step = step.max(1);
        let mut i = 0;
        while i < LEVELS && residual > 0 {
            hist[i] += 1;
            residual -= 1;
            i += step;
        }
    }
    let scale = (LEVELS - 1) as f64 / area as f64;
    let mut lut = [0u8; LEVELS];
    let mut cdf = 0usize;
    for (v, h) in hist.iter().enumerate() {
        cdf += h;
        lut[v] = (cdf as f64 * scale).round().clamp(0.0, 255.0) as u8;
    }
    lut
}
