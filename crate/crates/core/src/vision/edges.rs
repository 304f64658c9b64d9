//! Canny edge detection at two sensitivities, merged and closed.

use std::collections::VecDeque;

use super::raster::{BinaryMap, RasterImage};
use crate::types::{CannyThresholds, CompressionConfig};

/// Edge map of a preprocessed gray image: Canny at the primary and secondary
/// threshold pairs, OR-merged, then a 3x3 morphological closing.
pub fn extract_edges(gray: &RasterImage, config: &CompressionConfig) -> BinaryMap {
    let strict = canny(gray, config.canny_primary);
    let lenient = canny(gray, config.canny_secondary);
    close_3x3(&strict.union(&lenient))
}

/// Canny without pre-smoothing: 3x3 Sobel gradients (L2 magnitude),
/// non-maximum suppression along the quantised gradient direction, and
/// hysteresis. Pixels above `hi` seed edges, which then grow through
/// 8-connected pixels above `lo`.
pub fn canny(gray: &RasterImage, thresholds: CannyThresholds) -> BinaryMap {
    assert_eq!(gray.channels(), 1);
    let (w, h) = (gray.width() as usize, gray.height() as usize);
    let (gx, gy) = sobel(gray);
    let mag: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| a.hypot(*b)).collect();
    let thin = non_maximum_suppression(&mag, &gx, &gy, w, h);
    hysteresis(&thin, w, h, thresholds)
}

fn sobel(gray: &RasterImage) -> (Vec<f64>, Vec<f64>) {
    let (w, h) = (gray.width() as isize, gray.height() as isize);
    let src = gray.data();
    let at = |x: isize, y: isize| {
        let x = x.clamp(0, w - 1);
        let y = y.clamp(0, h - 1);
        src[(y * w + x) as usize] as f64
    };
    let mut gx = Vec::with_capacity((w * h) as usize);
    let mut gy = Vec::with_capacity((w * h) as usize);
    for y in 0..h {
        for x in 0..w {
            gx.push(
                (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1))
                    - (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1)),
            );
            gy.push(
                (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1))
                    - (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1)),
            );
        }
    }
    (gx, gy)
}

fn non_maximum_suppression(mag: &[f64], gx: &[f64], gy: &[f64], w: usize, h: usize) -> Vec<f64> {
    // tan(22.5°) and tan(67.5°)
    const T22: f64 = 0.414_213_562_373_095_1;
    const T67: f64 = 2.414_213_562_373_095;
    let get = |x: isize, y: isize| {
        if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
            0.0
        } else {
            mag[y as usize * w + x as usize]
        }
    };
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let m = mag[i];
            if m == 0.0 {
                continue;
            }
            let (ax, ay) = (gx[i].abs(), gy[i].abs());
            let (dx, dy): (isize, isize) = if ay <= ax * T22 {
                (1, 0)
            } else if ay >= ax * T67 {
                (0, 1)
            } else if (gx[i] > 0.0) == (gy[i] > 0.0) {
                (1, 1)
            } else {
                (1, -1)
            };
            let (xi, yi) = (x as isize, y as isize);
            let ahead = get(xi + dx, yi + dy);
            let behind = get(xi - dx, yi - dy);
            if m > behind && m >= ahead {
                out[i] = m;
            }
        }
    }
    out
}

fn hysteresis(thin: &[f64], w: usize, h: usize, t: CannyThresholds) -> BinaryMap {
    let mut edge = vec![false; w * h];
    let mut queue = VecDeque::new();
    for (i, &m) in thin.iter().enumerate() {
        if m > t.hi {
            edge[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = ((i % w) as isize, (i / w) as isize);
        for dy in -1..=1isize {
            for dx in -1..=1isize {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if !edge[j] && thin[j] > t.lo {
                    edge[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    BinaryMap::from_bits(w as u32, h as u32, edge).expect("same dims")
}

/// Dilation then erosion with a 3x3 square. Pixels outside the map count as
/// unset for the dilation and as set for the erosion, so closing never eats
/// into the border.
pub fn close_3x3(map: &BinaryMap) -> BinaryMap {
    let dilated = morph_3x3(map, false, |any, _| any);
    morph_3x3(&dilated, true, |_, all| all)
}

fn morph_3x3(map: &BinaryMap, outside: bool, pick: impl Fn(bool, bool) -> bool) -> BinaryMap {
    let (w, h) = (map.width() as isize, map.height() as isize);
    let mut out = BinaryMap::new(map.width(), map.height());
    for y in 0..h {
        for x in 0..w {
            let mut any = false;
            let mut all = true;
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    let v = if nx < 0 || ny < 0 || nx >= w || ny >= h {
                        outside
                    } else {
                        map.get(nx as u32, ny as u32)
                    };
                    any |= v;
                    all &= v;
                }
            }
            out.set(x as u32, y as u32, pick(any, all));
        }
    }
    out
}
