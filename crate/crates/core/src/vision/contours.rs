//! Connected-component filtering of edge maps.

use super::raster::BinaryMap;
use crate::types::AspectRange;

/// An 8-connected group of set pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub pixels: Vec<(u32, u32)>,
    pub min_x: u32,
    pub min_y: u32,
    pub max_x: u32,
    pub max_y: u32,
}

impl Component {
    pub fn bbox_width(&self) -> u32 {
        self.max_x - self.min_x + 1
    }

    pub fn bbox_height(&self) -> u32 {
        self.max_y - self.min_y + 1
    }

    pub fn bbox_area(&self) -> u64 {
        self.bbox_width() as u64 * self.bbox_height() as u64
    }

    /// Bounding-box width over height.
    pub fn aspect(&self) -> f64 {
        self.bbox_width() as f64 / self.bbox_height() as f64
    }
}

/// 8-connected components in scan order of their first pixel.
pub fn label_components(map: &BinaryMap) -> Vec<Component> {
    let (w, h) = (map.width(), map.height());
    let mut seen = vec![false; w as usize * h as usize];
    let mut components = Vec::new();
    let mut stack = Vec::new();
    for sy in 0..h {
        for sx in 0..w {
            let si = (sy * w + sx) as usize;
            if seen[si] || !map.get(sx, sy) {
                continue;
            }
            seen[si] = true;
            stack.push((sx, sy));
            let mut c = Component {
                pixels: Vec::new(),
                min_x: sx,
                min_y: sy,
                max_x: sx,
                max_y: sy,
            };
            while let Some((x, y)) = stack.pop() {
                c.pixels.push((x, y));
                c.min_x = c.min_x.min(x);
                c.max_x = c.max_x.max(x);
                c.min_y = c.min_y.min(y);
                c.max_y = c.max_y.max(y);
                for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
                    for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                        let ni = (ny * w + nx) as usize;
                        if !seen[ni] && map.get(nx, ny) {
                            seen[ni] = true;
                            stack.push((nx, ny));
                        }
                    }
                }
            }
            components.push(c);
        }
    }
    components
}

/// Drops components whose bounding box is smaller than `min_area_px` or whose
/// aspect ratio falls outside `aspect`. The survivors' own pixels form the
/// occupancy map; hollow outlines stay hollow.
pub fn filter_contours(edges: &BinaryMap, min_area_px: u32, aspect: AspectRange) -> BinaryMap {
    let mut out = BinaryMap::new(edges.width(), edges.height());
    for c in label_components(edges) {
        if c.bbox_area() < min_area_px as u64 || !aspect.contains(c.aspect()) {
            continue;
        }
        for &(x, y) in &c.pixels {
            out.set(x, y, true);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const RANGE: AspectRange = AspectRange { lo: 0.05, hi: 20.0 };

    fn fill(map: &mut BinaryMap, x0: u32, y0: u32, w: u32, h: u32) {
        for y in y0..y0 + h {
            for x in x0..x0 + w {
                map.set(x, y, true);
            }
        }
    }

    #[test]
    fn empty_map_stays_empty() {
        let map = BinaryMap::new(10, 10);
        assert!(filter_contours(&map, 9, RANGE).is_empty());
    }

    #[test]
    fn specks_are_removed() {
        let mut map = BinaryMap::new(10, 10);
        map.set(3, 3, true);
        map.set(4, 3, true);
        assert!(filter_contours(&map, 9, RANGE).is_empty());
    }

    #[test]
    fn hairline_falls_outside_aspect_range() {
        let mut map = BinaryMap::new(60, 60);
        fill(&mut map, 2, 2, 5, 5);
        fill(&mut map, 30, 10, 1, 40);
        let comps = label_components(&map);
        assert_eq!(comps.len(), 2);
        assert!((comps[1].aspect() - 1.0 / 40.0).abs() < 1e-12);

        let mut block = BinaryMap::new(60, 60);
        fill(&mut block, 2, 2, 5, 5);
        assert_eq!(filter_contours(&map, 9, RANGE), block);
    }

    #[test]
    fn diagonal_pixels_are_one_component() {
        let mut map = BinaryMap::new(5, 5);
        for i in 0..5 {
            map.set(i, i, true);
        }
        let comps = label_components(&map);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].bbox_area(), 25);
    }

    #[test]
    fn hollow_outline_is_not_filled() {
        let mut map = BinaryMap::new(20, 20);
        for i in 2..18 {
            map.set(i, 2, true);
            map.set(i, 17, true);
            map.set(2, i, true);
            map.set(17, i, true);
        }
        let out = filter_contours(&map, 9, RANGE);
        assert_eq!(out, map);
        assert!(!out.get(10, 10));
    }
}
