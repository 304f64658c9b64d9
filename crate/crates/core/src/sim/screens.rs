//! Seeded synthetic GUI screenshots with planted widgets and their
//! ground-truth foreground cells.
//!
//! Every planted boundary sits at least a quarter cell inside a token cell,
//! so the band of edge pixels around it never leaks into a neighbouring cell.

use super::rng::FixtureRng;
use crate::error::Result;
use crate::types::{CompressionConfig, PartitionMask, TokenGrid};
use crate::vision::RasterImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlantedKind {
    /// A filled rectangle (button, card, input field).
    Panel,
    /// A short, thin dark bar standing in for a word of text.
    Stroke,
}

/// A planted element in pixel coordinates (exclusive upper bounds) and the
/// token cells its outline passes through.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedElement {
    pub kind: PlantedKind,
    pub x0: u32,
    pub y0: u32,
    pub x1: u32,
    pub y1: u32,
    pub color: [u8; 3],
    pub cells: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SyntheticScreen {
    pub seed: u64,
    pub image: RasterImage,
    pub grid: TokenGrid,
    pub elements: Vec<PlantedElement>,
    /// Foreground cells implied by the planted elements.
    pub truth: PartitionMask,
}

fn luma(c: [u8; 3]) -> f64 {
    0.299 * c[0] as f64 + 0.587 * c[1] as f64 + 0.114 * c[2] as f64
}

/// A `rows × cols`-token screenshot with a light background, a handful of
/// panels and some text-like strokes.
pub fn synth_screen(rows: usize, cols: usize, config: &CompressionConfig, seed: u64) -> Result<SyntheticScreen> {
    let grid = TokenGrid::new(rows, cols, config.patch_px, config.merge_factor)?;
    let cell = grid.cell_px();
    let margin = (cell / 4).max(1);
    let mut rng = FixtureRng::new(seed);

    let bg_level = rng.range(225, 250) as u8;
    let background = [bg_level, bg_level, (bg_level as u64 + rng.range(0, 5)).min(255) as u8];
    let mut used = vec![false; rows * cols];
    let mut elements = Vec::new();

    // Reserves the cell block plus a one-cell ring; false when anything in
    // the ring is already taken.
    let mut reserve = |r0: usize, r1: usize, c0: usize, c1: usize| -> bool {
        let rr = r0.saturating_sub(1)..=(r1 + 1).min(rows - 1);
        let cc = c0.saturating_sub(1)..=(c1 + 1).min(cols - 1);
        if rr.clone().any(|r| cc.clone().any(|c| used[r * cols + c])) {
            return false;
        }
        for r in r0..=r1 {
            for c in c0..=c1 {
                used[r * cols + c] = true;
            }
        }
        true
    };
    let offset = |rng: &mut FixtureRng| rng.range(margin as u64, (cell - margin) as u64) as u32;

    let panels = rng.range(3, 7);
    let strokes = rng.range(4, 10);
    for attempt in 0..(panels + strokes) * 8 {
        let want_panel = elements.iter().filter(|e: &&PlantedElement| e.kind == PlantedKind::Panel).count()
            < panels as usize;
        let want_stroke = elements.iter().filter(|e: &&PlantedElement| e.kind == PlantedKind::Stroke).count()
            < strokes as usize;
        if !want_panel && !want_stroke {
            break;
        }
        let panel = want_panel && (!want_stroke || attempt % 2 == 0);
        if panel {
            if rows < 2 || cols < 2 {
                continue;
            }
            let h = rng.range(1, 4.min(rows as u64 - 1)) as usize;
            let w = rng.range(1, 5.min(cols as u64 - 1)) as usize;
            let r0 = rng.below((rows - h) as u64) as usize;
            let c0 = rng.below((cols - w) as u64) as usize;
            let (r1, c1) = (r0 + h, c0 + w);
            if !reserve(r0, r1, c0, c1) {
                continue;
            }
            let color = loop {
                let c = [rng.range(0, 255) as u8, rng.range(0, 255) as u8, rng.range(0, 255) as u8];
                if (luma(c) - luma(background)).abs() >= 80.0 {
                    break c;
                }
            };
            let x0 = c0 as u32 * cell + offset(&mut rng);
            let x1 = c1 as u32 * cell + offset(&mut rng);
            let y0 = r0 as u32 * cell + offset(&mut rng);
            let y1 = r1 as u32 * cell + offset(&mut rng);
            let mut cells = Vec::new();
            for r in r0..=r1 {
                for c in c0..=c1 {
                    if r == r0 || r == r1 || c == c0 || c == c1 {
                        cells.push(r * cols + c);
                    }
                }
            }
            elements.push(PlantedElement {
                kind: PlantedKind::Panel,
                x0,
                y0,
                x1,
                y1,
                color,
                cells,
            });
        } else {
            let w = rng.range(0, 2.min(cols as u64 - 1)) as usize;
            let r = rng.below(rows as u64) as usize;
            let c0 = rng.below((cols - w) as u64) as usize;
            let c1 = c0 + w;
            if !reserve(r, r, c0, c1) {
                continue;
            }
            let level = rng.range(20, 70) as u8;
            let thickness = 3;
            let y0 = r as u32 * cell + rng.range(margin as u64, (cell - margin - thickness) as u64) as u32;
            let mut x0 = c0 as u32 * cell + offset(&mut rng);
            let mut x1 = c1 as u32 * cell + offset(&mut rng);
            if x1 < x0 + 6 {
                // Same-cell stroke too short to read as text; widen inside the cell.
                x0 = c0 as u32 * cell + margin;
                x1 = c0 as u32 * cell + cell - margin;
            }
            elements.push(PlantedElement {
                kind: PlantedKind::Stroke,
                x0,
                y0,
                x1,
                y1: y0 + thickness,
                color: [level, level, level],
                cells: (c0..=c1).map(|c| r * cols + c).collect(),
            });
        }
    }

    let (width, height) = grid.covered_px();
    let mut data = Vec::with_capacity(width as usize * height as usize * 3);
    for y in 0..height {
        for x in 0..width {
            let px = elements
                .iter()
                .find(|e| x >= e.x0 && x < e.x1 && y >= e.y0 && y < e.y1)
                .map_or(background, |e| e.color);
            data.extend_from_slice(&px);
        }
    }
    let image = RasterImage::new(width, height, 3, data)?;

    let mut truth = vec![false; rows * cols];
    for e in &elements {
        for &i in &e.cells {
            truth[i] = true;
        }
    }
    let truth = PartitionMask::new(grid, truth)?;
    Ok(SyntheticScreen {
        seed,
        image,
        grid,
        elements,
        truth,
    })
}

/// A screen of one flat colour; its truth mask is all background.
pub fn flat_screen(rows: usize, cols: usize, config: &CompressionConfig, level: u8) -> Result<SyntheticScreen> {
    let grid = TokenGrid::new(rows, cols, config.patch_px, config.merge_factor)?;
    let (w, h) = grid.covered_px();
    Ok(SyntheticScreen {
        seed: 0,
        image: RasterImage::filled(w, h, 3, level)?,
        grid,
        elements: Vec::new(),
        truth: PartitionMask::all_background(grid),
    })
}

/// Intersection over union of two foreground sets; 1 when both are empty.
pub fn foreground_iou(a: &PartitionMask, b: &PartitionMask) -> f64 {
    let (mut inter, mut union) = (0usize, 0usize);
    for (&x, &y) in a.flags().iter().zip(b.flags()) {
        inter += (x && y) as usize;
        union += (x || y) as usize;
    }
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn screens_are_reproducible() {
        let c = CompressionConfig::default();
        let a = synth_screen(22, 12, &c, 5).unwrap();
        let b = synth_screen(22, 12, &c, 5).unwrap();
        assert_eq!(a.image, b.image);
        assert_eq!(a.elements, b.elements);
    }

    #[test]
    fn planted_elements_stay_inside_their_cells() {
        let c = CompressionConfig::default();
        let cell = c.cell_px();
        for seed in 0..20 {
            let s = synth_screen(22, 12, &c, seed).unwrap();
            assert!(!s.elements.is_empty());
            for e in &s.elements {
                for v in [e.x0, e.y0, e.x1, e.y1] {
                    let off = v % cell;
                    assert!(off >= cell / 4 && off <= cell - cell / 4, "seed {seed}: {e:?}");
                }
            }
        }
    }

    #[test]
    fn iou_edge_cases() {
        let g = TokenGrid::new(1, 4, 1, 1).unwrap();
        let none = PartitionMask::all_background(g);
        assert_eq!(foreground_iou(&none, &none), 1.0);
        let a = PartitionMask::new(g, vec![true, true, false, false]).unwrap();
        let b = PartitionMask::new(g, vec![true, false, true, false]).unwrap();
        assert!((foreground_iou(&a, &b) - 1.0 / 3.0).abs() < 1e-12);
    }
}
