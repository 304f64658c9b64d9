//! Text token masks and the stratum overlay image.
//!
//! Both mask files start with a `rows,cols` line followed by one line of
//! `cols` characters per token row. A partition mask uses `F` (foreground)
//! and `B` (background); a selection mask uses `F`, `B` and `U` for the
//! stratum that kept a token and `.` for a pruned one.

use crate::error::{Error, Result};
use crate::types::{PartitionMask, PruneSelection, Stratum, TokenGrid};
use crate::vision::RasterImage;

/// Overlay palette: foreground red, background green, uniform blue.
pub const STRATUM_COLORS: [(Stratum, [u8; 3]); 3] = [
    (Stratum::Foreground, [255, 0, 0]),
    (Stratum::Background, [0, 255, 0]),
    (Stratum::Uniform, [0, 0, 255]),
];

fn render(grid: &TokenGrid, cell: impl Fn(usize) -> char) -> String {
    let mut out = format!("{},{}\n", grid.rows, grid.cols);
    for r in 0..grid.rows {
        out.extend((0..grid.cols).map(|c| cell(r * grid.cols + c)));
        out.push('\n');
    }
    out
}

pub fn format_partition_mask(mask: &PartitionMask) -> String {
    render(mask.grid(), |i| if mask.is_foreground(i) { 'F' } else { 'B' })
}

pub fn format_selection_mask(selection: &PruneSelection) -> String {
    let map = selection.stratum_map();
    render(selection.grid(), |i| map[i].map_or('.', Stratum::mask_char))
}

/// Parses mask text into `(rows, cols, cells)` with each cell checked against
/// `allowed`.
fn parse_cells(text: &str, origin: &str, allowed: &str) -> Result<(usize, usize, Vec<char>)> {
    let err = |line: usize, column: usize, message: String| Error::Parse {
        path: origin.to_string(),
        line,
        column,
        message,
    };
    let mut lines = text.lines().map(|l| l.trim_end_matches('\r'));
    let header = lines.next().unwrap_or("");
    let dims: Vec<usize> = header
        .split(',')
        .map(|f| f.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| err(1, 1, format!("expected `rows,cols`, found `{header}`")))?;
    let [rows, cols] = dims[..] else {
        return Err(err(1, 1, format!("expected `rows,cols`, found `{header}`")));
    };
    let mut cells = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let line_no = r + 2;
        let line = lines
            .next()
            .ok_or_else(|| err(line_no, 1, format!("missing row {} of {rows}", r + 1)))?;
        let chars: Vec<char> = line.chars().collect();
        if chars.len() != cols {
            return Err(err(line_no, 1, format!("expected {cols} cells, found {}", chars.len())));
        }
        if let Some(c) = chars.iter().position(|ch| !allowed.contains(*ch)) {
            return Err(err(line_no, c + 1, format!("unexpected cell `{}`", chars[c])));
        }
        cells.extend(chars);
    }
    if lines.any(|l| !l.trim().is_empty()) {
        return Err(err(rows + 2, 1, "unexpected content after the last row".into()));
    }
    Ok((rows, cols, cells))
}

fn check_dims(rows: usize, cols: usize, grid: &TokenGrid, origin: &str) -> Result<()> {
    if (rows, cols) != (grid.rows, grid.cols) {
        return Err(Error::Parse {
            path: origin.to_string(),
            line: 1,
            column: 1,
            message: format!("mask is {rows}x{cols} but the grid is {}x{}", grid.rows, grid.cols),
        });
    }
    Ok(())
}

pub fn parse_partition_mask(text: &str, origin: &str, grid: TokenGrid) -> Result<PartitionMask> {
    let (rows, cols, cells) = parse_cells(text, origin, "FB")?;
    check_dims(rows, cols, &grid, origin)?;
    PartitionMask::new(grid, cells.into_iter().map(|c| c == 'F').collect())
}

/// Rebuilds a selection; its budget is the number of retained tokens.
pub fn parse_selection_mask(text: &str, origin: &str, grid: TokenGrid) -> Result<PruneSelection> {
    let (rows, cols, cells) = parse_cells(text, origin, "FBU.")?;
    check_dims(rows, cols, &grid, origin)?;
    let pick = |want: char| -> Vec<usize> {
        cells
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| (c == want).then_some(i))
            .collect()
    };
    let (fg, bg, uni) = (pick('F'), pick('B'), pick('U'));
    PruneSelection::from_strata(grid, fg.len() + bg.len() + uni.len(), &fg, &bg, &uni)
}

/// The frame with retained token cells tinted by stratum and pruned cells
/// dimmed. Pixels outside the token grid are left as they are.
pub fn render_overlay(frame: &RasterImage, selection: &PruneSelection) -> RasterImage {
    const TINT: u32 = 115; // out of 255
    let (w, h) = frame.dims();
    let mut data = Vec::with_capacity(w as usize * h as usize * 3);
    for y in 0..h {
        for x in 0..w {
            let p = frame.pixel(x, y);
            let rgb = if p.len() == 1 { [p[0]; 3] } else { [p[0], p[1], p[2]] };
            data.extend_from_slice(&rgb);
        }
    }
    let grid = selection.grid();
    let map = selection.stratum_map();
    for (i, stratum) in map.iter().enumerate() {
        let (x0, y0, x1, y1) = grid.cell_rect(i);
        let tint = stratum.and_then(|s| STRATUM_COLORS.iter().find(|(k, _)| *k == s).map(|(_, c)| *c));
        for y in y0..y1.min(h) {
            for x in x0..x1.min(w) {
                let at = (y as usize * w as usize + x as usize) * 3;
                for ch in 0..3 {
                    let v = data[at + ch] as u32;
                    data[at + ch] = match tint {
                        Some(c) => ((v * (255 - TINT) + c[ch] as u32 * TINT + 127) / 255) as u8,
                        None => (v / 3) as u8,
                    };
                }
            }
        }
    }
    RasterImage::new(w, h, 3, data).expect("same dims")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> TokenGrid {
        TokenGrid::new(2, 3, 1, 2).unwrap()
    }

    fn selection() -> PruneSelection {
        PruneSelection::from_strata(grid(), 3, &[0], &[4], &[2]).unwrap()
    }

    #[test]
    fn selection_mask_layout() {
        assert_eq!(format_selection_mask(&selection()), "2,3\nF.U\n.B.\n");
    }

    #[test]
    fn masks_round_trip() {
        let s = selection();
        assert_eq!(parse_selection_mask(&format_selection_mask(&s), "m", grid()).unwrap(), s);
        let p = PartitionMask::new(grid(), vec![true, false, false, true, true, false]).unwrap();
        let text = format_partition_mask(&p);
        assert_eq!(text, "2,3\nFBB\nFFB\n");
        assert_eq!(parse_partition_mask(&text, "m", grid()).unwrap(), p);
    }

    #[test]
    fn malformed_masks() {
        let g = grid();
        for (text, line, column) in [
            ("2,3\nF.X\n...\n", 2, 3),
            ("2,3\nF.\n...\n", 2, 1),
            ("2,3\n...\n", 3, 1),
            ("x\n", 1, 1),
            ("3,3\n...\n...\n...\n", 1, 1),
            ("2,3\n...\n...\nU\n", 4, 1),
        ] {
            match parse_selection_mask(text, "m", g) {
                Err(Error::Parse { line: l, column: c, .. }) => assert_eq!((l, c), (line, column), "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(parse_partition_mask("2,3\nFBU\nFFF\n", "m", g).is_err());
    }

    #[test]
    fn overlay_colours_cells_by_stratum() {
        let frame = RasterImage::filled(6, 4, 1, 200).unwrap();
        let out = render_overlay(&frame, &selection());
        // Cell 0 red-tinted, cell 1 pruned and dimmed, cell 2 blue, cell 4 green.
        let px = |x, y| out.pixel(x, y).to_vec();
        assert!(px(0, 0)[0] > px(0, 0)[1] && px(0, 0)[0] > px(0, 0)[2]);
        assert_eq!(px(2, 0), vec![66, 66, 66]);
        assert!(px(5, 1)[2] > px(5, 1)[0]);
        assert!(px(3, 3)[1] > px(3, 3)[0]);
    }

    #[test]
    fn overlay_ignores_pixels_past_the_grid() {
        let frame = RasterImage::filled(7, 5, 3, 90).unwrap();
        let out = render_overlay(&frame, &selection());
        assert_eq!(out.pixel(6, 4), &[90, 90, 90]);
    }
}
