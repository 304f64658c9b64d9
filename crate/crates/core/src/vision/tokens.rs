use super::raster::BinaryMap;
use crate::error::{Error, Result};
use crate::types::{PartitionMask, TokenGrid};

/// Max-pools an occupancy map onto the token grid: a token is foreground when
/// any pixel of its cell is set.
pub fn downsample_to_tokens(occupancy: &BinaryMap, grid: &TokenGrid) -> Result<PartitionMask> {
    let (gw, gh) = grid.covered_px();
    if occupancy.width() < gw || occupancy.height() < gh {
        return Err(Error::GridMismatch {
            map_width: occupancy.width(),
            map_height: occupancy.height(),
            grid_width: gw,
            grid_height: gh,
        });
    }
    let fg = (0..grid.token_count())
        .map(|i| {
            let (x0, y0, x1, y1) = grid.cell_rect(i);
            (y0..y1).any(|y| (x0..x1).any(|x| occupancy.get(x, y)))
        })
        .collect();
    PartitionMask::new(*grid, fg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_map_is_all_background() {
        let grid = TokenGrid::new(3, 4, 14, 2).unwrap();
        let mask = downsample_to_tokens(&BinaryMap::new(112, 84), &grid).unwrap();
        assert_eq!(mask.foreground_count(), 0);
    }

    #[test]
    fn single_pixel_lights_one_token() {
        let grid = TokenGrid::new(3, 4, 14, 2).unwrap();
        let mut map = BinaryMap::new(112, 84);
        map.set(0, 0, true);
        let mask = downsample_to_tokens(&map, &grid).unwrap();
        assert_eq!(mask.foreground(), vec![0]);
    }

    #[test]
    fn undersized_map_is_rejected() {
        let grid = TokenGrid::new(3, 4, 14, 2).unwrap();
        let r = downsample_to_tokens(&BinaryMap::new(111, 84), &grid);
        assert!(matches!(r, Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn pixels_past_the_last_cell_are_ignored() {
        let grid = TokenGrid::for_image(60, 60, 14, 2).unwrap();
        let mut map = BinaryMap::new(60, 60);
        map.set(59, 59, true);
        assert_eq!(downsample_to_tokens(&map, &grid).unwrap().foreground_count(), 0);
    }

    #[test]
    fn rectangle_outline_hits_the_cells_it_crosses() {
        // Outline of pixel rows 40..=80, cols 40..=120 on 28 px cells.
        let grid = TokenGrid::new(5, 6, 14, 2).unwrap();
        let mut map = BinaryMap::new(168, 140);
        for x in 40..=120 {
            map.set(x, 40, true);
            map.set(x, 80, true);
        }
        for y in 40..=80 {
            map.set(40, y, true);
            map.set(120, y, true);
        }
        let mask = downsample_to_tokens(&map, &grid).unwrap();
        // Oracle: a cell is hit when its pixel square intersects the outline.
        let mut expect = Vec::new();
        for i in 0..grid.token_count() {
            let (x0, y0, x1, y1) = grid.cell_rect(i);
            let hit = (y0..y1).any(|y| (x0..x1).any(|x| map.get(x, y)));
            if hit {
                expect.push(i);
            }
        }
        assert_eq!(mask.foreground(), expect);
        // rows 1..=2, cols 1..=4 are crossed; the outline avoids no interior cell here
        let rc: Vec<(usize, usize)> = expect.iter().map(|&i| (i / 6, i % 6)).collect();
        assert!(rc.iter().all(|&(r, c)| (1..=2).contains(&r) && (1..=4).contains(&c)));
        assert_eq!(rc.len(), 8);
    }
}
