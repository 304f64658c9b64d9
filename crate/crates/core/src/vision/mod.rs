//! Image-space operations: bilinear resizing for history frames and the edge
//! pipeline that splits a screenshot's tokens into foreground and background.

mod contours;
mod edges;
mod preprocess;
mod raster;
mod resize;
mod tokens;

pub use contours::{filter_contours, label_components, Component};
pub use edges::{canny, close_3x3, extract_edges};
pub use preprocess::{clahe, gaussian_blur_5x5, preprocess_gray, to_gray};
pub use raster::{BinaryMap, RasterImage};
pub use resize::resize_bilinear;
pub use tokens::downsample_to_tokens;

use crate::error::Result;
use crate::types::{CompressionConfig, PartitionMask, TokenGrid};

/// Structural occupancy map of a screenshot: preprocessing, dual-threshold
/// edges and contour filtering.
pub fn occupancy_map(img: &RasterImage, config: &CompressionConfig) -> BinaryMap {
    let gray = preprocess_gray(img, config);
    let edges = extract_edges(&gray, config);
    filter_contours(&edges, config.min_contour_area_px, config.aspect_ratio_range)
}

/// Token grid of a screenshot under `config`'s patch geometry.
pub fn grid_for(img: &RasterImage, config: &CompressionConfig) -> Result<TokenGrid> {
    TokenGrid::for_image(img.width(), img.height(), config.patch_px, config.merge_factor)
}

/// Foreground/background partition of a screenshot's tokens.
pub fn partition_frame(img: &RasterImage, config: &CompressionConfig) -> Result<PartitionMask> {
    config.validate()?;
    let grid = grid_for(img, config)?;
    downsample_to_tokens(&occupancy_map(img, config), &grid)
}
