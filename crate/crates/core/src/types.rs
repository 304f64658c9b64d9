//! Shared domain types: configuration, the token-grid coordinate frame and
//! the per-token maps and selections that live on it.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when flooring products of decimal ratios, so that
/// `3 * 0.1 * 100` floors to 30 rather than 29.
const FLOOR_SNAP: f64 = 1e-9;

/// `⌊x⌋` for a non-negative product of ratios, snapping values that sit
/// within floating-point noise of an integer onto that integer.
pub(crate) fn floor_snapped(x: f64) -> usize {
    debug_assert!(x.is_finite() && x >= 0.0);
    let nearest = x.round();
    if (x - nearest).abs() <= FLOOR_SNAP * nearest.max(1.0) {
        nearest as usize
    } else {
        x.floor() as usize
    }
}

/// Low/high hysteresis thresholds for Canny on the 0-255 intensity scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CannyThresholds {
    pub lo: f64,
    pub hi: f64,
}

/// Contrast-limited adaptive histogram equalisation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ClaheParams {
    pub clip_limit: f64,
    pub tiles_x: u32,
    pub tiles_y: u32,
}

impl Default for ClaheParams {
    fn default() -> Self {
        ClaheParams {
            clip_limit: 2.0,
            tiles_x: 8,
            tiles_y: 8,
        }
    }
}

/// Inclusive bounds on a contour's bounding-box width / height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct AspectRange {
    pub lo: f64,
    pub hi: f64,
}

impl AspectRange {
    pub fn contains(&self, aspect: f64) -> bool {
        aspect >= self.lo && aspect <= self.hi
    }
}

/// Model-scale constants for the analytic FLOPs estimator.
///
/// Defaults describe a 2B-class vision-language model: a 32-layer, 1280-wide
/// vision encoder feeding a 28-layer, 1536-wide language model with 1.5B
/// parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct CostModelParams {
    pub encoder_layers: u32,
    pub encoder_hidden_dim: u32,
    pub llm_layers: u32,
    pub llm_hidden_dim: u32,
    pub llm_params: f64,
    /// Per-token dense cost coefficient (projections plus MLP), multiplies `n·d²`.
    pub dense_coeff: f64,
    /// Attention coefficient (scores plus weighted values), multiplies `n²·d`.
    pub attention_coeff: f64,
}

impl Default for CostModelParams {
    fn default() -> Self {
        CostModelParams {
            encoder_layers: 32,
            encoder_hidden_dim: 1280,
            llm_layers: 28,
            llm_hidden_dim: 1536,
            llm_params: 1.5e9,
            dense_coeff: 4.0,
            attention_coeff: 2.0,
        }
    }
}

impl CostModelParams {
    pub fn validate(&self) -> Result<()> {
        let ints = [
            ("encoder_layers", self.encoder_layers),
            ("encoder_hidden_dim", self.encoder_hidden_dim),
            ("llm_layers", self.llm_layers),
            ("llm_hidden_dim", self.llm_hidden_dim),
        ];
        for (name, v) in ints {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("cost_model.{name} must be positive")));
            }
        }
        if !(self.llm_params.is_finite() && self.llm_params > 0.0) {
            return Err(Error::InvalidConfig("cost_model.llm_params must be positive".into()));
        }
        for (name, v) in [
            ("dense_coeff", self.dense_coeff),
            ("attention_coeff", self.attention_coeff),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "cost_model.{name} must be finite and non-negative"
                )));
            }
        }
        Ok(())
    }
}

/// Every tunable of the pipeline. Missing fields in a config file take the
/// values from [`CompressionConfig::default`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct CompressionConfig {
    /// History token retention ratio, in (0, 1].
    pub lambda: f64,
    /// Weight of the oldest history frame relative to the newest, in (0, 1].
    pub gamma: f64,
    /// Current-frame token retention ratio, in (0, 1].
    pub mu: f64,
    /// Background saliency factor, in (0, 1].
    pub rho: f64,
    /// Number of history frames the episode carries.
    pub history_len: usize,
    /// Vision-transformer patch side in pixels.
    pub patch_px: u32,
    /// Spatial merge applied after patching; one token covers `(patch_px * merge_factor)²` pixels.
    pub merge_factor: u32,
    pub canny_primary: CannyThresholds,
    pub canny_secondary: CannyThresholds,
    pub gaussian_sigma: f64,
    pub clahe: ClaheParams,
    pub min_contour_area_px: u32,
    pub aspect_ratio_range: AspectRange,
    /// Language-model layer at which current-frame pruning is applied.
    /// Reported only; selection does not depend on it.
    pub pruning_layer: u32,
    pub cost_model: CostModelParams,
}

impl Default for CompressionConfig {
    fn default() -> Self {
        CompressionConfig {
            lambda: 0.1,
            gamma: 0.2,
            mu: 0.75,
            rho: 0.3,
            history_len: 4,
            patch_px: 14,
            merge_factor: 2,
            canny_primary: CannyThresholds { lo: 50.0, hi: 150.0 },
            canny_secondary: CannyThresholds { lo: 30.0, hi: 100.0 },
            gaussian_sigma: 1.0,
            clahe: ClaheParams::default(),
            min_contour_area_px: 9,
            aspect_ratio_range: AspectRange { lo: 0.05, hi: 20.0 },
            pruning_layer: 2,
            cost_model: CostModelParams::default(),
        }
    }
}

impl CompressionConfig {
    /// Side length in pixels of one token cell.
    pub fn cell_px(&self) -> u32 {
        self.patch_px * self.merge_factor
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lambda", self.lambda),
            ("gamma", self.gamma),
            ("mu", self.mu),
            ("rho", self.rho),
        ] {
            check_ratio(name, v)?;
        }
        if self.history_len == 0 {
            return Err(Error::InvalidConfig("history_len must be at least 1".into()));
        }
        if self.patch_px == 0 {
            return Err(Error::InvalidConfig("patch_px must be at least 1".into()));
        }
        if self.merge_factor == 0 {
            return Err(Error::InvalidConfig("merge_factor must be at least 1".into()));
        }
        for (name, t) in [
            ("canny_primary", self.canny_primary),
            ("canny_secondary", self.canny_secondary),
        ] {
            if !(t.lo.is_finite() && t.hi.is_finite() && t.lo >= 0.0 && t.lo < t.hi) {
                return Err(Error::InvalidConfig(format!(
                    "{name} needs 0 <= lo < hi, got lo={} hi={}",
                    t.lo, t.hi
                )));
            }
        }
        if !(self.gaussian_sigma.is_finite() && self.gaussian_sigma > 0.0) {
            return Err(Error::InvalidConfig("gaussian_sigma must be positive".into()));
        }
        if !(self.clahe.clip_limit.is_finite() && self.clahe.clip_limit > 0.0) {
            return Err(Error::InvalidConfig("clahe.clip_limit must be positive".into()));
        }
        if self.clahe.tiles_x == 0 || self.clahe.tiles_y == 0 {
            return Err(Error::InvalidConfig("clahe tile counts must be positive".into()));
        }
        let a = self.aspect_ratio_range;
        if !(a.lo.is_finite() && a.hi.is_finite() && a.lo > 0.0 && a.lo <= a.hi) {
            return Err(Error::InvalidConfig(format!(
                "aspect_ratio_range needs 0 < lo <= hi, got ({}, {})",
                a.lo, a.hi
            )));
        }
        self.cost_model.validate()
    }
}

pub(crate) fn check_ratio(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} must lie in (0, 1], got {v}")))
    }
}

/// Row/column position of a token on its grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TokenCoord {
    pub row: usize,
    pub col: usize,
}

/// A rows × cols lattice of token cells laid over an image.
///
/// Token `i` sits at `(i / cols, i % cols)`. Each cell covers a square of
/// `patch_px * merge_factor` pixels; image pixels beyond the last whole cell
/// are not covered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct TokenGrid {
    pub rows: usize,
    pub cols: usize,
    pub patch_px: u32,
    pub merge_factor: u32,
    pub image_width_px: u32,
    pub image_height_px: u32,
}

impl TokenGrid {
    /// Grid for an image of the given size, truncating partial cells.
    pub fn for_image(width_px: u32, height_px: u32, patch_px: u32, merge_factor: u32) -> Result<Self> {
        if patch_px == 0 || merge_factor == 0 {
            return Err(Error::InvalidConfig("patch_px and merge_factor must be positive".into()));
        }
        let cell = patch_px * merge_factor;
        let rows = (height_px / cell) as usize;
        let cols = (width_px / cell) as usize;
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(format!(
                "image {width_px}x{height_px} is smaller than one {cell}x{cell} token cell"
            )));
        }
        Ok(TokenGrid {
            rows,
            cols,
            patch_px,
            merge_factor,
            image_width_px: width_px,
            image_height_px: height_px,
        })
    }

    /// Grid with exactly `rows × cols` cells over a tightly fitting image.
    pub fn new(rows: usize, cols: usize, patch_px: u32, merge_factor: u32) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput("grid needs at least one row and one column".into()));
        }
        let cell = patch_px * merge_factor;
        Self::for_image(cols as u32 * cell, rows as u32 * cell, patch_px, merge_factor)
    }

    pub fn token_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn cell_px(&self) -> u32 {
        self.patch_px * self.merge_factor
    }

    /// Pixel extent actually covered by whole cells.
    pub fn covered_px(&self) -> (u32, u32) {
        let cell = self.cell_px();
        (self.cols as u32 * cell, self.rows as u32 * cell)
    }

    pub fn coords_of(&self, index: usize) -> TokenCoord {
        debug_assert!(index < self.token_count());
        TokenCoord {
            row: index / self.cols,
            col: index % self.cols,
        }
    }

    pub fn index_of(&self, coord: TokenCoord) -> usize {
        debug_assert!(coord.row < self.rows && coord.col < self.cols);
        coord.row * self.cols + coord.col
    }

    /// Pixel rectangle `(x0, y0, x1, y1)` (exclusive upper bounds) of a token cell.
    pub fn cell_rect(&self, index: usize) -> (u32, u32, u32, u32) {
        let c = self.coords_of(index);
        let cell = self.cell_px();
        let x0 = c.col as u32 * cell;
        let y0 = c.row as u32 * cell;
        (x0, y0, x0 + cell, y0 + cell)
    }
}

/// Number of tokens a grid contributes.
pub fn token_count(grid: &TokenGrid) -> usize {
    grid.token_count()
}

/// Per-token saliency, aligned to a grid in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceMap {
    grid: TokenGrid,
    scores: Vec<f64>,
}

impl ImportanceMap {
    pub fn new(grid: TokenGrid, scores: Vec<f64>) -> Result<Self> {
        if scores.len() != grid.token_count() {
            return Err(Error::InvalidInput(format!(
                "importance map has {} scores for a {}x{} grid",
                scores.len(),
                grid.rows,
                grid.cols
            )));
        }
        if let Some(i) = scores.iter().position(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::InvalidInput(format!(
                "importance score {} at token {i} is not a finite non-negative number",
                scores[i]
            )));
        }
        Ok(ImportanceMap { grid, scores })
    }

    pub fn grid(&self) -> &TokenGrid {
        &self.grid
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn score(&self, index: usize) -> f64 {
        self.scores[index]
    }
}

/// Foreground/background split of a grid's tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionMask {
    grid: TokenGrid,
    is_foreground: Vec<bool>,
}

impl PartitionMask {
    pub fn new(grid: TokenGrid, is_foreground: Vec<bool>) -> Result<Self> {
        if is_foreground.len() != grid.token_count() {
            return Err(Error::InvalidInput(format!(
                "partition mask has {} entries for a {}x{} grid",
                is_foreground.len(),
                grid.rows,
                grid.cols
            )));
        }
        Ok(PartitionMask { grid, is_foreground })
    }

    pub fn all_background(grid: TokenGrid) -> Self {
        PartitionMask {
            is_foreground: vec![false; grid.token_count()],
            grid,
        }
    }

    pub fn grid(&self) -> &TokenGrid {
        &self.grid
    }

    pub fn is_foreground(&self, index: usize) -> bool {
        self.is_foreground[index]
    }

    pub fn flags(&self) -> &[bool] {
        &self.is_foreground
    }

    pub fn foreground_count(&self) -> usize {
        self.is_foreground.iter().filter(|&&f| f).count()
    }

    /// Foreground token indices, ascending.
    pub fn foreground(&self) -> Vec<usize> {
        self.indices_where(true)
    }

    /// Background token indices, ascending.
    pub fn background(&self) -> Vec<usize> {
        self.indices_where(false)
    }

    fn indices_where(&self, fg: bool) -> Vec<usize> {
        self.is_foreground
            .iter()
            .enumerate()
            .filter_map(|(i, &f)| (f == fg).then_some(i))
            .collect()
    }
}

/// Which retention stage kept a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema)]
pub enum Stratum {
    #[serde(rename = "FG")]
    Foreground,
    #[serde(rename = "BG")]
    Background,
    #[serde(rename = "UNI")]
    Uniform,
}

impl Stratum {
    pub fn mask_char(self) -> char {
        match self {
            Stratum::Foreground => 'F',
            Stratum::Background => 'B',
            Stratum::Uniform => 'U',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct RetainedToken {
    pub index: usize,
    pub stratum: Stratum,
}

/// The tokens kept from one frame, each labelled with its stratum, sorted by
/// row-major index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruneSelection {
    grid: TokenGrid,
    retained: Vec<RetainedToken>,
    budget_total: usize,
}

impl PruneSelection {
    /// Builds a selection from per-stratum index sets. Fails if the sets
    /// overlap, reference tokens off the grid, or do not add up to the budget.
    pub fn from_strata(
        grid: TokenGrid,
        budget_total: usize,
        foreground: &[usize],
        background: &[usize],
        uniform: &[usize],
    ) -> Result<Self> {
        let mut retained: Vec<RetainedToken> = Vec::with_capacity(budget_total);
        for (set, stratum) in [
            (foreground, Stratum::Foreground),
            (background, Stratum::Background),
            (uniform, Stratum::Uniform),
        ] {
            retained.extend(set.iter().map(|&index| RetainedToken { index, stratum }));
        }
        retained.sort_unstable_by_key(|t| t.index);
        if let Some(t) = retained.last() {
            if t.index >= grid.token_count() {
                return Err(Error::InvalidInput(format!("token {} is off the grid", t.index)));
            }
        }
        if let Some(w) = retained.windows(2).find(|w| w[0].index == w[1].index) {
            return Err(Error::InvalidInput(format!(
                "token {} retained by more than one stratum",
                w[0].index
            )));
        }
        if retained.len() != budget_total {
            return Err(Error::InvalidInput(format!(
                "selection holds {} tokens but the budget is {budget_total}",
                retained.len()
            )));
        }
        Ok(PruneSelection {
            grid,
            retained,
            budget_total,
        })
    }

    /// A selection keeping every token of a frame, labelled by partition.
    pub fn keep_all(partition: &PartitionMask) -> Self {
        let retained = partition
            .flags()
            .iter()
            .enumerate()
            .map(|(index, &fg)| RetainedToken {
                index,
                stratum: if fg { Stratum::Foreground } else { Stratum::Background },
            })
            .collect::<Vec<_>>();
        PruneSelection {
            grid: *partition.grid(),
            budget_total: retained.len(),
            retained,
        }
    }

    pub fn grid(&self) -> &TokenGrid {
        &self.grid
    }

    pub fn retained(&self) -> &[RetainedToken] {
        &self.retained
    }

    pub fn budget_total(&self) -> usize {
        self.budget_total
    }

    pub fn len(&self) -> usize {
        self.retained.len()
    }

    pub fn is_empty(&self) -> bool {
        self.retained.is_empty()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.retained.iter().map(|t| t.index).collect()
    }

    pub fn indices_in(&self, stratum: Stratum) -> Vec<usize> {
        self.retained
            .iter()
            .filter(|t| t.stratum == stratum)
            .map(|t| t.index)
            .collect()
    }

    pub fn count_in(&self, stratum: Stratum) -> usize {
        self.retained.iter().filter(|t| t.stratum == stratum).count()
    }

    /// Stratum of every grid token, `None` for pruned ones.
    pub fn stratum_map(&self) -> Vec<Option<Stratum>> {
        let mut map = vec![None; self.grid.token_count()];
        for t in &self.retained {
            map[t.index] = Some(t.stratum);
        }
        map
    }
}
