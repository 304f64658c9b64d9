//! Temporal-adaptive resolution for history frames.
//!
//! A global history budget `⌊T · N · λ⌋` is split over the `T` history frames
//! with weights that fall linearly from 1 (most recent, lag 1) to `γ` (oldest,
//! lag `T`). Each frame is then downscaled so its token count tracks its
//! quota: tokens scale with area, so the side scale is `√(quota / N)`.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{check_ratio, floor_snapped, CompressionConfig, TokenGrid};

/// Remainders closer than this are treated as tied when rounding quotas.
const REMAINDER_QUANTUM: f64 = 1e-9;

/// `⌊frames · tokens_per_frame · λ⌋`, the token budget for the whole history.
pub fn compute_global_budget(frames: usize, tokens_per_frame: usize, lambda: f64) -> Result<usize> {
    budget_for_total(frames, frames * tokens_per_frame, lambda)
}

fn budget_for_total(frames: usize, total_tokens: usize, lambda: f64) -> Result<usize> {
    if frames == 0 {
        return Err(Error::InvalidInput("history budget needs at least one frame".into()));
    }
    if total_tokens == 0 {
        return Err(Error::InvalidInput("frames carry no tokens".into()));
    }
    check_ratio("lambda", lambda)?;
    let budget = floor_snapped(total_tokens as f64 * lambda);
    if budget < frames {
        return Err(Error::BudgetTooSmall { budget, frames });
    }
    Ok(budget)
}

/// Linear-decay weights `w_k = γ + (1 − γ)(T − k)/(T − 1)` for lags `k = 1..=T`.
///
/// A one-frame window has no slope to interpolate; its single frame is the
/// most recent one and gets weight 1.
pub fn decay_weights(frames: usize, gamma: f64) -> Result<Vec<f64>> {
    check_ratio("gamma", gamma)?;
    if frames == 0 {
        return Ok(Vec::new());
    }
    if frames == 1 {
        return Ok(vec![1.0]);
    }
    let span = (frames - 1) as f64;
    Ok((1..=frames)
        .map(|k| gamma + (1.0 - gamma) * (frames - k) as f64 / span)
        .collect())
}

/// Equal weights: the "uniform allocation" reference policy.
pub fn uniform_weights(frames: usize) -> Vec<f64> {
    vec![1.0; frames]
}

/// Real-valued shares `budget · w_k / Σ w`.
pub fn real_quotas(budget: usize, weights: &[f64]) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    weights.iter().map(|w| budget as f64 * w / total).collect()
}

/// Splits `budget` into integer quotas proportional to `weights`.
///
/// Largest-remainder rounding: every frame gets the floor of its real share,
/// and the leftover tokens go to the largest fractional parts, ties to the
/// smaller lag. Any frame left at zero then takes one token from the current
/// largest quota (ties to the larger lag), so every frame keeps at least one.
pub fn allocate_quotas(budget: usize, weights: &[f64]) -> Result<Vec<usize>> {
    check_weights(weights)?;
    if budget < weights.len() {
        return Err(Error::BudgetTooSmall {
            budget,
            frames: weights.len(),
        });
    }
    let mut quotas = largest_remainder(budget, weights);
    ensure_min_one(&mut quotas);
    Ok(quotas)
}

/// [`allocate_quotas`] with a per-frame ceiling. Frames whose share would
/// exceed their cap are pinned to it and the excess is re-apportioned among
/// the others by weight.
pub fn allocate_capped_quotas(budget: usize, weights: &[f64], caps: &[usize]) -> Result<Vec<usize>> {
    check_weights(weights)?;
    if caps.len() != weights.len() {
        return Err(Error::InvalidInput("one cap per weight required".into()));
    }
    if budget < weights.len() {
        return Err(Error::BudgetTooSmall {
            budget,
            frames: weights.len(),
        });
    }
    let capacity: usize = caps.iter().sum();
    if budget > capacity {
        return Err(Error::InvalidInput(format!(
            "budget {budget} exceeds the {capacity} tokens the frames hold"
        )));
    }

    let mut quotas = vec![0usize; weights.len()];
    let mut pinned = vec![false; weights.len()];
    let mut remaining = budget;
    loop {
        let active: Vec<usize> = (0..weights.len()).filter(|&i| !pinned[i]).collect();
        let active_weights: Vec<f64> = active.iter().map(|&i| weights[i]).collect();
        let shares = largest_remainder(remaining, &active_weights);
        let mut overflow = false;
        for (&i, &share) in active.iter().zip(&shares) {
            if share > caps[i] {
                pinned[i] = true;
                quotas[i] = caps[i];
                remaining -= caps[i];
                overflow = true;
            }
        }
        if !overflow {
            for (&i, &share) in active.iter().zip(&shares) {
                quotas[i] = share;
            }
            break;
        }
    }
    ensure_min_one(&mut quotas);
    Ok(quotas)
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidInput("no weights to allocate over".into()));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::InvalidInput(format!("weight {w} is not positive")));
    }
    Ok(())
}

fn largest_remainder(budget: usize, weights: &[f64]) -> Vec<usize> {
    if weights.is_empty() {
        return Vec::new();
    }
    let shares = real_quotas(budget, weights);
    let mut quotas: Vec<usize> = shares.iter().map(|&s| floor_snapped(s)).collect();
    let assigned: usize = quotas.iter().sum();
    let leftover = budget.saturating_sub(assigned);

    let mut order: Vec<(i64, usize)> = shares
        .iter()
        .zip(&quotas)
        .enumerate()
        .map(|(k, (&s, &q))| {
            let frac = (s - q as f64).max(0.0);
            ((frac / REMAINDER_QUANTUM).round() as i64, k)
        })
        .collect();
    order.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, k) in order.iter().take(leftover) {
        quotas[k] += 1;
    }
    quotas
}

fn ensure_min_one(quotas: &mut [usize]) {
    while let Some(empty) = quotas.iter().position(|&q| q == 0) {
        let max = *quotas.iter().max().expect("non-empty");
        let donor = quotas.iter().rposition(|&q| q == max).expect("max exists");
        debug_assert!(max > 1);
        quotas[donor] -= 1;
        quotas[empty] += 1;
    }
}

/// Side scale `√(quota / original)` for a frame holding `original` tokens.
pub fn scale_factor(quota: usize, original: usize) -> Result<f64> {
    if quota == 0 || original == 0 {
        return Err(Error::InvalidInput("quota and original token count must be positive".into()));
    }
    if quota > original {
        return Err(Error::QuotaExceedsOriginal { quota, original });
    }
    Ok((quota as f64 / original as f64).sqrt())
}

/// The schedule for one history frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct FramePlan {
    /// Temporal lag; 1 is the most recent history frame.
    pub lag: usize,
    pub original_dims: (u32, u32),
    pub original_tokens: usize,
    pub weight: f64,
    /// Uncapped real-valued share of the budget.
    pub quota_real: f64,
    pub quota: usize,
    pub scale: f64,
    /// Resize target, whole token cells on both sides.
    pub target_dims: (u32, u32),
    /// Tokens the resized frame actually produces.
    pub realized_tokens: usize,
}

/// Budget, quotas and resize targets for a history window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct HistoryBudgetPlan {
    pub budget_total: usize,
    pub frames: Vec<FramePlan>,
}

impl HistoryBudgetPlan {
    pub fn original_tokens(&self) -> usize {
        self.frames.iter().map(|f| f.original_tokens).sum()
    }

    pub fn realized_tokens(&self) -> usize {
        self.frames.iter().map(|f| f.realized_tokens).sum()
    }

    pub fn quotas(&self) -> Vec<usize> {
        self.frames.iter().map(|f| f.quota).collect()
    }
}

/// Plans the resize of every history frame. `frame_dims[k - 1]` is the
/// `(width, height)` of the frame at lag `k`.
///
/// Frames of different sizes share one budget, `⌊λ · Σ N_k⌋`; each frame's
/// quota is capped at its own token count. An empty history yields an empty
/// plan.
pub fn plan_history(frame_dims: &[(u32, u32)], config: &CompressionConfig) -> Result<HistoryBudgetPlan> {
    config.validate()?;
    if frame_dims.is_empty() {
        return Ok(HistoryBudgetPlan {
            budget_total: 0,
            frames: Vec::new(),
        });
    }
    let grids = frame_dims
        .iter()
        .map(|&(w, h)| TokenGrid::for_image(w, h, config.patch_px, config.merge_factor))
        .collect::<Result<Vec<_>>>()?;
    let originals: Vec<usize> = grids.iter().map(TokenGrid::token_count).collect();
    let budget = budget_for_total(frame_dims.len(), originals.iter().sum(), config.lambda)?;
    let weights = decay_weights(frame_dims.len(), config.gamma)?;
    let shares = real_quotas(budget, &weights);
    let quotas = allocate_capped_quotas(budget, &weights, &originals)?;

    let frames = grids
        .iter()
        .enumerate()
        .map(|(i, grid)| {
            let quota = quotas[i];
            let scale = scale_factor(quota, originals[i])?;
            let (target_dims, realized_tokens) = align_to_cells(grid, quota, scale);
            Ok(FramePlan {
                lag: i + 1,
                original_dims: frame_dims[i],
                original_tokens: originals[i],
                weight: weights[i],
                quota_real: shares[i],
                quota,
                scale,
                target_dims,
                realized_tokens,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HistoryBudgetPlan {
        budget_total: budget,
        frames,
    })
}

/// Snaps a scaled frame to whole token cells without exceeding `quota`.
///
/// Each side may round its scaled cell count down or up; of the four
/// combinations the largest one that fits the quota wins, ties going to the
/// one closest to the original aspect ratio. A full quota keeps the frame
/// untouched.
fn align_to_cells(grid: &TokenGrid, quota: usize, scale: f64) -> ((u32, u32), usize) {
    let n = grid.token_count();
    if quota >= n {
        return ((grid.image_width_px, grid.image_height_px), n);
    }
    let cell = grid.cell_px() as f64;
    let real_rows = scale * grid.image_height_px as f64 / cell;
    let real_cols = scale * grid.image_width_px as f64 / cell;
    let candidates = |real: f64, max: usize| {
        let lo = (real.floor() as usize).clamp(1, max);
        let hi = (real.ceil() as usize).clamp(1, max);
        [lo, hi]
    };
    let target_aspect = (grid.image_height_px as f64 / grid.image_width_px as f64).ln();

    let mut best: Option<(usize, f64, usize, usize)> = None;
    for r in candidates(real_rows, grid.rows) {
        for c in candidates(real_cols, grid.cols) {
            let tokens = r * c;
            if tokens > quota {
                continue;
            }
            let distortion = ((r as f64 / c as f64).ln() - target_aspect).abs();
            let better = match best {
                None => true,
                Some((bt, bd, _, _)) => tokens > bt || (tokens == bt && distortion < bd),
            };
            if better {
                best = Some((tokens, distortion, r, c));
            }
        }
    }
    // 1x1 always fits a quota of at least one.
    let (tokens, _, rows, cols) = best.unwrap_or((1, 0.0, 1, 1));
    let cell = grid.cell_px();
    ((cols as u32 * cell, rows as u32 * cell), tokens)
}
