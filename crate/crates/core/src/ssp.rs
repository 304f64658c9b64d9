//! Stratified, structure-aware pruning of the current frame.
//!
//! The budget `⌊N · μ⌋` is filled in three passes: the highest-scoring
//! `⌊N_fg · μ⌋` foreground tokens, the highest-scoring `⌊N_bg · μ · ρ⌋`
//! background tokens, and an evenly strided sample of whatever is left to
//! keep a coarse skeleton of the layout.

use std::cmp::Ordering;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{check_ratio, floor_snapped, ImportanceMap, PartitionMask, PruneSelection, TokenGrid};

/// How the current-frame budget splits across strata.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct StratumBudget {
    pub k_total: usize,
    pub k_fg: usize,
    pub k_bg: usize,
    pub k_res: usize,
}

/// Per-stratum budgets for a frame of `n_total` tokens, `n_fg` of them
/// foreground.
///
/// `k_res` cannot go negative: `⌊a⌋ + ⌊b⌋ ≤ ⌊a + b⌋` and
/// `μ·n_fg + μρ·n_bg ≤ μ·n_total` for `ρ ≤ 1`.
pub fn stratum_budgets(n_total: usize, n_fg: usize, mu: f64, rho: f64) -> Result<StratumBudget> {
    check_ratio("mu", mu)?;
    check_ratio("rho", rho)?;
    if n_fg > n_total {
        return Err(Error::InvalidInput(format!(
            "{n_fg} foreground tokens out of only {n_total}"
        )));
    }
    let k_total = floor_snapped(n_total as f64 * mu);
    let k_fg = floor_snapped(n_fg as f64 * mu);
    let k_bg = floor_snapped((n_total - n_fg) as f64 * (mu * rho));
    let k_res = k_total
        .checked_sub(k_fg + k_bg)
        .expect("stratum budgets never exceed the total");
    Ok(StratumBudget {
        k_total,
        k_fg,
        k_bg,
        k_res,
    })
}

/// Orders tokens best-first: higher score, then smaller index.
fn rank(scores: &[f64], a: usize, b: usize) -> Ordering {
    scores[b].total_cmp(&scores[a]).then(a.cmp(&b))
}

/// The `k` highest-scoring of `indices`, ties going to the smaller index,
/// returned in ascending index order.
pub fn top_k(indices: &[usize], scores: &ImportanceMap, k: usize) -> Result<Vec<usize>> {
    if k > indices.len() {
        return Err(Error::KTooLarge {
            k,
            available: indices.len(),
        });
    }
    let s = scores.scores();
    if let Some(&bad) = indices.iter().find(|&&i| i >= s.len()) {
        return Err(Error::InvalidInput(format!("token {bad} is off the grid")));
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut pool = indices.to_vec();
    if k < pool.len() {
        pool.select_nth_unstable_by(k - 1, |&a, &b| rank(s, a, b));
        pool.truncate(k);
    }
    pool.sort_unstable();
    Ok(pool)
}

/// Evenly strided picks from an ascending token list: element
/// `⌊j · |remaining| / k⌋` for `j = 0..k`.
pub fn uniform_grid_sample(remaining: &[usize], k: usize) -> Result<Vec<usize>> {
    if k > remaining.len() {
        return Err(Error::KTooLarge {
            k,
            available: remaining.len(),
        });
    }
    debug_assert!(remaining.windows(2).all(|w| w[0] < w[1]));
    let n = remaining.len();
    Ok((0..k).map(|j| remaining[j * n / k]).collect())
}

/// Prunes the current frame's tokens down to `⌊N · μ⌋`.
pub fn prune(
    grid: &TokenGrid,
    scores: &ImportanceMap,
    partition: &PartitionMask,
    mu: f64,
    rho: f64,
) -> Result<PruneSelection> {
    if scores.grid() != grid || partition.grid() != grid {
        return Err(Error::InvalidInput(
            "importance map and partition must share the frame's grid".into(),
        ));
    }
    let n_total = grid.token_count();
    let foreground = partition.foreground();
    let background = partition.background();
    let budget = stratum_budgets(n_total, foreground.len(), mu, rho)?;
    if budget.k_total == 0 {
        return Err(Error::EmptyBudget { tokens: n_total, mu });
    }

    let fg = top_k(&foreground, scores, budget.k_fg)?;
    let bg = top_k(&background, scores, budget.k_bg)?;

    let mut taken = vec![false; n_total];
    for &i in fg.iter().chain(&bg) {
        taken[i] = true;
    }
    let remaining: Vec<usize> = (0..n_total).filter(|&i| !taken[i]).collect();
    let uni = uniform_grid_sample(&remaining, budget.k_res)?;

    PruneSelection::from_strata(*grid, budget.k_total, &fg, &bg, &uni)
}
