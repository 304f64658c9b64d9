//! Reference policies for ablation-style comparisons.

use super::rng::FixtureRng;
use crate::error::{Error, Result};
use crate::ssp::{stratum_budgets, top_k};
use crate::types::{ImportanceMap, PartitionMask, PruneSelection, TokenGrid};

/// `k` tokens drawn uniformly without replacement (partial Fisher-Yates),
/// returned ascending.
pub fn random_sample_baseline(remaining: &[usize], k: usize, seed: u64) -> Result<Vec<usize>> {
    if k > remaining.len() {
        return Err(Error::KTooLarge {
            k,
            available: remaining.len(),
        });
    }
    let mut rng = FixtureRng::new(seed);
    let mut pool = remaining.to_vec();
    for i in 0..k {
        let j = i + rng.below((pool.len() - i) as u64) as usize;
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool.sort_unstable();
    Ok(pool)
}

/// Stratified pruning with the same foreground and background picks but a
/// random residual fill instead of the strided one.
pub fn prune_with_random_fill(
    grid: &TokenGrid,
    scores: &ImportanceMap,
    partition: &PartitionMask,
    mu: f64,
    rho: f64,
    seed: u64,
) -> Result<PruneSelection> {
    let n = grid.token_count();
    let budget = stratum_budgets(n, partition.foreground_count(), mu, rho)?;
    if budget.k_total == 0 {
        return Err(Error::EmptyBudget { tokens: n, mu });
    }
    let fg = top_k(&partition.foreground(), scores, budget.k_fg)?;
    let bg = top_k(&partition.background(), scores, budget.k_bg)?;
    let remaining: Vec<usize> = (0..n)
        .filter(|i| fg.binary_search(i).is_err() && bg.binary_search(i).is_err())
        .collect();
    let uni = random_sample_baseline(&remaining, budget.k_res, seed)?;
    PruneSelection::from_strata(*grid, budget.k_total, &fg, &bg, &uni)
}
