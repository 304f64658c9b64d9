//! Synthetic attention: per-frame history mass with a recency bias, and
//! per-token saliency for a current frame.

use super::rng::FixtureRng;
use crate::types::{ImportanceMap, TokenGrid};

/// Mass ratio between consecutive lags before noise.
const LAG_DECAY: f64 = 0.35;
/// Multiplicative noise half-width; `(1 + NOISE) / (1 - NOISE) < 1 / LAG_DECAY`
/// keeps the masses strictly decreasing.
const MASS_NOISE: f64 = 0.1;

/// Attention mass on each history frame, lag 1 first. Strictly decreasing in
/// lag and normalised to 1.
pub fn synth_temporal_attention(frames: usize, seed: u64) -> Vec<f64> {
    let mut rng = FixtureRng::new(seed);
    let raw: Vec<f64> = (0..frames)
        .map(|k| LAG_DECAY.powi(k as i32) * rng.uniform(1.0 - MASS_NOISE, 1.0 + MASS_NOISE))
        .collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|m| m / total).collect()
}

/// Seeded stand-in for shallow-layer attention over a frame's tokens: a low
/// uniform floor plus a few Gaussian hotspots.
pub fn synth_token_scores(grid: &TokenGrid, seed: u64) -> ImportanceMap {
    let mut rng = FixtureRng::new(seed ^ 0x5EED_A77E_0000_0001);
    let hotspots: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            let r = rng.uniform(0.0, grid.rows as f64);
            let c = rng.uniform(0.0, grid.cols as f64);
            let radius = rng.uniform(1.0, 1.0 + grid.rows.max(grid.cols) as f64 / 4.0);
            let peak = rng.uniform(0.5, 1.0);
            (r, c, radius, peak)
        })
        .collect();
    let scores = (0..grid.token_count())
        .map(|i| {
            let p = grid.coords_of(i);
            let (r, c) = (p.row as f64 + 0.5, p.col as f64 + 0.5);
            let bumps: f64 = hotspots
                .iter()
                .map(|&(hr, hc, rad, peak)| {
                    let d2 = (r - hr).powi(2) + (c - hc).powi(2);
                    peak * (-d2 / (2.0 * rad * rad)).exp()
                })
                .sum();
            0.05 * rng.unit() + bumps
        })
        .collect();
    ImportanceMap::new(*grid, scores).expect("scores are finite and non-negative")
}
