//! Reference implementations used to cross-check the production paths.
//!
//! These share no selection or rounding code with `tar` and `ssp`: budgets
//! are floored in exact rational arithmetic (ratios are read as the decimal
//! numbers they print as) and TopK is a full sort.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::types::{ImportanceMap, PartitionMask, PruneSelection, TokenGrid};

/// The exact decimal value `x` prints as, e.g. `0.29` rather than the
/// binary `0.28999999999999998`.
pub fn decimal_ratio(x: f64) -> BigRational {
    assert!(x.is_finite(), "non-finite ratio {x}");
    let text = format!("{x}");
    let (neg, digits) = text.strip_prefix('-').map_or((false, text.as_str()), |t| (true, t));
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    let numer: BigInt = format!("{int_part}{frac_part}").parse().expect("decimal digits");
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    let r = BigRational::new(numer, denom);
    if neg {
        -r
    } else {
        r
    }
}

fn floor_usize(r: &BigRational) -> usize {
    r.floor().to_integer().to_usize().expect("non-negative floor")
}

/// Linear-decay weights in exact arithmetic, `γ` read as a decimal.
pub fn oracle_decay_weights(frames: usize, gamma: f64) -> Vec<BigRational> {
    let g = decimal_ratio(gamma);
    if frames == 1 {
        return vec![BigRational::from_integer(1.into())];
    }
    let one = BigRational::from_integer(1.into());
    let span = BigRational::from_integer(BigInt::from(frames - 1));
    (1..=frames)
        .map(|k| &g + (&one - &g) * BigRational::from_integer(BigInt::from(frames - k)) / &span)
        .collect()
}

/// `⌊frames · tokens · λ⌋` with `λ` read as a decimal.
pub fn oracle_budget(frames: usize, tokens_per_frame: usize, lambda: f64) -> usize {
    floor_usize(&(BigRational::from_integer(BigInt::from(frames * tokens_per_frame)) * decimal_ratio(lambda)))
}

/// Largest-remainder quotas over exact rational shares: floors first, then
/// one extra token per largest remainder (ties to the smaller lag); frames
/// left at zero take one token from the largest quota (ties to the larger lag).
pub fn oracle_quota(budget: usize, weights: &[BigRational]) -> Vec<usize> {
    let mut quotas = exact_largest_remainder(budget, weights);
    give_every_frame_one(&mut quotas);
    quotas
}

/// [`oracle_quota`] with per-frame ceilings. Any frame whose rounded share
/// tops its cap is fixed at the cap, and the rest of the budget is shared
/// again among the remaining frames, until no share overflows.
pub fn oracle_capped_quota(budget: usize, weights: &[BigRational], caps: &[usize]) -> Vec<usize> {
    let mut quotas = vec![0usize; weights.len()];
    let mut fixed = vec![false; weights.len()];
    let mut left = budget;
    loop {
        let free: Vec<usize> = (0..weights.len()).filter(|&k| !fixed[k]).collect();
        let free_weights: Vec<BigRational> = free.iter().map(|&k| weights[k].clone()).collect();
        let shares = exact_largest_remainder(left, &free_weights);
        let over: Vec<usize> = free
            .iter()
            .zip(&shares)
            .filter(|(&k, &q)| q > caps[k])
            .map(|(&k, _)| k)
            .collect();
        if over.is_empty() {
            for (&k, &q) in free.iter().zip(&shares) {
                quotas[k] = q;
            }
            break;
        }
        for k in over {
            fixed[k] = true;
            quotas[k] = caps[k];
            left -= caps[k];
        }
    }
    give_every_frame_one(&mut quotas);
    quotas
}

fn exact_largest_remainder(budget: usize, weights: &[BigRational]) -> Vec<usize> {
    if weights.is_empty() {
        return Vec::new();
    }
    let total = weights.iter().fold(BigRational::zero(), |acc, w| acc + w);
    let b = BigRational::from_integer(BigInt::from(budget));
    let shares: Vec<BigRational> = weights.iter().map(|w| &b * w / &total).collect();
    let mut quotas: Vec<usize> = shares.iter().map(floor_usize).collect();
    let mut order: Vec<(BigRational, usize)> = shares
        .iter()
        .zip(&quotas)
        .enumerate()
        .map(|(k, (s, &q))| (s - BigRational::from_integer(BigInt::from(q)), k))
        .collect();
    order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let leftover = budget - quotas.iter().sum::<usize>();
    for (_, k) in order.into_iter().take(leftover) {
        quotas[k] += 1;
    }
    quotas
}

fn give_every_frame_one(quotas: &mut [usize]) {
    for k in 0..quotas.len() {
        while quotas[k] == 0 {
            let mut donor = 0;
            for j in 0..quotas.len() {
                if quotas[j] >= quotas[donor] {
                    donor = j;
                }
            }
            quotas[donor] -= 1;
            quotas[k] += 1;
        }
    }
}

/// Literal transcription of stratified pruning: partition, exact budgets,
/// sorted TopK per stratum, strided fill of the rest.
pub fn oracle_prune(
    grid: &TokenGrid,
    scores: &ImportanceMap,
    partition: &PartitionMask,
    mu: f64,
    rho: f64,
) -> Result<PruneSelection> {
    let n = grid.token_count();
    let mu_q = decimal_ratio(mu);
    let mu_rho = &mu_q * decimal_ratio(rho);
    let count = |x: usize| BigRational::from_integer(BigInt::from(x));

    let mut fg_set = Vec::new();
    let mut bg_set = Vec::new();
    for i in 0..n {
        if partition.is_foreground(i) {
            fg_set.push(i);
        } else {
            bg_set.push(i);
        }
    }

    let k_total = floor_usize(&(count(n) * &mu_q));
    if k_total == 0 {
        return Err(Error::EmptyBudget { tokens: n, mu });
    }
    let k_fg = floor_usize(&(count(fg_set.len()) * &mu_q));
    let k_bg = floor_usize(&(count(bg_set.len()) * &mu_rho));

    let sorted_by_score = |set: &[usize]| {
        let mut v = set.to_vec();
        // Stable sort on descending score keeps ascending index among ties.
        v.sort_by(|a, b| scores.score(*b).partial_cmp(&scores.score(*a)).expect("finite scores"));
        v
    };
    let mut s_fg: Vec<usize> = sorted_by_score(&fg_set).into_iter().take(k_fg).collect();
    let mut s_bg: Vec<usize> = sorted_by_score(&bg_set).into_iter().take(k_bg).collect();
    s_fg.sort();
    s_bg.sort();

    let k_res = k_total - (s_fg.len() + s_bg.len());
    let remain: Vec<usize> = (0..n)
        .filter(|i| !s_fg.contains(i) && !s_bg.contains(i))
        .collect();
    let mut s_uni = Vec::new();
    for j in 0..k_res {
        s_uni.push(remain[j * remain.len() / k_res]);
    }

    PruneSelection::from_strata(*grid, k_total, &s_fg, &s_bg, &s_uni)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_ratio_reads_printed_digits() {
        assert_eq!(decimal_ratio(0.29), BigRational::new(29.into(), 100.into()));
        assert_eq!(decimal_ratio(1.0), BigRational::from_integer(1.into()));
        assert_eq!(decimal_ratio(0.135), BigRational::new(27.into(), 200.into()));
    }

    #[test]
    fn oracle_quota_examples() {
        let w = oracle_decay_weights(4, 0.2);
        assert_eq!(oracle_quota(105, &w), vec![44, 32, 20, 9]);
        let approx = [1.0, 0.7333, 0.4667, 0.2].map(decimal_ratio);
        assert_eq!(oracle_quota(105, &approx), vec![44, 32, 20, 9]);
        let ones = vec![BigRational::from_integer(1.into()); 4];
        assert_eq!(oracle_quota(100, &ones), vec![25; 4]);
        assert_eq!(oracle_quota(10, &ones[..1]), vec![10]);
    }

    #[test]
    fn capped_oracle_pins_overflowing_frames() {
        let w = oracle_decay_weights(3, 0.2);
        // Shares 15, 9, 3 pin lag 1; 17 over {0.6, 0.2} gives 13, 4 and pins
        // lag 2; lag 3 takes the remaining 7.
        assert_eq!(oracle_capped_quota(27, &w, &[10, 10, 10]), vec![10, 10, 7]);
        assert_eq!(oracle_capped_quota(105, &oracle_decay_weights(4, 0.2), &[264; 4]), vec![44, 32, 20, 9]);
    }

    #[test]
    fn oracle_budget_examples() {
        assert_eq!(oracle_budget(4, 264, 0.1), 105);
        assert_eq!(oracle_budget(3, 100, 0.1), 30);
    }
}
