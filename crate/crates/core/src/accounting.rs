//! Analytic token and FLOPs accounting for a compressed episode.
//!
//! FLOPs follow a standard dense-transformer count. Per encoder layer a
//! sequence of `n` tokens of width `d` costs `c_dense·n·d² + c_attn·n²·d`;
//! prefill costs `2·P·n` for the language model's parameters `P` plus
//! `c_attn·n²·d` attention per layer. The constants live in
//! [`CostModelParams`]; only ratios between two estimates are meaningful.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::ssp::StratumBudget;
use crate::tar::HistoryBudgetPlan;
use crate::types::{CompressionConfig, CostModelParams, PruneSelection, Stratum};

/// `(before, after)` token totals that reach the language model.
pub fn count_tokens(plan: &HistoryBudgetPlan, selection: &PruneSelection) -> (usize, usize) {
    let before = plan.original_tokens() + selection.grid().token_count();
    let after = plan.realized_tokens() + selection.len();
    (before, after)
}

/// Vision-encoder FLOPs for a set of independently encoded frames.
pub fn estimate_encoder_flops(per_frame_tokens: &[usize], params: &CostModelParams) -> f64 {
    let d = params.encoder_hidden_dim as f64;
    let layers = params.encoder_layers as f64;
    per_frame_tokens
        .iter()
        .map(|&n| {
            let n = n as f64;
            layers * (params.dense_coeff * n * d * d + params.attention_coeff * n * n * d)
        })
        .sum()
}

/// Language-model prefill FLOPs over a single sequence of `total_tokens`.
pub fn estimate_prefill_flops(total_tokens: usize, params: &CostModelParams) -> f64 {
    let n = total_tokens as f64;
    let d = params.llm_hidden_dim as f64;
    2.0 * params.llm_params * n + params.llm_layers as f64 * params.attention_coeff * n * n * d
}

/// FLOPs to generate `output_tokens` after a prefill of `context_tokens`.
pub fn estimate_decode_flops(context_tokens: usize, output_tokens: usize, params: &CostModelParams) -> f64 {
    let d = params.llm_hidden_dim as f64;
    let per_layer_attn = params.llm_layers as f64 * params.attention_coeff * d;
    (0..output_tokens)
        .map(|j| 2.0 * params.llm_params + per_layer_attn * (context_tokens + j) as f64)
        .sum()
}

fn ratio(before: f64, after: f64) -> f64 {
    if after > 0.0 {
        before / after
    } else if before == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

/// One frame's contribution to the episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct FrameAccount {
    /// `"history"` or `"current"`.
    pub role: String,
    /// History lag, absent for the current frame.
    pub lag: Option<usize>,
    pub original_tokens: usize,
    pub retained_tokens: usize,
    /// Patches the vision encoder processes before the spatial merge.
    pub encoder_patches_before: usize,
    pub encoder_patches_after: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct CurrentFrameAccount {
    pub tokens: usize,
    pub foreground_tokens: usize,
    pub budget: StratumBudget,
    pub retained_foreground: usize,
    pub retained_background: usize,
    pub retained_uniform: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct DecodeAccount {
    pub output_tokens: usize,
    pub flops_before: f64,
    pub flops_after: f64,
    pub reduction: f64,
}

/// Before/after token and FLOPs figures for one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct EfficiencyReport {
    pub tokens_before: usize,
    pub tokens_after: usize,
    pub token_reduction: f64,
    pub encoder_flops_before: f64,
    pub encoder_flops_after: f64,
    pub encoder_reduction: f64,
    pub prefill_flops_before: f64,
    pub prefill_flops_after: f64,
    pub prefill_reduction: f64,
    /// Present only when an output length was supplied.
    pub decode: Option<DecodeAccount>,
    pub total_flops_before: f64,
    pub total_flops_after: f64,
    pub total_reduction: f64,
    pub history_budget: usize,
    pub current: CurrentFrameAccount,
    pub frames: Vec<FrameAccount>,
    /// Language-model layer at which pruning is assumed to run.
    pub pruning_layer: u32,
    pub config: CompressionConfig,
}

impl EfficiencyReport {
    /// Accounts for a planned history and a pruned current frame. The
    /// current frame is encoded in full; pruning only shortens the language
    /// model's sequence.
    pub fn build(
        plan: &HistoryBudgetPlan,
        selection: &PruneSelection,
        foreground_tokens: usize,
        budget: StratumBudget,
        config: &CompressionConfig,
        output_tokens: Option<usize>,
    ) -> Self {
        let merge = (config.merge_factor * config.merge_factor) as usize;
        let params = &config.cost_model;
        let current_tokens = selection.grid().token_count();

        let mut frames: Vec<FrameAccount> = plan
            .frames
            .iter()
            .map(|f| FrameAccount {
                role: "history".into(),
                lag: Some(f.lag),
                original_tokens: f.original_tokens,
                retained_tokens: f.realized_tokens,
                encoder_patches_before: f.original_tokens * merge,
                encoder_patches_after: f.realized_tokens * merge,
            })
            .collect();
        frames.push(FrameAccount {
            role: "current".into(),
            lag: None,
            original_tokens: current_tokens,
            retained_tokens: selection.len(),
            encoder_patches_before: current_tokens * merge,
            encoder_patches_after: current_tokens * merge,
        });

        let (tokens_before, tokens_after) = count_tokens(plan, selection);
        let patches_before: Vec<usize> = frames.iter().map(|f| f.encoder_patches_before).collect();
        let patches_after: Vec<usize> = frames.iter().map(|f| f.encoder_patches_after).collect();
        let encoder_flops_before = estimate_encoder_flops(&patches_before, params);
        let encoder_flops_after = estimate_encoder_flops(&patches_after, params);
        let prefill_flops_before = estimate_prefill_flops(tokens_before, params);
        let prefill_flops_after = estimate_prefill_flops(tokens_after, params);

        let decode = output_tokens.map(|out| {
            let flops_before = estimate_decode_flops(tokens_before, out, params);
            let flops_after = estimate_decode_flops(tokens_after, out, params);
            DecodeAccount {
                output_tokens: out,
                flops_before,
                flops_after,
                reduction: ratio(flops_before, flops_after),
            }
        });
        let decode_before = decode.as_ref().map_or(0.0, |d| d.flops_before);
        let decode_after = decode.as_ref().map_or(0.0, |d| d.flops_after);
        let total_flops_before = encoder_flops_before + prefill_flops_before + decode_before;
        let total_flops_after = encoder_flops_after + prefill_flops_after + decode_after;

        EfficiencyReport {
            tokens_before,
            tokens_after,
            token_reduction: ratio(tokens_before as f64, tokens_after as f64),
            encoder_flops_before,
            encoder_flops_after,
            encoder_reduction: ratio(encoder_flops_before, encoder_flops_after),
            prefill_flops_before,
            prefill_flops_after,
            prefill_reduction: ratio(prefill_flops_before, prefill_flops_after),
            decode,
            total_flops_before,
            total_flops_after,
            total_reduction: ratio(total_flops_before, total_flops_after),
            history_budget: plan.budget_total,
            current: CurrentFrameAccount {
                tokens: current_tokens,
                foreground_tokens,
                budget,
                retained_foreground: selection.count_in(Stratum::Foreground),
                retained_background: selection.count_in(Stratum::Background),
                retained_uniform: selection.count_in(Stratum::Uniform),
            },
            frames,
            pruning_layer: config.pruning_layer,
            config: config.clone(),
        }
    }
}
