//! Synthetic data and independent oracles for tests and fixtures.

mod attention;
mod baseline;
mod oracle;
mod rng;
mod screens;

pub use attention::{synth_temporal_attention, synth_token_scores};
pub use baseline::{prune_with_random_fill, random_sample_baseline};
pub use oracle::{
    decimal_ratio, oracle_budget, oracle_capped_quota, oracle_decay_weights, oracle_prune, oracle_quota,
};
pub use rng::FixtureRng;
pub use screens::{flat_screen, foreground_iou, synth_screen, PlantedElement, PlantedKind, SyntheticScreen};
