//! Synthetic fixture episodes with an oracle transcript of the expected
//! selection.
//!
//! The transcript comes from the exact-arithmetic oracles applied to the
//! planted ground truth. It shares no code with the planner, the edge
//! pipeline or the pruner, so a run over the fixture that reproduces it
//! checks all three at once.

use std::path::{Path, PathBuf};

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::csv::format_importance_csv;
use super::episode::to_json;
use super::png::save_png;
use crate::error::{Error, Result};
use crate::sim::{oracle_budget, oracle_decay_weights, oracle_prune, oracle_quota, synth_screen, synth_token_scores};
use crate::types::{CompressionConfig, Stratum};

/// Token rows and columns of fixture frames: 616x336 px at 28 px per token.
pub const FIXTURE_ROWS: usize = 22;
pub const FIXTURE_COLS: usize = 12;

pub const TRANSCRIPT_FILE: &str = "transcript.json";
pub const ATTENTION_FILE: &str = "attention.csv";
pub const CURRENT_FILE: &str = "current.png";

/// Input file name of the history frame at `lag`.
pub fn fixture_history_file(lag: usize) -> String {
    format!("frame_k{lag}.png")
}

/// Expected results for a fixture episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct FixtureTranscript {
    pub seed: u64,
    pub rows: usize,
    pub cols: usize,
    pub history_len: usize,
    /// Planted foreground tokens of the current frame.
    pub foreground: Vec<usize>,
    pub history_budget: usize,
    pub history_quotas: Vec<usize>,
    pub k_total: usize,
    pub selected_foreground: Vec<usize>,
    pub selected_background: Vec<usize>,
    pub selected_uniform: Vec<usize>,
    pub tokens_before: usize,
    pub config: CompressionConfig,
}

/// Paths of a fixture's inputs, history lag 1 first.
#[derive(Debug, Clone)]
pub struct FixtureFiles {
    pub history: Vec<PathBuf>,
    pub current: PathBuf,
    pub attention: PathBuf,
    pub transcript: PathBuf,
}

impl FixtureFiles {
    pub fn in_dir(dir: &Path, history_len: usize) -> Self {
        FixtureFiles {
            history: (1..=history_len).map(|k| dir.join(fixture_history_file(k))).collect(),
            current: dir.join(CURRENT_FILE),
            attention: dir.join(ATTENTION_FILE),
            transcript: dir.join(TRANSCRIPT_FILE),
        }
    }
}

/// Generates a fixture episode under `config` into `dir`.
pub fn write_fixture(seed: u64, config: &CompressionConfig, dir: &Path) -> Result<FixtureTranscript> {
    config.validate()?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = FixtureFiles::in_dir(dir, config.history_len);

    let current = synth_screen(FIXTURE_ROWS, FIXTURE_COLS, config, seed)?;
    save_png(&files.current, &current.image)?;
    for (k, path) in files.history.iter().enumerate() {
        let frame = synth_screen(FIXTURE_ROWS, FIXTURE_COLS, config, seed.wrapping_add(k as u64 + 1))?;
        save_png(path, &frame.image)?;
    }
    let scores = synth_token_scores(&current.grid, seed);
    std::fs::write(&files.attention, format_importance_csv(&scores)).map_err(|e| Error::io(&files.attention, e))?;

    let n = current.grid.token_count();
    let t = config.history_len;
    let history_budget = oracle_budget(t, n, config.lambda);
    let history_quotas = oracle_quota(history_budget, &oracle_decay_weights(t, config.gamma));
    let selection = oracle_prune(&current.grid, &scores, &current.truth, config.mu, config.rho)?;

    let transcript = FixtureTranscript {
        seed,
        rows: FIXTURE_ROWS,
        cols: FIXTURE_COLS,
        history_len: t,
        foreground: current.truth.foreground(),
        history_budget,
        history_quotas,
        k_total: selection.len(),
        selected_foreground: selection.indices_in(Stratum::Foreground),
        selected_background: selection.indices_in(Stratum::Background),
        selected_uniform: selection.indices_in(Stratum::Uniform),
        tokens_before: n * (t + 1),
        config: config.clone(),
    };
    std::fs::write(&files.transcript, to_json(&transcript)).map_err(|e| Error::io(&files.transcript, e))?;
    Ok(transcript)
}

pub fn load_transcript(path: &Path) -> Result<FixtureTranscript> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}
