//! End-to-end episodes: load frames, plan the history, prune the current
//! frame, account for the savings and write the artifacts.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::csv::load_importance_csv;
use super::masks::{
    format_partition_mask, format_selection_mask, parse_partition_mask, parse_selection_mask, render_overlay,
};
use super::png::{load_png, save_png};
use crate::accounting::EfficiencyReport;
use crate::error::{Error, Result};
use crate::sim::synth_token_scores;
use crate::ssp::{prune, stratum_budgets, StratumBudget};
use crate::tar::{plan_history, HistoryBudgetPlan};
use crate::types::{CompressionConfig, ImportanceMap, PartitionMask, PruneSelection, TokenGrid};
use crate::vision::{grid_for, partition_frame, resize_bilinear, RasterImage};

pub const PLAN_FILE: &str = "plan.json";
pub const REPORT_FILE: &str = "report.json";
pub const CONFIG_FILE: &str = "config.json";
pub const TOKEN_MASK_FILE: &str = "token_mask.txt";
pub const PARTITION_MASK_FILE: &str = "partition_mask.txt";
pub const OVERLAY_FILE: &str = "overlay.png";

/// File name of the resized history frame at `lag`.
pub fn history_file(lag: usize) -> String {
    format!("history_k{lag}.png")
}

/// Inputs of one episode.
#[derive(Debug, Clone)]
pub struct EpisodeSpec {
    /// History frames, most recent (lag 1) first. May be empty; otherwise
    /// its length must equal `config.history_len`.
    pub history: Vec<PathBuf>,
    pub current: PathBuf,
    pub importance: Option<PathBuf>,
    /// Allows seeded synthetic scores when no importance file is given.
    pub synthetic_attention: bool,
    pub seed: u64,
    /// Expected answer length; enables decode accounting.
    pub output_tokens: Option<usize>,
    pub config: CompressionConfig,
}

/// Everything an episode produces, before anything touches the disk.
#[derive(Debug, Clone)]
pub struct EpisodeOutcome {
    pub plan: HistoryBudgetPlan,
    pub resized_history: Vec<RasterImage>,
    pub partition: PartitionMask,
    pub scores: ImportanceMap,
    pub budget: StratumBudget,
    pub selection: PruneSelection,
    pub overlay: RasterImage,
    pub report: EfficiencyReport,
}

/// Pretty JSON with a trailing newline. Struct fields serialise in
/// declaration order, so equal values always give equal bytes.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialise");
    s.push('\n');
    s
}

fn importance_for(episode: &EpisodeSpec, grid: &TokenGrid) -> Result<ImportanceMap> {
    match &episode.importance {
        Some(path) => {
            let map = load_importance_csv(path, grid.patch_px, grid.merge_factor)?;
            let g = map.grid();
            if (g.rows, g.cols) != (grid.rows, grid.cols) {
                return Err(Error::InvalidInput(format!(
                    "{}: importance map is {}x{} but the current frame has {}x{} tokens",
                    path.display(),
                    g.rows,
                    g.cols,
                    grid.rows,
                    grid.cols
                )));
            }
            ImportanceMap::new(*grid, map.scores().to_vec())
        }
        None if episode.synthetic_attention => {
            log::warn!("no importance map given; using synthetic scores (seed {})", episode.seed);
            Ok(synth_token_scores(grid, episode.seed))
        }
        None => Err(Error::InvalidConfig(
            "no importance map given; pass --attention <csv> or opt in to --synthetic-attention".into(),
        )),
    }
}

/// Runs the full pipeline in memory.
pub fn run_episode(episode: &EpisodeSpec) -> Result<EpisodeOutcome> {
    let config = &episode.config;
    config.validate()?;
    if !episode.history.is_empty() && episode.history.len() != config.history_len {
        return Err(Error::InvalidConfig(format!(
            "history_len is {} but {} history frames were given",
            config.history_len,
            episode.history.len()
        )));
    }

    // History frames are independent; decode them in parallel.
    let history: Vec<RasterImage> = std::thread::scope(|s| {
        let handles: Vec<_> = episode.history.iter().map(|p| s.spawn(move || load_png(p))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("frame loader panicked"))
            .collect::<Result<_>>()
    })?;
    let current = load_png(&episode.current)?;

    let dims: Vec<(u32, u32)> = history.iter().map(RasterImage::dims).collect();
    let plan = plan_history(&dims, config)?;
    let resized_history: Vec<RasterImage> = std::thread::scope(|s| {
        let handles: Vec<_> = history
            .iter()
            .zip(&plan.frames)
            .map(|(img, f)| s.spawn(move || resize_bilinear(img, f.target_dims)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("resize panicked")).collect()
    });

    let grid = grid_for(&current, config)?;
    let partition = partition_frame(&current, config)?;
    let scores = importance_for(episode, &grid)?;
    let budget = stratum_budgets(grid.token_count(), partition.foreground_count(), config.mu, config.rho)?;
    let selection = prune(&grid, &scores, &partition, config.mu, config.rho)?;
    let overlay = render_overlay(&current, &selection);
    let report = EfficiencyReport::build(
        &plan,
        &selection,
        partition.foreground_count(),
        budget,
        config,
        episode.output_tokens,
    );
    Ok(EpisodeOutcome {
        plan,
        resized_history,
        partition,
        scores,
        budget,
        selection,
        overlay,
        report,
    })
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf> {
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes an outcome into `dir`, creating it if needed, and returns the
/// files written. With `report_only` the images are skipped.
pub fn write_artifacts(
    outcome: &EpisodeOutcome,
    config: &CompressionConfig,
    dir: &Path,
    report_only: bool,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = vec![
        write(dir.join(CONFIG_FILE), &to_json(config))?,
        write(dir.join(PLAN_FILE), &to_json(&outcome.plan))?,
        write(dir.join(PARTITION_MASK_FILE), &format_partition_mask(&outcome.partition))?,
        write(dir.join(TOKEN_MASK_FILE), &format_selection_mask(&outcome.selection))?,
        write(dir.join(REPORT_FILE), &to_json(&outcome.report))?,
    ];
    if !report_only {
        for (img, frame) in outcome.resized_history.iter().zip(&outcome.plan.frames) {
            let path = dir.join(history_file(frame.lag));
            save_png(&path, img)?;
            written.push(path);
        }
        let path = dir.join(OVERLAY_FILE);
        save_png(&path, &outcome.overlay)?;
        written.push(path);
    }
    Ok(written)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Recomputes the report from the config, plan and masks a previous run left
/// in `dir`.
pub fn report_from_artifacts(dir: &Path, output_tokens: Option<usize>) -> Result<EfficiencyReport> {
    let config = super::config::load_config(&dir.join(CONFIG_FILE))?;
    let plan: HistoryBudgetPlan = read_json(&dir.join(PLAN_FILE))?;

    let partition_path = dir.join(PARTITION_MASK_FILE);
    let partition_text = read(&partition_path)?;
    let (rows, cols) = mask_dims(&partition_text, &partition_path)?;
    let grid = TokenGrid::new(rows, cols, config.patch_px, config.merge_factor)?;
    let partition = parse_partition_mask(&partition_text, &partition_path.display().to_string(), grid)?;
    let mask_path = dir.join(TOKEN_MASK_FILE);
    let selection = parse_selection_mask(&read(&mask_path)?, &mask_path.display().to_string(), grid)?;

    let budget = stratum_budgets(grid.token_count(), partition.foreground_count(), config.mu, config.rho)?;
    Ok(EfficiencyReport::build(
        &plan,
        &selection,
        partition.foreground_count(),
        budget,
        &config,
        output_tokens,
    ))
}

fn mask_dims(text: &str, path: &Path) -> Result<(usize, usize)> {
    let header = text.lines().next().unwrap_or("");
    let parsed = header
        .split_once(',')
        .and_then(|(r, c)| Some((r.trim().parse().ok()?, c.trim().parse().ok()?)));
    parsed.ok_or_else(|| Error::Parse {
        path: path.display().to_string(),
        line: 1,
        column: 1,
        message: format!("expected `rows,cols`, found `{header}`"),
    })
}
