//! File formats, configuration and the end-to-end episode runner.

mod config;
mod csv;
mod episode;
mod fixture;
mod masks;
mod png;

pub use config::{config_schema, load_config, parse_config, plan_schema, report_schema, resolve_config, ConfigOverrides};
pub use csv::{format_importance_csv, load_importance_csv, parse_importance_csv};
pub use episode::{
    history_file, report_from_artifacts, run_episode, to_json, write_artifacts, EpisodeOutcome, EpisodeSpec,
    CONFIG_FILE, OVERLAY_FILE, PARTITION_MASK_FILE, PLAN_FILE, REPORT_FILE, TOKEN_MASK_FILE,
};
pub use fixture::{
    fixture_history_file, load_transcript, write_fixture, FixtureFiles, FixtureTranscript, ATTENTION_FILE,
    CURRENT_FILE, FIXTURE_COLS, FIXTURE_ROWS, TRANSCRIPT_FILE,
};
pub use masks::{
    format_partition_mask, format_selection_mask, parse_partition_mask, parse_selection_mask, render_overlay,
    STRATUM_COLORS,
};
pub use png::{encode_png, load_png, save_png};
