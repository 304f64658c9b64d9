use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tokenprune::io::{
    config_schema, format_partition_mask, load_png, plan_schema, report_from_artifacts, report_schema,
    resolve_config, run_episode, to_json, write_artifacts, write_fixture, ConfigOverrides, EpisodeSpec,
    FixtureTranscript,
};
use tokenprune::vision::partition_frame;
use tokenprune::{plan_history, CompressionConfig, Error, ErrorKind, Result};

/// Visual-token compression for GUI screenshot episodes.
///
/// Exit codes: 0 success, 2 configuration error (including a missing
/// importance map without --synthetic-attention), 3 input or output I/O
/// error, 4 domain error such as a budget too small for the history.
#[derive(Parser)]
#[command(name = "prune", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on one episode and write its artifacts.
    Run(RunArgs),
    /// Plan history resizing only and print the plan as JSON.
    Plan(PlanArgs),
    /// Run the edge pipeline on one frame and print its foreground mask.
    Partition(PartitionArgs),
    /// Recompute the efficiency report from a previous run's artifacts.
    Report(ReportArgs),
    /// Generate a synthetic fixture episode with its oracle transcript.
    Synth(SynthArgs),
    /// Print a JSON schema.
    Schema { which: SchemaKind },
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON config file; defaults apply to anything it leaves out.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    history_len: Option<usize>,
    #[arg(long)]
    patch_px: Option<u32>,
    #[arg(long)]
    merge_factor: Option<u32>,
    #[arg(long)]
    pruning_layer: Option<u32>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<CompressionConfig> {
        let overrides = ConfigOverrides {
            lambda: self.lambda,
            gamma: self.gamma,
            mu: self.mu,
            rho: self.rho,
            history_len: self.history_len,
            patch_px: self.patch_px,
            merge_factor: self.merge_factor,
            pruning_layer: self.pruning_layer,
        };
        resolve_config(self.config.as_deref(), &overrides)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// History frames, most recent first.
    #[arg(long, num_args = 1..)]
    history: Vec<PathBuf>,
    #[arg(long)]
    current: PathBuf,
    /// Importance map CSV for the current frame.
    #[arg(long)]
    attention: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Use seeded synthetic scores when --attention is absent.
    #[arg(long)]
    synthetic_attention: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON and mask files but no images.
    #[arg(long)]
    report_only: bool,
    /// Expected answer length; adds decode FLOPs to the report.
    #[arg(long)]
    output_tokens: Option<usize>,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// History frames, most recent first.
    #[arg(long, num_args = 1.., conflicts_with = "dims")]
    history: Vec<PathBuf>,
    /// Frame sizes as WIDTHxHEIGHT, most recent first.
    #[arg(long, num_args = 1.., value_parser = parse_dims)]
    dims: Vec<(u32, u32)>,
}

#[derive(Args)]
struct PartitionArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long)]
    current: PathBuf,
    /// Write the mask here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Output directory of a previous `prune run`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    output_tokens: Option<usize>,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemaKind {
    Config,
    Plan,
    Report,
    Transcript,
}

fn parse_dims(s: &str) -> std::result::Result<(u32, u32), String> {
    let (w, h) = s.split_once('x').ok_or_else(|| format!("expected WIDTHxHEIGHT, got `{s}`"))?;
    let num = |v: &str| v.trim().parse::<u32>().map_err(|e| format!("`{v}`: {e}"));
    Ok((num(w)?, num(h)?))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Run(args) => {
            let config = args.config.resolve()?;
            let episode = EpisodeSpec {
                history: args.history,
                current: args.current,
                importance: args.attention,
                synthetic_attention: args.synthetic_attention,
                seed: args.seed,
                output_tokens: args.output_tokens,
                config: config.clone(),
            };
            let outcome = run_episode(&episode)?;
            for path in write_artifacts(&outcome, &config, &args.out, args.report_only)? {
                log::info!("wrote {}", path.display());
            }
            let r = &outcome.report;
            println!(
                "tokens {} -> {} (x{:.2}), encoder x{:.2}, prefill x{:.2}",
                r.tokens_before, r.tokens_after, r.token_reduction, r.encoder_reduction, r.prefill_reduction
            );
        }
        Command::Plan(args) => {
            let config = args.config.resolve()?;
            let dims = if args.history.is_empty() {
                args.dims
            } else {
                args.history
                    .iter()
                    .map(|p| load_png(p).map(|img| img.dims()))
                    .collect::<Result<_>>()?
            };
            print!("{}", to_json(&plan_history(&dims, &config)?));
        }
        Command::Partition(args) => {
            let config = args.config.resolve()?;
            let mask = partition_frame(&load_png(&args.current)?, &config)?;
            write_or_print(args.out.as_deref(), &format_partition_mask(&mask))?;
        }
        Command::Report(args) => {
            print!("{}", to_json(&report_from_artifacts(&args.out, args.output_tokens)?));
        }
        Command::Synth(args) => {
            let config = args.config.resolve()?;
            let t = write_fixture(args.seed, &config, &args.out)?;
            println!(
                "wrote fixture seed {} to {}: {} history frames, {} tokens kept of {}",
                t.seed,
                args.out.display(),
                t.history_len,
                t.k_total,
                t.rows * t.cols
            );
        }
        Command::Schema { which } => {
            let schema = match which {
                SchemaKind::Config => config_schema(),
                SchemaKind::Plan => plan_schema(),
                SchemaKind::Report => report_schema(),
                SchemaKind::Transcript => serde_json::to_value(schemars::schema_for!(FixtureTranscript))
                    .expect("schema serialises"),
            };
            print!("{}", to_json(&schema));
        }
    }
    Ok(())
}

fn exit_code(err: &Error) -> u8 {
    match err.kind() {
        ErrorKind::Config => 2,
        ErrorKind::Input => 3,
        ErrorKind::Domain => 4,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
