//! `kfsel`: keyframe selection, evaluation, synthesis and trace extraction.
//!
//! Exit status is 0 on success, 1 for bad input or I/O failures (one-line
//! diagnostic on stderr) and 2 for internal errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use keyframe_core::dataio::Texture;
use keyframe_core::DecayMode;

#[derive(Debug, Parser)]
#[command(name = "kfsel", version, about = "Content-aware keyframe selection for posed RGB-D sequences")]
struct Cli {
    /// Only print errors.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the adaptive selector over a sequence.
    Select(SelectArgs),
    /// Compare selection strategies on one sequence.
    Evaluate(EvaluateArgs),
    /// Write a seeded synthetic sequence.
    Synth(SynthArgs),
    /// Extract the per-frame trace of a report as CSV.
    Trace(TraceArgs),
}

#[derive(Debug, Args)]
struct SelectorArgs {
    /// Sequence directory (rgb.txt, depth.txt, groundtruth.txt, intrinsics.toml).
    #[arg(long)]
    input: PathBuf,

    /// TOML file overriding the default selector settings.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Overrides the decay mode of the config.
    #[arg(long, value_enum)]
    decay_mode: Option<DecayModeArg>,

    /// Maximum timestamp gap when associating rgb, depth and poses, seconds.
    #[arg(long, default_value_t = 0.02)]
    max_time_delta: f64,
}

#[derive(Debug, Args)]
struct SelectArgs {
    #[command(flatten)]
    selector: SelectorArgs,

    /// Report path (JSON).
    #[arg(long)]
    output: PathBuf,

    /// Also write the selected frames, one `index timestamp` pair per line.
    #[arg(long)]
    keyframes_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    selector: SelectorArgs,

    /// Report path (JSON).
    #[arg(long)]
    output: PathBuf,

    /// Include the adaptive selector.
    #[arg(long)]
    adaptive: bool,

    /// Include uniform sampling every N frames. Repeatable.
    #[arg(long, value_name = "N")]
    uniform: Vec<usize>,

    /// Include uniform sampling with a stride matched to the adaptive
    /// selector's keyframe count.
    #[arg(long)]
    matched_uniform: bool,

    /// Include a constant threshold. Repeatable.
    #[arg(long, value_name = "THETA")]
    fixed_threshold: Vec<f64>,

    /// Also write the trace as CSV next to the report.
    #[arg(long)]
    csv: bool,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Output directory.
    #[arg(long)]
    output: PathBuf,

    /// TOML sequence description; replaces the preset flags.
    #[arg(long, conflicts_with_all = ["preset", "frames", "texture", "speed"])]
    spec: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Preset::StaticDynamic)]
    preset: Preset,

    /// Number of frames.
    #[arg(long, default_value_t = 100)]
    frames: usize,

    #[arg(long, value_enum)]
    texture: Option<TextureArg>,

    /// Sideways speed of the moving part, m/frame.
    #[arg(long)]
    speed: Option<f64>,

    /// Seed for texture and motion; overrides the seed of --spec.
    #[arg(long)]
    seed: Option<u64>,

    /// Stored depth units per meter.
    #[arg(long, default_value_t = 5000.0)]
    depth_scale: f64,
}

#[derive(Debug, Args)]
struct TraceArgs {
    /// Report written by `select` or `evaluate`.
    #[arg(long)]
    input: PathBuf,

    /// CSV path.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DecayModeArg {
    Literal,
    Multiplier,
}

impl From<DecayModeArg> for DecayMode {
    fn from(m: DecayModeArg) -> Self {
        match m {
            DecayModeArg::Literal => DecayMode::Literal,
            DecayModeArg::Multiplier => DecayMode::Multiplier,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Preset {
    /// First half still, second half sliding sideways.
    StaticDynamic,
    /// Random pauses, drifts and pans.
    Random,
    /// No motion at all.
    Still,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TextureArg {
    Checkerboard,
    GradientNoise,
}

impl From<TextureArg> for Texture {
    fn from(t: TextureArg) -> Self {
        match t {
            TextureArg::Checkerboard => Texture::Checkerboard,
            TextureArg::GradientNoise => Texture::GradientNoise,
        }
    }
}

fn main() -> ExitCode {
    std::panic::set_hook(Box::new(|info| {
        let msg = info
            .payload()
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| info.payload().downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "unknown panic".into());
        let at = info.location().map(|l| format!(" at {}:{}", l.file(), l.line())).unwrap_or_default();
        eprintln!("kfsel: internal error: {msg}{at}");
        std::process::exit(2);
    }));

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.render().to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("kfsel: {} (see kfsel --help)", first.trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    env_logger::Builder::new()
        .filter_level(if cli.quiet { log::LevelFilter::Error } else { log::LevelFilter::Warn })
        .parse_default_env()
        .format_timestamp(None)
        .init();

    let result = match cli.command {
        Command::Select(args) => commands::select(args, cli.quiet),
        Command::Evaluate(args) => commands::evaluate(args, cli.quiet),
        Command::Synth(args) => commands::synth(args, cli.quiet),
        Command::Trace(args) => commands::trace(args, cli.quiet),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kfsel: {}", one_line(&e));
            ExitCode::from(1)
        }
    }
}

/// Joins the error chain into one line, skipping causes whose text an outer
/// message already includes.
fn one_line(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if out.contains(&text) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(&text);
    }
    out.replace('\n', " ")
}
