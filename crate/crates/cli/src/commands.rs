use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use keyframe_core::dataio::{
    generate_synthetic, load_sequence, write_sequence, LoadOptions, MotionSegment, SyntheticSpec, Texture,
    STANDARD_SPEED,
};
use keyframe_core::evaluation::{
    compare, emit_report, matched_uniform_stride, parse_report, run_strategy, trace_csv, ComparisonReport,
    ReportFormat, StrategySpec,
};
use keyframe_core::{Frame, SelectorConfig};

use crate::{EvaluateArgs, Preset, SelectArgs, SelectorArgs, SynthArgs, TraceArgs};

/// Defaults, then the config file, then individual flags.
fn load_config(args: &SelectorArgs) -> Result<SelectorConfig> {
    let mut cfg = match &args.config {
        Some(path) => SelectorConfig::from_toml_file(path)?,
        None => SelectorConfig::default(),
    };
    if let Some(mode) = args.decay_mode {
        cfg.decay_mode = mode.into();
    }
    Ok(cfg.validate()?)
}

fn load_frames(args: &SelectorArgs) -> Result<Vec<Frame>> {
    let options = LoadOptions {
        max_time_delta: args.max_time_delta,
        ..LoadOptions::default()
    };
    Ok(load_sequence(&args.input, &options)?)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

pub fn select(args: SelectArgs, quiet: bool) -> Result<()> {
    let cfg = load_config(&args.selector)?;
    let frames = load_frames(&args.selector)?;
    let strategy = StrategySpec::adaptive(cfg);
    let result = run_strategy(&frames, &strategy, &cfg)?;

    if let Some(path) = &args.keyframes_out {
        let mut list = String::new();
        for row in result.trace.iter().filter(|r| r.decision.is_keyframe()) {
            list.push_str(&format!("{} {:.6}\n", row.frame_index, row.timestamp));
        }
        write_file(path, list.as_bytes())?;
    }

    let (n, kept, kfcr) = (frames.len(), result.keyframes.len(), result.kfcr);
    let mut report = ComparisonReport::new(cfg, args.selector.input.display().to_string());
    report.push(&strategy, result);
    write_file(&args.output, &emit_report(&report, ReportFormat::Json)?)?;

    if !quiet {
        println!("keyframes: {kept} of {n}");
        println!("KFCR: {kfcr:.2}%");
    }
    Ok(())
}

pub fn evaluate(args: EvaluateArgs, quiet: bool) -> Result<()> {
    if !args.adaptive && !args.matched_uniform && args.uniform.is_empty() && args.fixed_threshold.is_empty() {
        bail!("no strategies requested (use --adaptive, --uniform N, --matched-uniform or --fixed-threshold THETA)");
    }
    let cfg = load_config(&args.selector)?;
    let frames = load_frames(&args.selector)?;

    let mut strategies = Vec::new();
    if args.adaptive {
        strategies.push(StrategySpec::adaptive(cfg));
    }
    if args.matched_uniform {
        let adaptive = run_strategy(&frames, &StrategySpec::adaptive(cfg), &cfg)?;
        strategies.push(StrategySpec::uniform(matched_uniform_stride(
            frames.len(),
            adaptive.keyframes.len(),
        )));
    }
    strategies.extend(args.uniform.iter().map(|&n| StrategySpec::uniform(n)));
    strategies.extend(args.fixed_threshold.iter().map(|&t| StrategySpec::fixed(t, cfg)));

    let report = compare(&frames, &strategies, &cfg, &args.selector.input.display().to_string())?;
    write_file(&args.output, &emit_report(&report, ReportFormat::Json)?)?;
    if args.csv {
        write_file(&args.output.with_extension("csv"), &emit_report(&report, ReportFormat::Csv)?)?;
    }

    if !quiet {
        println!(
            "{:<16} {:>9} {:>8} {:>18} {:>24}",
            "strategy", "keyframes", "KFCR %", "mean skipped e_t", "max inter-keyframe e_t"
        );
        for s in &report.strategies {
            println!(
                "{:<16} {:>9} {:>8.2} {:>18.5} {:>24.5}",
                s.name, s.keyframe_count, s.kfcr, s.proxies.mean_skipped_error, s.proxies.max_inter_keyframe_error
            );
        }
    }
    Ok(())
}

fn synth_spec(args: &SynthArgs) -> Result<SyntheticSpec> {
    let mut spec = match &args.spec {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            toml::from_str::<SyntheticSpec>(&text)
                .with_context(|| format!("invalid sequence description {}", path.display()))?
        }
        None => {
            let seed = args.seed.unwrap_or(0);
            let n = args.frames;
            let speed = args.speed.unwrap_or(STANDARD_SPEED);
            let mut spec = match args.preset {
                Preset::StaticDynamic => SyntheticSpec::static_then_dynamic(n / 2, n - n / 2, speed, seed),
                Preset::Random => SyntheticSpec::random_dynamic(n, seed),
                Preset::Still => SyntheticSpec::small(n, Texture::Checkerboard, vec![MotionSegment::still(n)], seed),
            };
            if let Some(t) = args.texture {
                spec.texture = t.into();
            }
            spec
        }
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    spec.validate()?;
    Ok(spec)
}

pub fn synth(args: SynthArgs, quiet: bool) -> Result<()> {
    let spec = synth_spec(&args)?;
    let frames = generate_synthetic(&spec)?;
    write_sequence(&args.output, &frames, args.depth_scale)
        .with_context(|| format!("cannot write sequence to {}", args.output.display()))?;
    if !quiet {
        println!("wrote {} frames to {}", frames.len(), args.output.display());
    }
    Ok(())
}

pub fn trace(args: TraceArgs, quiet: bool) -> Result<()> {
    let bytes = fs::read(&args.input).with_context(|| format!("cannot read {}", args.input.display()))?;
    let report = parse_report(&bytes).with_context(|| format!("malformed report {}", args.input.display()))?;
    write_file(&args.output, trace_csv(&report.trace).as_bytes())?;
    if !quiet {
        println!("{} rows written to {}", report.trace.len(), args.output.display());
    }
    Ok(())
}
