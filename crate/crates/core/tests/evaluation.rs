use keyframe_core::dataio::{generate_synthetic, SyntheticSpec};
use keyframe_core::evaluation::{compare, emit_report, parse_report, ReportFormat, StrategySpec};
use keyframe_core::default_config;

#[test]
fn static_then_dynamic_halves() {
    let frames = generate_synthetic(&SyntheticSpec::standard_static_dynamic(7)).unwrap();
    let cfg = default_config();
    let report = compare(&frames, &[StrategySpec::adaptive(cfg), StrategySpec::uniform(10)], &cfg, "sd").unwrap();
    let halves = |name: &str| {
        let k = &report.strategy(name).unwrap().keyframes;
        let first = k.iter().filter(|&&i| i < 50).count();
        (first, k.len() - first)
    };
    let (a0, a1) = halves("adaptive");
    assert_ne!(a0, a1);
    assert_eq!(halves("uniform-10"), (5, 5));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let frames = generate_synthetic(&SyntheticSpec::random_dynamic(40, 2)).unwrap();
    let cfg = default_config();
    let strategies = [StrategySpec::adaptive(cfg), StrategySpec::uniform(4), StrategySpec::fixed(0.06, cfg)];
    let a = emit_report(&compare(&frames, &strategies, &cfg, "x").unwrap(), ReportFormat::Json).unwrap();
    let b = emit_report(&compare(&frames, &strategies, &cfg, "x").unwrap(), ReportFormat::Json).unwrap();
    assert_eq!(a, b);
    assert_eq!(emit_report(&parse_report(&a).unwrap(), ReportFormat::Json).unwrap(), a);
}

#[test]
fn trace_covers_every_frame_of_every_strategy() {
    let frames = generate_synthetic(&SyntheticSpec::random_dynamic(30, 4)).unwrap();
    let cfg = default_config();
    let report = compare(&frames, &[StrategySpec::adaptive(cfg), StrategySpec::uniform(7)], &cfg, "x").unwrap();
    for s in &report.strategies {
        let rows: Vec<_> = report.trace_of(&s.name).map(|r| r.frame_index).collect();
        assert_eq!(rows, (0..30).collect::<Vec<_>>());
        let expected = 100.0 * (1.0 - s.keyframe_count as f64 / 30.0);
        assert!((s.kfcr - expected).abs() < 1e-12);
    }
}
