mod common;

use common::*;
use flashguard::frameio::{parse_y4m, write_y4m};
use flashguard::prelude::*;
use flashguard::synthgen::oracle;

#[test]
fn corpus_matches_oracle_in_both_modes() {
    for spec in strobe_corpus() {
        let s = gen_strobe(&spec).unwrap();
        for cfg in [AnalysisConfig::default(), AnalysisConfig::strict()] {
            let a = analyze_stream(&s, &cfg).unwrap();
            let o = oracle::transcribe(&s, &cfg).unwrap();
            assert_eq!(
                a.num_triggers(),
                o.num_triggers,
                "{spec:?} {:?}",
                cfg.scan_mode
            );
            assert_eq!(a.harmful.rem_frm, o.rem_frm);
            assert_eq!(a.trend.fin_frames, o.fin_frames);
            // equal values; a zero extreme may differ only in sign
            assert_eq!(a.trend.fin, o.fin);
        }
    }
}

#[test]
fn y4m_round_trip_then_reanalyze() {
    let spec = StrobeSpec {
        period_frames: 2,
        low_gray: 40,
        high_gray: 140,
        ..StrobeSpec::full_screen(geom(48, 32), fps(25), 250)
    };
    let s = gen_strobe(&spec).unwrap();
    let mut bytes = Vec::new();
    write_y4m(&s, &mut bytes).unwrap();
    let back = parse_y4m(&bytes[..]).unwrap();
    assert_eq!(back, s);
    let cfg = AnalysisConfig::default();
    assert_eq!(
        analyze_stream(&back, &cfg).unwrap(),
        analyze_stream(&s, &cfg).unwrap()
    );
}

#[test]
fn one_iteration_gives_one_report() {
    let s = gen_strobe(&StrobeSpec::full_screen(geom(32, 24), fps(30), 300)).unwrap();
    let scfg = SanitizeConfig {
        level_seconds: 1.0,
        max_iterations: 1,
    };
    let out = sanitize_iterative(&s, &AnalysisConfig::default(), &scfg).unwrap();
    assert_eq!(out.passes.len(), 1);
    assert!(out.passes[0].report.num_triggers > 0);
    assert_eq!(
        out.stream.len(),
        s.len() - out.passes[0].plan.removal_frames.len()
    );
}

#[test]
fn fifteen_hz_strobe_inside_calm_video_is_cut_out() {
    let g = geom(32, 24);
    let calm = RgbFrame::filled(g, [90, 90, 90]);
    let mut frames = vec![calm.clone(); 90];
    frames.extend((0..60).map(|k| RgbFrame::filled(g, if k % 2 == 0 { [250; 3] } else { [5; 3] })));
    frames.extend(vec![calm; 90]);
    let s = VideoStream::new(g, fps(30), frames).unwrap();
    let cfg = AnalysisConfig::default();
    assert!(analyze_stream(&s, &cfg).unwrap().num_triggers() >= 1);

    let scfg = SanitizeConfig {
        level_seconds: 1.0,
        max_iterations: 5,
    };
    let out = sanitize_iterative(&s, &cfg, &scfg).unwrap();
    assert_eq!(analyze_stream(&out.stream, &cfg).unwrap().num_triggers(), 0);
    let first = &out.passes[0].plan;
    assert!(first.removal_frames[0] >= 89 && first.removal_frames[0] <= 91);
    assert!(out.stream.len() >= 150);
}

#[test]
fn report_survives_json() {
    let s = random_stream(7);
    let cfg = AnalysisConfig::default();
    let a = analyze_stream(&s, &cfg).unwrap();
    let r = AnalysisReport::new(&a, &SourceInfo::of_stream(&s), &cfg, 0);
    let again = AnalysisReport::from_json(&r.to_json()).unwrap();
    assert_eq!(again, r);
    assert_eq!(again.to_json(), r.to_json());
}
