mod common;

use common::fixtures::{build, rerun_differences, s, snapshot, stderr, voxsrc};
use serde_json::Value;
use voxsrc::export::read_pitch_csv;
use voxsrc::pitch::PitchConfig;

fn json(path: &std::path::Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn data_lines(path: &std::path::Path) -> Vec<String> {
    std::fs::read_to_string(path).unwrap().lines().filter(|l| !l.starts_with('#')).map(String::from).collect()
}

#[test]
fn extract_writes_one_row_per_frame() {
    let fx = build();
    let out = fx.path("pitch");
    let r = voxsrc(&["extract", s(&fx.wavs[0]), "-o", s(&out)]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
    let csv = out.join("tone220.pitch.csv");
    let lines = data_lines(&csv);
    assert_eq!(lines[0].split(',').count(), 7);
    let frames = PitchConfig::default().framing().frame_count(500.0);
    assert_eq!(lines.len() - 1, frames);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with(&format!("# voxsrc {}\n# run_config {{", voxsrc::VERSION)));
    assert_eq!(read_pitch_csv(&csv).unwrap().len(), frames);
}

#[test]
fn missing_input_does_not_stop_the_batch() {
    let fx = build();
    let out = fx.path("pitch");
    let missing = fx.path("nope.wav");
    let r = voxsrc(&["extract", s(&fx.wavs[0]), s(&missing), s(&fx.wavs[1]), "-o", s(&out)]);
    assert_eq!(r.status.code(), Some(1));
    assert!(stderr(&r).contains("nope.wav"));
    let names: Vec<String> = snapshot(&out).into_iter().map(|f| f.0).collect();
    assert_eq!(names, vec!["pulses.pitch.csv", "tone220.pitch.csv"]);
}

#[test]
fn vq_reports_pulse_train_and_silence() {
    let fx = build();
    let out = fx.path("vq");
    let r = voxsrc(&["vq", s(&fx.wavs[0]), s(&fx.wavs[1]), s(&fx.wavs[2]), "-o", s(&out)]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
    assert!(stderr(&r).contains("no voiced_threshold configured"));
    assert_eq!(snapshot(&out).iter().filter(|f| f.0.ends_with(".vq.json")).count(), 3);
    let pulses = json(&out.join("pulses.vq.json"));
    assert!(pulses["report"]["jitta_s"].as_f64().unwrap() < 1e-6);
    assert_eq!(pulses["command"], "vq");
    assert!(pulses["run_config"]["voiced_threshold"].is_f64());
    let quiet = json(&out.join("quiet.vq.json"));
    assert!(quiet["report"]["jitta_s"].is_null() && quiet["report"]["hnr_db"].is_null());
    assert!(data_lines(&out.join("quiet.vq.csv"))[1].ends_with("NA,NA,NA,NA"));
}

#[test]
fn tune_emits_the_full_grid() {
    let fx = build();
    let out = fx.path("tune");
    let r = voxsrc(&["tune", "--manifest", s(&fx.tune_manifest), "-o", s(&out)]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
    assert_eq!(data_lines(&out.join("tuning.csv")).len(), 1 + 21);
    let result = json(&out.join("tuning.json"));
    assert!(result["result"]["best"]["max_f0_hz"].as_f64().unwrap() >= 900.0);

    let single = fx.path("tune1");
    let r = voxsrc(&["tune", "--manifest", s(&fx.tune_manifest), "-o", s(&single), "--max-f0-grid", "1000", "--lowpass-grid", "1500"]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
    let rows = data_lines(&single.join("tuning.csv"));
    assert_eq!(rows.len(), 2);
    assert!(rows[1].ends_with(",true"));
}

#[test]
fn tune_ignores_manifest_order() {
    let fx = build();
    let text = std::fs::read_to_string(&fx.tune_manifest).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines[1..].reverse();
    let permuted = fx.path("tune_permuted.csv");
    std::fs::write(&permuted, lines.join("\n")).unwrap();
    let grid = ["--max-f0-grid", "600,1000", "--lowpass-grid", "1500"];
    let a = fx.path("a");
    let b = fx.path("b");
    for (m, o) in [(&fx.tune_manifest, &a), (&permuted, &b)] {
        let mut args = vec!["tune", "--manifest", s(m), "-o", s(o)];
        args.extend(grid);
        assert_eq!(voxsrc(&args).status.code(), Some(0));
    }
    assert_eq!(std::fs::read(a.join("tuning.csv")).unwrap(), std::fs::read(b.join("tuning.csv")).unwrap());
    assert_eq!(json(&a.join("tuning.json"))["result"], json(&b.join("tuning.json"))["result"]);
}

#[test]
fn malformed_manifest_row_is_a_config_error() {
    let fx = build();
    let bad = fx.path("bad.csv");
    std::fs::write(&bad, "utterance_id,audio_path,ground_truth_path,style,gender\nok,a.wav,a.f0,sung,f\nx,b.wav,b.f0,opera,f\n").unwrap();
    let r = voxsrc(&["tune", "--manifest", s(&bad), "-o", s(&fx.path("t"))]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains(":3:"), "{}", stderr(&r));
}

#[test]
fn invalid_configuration_exits_with_2() {
    let fx = build();
    let cfg = fx.path("cfg.json");
    std::fs::write(&cfg, r#"{"pitch": {"min_f0_hz": 500, "max_f0_hz": 100}}"#).unwrap();
    let r = voxsrc(&["--config", s(&cfg), "extract", s(&fx.wavs[0]), "-o", s(&fx.path("x"))]);
    assert_eq!(r.status.code(), Some(2));
    std::fs::write(&cfg, r#"{"unknown": 1}"#).unwrap();
    assert_eq!(voxsrc(&["--config", s(&cfg), "extract", s(&fx.wavs[0]), "-o", s(&fx.path("x"))]).status.code(), Some(2));
    assert_eq!(voxsrc(&["extract", s(&fx.wavs[0]), "-o", s(&fx.path("x")), "--lowpass", "100"]).status.code(), Some(2));
    assert_eq!(voxsrc(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn config_file_values_are_echoed_and_overridable() {
    let fx = build();
    let cfg = fx.path("cfg.json");
    std::fs::write(&cfg, r#"{"pitch": {"max_f0_hz": 800}, "voiced_threshold": -0.2}"#).unwrap();
    let out = fx.path("vq");
    let r = voxsrc(&["--config", s(&cfg), "vq", s(&fx.wavs[1]), "-o", s(&out), "--min-f0", "60"]);
    assert_eq!(r.status.code(), Some(0));
    let echoed = &json(&out.join("pulses.vq.json"))["run_config"];
    assert_eq!(echoed["pitch"]["max_f0_hz"], 800.0);
    assert_eq!(echoed["pitch"]["min_f0_hz"], 60.0);
    assert_eq!(echoed["voiced_threshold"], -0.2);
    assert!(!stderr(&r).contains("no voiced_threshold"));
}

#[test]
fn eval_scores_and_estimates_a_threshold() {
    let fx = build();
    let out = fx.path("eval");
    let r = voxsrc(&["eval", "--manifest", s(&fx.tune_manifest), "-o", s(&out)]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
    let report = json(&out.join("eval.json"));
    assert_eq!(report["pooled"]["gpe"], 0.0);
    assert_eq!(report["utterances"].as_array().unwrap().len(), 3);
    assert!(report["voicing_threshold"]["threshold"].is_f64());
    assert_eq!(data_lines(&out.join("eval.csv")).len(), 1 + 3 + 1);
}

fn payload(v: &Value) -> Value {
    let mut v = v.clone();
    let m = v.as_object_mut().unwrap();
    m.remove("inputs");
    m.remove("run_config");
    v
}

#[test]
fn analyze_reports_cohorts_and_warns_on_unknown_phones() {
    let fx = build();
    let cfg = fx.path("cohorts.json");
    std::fs::write(
        &cfg,
        r#"{"cohorts": [
              {"name": "fric_a", "style": "spoken", "phone_class": "voiced_fricatives"},
              {"name": "fric_b", "style": "spoken", "phones": ["z", "v"]},
              {"name": "unv", "style": "spoken", "phone_class": "unvoiced_fricatives"},
              {"name": "sung_vowels", "style": "sung", "gender": "female", "phone_class": "vowels"}
           ],
           "pov_pairs": [["fric_a", "fric_b"], ["fric_a", "unv"]],
           "histogram": {"bins": 20}}"#,
    )
    .unwrap();
    let out = fx.path("analysis");
    let r = voxsrc(&["--config", s(&cfg), "analyze", "--manifest", s(&fx.corpus_manifest), "-o", s(&out)]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
    assert!(stderr(&r).contains("unknown phone") && stderr(&r).contains("qq"));
    let report = json(&out.join("analysis.json"));
    let sep = report["pov_separation"].as_array().unwrap();
    assert_eq!(sep[0]["bhattacharyya"], 0.0);
    assert!(sep[1]["disjoint"] == true || sep[1]["bhattacharyya"].as_f64().unwrap() > 0.5, "{}", sep[1]);
    assert_eq!(report["unknown_phones"], serde_json::json!(["qq"]));
    // 4 cohorts x 20 bins plus the header
    assert_eq!(data_lines(&out.join("durations.csv")).len(), 1 + 4 * 20);
    assert_eq!(data_lines(&out.join("pov.csv")).len(), 1 + 4 * 20);
}

#[test]
fn precomputed_features_match_direct_analysis() {
    let fx = build();
    let features = fx.path("features");
    let corpus_wavs: Vec<String> = ["fric00", "fric01", "sung0", "sung1"].iter().map(|id| s(&fx.path(&format!("{id}.wav"))).to_string()).collect();
    let mut args = vec!["extract", "-o", s(&features)];
    args.extend(corpus_wavs.iter().map(String::as_str));
    assert_eq!(voxsrc(&args).status.code(), Some(0));

    let direct = fx.path("direct");
    let cached = fx.path("cached");
    assert_eq!(voxsrc(&["analyze", "--manifest", s(&fx.corpus_manifest), "-o", s(&direct)]).status.code(), Some(0));
    let r = voxsrc(&["analyze", "--manifest", s(&fx.corpus_manifest), "-o", s(&cached), "--features-dir", s(&features)]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
    assert_eq!(payload(&json(&direct.join("analysis.json"))), payload(&json(&cached.join("analysis.json"))));
    for name in ["durations.csv", "pitch.csv", "pov.csv"] {
        assert_eq!(std::fs::read(direct.join(name)).unwrap(), std::fs::read(cached.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn every_command_is_reproducible() {
    let fx = build();
    let diffs = rerun_differences(&fx);
    assert!(diffs.is_empty(), "{diffs:#?}");
}
