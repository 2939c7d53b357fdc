// On-disk fixture corpus and a runner for the `voxsrc` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use voxsrc::corpus::{Gender, Style};
use voxsrc::pitch::PitchConfig;
use voxsrc::signal_io::write_wav;
use voxsrc::synth;

use super::{fricative_corpus, part, render, Source, RATE};

pub fn voxsrc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_voxsrc")).args(args).output().expect("run voxsrc")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

pub struct Fixture {
    pub dir: tempfile::TempDir,
    pub wavs: Vec<PathBuf>,
    pub tune_manifest: PathBuf,
    pub corpus_manifest: PathBuf,
}

impl Fixture {
    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn ground_truth(path: &Path, freq: f64, duration_s: f64) {
    let n = PitchConfig::default().framing().frame_count(duration_s * 1000.0);
    let mut text = String::new();
    for i in 0..n {
        // unvoiced lead-in and tail
        let f = if i < 3 || i + 3 >= n { 0.0 } else { freq };
        text.push_str(&format!("{:.4} {f}\n", 0.0125 + 0.01 * i as f64));
    }
    std::fs::write(path, text).unwrap();
}

/// Tones and a pulse train for the per-file commands, a tuning manifest over
/// tones with ground truth, and an annotated sung/spoken corpus.
pub fn build() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    let mut wavs = Vec::new();
    for (name, audio) in [
        ("tone220", synth::sine(220.0, 0.5, RATE, 0.5)),
        ("pulses", synth::periodic_pulses(200.0, 0.5, RATE)),
        ("quiet", synth::silence(0.5, RATE)),
    ] {
        let path = p(&format!("{name}.wav"));
        write_wav(&path, &audio).unwrap();
        wavs.push(path);
    }

    let mut tune = String::from("utterance_id,audio_path,annotation_path,ground_truth_path,style,gender\n");
    for f in [300.0, 650.0, 900.0] {
        let id = format!("t{f}");
        write_wav(p(&format!("{id}.wav")), &synth::sine(f, 0.5, RATE, 0.5)).unwrap();
        ground_truth(&p(&format!("{id}.f0")), f, 0.5);
        tune.push_str(&format!("{id},{id}.wav,,{id}.f0,spoken,male\n"));
    }
    let tune_manifest = p("tune.csv");
    std::fs::write(&tune_manifest, tune).unwrap();

    let mut corpus = String::from("utterance_id,audio_path,annotation_path,ground_truth_path,style,gender\n");
    let mut utterances = fricative_corpus(2);
    for (i, f) in [330.0, 350.0].into_iter().enumerate() {
        let parts = [
            part("sil", 0.1, Source::Silence),
            part("aa", 0.6, Source::Tone(f)),
            part("z", 0.2, Source::Tone(f)),
            part("s", 0.2, Source::Noise),
            part("qq", 0.1, Source::Noise),
            part("sil", 0.1, Source::Silence),
        ];
        utterances.push(render(&format!("sung{i}"), Style::Sung, Gender::Female, &parts, 40 + i as u64));
    }
    for u in &utterances {
        write_wav(p(&format!("{}.wav", u.id)), &u.audio).unwrap();
        let lab: String = u.segments.iter().map(|s| format!("{:.6}\t{:.6}\t{}\n", s.start_s, s.end_s, s.label)).collect();
        std::fs::write(p(&format!("{}.lab", u.id)), lab).unwrap();
        corpus.push_str(&format!("{0},{0}.wav,{0}.lab,,{1},{2}\n", u.id, u.meta.style, u.meta.gender));
    }
    let corpus_manifest = p("corpus.csv");
    std::fs::write(&corpus_manifest, corpus).unwrap();
    Fixture { dir, wavs, tune_manifest, corpus_manifest }
}

/// Every file under `dir`, name -> bytes.
pub fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

/// Runs each subcommand twice into separate directories (once single
/// threaded) and reports any whose outputs differ.
pub fn rerun_differences(fx: &Fixture) -> Vec<String> {
    let wavs: Vec<&str> = fx.wavs.iter().map(|p| s(p)).collect();
    let commands: Vec<(&str, Vec<&str>)> = vec![
        ("extract", wavs.clone()),
        ("vq", wavs.clone()),
        ("tune", vec!["--manifest", s(&fx.tune_manifest), "--max-f0-grid", "500,1000", "--lowpass-grid", "1000,1500"]),
        ("eval", vec!["--manifest", s(&fx.tune_manifest)]),
        ("analyze", vec!["--manifest", s(&fx.corpus_manifest), "--vq"]),
    ];
    let mut diffs = Vec::new();
    for (cmd, rest) in commands {
        let mut outputs = Vec::new();
        for (k, jobs) in ["1", "4"].iter().enumerate() {
            let out_dir = fx.path(&format!("rerun_{cmd}_{k}"));
            let mut args = vec![cmd, "--jobs", jobs, "--out-dir", s(&out_dir)];
            args.extend(&rest);
            let out = voxsrc(&args);
            if out.status.code() != Some(0) {
                diffs.push(format!("{cmd}: exit {:?}: {}", out.status.code(), stderr(&out)));
            }
            outputs.push(snapshot(&out_dir));
        }
        if outputs[0].is_empty() || outputs[0] != outputs[1] {
            diffs.push(format!("{cmd}: outputs differ between runs"));
        }
    }
    diffs
}
