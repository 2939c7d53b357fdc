// Synthetic phone-annotated corpora for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use voxsrc::corpus::{Gender, Metadata, PhoneSegment, Style, UtteranceMeta};
use voxsrc::pitch::{extract_pitch, PitchConfig, PitchTrack};
use voxsrc::signal_io::AudioBuffer;
use voxsrc::synth;

pub const RATE: u32 = 16000;

#[derive(Debug, Clone, Copy)]
pub enum Source {
    Tone(f64),
    Noise,
    Silence,
}

pub struct Part {
    pub label: &'static str,
    pub duration_s: f64,
    pub source: Source,
}

pub fn part(label: &'static str, duration_s: f64, source: Source) -> Part {
    Part {
        label,
        duration_s,
        source,
    }
}

pub struct Utterance {
    pub id: String,
    pub meta: UtteranceMeta,
    pub audio: AudioBuffer,
    pub segments: Vec<PhoneSegment>,
}

pub fn render(id: &str, style: Style, gender: Gender, parts: &[Part], seed: u64) -> Utterance {
    let mut pieces = Vec::new();
    let mut segments = Vec::new();
    let mut t = 0.0;
    for (k, p) in parts.iter().enumerate() {
        let piece = match p.source {
            Source::Tone(f) => synth::sine(f, p.duration_s, RATE, 0.5),
            Source::Noise => synth::noise(p.duration_s, RATE, 0.2, seed * 1000 + k as u64),
            Source::Silence => synth::silence(p.duration_s, RATE),
        };
        let end = t + piece.duration_s();
        segments.push(PhoneSegment {
            utterance_id: id.to_string(),
            start_s: t,
            end_s: end,
            label: p.label.to_string(),
        });
        t = end;
        pieces.push(piece);
    }
    Utterance {
        id: id.to_string(),
        meta: UtteranceMeta { style, gender },
        audio: synth::concat(&pieces),
        segments,
    }
}

pub struct Corpus {
    pub segments: Vec<PhoneSegment>,
    pub metadata: Metadata,
    pub tracks: BTreeMap<String, PitchTrack>,
}

pub fn analyse(utterances: &[Utterance], config: &PitchConfig) -> Corpus {
    let mut corpus = Corpus {
        segments: Vec::new(),
        metadata: Metadata::new(),
        tracks: BTreeMap::new(),
    };
    for u in utterances {
        corpus.segments.extend(u.segments.iter().cloned());
        corpus.metadata.insert(u.id.clone(), u.meta);
        corpus.tracks.insert(u.id.clone(), extract_pitch(&u.audio, config).unwrap());
    }
    corpus
}

/// Utterances alternating voiced fricatives (tones) and unvoiced fricatives
/// (noise bursts), separated by silence.
pub fn fricative_corpus(n: usize) -> Vec<Utterance> {
    (0..n)
        .map(|i| {
            let f = 150.0 + 40.0 * i as f64;
            let parts = [
                part("sil", 0.1, Source::Silence),
                part("z", 0.3, Source::Tone(f)),
                part("sil", 0.1, Source::Silence),
                part("s", 0.3, Source::Noise),
                part("sil", 0.1, Source::Silence),
                part("v", 0.3, Source::Tone(1.5 * f)),
                part("sil", 0.1, Source::Silence),
                part("f", 0.3, Source::Noise),
                part("sil", 0.1, Source::Silence),
            ];
            render(&format!("fric{i:02}"), Style::Spoken, Gender::Female, &parts, i as u64 + 1)
        })
        .collect()
}

pub mod fixtures;
