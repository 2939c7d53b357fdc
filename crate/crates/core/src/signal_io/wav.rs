use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use super::AudioBuffer;
use crate::{Error, Result};

/// Reads a linear-PCM WAV file (8/16/24/32-bit, any rate, any channel count).
/// Multi-channel audio is averaged to mono and integer samples are scaled by
/// `2^(bits-1)` into `[-1, 1]`.
pub fn load_wav(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = match WavReader::new(BufReader::new(file)) {
        Ok(r) => r,
        Err(hound::Error::Unsupported) | Err(hound::Error::FormatError(_)) => {
            return Err(unsupported(path));
        }
        Err(hound::Error::IoError(e)) => return Err(Error::io(path, e)),
        Err(e) => {
            return Err(Error::Wav {
                path: path.to_path_buf(),
                message: e.to_string(),
            })
        }
    };
    let spec = reader.spec();
    if spec.sample_format != SampleFormat::Int {
        return Err(Error::UnsupportedEncoding {
            path: path.to_path_buf(),
            found: format!("IEEE float ({} bit)", spec.bits_per_sample),
        });
    }
    if !matches!(spec.bits_per_sample, 8 | 16 | 24 | 32) {
        return Err(Error::UnsupportedEncoding {
            path: path.to_path_buf(),
            found: format!("{}-bit PCM", spec.bits_per_sample),
        });
    }
    let channels = spec.channels.max(1) as usize;
    let scale = 1.0 / (1u64 << (spec.bits_per_sample - 1)) as f64;
    let mut mono = Vec::with_capacity(reader.len() as usize / channels);
    let mut acc = 0.0;
    let mut k = 0;
    for s in reader.into_samples::<i32>() {
        let s = s.map_err(|e| Error::Wav {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        acc += s as f64 * scale;
        k += 1;
        if k == channels {
            mono.push(acc / channels as f64);
            acc = 0.0;
            k = 0;
        }
    }
    AudioBuffer::new(mono, spec.sample_rate)
}

/// Writes mono 16-bit PCM, clipping to `[-1, 1)`.
pub fn write_wav(path: impl AsRef<Path>, audio: &AudioBuffer) -> Result<()> {
    let path = path.as_ref();
    let spec = WavSpec {
        channels: 1,
        sample_rate: audio.sample_rate_hz(),
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let wav_err = |e: hound::Error| match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => Error::Wav {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    };
    let mut writer = WavWriter::create(path, spec).map_err(wav_err)?;
    for &s in audio.samples() {
        let v = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        writer.write_sample(v).map_err(wav_err)?;
    }
    writer.finalize().map_err(wav_err)
}

// Builds the "unsupported encoding" error, naming the format tag when the
// fmt chunk is readable.
fn unsupported(path: &Path) -> Error {
    let found = read_format_tag(path)
        .map(|tag| match tag {
            0x0001 => "PCM with unsupported layout".to_string(),
            0x0002 => "Microsoft ADPCM (format tag 0x0002)".to_string(),
            0x0003 => "IEEE float (format tag 0x0003)".to_string(),
            0x0006 => "A-law (format tag 0x0006)".to_string(),
            0x0007 => "mu-law (format tag 0x0007)".to_string(),
            0x0011 => "IMA ADPCM (format tag 0x0011)".to_string(),
            0x0055 => "MPEG layer 3 (format tag 0x0055)".to_string(),
            0xFFFE => "WAVE_FORMAT_EXTENSIBLE with non-PCM subformat".to_string(),
            t => format!("format tag 0x{t:04X}"),
        })
        .unwrap_or_else(|| "not a RIFF/WAVE file".to_string());
    Error::UnsupportedEncoding {
        path: path.to_path_buf(),
        found,
    }
}

fn read_format_tag(path: &Path) -> Option<u16> {
    let mut bytes = Vec::new();
    File::open(path).ok()?.take(4096).read_to_end(&mut bytes).ok()?;
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return None;
    }
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().ok()?) as usize;
        if id == b"fmt " && pos + 10 <= bytes.len() {
            return Some(u16::from_le_bytes([bytes[pos + 8], bytes[pos + 9]]));
        }
        pos += 8 + size + (size & 1);
    }
    None
}
