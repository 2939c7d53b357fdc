//! File formats: pitch CSV, voice-quality CSV, histogram and tuning tables.
//! Every artifact starts with `#` comment lines carrying the tool version
//! and the configuration that produced it.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::Serialize;

use crate::corpus::VqComparison;
use crate::evaluation::{HistogramDistribution, TuningResult};
use crate::pitch::{PitchConfig, PitchFrame, PitchTrack};
use crate::voice_quality::VqFrame;
use crate::{Error, Result, VERSION};

pub const PITCH_COLUMNS: [&str; 7] = [
    "time_s",
    "nccf",
    "pitch_hz",
    "pov_feature",
    "log_pitch",
    "normalized_log_pitch",
    "delta_pitch",
];

/// Marker for undefined values in CSV output.
pub const UNDEFINED: &str = "NA";

const PITCH_CONFIG_TAG: &str = "# pitch_config ";

/// Writes through a temporary file in the destination directory and renames
/// it into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    {
        let mut w = std::io::BufWriter::new(tmp.as_file_mut());
        body(&mut w)?;
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// JSON with a trailing newline, written atomically.
pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(|e| Error::io(path, e.into()))?;
        writeln!(w).map_err(|e| Error::io(path, e))
    })
}

fn header(w: &mut dyn Write, run_config: &impl Serialize) -> std::io::Result<()> {
    writeln!(w, "# voxsrc {VERSION}")?;
    writeln!(w, "# run_config {}", serde_json::to_string(run_config)?)
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| UNDEFINED.to_string(), fmt)
}

fn csv_err(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}

/// One row per frame, columns as in [`PITCH_COLUMNS`].
pub fn write_pitch_csv(w: &mut dyn Write, track: &PitchTrack, run_config: &impl Serialize) -> std::io::Result<()> {
    header(w, run_config)?;
    writeln!(w, "{PITCH_CONFIG_TAG}{}", serde_json::to_string(&track.config)?)?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(PITCH_COLUMNS).map_err(csv_err)?;
    for f in &track.frames {
        out.write_record([f.time_s, f.nccf, f.pitch_hz, f.pov_feature, f.log_pitch, f.normalized_log_pitch, f.delta_pitch].map(fmt))
            .map_err(csv_err)?;
    }
    out.flush()
}

/// Reads a file written by [`write_pitch_csv`]. Values round-trip exactly.
pub fn read_pitch_csv(path: &Path) -> Result<PitchTrack> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut config = None;
    let mut body = String::new();
    let mut header_lines = 0;
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if let Some(json) = line.strip_prefix(PITCH_CONFIG_TAG) {
            config = Some(
                serde_json::from_str::<PitchConfig>(json)
                    .map_err(|e| Error::parse(path, header_lines + 1, format!("pitch config: {e}")))?,
            );
        }
        if line.starts_with('#') && body.is_empty() {
            header_lines += 1;
            continue;
        }
        body.push_str(&line);
        body.push('\n');
    }
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let columns = reader.headers().map_err(|e| Error::parse(path, header_lines + 1, e.to_string()))?;
    if columns.iter().ne(PITCH_COLUMNS) {
        return Err(Error::parse(path, header_lines + 1, format!("expected columns {}", PITCH_COLUMNS.join(","))));
    }
    let mut frames = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = header_lines + 2 + i;
        let record = record.map_err(|e| Error::parse(path, line, e.to_string()))?;
        let v = record
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::parse(path, line, e.to_string()))?;
        frames.push(PitchFrame {
            time_s: v[0],
            nccf: v[1],
            pitch_hz: v[2],
            pov_feature: v[3],
            log_pitch: v[4],
            normalized_log_pitch: v[5],
            delta_pitch: v[6],
        });
    }
    Ok(PitchTrack {
        frames,
        config: config.unwrap_or_default(),
    })
}

/// Per-frame voice quality; undefined values are written as [`UNDEFINED`].
pub fn write_vq_csv(w: &mut dyn Write, frames: &[VqFrame], run_config: &impl Serialize) -> std::io::Result<()> {
    header(w, run_config)?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["time_s", "jitta_s", "rap", "shimmer", "hnr_db"]).map_err(csv_err)?;
    for f in frames {
        out.write_record([fmt(f.time_s), fmt_opt(f.jitta_s), fmt_opt(f.rap), fmt_opt(f.shimmer), fmt_opt(f.hnr_db)])
            .map_err(csv_err)?;
    }
    out.flush()
}

/// Plot-ready bin table.
pub fn write_histogram_csv(w: &mut dyn Write, named: &[(&str, &HistogramDistribution)], run_config: &impl Serialize) -> std::io::Result<()> {
    header(w, run_config)?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["cohort", "bin_lo", "bin_hi", "count", "probability"]).map_err(csv_err)?;
    for (name, h) in named {
        for k in 0..h.n_bins() {
            let edges = h.bin_edges();
            out.write_record([
                name.to_string(),
                fmt(edges[k]),
                fmt(edges[k + 1]),
                h.counts().get(k).map_or_else(|| UNDEFINED.to_string(), u64::to_string),
                fmt(h.probabilities()[k]),
            ])
            .map_err(csv_err)?;
        }
    }
    out.flush()
}

pub fn write_tuning_csv(w: &mut dyn Write, result: &TuningResult, run_config: &impl Serialize) -> std::io::Result<()> {
    header(w, run_config)?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["max_f0_hz", "lowpass_cutoff_hz", "gpe", "fpe_cents", "n_voiced_ref", "n_gross", "n_unmatched", "n_failed", "best"])
        .map_err(csv_err)?;
    for r in &result.grid {
        out.write_record([
            fmt(r.max_f0_hz),
            fmt(r.lowpass_cutoff_hz),
            fmt_opt(r.gpe),
            fmt_opt(r.fpe_cents),
            r.n_voiced_ref.to_string(),
            r.n_gross.to_string(),
            r.n_unmatched.to_string(),
            r.n_failed.to_string(),
            (result.best == Some(r.point())).to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()
}

/// One row per measure, mean/median/IQR of each cohort side by side.
pub fn write_vq_comparison_csv(w: &mut dyn Write, cmp: &VqComparison, run_config: &impl Serialize) -> std::io::Result<()> {
    header(w, run_config)?;
    let mut out = csv::Writer::from_writer(w);
    let mut columns = vec!["measure".to_string()];
    for c in &cmp.cohorts {
        for stat in ["n", "mean", "median", "iqr"] {
            columns.push(format!("{}_{stat}", c.cohort));
        }
    }
    out.write_record(&columns).map_err(csv_err)?;
    for (measure, spreads) in cmp.table() {
        let mut row = vec![measure.to_string()];
        for s in spreads {
            match s {
                Some(s) => row.extend([s.n.to_string(), fmt(s.mean), fmt(s.median), fmt(s.iqr)]),
                None => row.extend(["0".to_string(), UNDEFINED.into(), UNDEFINED.into(), UNDEFINED.into()]),
            }
        }
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pitch::extract_pitch;
    use crate::synth;

    #[test]
    fn pitch_csv_round_trips_exactly() {
        let track = extract_pitch(&synth::sine(220.0, 0.3, 16000, 0.5), &PitchConfig::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_atomic(&path, |w| write_pitch_csv(w, &track, &serde_json::json!({"k": 1})).map_err(|e| Error::io("t.csv", e))).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(&format!("# voxsrc {VERSION}\n# run_config {{\"k\":1}}\n")));
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), track.len() + 1);
        let back = read_pitch_csv(&path).unwrap();
        assert_eq!(back, track);
    }

    #[test]
    fn reader_rejects_bad_columns_and_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "# x\ntime_s,pitch_hz\n0.1,100\n").unwrap();
        assert!(matches!(read_pitch_csv(&path), Err(Error::Parse { line: 2, .. })));
        std::fs::write(&path, format!("{}\n1,2,3,4,5,6,7\n1,2,x,4,5,6,7\n", PITCH_COLUMNS.join(","))).unwrap();
        assert!(matches!(read_pitch_csv(&path), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn undefined_values_are_marked() {
        let mut buf = Vec::new();
        let frame = VqFrame {
            time_s: 0.5,
            jitta_s: None,
            rap: Some(0.25),
            shimmer: None,
            hnr_db: None,
        };
        write_vq_csv(&mut buf, &[frame], &()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.ends_with("0.5,NA,0.25,NA,NA\n"), "{text}");
    }
}
