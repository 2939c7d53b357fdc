use std::path::{Path, PathBuf};

use serde::Deserialize;
use voxsrc::corpus::{Gender, Style, UtteranceMeta};
use voxsrc::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub utterance_id: String,
    pub audio_path: Option<PathBuf>,
    pub annotation_path: Option<PathBuf>,
    pub ground_truth_path: Option<PathBuf>,
    pub meta: Option<UtteranceMeta>,
}

#[derive(Debug, Deserialize)]
struct RawRow {
    utterance_id: String,
    #[serde(default)]
    audio_path: String,
    #[serde(default)]
    annotation_path: String,
    #[serde(default)]
    ground_truth_path: String,
    #[serde(default)]
    style: String,
    #[serde(default)]
    gender: String,
}

/// Reads the corpus manifest. Relative paths are resolved against the
/// manifest's directory; rows come back sorted by utterance id.
pub fn load_manifest(path: &Path) -> Result<Vec<ManifestRow>> {
    let base = path.parent().unwrap_or(Path::new(""));
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    let headers = reader.headers().map_err(|e| Error::parse(path, 1, e.to_string()))?.clone();
    if !headers.iter().any(|h| h == "utterance_id") {
        return Err(Error::parse(path, 1, "missing utterance_id column"));
    }
    let resolve = |s: &str| (!s.is_empty()).then(|| base.join(s));
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let raw: RawRow = record.deserialize(Some(&headers)).map_err(|e| Error::parse(path, line, e.to_string()))?;
        if raw.utterance_id.is_empty() {
            return Err(Error::parse(path, line, "empty utterance_id"));
        }
        let meta = if raw.style.is_empty() {
            None
        } else {
            let style: Style = raw.style.parse().map_err(|e: Error| Error::parse(path, line, e.to_string()))?;
            let gender: Gender = raw.gender.parse().map_err(|e: Error| Error::parse(path, line, e.to_string()))?;
            Some(UtteranceMeta { style, gender })
        };
        rows.push(ManifestRow {
            utterance_id: raw.utterance_id,
            audio_path: resolve(&raw.audio_path),
            annotation_path: resolve(&raw.annotation_path),
            ground_truth_path: resolve(&raw.ground_truth_path),
            meta,
        });
    }
    rows.sort_by(|a, b| a.utterance_id.cmp(&b.utterance_id));
    if let Some(w) = rows.windows(2).find(|w| w[0].utterance_id == w[1].utterance_id) {
        return Err(Error::InvalidConfig(format!("{}: duplicate utterance_id `{}`", path.display(), w[0].utterance_id)));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_resolve_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        std::fs::write(
            &path,
            "utterance_id,audio_path,annotation_path,ground_truth_path,style,gender\n\
             b,b.wav,,b.pv,spoken,female\n\
             a,/abs/a.wav,a.lab,,sung,M\n",
        )
        .unwrap();
        let rows = load_manifest(&path).unwrap();
        assert_eq!(rows[0].utterance_id, "a");
        assert_eq!(rows[0].audio_path.as_deref(), Some(Path::new("/abs/a.wav")));
        assert_eq!(rows[1].ground_truth_path, Some(dir.path().join("b.pv")));
        assert!(rows[1].annotation_path.is_none());
        assert_eq!(rows[0].meta.unwrap().gender, Gender::Male);
    }

    #[test]
    fn bad_rows_report_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        std::fs::write(&path, "utterance_id,audio_path,style,gender\nok,a.wav,sung,f\nbad,b.wav,chanted,f\n").unwrap();
        match load_manifest(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        std::fs::write(&path, "utterance_id,audio_path\nx,a.wav,extra\n").unwrap();
        assert!(matches!(load_manifest(&path), Err(Error::Parse { line: 2, .. })));
    }
}
