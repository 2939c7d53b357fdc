use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhoneSegment {
    pub utterance_id: String,
    pub start_s: f64,
    pub end_s: f64,
    pub label: String,
}

impl PhoneSegment {
    pub fn duration_s(&self) -> f64 {
        self.end_s - self.start_s
    }

    /// Frame centres are assigned to `[start_s, end_s)`.
    pub fn contains(&self, time_s: f64) -> bool {
        time_s >= self.start_s && time_s < self.end_s
    }
}

/// Problems that do not stop loading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnnotationIssue {
    /// Segment `second` (by line) starts before segment `first` ends.
    Overlap { first_line: usize, second_line: usize },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Annotations {
    /// Sorted by start time.
    pub segments: Vec<PhoneSegment>,
    pub issues: Vec<AnnotationIssue>,
}

/// Reads whitespace-separated `start end label` rows for one utterance.
/// Blank lines and `#` comments are skipped.
pub fn load_annotations(path: &Path, utterance_id: &str) -> Result<Annotations> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(path, line_no, format!("expected `start end label`, found {} fields", fields.len())));
        }
        let time = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(path, line_no, format!("bad time `{s}`")))
        };
        let (start_s, end_s) = (time(fields[0])?, time(fields[1])?);
        if end_s <= start_s {
            return Err(Error::parse(path, line_no, format!("segment ends at {end_s} before it starts at {start_s}")));
        }
        rows.push((
            line_no,
            PhoneSegment {
                utterance_id: utterance_id.to_string(),
                start_s,
                end_s,
                label: fields[2].to_string(),
            },
        ));
    }
    rows.sort_by(|a, b| a.1.start_s.total_cmp(&b.1.start_s).then(a.0.cmp(&b.0)));
    let mut issues = Vec::new();
    // compare against the furthest-reaching earlier segment
    let mut reach: Option<(usize, f64)> = None;
    for (line, seg) in &rows {
        if let Some((first_line, end)) = reach {
            if seg.start_s < end {
                issues.push(AnnotationIssue::Overlap {
                    first_line,
                    second_line: *line,
                });
            }
        }
        if reach.is_none_or(|(_, end)| seg.end_s > end) {
            reach = Some((*line, seg.end_s));
        }
    }
    Ok(Annotations {
        segments: rows.into_iter().map(|r| r.1).collect(),
        issues,
    })
}
