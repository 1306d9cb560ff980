//! Score files: `pattern_id,true_label,score_<class>,...`, one row per pattern.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{sanitize, ScoreMatrix};
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;

/// True class index per pattern id.
pub type Truth = HashMap<String, usize>;

fn row_err(row: usize, message: impl Into<String>) -> Error {
    Error::ScoreFile { row, message: message.into() }
}

/// Reads and sanitizes a score file. Rows are numbered from 1 after the header.
pub fn load_scores(path: impl AsRef<Path>) -> Result<(ScoreMatrix, Truth)> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let header = reader.headers()?.clone();
    if header.get(0) != Some("pattern_id") || header.get(1) != Some("true_label") {
        return Err(row_err(0, "header must start with pattern_id,true_label"));
    }
    let mut classes = Vec::new();
    for h in header.iter().skip(2) {
        let name = h
            .strip_prefix("score_")
            .filter(|n| !n.is_empty())
            .ok_or_else(|| row_err(0, format!("column '{h}' is not score_<class>")))?;
        classes.push(name.to_string());
    }
    if classes.is_empty() {
        return Err(row_err(0, "no score columns"));
    }
    let class_index: HashMap<&str, usize> = classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();

    let mut ids = Vec::new();
    let mut scores = Vec::new();
    let mut truth = Truth::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| row_err(row, e.to_string()))?;
        if rec.len() != classes.len() + 2 {
            return Err(row_err(row, format!("expected {} fields, got {}", classes.len() + 2, rec.len())));
        }
        let id = rec[0].to_string();
        let label = class_index
            .get(&rec[1])
            .ok_or_else(|| row_err(row, format!("unknown label '{}'", &rec[1])))?;
        for field in rec.iter().skip(2) {
            let v: f64 = field.parse().map_err(|_| row_err(row, format!("bad score '{field}'")))?;
            scores.push(v);
        }
        if truth.insert(id.clone(), *label).is_some() {
            return Err(Error::DuplicateId(id));
        }
        ids.push(id);
    }
    let tag = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let m = ScoreMatrix::new(ids, classes, scores, tag)?;
    Ok((sanitize(&m), truth))
}

/// CSV text of a score matrix. Scores use the shortest exact decimal form.
pub fn scores_csv(m: &ScoreMatrix, truth: &Truth) -> Result<String> {
    let mut s = String::from("pattern_id,true_label");
    for c in m.class_names() {
        let _ = write!(s, ",score_{c}");
    }
    s.push('\n');
    for (i, id) in m.pattern_ids().iter().enumerate() {
        let t = *truth.get(id).ok_or_else(|| Error::MissingPattern(id.clone()))?;
        let label = m.class_names().get(t).ok_or_else(|| Error::MissingPattern(id.clone()))?;
        let _ = write!(s, "{id},{label}");
        for v in m.row(i) {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    Ok(s)
}

pub fn save_scores(path: impl AsRef<Path>, m: &ScoreMatrix, truth: &Truth) -> Result<()> {
    write_atomic(path.as_ref(), scores_csv(m, truth)?.as_bytes())
}
