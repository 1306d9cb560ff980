use std::collections::{BTreeSet, HashSet};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fusion::{FoldSplit, Truth};

const COLUMNS: [&str; 4] = ["pattern_id", "wav_path", "label", "fold"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestRow {
    pub pattern_id: String,
    /// Resolved against the manifest's directory when relative.
    pub wav_path: PathBuf,
    pub label: String,
    pub fold: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    rows: Vec<ManifestRow>,
    n_folds: usize,
}

fn row_err(row: usize, message: impl Into<String>) -> Error {
    Error::Manifest { row, message: message.into() }
}

impl Manifest {
    /// Validates uniqueness of ids and that folds cover exactly `1..=K`.
    pub fn new(rows: Vec<ManifestRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(row_err(0, "manifest has no rows"));
        }
        let mut seen = HashSet::new();
        for r in &rows {
            if !seen.insert(r.pattern_id.as_str()) {
                return Err(Error::DuplicateId(r.pattern_id.clone()));
            }
        }
        let folds: BTreeSet<usize> = rows.iter().map(|r| r.fold).collect();
        let n_folds = folds.len();
        if folds.first() != Some(&1) || folds.last() != Some(&n_folds) {
            return Err(row_err(0, format!("folds {folds:?} are not a contiguous range starting at 1")));
        }
        Ok(Self { rows, n_folds })
    }

    pub fn rows(&self) -> &[ManifestRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_folds(&self) -> usize {
        self.n_folds
    }

    /// Sorted distinct labels; a label's index here is its class index.
    pub fn classes(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self.rows.iter().map(|r| r.label.as_str()).collect();
        set.into_iter().map(str::to_string).collect()
    }

    pub fn class_index(&self, label: &str) -> Option<usize> {
        self.classes().iter().position(|c| c == label)
    }

    pub fn truth(&self) -> Truth {
        let classes = self.classes();
        self.rows
            .iter()
            .map(|r| (r.pattern_id.clone(), classes.binary_search(&r.label).unwrap()))
            .collect()
    }

    /// Fold `k` tests on rows with `fold == k` and trains on the rest.
    pub fn splits(&self) -> Vec<FoldSplit> {
        (1..=self.n_folds)
            .map(|k| {
                let (test, train): (Vec<&ManifestRow>, Vec<&ManifestRow>) =
                    self.rows.iter().partition(|r| r.fold == k);
                FoldSplit {
                    fold_id: k,
                    train: train.into_iter().map(|r| r.pattern_id.clone()).collect(),
                    test: test.into_iter().map(|r| r.pattern_id.clone()).collect(),
                }
            })
            .collect()
    }
}

/// Reads a CSV manifest with columns `pattern_id,wav_path,label,fold` in any
/// order. Rows are numbered from 1 after the header.
pub fn parse_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let header = reader.headers()?.clone();
    let mut idx = [0usize; 4];
    for (slot, name) in idx.iter_mut().zip(COLUMNS) {
        *slot = header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| row_err(0, format!("missing column '{name}'")))?;
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| row_err(row, e.to_string()))?;
        let field = |k: usize| rec.get(idx[k]).unwrap_or("");
        let pattern_id = field(0);
        if pattern_id.is_empty() {
            return Err(row_err(row, "empty pattern_id"));
        }
        let fold_text = field(3);
        let fold: usize = fold_text
            .parse()
            .ok()
            .filter(|&f| f >= 1)
            .ok_or_else(|| row_err(row, format!("fold '{fold_text}' is not a positive integer")))?;
        let wav = PathBuf::from(field(1));
        rows.push(ManifestRow {
            pattern_id: pattern_id.to_string(),
            wav_path: if wav.is_relative() { base.join(wav) } else { wav },
            label: field(2).to_string(),
            fold,
        });
    }
    Manifest::new(rows)
}

/// CSV text for `rows`, with paths written as given.
pub fn manifest_csv(rows: &[ManifestRow]) -> String {
    let mut s = COLUMNS.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&format!("{},{},{},{}\n", r.pattern_id, r.wav_path.display(), r.label, r.fold));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, text: &str) -> PathBuf {
        let p = dir.join("manifest.csv");
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn well_formed() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "pattern_id,wav_path,label,fold\na,a.wav,dog,1\nb,/abs/b.wav,cat,2\nc,sub/c.wav,dog,1\n",
        );
        let m = parse_manifest(&p).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m.n_folds(), 2);
        assert_eq!(m.rows()[0].wav_path, dir.path().join("a.wav"));
        assert_eq!(m.rows()[1].wav_path, PathBuf::from("/abs/b.wav"));
        assert_eq!(m.classes(), vec!["cat".to_string(), "dog".to_string()]);
        assert_eq!(m.truth()["b"], 0);
        let s = m.splits();
        assert_eq!(s[0].test, vec!["a".to_string(), "c".to_string()]);
        assert_eq!(s[0].train, vec!["b".to_string()]);
    }

    #[test]
    fn column_order_is_free() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "fold,label,wav_path,pattern_id\n1,dog,x.wav,x\n");
        assert_eq!(parse_manifest(&p).unwrap().rows()[0].pattern_id, "x");
    }

    #[test]
    fn errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "pattern_id,wav_path,label,fold\na,a.wav,dog,1\na,b.wav,cat,1\n");
        assert!(matches!(parse_manifest(&p), Err(Error::DuplicateId(id)) if id == "a"));
        let p = write(dir.path(), "pattern_id,wav_path,label,fold\na,a.wav,dog,1\nb,b.wav,cat,A\n");
        assert!(matches!(parse_manifest(&p), Err(Error::Manifest { row: 2, .. })));
        let p = write(dir.path(), "pattern_id,wav_path,fold\na,a.wav,1\n");
        let e = parse_manifest(&p).unwrap_err();
        assert!(e.to_string().contains("label"), "{e}");
        let p = write(dir.path(), "pattern_id,wav_path,label,fold\na,a.wav,dog,1\nb,b.wav,cat,3\n");
        assert!(matches!(parse_manifest(&p), Err(Error::Manifest { row: 0, .. })));
        let p = write(dir.path(), "pattern_id,wav_path,label,fold\na,a.wav,dog,0\n");
        assert!(matches!(parse_manifest(&p), Err(Error::Manifest { row: 1, .. })));
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![
            ManifestRow { pattern_id: "a".into(), wav_path: dir.path().join("a.wav"), label: "x".into(), fold: 1 },
            ManifestRow { pattern_id: "b".into(), wav_path: dir.path().join("b.wav"), label: "y".into(), fold: 2 },
        ];
        let p = write(dir.path(), &manifest_csv(&rows));
        assert_eq!(parse_manifest(&p).unwrap().rows(), &rows[..]);
    }
}
