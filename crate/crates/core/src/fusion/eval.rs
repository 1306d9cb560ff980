use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::{pairwise_sum, predict, ScoreMatrix, Truth};
use crate::error::{invalid, Error, Result};
use crate::fsutil::write_atomic;

/// One cross-validation fold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoldSplit {
    pub fold_id: usize,
    pub train: Vec<String>,
    pub test: Vec<String>,
}

impl FoldSplit {
    pub fn new(fold_id: usize, train: Vec<String>, test: Vec<String>) -> Result<Self> {
        let train_set: HashSet<&str> = train.iter().map(String::as_str).collect();
        if let Some(id) = test.iter().find(|id| train_set.contains(id.as_str())) {
            return Err(invalid(format!("fold {fold_id}: pattern '{id}' is on both sides")));
        }
        Ok(Self { fold_id, train, test })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub class_names: Vec<String>,
    pub fold_ids: Vec<usize>,
    pub fold_accuracy: Vec<f64>,
    pub fold_sizes: Vec<usize>,
    pub mean_accuracy: f64,
    /// `None` for classes with no test patterns.
    pub per_class_accuracy: Vec<Option<f64>>,
    /// `confusion[truth][predicted]`, summed over folds.
    pub confusion: Vec<Vec<usize>>,
}

/// Accuracy of `m`'s argmax decisions on each fold's test patterns.
pub fn evaluate(splits: &[FoldSplit], m: &ScoreMatrix, truth: &Truth) -> Result<EvalReport> {
    if splits.is_empty() {
        return Err(invalid("evaluation needs at least one fold"));
    }
    let k = m.n_classes();
    let row_of: HashMap<&str, usize> =
        m.pattern_ids().iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let predicted = predict(m);
    let mut confusion = vec![vec![0usize; k]; k];
    let mut fold_accuracy = Vec::with_capacity(splits.len());
    let mut fold_sizes = Vec::with_capacity(splits.len());
    for split in splits {
        if split.test.is_empty() {
            return Err(invalid(format!("fold {} has no test patterns", split.fold_id)));
        }
        let mut correct = 0;
        for id in &split.test {
            let row = *row_of.get(id.as_str()).ok_or_else(|| Error::MissingPattern(id.clone()))?;
            let t = *truth.get(id).ok_or_else(|| Error::MissingPattern(id.clone()))?;
            if t >= k {
                return Err(invalid(format!("label index {t} for '{id}' outside {k} classes")));
            }
            let p = predicted[row];
            confusion[t][p] += 1;
            correct += (p == t) as usize;
        }
        fold_accuracy.push(correct as f64 / split.test.len() as f64);
        fold_sizes.push(split.test.len());
    }
    let mean_accuracy = pairwise_sum(&fold_accuracy) / fold_accuracy.len() as f64;
    let per_class_accuracy = confusion
        .iter()
        .enumerate()
        .map(|(c, row)| {
            let total: usize = row.iter().sum();
            (total > 0).then(|| row[c] as f64 / total as f64)
        })
        .collect();
    Ok(EvalReport {
        class_names: m.class_names().to_vec(),
        fold_ids: splits.iter().map(|s| s.fold_id).collect(),
        fold_accuracy,
        fold_sizes,
        mean_accuracy,
        per_class_accuracy,
        confusion,
    })
}

impl EvalReport {
    /// `fold,n_test,accuracy` rows followed by a `mean` row.
    pub fn folds_csv(&self) -> String {
        let mut s = String::from("fold,n_test,accuracy\n");
        for ((id, n), acc) in self.fold_ids.iter().zip(&self.fold_sizes).zip(&self.fold_accuracy) {
            let _ = writeln!(s, "{id},{n},{acc}");
        }
        let total: usize = self.fold_sizes.iter().sum();
        let _ = writeln!(s, "mean,{total},{}", self.mean_accuracy);
        s
    }

    /// Confusion matrix with a header row of predicted classes.
    pub fn confusion_csv(&self) -> String {
        let mut s = String::from("true\\predicted");
        for c in &self.class_names {
            let _ = write!(s, ",{c}");
        }
        s.push('\n');
        for (name, row) in self.class_names.iter().zip(&self.confusion) {
            s.push_str(name);
            for v in row {
                let _ = write!(s, ",{v}");
            }
            s.push('\n');
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "mean accuracy over {} folds: {:.4}", self.fold_ids.len(), self.mean_accuracy);
        for ((id, n), acc) in self.fold_ids.iter().zip(&self.fold_sizes).zip(&self.fold_accuracy) {
            let _ = writeln!(s, "  fold {id:>3}: {acc:.4}  ({n} test patterns)");
        }
        let _ = writeln!(s, "per class:");
        for (name, acc) in self.class_names.iter().zip(&self.per_class_accuracy) {
            match acc {
                Some(a) => {
                    let _ = writeln!(s, "  {name}: {a:.4}");
                }
                None => {
                    let _ = writeln!(s, "  {name}: (no test patterns)");
                }
            }
        }
        s
    }
}

/// Writes `<stem>.csv`, `<stem>_confusion.csv`, `<stem>.txt` and
/// `<stem>.json` into `dir`.
pub fn write_report(report: &EvalReport, dir: impl AsRef<Path>, stem: &str) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    write_atomic(&dir.join(format!("{stem}.csv")), report.folds_csv().as_bytes())?;
    write_atomic(&dir.join(format!("{stem}_confusion.csv")), report.confusion_csv().as_bytes())?;
    write_atomic(&dir.join(format!("{stem}.txt")), report.summary().as_bytes())?;
    write_atomic(&dir.join(format!("{stem}.json")), &serde_json::to_vec_pretty(report)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (ScoreMatrix, Truth) {
        let ids: Vec<String> = (0..4).map(|i| format!("p{i}")).collect();
        let m = ScoreMatrix::from_rows(
            ids.clone(),
            vec!["a".into(), "b".into()],
            &[vec![0.9, 0.1], vec![0.2, 0.8], vec![0.6, 0.4], vec![0.3, 0.7]],
            "t",
        )
        .unwrap();
        // p3 is labelled "a" but predicted "b"
        let truth = ids.into_iter().zip([0, 1, 0, 0]).collect();
        (m, truth)
    }

    fn split(id: usize, test: &[&str]) -> FoldSplit {
        FoldSplit::new(id, vec![], test.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    #[test]
    fn fold_accuracies_and_mean() {
        let (m, truth) = setup();
        let r = evaluate(&[split(1, &["p0", "p1"]), split(2, &["p2", "p3"])], &m, &truth).unwrap();
        assert_eq!(r.fold_accuracy, vec![1.0, 0.5]);
        assert_eq!(r.mean_accuracy, 0.75);
        assert_eq!(r.confusion, vec![vec![2, 1], vec![0, 1]]);
        assert_eq!(r.per_class_accuracy, vec![Some(2.0 / 3.0), Some(1.0)]);
        assert!(r.folds_csv().ends_with("mean,4,0.75\n"));
        assert!(r.summary().contains("0.7500"));
    }

    #[test]
    fn all_correct() {
        let (m, mut truth) = setup();
        truth.insert("p3".into(), 1);
        let r = evaluate(&[split(1, &["p0", "p1"]), split(2, &["p2", "p3"])], &m, &truth).unwrap();
        assert!(r.fold_accuracy.iter().all(|&a| a == 1.0));
    }

    #[test]
    fn missing_pattern() {
        let (m, truth) = setup();
        let r = evaluate(&[split(1, &["p0", "zz"])], &m, &truth);
        assert!(matches!(r, Err(Error::MissingPattern(id)) if id == "zz"));
    }

    #[test]
    fn split_sides_are_disjoint() {
        assert!(FoldSplit::new(1, vec!["a".into()], vec!["a".into()]).is_err());
    }

    #[test]
    fn report_files() {
        let (m, truth) = setup();
        let r = evaluate(&[split(1, &["p0", "p1", "p2", "p3"])], &m, &truth).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_report(&r, dir.path(), "eval").unwrap();
        for f in ["eval.csv", "eval_confusion.csv", "eval.txt", "eval.json"] {
            assert!(dir.path().join(f).is_file(), "{f}");
        }
        let conf = std::fs::read_to_string(dir.path().join("eval_confusion.csv")).unwrap();
        assert_eq!(conf, "true\\predicted,a,b\na,2,1\nb,0,1\n");
    }
}
