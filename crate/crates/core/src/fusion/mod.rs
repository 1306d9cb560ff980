//! Score fusion and fold-wise evaluation.

mod eval;
mod io;
mod prototype;

use std::collections::HashSet;

pub use eval::{evaluate, write_report, EvalReport, FoldSplit};
pub use io::{load_scores, save_scores, scores_csv, Truth};
pub use prototype::{prototype_score, prototype_train, Prototypes};

use crate::error::{invalid, Error, Result};

/// Patterns x classes scores, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    pattern_ids: Vec<String>,
    class_names: Vec<String>,
    scores: Vec<f64>,
    pub source_tag: String,
}

impl ScoreMatrix {
    pub fn new(
        pattern_ids: Vec<String>,
        class_names: Vec<String>,
        scores: Vec<f64>,
        source_tag: impl Into<String>,
    ) -> Result<Self> {
        if class_names.is_empty() {
            return Err(invalid("score matrix needs at least one class"));
        }
        if scores.len() != pattern_ids.len() * class_names.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} scores for {} patterns x {} classes",
                scores.len(),
                pattern_ids.len(),
                class_names.len()
            )));
        }
        let mut seen = HashSet::with_capacity(pattern_ids.len());
        for id in &pattern_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        Ok(Self { pattern_ids, class_names, scores, source_tag: source_tag.into() })
    }

    pub fn from_rows(
        pattern_ids: Vec<String>,
        class_names: Vec<String>,
        rows: &[Vec<f64>],
        source_tag: impl Into<String>,
    ) -> Result<Self> {
        if rows.iter().any(|r| r.len() != class_names.len()) {
            return Err(Error::ShapeMismatch("ragged score rows".into()));
        }
        Self::new(pattern_ids, class_names, rows.concat(), source_tag)
    }

    pub fn pattern_ids(&self) -> &[String] {
        &self.pattern_ids
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn n_patterns(&self) -> usize {
        self.pattern_ids.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let k = self.n_classes();
        &self.scores[i * k..(i + 1) * k]
    }

    pub fn get(&self, i: usize, c: usize) -> f64 {
        self.scores[i * self.n_classes() + c]
    }

    fn with_scores(&self, scores: Vec<f64>, tag: String) -> Self {
        Self {
            pattern_ids: self.pattern_ids.clone(),
            class_names: self.class_names.clone(),
            scores,
            source_tag: tag,
        }
    }

    /// Rows for `ids`, in that order.
    pub fn select(&self, ids: &[String]) -> Result<Self> {
        let k = self.n_classes();
        let mut scores = Vec::with_capacity(ids.len() * k);
        for id in ids {
            let i = self
                .pattern_ids
                .iter()
                .position(|p| p == id)
                .ok_or_else(|| Error::MissingPattern(id.clone()))?;
            scores.extend_from_slice(self.row(i));
        }
        Self::new(ids.to_vec(), self.class_names.clone(), scores, self.source_tag.clone())
    }

    /// Applies `f` to every score.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        self.with_scores(self.scores.iter().map(|&v| f(v)).collect(), self.source_tag.clone())
    }
}

/// Replaces NaN and infinite scores with 0.
pub fn sanitize(m: &ScoreMatrix) -> ScoreMatrix {
    m.map(|v| if v.is_finite() { v } else { 0.0 })
}

/// Pairwise (cascade) summation.
pub(crate) fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        2 => v[0] + v[1],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// Standardizes all entries to mean 0 and population standard deviation 1.
pub fn normalize(m: &ScoreMatrix) -> Result<ScoreMatrix> {
    let n = m.scores.len();
    if n < 2 {
        return Err(invalid("normalize needs at least two scores"));
    }
    let mean = pairwise_sum(&m.scores) / n as f64;
    let dev: Vec<f64> = m.scores.iter().map(|v| (v - mean) * (v - mean)).collect();
    let std = (pairwise_sum(&dev) / n as f64).sqrt();
    if !(std > 0.0) {
        return Err(invalid("cannot normalize a constant score matrix"));
    }
    Ok(m.map(|v| (v - mean) / std))
}

/// Mean of `values`, independent of their order: sorted, then summed pairwise.
fn order_free_mean(values: &mut [f64]) -> f64 {
    if values.iter().all(|&v| v == values[0]) {
        return values[0];
    }
    values.sort_by(f64::total_cmp);
    pairwise_sum(values) / values.len() as f64
}

/// Entrywise mean of the members' scores.
pub fn sum_rule(members: &[ScoreMatrix]) -> Result<ScoreMatrix> {
    let first = members.first().ok_or_else(|| invalid("sum rule over zero members"))?;
    for m in &members[1..] {
        if m.pattern_ids != first.pattern_ids {
            return Err(Error::ShapeMismatch(format!(
                "member '{}' lists different patterns than '{}'",
                m.source_tag, first.source_tag
            )));
        }
        if m.class_names != first.class_names {
            return Err(Error::ShapeMismatch(format!(
                "member '{}' lists different classes than '{}'",
                m.source_tag, first.source_tag
            )));
        }
    }
    let mut column = vec![0.0; members.len()];
    let scores = (0..first.scores.len())
        .map(|e| {
            for (slot, m) in column.iter_mut().zip(members) {
                *slot = m.scores[e];
            }
            order_free_mean(&mut column)
        })
        .collect();
    let tag = members.iter().map(|m| m.source_tag.as_str()).collect::<Vec<_>>().join("+");
    Ok(first.with_scores(scores, tag))
}

/// Index of the largest score per pattern; ties go to the lowest index.
pub fn predict(m: &ScoreMatrix) -> Vec<usize> {
    (0..m.n_patterns())
        .map(|i| {
            let row = m.row(i);
            let mut best = 0;
            for (c, &v) in row.iter().enumerate().skip(1) {
                if v > row[best] {
                    best = c;
                }
            }
            best
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    fn classes(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("c{i}")).collect()
    }

    fn sm(rows: &[Vec<f64>]) -> ScoreMatrix {
        ScoreMatrix::from_rows(ids(rows.len()), classes(rows[0].len()), rows, "t").unwrap()
    }

    #[test]
    fn sanitize_rules() {
        let m = sanitize(&sm(&[vec![f64::NAN, 1.0]]));
        assert_eq!(m.scores(), &[0.0, 1.0]);
        let m = sanitize(&sm(&[vec![f64::NAN, f64::INFINITY, f64::NEG_INFINITY]]));
        assert_eq!(m.scores(), &[0.0, 0.0, 0.0]);
        let finite = sm(&[vec![0.2, -3.0]]);
        assert_eq!(sanitize(&finite), finite);
        assert_eq!(sanitize(&sanitize(&m)), sanitize(&m));
    }

    #[test]
    fn normalize_rules() {
        let n = normalize(&sm(&[vec![0.0, 2.0]])).unwrap();
        assert_eq!(n.scores(), &[-1.0, 1.0]);
        let again = normalize(&n).unwrap();
        for (a, b) in again.scores().iter().zip(n.scores()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(normalize(&sm(&[vec![3.0, 3.0]])).is_err());
        assert!(normalize(&sm(&[vec![3.0]])).is_err());
    }

    #[test]
    fn sum_rule_examples() {
        let a = sm(&[vec![1.0, 0.0]]);
        let b = sm(&[vec![0.0, 1.0]]);
        assert_eq!(sum_rule(&[a.clone(), b]).unwrap().scores(), &[0.5, 0.5]);
        assert_eq!(sum_rule(std::slice::from_ref(&a)).unwrap().scores(), a.scores());
        let odd = sm(&[vec![0.1, 0.7, 0.2]]);
        assert_eq!(sum_rule(&vec![odd.clone(); 7]).unwrap().scores(), odd.scores());
        assert!(sum_rule(&[]).is_err());
    }

    #[test]
    fn sum_rule_rejects_mismatch() {
        let a = sm(&[vec![1.0, 0.0]]);
        let b = ScoreMatrix::from_rows(vec!["x".into()], classes(2), &[vec![0.0, 1.0]], "u").unwrap();
        assert!(matches!(sum_rule(&[a.clone(), b]), Err(Error::ShapeMismatch(_))));
        let c = ScoreMatrix::from_rows(ids(1), vec!["a".into(), "b".into()], &[vec![0.0, 1.0]], "u").unwrap();
        assert!(matches!(sum_rule(&[a, c]), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn predict_and_ties() {
        assert_eq!(predict(&sm(&[vec![0.1, 0.9]])), vec![1]);
        assert_eq!(predict(&sm(&[vec![0.5, 0.5]])), vec![0]);
        assert_eq!(predict(&sm(&[vec![-1.0, 2.0, 2.0]])), vec![1]);
    }

    #[test]
    fn select_reorders_rows() {
        let m = sm(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let s = m.select(&["p1".into(), "p0".into()]).unwrap();
        assert_eq!(s.scores(), &[3.0, 4.0, 1.0, 2.0]);
        assert!(matches!(m.select(&["q".into()]), Err(Error::MissingPattern(_))));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let r = ScoreMatrix::new(vec!["a".into(), "a".into()], classes(1), vec![0.0, 1.0], "t");
        assert!(matches!(r, Err(Error::DuplicateId(id)) if id == "a"));
        assert!(ScoreMatrix::new(ids(2), classes(2), vec![0.0; 3], "t").is_err());
    }
}
