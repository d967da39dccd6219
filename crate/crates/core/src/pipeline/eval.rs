//! Confusion matrices, train/test splitting and the grid sweep.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gesture_hmm::GestureBank;
use crate::grid_features::{extract_features, GridSpec};
use crate::imaging::Blob;
use crate::knn::{Backend, KnnModel, LabeledSample};
use crate::Scalar;

/// Column (and row) name for rejected gestures.
pub const WRONG_LABEL: &str = "WRONG";

/// Confusion counts, rows by true label and columns by prediction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvaluationReport {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

impl EvaluationReport {
    pub fn new(labels: Vec<String>) -> Self {
        let n = labels.len();
        EvaluationReport {
            labels,
            counts: vec![vec![0; n]; n],
        }
    }

    fn index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn record(&mut self, truth: &str, predicted: &str) -> Result<()> {
        let (t, p) = (self.index(truth)?, self.index(predicted)?);
        self.counts[t][p] += 1;
        Ok(())
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum()
    }

    /// Correct over total; 0 for an empty report.
    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            t => self.correct() as f64 / t as f64,
        }
    }

    pub fn row_total(&self, i: usize) -> usize {
        self.counts[i].iter().sum()
    }

    pub fn col_total(&self, j: usize) -> usize {
        self.counts.iter().map(|r| r[j]).sum()
    }

    pub fn row_percent(&self, i: usize, j: usize) -> f64 {
        match self.row_total(i) {
            0 => 0.0,
            t => 100.0 * self.counts[i][j] as f64 / t as f64,
        }
    }

    pub fn precision(&self, i: usize) -> Option<f64> {
        let c = self.col_total(i);
        (c > 0).then(|| self.counts[i][i] as f64 / c as f64)
    }

    pub fn recall(&self, i: usize) -> Option<f64> {
        let r = self.row_total(i);
        (r > 0).then(|| self.counts[i][i] as f64 / r as f64)
    }

    /// `truth,<pred...>,samples,precision,recall`, one row per class.
    pub fn to_csv(&self) -> String {
        let mut s = format!("truth,{},samples,precision,recall\n", self.labels.join(","));
        let opt = |v: Option<f64>| v.map(|v| format!("{v:.6}")).unwrap_or_default();
        for (i, l) in self.labels.iter().enumerate() {
            let cells: Vec<String> = self.counts[i].iter().map(usize::to_string).collect();
            let _ = writeln!(
                s,
                "{l},{},{},{},{}",
                cells.join(","),
                self.row_total(i),
                opt(self.precision(i)),
                opt(self.recall(i))
            );
        }
        s
    }

    /// Row-percent matrix for terminals, followed by the accuracy.
    pub fn to_table(&self) -> String {
        let w = self.labels.iter().map(String::len).max().unwrap_or(0).max(6);
        let mut s = format!("{:>w$}", "truth\\pred");
        for l in &self.labels {
            let _ = write!(s, " {:>w$}", l);
        }
        s.push('\n');
        for (i, l) in self.labels.iter().enumerate() {
            let _ = write!(s, "{:>w$}", l);
            for j in 0..self.labels.len() {
                let _ = write!(s, " {:>w$.1}", self.row_percent(i, j));
            }
            s.push('\n');
        }
        let _ = writeln!(s, "accuracy {:.3} ({}/{})", self.accuracy(), self.correct(), self.total());
        s
    }
}

/// Shuffles with `seed` and puts the first `round(n * train_fraction)`
/// items in the training half. Both halves are non-empty.
pub fn train_test_split<T>(mut items: Vec<T>, train_fraction: f64, seed: u64) -> Result<(Vec<T>, Vec<T>)> {
    if items.len() < 2 {
        return Err(Error::Empty("dataset for split"));
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!("train fraction {train_fraction} not in (0,1)")));
    }
    items.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n = items.len();
    let cut = ((n as f64 * train_fraction).round() as usize).clamp(1, n - 1);
    let test = items.split_off(cut);
    Ok((items, test))
}

pub fn evaluate_poses<T: Scalar>(model: &KnnModel<T>, test: &[LabeledSample<T>]) -> Result<EvaluationReport> {
    if test.is_empty() {
        return Err(Error::Empty("test set"));
    }
    let mut labels = model.labels();
    for s in test {
        if !labels.contains(&s.label) {
            labels.push(s.label.clone());
        }
    }
    let mut report = EvaluationReport::new(labels);
    for s in test {
        let c = model.classify(&s.features)?;
        report.record(&s.label, &c.label)?;
    }
    Ok(report)
}

/// Scores observation sequences against a bank; `None` truth marks an
/// impostor whose correct answer is rejection.
pub fn evaluate_gestures<T: Scalar>(
    bank: &GestureBank<T>,
    cases: &[(Option<String>, Vec<usize>)],
) -> Result<EvaluationReport> {
    if cases.is_empty() {
        return Err(Error::Empty("gesture test set"));
    }
    let mut labels: Vec<String> = bank.names().iter().map(|s| s.to_string()).collect();
    labels.push(WRONG_LABEL.to_string());
    let mut report = EvaluationReport::new(labels);
    for (truth, obs) in cases {
        let d = bank.classify(obs)?;
        report.record(truth.as_deref().unwrap_or(WRONG_LABEL), d.label_or_wrong())?;
    }
    Ok(report)
}

pub fn samples_for_grid<T: Scalar>(hands: &[(String, Blob)], grid: GridSpec) -> Vec<LabeledSample<T>> {
    hands
        .iter()
        .map(|(l, b)| LabeledSample::new(l.clone(), extract_features(b, grid)))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub grid: GridSpec,
    pub accuracy: f64,
    pub report: EvaluationReport,
}

/// Fits and evaluates one model per grid over the same seeded split.
pub fn sweep_grids(
    hands: &[(String, Blob)],
    grids: &[GridSpec],
    k: usize,
    backend: Backend,
    train_fraction: f64,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let idx: Vec<usize> = (0..hands.len()).collect();
    let (train, test) = train_test_split(idx, train_fraction, seed)?;
    let pick = |ids: &[usize]| ids.iter().map(|&i| hands[i].clone()).collect::<Vec<_>>();
    let (train, test) = (pick(&train), pick(&test));
    grids
        .iter()
        .map(|&grid| {
            let model = KnnModel::<f64>::fit(samples_for_grid(&train, grid), k, backend)?;
            let report = evaluate_poses(&model, &samples_for_grid(&test, grid))?;
            Ok(SweepRow {
                grid,
                accuracy: report.accuracy(),
                report,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("grid,accuracy\n");
    for r in rows {
        let _ = writeln!(s, "{},{:.3}", r.grid, r.accuracy);
    }
    s
}

pub fn sweep_table(rows: &[SweepRow]) -> String {
    let mut s = format!("{:>8}  {:>8}\n", "grid", "accuracy");
    for r in rows {
        let _ = writeln!(s, "{:>8}  {:>8.3}", r.grid.to_string(), r.accuracy);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_arithmetic() {
        let mut r = EvaluationReport::new(vec!["a".into(), "b".into()]);
        for i in 0..1000 {
            r.record("a", if i < 3 { "b" } else { "a" }).unwrap();
        }
        assert_eq!(r.accuracy(), 0.997);
        assert_eq!(r.row_total(0), 1000);
        assert_eq!(r.recall(0), Some(0.997));
        assert_eq!(r.precision(1), Some(0.0));
        assert_eq!(r.recall(1), None);
        assert!(r.record("c", "a").is_err());
        assert!(r.to_csv().starts_with("truth,a,b,samples,precision,recall\na,997,3,1000,"));
    }

    #[test]
    fn split_is_seeded_and_disjoint() {
        let items: Vec<usize> = (0..100).collect();
        let (a, b) = train_test_split(items.clone(), 0.7, 4).unwrap();
        assert_eq!((a.len(), b.len()), (70, 30));
        let (a2, _) = train_test_split(items.clone(), 0.7, 4).unwrap();
        assert_eq!(a, a2);
        let mut all = [a, b].concat();
        all.sort();
        assert_eq!(all, items);
        assert!(train_test_split(vec![1], 0.7, 0).is_err());
    }
}
