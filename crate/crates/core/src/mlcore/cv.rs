use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use super::encode::{class_counts, EncodedDataset};
use super::metrics::{accuracy, auc_multiclass, confusion};
use super::model::{Algorithm, Learner, Prediction, TrainParams};
use crate::error::{Error, Result};
use crate::features::{Dataset, Task};
use crate::rng;

/// Fold index per row. Each class is shuffled on its own stream and dealt
/// round-robin, continuing the deal across classes so fold sizes differ by
/// at most one.
pub fn stratified_folds(y: &[usize], n_classes: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::invalid("cross-validation needs at least 2 folds"));
    }
    let counts = class_counts(y, n_classes);
    if counts.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::invalid("cross-validation needs at least two classes"));
    }
    if let Some((c, &n)) = counts.iter().enumerate().find(|(_, &n)| n > 0 && n < k) {
        return Err(Error::invalid(format!(
            "class {c} has {n} rows, fewer than the {k} folds"
        )));
    }
    let mut fold = vec![0; y.len()];
    let mut deal = 0;
    for c in 0..n_classes {
        let mut idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == c).collect();
        idx.shuffle(&mut rng::stream(seed, "cv-class", c as u64));
        for i in idx {
            fold[i] = deal % k;
            deal += 1;
        }
    }
    Ok(fold)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub algorithm: Algorithm,
    pub task: Task,
    pub folds: usize,
    pub n_rows: usize,
    pub n_classes: usize,
    pub class_counts: Vec<usize>,
    pub fold_accuracy: Vec<f64>,
    /// None where a test fold lacks a class.
    pub fold_auc: Vec<Option<f64>>,
    /// Pooled over all out-of-fold predictions; equals trace/total.
    pub accuracy: f64,
    pub auc: f64,
    pub confusion: Vec<Vec<u64>>,
    pub majority_baseline: f64,
}

impl EvalReport {
    pub fn mean_fold_accuracy(&self) -> f64 {
        self.fold_accuracy.iter().sum::<f64>() / self.fold_accuracy.len() as f64
    }
}

/// Out-of-fold predictions for every row, in row order.
pub fn out_of_fold(
    d: &EncodedDataset,
    algo: Algorithm,
    params: &TrainParams,
    k: usize,
    seed: u64,
) -> Result<(Vec<usize>, Vec<Prediction>)> {
    let folds = stratified_folds(&d.y, d.n_classes, k, seed)?;
    let per_fold: Vec<Vec<(usize, Prediction)>> = (0..k)
        .into_par_iter()
        .map(|f| -> Result<Vec<(usize, Prediction)>> {
            let train: Vec<usize> = (0..d.n_rows).filter(|&i| folds[i] != f).collect();
            let model = Learner::fit(d, &train, algo, params, rng::derive_seed(seed, "fold", f as u64))?;
            Ok((0..d.n_rows)
                .filter(|&i| folds[i] == f)
                .map(|i| (i, Prediction::from_probabilities(model.predict_proba(d.row(i)))))
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut preds: Vec<Option<Prediction>> = vec![None; d.n_rows];
    for (i, p) in per_fold.into_iter().flatten() {
        preds[i] = Some(p);
    }
    Ok((folds, preds.into_iter().map(|p| p.expect("each row is tested once")).collect()))
}

pub fn cross_validate_encoded(
    d: &EncodedDataset,
    task: Task,
    algo: Algorithm,
    params: &TrainParams,
    k: usize,
    seed: u64,
) -> Result<EvalReport> {
    let (folds, preds) = out_of_fold(d, algo, params, k, seed)?;
    let predicted: Vec<usize> = preds.iter().map(|p| p.class).collect();
    let probs: Vec<Vec<f64>> = preds.iter().map(|p| p.probabilities.clone()).collect();
    let mut fold_accuracy = Vec::with_capacity(k);
    let mut fold_auc = Vec::with_capacity(k);
    for f in 0..k {
        let idx: Vec<usize> = (0..d.n_rows).filter(|&i| folds[i] == f).collect();
        let t: Vec<usize> = idx.iter().map(|&i| d.y[i]).collect();
        let p: Vec<usize> = idx.iter().map(|&i| predicted[i]).collect();
        fold_accuracy.push(accuracy(&t, &p));
        let fp: Vec<Vec<f64>> = idx.iter().map(|&i| probs[i].clone()).collect();
        fold_auc.push(auc_multiclass(&fp, &t, d.n_classes).ok());
    }
    let counts = d.class_counts();
    Ok(EvalReport {
        algorithm: algo,
        task,
        folds: k,
        n_rows: d.n_rows,
        n_classes: d.n_classes,
        fold_accuracy,
        fold_auc,
        accuracy: accuracy(&d.y, &predicted),
        auc: auc_multiclass(&probs, &d.y, d.n_classes)?,
        confusion: confusion(&d.y, &predicted, d.n_classes),
        majority_baseline: *counts.iter().max().unwrap_or(&0) as f64 / d.n_rows as f64,
        class_counts: counts,
    })
}

pub fn cross_validate(
    d: &Dataset,
    task: Task,
    algo: Algorithm,
    params: &TrainParams,
    k: usize,
    seed: u64,
) -> Result<EvalReport> {
    let e = EncodedDataset::from_dataset(d, task)?;
    cross_validate_encoded(&e, task, algo, params, k, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn folds_partition_rows() {
        let y = vec![0, 1, 0, 1, 0, 1, 0, 1, 0, 1];
        let f = stratified_folds(&y, 2, 5, 9).unwrap();
        for k in 0..5 {
            let members: Vec<usize> = (0..10).filter(|&i| f[i] == k).collect();
            assert_eq!(members.len(), 2);
            assert_eq!(members.iter().filter(|&&i| y[i] == 1).count(), 1);
        }
        assert!(stratified_folds(&[0, 0, 0, 1], 2, 2, 0).is_err());
        assert!(stratified_folds(&[0, 0], 2, 2, 0).is_err());
    }

    fn noisy(n: usize, copy_label: bool, seed: u64) -> EncodedDataset {
        let mut r = rng::stream(seed, "test-data", 0);
        let y: Vec<usize> = (0..n).map(|i| usize::from(i % 100 < 46)).collect();
        let rows: Vec<Vec<f64>> = y
            .iter()
            .map(|&l| {
                let mut v: Vec<f64> = (0..4).map(|_| r.gen::<f64>()).collect();
                if copy_label {
                    v.push(l as f64);
                }
                v
            })
            .collect();
        EncodedDataset::from_matrix(&rows, y, 2).unwrap()
    }

    #[test]
    fn baseline_and_confusion_consistency() {
        let d = noisy(200, true, 1);
        let r = cross_validate_encoded(&d, Task::Success, Algorithm::NaiveBayes, &TrainParams::default(), 5, 3)
            .unwrap();
        assert!((r.majority_baseline - 0.54).abs() < 1e-12);
        let trace: u64 = (0..2).map(|c| r.confusion[c][c]).sum();
        assert_eq!(r.accuracy, trace as f64 / 200.0);
        for c in 0..2 {
            assert_eq!(r.confusion[c].iter().sum::<u64>() as usize, r.class_counts[c]);
        }
        assert!(r.accuracy >= 0.95);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let d = noisy(150, false, 2);
        let params = TrainParams::default();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| cross_validate_encoded(&d, Task::Success, Algorithm::RandomForest, &params, 5, 8).unwrap())
        };
        assert_eq!(run(1), run(4));
    }
}
