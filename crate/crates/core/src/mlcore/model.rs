use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::boost::{AdaBoost, BoostParams};
use super::encode::{class_counts, EncodedDataset, Encoder};
use super::nb::{GaussianNb, DEFAULT_VAR_FLOOR};
use super::tree::{ForestParams, RandomForest};
use crate::error::{Error, Result};
use crate::features::{Dataset, FeatureVector, Task};
use crate::snapshot;

pub const MODEL_MAGIC: &[u8; 4] = b"CWM1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    NaiveBayes,
    RandomForest,
    AdaBoostM1,
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "nb" | "naive_bayes" => Ok(Algorithm::NaiveBayes),
            "rf" | "random_forest" => Ok(Algorithm::RandomForest),
            "ada" | "adaboost_m1" => Ok(Algorithm::AdaBoostM1),
            other => Err(format!("unknown algorithm {other:?} (expected nb, rf or ada)")),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::NaiveBayes => "naive_bayes",
            Algorithm::RandomForest => "random_forest",
            Algorithm::AdaBoostM1 => "adaboost_m1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    pub var_floor: f64,
    pub forest: ForestParams,
    pub boost: BoostParams,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            var_floor: DEFAULT_VAR_FLOOR,
            forest: ForestParams::default(),
            boost: BoostParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Learner {
    NaiveBayes(GaussianNb),
    RandomForest(RandomForest),
    AdaBoostM1(AdaBoost),
}

impl Learner {
    pub fn fit(d: &EncodedDataset, rows: &[usize], algo: Algorithm, params: &TrainParams, seed: u64) -> Result<Learner> {
        let present = class_counts(&rows.iter().map(|&i| d.y[i]).collect::<Vec<_>>(), d.n_classes)
            .iter()
            .filter(|&&c| c > 0)
            .count();
        if present < 2 {
            return Err(Error::invalid("training set contains a single class"));
        }
        Ok(match algo {
            Algorithm::NaiveBayes => Learner::NaiveBayes(GaussianNb::fit(d, rows, params.var_floor)?),
            Algorithm::RandomForest => Learner::RandomForest(RandomForest::fit(d, rows, &params.forest, seed)?),
            Algorithm::AdaBoostM1 => Learner::AdaBoostM1(AdaBoost::fit(d, rows, &params.boost, seed)?),
        })
    }

    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Learner::NaiveBayes(m) => m.predict_proba(x),
            Learner::RandomForest(m) => m.predict_proba(x),
            Learner::AdaBoostM1(m) => m.predict_proba(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub class: usize,
    pub probabilities: Vec<f64>,
}

impl Prediction {
    pub fn from_probabilities(probabilities: Vec<f64>) -> Prediction {
        let mut class = 0;
        for (i, &p) in probabilities.iter().enumerate() {
            if p > probabilities[class] {
                class = i;
            }
        }
        Prediction { class, probabilities }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub algorithm: Algorithm,
    pub task: Task,
    pub n_classes: usize,
    pub encoder: Encoder,
    pub params: TrainParams,
    pub seed: u64,
    pub learner: Learner,
}

impl ClassifierModel {
    pub fn predict_encoded(&self, x: &[f64]) -> Prediction {
        Prediction::from_probabilities(self.learner.predict_proba(x))
    }

    pub fn predict(&self, x: &FeatureVector) -> Result<Prediction> {
        let e = self.encoder.encode(&x.values)?;
        Ok(self.predict_encoded(&e))
    }

    pub fn save(&self, path: &Path, provenance: &str) -> Result<()> {
        snapshot::write(path, MODEL_MAGIC, provenance, self)
    }

    pub fn load(path: &Path) -> Result<(ClassifierModel, String)> {
        let (prov, m) = snapshot::read(path, MODEL_MAGIC)?;
        Ok((m, prov))
    }
}

pub fn train(d: &Dataset, task: Task, algo: Algorithm, params: &TrainParams, seed: u64) -> Result<ClassifierModel> {
    let e = EncodedDataset::from_dataset(d, task)?;
    let rows: Vec<usize> = (0..e.n_rows).collect();
    let learner = Learner::fit(&e, &rows, algo, params, seed)?;
    Ok(ClassifierModel {
        algorithm: algo,
        task,
        n_classes: e.n_classes,
        encoder: e.encoder,
        params: *params,
        seed,
        learner,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_go_to_lowest_class() {
        assert_eq!(Prediction::from_probabilities(vec![0.5, 0.5]).class, 0);
        assert_eq!(Prediction::from_probabilities(vec![0.2, 0.4, 0.4]).class, 1);
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in [Algorithm::NaiveBayes, Algorithm::RandomForest, Algorithm::AdaBoostM1] {
            assert_eq!(a.to_string().parse::<Algorithm>().unwrap(), a);
        }
        assert_eq!("ada".parse::<Algorithm>().unwrap(), Algorithm::AdaBoostM1);
        assert!("svm".parse::<Algorithm>().is_err());
    }

    #[test]
    fn single_class_training_fails() {
        let rows = vec![vec![1.0], vec![2.0]];
        let d = EncodedDataset::from_matrix(&rows, vec![1, 1], 2).unwrap();
        assert!(Learner::fit(&d, &[0, 1], Algorithm::NaiveBayes, &TrainParams::default(), 0).is_err());
    }

    #[test]
    fn unanimous_forest_gives_probability_one() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![f64::from(i)]).collect();
        let y = (0..20).map(|i| usize::from(i >= 10)).collect();
        let d = EncodedDataset::from_matrix(&rows, y, 2).unwrap();
        let all: Vec<usize> = (0..20).collect();
        let m = Learner::fit(&d, &all, Algorithm::RandomForest, &TrainParams::default(), 4).unwrap();
        let p = Prediction::from_probabilities(m.predict_proba(&[100.0]));
        assert_eq!(p.class, 1);
        assert_eq!(p.probabilities, vec![0.0, 1.0]);
    }
}
