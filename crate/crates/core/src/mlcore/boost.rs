use rand::distributions::{Distribution, WeightedIndex};
use serde::{Deserialize, Serialize};

use super::encode::EncodedDataset;
use super::tree::{ForestParams, RandomForest};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostParams {
    pub n_stages: usize,
    pub base: ForestParams,
}

impl Default for BoostParams {
    fn default() -> Self {
        BoostParams {
            n_stages: 10,
            base: ForestParams {
                n_trees: 10,
                ..ForestParams::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub forest: RandomForest,
    pub weight: f64,
    pub error: f64,
}

/// AdaBoost-M1 over Random Forest base learners.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoost {
    pub n_classes: usize,
    pub stages: Vec<Stage>,
}

fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in p.iter().enumerate() {
        if v > p[best] {
            best = i;
        }
    }
    best
}

impl AdaBoost {
    /// Each stage trains a forest on a weight-proportional resample of the
    /// training rows and is scored by its weighted error ε over all of them.
    ///
    /// A stage with ε = 0 or ε ≥ 0.5 ends boosting. If that happens on the
    /// first stage the forest is kept with unit weight, so the ensemble is
    /// never empty; later such stages are discarded.
    pub fn fit(d: &EncodedDataset, rows: &[usize], params: &BoostParams, seed: u64) -> Result<AdaBoost> {
        if params.n_stages == 0 {
            return Err(Error::invalid("boosting needs at least one stage"));
        }
        if rows.is_empty() {
            return Err(Error::invalid("empty training set"));
        }
        let n = rows.len();
        let mut w = vec![1.0 / n as f64; n];
        let mut stages = Vec::new();
        for t in 0..params.n_stages {
            let mut r = rng::stream(seed, "stage", t as u64);
            let dist = WeightedIndex::new(&w)
                .map_err(|e| Error::Numerical(format!("boosting weights degenerate: {e}")))?;
            let sample: Vec<usize> = (0..n).map(|_| rows[dist.sample(&mut r)]).collect();
            let forest = RandomForest::fit(d, &sample, &params.base, rng::derive_seed(seed, "stage-forest", t as u64))?;
            let miss: Vec<bool> = rows
                .iter()
                .map(|&i| argmax(&forest.predict_proba(d.row(i))) != d.y[i])
                .collect();
            let eps: f64 = w.iter().zip(&miss).filter(|(_, &m)| m).map(|(wi, _)| wi).sum();
            if eps == 0.0 || eps >= 0.5 {
                if stages.is_empty() {
                    stages.push(Stage {
                        forest,
                        weight: 1.0,
                        error: eps,
                    });
                }
                break;
            }
            let beta = eps / (1.0 - eps);
            for (wi, &m) in w.iter_mut().zip(&miss) {
                if !m {
                    *wi *= beta;
                }
            }
            let z: f64 = w.iter().sum();
            w.iter_mut().for_each(|v| *v /= z);
            stages.push(Stage {
                forest,
                weight: (1.0 / beta).ln(),
                error: eps,
            });
        }
        Ok(AdaBoost {
            n_classes: d.n_classes,
            stages,
        })
    }

    /// Stage-weighted votes, normalized to sum to one.
    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let mut votes = vec![0.0; self.n_classes];
        for s in &self.stages {
            votes[argmax(&s.forest.predict_proba(x))] += s.weight;
        }
        let z: f64 = votes.iter().sum();
        votes.iter_mut().for_each(|v| *v /= z);
        votes
    }
}
