use serde::{Deserialize, Serialize};

use super::encode::EncodedDataset;
use crate::error::{Error, Result};

pub const DEFAULT_VAR_FLOOR: f64 = 1e-9;

/// Gaussian Naive Bayes with per-class, per-column variances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    pub priors: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub vars: Vec<Vec<f64>>,
}

impl GaussianNb {
    /// Maximum-likelihood fit; variances below `var_floor` are raised to it.
    /// Classes absent from the data get prior 0 and are never predicted.
    pub fn fit(d: &EncodedDataset, rows: &[usize], var_floor: f64) -> Result<GaussianNb> {
        if rows.is_empty() {
            return Err(Error::invalid("empty training set"));
        }
        let (k, m) = (d.n_classes, d.n_cols);
        let mut count = vec![0usize; k];
        let mut sum = vec![vec![0.0; m]; k];
        for &i in rows {
            let c = d.y[i];
            count[c] += 1;
            for (s, &v) in sum[c].iter_mut().zip(d.row(i)) {
                *s += v;
            }
        }
        let means: Vec<Vec<f64>> = sum
            .iter()
            .zip(&count)
            .map(|(s, &n)| s.iter().map(|v| if n > 0 { v / n as f64 } else { 0.0 }).collect())
            .collect();
        let mut sq = vec![vec![0.0; m]; k];
        for &i in rows {
            let c = d.y[i];
            for ((s, &v), mu) in sq[c].iter_mut().zip(d.row(i)).zip(&means[c]) {
                *s += (v - mu) * (v - mu);
            }
        }
        let vars = sq
            .iter()
            .zip(&count)
            .map(|(s, &n)| {
                s.iter()
                    .map(|v| if n > 0 { (v / n as f64).max(var_floor) } else { var_floor })
                    .collect()
            })
            .collect();
        let priors = count.iter().map(|&n| n as f64 / rows.len() as f64).collect();
        Ok(GaussianNb { priors, means, vars })
    }

    /// Unnormalized log joint density per class (−∞ for empty classes).
    pub fn log_joint(&self, x: &[f64]) -> Vec<f64> {
        self.priors
            .iter()
            .enumerate()
            .map(|(c, &pi)| {
                if pi == 0.0 {
                    return f64::NEG_INFINITY;
                }
                let mut lp = pi.ln();
                for ((&v, &mu), &var) in x.iter().zip(&self.means[c]).zip(&self.vars[c]) {
                    lp -= 0.5 * (2.0 * std::f64::consts::PI * var).ln() + (v - mu) * (v - mu) / (2.0 * var);
                }
                lp
            })
            .collect()
    }

    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let lj = self.log_joint(x);
        let max = lj.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = lj.iter().map(|&l| (l - max).exp()).collect();
        let z: f64 = w.iter().sum();
        w.iter().map(|v| v / z).collect()
    }
}
