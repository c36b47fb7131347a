use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::features::{Dataset, FeatureKind, Task};

pub const DEFAULT_BINS: usize = 10;
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Chi2 {
    pub chi2: f64,
    pub p: f64,
    pub dof: usize,
}

impl Chi2 {
    const NULL: Chi2 = Chi2 {
        chi2: 0.0,
        p: 1.0,
        dof: 0,
    };
}

/// Pearson statistic of a bins × classes table of counts.
///
/// All-zero rows and columns are dropped first; a table left with fewer than
/// two rows or columns carries no evidence and scores 0 with p = 1.
pub fn chi_squared_table(table: &[Vec<f64>]) -> Chi2 {
    let n_cols = table.first().map_or(0, Vec::len);
    let rows: Vec<&Vec<f64>> = table.iter().filter(|r| r.iter().sum::<f64>() > 0.0).collect();
    let cols: Vec<usize> = (0..n_cols)
        .filter(|&j| rows.iter().map(|r| r[j]).sum::<f64>() > 0.0)
        .collect();
    if rows.len() < 2 || cols.len() < 2 {
        return Chi2::NULL;
    }
    let row_tot: Vec<f64> = rows.iter().map(|r| cols.iter().map(|&j| r[j]).sum()).collect();
    let col_tot: Vec<f64> = cols.iter().map(|&j| rows.iter().map(|r| r[j]).sum()).collect();
    let n: f64 = row_tot.iter().sum();
    let mut chi2 = 0.0;
    for (r, rt) in rows.iter().zip(&row_tot) {
        for (&j, ct) in cols.iter().zip(&col_tot) {
            let e = rt * ct / n;
            let d = r[j] - e;
            chi2 += d * d / e;
        }
    }
    let dof = (rows.len() - 1) * (cols.len() - 1);
    let p = ChiSquared::new(dof as f64).map_or(1.0, |dist| dist.sf(chi2));
    Chi2 { chi2, p, dof }
}

/// Bin code for each value: numeric columns get equal-frequency bins by
/// rank (ties share a bin), discrete kinds keep their codes.
pub fn discretize(col: &[f64], kind: FeatureKind, n_bins: usize) -> Vec<usize> {
    match kind {
        FeatureKind::Categorical | FeatureKind::Boolean => col.iter().map(|&v| v as usize).collect(),
        FeatureKind::Numeric => {
            let n = col.len();
            let mut sorted: Vec<f64> = col.to_vec();
            sorted.sort_by(f64::total_cmp);
            col.iter()
                .map(|v| {
                    let below = sorted.partition_point(|s| s < v);
                    (below * n_bins / n.max(1)).min(n_bins - 1)
                })
                .collect()
        }
    }
}

pub fn chi_squared(
    col: &[f64],
    labels: &[usize],
    n_classes: usize,
    kind: FeatureKind,
    n_bins: usize,
) -> Result<Chi2> {
    if col.len() != labels.len() {
        return Err(Error::invalid("column and label lengths differ"));
    }
    if n_bins == 0 {
        return Err(Error::invalid("n_bins must be positive"));
    }
    let mut distinct = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::invalid("chi-squared needs at least two label values"));
    }
    if col.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite value in column".into()));
    }
    let bins = discretize(col, kind, n_bins);
    let n_rows = bins.iter().max().map_or(0, |&b| b + 1);
    let mut table = vec![vec![0.0; n_classes]; n_rows];
    for (&b, &l) in bins.iter().zip(labels) {
        table[b][l] += 1.0;
    }
    Ok(chi_squared_table(&table))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedFeature {
    pub index: usize,
    pub name: String,
    pub chi2: f64,
    pub p: f64,
    pub dof: usize,
    pub kept: bool,
}

/// Scores every feature, keeps those with p < alpha (at least the best one),
/// and returns the reduced dataset with the ranking, strongest first.
pub fn select_features(
    d: &Dataset,
    task: Task,
    alpha: f64,
    n_bins: usize,
) -> Result<(Dataset, Vec<RankedFeature>)> {
    let labels = d.labels(task);
    let mut ranked = Vec::with_capacity(d.schema.len());
    for (j, f) in d.schema.features().iter().enumerate() {
        let s = chi_squared(&d.column(j), &labels, task.n_classes(), f.kind, n_bins)?;
        ranked.push(RankedFeature {
            index: j,
            name: f.name.clone(),
            chi2: s.chi2,
            p: s.p,
            dof: s.dof,
            kept: s.p < alpha,
        });
    }
    ranked.sort_by(|a, b| b.chi2.total_cmp(&a.chi2).then(a.index.cmp(&b.index)));
    if !ranked.iter().any(|r| r.kept) {
        if let Some(first) = ranked.first_mut() {
            first.kept = true;
        }
    }
    let mut keep: Vec<usize> = ranked.iter().filter(|r| r.kept).map(|r| r.index).collect();
    keep.sort_unstable();
    Ok((d.select(&keep), ranked))
}
