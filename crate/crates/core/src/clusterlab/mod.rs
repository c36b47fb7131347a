//! Clustering successful projects by how their pledges arrive over time.
//!
//! Each selected project's campaign is cut into `B` buckets of equal
//! duration; the money pledged inside each bucket is z-scored per bucket
//! across projects ("relative pledged money") and the resulting
//! B-dimensional rows are clustered with a Gaussian mixture.

mod gmm;

use rayon::prelude::*;
use serde::Serialize;

pub use gmm::{
    assign, bic, bic_value, fit_gmm, select_k, BicPenalty, BicPoint, CovType, Covariance, GmmModel, GmmOptions,
    Selection, DEFAULT_RIDGE,
};

use crate::corpus::{Corpus, ProjectRecord, Status, TemporalSeries};
use crate::error::{Error, Result};
use crate::timeline;

pub const DEFAULT_BUCKETS: usize = 20;
pub const MIN_GOAL_USD: f64 = 100.0;

/// Successful projects with a goal of at least $100 and a temporal series.
pub fn select_cluster_inputs(c: &Corpus) -> Result<Vec<&ProjectRecord>> {
    let v: Vec<&ProjectRecord> = c
        .projects()
        .iter()
        .filter(|p| p.status == Status::Successful && p.goal_usd >= MIN_GOAL_USD && c.temporal(&p.project_id).is_some())
        .collect();
    if v.is_empty() {
        return Err(Error::InvalidInput(
            "no successful projects with goal >= 100 and temporal data to cluster".into(),
        ));
    }
    Ok(v)
}

/// Money pledged inside each of `b` equal-duration buckets.
pub fn bucketize(t: &TemporalSeries, b: usize) -> Result<Vec<f64>> {
    if b == 0 {
        return Err(Error::invalid("bucket count must be at least 1"));
    }
    Ok(timeline::state_increments(&t.daily_pledged, b))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketMatrix {
    pub project_ids: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Per-bucket mean and population sd, set once normalized.
    pub mean: Option<Vec<f64>>,
    pub sd: Option<Vec<f64>>,
}

impl BucketMatrix {
    pub fn n_buckets(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn build(c: &Corpus, projects: &[&ProjectRecord], b: usize) -> Result<BucketMatrix> {
        let rows = projects
            .par_iter()
            .map(|p| {
                let t = c
                    .temporal(&p.project_id)
                    .ok_or_else(|| Error::invalid(format!("project {} has no temporal series", p.project_id)))?;
                bucketize(t, b)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BucketMatrix {
            project_ids: projects.iter().map(|p| p.project_id.clone()).collect(),
            rows,
            mean: None,
            sd: None,
        })
    }
}

/// Column-wise z-scores with population σ; σ = 0 columns become zeros.
pub fn normalize_buckets(m: &BucketMatrix) -> Result<BucketMatrix> {
    let n = m.rows.len();
    if n < 2 {
        return Err(Error::invalid("normalization needs at least two rows"));
    }
    let b = m.n_buckets();
    let mut mean = vec![0.0; b];
    let mut sd = vec![0.0; b];
    for j in 0..b {
        let mu = m.rows.iter().map(|r| r[j]).sum::<f64>() / n as f64;
        let var = m.rows.iter().map(|r| (r[j] - mu) * (r[j] - mu)).sum::<f64>() / n as f64;
        mean[j] = mu;
        sd[j] = var.sqrt();
    }
    let rows = m
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .map(|(j, &v)| if sd[j] > 0.0 { (v - mean[j]) / sd[j] } else { 0.0 })
                .collect()
        })
        .collect();
    Ok(BucketMatrix {
        project_ids: m.project_ids.clone(),
        rows,
        mean: Some(mean),
        sd: Some(sd),
    })
}

/// First bucket whose cumulative pledged total reaches the goal, as percent
/// of the duration; None if the goal is never reached.
pub fn percent_duration_to_goal(buckets: &[f64], goal: f64) -> Option<f64> {
    let b = buckets.len();
    let mut cum = 0.0;
    for (i, v) in buckets.iter().enumerate() {
        cum += v;
        if cum >= goal {
            return Some((i + 1) as f64 / b as f64 * 100.0);
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterProfile {
    pub cluster: usize,
    pub count: usize,
    pub mean_goal: Option<f64>,
    pub mean_pledged: Option<f64>,
    pub mean_percent_to_goal: Option<f64>,
    pub mean_images: Option<f64>,
    pub mean_videos: Option<f64>,
    pub mean_faqs: Option<f64>,
    pub mean_rewards: Option<f64>,
    pub mean_updates: Option<f64>,
    pub mean_comments: Option<f64>,
    /// Mean normalized bucket value, one per bucket (empty if count is 0).
    pub relative_curve: Vec<f64>,
}

fn mean_of(v: impl Iterator<Item = f64>) -> Option<f64> {
    let (mut s, mut n) = (0.0, 0usize);
    for x in v {
        s += x;
        n += 1;
    }
    (n > 0).then(|| s / n as f64)
}

/// Per-cluster summaries. `raw` supplies percent-to-goal, `normalized` the
/// relative curves; both must be row-aligned with `labels`.
pub fn cluster_profile(
    c: &Corpus,
    raw: &BucketMatrix,
    normalized: &BucketMatrix,
    labels: &[usize],
    k: usize,
) -> Result<Vec<ClusterProfile>> {
    if raw.rows.len() != labels.len() || normalized.rows.len() != labels.len() {
        return Err(Error::invalid("labels and bucket matrices are not aligned"));
    }
    let b = normalized.n_buckets();
    let projects: Vec<&ProjectRecord> = raw
        .project_ids
        .iter()
        .map(|id| c.project(id).ok_or_else(|| Error::invalid(format!("unknown project {id}"))))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(k);
    for cl in 0..k {
        let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == cl).collect();
        let field = |f: fn(&ProjectRecord) -> f64| mean_of(members.iter().map(|&i| f(projects[i])));
        let relative_curve = if members.is_empty() {
            Vec::new()
        } else {
            (0..b)
                .map(|j| members.iter().map(|&i| normalized.rows[i][j]).sum::<f64>() / members.len() as f64)
                .collect()
        };
        out.push(ClusterProfile {
            cluster: cl,
            count: members.len(),
            mean_goal: field(|p| p.goal_usd),
            mean_pledged: field(|p| p.pledged_usd),
            mean_percent_to_goal: mean_of(
                members
                    .iter()
                    .filter_map(|&i| percent_duration_to_goal(&raw.rows[i], projects[i].goal_usd)),
            ),
            mean_images: field(|p| f64::from(p.n_images)),
            mean_videos: field(|p| f64::from(p.n_videos)),
            mean_faqs: field(|p| f64::from(p.n_faqs)),
            mean_rewards: field(|p| f64::from(p.n_rewards)),
            mean_updates: field(|p| f64::from(p.n_updates)),
            mean_comments: field(|p| f64::from(p.n_comments)),
            relative_curve,
        });
    }
    Ok(out)
}

/// 1-based bucket of a tweet: closed on the left, open on the right, with
/// the deadline instant itself in the last bucket.
pub fn promotion_bucket(p: &ProjectRecord, ts: chrono::DateTime<chrono::Utc>, b: usize) -> Option<usize> {
    let start = p.launch_instant();
    let end = p.deadline_instant();
    if ts < start || ts > end {
        return None;
    }
    let total = (end - start).num_milliseconds() as f64;
    let frac = (ts - start).num_milliseconds() as f64 / total;
    Some(((frac * b as f64).floor() as usize + 1).min(b))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PromotionCurves {
    /// `curves[cluster][bucket]` mean tweet count.
    pub curves: Vec<Vec<f64>>,
    pub counts: Vec<usize>,
    /// Projects that had no promotion tweets and count as zero rows.
    pub without_tweets: usize,
}

pub fn promotion_curve(c: &Corpus, project_ids: &[String], labels: &[usize], k: usize, b: usize) -> Result<PromotionCurves> {
    if project_ids.len() != labels.len() {
        return Err(Error::invalid("labels and projects are not aligned"));
    }
    if b == 0 {
        return Err(Error::invalid("bucket count must be at least 1"));
    }
    let mut sums = vec![vec![0.0; b]; k];
    let mut counts = vec![0; k];
    let mut without = 0;
    for (id, &l) in project_ids.iter().zip(labels) {
        let p = c.project(id).ok_or_else(|| Error::invalid(format!("unknown project {id}")))?;
        counts[l] += 1;
        let tweets = c.promo_tweets(id);
        if tweets.is_empty() {
            without += 1;
        }
        for t in tweets {
            if let Some(bk) = promotion_bucket(p, t.timestamp, b) {
                sums[l][bk - 1] += 1.0;
            }
        }
    }
    let curves = sums
        .into_iter()
        .zip(&counts)
        .map(|(s, &n)| s.into_iter().map(|v| if n > 0 { v / n as f64 } else { 0.0 }).collect())
        .collect();
    Ok(PromotionCurves {
        curves,
        counts,
        without_tweets: without,
    })
}
