//! Consecutive same-creator projects where the first one failed.
//!
//! A creator's projects are ordered by launch date (project id breaks ties)
//! and every adjacent pair whose former member failed is a candidate. The
//! latter's status puts the pair in group I (failed → successful) or group
//! II (failed → failed). Pairs whose main descriptions are close in a
//! TF-IDF space built over all candidate projects count as relaunches of
//! the same idea.

mod stats;

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

pub use stats::{ecdf, welch_t_test, Tier, Welch};

use crate::corpus::{Corpus, ProjectRecord, Status};
use crate::error::{Error, Result};
use crate::textstats::{text_stats, VectorSpaceModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Group {
    FailedToSuccessful,
    FailedToFailed,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::FailedToSuccessful => "failed_to_successful",
            Group::FailedToFailed => "failed_to_failed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CandidatePair {
    pub creator_id: String,
    pub former_id: String,
    pub latter_id: String,
    pub group: Group,
}

/// Adjacent (failed, successful|failed) pairs, ordered by creator id and
/// then launch date.
pub fn candidate_pairs(c: &Corpus) -> Vec<CandidatePair> {
    let mut creators: Vec<&str> = c.creator_ids_with_projects().collect();
    creators.sort_unstable();
    creators
        .par_iter()
        .map(|&cid| {
            let projects = c.creator_projects(cid);
            projects
                .windows(2)
                .filter_map(|w| {
                    if w[0].status != Status::Failed {
                        return None;
                    }
                    let group = match w[1].status {
                        Status::Successful => Group::FailedToSuccessful,
                        Status::Failed => Group::FailedToFailed,
                        _ => return None,
                    };
                    Some(CandidatePair {
                        creator_id: cid.to_string(),
                        former_id: w[0].project_id.clone(),
                        latter_id: w[1].project_id.clone(),
                        group,
                    })
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

pub const PROPERTIES: [&str; 13] = [
    "duration",
    "goal",
    "n_images",
    "n_videos",
    "n_faqs",
    "n_updates",
    "n_rewards",
    "reward_sentences",
    "smog_reward",
    "main_sentences",
    "smog_main",
    "bio_sentences",
    "smog_bio",
];

fn properties(p: &ProjectRecord, bio: &str) -> [f64; 13] {
    let reward = text_stats(&p.reward_description);
    let main = text_stats(&p.main_description);
    let bio = text_stats(bio);
    [
        f64::from(p.duration_days),
        p.goal_usd,
        f64::from(p.n_images),
        f64::from(p.n_videos),
        f64::from(p.n_faqs),
        f64::from(p.n_updates),
        f64::from(p.n_rewards),
        reward.sentences as f64,
        reward.smog,
        main.sentences as f64,
        main.smog,
        bio.sentences as f64,
        bio.smog,
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChangeRates {
    /// Percent; positive means the latter project raised the property.
    pub rates: [f64; 13],
    /// Properties whose former value was 0.
    pub zero_former: [bool; 13],
}

/// `(latter − former)·100 / former`. A zero former value gives 0 when the
/// latter is also 0 and `100·latter` otherwise.
pub fn change_rate(former: f64, latter: f64) -> f64 {
    if former == 0.0 {
        100.0 * latter
    } else {
        (latter - former) * 100.0 / former
    }
}

pub fn change_rates(former: &ProjectRecord, latter: &ProjectRecord, former_bio: &str, latter_bio: &str) -> ChangeRates {
    let a = properties(former, former_bio);
    let b = properties(latter, latter_bio);
    let mut rates = [0.0; 13];
    let mut zero_former = [false; 13];
    for k in 0..13 {
        rates[k] = change_rate(a[k], b[k]);
        zero_former[k] = a[k] == 0.0;
    }
    ChangeRates { rates, zero_former }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredPair {
    pub pair: CandidatePair,
    pub similarity: f64,
    pub change: ChangeRates,
}

/// Similarity and change rates for every candidate pair. The vector space
/// covers the main descriptions of all projects taking part in some pair.
pub fn score_pairs(c: &Corpus, pairs: &[CandidatePair]) -> Result<Vec<ScoredPair>> {
    if pairs.is_empty() {
        return Ok(Vec::new());
    }
    let mut doc_of: HashMap<&str, usize> = HashMap::new();
    let mut docs: Vec<&str> = Vec::new();
    for p in pairs {
        for id in [&p.former_id, &p.latter_id] {
            if !doc_of.contains_key(id.as_str()) {
                let rec = c
                    .project(id)
                    .ok_or_else(|| Error::invalid(format!("pair references unknown project {id}")))?;
                doc_of.insert(id, docs.len());
                docs.push(&rec.main_description);
            }
        }
    }
    let vsm = VectorSpaceModel::build(&docs)?;
    pairs
        .par_iter()
        .map(|p| {
            let former = c.project(&p.former_id).expect("checked above");
            let latter = c.project(&p.latter_id).expect("checked above");
            let bio = |r: &ProjectRecord| c.creator(&r.creator_id).map_or("", |u| u.bio.as_str());
            Ok(ScoredPair {
                similarity: vsm.similarity(doc_of[p.former_id.as_str()], doc_of[p.latter_id.as_str()]),
                change: change_rates(former, latter, bio(former), bio(latter)),
                pair: p.clone(),
            })
        })
        .collect()
}

/// Pairs with similarity ≥ λ, in input order.
pub fn similar_pairs(scored: &[ScoredPair], lambda: f64) -> Vec<&ScoredPair> {
    scored.iter().filter(|s| s.similarity >= lambda).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub group_i: usize,
    pub group_ii: usize,
}

impl SweepPoint {
    pub fn total(&self) -> usize {
        self.group_i + self.group_ii
    }
}

/// λ grid `start, start+step, …` up to `end`, snapped to 1e-9 so that
/// e.g. 0.1·3 lands on 0.3.
pub fn lambda_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !start.is_finite() || !end.is_finite() || end < start {
        return Err(Error::invalid(format!("bad lambda sweep {start}:{end}:{step}")));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

pub fn lambda_sweep(scored: &[ScoredPair], lambdas: &[f64]) -> Vec<SweepPoint> {
    lambdas
        .iter()
        .map(|&lambda| {
            let kept = similar_pairs(scored, lambda);
            let group_i = kept.iter().filter(|s| s.pair.group == Group::FailedToSuccessful).count();
            SweepPoint {
                lambda,
                group_i,
                group_ii: kept.len() - group_i,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyRow {
    pub property: &'static str,
    pub mean_i: f64,
    pub mean_ii: f64,
    /// None when the test is undefined (zero variance in both groups).
    pub test: Option<Welch>,
    pub tier: Tier,
    pub zero_former_i: usize,
    pub zero_former_ii: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairStudyReport {
    pub n_i: usize,
    pub n_ii: usize,
    pub rows: Vec<PropertyRow>,
}

impl PairStudyReport {
    /// Change rates of one property, per group, for CDF export.
    pub fn rates(pairs: &[&ScoredPair], property: usize, group: Group) -> Vec<f64> {
        pairs
            .iter()
            .filter(|p| p.pair.group == group)
            .map(|p| p.change.rates[property])
            .collect()
    }
}

pub fn property_index(name: &str) -> Option<usize> {
    PROPERTIES.iter().position(|&p| p == name)
}

/// Per-property group means and one-tailed Welch tests. No correction for
/// the thirteen simultaneous tests is applied.
pub fn pair_report(pairs: &[&ScoredPair]) -> Result<PairStudyReport> {
    let (g1, g2): (Vec<&ScoredPair>, Vec<&ScoredPair>) =
        pairs.iter().partition(|p| p.pair.group == Group::FailedToSuccessful);
    if g1.is_empty() || g2.is_empty() {
        return Err(Error::invalid(format!(
            "pair report needs both groups (got {} and {})",
            g1.len(),
            g2.len()
        )));
    }
    let mut rows = Vec::with_capacity(13);
    for (k, &property) in PROPERTIES.iter().enumerate() {
        let a: Vec<f64> = g1.iter().map(|p| p.change.rates[k]).collect();
        let b: Vec<f64> = g2.iter().map(|p| p.change.rates[k]).collect();
        let test = match welch_t_test(&a, &b) {
            Ok(w) => Some(w),
            Err(e) => {
                log::debug!("{property}: {e}");
                None
            }
        };
        rows.push(PropertyRow {
            property,
            mean_i: a.iter().sum::<f64>() / a.len() as f64,
            mean_ii: b.iter().sum::<f64>() / b.len() as f64,
            tier: Tier::from_p(test.map(|t| t.p)),
            test,
            zero_former_i: g1.iter().filter(|p| p.change.zero_former[k]).count(),
            zero_former_ii: g2.iter().filter(|p| p.change.zero_former[k]).count(),
        });
    }
    Ok(PairStudyReport {
        n_i: g1.len(),
        n_ii: g2.len(),
        rows,
    })
}
