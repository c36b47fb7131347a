//! Campaign data: records, ingestion, validation and descriptive summaries.
//!
//! A [`Corpus`] is built once from JSON Lines files (or from in-memory
//! [`CorpusParts`]) and is immutable afterwards. Construction validates every
//! record invariant; in strict mode the first violation aborts, in lenient
//! mode violating records are dropped and counted in a [`LoadReport`].

mod load;
mod records;
mod summary;

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::snapshot;

pub use load::{load_corpus, write_jsonl, CorpusPaths};
pub use records::{
    Category, CreatorRecord, ProjectRecord, PromotionTweet, SocialProfile, Status,
    TemporalSeries, Tweet,
};
pub use summary::{
    pearson, summarize, temporal_percentage_profile, GroupKey, PercentageProfile, SummaryRow,
    SummaryTable,
};

pub const CORPUS_MAGIC: &[u8; 4] = b"CWC1";

/// Raw record collections, the serialized form of a corpus.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusParts {
    pub projects: Vec<ProjectRecord>,
    pub creators: Vec<CreatorRecord>,
    pub temporal: Vec<TemporalSeries>,
    pub social: Vec<SocialProfile>,
    pub promo_tweets: Vec<PromotionTweet>,
}

/// Counts of records dropped or adjusted during construction.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LoadReport {
    pub dropped_projects: usize,
    pub dropped_creators: usize,
    pub dropped_temporal: usize,
    pub dropped_social: usize,
    pub dropped_promo: usize,
    /// Promotion tweets outside their project's active window (filtered, not violations).
    pub promo_out_of_window: usize,
    pub violations: Vec<String>,
    /// Unknown JSON fields seen per file, ignored.
    pub unknown_fields: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FilterReport {
    pub removed_projects: usize,
    pub removed_creators: usize,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    parts: CorpusParts,
    project_index: HashMap<String, usize>,
    creator_index: HashMap<String, usize>,
    temporal_index: HashMap<String, usize>,
    social_index: HashMap<String, usize>,
    promo_index: HashMap<String, Vec<usize>>,
    /// creator_id -> project indices sorted by (launch_date, project_id).
    creator_projects: BTreeMap<String, Vec<usize>>,
}

impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.parts == other.parts
    }
}

struct Violations<'a> {
    strict: bool,
    report: &'a mut LoadReport,
}

impl Violations<'_> {
    fn record(&mut self, err: Error) -> Result<()> {
        if self.strict {
            return Err(err);
        }
        self.report.violations.push(err.to_string());
        Ok(())
    }
}

impl Corpus {
    /// Validates and indexes raw records.
    pub fn from_parts(parts: CorpusParts, strict: bool) -> Result<(Corpus, LoadReport)> {
        let mut report = LoadReport::default();
        let mut v = Violations {
            strict,
            report: &mut report,
        };
        let CorpusParts {
            projects,
            creators,
            temporal,
            social,
            promo_tweets,
        } = parts;

        let mut creator_index = HashMap::new();
        let mut kept_creators = Vec::with_capacity(creators.len());
        for c in creators {
            let res = if creator_index.contains_key(&c.creator_id) {
                Err(format!("duplicate creator_id {}", c.creator_id))
            } else {
                c.check()
            };
            match res {
                Ok(()) => {
                    creator_index.insert(c.creator_id.clone(), kept_creators.len());
                    kept_creators.push(c);
                }
                Err(msg) => {
                    v.record(Error::Validation(format!("creator {}: {msg}", c.creator_id)))?;
                    v.report.dropped_creators += 1;
                }
            }
        }

        let mut project_index = HashMap::new();
        let mut kept_projects = Vec::with_capacity(projects.len());
        for p in projects {
            if !creator_index.contains_key(&p.creator_id) {
                v.record(Error::DanglingCreator {
                    project_id: p.project_id.clone(),
                    creator_id: p.creator_id.clone(),
                })?;
                v.report.dropped_projects += 1;
                continue;
            }
            let res = if project_index.contains_key(&p.project_id) {
                Err(format!("duplicate project_id {}", p.project_id))
            } else {
                p.check()
            };
            match res {
                Ok(()) => {
                    project_index.insert(p.project_id.clone(), kept_projects.len());
                    kept_projects.push(p);
                }
                Err(msg) => {
                    v.record(Error::Validation(format!("project {}: {msg}", p.project_id)))?;
                    v.report.dropped_projects += 1;
                }
            }
        }

        let mut temporal_index = HashMap::new();
        let mut kept_temporal = Vec::with_capacity(temporal.len());
        for t in temporal {
            let res = match project_index.get(&t.project_id) {
                None => Err(format!("temporal series references unknown project {}", t.project_id)),
                Some(_) if temporal_index.contains_key(&t.project_id) => {
                    Err(format!("more than one temporal series for project {}", t.project_id))
                }
                Some(&pi) => t.check(kept_projects[pi].duration_days),
            };
            match res {
                Ok(()) => {
                    temporal_index.insert(t.project_id.clone(), kept_temporal.len());
                    kept_temporal.push(t);
                }
                Err(msg) => {
                    v.record(Error::Validation(msg))?;
                    v.report.dropped_temporal += 1;
                }
            }
        }

        let mut social_index = HashMap::new();
        let mut kept_social = Vec::with_capacity(social.len());
        for mut s in social {
            let res = if !creator_index.contains_key(&s.creator_id) {
                Err(format!("social profile references unknown creator {}", s.creator_id))
            } else if social_index.contains_key(&s.creator_id) {
                Err(format!("more than one social profile for creator {}", s.creator_id))
            } else {
                Ok(())
            };
            match res {
                Ok(()) => {
                    s.tweets.sort_by_key(|t| t.timestamp);
                    social_index.insert(s.creator_id.clone(), kept_social.len());
                    kept_social.push(s);
                }
                Err(msg) => {
                    v.record(Error::Validation(msg))?;
                    v.report.dropped_social += 1;
                }
            }
        }

        let mut kept_promo = Vec::with_capacity(promo_tweets.len());
        for t in promo_tweets {
            match project_index.get(&t.project_id) {
                None => {
                    v.record(Error::Validation(format!(
                        "promotion tweet references unknown project {}",
                        t.project_id
                    )))?;
                    v.report.dropped_promo += 1;
                }
                Some(&pi) => {
                    let p = &kept_projects[pi];
                    if t.timestamp < p.launch_instant() || t.timestamp > p.deadline_instant() {
                        v.report.promo_out_of_window += 1;
                    } else {
                        kept_promo.push(t);
                    }
                }
            }
        }
        kept_promo.sort_by(|a, b| {
            a.project_id
                .cmp(&b.project_id)
                .then(a.timestamp.cmp(&b.timestamp))
        });

        let parts = CorpusParts {
            projects: kept_projects,
            creators: kept_creators,
            temporal: kept_temporal,
            social: kept_social,
            promo_tweets: kept_promo,
        };
        Ok((Corpus::index(parts, project_index, creator_index, temporal_index, social_index), report))
    }

    fn index(
        parts: CorpusParts,
        project_index: HashMap<String, usize>,
        creator_index: HashMap<String, usize>,
        temporal_index: HashMap<String, usize>,
        social_index: HashMap<String, usize>,
    ) -> Corpus {
        let mut promo_index: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, t) in parts.promo_tweets.iter().enumerate() {
            promo_index.entry(t.project_id.clone()).or_default().push(i);
        }
        let mut creator_projects: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, p) in parts.projects.iter().enumerate() {
            creator_projects.entry(p.creator_id.clone()).or_default().push(i);
        }
        for list in creator_projects.values_mut() {
            list.sort_by(|&a, &b| {
                let (pa, pb) = (&parts.projects[a], &parts.projects[b]);
                pa.launch_date
                    .cmp(&pb.launch_date)
                    .then_with(|| pa.project_id.cmp(&pb.project_id))
            });
        }
        Corpus {
            parts,
            project_index,
            creator_index,
            temporal_index,
            social_index,
            promo_index,
            creator_projects,
        }
    }

    pub fn parts(&self) -> &CorpusParts {
        &self.parts
    }

    pub fn into_parts(self) -> CorpusParts {
        self.parts
    }

    pub fn projects(&self) -> &[ProjectRecord] {
        &self.parts.projects
    }

    pub fn creators(&self) -> &[CreatorRecord] {
        &self.parts.creators
    }

    pub fn project(&self, project_id: &str) -> Option<&ProjectRecord> {
        self.project_index
            .get(project_id)
            .map(|&i| &self.parts.projects[i])
    }

    pub fn creator(&self, creator_id: &str) -> Option<&CreatorRecord> {
        self.creator_index
            .get(creator_id)
            .map(|&i| &self.parts.creators[i])
    }

    pub fn temporal(&self, project_id: &str) -> Option<&TemporalSeries> {
        self.temporal_index
            .get(project_id)
            .map(|&i| &self.parts.temporal[i])
    }

    pub fn social(&self, creator_id: &str) -> Option<&SocialProfile> {
        self.social_index
            .get(creator_id)
            .map(|&i| &self.parts.social[i])
    }

    /// Promotion tweets for a project, in timestamp order.
    pub fn promo_tweets(&self, project_id: &str) -> Vec<&PromotionTweet> {
        self.promo_index
            .get(project_id)
            .map(|idx| idx.iter().map(|&i| &self.parts.promo_tweets[i]).collect())
            .unwrap_or_default()
    }

    pub fn has_promo_data(&self) -> bool {
        !self.parts.promo_tweets.is_empty()
    }

    /// A creator's projects in chronological order (launch date, project_id).
    pub fn creator_projects(&self, creator_id: &str) -> Vec<&ProjectRecord> {
        self.creator_projects
            .get(creator_id)
            .map(|idx| idx.iter().map(|&i| &self.parts.projects[i]).collect())
            .unwrap_or_default()
    }

    /// Creator ids that own at least one project, ascending.
    pub fn creator_ids_with_projects(&self) -> impl Iterator<Item = &str> {
        self.creator_projects.keys().map(String::as_str)
    }

    /// Keeps only successful and failed projects, plus the records that still
    /// reference them.
    pub fn filter_eligible(&self) -> (Corpus, FilterReport) {
        let projects: Vec<ProjectRecord> = self
            .parts
            .projects
            .iter()
            .filter(|p| p.status.is_eligible())
            .cloned()
            .collect();
        let removed_projects = self.parts.projects.len() - projects.len();

        let mut live_creators = std::collections::HashSet::new();
        let mut live_projects = std::collections::HashSet::new();
        for p in &projects {
            live_creators.insert(p.creator_id.as_str());
            live_projects.insert(p.project_id.as_str());
        }
        let creators: Vec<CreatorRecord> = self
            .parts
            .creators
            .iter()
            .filter(|c| live_creators.contains(c.creator_id.as_str()))
            .cloned()
            .collect();
        let removed_creators = self.parts.creators.len() - creators.len();
        let parts = CorpusParts {
            temporal: self
                .parts
                .temporal
                .iter()
                .filter(|t| live_projects.contains(t.project_id.as_str()))
                .cloned()
                .collect(),
            social: self
                .parts
                .social
                .iter()
                .filter(|s| live_creators.contains(s.creator_id.as_str()))
                .cloned()
                .collect(),
            promo_tweets: self
                .parts
                .promo_tweets
                .iter()
                .filter(|t| live_projects.contains(t.project_id.as_str()))
                .cloned()
                .collect(),
            projects,
            creators,
        };
        let (corpus, _) = Corpus::from_parts(parts, false)
            .expect("lenient construction from a validated corpus cannot fail");
        (
            corpus,
            FilterReport {
                removed_projects,
                removed_creators,
            },
        )
    }

    pub fn save_snapshot(&self, path: &Path, provenance: &str) -> Result<()> {
        snapshot::write(path, CORPUS_MAGIC, provenance, &self.parts)
    }

    pub fn load_snapshot(path: &Path) -> Result<(Corpus, String)> {
        let (prov, parts): (String, CorpusParts) = snapshot::read(path, CORPUS_MAGIC)?;
        let (corpus, _) = Corpus::from_parts(parts, true)?;
        Ok((corpus, prov))
    }
}
