use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::extract::{
    extract_social, extract_static, label_range, resample_states, social_window, RangeScheme,
};
use super::schema::{DatasetConfig, FeatureSchema};
use crate::corpus::{Corpus, ProjectRecord, Status};
use crate::error::{Error, Result};
use crate::snapshot;

pub const DATASET_MAGIC: &[u8; 4] = b"CWF1";

/// Prediction target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Task {
    Success,
    Range2,
    Range3,
}

impl Task {
    pub fn n_classes(self) -> usize {
        match self {
            Task::Success | Task::Range2 => 2,
            Task::Range3 => 3,
        }
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "success" => Ok(Task::Success),
            "range2" => Ok(Task::Range2),
            "range3" => Ok(Task::Range3),
            other => Err(format!("unknown task {other:?}")),
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Success => "success",
            Task::Range2 => "range2",
            Task::Range3 => "range3",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub project_id: String,
    pub values: Vec<f64>,
    pub successful: bool,
    pub range_label_2: usize,
    pub range_label_3: usize,
    pub pledged_usd: f64,
}

impl FeatureVector {
    /// Class index for a task; success is class 1.
    pub fn label(&self, task: Task) -> usize {
        match task {
            Task::Success => usize::from(self.successful),
            Task::Range2 => self.range_label_2,
            Task::Range3 => self.range_label_3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub config: DatasetConfig,
    pub schema: FeatureSchema,
    /// State the temporal features were read at, when present in the schema.
    pub state: Option<usize>,
    pub n_states: usize,
    pub rows: Vec<FeatureVector>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn labels(&self, task: Task) -> Vec<usize> {
        self.rows.iter().map(|r| r.label(task)).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.values[j]).collect()
    }

    /// Dataset restricted to the given feature indices.
    pub fn select(&self, keep: &[usize]) -> Dataset {
        Dataset {
            config: self.config,
            schema: self.schema.select(keep),
            state: self.state,
            n_states: self.n_states,
            rows: self
                .rows
                .iter()
                .map(|r| FeatureVector {
                    values: keep.iter().map(|&j| r.values[j]).collect(),
                    ..r.clone()
                })
                .collect(),
        }
    }

    pub fn save(&self, path: &Path, provenance: &str) -> Result<()> {
        snapshot::write(path, DATASET_MAGIC, provenance, self)
    }

    pub fn load(path: &Path) -> Result<(Dataset, String)> {
        let (prov, d) = snapshot::read(path, DATASET_MAGIC)?;
        Ok((d, prov))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AssembleOptions {
    pub n_states: usize,
    pub strict: bool,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        AssembleOptions {
            n_states: 100,
            strict: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AssembleReport {
    pub considered: usize,
    pub dropped_ineligible: usize,
    pub dropped_no_social: usize,
    pub dropped_no_temporal: usize,
    pub rows: usize,
}

enum Outcome {
    Row(FeatureVector),
    Ineligible,
    NoSocial,
    NoTemporal,
}

fn assemble_row(
    corpus: &Corpus,
    p: &ProjectRecord,
    config: DatasetConfig,
    state: usize,
    opts: AssembleOptions,
) -> Result<Outcome> {
    if !p.status.is_eligible() {
        return Ok(Outcome::Ineligible);
    }
    let creator = corpus
        .creator(&p.creator_id)
        .expect("corpus guarantees creator references");
    let social = if config.needs_social() {
        match corpus.social(&p.creator_id) {
            Some(s) => Some(s),
            None => return Ok(Outcome::NoSocial),
        }
    } else {
        None
    };
    let temporal = if config.needs_temporal() {
        match corpus.temporal(&p.project_id) {
            Some(t) => Some(t),
            None => return Ok(Outcome::NoTemporal),
        }
    } else {
        None
    };

    let mut values = extract_static(p, creator, opts.strict)?;
    if let Some(t) = temporal {
        let states = resample_states(t, p, opts.n_states)?;
        let (ratio, backers) = states.at(state);
        values.push(ratio);
        values.push(backers);
    }
    if let Some(s) = social {
        values.extend(extract_social(s, social_window(p)));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!(
            "non-finite feature value {bad} for project {}",
            p.project_id
        )));
    }
    Ok(Outcome::Row(FeatureVector {
        project_id: p.project_id.clone(),
        values,
        successful: p.status == Status::Successful,
        range_label_2: label_range(p.pledged_usd, RangeScheme::TwoClass),
        range_label_3: label_range(p.pledged_usd, RangeScheme::ThreeClass),
        pledged_usd: p.pledged_usd,
    }))
}

/// Builds the feature table for one dataset configuration.
///
/// Projects lacking the social profile or temporal series a configuration
/// needs are dropped and counted. With `state_cutoff = Some(s)` the temporal
/// features are the cumulative values at state `s` (0 = launch) and nothing
/// after it is read; otherwise they are taken at the final state.
pub fn assemble_dataset(
    corpus: &Corpus,
    config: DatasetConfig,
    state_cutoff: Option<usize>,
    opts: AssembleOptions,
) -> Result<(Dataset, AssembleReport)> {
    if opts.n_states == 0 {
        return Err(Error::invalid("n_states must be at least 1"));
    }
    let state = state_cutoff.unwrap_or(opts.n_states);
    if state > opts.n_states {
        return Err(Error::invalid(format!(
            "state cutoff {state} exceeds the {} available states",
            opts.n_states
        )));
    }
    let outcomes: Vec<Outcome> = corpus
        .projects()
        .par_iter()
        .map(|p| assemble_row(corpus, p, config, state, opts))
        .collect::<Result<_>>()?;

    let mut report = AssembleReport {
        considered: outcomes.len(),
        ..Default::default()
    };
    let mut rows = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        match o {
            Outcome::Row(r) => rows.push(r),
            Outcome::Ineligible => report.dropped_ineligible += 1,
            Outcome::NoSocial => report.dropped_no_social += 1,
            Outcome::NoTemporal => report.dropped_no_temporal += 1,
        }
    }
    report.rows = rows.len();
    if rows.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no projects qualify for the {config} dataset"
        )));
    }
    Ok((
        Dataset {
            config,
            schema: FeatureSchema::for_config(config),
            state: config.needs_temporal().then_some(state),
            n_states: opts.n_states,
            rows,
        },
        report,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures::{creator, project};
    use crate::corpus::{CorpusParts, SocialProfile, TemporalSeries};

    fn corpus() -> Corpus {
        let mut projects = vec![
            project("p1", "c1", Status::Successful),
            project("p2", "c2", Status::Failed),
            project("p3", "c3", Status::Successful),
        ];
        for p in &mut projects {
            p.duration_days = 4;
        }
        let temporal = projects
            .iter()
            .map(|p| TemporalSeries {
                project_id: p.project_id.clone(),
                daily_pledged: vec![p.pledged_usd / 4.0; 4],
                daily_backers: vec![2; 4],
            })
            .collect();
        let social = ["c1", "c2"]
            .iter()
            .map(|c| SocialProfile {
                creator_id: c.to_string(),
                n_tweets: 5,
                n_following: 1,
                n_followers: 2,
                n_favorites: 3,
                n_lists: 0,
                tweets: vec![],
            })
            .collect();
        let parts = CorpusParts {
            projects,
            creators: vec![creator("c1"), creator("c2"), creator("c3")],
            temporal,
            social,
            ..Default::default()
        };
        Corpus::from_parts(parts, true).unwrap().0
    }

    #[test]
    fn static_rows() {
        let (d, r) = assemble_dataset(&corpus(), DatasetConfig::Static, None, Default::default()).unwrap();
        assert_eq!(d.len(), 3);
        assert!(d.rows.iter().all(|r| r.values.len() == 39));
        assert_eq!(r.rows, 3);
    }

    #[test]
    fn social_config_drops_missing_profiles() {
        let (d, r) =
            assemble_dataset(&corpus(), DatasetConfig::StaticSocial, None, Default::default()).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.schema.len(), 47);
        assert_eq!(r.dropped_no_social, 1);
    }

    #[test]
    fn state_zero_zeroes_temporal_features() {
        let (d, _) = assemble_dataset(&corpus(), DatasetConfig::Full, Some(0), Default::default()).unwrap();
        let j = d.schema.index_of("cum_pledged_ratio").unwrap();
        let k = d.schema.index_of("cum_backers").unwrap();
        assert_eq!(d.schema.len(), 49);
        assert!(d.rows.iter().all(|r| r.values[j] == 0.0 && r.values[k] == 0.0));
    }

    #[test]
    fn temporal_features_grow_with_cutoff() {
        let c = corpus();
        let (lo, _) = assemble_dataset(&c, DatasetConfig::Full, Some(30), Default::default()).unwrap();
        let (hi, _) = assemble_dataset(&c, DatasetConfig::Full, Some(70), Default::default()).unwrap();
        let j = lo.schema.index_of("cum_pledged_ratio").unwrap();
        for (a, b) in lo.rows.iter().zip(&hi.rows) {
            assert!(a.values[j] <= b.values[j]);
            assert!(a.values[j + 1] <= b.values[j + 1]);
        }
        assert!(assemble_dataset(&c, DatasetConfig::Full, Some(101), Default::default()).is_err());
    }

    #[test]
    fn labels_follow_status_and_ranges() {
        let (d, _) = assemble_dataset(&corpus(), DatasetConfig::Static, None, Default::default()).unwrap();
        assert_eq!(d.labels(Task::Success), vec![1, 0, 1]);
        // pledged 1500 / 200
        assert_eq!(d.labels(Task::Range2), vec![0, 0, 0]);
        assert_eq!(d.labels(Task::Range3), vec![1, 1, 1]);
    }

    #[test]
    fn empty_result_is_an_error() {
        let mut parts = corpus().into_parts();
        parts.temporal.clear();
        let (c, _) = Corpus::from_parts(parts, true).unwrap();
        assert!(assemble_dataset(&c, DatasetConfig::Full, None, Default::default()).is_err());
    }
}
