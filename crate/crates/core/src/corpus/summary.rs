use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::Datelike;
use serde::Serialize;

use super::records::Status;
use super::Corpus;
use crate::error::{Error, Result};
use crate::timeline;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKey {
    Month,
    Category,
    DurationDays,
    Country,
    UsState,
}

impl FromStr for GroupKey {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "month" => Ok(GroupKey::Month),
            "category" => Ok(GroupKey::Category),
            "duration" | "duration_days" | "duration-days" => Ok(GroupKey::DurationDays),
            "country" => Ok(GroupKey::Country),
            "state" | "us_state" | "us-state" => Ok(GroupKey::UsState),
            other => Err(format!("unknown group key {other:?}")),
        }
    }
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupKey::Month => "month",
            GroupKey::Category => "category",
            GroupKey::DurationDays => "duration_days",
            GroupKey::Country => "country",
            GroupKey::UsState => "us_state",
        })
    }
}

/// Sort key that orders integer groups numerically and text groups lexically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum GroupValue {
    Int(u32),
    Text(String),
}

impl fmt::Display for GroupValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupValue::Int(v) => write!(f, "{v}"),
            GroupValue::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub group: String,
    pub count: usize,
    pub successes: usize,
    pub failures: usize,
    pub success_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryTable {
    pub key: GroupKey,
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    /// Pearson correlation between group size and group success rate, when
    /// defined (at least two groups, neither column constant).
    pub fn count_rate_correlation(&self) -> Option<f64> {
        let xs: Vec<f64> = self.rows.iter().map(|r| r.count as f64).collect();
        let ys: Vec<f64> = self.rows.iter().map(|r| r.success_rate).collect();
        pearson(&xs, &ys).ok()
    }
}

/// Success rate per group. Only successful and failed projects are counted;
/// groups without any are absent. Projects lacking a `us_state` are skipped
/// when grouping by state.
pub fn summarize(corpus: &Corpus, key: GroupKey) -> SummaryTable {
    let mut groups: BTreeMap<GroupValue, (usize, usize)> = BTreeMap::new();
    for p in corpus.projects() {
        if !p.status.is_eligible() {
            continue;
        }
        let value = match key {
            GroupKey::Month => GroupValue::Text(format!(
                "{:04}-{:02}",
                p.launch_date.year(),
                p.launch_date.month()
            )),
            GroupKey::Category => GroupValue::Text(p.category.name().to_string()),
            GroupKey::DurationDays => GroupValue::Int(p.duration_days),
            GroupKey::Country => GroupValue::Text(p.country.clone()),
            GroupKey::UsState => match &p.us_state {
                Some(s) => GroupValue::Text(s.clone()),
                None => continue,
            },
        };
        let entry = groups.entry(value).or_default();
        if p.status == Status::Successful {
            entry.0 += 1;
        } else {
            entry.1 += 1;
        }
    }
    let rows = groups
        .into_iter()
        .map(|(g, (s, f))| SummaryRow {
            group: g.to_string(),
            count: s + f,
            successes: s,
            failures: f,
            success_rate: s as f64 / (s + f) as f64,
        })
        .collect();
    SummaryTable { key, rows }
}

/// Product-moment correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::invalid(format!(
            "pearson: length mismatch {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::invalid("pearson: need at least two points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::invalid("pearson: zero variance input"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Mean per-state share (percent) of each project's total pledged money and
/// total backers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PercentageProfile {
    pub n_states: usize,
    pub money_percent: Vec<f64>,
    pub backers_percent: Vec<f64>,
    /// Projects contributing to the money average (positive total pledged).
    pub n_money: usize,
    /// Projects contributing to the backer average (positive total backers).
    pub n_backers: usize,
}

fn percent_row(daily: &[f64], n_states: usize) -> Option<Vec<f64>> {
    let inc = timeline::state_increments(daily, n_states);
    let total: f64 = daily.iter().sum();
    (total > 0.0).then(|| inc.iter().map(|v| v * 100.0 / total).collect())
}

pub fn temporal_percentage_profile(corpus: &Corpus, n_states: usize) -> Result<PercentageProfile> {
    if n_states == 0 {
        return Err(Error::invalid("n_states must be at least 1"));
    }
    let mut money = vec![0.0; n_states];
    let mut backers = vec![0.0; n_states];
    let (mut n_money, mut n_backers) = (0usize, 0usize);
    for p in corpus.projects() {
        let Some(t) = corpus.temporal(&p.project_id) else {
            continue;
        };
        if let Some(row) = percent_row(&t.daily_pledged, n_states) {
            n_money += 1;
            money.iter_mut().zip(&row).for_each(|(a, v)| *a += v);
        }
        let daily_b: Vec<f64> = t.daily_backers.iter().map(|&b| f64::from(b)).collect();
        if let Some(row) = percent_row(&daily_b, n_states) {
            n_backers += 1;
            backers.iter_mut().zip(&row).for_each(|(a, v)| *a += v);
        }
    }
    if n_money > 0 {
        money.iter_mut().for_each(|v| *v /= n_money as f64);
    }
    if n_backers > 0 {
        backers.iter_mut().for_each(|v| *v /= n_backers as f64);
    }
    Ok(PercentageProfile {
        n_states,
        money_percent: money,
        backers_percent: backers,
        n_money,
        n_backers,
    })
}
