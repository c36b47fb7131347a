use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};

use super::schema::{N_PROJECT, N_SOCIAL, N_USER};
use crate::corpus::{Category, CreatorRecord, ProjectRecord, SocialProfile, TemporalSeries};
use crate::error::{Error, Result};
use crate::textstats::text_stats;
use crate::timeline;

fn ratio(num: u32, den: u32) -> f64 {
    if den == 0 {
        0.0
    } else {
        (f64::from(num) / f64::from(den)).min(1.0)
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// The 11 project features followed by the 28 creator features.
///
/// Undefined rates (nothing backed, nothing created before) are 0. A creator
/// who joined after the launch date yields a negative interval, which is an
/// error in strict mode and kept as-is otherwise.
pub fn extract_static(p: &ProjectRecord, u: &CreatorRecord, strict: bool) -> Result<Vec<f64>> {
    let interval = (p.launch_date - u.joined_date).num_days();
    if strict && interval < 0 {
        return Err(Error::Validation(format!(
            "project {} launched {} before its creator {} joined {}",
            p.project_id, p.launch_date, u.creator_id, u.joined_date
        )));
    }
    let main = text_stats(&p.main_description);
    let reward = text_stats(&p.reward_description);
    let bio = text_stats(&u.bio);

    let mut v = Vec::with_capacity(N_PROJECT + N_USER);
    v.extend([
        p.category.index() as f64,
        f64::from(p.duration_days),
        p.goal_usd,
        f64::from(p.n_images),
        f64::from(p.n_videos),
        f64::from(p.n_faqs),
        f64::from(p.n_rewards),
        reward.smog,
        main.smog,
        reward.sentences as f64,
        main.sentences as f64,
    ]);
    for c in Category::ALL {
        v.push(ratio(u.backed_category_counts[c.index()], u.n_backed));
    }
    v.extend([
        f64::from(u.n_backed),
        f64::from(u.n_created),
        f64::from(u.n_comments_made),
        f64::from(u.n_websites),
        f64::from(u.n_fb_friends),
        flag(u.facebook_connected),
        flag(u.youtube_connected),
        flag(u.twitter_connected),
        bio.smog,
        bio.sentences as f64,
        interval as f64,
        ratio(u.backed_success_count, u.n_backed),
        ratio(u.created_success_count_prior, u.n_created),
    ]);
    debug_assert_eq!(v.len(), N_PROJECT + N_USER);
    Ok(v)
}

/// Closed window of active project days for social features:
/// launch 00:00 UTC through the end (24:00) of day `launch + duration`.
pub fn social_window(p: &ProjectRecord) -> (DateTime<Utc>, DateTime<Utc>) {
    let start = p.launch_instant();
    (start, start + Duration::days(i64::from(p.duration_days) + 1))
}

pub fn extract_social(
    s: &SocialProfile,
    window: (DateTime<Utc>, DateTime<Utc>),
) -> [f64; N_SOCIAL] {
    let (start, end) = window;
    let in_window: Vec<&str> = s
        .tweets
        .iter()
        .filter(|t| t.timestamp >= start && t.timestamp <= end)
        .map(|t| t.text.as_str())
        .collect();
    let keyword = in_window
        .iter()
        .filter(|t| t.to_lowercase().contains("kickstarter"))
        .count();
    let joined = in_window.join(" ");
    [
        f64::from(s.n_tweets),
        f64::from(s.n_following),
        f64::from(s.n_followers),
        f64::from(s.n_favorites),
        f64::from(s.n_lists),
        in_window.len() as f64,
        keyword as f64,
        text_stats(&joined).smog,
    ]
}

/// Cumulative progress sampled at `n_states` equal fractions of the campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSeries {
    pub project_id: String,
    /// Cumulative pledged divided by goal (all 0 when the goal is 0).
    pub cumulative_pledged_ratio: Vec<f64>,
    pub cumulative_backers: Vec<f64>,
}

impl StateSeries {
    pub fn n_states(&self) -> usize {
        self.cumulative_pledged_ratio.len()
    }

    /// Values at state `s`; state 0 is the launch instant, all zeros.
    pub fn at(&self, s: usize) -> (f64, f64) {
        if s == 0 {
            (0.0, 0.0)
        } else {
            (
                self.cumulative_pledged_ratio[s - 1],
                self.cumulative_backers[s - 1],
            )
        }
    }
}

pub fn resample_states(t: &TemporalSeries, p: &ProjectRecord, n_states: usize) -> Result<StateSeries> {
    if n_states == 0 {
        return Err(Error::invalid("n_states must be at least 1"));
    }
    if t.is_empty() || t.len() != p.duration_days as usize || t.daily_backers.len() != t.len() {
        return Err(Error::Validation(format!(
            "temporal series for {} has length {} but duration is {}",
            t.project_id,
            t.len(),
            p.duration_days
        )));
    }
    let pledged = timeline::sample_states(&timeline::cumulative(&t.daily_pledged), n_states);
    let backers_daily: Vec<f64> = t.daily_backers.iter().map(|&b| f64::from(b)).collect();
    let backers = timeline::sample_states(&timeline::cumulative(&backers_daily), n_states);
    let goal = p.goal_usd;
    let ratio = pledged
        .into_iter()
        .map(|c| if goal > 0.0 { c / goal } else { 0.0 })
        .collect();
    Ok(StateSeries {
        project_id: t.project_id.clone(),
        cumulative_pledged_ratio: ratio,
        cumulative_backers: backers,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RangeScheme {
    TwoClass,
    ThreeClass,
}

/// Pledged-money range class. Two classes split at $5,000; three classes at
/// $100 and $10,000. Upper bounds are inclusive.
pub fn label_range(pledged_usd: f64, scheme: RangeScheme) -> usize {
    match scheme {
        RangeScheme::TwoClass => usize::from(pledged_usd > 5_000.0),
        RangeScheme::ThreeClass => {
            if pledged_usd <= 100.0 {
                0
            } else if pledged_usd <= 10_000.0 {
                1
            } else {
                2
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures::{creator, project};
    use crate::corpus::{Status, Tweet};
    use crate::features::schema::{DatasetConfig, FeatureSchema};
    use chrono::NaiveDate;
    use proptest::prelude::*;

    fn value(v: &[f64], name: &str) -> f64 {
        let schema = FeatureSchema::for_config(DatasetConfig::Static);
        v[schema.index_of(name).unwrap()]
    }

    #[test]
    fn creator_without_backing_has_zero_shares() {
        let p = project("p", "c", Status::Successful);
        let v = extract_static(&p, &creator("c"), true).unwrap();
        assert_eq!(v.len(), 39);
        for c in Category::ALL {
            assert_eq!(value(&v, &format!("backed_share_{}", c.slug())), 0.0);
        }
        assert_eq!(value(&v, "backed_success_rate"), 0.0);
        assert_eq!(value(&v, "created_success_rate"), 0.0);
    }

    #[test]
    fn all_music_backing() {
        let p = project("p", "c", Status::Successful);
        let mut u = creator("c");
        u.n_backed = 4;
        u.backed_category_counts[Category::Music.index()] = 4;
        u.backed_success_count = 3;
        let v = extract_static(&p, &u, true).unwrap();
        assert_eq!(value(&v, "backed_share_music"), 1.0);
        assert_eq!(value(&v, "backed_share_art"), 0.0);
        assert_eq!(value(&v, "backed_success_rate"), 0.75);
    }

    #[test]
    fn join_interval_in_days() {
        let p = project("p", "c", Status::Successful); // launched 2014-01-31
        let mut u = creator("c");
        u.joined_date = NaiveDate::from_ymd_opt(2014, 1, 1).unwrap();
        assert_eq!(value(&extract_static(&p, &u, true).unwrap(), "join_interval_days"), 30.0);
        u.joined_date = NaiveDate::from_ymd_opt(2014, 3, 1).unwrap();
        assert!(extract_static(&p, &u, true).is_err());
        assert_eq!(value(&extract_static(&p, &u, false).unwrap(), "join_interval_days"), -29.0);
    }

    fn profile(tweets: Vec<Tweet>) -> SocialProfile {
        SocialProfile {
            creator_id: "c".into(),
            n_tweets: 10,
            n_following: 20,
            n_followers: 30,
            n_favorites: 40,
            n_lists: 2,
            tweets,
        }
    }

    #[test]
    fn social_keyword_and_window() {
        let p = project("p", "c", Status::Successful);
        let (start, end) = social_window(&p);
        let tw = |ts, text: &str| Tweet {
            timestamp: ts,
            text: text.into(),
        };
        let s = profile(vec![
            tw(start, "Back my KICKSTARTER!"),
            tw(start + Duration::hours(3), "hello"),
            tw(end, "last call on kickstarter"),
            tw(end + Duration::seconds(1), "kickstarter is over"),
            tw(start - Duration::seconds(1), "soon on kickstarter"),
        ]);
        let f = extract_social(&s, (start, end));
        assert_eq!(&f[..5], &[10.0, 20.0, 30.0, 40.0, 2.0]);
        assert_eq!(f[5], 3.0);
        assert_eq!(f[6], 2.0);

        let empty = extract_social(&profile(vec![]), (start, end));
        assert_eq!(empty[5..], [0.0, 0.0, 0.0]);
    }

    #[test]
    fn resample_five_day_example() {
        let mut p = project("p", "c", Status::Successful);
        p.goal_usd = 800.0;
        p.pledged_usd = 800.0;
        let t = TemporalSeries {
            project_id: "p".into(),
            daily_pledged: vec![100.0, 200.0, 200.0, 100.0, 200.0],
            daily_backers: vec![1, 2, 0, 1, 3],
        };
        let s = resample_states(&t, &p, 5).unwrap();
        assert_eq!(s.cumulative_pledged_ratio, vec![0.125, 0.375, 0.625, 0.75, 1.0]);
        assert_eq!(s.cumulative_backers, vec![1.0, 3.0, 3.0, 4.0, 7.0]);
        assert_eq!(s.at(0), (0.0, 0.0));

        let zeros = TemporalSeries {
            project_id: "p".into(),
            daily_pledged: vec![0.0; 5],
            daily_backers: vec![0; 5],
        };
        let z = resample_states(&zeros, &p, 100).unwrap();
        assert!(z.cumulative_pledged_ratio.iter().chain(&z.cumulative_backers).all(|v| *v == 0.0));

        p.duration_days = 6;
        assert!(resample_states(&t, &p, 5).is_err());
    }

    #[test]
    fn range_labels() {
        assert_eq!(label_range(5000.0, RangeScheme::TwoClass), 0);
        assert_eq!(label_range(5000.01, RangeScheme::TwoClass), 1);
        assert_eq!(label_range(100.0, RangeScheme::ThreeClass), 0);
        assert_eq!(label_range(100.5, RangeScheme::ThreeClass), 1);
        assert_eq!(label_range(10_000.0, RangeScheme::ThreeClass), 1);
        assert_eq!(label_range(10_000.01, RangeScheme::ThreeClass), 2);
    }

    proptest! {
        #[test]
        fn state_series_monotone(
            daily in prop::collection::vec(0.0f64..1000.0, 1..70),
            n in 1usize..120,
            goal in 0.0f64..5000.0,
        ) {
            let mut p = project("p", "c", Status::Failed);
            p.duration_days = daily.len() as u32;
            p.goal_usd = goal;
            let t = TemporalSeries {
                project_id: "p".into(),
                daily_backers: daily.iter().map(|v| (*v as u32) % 7).collect(),
                daily_pledged: daily.clone(),
            };
            let s = resample_states(&t, &p, n).unwrap();
            prop_assert_eq!(s.n_states(), n);
            for w in s.cumulative_pledged_ratio.windows(2) { prop_assert!(w[0] <= w[1]); }
            for w in s.cumulative_backers.windows(2) { prop_assert!(w[0] <= w[1]); }
            if goal > 0.0 {
                let total: f64 = daily.iter().sum();
                prop_assert_eq!(s.cumulative_pledged_ratio[n - 1] >= 1.0, total >= goal);
            }
        }
    }
}
