//! Synthetic corpora with known ground truth.
//!
//! The generator plants effects that the analyses should recover:
//!
//! - success is decided first; successful projects pledge 1.01–1.3× their
//!   goal, failed ones at most 0.95×, so the final cumulative pledged ratio
//!   determines the label;
//! - optionally `n_faqs` copies the label (1 for successful, 0 otherwise);
//! - successful projects follow one of three pledge-arrival shapes
//!   (front-loaded, deadline surge, mid-campaign bump) at a near-constant
//!   pledged scale, giving three clusters in normalized bucket space;
//! - relaunch creators own exactly two projects, a failed one followed by a
//!   successful or failed one. "Identical" pairs reuse the main description
//!   verbatim; "dissimilar" pairs draw two unrelated descriptions. Group I
//!   relaunches cut the goal by 60% and double the updates, group II cut the
//!   goal by 15%. All other creators own a single project.
//!
//! [`planted_mixture`] separately draws a Gaussian mixture with known means.

use chrono::{Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::corpus::{
    Category, CorpusParts, CreatorRecord, ProjectRecord, PromotionTweet, SocialProfile, Status, TemporalSeries,
    Tweet,
};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub n_projects: usize,
    /// Probability that a background project succeeds.
    pub success_rate: f64,
    /// Share of background projects that are canceled or suspended.
    pub ineligible_rate: f64,
    pub label_copy: bool,
    pub temporal_rate: f64,
    pub social_rate: f64,
    pub promo: bool,
    pub identical_pairs: usize,
    pub dissimilar_pairs: usize,
    /// Pledged target of every successful project, before daily jitter.
    pub success_scale_usd: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            n_projects: 1000,
            success_rate: 0.46,
            ineligible_rate: 0.03,
            label_copy: false,
            temporal_rate: 1.0,
            social_rate: 0.6,
            promo: true,
            identical_pairs: 10,
            dissimilar_pairs: 50,
            success_scale_usd: 8000.0,
        }
    }
}

pub const SHAPES: [&str; 3] = ["front_loaded", "deadline_surge", "mid_bump"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedPair {
    pub former_id: String,
    pub latter_id: String,
    pub identical: bool,
    pub latter_successful: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub seed: u64,
    pub params: SynthParams,
    pub n_successful: usize,
    pub n_failed: usize,
    pub n_ineligible: usize,
    /// Shape index per successful project with a temporal series.
    pub shapes: Vec<(String, usize)>,
    pub pairs: Vec<PlantedPair>,
}

pub struct SynthCorpus {
    pub parts: CorpusParts,
    pub truth: Truth,
}

const SYLLABLES: [&str; 24] = [
    "ka", "lo", "mi", "ter", "pra", "sun", "vel", "dor", "ix", "qua", "ne", "ro", "bal", "tin", "gre", "mo", "sa",
    "fen", "u", "li", "cor", "das", "pe", "zu",
];

/// Deterministic vocabulary of invented words with 1–4 syllables.
fn vocabulary() -> Vec<String> {
    let mut r = rng::stream(0, "synth-vocabulary", 0);
    let mut words: Vec<String> = Vec::with_capacity(600);
    while words.len() < 600 {
        let n = r.gen_range(1..=4);
        let w: String = (0..n).map(|_| *SYLLABLES.choose(&mut r).unwrap()).collect();
        if !words.contains(&w) {
            words.push(w);
        }
    }
    words
}

fn sentence(r: &mut ChaCha8Rng, vocab: &[String], lo: usize, hi: usize) -> String {
    let n = r.gen_range(lo..=hi);
    let mut s: Vec<&str> = (0..n).map(|_| vocab.choose(r).unwrap().as_str()).collect();
    let first = s[0].to_string();
    let cap = first[..1].to_uppercase() + &first[1..];
    s[0] = &cap;
    format!("{}.", s.join(" "))
}

fn text(r: &mut ChaCha8Rng, vocab: &[String], sentences: std::ops::Range<usize>) -> String {
    let n = r.gen_range(sentences);
    (0..n).map(|_| sentence(r, vocab, 6, 14)).collect::<Vec<_>>().join(" ")
}

fn shape_weight(shape: usize, f: f64) -> f64 {
    match shape {
        0 => (-5.0 * f).exp(),
        1 => (5.0 * (f - 1.0)).exp(),
        _ => (-((f - 0.5) / 0.12).powi(2)).exp() + 0.05,
    }
}

fn round_cents(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

/// Daily amounts with the given arrival shape, summing to about `total`.
///
/// Shaped series draw one Gaussian jitter factor per twentieth of the
/// campaign, applied after normalizing the shape, so bucket amounts are
/// independent and their distribution does not depend on the duration.
/// Unshaped series are renormalized to hit `total` exactly.
fn daily_series(r: &mut ChaCha8Rng, shape: Option<usize>, days: usize, total: f64) -> Vec<f64> {
    let frac = |d: usize| (d as f64 + 0.5) / days as f64;
    match shape {
        Some(s) => {
            let slot_jitter: Vec<f64> = (0..20).map(|_| gauss_factor(r, 0.1)).collect();
            let z: f64 = (0..days).map(|d| shape_weight(s, frac(d))).sum();
            (0..days)
                .map(|d| round_cents(total * shape_weight(s, frac(d)) / z * slot_jitter[(frac(d) * 20.0) as usize]))
                .collect()
        }
        None => {
            let w: Vec<f64> = (0..days)
                .map(|d| {
                    let f = frac(d);
                    ((-2.0 * f).exp() + 0.3 * (3.0 * (f - 1.0)).exp()) * r.gen_range(0.8..1.2)
                })
                .collect();
            let z: f64 = w.iter().sum();
            w.iter().map(|v| round_cents(total * v / z)).collect()
        }
    }
}

/// `1 + sd·z`, clamped to [0.5, 1.5]. Gaussian rather than uniform so the
/// planted shapes are single mixture components.
fn gauss_factor(r: &mut ChaCha8Rng, sd: f64) -> f64 {
    let z: f64 = r.sample(rand_distr::StandardNormal);
    (1.0 + sd * z).clamp(0.5, 1.5)
}

fn poisson(r: &mut ChaCha8Rng, mean: f64) -> u32 {
    Poisson::new(mean.max(1e-9)).map_or(0, |p| p.sample(r) as u32)
}

struct Gen<'a> {
    params: &'a SynthParams,
    vocab: Vec<String>,
    start: NaiveDate,
}

struct Draft {
    status: Status,
    shape: Option<usize>,
    goal: f64,
    pledged_target: f64,
    n_updates: u32,
    main: Option<String>,
}

impl Gen<'_> {
    fn creator(&self, r: &mut ChaCha8Rng, id: &str, n_created: u32, social: bool) -> CreatorRecord {
        let n_backed = poisson(r, 6.0);
        let mut counts = [0u32; Category::COUNT];
        for _ in 0..n_backed {
            counts[r.gen_range(0..Category::COUNT)] += 1;
        }
        CreatorRecord {
            creator_id: id.to_string(),
            joined_date: self.start - Duration::days(r.gen_range(30..900)),
            bio: text(r, &self.vocab, 1..4),
            n_backed,
            n_created,
            n_websites: r.gen_range(0..4),
            n_comments_made: poisson(r, 4.0),
            backed_category_counts: counts,
            backed_success_count: r.gen_range(0..=n_backed),
            created_success_count_prior: 0,
            facebook_connected: r.gen_bool(0.6),
            youtube_connected: r.gen_bool(0.2),
            twitter_connected: social,
            n_fb_friends: poisson(r, 300.0),
            twitter_handle: social.then(|| format!("@{id}")),
        }
    }

    fn project(&self, r: &mut ChaCha8Rng, id: &str, creator: &str, launch: NaiveDate, d: Draft) -> ProjectRecord {
        let ok = d.status == Status::Successful;
        let country = *["US", "US", "US", "GB", "CA"].choose(r).unwrap();
        ProjectRecord {
            project_id: id.to_string(),
            creator_id: creator.to_string(),
            category: Category::ALL[r.gen_range(0..Category::COUNT)],
            launch_date: launch,
            duration_days: 0,
            goal_usd: d.goal,
            pledged_usd: d.pledged_target,
            status: d.status,
            n_images: poisson(r, if ok { 6.0 } else { 3.0 }),
            n_videos: poisson(r, if ok { 1.5 } else { 0.8 }),
            n_faqs: if self.params.label_copy {
                u32::from(ok)
            } else {
                poisson(r, 1.0)
            },
            n_rewards: 1 + poisson(r, if ok { 8.0 } else { 6.0 }),
            n_updates: d.n_updates,
            n_comments: poisson(r, if ok { 15.0 } else { 3.0 }),
            n_backers: 0,
            facebook_connected: r.gen_bool(0.6),
            n_fb_friends: poisson(r, 300.0),
            country: country.to_string(),
            us_state: (country == "US").then(|| (*["CA", "NY", "TX", "WA", "IL"].choose(r).unwrap()).to_string()),
            main_description: d.main.unwrap_or_else(|| text(r, &self.vocab, 3..8)),
            reward_description: text(r, &self.vocab, 1..4),
        }
    }

    fn draft(&self, r: &mut ChaCha8Rng, status: Status) -> Draft {
        match status {
            Status::Successful => {
                let pledged = self.params.success_scale_usd;
                Draft {
                    status,
                    shape: Some(r.gen_range(0..SHAPES.len())),
                    goal: (pledged / r.gen_range(1.05..1.3)).round(),
                    pledged_target: pledged,
                    n_updates: poisson(r, 6.0),
                    main: None,
                }
            }
            _ => {
                let goal = (300f64.ln() + r.gen::<f64>() * (60_000f64 / 300.0).ln()).exp().round();
                Draft {
                    status,
                    shape: None,
                    goal,
                    pledged_target: goal * r.gen_range(0.0..0.9),
                    n_updates: poisson(r, 2.0),
                    main: None,
                }
            }
        }
    }
}

/// Fills in temporal series and the fields derived from it.
fn finish(
    r: &mut ChaCha8Rng,
    p: &mut ProjectRecord,
    shape: Option<usize>,
    with_temporal: bool,
) -> Option<TemporalSeries> {
    // shaped campaigns last a multiple of 20 days so every clustering
    // bucket spans the same number of days
    let days = match shape {
        Some(_) => 20 * r.gen_range(1..=3usize),
        None => r.gen_range(20..=60usize),
    };
    p.duration_days = days as u32;
    let daily = daily_series(r, shape, days, p.pledged_usd);
    let total = round_cents(daily.iter().sum::<f64>());
    p.pledged_usd = total;
    // jitter on shaped series can cross the goal; keep the planted status
    if p.status == Status::Successful && total < p.goal_usd {
        p.goal_usd = (total / 1.05).floor();
    }
    debug_assert!(match p.status {
        Status::Successful => total >= p.goal_usd,
        Status::Failed => total < p.goal_usd,
        _ => true,
    });
    let avg_pledge = r.gen_range(40.0..100.0);
    let backers: Vec<u32> = daily.iter().map(|v| (v / avg_pledge).round() as u32).collect();
    p.n_backers = backers.iter().sum();
    with_temporal.then(|| TemporalSeries {
        project_id: p.project_id.clone(),
        daily_pledged: daily,
        daily_backers: backers,
    })
}

fn social_profile(r: &mut ChaCha8Rng, g: &Gen, creator: &str, projects: &[&ProjectRecord]) -> SocialProfile {
    let mut tweets = Vec::new();
    for p in projects {
        let start = p.launch_instant();
        let span = i64::from(p.duration_days) * 86_400;
        for _ in 0..poisson(r, 5.0) {
            let mut t = sentence(r, &g.vocab, 4, 10);
            if r.gen_bool(0.4) {
                t.push_str(" Back us on Kickstarter!");
            }
            tweets.push(Tweet {
                timestamp: start + Duration::seconds(r.gen_range(0..span)),
                text: t,
            });
        }
    }
    SocialProfile {
        creator_id: creator.to_string(),
        n_tweets: tweets.len() as u32 + poisson(r, 200.0),
        n_following: poisson(r, 150.0),
        n_followers: poisson(r, 250.0),
        n_favorites: poisson(r, 80.0),
        n_lists: poisson(r, 3.0),
        tweets,
    }
}

fn promo_tweets(r: &mut ChaCha8Rng, p: &ProjectRecord, t: &TemporalSeries) -> Vec<PromotionTweet> {
    let mean = if p.status == Status::Successful { 20.0 } else { 4.0 };
    let n = poisson(r, mean);
    let total: f64 = t.daily_pledged.iter().sum();
    let start = p.launch_instant();
    (0..n)
        .map(|_| {
            // day drawn in proportion to that day's pledges
            let day = if total > 0.0 {
                let mut u = r.gen::<f64>() * total;
                let mut at = t.daily_pledged.len() - 1;
                for (d, &v) in t.daily_pledged.iter().enumerate() {
                    if u < v {
                        at = d;
                        break;
                    }
                    u -= v;
                }
                at
            } else {
                r.gen_range(0..t.daily_pledged.len())
            };
            PromotionTweet {
                project_id: p.project_id.clone(),
                timestamp: start + Duration::days(day as i64) + Duration::seconds(r.gen_range(0..86_400)),
                text: format!("Please support {} on Kickstarter", p.project_id),
            }
        })
        .collect()
}

pub fn generate(params: &SynthParams, seed: u64) -> Result<SynthCorpus> {
    let n_pair_projects = 2 * (params.identical_pairs + params.dissimilar_pairs);
    if params.n_projects < n_pair_projects {
        return Err(Error::invalid(format!(
            "{} projects cannot hold {} relaunch pairs",
            params.n_projects,
            n_pair_projects / 2
        )));
    }
    for (name, v) in [
        ("success_rate", params.success_rate),
        ("ineligible_rate", params.ineligible_rate),
        ("temporal_rate", params.temporal_rate),
        ("social_rate", params.social_rate),
    ] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::invalid(format!("{name} must lie in [0, 1], got {v}")));
        }
    }
    let g = Gen {
        params,
        vocab: vocabulary(),
        start: NaiveDate::from_ymd_opt(2014, 1, 1).expect("valid date"),
    };
    let mut parts = CorpusParts::default();
    let mut shapes = Vec::new();
    let mut pairs = Vec::new();

    // (creator id, project indices) for social profiles
    let mut owners: Vec<(String, Vec<usize>)> = Vec::new();
    let mut shape_of: Vec<Option<usize>> = Vec::new();

    let n_pairs = params.identical_pairs + params.dissimilar_pairs;
    for k in 0..n_pairs {
        let mut r = rng::stream(seed, "synth-pair", k as u64);
        let cid = format!("rc{k:05}");
        let identical = k < params.identical_pairs;
        // alternate groups so both are populated
        let latter_ok = k % 2 == 0;
        let launch = g.start + Duration::days(r.gen_range(0..300));
        let mut former = g.draft(&mut r, Status::Failed);
        // successful relaunches pledge on the common success scale
        let latter_pledged = params.success_scale_usd;
        let goal0 = if latter_ok {
            (latter_pledged / (0.4 * r.gen_range(1.1..1.3))).round()
        } else {
            former.goal.max(1000.0)
        };
        former.goal = goal0;
        former.pledged_target = goal0 * r.gen_range(0.05..0.6);
        former.n_updates = 2 + poisson(&mut r, 2.0);
        let description = text(&mut r, &g.vocab, 4..8);
        former.main = Some(description.clone());
        let updates0 = former.n_updates;
        let fid = format!("rp{k:05}a");
        let lid = format!("rp{k:05}b");
        let fp = g.project(&mut r, &fid, &cid, launch, former);
        let latter = if latter_ok {
            let goal = (goal0 * 0.4).round();
            Draft {
                status: Status::Successful,
                shape: Some(r.gen_range(0..SHAPES.len())),
                goal,
                pledged_target: latter_pledged,
                n_updates: updates0 * 2 + r.gen_range(0..2),
                main: None,
            }
        } else {
            let goal = (goal0 * 0.85).round();
            Draft {
                status: Status::Failed,
                shape: None,
                goal,
                pledged_target: goal * r.gen_range(0.05..0.6),
                n_updates: updates0 + r.gen_range(0..2),
                main: None,
            }
        };
        let latter_shape = latter.shape;
        let latter = Draft {
            main: Some(if identical {
                description
            } else {
                text(&mut r, &g.vocab, 4..8)
            }),
            ..latter
        };
        let relaunch = launch + Duration::days(90 + r.gen_range(0..60));
        let lp = g.project(&mut r, &lid, &cid, relaunch, latter);
        let social = r.gen_bool(params.social_rate);
        parts.creators.push(g.creator(&mut r, &cid, 2, social));
        owners.push((cid, vec![parts.projects.len(), parts.projects.len() + 1]));
        parts.projects.push(fp);
        parts.projects.push(lp);
        shape_of.push(None);
        shape_of.push(latter_shape);
        pairs.push(PlantedPair {
            former_id: fid,
            latter_id: lid,
            identical,
            latter_successful: latter_ok,
        });
    }

    for i in 0..params.n_projects - n_pair_projects {
        let mut r = rng::stream(seed, "synth-project", i as u64);
        let status = if r.gen_bool(params.ineligible_rate) {
            if r.gen_bool(0.8) {
                Status::Canceled
            } else {
                Status::Suspended
            }
        } else if r.gen_bool(params.success_rate) {
            Status::Successful
        } else {
            Status::Failed
        };
        let cid = format!("c{i:06}");
        let pid = format!("p{i:06}");
        let d = g.draft(&mut r, status);
        let shape = d.shape;
        let launch = g.start + Duration::days(r.gen_range(0..700));
        let p = g.project(&mut r, &pid, &cid, launch, d);
        let social = r.gen_bool(params.social_rate);
        parts.creators.push(g.creator(&mut r, &cid, 1, social));
        owners.push((cid, vec![parts.projects.len()]));
        parts.projects.push(p);
        shape_of.push(shape);
    }

    for (i, p) in parts.projects.iter_mut().enumerate() {
        let mut r = rng::stream(seed, "synth-series", i as u64);
        let with_temporal = r.gen_bool(params.temporal_rate);
        if let Some(t) = finish(&mut r, p, shape_of[i], with_temporal) {
            if let (Status::Successful, Some(s)) = (p.status, shape_of[i]) {
                shapes.push((p.project_id.clone(), s));
            }
            if params.promo && p.status.is_eligible() {
                parts.promo_tweets.extend(promo_tweets(&mut r, p, &t));
            }
            parts.temporal.push(t);
        }
    }

    for (k, (cid, idx)) in owners.iter().enumerate() {
        let creator = &parts.creators[k];
        if creator.twitter_handle.is_none() {
            continue;
        }
        let mut r = rng::stream(seed, "synth-social", k as u64);
        let ps: Vec<&ProjectRecord> = idx.iter().map(|&i| &parts.projects[i]).collect();
        let s = social_profile(&mut r, &g, cid, &ps);
        parts.social.push(s);
    }

    let count = |s: Status| parts.projects.iter().filter(|p| p.status == s).count();
    let truth = Truth {
        seed,
        params: params.clone(),
        n_successful: count(Status::Successful),
        n_failed: count(Status::Failed),
        n_ineligible: count(Status::Canceled) + count(Status::Suspended),
        shapes,
        pairs,
    };
    Ok(SynthCorpus { parts, truth })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedMixture {
    pub x: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub means: Vec<Vec<f64>>,
}

/// `n` rows from `k` equally weighted unit-variance diagonal Gaussians in
/// `dim` dimensions. Component `c` sits at `separation` on every coordinate
/// `j` with `j % k == c` and at 0 elsewhere. Row `i` belongs to `i % k`.
pub fn planted_mixture(n: usize, k: usize, dim: usize, separation: f64, seed: u64) -> Result<PlantedMixture> {
    if k == 0 || dim == 0 {
        return Err(Error::invalid("mixture needs k >= 1 and dim >= 1"));
    }
    let means: Vec<Vec<f64>> = (0..k)
        .map(|c| (0..dim).map(|j| if j % k == c { separation } else { 0.0 }).collect())
        .collect();
    let mut r = rng::stream(seed, "planted-mixture", 0);
    let z = Normal::new(0.0, 1.0).expect("unit normal");
    let labels: Vec<usize> = (0..n).map(|i| i % k).collect();
    let x = labels
        .iter()
        .map(|&c| means[c].iter().map(|m| m + z.sample(&mut r)).collect())
        .collect();
    Ok(PlantedMixture { x, labels, means })
}
