use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Duration, NaiveDate, NaiveTime, Utc};
use serde::{Deserialize, Serialize};

/// The fifteen top-level Kickstarter categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Art,
    Comics,
    Crafts,
    Dance,
    Design,
    Fashion,
    #[serde(rename = "Film & Video", alias = "Film")]
    FilmVideo,
    Food,
    Games,
    Journalism,
    Music,
    Photography,
    Publishing,
    Technology,
    Theater,
}

impl Category {
    pub const COUNT: usize = 15;

    pub const ALL: [Category; Category::COUNT] = [
        Category::Art,
        Category::Comics,
        Category::Crafts,
        Category::Dance,
        Category::Design,
        Category::Fashion,
        Category::FilmVideo,
        Category::Food,
        Category::Games,
        Category::Journalism,
        Category::Music,
        Category::Photography,
        Category::Publishing,
        Category::Technology,
        Category::Theater,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Category> {
        Category::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::Art => "Art",
            Category::Comics => "Comics",
            Category::Crafts => "Crafts",
            Category::Dance => "Dance",
            Category::Design => "Design",
            Category::Fashion => "Fashion",
            Category::FilmVideo => "Film & Video",
            Category::Food => "Food",
            Category::Games => "Games",
            Category::Journalism => "Journalism",
            Category::Music => "Music",
            Category::Photography => "Photography",
            Category::Publishing => "Publishing",
            Category::Technology => "Technology",
            Category::Theater => "Theater",
        }
    }

    /// Identifier-safe lowercase form, used in feature names.
    pub fn slug(self) -> &'static str {
        match self {
            Category::FilmVideo => "film_video",
            Category::Art => "art",
            Category::Comics => "comics",
            Category::Crafts => "crafts",
            Category::Dance => "dance",
            Category::Design => "design",
            Category::Fashion => "fashion",
            Category::Food => "food",
            Category::Games => "games",
            Category::Journalism => "journalism",
            Category::Music => "music",
            Category::Photography => "photography",
            Category::Publishing => "publishing",
            Category::Technology => "technology",
            Category::Theater => "theater",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Successful,
    Failed,
    Canceled,
    Suspended,
}

impl Status {
    pub fn is_eligible(self) -> bool {
        matches!(self, Status::Successful | Status::Failed)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Successful => "successful",
            Status::Failed => "failed",
            Status::Canceled => "canceled",
            Status::Suspended => "suspended",
        }
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "successful" => Ok(Status::Successful),
            "failed" => Ok(Status::Failed),
            "canceled" => Ok(Status::Canceled),
            "suspended" => Ok(Status::Suspended),
            other => Err(format!("unknown status {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectRecord {
    pub project_id: String,
    pub creator_id: String,
    pub category: Category,
    pub launch_date: NaiveDate,
    pub duration_days: u32,
    pub goal_usd: f64,
    pub pledged_usd: f64,
    pub status: Status,
    pub n_images: u32,
    pub n_videos: u32,
    pub n_faqs: u32,
    pub n_rewards: u32,
    pub n_updates: u32,
    pub n_comments: u32,
    pub n_backers: u32,
    pub facebook_connected: bool,
    pub n_fb_friends: u32,
    pub country: String,
    #[serde(default)]
    pub us_state: Option<String>,
    #[serde(default)]
    pub main_description: String,
    #[serde(default)]
    pub reward_description: String,
}

impl ProjectRecord {
    pub const FIELDS: &'static [&'static str] = &[
        "project_id",
        "creator_id",
        "category",
        "launch_date",
        "duration_days",
        "goal_usd",
        "pledged_usd",
        "status",
        "n_images",
        "n_videos",
        "n_faqs",
        "n_rewards",
        "n_updates",
        "n_comments",
        "n_backers",
        "facebook_connected",
        "n_fb_friends",
        "country",
        "us_state",
        "main_description",
        "reward_description",
    ];

    /// Launch instant, 00:00 UTC of the launch date.
    pub fn launch_instant(&self) -> DateTime<Utc> {
        self.launch_date.and_time(NaiveTime::MIN).and_utc()
    }

    /// Deadline instant: launch plus `duration_days` whole days.
    pub fn deadline_instant(&self) -> DateTime<Utc> {
        self.launch_instant() + Duration::days(i64::from(self.duration_days))
    }

    pub(crate) fn check(&self) -> Result<(), String> {
        if self.duration_days < 1 {
            return Err("duration_days must be at least 1".into());
        }
        if !self.goal_usd.is_finite() || self.goal_usd < 0.0 {
            return Err(format!("goal_usd {} is not a non-negative number", self.goal_usd));
        }
        if !self.pledged_usd.is_finite() || self.pledged_usd < 0.0 {
            return Err(format!(
                "pledged_usd {} is not a non-negative number",
                self.pledged_usd
            ));
        }
        let reached = self.pledged_usd >= self.goal_usd;
        match self.status {
            Status::Successful if !reached => Err(format!(
                "status successful but pledged {} < goal {}",
                self.pledged_usd, self.goal_usd
            )),
            Status::Failed if reached => Err(format!(
                "status failed but pledged {} >= goal {}",
                self.pledged_usd, self.goal_usd
            )),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreatorRecord {
    pub creator_id: String,
    pub joined_date: NaiveDate,
    #[serde(default)]
    pub bio: String,
    pub n_backed: u32,
    pub n_created: u32,
    pub n_websites: u32,
    pub n_comments_made: u32,
    pub backed_category_counts: [u32; Category::COUNT],
    pub backed_success_count: u32,
    pub created_success_count_prior: u32,
    pub facebook_connected: bool,
    pub youtube_connected: bool,
    pub twitter_connected: bool,
    pub n_fb_friends: u32,
    #[serde(default)]
    pub twitter_handle: Option<String>,
}

impl CreatorRecord {
    pub const FIELDS: &'static [&'static str] = &[
        "creator_id",
        "joined_date",
        "bio",
        "n_backed",
        "n_created",
        "n_websites",
        "n_comments_made",
        "backed_category_counts",
        "backed_success_count",
        "created_success_count_prior",
        "facebook_connected",
        "youtube_connected",
        "twitter_connected",
        "n_fb_friends",
        "twitter_handle",
    ];

    pub(crate) fn check(&self) -> Result<(), String> {
        let sum: u64 = self.backed_category_counts.iter().map(|&c| u64::from(c)).sum();
        if sum != u64::from(self.n_backed) {
            return Err(format!(
                "backed_category_counts sum to {sum} but n_backed is {}",
                self.n_backed
            ));
        }
        if self.backed_success_count > self.n_backed {
            return Err(format!(
                "backed_success_count {} exceeds n_backed {}",
                self.backed_success_count, self.n_backed
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalSeries {
    pub project_id: String,
    pub daily_pledged: Vec<f64>,
    pub daily_backers: Vec<u32>,
}

impl TemporalSeries {
    pub const FIELDS: &'static [&'static str] = &["project_id", "daily_pledged", "daily_backers"];

    pub fn len(&self) -> usize {
        self.daily_pledged.len()
    }

    pub fn is_empty(&self) -> bool {
        self.daily_pledged.is_empty()
    }

    pub(crate) fn check(&self, duration_days: u32) -> Result<(), String> {
        let d = duration_days as usize;
        if self.daily_pledged.len() != d || self.daily_backers.len() != d {
            return Err(format!(
                "temporal series for {} has lengths {}/{} but duration_days is {d}",
                self.project_id,
                self.daily_pledged.len(),
                self.daily_backers.len()
            ));
        }
        if let Some(v) = self.daily_pledged.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(format!(
                "temporal series for {} has invalid daily pledge {v}",
                self.project_id
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tweet {
    pub timestamp: DateTime<Utc>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocialProfile {
    pub creator_id: String,
    pub n_tweets: u32,
    pub n_following: u32,
    pub n_followers: u32,
    pub n_favorites: u32,
    pub n_lists: u32,
    #[serde(default)]
    pub tweets: Vec<Tweet>,
}

impl SocialProfile {
    pub const FIELDS: &'static [&'static str] = &[
        "creator_id",
        "n_tweets",
        "n_following",
        "n_followers",
        "n_favorites",
        "n_lists",
        "tweets",
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromotionTweet {
    pub project_id: String,
    pub timestamp: DateTime<Utc>,
    pub text: String,
}

impl PromotionTweet {
    pub const FIELDS: &'static [&'static str] = &["project_id", "timestamp", "text"];
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn category_indices_round_trip() {
        for (i, c) in Category::ALL.iter().enumerate() {
            assert_eq!(c.index(), i);
            assert_eq!(Category::from_index(i), Some(*c));
        }
        assert_eq!(Category::from_index(15), None);
    }

    #[test]
    fn category_serde_names() {
        let c: Category = serde_json::from_str("\"Film & Video\"").unwrap();
        assert_eq!(c, Category::FilmVideo);
        assert_eq!(serde_json::to_string(&Category::Theater).unwrap(), "\"Theater\"");
    }
}
