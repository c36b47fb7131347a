use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Category;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Project,
    User,
    Temporal,
    Social,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureKind {
    Numeric,
    /// Index into [`Category::ALL`].
    Categorical,
    Boolean,
}

impl FeatureKind {
    /// Number of natural categories, for discrete kinds.
    pub fn cardinality(self) -> Option<usize> {
        match self {
            FeatureKind::Numeric => None,
            FeatureKind::Categorical => Some(Category::COUNT),
            FeatureKind::Boolean => Some(2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureDescriptor {
    pub name: String,
    pub family: Family,
    pub kind: FeatureKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DatasetConfig {
    Static,
    StaticSocial,
    Full,
}

impl DatasetConfig {
    pub fn families(self) -> &'static [Family] {
        match self {
            DatasetConfig::Static => &[Family::Project, Family::User],
            DatasetConfig::StaticSocial => &[Family::Project, Family::User, Family::Social],
            DatasetConfig::Full => &[Family::Project, Family::User, Family::Temporal, Family::Social],
        }
    }

    pub fn needs_social(self) -> bool {
        self != DatasetConfig::Static
    }

    pub fn needs_temporal(self) -> bool {
        self == DatasetConfig::Full
    }
}

impl FromStr for DatasetConfig {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "static" => Ok(DatasetConfig::Static),
            "static+social" => Ok(DatasetConfig::StaticSocial),
            "full" | "static+temporal+social" => Ok(DatasetConfig::Full),
            other => Err(format!("unknown dataset config {other:?}")),
        }
    }
}

impl fmt::Display for DatasetConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DatasetConfig::Static => "static",
            DatasetConfig::StaticSocial => "static+social",
            DatasetConfig::Full => "full",
        })
    }
}

const PROJECT: &[(&str, FeatureKind)] = &[
    ("category", FeatureKind::Categorical),
    ("duration_days", FeatureKind::Numeric),
    ("goal_usd", FeatureKind::Numeric),
    ("n_images", FeatureKind::Numeric),
    ("n_videos", FeatureKind::Numeric),
    ("n_faqs", FeatureKind::Numeric),
    ("n_rewards", FeatureKind::Numeric),
    ("smog_reward", FeatureKind::Numeric),
    ("smog_main", FeatureKind::Numeric),
    ("sentences_reward", FeatureKind::Numeric),
    ("sentences_main", FeatureKind::Numeric),
];

// Preceded by the fifteen backed-category shares.
const USER_TAIL: &[(&str, FeatureKind)] = &[
    ("n_backed", FeatureKind::Numeric),
    ("n_created", FeatureKind::Numeric),
    ("n_comments_made", FeatureKind::Numeric),
    ("n_websites", FeatureKind::Numeric),
    ("creator_fb_friends", FeatureKind::Numeric),
    ("facebook_connected", FeatureKind::Boolean),
    ("youtube_connected", FeatureKind::Boolean),
    ("twitter_connected", FeatureKind::Boolean),
    ("smog_bio", FeatureKind::Numeric),
    ("sentences_bio", FeatureKind::Numeric),
    ("join_interval_days", FeatureKind::Numeric),
    ("backed_success_rate", FeatureKind::Numeric),
    ("created_success_rate", FeatureKind::Numeric),
];

const TEMPORAL: &[(&str, FeatureKind)] = &[
    ("cum_pledged_ratio", FeatureKind::Numeric),
    ("cum_backers", FeatureKind::Numeric),
];

const SOCIAL: &[(&str, FeatureKind)] = &[
    ("n_tweets", FeatureKind::Numeric),
    ("n_following", FeatureKind::Numeric),
    ("n_followers", FeatureKind::Numeric),
    ("n_favorites", FeatureKind::Numeric),
    ("n_lists", FeatureKind::Numeric),
    ("tweets_in_window", FeatureKind::Numeric),
    ("keyword_tweets_in_window", FeatureKind::Numeric),
    ("smog_window_tweets", FeatureKind::Numeric),
];

pub const N_PROJECT: usize = 11;
pub const N_USER: usize = 28;
pub const N_TEMPORAL: usize = 2;
pub const N_SOCIAL: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    features: Vec<FeatureDescriptor>,
}

impl FeatureSchema {
    pub fn new(features: Vec<FeatureDescriptor>) -> FeatureSchema {
        FeatureSchema { features }
    }

    pub fn for_config(config: DatasetConfig) -> FeatureSchema {
        let mut features = Vec::new();
        let mut push = |family, list: &[(&str, FeatureKind)]| {
            for &(name, kind) in list {
                features.push(FeatureDescriptor {
                    name: name.to_string(),
                    family,
                    kind,
                });
            }
        };
        for &family in config.families() {
            match family {
                Family::Project => push(family, PROJECT),
                Family::User => {
                    let shares: Vec<(String, FeatureKind)> = Category::ALL
                        .iter()
                        .map(|c| (format!("backed_share_{}", c.slug()), FeatureKind::Numeric))
                        .collect();
                    let shares: Vec<(&str, FeatureKind)> =
                        shares.iter().map(|(n, k)| (n.as_str(), *k)).collect();
                    push(family, &shares);
                    push(family, USER_TAIL);
                }
                Family::Temporal => push(family, TEMPORAL),
                Family::Social => push(family, SOCIAL),
            }
        }
        FeatureSchema { features }
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> &[FeatureDescriptor] {
        &self.features
    }

    pub fn get(&self, i: usize) -> &FeatureDescriptor {
        &self.features[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn count(&self, family: Family) -> usize {
        self.features.iter().filter(|f| f.family == family).count()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|f| f.name.as_str())
    }

    /// Schema restricted to the given feature indices, in that order.
    pub fn select(&self, keep: &[usize]) -> FeatureSchema {
        FeatureSchema {
            features: keep.iter().map(|&i| self.features[i].clone()).collect(),
        }
    }
}
