//! Crowdfunding campaign analytics.
//!
//! The crate covers the full analysis pipeline over a corpus of campaigns:
//!
//! - [`corpus`]: record types, JSON Lines ingestion, validation, summaries
//! - [`textstats`]: sentence splitting, syllables, SMOG grade, TF-IDF space
//! - [`features`]: static, social and temporal feature datasets
//! - [`mlcore`]: chi-squared selection, Naive Bayes, Random Forest,
//!   AdaBoost-M1, stratified cross-validation and the per-state sweep
//! - [`relaunch`]: failed-project relaunch pairs and their change rates
//! - [`clusterlab`]: bucketed pledge curves clustered with a Gaussian mixture
//! - [`synth`]: a synthetic corpus generator with recoverable ground truth

pub mod clusterlab;
pub mod corpus;
pub mod error;
pub mod features;
pub mod mlcore;
pub mod relaunch;
pub mod rng;
pub mod snapshot;
pub mod synth;
pub mod textstats;
pub mod timeline;

pub use error::{Error, Result};
