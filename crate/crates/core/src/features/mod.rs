//! Feature datasets for success and pledged-range prediction.
//!
//! Three configurations are supported: static (project + creator features,
//! 39 columns), static+social (47) and full (static + temporal + social, 49).
//! The project category stays a single categorical column; one-hot expansion
//! happens when a dataset is encoded for a learner.

mod dataset;
mod extract;
mod schema;

pub use dataset::{
    assemble_dataset, AssembleOptions, AssembleReport, Dataset, FeatureVector, Task, DATASET_MAGIC,
};
pub use extract::{
    extract_social, extract_static, label_range, resample_states, social_window, RangeScheme,
    StateSeries,
};
pub use schema::{
    DatasetConfig, Family, FeatureDescriptor, FeatureKind, FeatureSchema, N_PROJECT, N_SOCIAL,
    N_TEMPORAL, N_USER,
};
