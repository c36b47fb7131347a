//! Feature selection, classifiers and their evaluation.
//!
//! Learners work on an [`EncodedDataset`]: the semantic feature table with
//! the category column expanded to one-hot. All randomness is drawn from
//! seeded streams keyed by tree, stage and fold index, so results do not
//! depend on the rayon thread count.

mod boost;
mod chi2;
mod cv;
mod encode;
mod metrics;
mod model;
mod nb;
mod sweep;
mod tree;

pub use boost::{AdaBoost, BoostParams, Stage};
pub use chi2::{
    chi_squared, chi_squared_table, discretize, select_features, Chi2, RankedFeature, DEFAULT_ALPHA,
    DEFAULT_BINS,
};
pub use cv::{cross_validate, cross_validate_encoded, out_of_fold, stratified_folds, EvalReport};
pub use encode::{class_counts, EncodedDataset, Encoder};
pub use metrics::{accuracy, auc, auc_multiclass, confusion, midranks};
pub use model::{train, Algorithm, ClassifierModel, Learner, Prediction, TrainParams, MODEL_MAGIC};
pub use nb::{GaussianNb, DEFAULT_VAR_FLOOR};
pub use sweep::{state_sweep, StatePoint, SweepOptions};
pub use tree::{DecisionTree, ForestParams, MaxFeatures, Node, RandomForest, TreeParams};
