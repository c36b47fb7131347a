use serde::Serialize;

use super::cv::{cross_validate, EvalReport};
use super::model::{Algorithm, TrainParams};
use crate::corpus::Corpus;
use crate::error::Result;
use crate::features::{assemble_dataset, AssembleOptions, DatasetConfig, Task};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatePoint {
    pub state: usize,
    pub report: EvalReport,
}

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    pub folds: usize,
    pub assemble: AssembleOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            folds: 5,
            assemble: AssembleOptions::default(),
        }
    }
}

/// Cross-validates the full feature configuration with temporal features
/// cut off at each requested state. Every state reuses the same seed, so
/// the fold partition is shared along the curve.
pub fn state_sweep(
    c: &Corpus,
    task: Task,
    algo: Algorithm,
    params: &TrainParams,
    states: &[usize],
    opts: SweepOptions,
    seed: u64,
) -> Result<Vec<StatePoint>> {
    states
        .iter()
        .map(|&s| {
            let (d, _) = assemble_dataset(c, DatasetConfig::Full, Some(s), opts.assemble)?;
            log::debug!("state {s}: {} rows", d.len());
            let report = cross_validate(&d, task, algo, params, opts.folds, seed)?;
            Ok(StatePoint { state: s, report })
        })
        .collect()
}
