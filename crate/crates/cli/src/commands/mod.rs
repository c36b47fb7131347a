mod cluster;
mod data;
mod learn;
mod pairs;
mod report;

use std::path::Path;
use std::str::FromStr;

use crowdcast_core::corpus::Corpus;

use crate::args::Command;
use crate::provenance::RunConfig;
use crate::{CliResult, Failure};

pub fn dispatch(cmd: &Command, run: &RunConfig) -> CliResult<()> {
    match cmd {
        Command::Ingest(a) => data::ingest(a, run),
        Command::Featurize(a) => data::featurize(a, run),
        Command::Train(a) => learn::train(a, run),
        Command::Evaluate(a) => learn::evaluate(a, run),
        Command::SweepStates(a) => learn::sweep(a, run),
        Command::Pairs(a) => pairs::pairs(a, run),
        Command::Cluster(a) => cluster::cluster(a, run),
        Command::Summarize(a) => data::summarize(a, run),
        Command::DumpLexicons(a) => data::dump_lexicons(a, run),
        Command::Report(a) => report::report(a, run),
        Command::Synth(a) => data::synth(a, run),
    }
}

/// Parses a string-valued flag, naming it in the error.
fn parse<T: FromStr<Err = String>>(flag: &str, value: &str) -> CliResult<T> {
    value
        .parse()
        .map_err(|e| Failure::Usage(format!("invalid value {value:?} for '--{flag}': {e}")))
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn load_corpus(path: &Path) -> CliResult<Corpus> {
    let (c, _) = Corpus::load_snapshot(path)?;
    Ok(c)
}
