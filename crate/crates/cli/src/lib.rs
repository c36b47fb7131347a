//! The `crowdcast` command line.
//!
//! [`run`] parses arguments, applies an optional `--config` file, runs one
//! subcommand inside a dedicated rayon pool and maps failures to exit codes:
//! 2 for usage errors, 3 for data and validation errors, 4 for numerical
//! failures.

pub mod args;
mod commands;
pub mod config;
pub mod provenance;

use std::ffi::OsString;
use std::fs;

use clap::{CommandFactory, FromArgMatches};

use crate::args::Cli;
use crate::provenance::RunConfig;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(crowdcast_core::Error),
}

impl From<crowdcast_core::Error> for Failure {
    fn from(e: crowdcast_core::Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            Failure::Core(_) => EXIT_DATA,
        }
    }
}

impl Failure {
    pub fn kind(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Core(e) if e.is_numerical() => "numerical",
            Failure::Core(_) => "data",
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => f.write_str(m),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;

fn command() -> clap::Command {
    let cmd = Cli::command();
    let names: Vec<String> = cmd.get_subcommands().map(|s| s.get_name().to_string()).collect();
    // later occurrences win, so explicit flags override config-file ones
    names
        .iter()
        .fold(cmd, |c, n| c.mut_subcommand(n, |s| s.args_override_self(true)))
        .args_override_self(true)
}

fn with_config(cmd: &clap::Command, argv: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let (path, sub) = config::locate(&argv, cmd);
    let (Some(path), Some(sub)) = (path, sub) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| Failure::Usage(format!("cannot read '--config' file {}: {e}", path.display())))?;
    let pairs = config::parse(&text).map_err(Failure::Usage)?;
    let name = argv[sub].to_string_lossy().into_owned();
    let extra = config::expand(cmd, &name, &pairs).map_err(Failure::Usage)?;
    let mut out = argv[..=sub].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[sub + 1..]);
    Ok(out)
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let mut cmd = command();
    let argv = match with_config(&cmd, argv) {
        Ok(a) => a,
        Err(f) => {
            eprintln!("error[{}]: {f}", f.kind());
            return f.exit_code();
        }
    };
    let matches = match cmd.try_get_matches_from_mut(argv) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return EXIT_USAGE;
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let sub_cmd = cmd.find_subcommand(name).expect("matched subcommand exists");
    let run = RunConfig::from_matches(name, cli.seed, sub_cmd, sub);
    let result = match cli.threads {
        Some(0) => Err(Failure::Usage("'--threads' must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| commands::dispatch(&cli.command, &run)),
            Err(e) => Err(Failure::Usage(format!("'--threads {n}': {e}"))),
        },
        None => commands::dispatch(&cli.command, &run),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error[{}]: {f}", f.kind());
            f.exit_code()
        }
    }
}
