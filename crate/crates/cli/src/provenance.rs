//! Run configuration and the comment block that heads every output.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use clap::{ArgMatches, Command};
use crowdcast_core::error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Flags that never influence results and so stay out of provenance.
const EXCLUDED: &[&str] = &["threads"];

/// Resolved flags of one invocation, defaults included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: String,
    pub seed: u64,
    pub flags: BTreeMap<String, String>,
}

impl RunConfig {
    /// `sub` is the subcommand definition; only its arguments are recorded
    /// (argument groups also show up among the match ids).
    pub fn from_matches(command: &str, seed: u64, sub: &Command, m: &ArgMatches) -> RunConfig {
        let mut flags = BTreeMap::new();
        for arg in sub.get_arguments() {
            let key = arg.get_id().as_str();
            if EXCLUDED.contains(&key) || key == "seed" {
                continue;
            }
            let Ok(Some(raw)) = m.try_get_raw(key) else {
                continue;
            };
            let vals: Vec<String> = raw.map(|v| v.to_string_lossy().into_owned()).collect();
            flags.insert(key.replace('_', "-"), vals.join(","));
        }
        RunConfig {
            command: command.to_string(),
            seed,
            flags,
        }
    }

    /// `# key=value` lines. Stripping the `# ` prefixes yields a file that
    /// `--config` accepts and that reproduces the run.
    pub fn header(&self) -> String {
        let mut s = format!("# crowdcast-version={VERSION}\n# command={}\n# seed={}\n", self.command, self.seed);
        for (k, v) in &self.flags {
            s.push_str(&format!("# {k}={v}\n"));
        }
        s
    }
}

/// Formats a float for output; non-finite values and `None` become empty.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        String::new()
    }
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// A provenance-headed CSV file, or stdout.
pub struct CsvOut {
    inner: csv::Writer<Box<dyn Write>>,
    path: String,
}

impl CsvOut {
    pub fn create(path: &Path, run: &RunConfig, header: &[&str]) -> Result<CsvOut> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        Self::start(Box::new(BufWriter::new(file)), path.display().to_string(), run, header)
    }

    /// Writes to `path`, or to stdout when it is `None`.
    pub fn to(path: Option<&Path>, run: &RunConfig, header: &[&str]) -> Result<CsvOut> {
        match path {
            Some(p) => Self::create(p, run, header),
            None => Self::start(Box::new(std::io::stdout().lock()), "<stdout>".into(), run, header),
        }
    }

    fn start(mut w: Box<dyn Write>, path: String, run: &RunConfig, header: &[&str]) -> Result<CsvOut> {
        w.write_all(run.header().as_bytes()).map_err(|e| Error::io(path.clone(), e))?;
        let mut out = CsvOut {
            inner: csv::Writer::from_writer(w),
            path,
        };
        out.row(header.iter().copied())?;
        Ok(out)
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.inner
            .write_record(fields)
            .map_err(|e| Error::invalid(format!("{}: {e}", self.path)))
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner
            .flush()
            .map_err(|e| Error::io(self.path.clone(), e))
    }
}

/// Writes a markdown file whose provenance block sits in an HTML comment.
pub fn write_markdown(path: &Path, run: &RunConfig, body: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let s = format!("<!--\n{}-->\n{body}", run.header());
    fs::write(path, s).map_err(|e| Error::io(path, e))
}
