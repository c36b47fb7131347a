use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use super::records::{CreatorRecord, ProjectRecord, PromotionTweet, SocialProfile, TemporalSeries};
use super::{Corpus, CorpusParts, LoadReport};
use crate::error::{Error, Result};

/// Input file set. Only projects and creators are mandatory.
#[derive(Debug, Clone, Default)]
pub struct CorpusPaths {
    pub projects: PathBuf,
    pub creators: PathBuf,
    pub temporal: Option<PathBuf>,
    pub social: Option<PathBuf>,
    pub promo: Option<PathBuf>,
}

impl CorpusPaths {
    /// The conventional file names inside one directory; optional files are
    /// included only when present.
    pub fn in_dir(dir: &Path) -> CorpusPaths {
        let opt = |name: &str| {
            let p = dir.join(name);
            p.exists().then_some(p)
        };
        CorpusPaths {
            projects: dir.join("projects.jsonl"),
            creators: dir.join("creators.jsonl"),
            temporal: opt("temporal.jsonl"),
            social: opt("social.jsonl"),
            promo: opt("promo_tweets.jsonl"),
        }
    }
}

fn read_jsonl<T: DeserializeOwned>(
    path: &Path,
    fields: &[&str],
    report: &mut LoadReport,
) -> Result<Vec<T>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let name = path.display().to_string();
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |message: String| Error::Malformed {
            file: name.clone(),
            line: i + 1,
            message,
        };
        let value: Value = serde_json::from_str(&line).map_err(|e| malformed(e.to_string()))?;
        let Value::Object(map) = &value else {
            return Err(malformed("expected a JSON object".into()));
        };
        for key in map.keys() {
            if !fields.contains(&key.as_str()) {
                log::warn!("{name}:{}: ignoring unknown field {key:?}", i + 1);
                *report
                    .unknown_fields
                    .entry(format!("{name}:{key}"))
                    .or_default() += 1;
            }
        }
        let record = serde_json::from_value(value).map_err(|e| malformed(e.to_string()))?;
        out.push(record);
    }
    Ok(out)
}

/// Reads, validates and indexes a corpus from JSON Lines files.
pub fn load_corpus(paths: &CorpusPaths, strict: bool) -> Result<(Corpus, LoadReport)> {
    let mut report = LoadReport::default();
    let mut parts = CorpusParts {
        projects: read_jsonl(&paths.projects, ProjectRecord::FIELDS, &mut report)?,
        creators: read_jsonl(&paths.creators, CreatorRecord::FIELDS, &mut report)?,
        ..Default::default()
    };
    if let Some(p) = &paths.temporal {
        parts.temporal = read_jsonl(p, TemporalSeries::FIELDS, &mut report)?;
    }
    if let Some(p) = &paths.social {
        parts.social = read_jsonl(p, SocialProfile::FIELDS, &mut report)?;
    }
    if let Some(p) = &paths.promo {
        parts.promo_tweets = read_jsonl(p, PromotionTweet::FIELDS, &mut report)?;
    }
    let (corpus, built) = Corpus::from_parts(parts, strict)?;
    let unknown = std::mem::take(&mut report.unknown_fields);
    report = built;
    report.unknown_fields = unknown;
    Ok((corpus, report))
}

fn write_lines<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| Error::Format(e.to_string()))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes the five JSON Lines files into `dir` and returns their paths.
/// Empty optional collections are still written as empty files.
pub fn write_jsonl(parts: &CorpusParts, dir: &Path) -> Result<CorpusPaths> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let paths = CorpusPaths {
        projects: dir.join("projects.jsonl"),
        creators: dir.join("creators.jsonl"),
        temporal: Some(dir.join("temporal.jsonl")),
        social: Some(dir.join("social.jsonl")),
        promo: Some(dir.join("promo_tweets.jsonl")),
    };
    write_lines(&paths.projects, &parts.projects)?;
    write_lines(&paths.creators, &parts.creators)?;
    write_lines(paths.temporal.as_ref().unwrap(), &parts.temporal)?;
    write_lines(paths.social.as_ref().unwrap(), &parts.social)?;
    write_lines(paths.promo.as_ref().unwrap(), &parts.promo_tweets)?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::small_parts;
    use super::*;

    #[test]
    fn jsonl_round_trip_is_stable() {
        let dir = tempfile::tempdir().unwrap();
        let paths = write_jsonl(&small_parts(), dir.path()).unwrap();
        let (c1, _) = load_corpus(&paths, true).unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        let paths2 = write_jsonl(c1.parts(), dir2.path()).unwrap();
        let (c2, _) = load_corpus(&paths2, true).unwrap();
        assert_eq!(c1, c2);
        assert_eq!(
            fs::read(&paths.projects).unwrap(),
            fs::read(&paths2.projects).unwrap()
        );
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let paths = write_jsonl(&small_parts(), dir.path()).unwrap();
        let mut text = fs::read_to_string(&paths.projects).unwrap();
        text.push_str("{\"project_id\": 5}\n");
        fs::write(&paths.projects, text).unwrap();
        match load_corpus(&paths, false) {
            Err(Error::Malformed { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        let paths = CorpusPaths {
            projects: "/nonexistent/projects.jsonl".into(),
            creators: "/nonexistent/creators.jsonl".into(),
            ..Default::default()
        };
        assert!(matches!(load_corpus(&paths, true), Err(Error::Io { .. })));
    }

    #[test]
    fn unknown_fields_are_counted_not_fatal() {
        let dir = tempfile::tempdir().unwrap();
        let paths = write_jsonl(&small_parts(), dir.path()).unwrap();
        let text = fs::read_to_string(&paths.creators).unwrap();
        let patched = text.replacen("{\"creator_id\"", "{\"shoe_size\":9,\"creator_id\"", 1);
        fs::write(&paths.creators, patched).unwrap();
        let (c, report) = load_corpus(&paths, true).unwrap();
        assert_eq!(c.creators().len(), 2);
        assert_eq!(report.unknown_fields.values().sum::<usize>(), 1);
    }
}
