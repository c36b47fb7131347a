use std::fs;

use crowdcast_core::corpus::{
    load_corpus, summarize as summarize_corpus, temporal_percentage_profile, write_jsonl, CorpusPaths, GroupKey,
};
use crowdcast_core::error::Error;
use crowdcast_core::features::{assemble_dataset, AssembleOptions, DatasetConfig};
use crowdcast_core::synth::{generate, SynthParams};
use crowdcast_core::textstats::lexicon::{ABBREVIATIONS, STOP_WORDS};

use super::{load_corpus as load_snapshot, parse, usage};
use crate::args::{DumpArgs, FeaturizeArgs, IngestArgs, SummarizeArgs, SynthArgs};
use crate::provenance::{num, CsvOut, RunConfig};
use crate::CliResult;

pub fn ingest(a: &IngestArgs, run: &RunConfig) -> CliResult<()> {
    let mut paths = a.dir.as_deref().map(CorpusPaths::in_dir).unwrap_or_default();
    if let Some(p) = &a.projects {
        paths.projects = p.clone();
    }
    if let Some(p) = &a.creators {
        paths.creators = p.clone();
    }
    for (slot, flag) in [(&mut paths.temporal, &a.temporal), (&mut paths.social, &a.social), (&mut paths.promo, &a.promo)] {
        if flag.is_some() {
            slot.clone_from(flag);
        }
    }
    let (corpus, report) = load_corpus(&paths, a.strict)?;
    corpus.save_snapshot(&a.out, &run.header())?;
    eprintln!(
        "ingested {} projects, {} creators, {} temporal series; dropped {} projects, {} creators; {} violations",
        corpus.projects().len(),
        corpus.creators().len(),
        corpus.parts().temporal.len(),
        report.dropped_projects,
        report.dropped_creators,
        report.violations.len()
    );
    for v in report.violations.iter().take(10) {
        log::warn!("{v}");
    }
    Ok(())
}

pub fn featurize(a: &FeaturizeArgs, run: &RunConfig) -> CliResult<()> {
    let config: DatasetConfig = parse("config", &a.config)?;
    if a.state.is_some() && !config.needs_temporal() {
        return Err(usage("'--state' only applies to '--config full'"));
    }
    let corpus = load_snapshot(&a.corpus)?;
    let opts = AssembleOptions {
        n_states: a.n_states,
        strict: a.strict,
    };
    let (d, rep) = assemble_dataset(&corpus, config, a.state, opts)?;
    d.save(&a.out, &run.header())?;
    eprintln!(
        "{} rows x {} features ({} ineligible, {} without social, {} without temporal data dropped)",
        rep.rows,
        d.schema.len(),
        rep.dropped_ineligible,
        rep.dropped_no_social,
        rep.dropped_no_temporal
    );
    if let Some(path) = &a.csv {
        let mut header = vec!["project_id"];
        header.extend(d.schema.names());
        header.extend(["successful", "range_label_2", "range_label_3", "pledged_usd"]);
        let mut w = CsvOut::create(path, run, &header)?;
        for r in &d.rows {
            let mut rec = vec![r.project_id.clone()];
            rec.extend(r.values.iter().map(|&v| num(v)));
            rec.push(u8::from(r.successful).to_string());
            rec.push(r.range_label_2.to_string());
            rec.push(r.range_label_3.to_string());
            rec.push(num(r.pledged_usd));
            w.row(&rec)?;
        }
        w.finish()?;
    }
    Ok(())
}

pub fn summarize(a: &SummarizeArgs, run: &RunConfig) -> CliResult<()> {
    let key: GroupKey = parse("by", &a.by)?;
    let corpus = load_snapshot(&a.corpus)?;
    let table = summarize_corpus(&corpus, key);
    let mut w = CsvOut::to(a.out.as_deref(), run, &["group", "count", "successes", "failures", "success_rate"])?;
    for r in &table.rows {
        w.row([
            r.group.clone(),
            r.count.to_string(),
            r.successes.to_string(),
            r.failures.to_string(),
            num(r.success_rate),
        ])?;
    }
    w.finish()?;
    if let Some(rho) = table.count_rate_correlation() {
        eprintln!("pearson(count, success_rate) = {rho:.4}");
    }
    if let Some(path) = &a.percent_profile {
        let prof = temporal_percentage_profile(&corpus, a.n_states)?;
        let mut w = CsvOut::create(path, run, &["state", "money_percent", "backers_percent"])?;
        for s in 0..prof.n_states {
            w.row([(s + 1).to_string(), num(prof.money_percent[s]), num(prof.backers_percent[s])])?;
        }
        w.finish()?;
    }
    Ok(())
}

pub fn dump_lexicons(a: &DumpArgs, run: &RunConfig) -> CliResult<()> {
    let mut w = CsvOut::to(a.out.as_deref(), run, &["list", "word"])?;
    for word in STOP_WORDS {
        w.row(["stop_word", word])?;
    }
    for word in ABBREVIATIONS {
        w.row(["abbreviation", word])?;
    }
    w.finish()?;
    Ok(())
}

pub fn synth(a: &SynthArgs, run: &RunConfig) -> CliResult<()> {
    for (flag, v) in [
        ("success-rate", a.success_rate),
        ("ineligible-rate", a.ineligible_rate),
        ("temporal-rate", a.temporal_rate),
        ("social-rate", a.social_rate),
    ] {
        if !(0.0..=1.0).contains(&v) {
            return Err(usage(format!("'--{flag}' must lie in [0, 1], got {v}")));
        }
    }
    let params = SynthParams {
        n_projects: a.n_projects,
        success_rate: a.success_rate,
        ineligible_rate: a.ineligible_rate,
        label_copy: a.label_copy,
        temporal_rate: a.temporal_rate,
        social_rate: a.social_rate,
        promo: !a.no_promo,
        identical_pairs: a.identical_pairs,
        dissimilar_pairs: a.dissimilar_pairs,
        success_scale_usd: a.success_scale,
    };
    let s = generate(&params, run.seed)?;
    write_jsonl(&s.parts, &a.out_dir)?;
    let doc = serde_json::json!({
        "provenance": run.header().lines().map(|l| l.trim_start_matches("# ")).collect::<Vec<_>>(),
        "truth": s.truth,
    });
    let path = a.out_dir.join("truth.json");
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::invalid(e.to_string()))?;
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    eprintln!(
        "wrote {} projects ({} successful, {} failed, {} ineligible) to {}",
        s.parts.projects.len(),
        s.truth.n_successful,
        s.truth.n_failed,
        s.truth.n_ineligible,
        a.out_dir.display()
    );
    Ok(())
}
