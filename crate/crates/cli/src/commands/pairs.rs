use std::path::PathBuf;

use crowdcast_core::relaunch::{
    candidate_pairs, ecdf, lambda_grid, lambda_sweep, pair_report, property_index, score_pairs, similar_pairs, Group,
    PairStudyReport, PROPERTIES,
};

use super::usage;
use crate::args::PairsArgs;
use crate::provenance::{num, CsvOut, RunConfig};
use crate::CliResult;

fn grid(v: &str) -> CliResult<(f64, f64, f64)> {
    let parts: Vec<&str> = v.split(':').collect();
    let bad = || usage(format!("invalid value {v:?} for '--sweep': expected start:end:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let f = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    Ok((f(parts[0])?, f(parts[1])?, f(parts[2])?))
}

pub fn pairs(a: &PairsArgs, run: &RunConfig) -> CliResult<()> {
    if !(0.0..=1.0).contains(&a.lambda) {
        return Err(usage(format!("'--lambda' must lie in [0, 1], got {}", a.lambda)));
    }
    let lambdas = match &a.sweep {
        Some(g) => {
            let (s, e, st) = grid(g)?;
            Some(lambda_grid(s, e, st).map_err(|e| usage(format!("'--sweep': {e}")))?)
        }
        None => None,
    };
    let cdf: Option<Vec<(usize, PathBuf)>> = match &a.cdf {
        None => None,
        Some(paths) => {
            let paths: Vec<&str> = paths.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            let props: Vec<&str> = a.cdf_properties.split(',').map(str::trim).collect();
            if paths.len() > props.len() {
                return Err(usage(format!(
                    "'--cdf' names {} files but '--cdf-properties' only {} properties",
                    paths.len(),
                    props.len()
                )));
            }
            let mut v = Vec::new();
            for (path, prop) in paths.iter().zip(&props) {
                let k = property_index(prop).ok_or_else(|| {
                    usage(format!(
                        "unknown property {prop:?} in '--cdf-properties' (known: {})",
                        PROPERTIES.join(", ")
                    ))
                })?;
                v.push((k, PathBuf::from(path)));
            }
            Some(v)
        }
    };

    let (corpus, _) = super::load_corpus(&a.corpus)?.filter_eligible();
    let pairs = candidate_pairs(&corpus);
    let scored = score_pairs(&corpus, &pairs)?;
    let kept = similar_pairs(&scored, a.lambda);
    eprintln!("{} candidate pairs, {} with similarity >= {}", scored.len(), kept.len(), a.lambda);

    if let Some(path) = &a.out {
        let mut header = vec![
            "creator_id".to_string(),
            "former_id".into(),
            "latter_id".into(),
            "group".into(),
            "similarity".into(),
        ];
        header.extend(PROPERTIES.iter().map(|p| format!("rate_{p}")));
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut w = CsvOut::create(path, run, &header)?;
        for s in &scored {
            let mut rec = vec![
                s.pair.creator_id.clone(),
                s.pair.former_id.clone(),
                s.pair.latter_id.clone(),
                s.pair.group.to_string(),
                num(s.similarity),
            ];
            rec.extend(s.change.rates.iter().map(|&r| num(r)));
            w.row(&rec)?;
        }
        w.finish()?;
    }

    if let Some(lambdas) = lambdas {
        let mut w = CsvOut::to(a.sweep_out.as_deref(), run, &["lambda", "group_i", "group_ii", "total"])?;
        for p in lambda_sweep(&scored, &lambdas) {
            w.row([num(p.lambda), p.group_i.to_string(), p.group_ii.to_string(), p.total().to_string()])?;
        }
        w.finish()?;
    }

    if let Some(path) = &a.report {
        let r = pair_report(&kept)?;
        let mut w = CsvOut::create(
            path,
            run,
            &[
                "property",
                "n_i",
                "n_ii",
                "mean_i",
                "mean_ii",
                "t",
                "df",
                "p",
                "tier",
                "zero_former_i",
                "zero_former_ii",
            ],
        )?;
        for row in &r.rows {
            let (t, df, p) = match row.test {
                Some(w) => (num(w.t), num(w.df), num(w.p)),
                None => Default::default(),
            };
            w.row([
                row.property.to_string(),
                r.n_i.to_string(),
                r.n_ii.to_string(),
                num(row.mean_i),
                num(row.mean_ii),
                t,
                df,
                p,
                row.tier.marker().to_string(),
                row.zero_former_i.to_string(),
                row.zero_former_ii.to_string(),
            ])?;
        }
        w.finish()?;
    }

    for (k, path) in cdf.unwrap_or_default() {
        let mut w = CsvOut::create(&path, run, &["group", "value", "cdf"])?;
        for g in [Group::FailedToSuccessful, Group::FailedToFailed] {
            for (v, f) in ecdf(&PairStudyReport::rates(&kept, k, g)) {
                w.row([g.to_string(), num(v), num(f)])?;
            }
        }
        w.finish()?;
    }
    Ok(())
}
