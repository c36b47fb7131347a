//! Markdown summary plus plot-ready CSVs built from earlier run outputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crowdcast_core::error::Error;

use super::usage;
use crate::args::ReportArgs;
use crate::provenance::{write_markdown, CsvOut, RunConfig};
use crate::CliResult;

struct Table {
    path: PathBuf,
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn read(path: &Path) -> CliResult<Table> {
        let bad = |e: csv::Error| Error::Validation(format!("{}: {e}", path.display()));
        let mut r = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(bad)?;
        let headers = r.headers().map_err(bad)?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec.map_err(bad)?.iter().map(String::from).collect());
        }
        Ok(Table {
            path: path.to_path_buf(),
            headers,
            rows,
        })
    }

    fn col(&self, name: &str) -> CliResult<usize> {
        self.headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::Validation(format!("{}: missing column {name:?}", self.path.display())).into()
        })
    }

    fn cols(&self, names: &[&str]) -> CliResult<Vec<usize>> {
        names.iter().map(|n| self.col(n)).collect()
    }
}

/// Four decimals for fractional numbers (scientific when tiny), verbatim
/// otherwise.
fn cell(v: &str) -> String {
    match v.parse::<f64>() {
        Ok(x) if x != 0.0 && x.abs() < 1e-3 => format!("{x:.3e}"),
        Ok(x) if v.contains('.') || v.contains('e') => format!("{x:.4}"),
        _ => v.to_string(),
    }
}

fn md_table(out: &mut String, t: &Table, names: &[&str]) -> CliResult<()> {
    let idx = t.cols(names)?;
    let _ = writeln!(out, "| {} |", names.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(names.len()));
    for row in &t.rows {
        let cells: Vec<String> = idx.iter().map(|&i| cell(&row[i])).collect();
        let _ = writeln!(out, "| {} |", cells.join(" | "));
    }
    out.push('\n');
    Ok(())
}

fn plot(dir: &Path, name: &str, run: &RunConfig, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = CsvOut::create(&dir.join(name), run, header)?;
    for r in rows {
        w.row(r)?;
    }
    w.finish()?;
    Ok(())
}

fn project(t: &Table, names: &[&str]) -> CliResult<Vec<Vec<String>>> {
    let idx = t.cols(names)?;
    Ok(t.rows.iter().map(|r| idx.iter().map(|&i| r[i].clone()).collect()).collect())
}

pub fn report(a: &ReportArgs, run: &RunConfig) -> CliResult<()> {
    let inputs: Vec<(&str, &Option<PathBuf>)> = vec![
        ("eval", &a.eval),
        ("curve", &a.curve),
        ("pairs-report", &a.pairs_report),
        ("lambda-sweep", &a.lambda_sweep),
        ("bic", &a.bic),
        ("profile", &a.profile),
        ("promo", &a.promo),
        ("summary", &a.summary),
    ];
    let given: Vec<(&str, &PathBuf)> = inputs.iter().filter_map(|(n, p)| p.as_ref().map(|p| (*n, p))).collect();
    if given.is_empty() {
        return Err(usage("report needs at least one input (--eval, --curve, --pairs-report, --lambda-sweep, --bic, --profile, --promo, --summary)"));
    }
    let missing: Vec<String> = given
        .iter()
        .filter(|(_, p)| !p.is_file())
        .map(|(n, p)| format!("--{n} {}", p.display()))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Validation(format!("missing inputs: {}", missing.join(", "))).into());
    }
    let tables: BTreeMap<&str, Table> = given
        .iter()
        .map(|(n, p)| Ok((*n, Table::read(p)?)))
        .collect::<CliResult<_>>()?;
    let dir = &a.out_dir;
    let mut md = String::from("# crowdcast report\n\n");

    if let Some(t) = tables.get("eval") {
        md.push_str("## Classifier evaluation\n\n");
        md_table(&mut md, t, &["scope", "algorithm", "task", "accuracy", "auc", "majority_baseline"])?;
    }
    if let Some(t) = tables.get("curve") {
        md.push_str("## Accuracy by temporal state\n\n");
        md_table(&mut md, t, &["state", "accuracy", "auc", "majority_baseline"])?;
        plot(dir, "state_curve.csv", run, &["state", "accuracy", "auc"], &project(t, &["state", "accuracy", "auc"])?)?;
    }
    if let Some(t) = tables.get("pairs-report") {
        md.push_str("## Relaunch property change rates\n\n");
        md_table(&mut md, t, &["property", "mean_i", "mean_ii", "t", "p", "tier"])?;
        if let Some(r) = t.rows.first() {
            let (ni, nii) = (r[t.col("n_i")?].clone(), r[t.col("n_ii")?].clone());
            let _ = writeln!(md, "Pairs: {ni} failed-then-successful, {nii} failed-then-failed.\n");
        }
        md.push_str("One-tailed Welch t-test per property; no multiple-comparison correction is applied.\n\n");
    }
    if let Some(t) = tables.get("lambda-sweep") {
        md.push_str("## Pairs by similarity threshold\n\n");
        md_table(&mut md, t, &["lambda", "group_i", "group_ii", "total"])?;
        let header = ["lambda", "group_i", "group_ii"];
        plot(dir, "lambda_sweep.csv", run, &header, &project(t, &header)?)?;
    }
    if let Some(t) = tables.get("bic") {
        md.push_str("## BIC by number of clusters\n\n");
        md_table(&mut md, t, &["k", "log_likelihood", "bic", "selected"])?;
        plot(dir, "bic_curve.csv", run, &["k", "bic"], &project(t, &["k", "bic"])?)?;
    }
    if let Some(t) = tables.get("profile") {
        md.push_str("## Cluster profiles\n\n");
        md_table(
            &mut md,
            t,
            &["cluster", "count", "mean_goal", "mean_pledged", "mean_percent_to_goal", "mean_updates", "mean_comments"],
        )?;
        let buckets: Vec<(usize, usize)> = t
            .headers
            .iter()
            .enumerate()
            .filter_map(|(i, h)| h.strip_prefix('b').and_then(|n| n.parse().ok()).map(|n| (i, n)))
            .collect();
        if buckets.is_empty() {
            return Err(Error::Validation(format!("{}: no bucket columns", t.path.display())).into());
        }
        let c = t.col("cluster")?;
        let mut rows = Vec::new();
        for r in &t.rows {
            for &(i, b) in &buckets {
                rows.push(vec![r[c].clone(), b.to_string(), r[i].clone()]);
            }
        }
        plot(dir, "cluster_curves.csv", run, &["cluster", "bucket", "relative_pledged"], &rows)?;
    }
    if let Some(t) = tables.get("promo") {
        md.push_str("## Promotion tweets per bucket\n\n");
        let [c, b, v] = [t.col("cluster")?, t.col("bucket")?, t.col("mean_tweets")?];
        let mut wide: BTreeMap<usize, BTreeMap<usize, String>> = BTreeMap::new();
        for r in &t.rows {
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::Validation(format!("{}: bad integer {s:?}", t.path.display())))
            };
            wide.entry(parse(&r[b])?).or_default().insert(parse(&r[c])?, r[v].clone());
        }
        let clusters: Vec<usize> = wide.values().flat_map(|m| m.keys().copied()).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        let mut header = vec!["bucket".to_string()];
        header.extend(clusters.iter().map(|c| format!("cluster_{c}")));
        let rows: Vec<Vec<String>> = wide
            .iter()
            .map(|(bk, m)| {
                let mut row = vec![bk.to_string()];
                row.extend(clusters.iter().map(|c| m.get(c).cloned().unwrap_or_default()));
                row
            })
            .collect();
        let header_ref: Vec<&str> = header.iter().map(String::as_str).collect();
        let _ = writeln!(md, "| {} |", header_ref.join(" | "));
        let _ = writeln!(md, "|{}", "---|".repeat(header.len()));
        for r in &rows {
            let cells: Vec<String> = r.iter().map(|s| cell(s)).collect();
            let _ = writeln!(md, "| {} |", cells.join(" | "));
        }
        md.push('\n');
        plot(dir, "promo_curves.csv", run, &header_ref, &rows)?;
    }
    if let Some(t) = tables.get("summary") {
        md.push_str("## Success rate by group\n\n");
        md_table(&mut md, t, &["group", "count", "success_rate"])?;
        let header = ["group", "count", "success_rate"];
        plot(dir, "summary.csv", run, &header, &project(t, &header)?)?;
    }
    write_markdown(&dir.join("report.md"), run, &md)?;
    eprintln!("wrote {}", dir.join("report.md").display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::cell;

    #[test]
    fn cells_round_floats_only() {
        assert_eq!(cell("0.123456"), "0.1235");
        assert_eq!(cell("12"), "12");
        assert_eq!(cell("***"), "***");
        assert_eq!(cell("1e-20"), "1.000e-20");
    }
}
