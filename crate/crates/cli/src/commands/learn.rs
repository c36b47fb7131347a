use crowdcast_core::features::{AssembleOptions, Dataset, Task};
use crowdcast_core::mlcore::{
    cross_validate, select_features, state_sweep, train as fit_model, Algorithm, BoostParams, EvalReport, ForestParams,
    MaxFeatures, SweepOptions, TrainParams, TreeParams,
};

use super::{parse, usage};
use crate::args::{EvaluateArgs, LearnerArgs, SweepArgs, TrainArgs};
use crate::provenance::{num, opt, CsvOut, RunConfig};
use crate::CliResult;

fn max_features(v: &str) -> CliResult<MaxFeatures> {
    match v {
        "sqrt" => Ok(MaxFeatures::Sqrt),
        "all" => Ok(MaxFeatures::All),
        n => match n.parse::<usize>() {
            Ok(k) if k > 0 => Ok(MaxFeatures::Count(k)),
            _ => Err(usage(format!("invalid value {v:?} for '--max-features': expected sqrt, all or a positive count"))),
        },
    }
}

struct Learner {
    task: Task,
    algo: Algorithm,
    params: TrainParams,
}

fn learner(a: &LearnerArgs) -> CliResult<Learner> {
    for (flag, v) in [("n-trees", a.n_trees), ("n-stages", a.n_stages), ("base-trees", a.base_trees), ("min-leaf", a.min_leaf)] {
        if v == 0 {
            return Err(usage(format!("'--{flag}' must be at least 1")));
        }
    }
    if !(a.var_floor > 0.0) {
        return Err(usage("'--var-floor' must be positive"));
    }
    let tree = TreeParams {
        max_features: max_features(&a.max_features)?,
        max_depth: a.max_depth,
        min_leaf: a.min_leaf,
    };
    let forest = ForestParams {
        n_trees: a.n_trees,
        bootstrap: true,
        tree,
    };
    Ok(Learner {
        task: parse("task", &a.task)?,
        algo: parse("algo", &a.algo)?,
        params: TrainParams {
            var_floor: a.var_floor,
            forest,
            boost: BoostParams {
                n_stages: a.n_stages,
                base: ForestParams {
                    n_trees: a.base_trees,
                    ..forest
                },
            },
        },
    })
}

/// Applies `--select-alpha`, writing the ranking to `--chi2` when asked.
fn maybe_select(d: Dataset, a: &LearnerArgs, task: Task, run: &RunConfig) -> CliResult<Dataset> {
    let Some(alpha) = a.select_alpha else {
        if a.chi2.is_some() {
            return Err(usage("'--chi2' needs '--select-alpha'"));
        }
        return Ok(d);
    };
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(usage("'--select-alpha' must lie in (0, 1]"));
    }
    if a.chi2_bins < 2 {
        return Err(usage("'--chi2-bins' must be at least 2"));
    }
    let (kept, ranked) = select_features(&d, task, alpha, a.chi2_bins)?;
    if let Some(path) = &a.chi2 {
        let mut w = CsvOut::create(path, run, &["rank", "index", "feature", "chi2", "p", "dof", "kept"])?;
        for (i, r) in ranked.iter().enumerate() {
            w.row([
                (i + 1).to_string(),
                r.index.to_string(),
                r.name.clone(),
                num(r.chi2),
                num(r.p),
                r.dof.to_string(),
                r.kept.to_string(),
            ])?;
        }
        w.finish()?;
    }
    eprintln!("chi-squared selection kept {} of {} features", kept.schema.len(), d.schema.len());
    Ok(kept)
}

pub fn train(a: &TrainArgs, run: &RunConfig) -> CliResult<()> {
    let l = learner(&a.learner)?;
    let (d, _) = Dataset::load(&a.data)?;
    let d = maybe_select(d, &a.learner, l.task, run)?;
    let m = fit_model(&d, l.task, l.algo, &l.params, run.seed)?;
    m.save(&a.out, &run.header())?;
    eprintln!("trained {} on {} rows for task {}", l.algo, d.len(), l.task);
    Ok(())
}

const EVAL_HEADER: &[&str] = &[
    "scope",
    "algorithm",
    "task",
    "folds",
    "n_rows",
    "accuracy",
    "auc",
    "majority_baseline",
];

fn eval_rows(r: &EvalReport) -> Vec<Vec<String>> {
    let head = |scope: String, n: usize, acc: f64, auc: Option<f64>| {
        vec![
            scope,
            r.algorithm.to_string(),
            r.task.to_string(),
            r.folds.to_string(),
            n.to_string(),
            num(acc),
            opt(auc),
            num(r.majority_baseline),
        ]
    };
    let fold_aucs: Vec<f64> = r.fold_auc.iter().flatten().copied().collect();
    let mean_auc = (!fold_aucs.is_empty()).then(|| fold_aucs.iter().sum::<f64>() / fold_aucs.len() as f64);
    let mut rows = vec![
        head("pooled".into(), r.n_rows, r.accuracy, Some(r.auc)),
        head("mean".into(), r.n_rows, r.mean_fold_accuracy(), mean_auc),
    ];
    // fold sizes are not kept in the report; leave n_rows blank per fold
    for (i, (&acc, auc)) in r.fold_accuracy.iter().zip(&r.fold_auc).enumerate() {
        let mut row = head(format!("fold-{}", i + 1), 0, acc, *auc);
        row[4] = String::new();
        rows.push(row);
    }
    rows
}

pub fn evaluate(a: &EvaluateArgs, run: &RunConfig) -> CliResult<()> {
    let l = learner(&a.learner)?;
    if a.folds < 2 {
        return Err(usage("'--folds' must be at least 2"));
    }
    let (d, _) = Dataset::load(&a.data)?;
    let d = maybe_select(d, &a.learner, l.task, run)?;
    let r = cross_validate(&d, l.task, l.algo, &l.params, a.folds, run.seed)?;
    let mut w = CsvOut::create(&a.report, run, EVAL_HEADER)?;
    for row in eval_rows(&r) {
        w.row(&row)?;
    }
    w.finish()?;
    if let Some(path) = &a.confusion {
        let mut header = vec!["true_class".to_string()];
        header.extend((0..r.n_classes).map(|c| format!("pred_{c}")));
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut w = CsvOut::create(path, run, &header)?;
        for (c, row) in r.confusion.iter().enumerate() {
            let mut rec = vec![c.to_string()];
            rec.extend(row.iter().map(u64::to_string));
            w.row(&rec)?;
        }
        w.finish()?;
    }
    eprintln!(
        "{} {}: accuracy {:.4}, AUC {:.4}, baseline {:.4}",
        r.algorithm, r.task, r.accuracy, r.auc, r.majority_baseline
    );
    Ok(())
}

/// `a..b` (inclusive), `a..b:step`, or `s1,s2,...`.
pub fn parse_states(v: &str) -> CliResult<Vec<usize>> {
    let bad = || usage(format!("invalid value {v:?} for '--states': expected a..b, a..b:step or a comma list"));
    let states: Vec<usize> = if let Some((range, step)) = v.split_once("..").map(|(a, rest)| {
        let (b, step) = rest.split_once(':').unwrap_or((rest, "1"));
        ((a, b), step)
    }) {
        let (a, b) = range;
        let (a, b, step): (usize, usize, usize) = (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
            step.trim().parse().map_err(|_| bad())?,
        );
        if step == 0 || b < a {
            return Err(bad());
        }
        (a..=b).step_by(step).collect()
    } else {
        v.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect::<CliResult<_>>()?
    };
    if states.is_empty() {
        return Err(bad());
    }
    Ok(states)
}

pub fn sweep(a: &SweepArgs, run: &RunConfig) -> CliResult<()> {
    let l = learner(&a.learner)?;
    if a.learner.select_alpha.is_some() || a.learner.chi2.is_some() {
        return Err(usage("'--select-alpha' is not supported by sweep-states"));
    }
    if a.folds < 2 {
        return Err(usage("'--folds' must be at least 2"));
    }
    let states = parse_states(&a.states)?;
    if let Some(&s) = states.iter().find(|&&s| s > a.n_states) {
        return Err(usage(format!("'--states' includes {s}, beyond '--n-states' {}", a.n_states)));
    }
    let corpus = super::load_corpus(&a.corpus)?;
    let opts = SweepOptions {
        folds: a.folds,
        assemble: AssembleOptions {
            n_states: a.n_states,
            ..AssembleOptions::default()
        },
    };
    let points = state_sweep(&corpus, l.task, l.algo, &l.params, &states, opts, run.seed)?;
    let mut w = CsvOut::create(
        &a.out,
        run,
        &["state", "n_rows", "accuracy", "auc", "mean_fold_accuracy", "majority_baseline"],
    )?;
    for p in &points {
        let r = &p.report;
        w.row([
            p.state.to_string(),
            r.n_rows.to_string(),
            num(r.accuracy),
            num(r.auc),
            num(r.mean_fold_accuracy()),
            num(r.majority_baseline),
        ])?;
    }
    w.finish()?;
    eprintln!("swept {} states", points.len());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_grids() {
        assert_eq!(parse_states("0..100:10").unwrap(), (0..=100).step_by(10).collect::<Vec<_>>());
        assert_eq!(parse_states("3..5").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_states("0, 50,100").unwrap(), vec![0, 50, 100]);
        for bad in ["", "5..3", "0..10:0", "x"] {
            assert!(parse_states(bad).is_err(), "{bad}");
        }
    }
}
