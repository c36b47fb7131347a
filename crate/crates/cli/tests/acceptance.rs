//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Oracles below are written independently of the library.

use std::collections::BTreeSet;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;

use crowdcast_core::clusterlab::{
    bic_value, bucketize, fit_gmm, normalize_buckets, select_k, BicPenalty, BucketMatrix, CovType, GmmOptions,
};
use crowdcast_core::corpus::{Corpus, TemporalSeries};
use crowdcast_core::features::{assemble_dataset, AssembleOptions, DatasetConfig, Family, Task};
use crowdcast_core::mlcore::{
    auc, chi_squared_table, cross_validate_encoded, state_sweep, Algorithm, EncodedDataset, ForestParams, GaussianNb,
    SweepOptions, TrainParams,
};
use crowdcast_core::relaunch::{candidate_pairs, lambda_grid, lambda_sweep, score_pairs, similar_pairs, welch_t_test};
use crowdcast_core::rng::stream;
use crowdcast_core::synth::{generate, planted_mixture, SynthParams};
use crowdcast_core::textstats::smog_grade;
use crowdcast_core::timeline::cumulative;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---- SMOG ---------------------------------------------------------------

fn smog_examples() -> Outcome {
    let closed = |p: f64, s: f64| 1.043 * (p * 30.0 / s).sqrt() + 3.1291;
    ensure(smog_grade(0, 30) == 3.1291, || format!("zero case gave {}", smog_grade(0, 30)))?;
    for (p, s, approx) in [(0usize, 30usize, 3.1291), (30, 30, 8.8419), (7, 30, 5.8885)] {
        let got = smog_grade(p, s);
        ensure((got - closed(p as f64, s as f64)).abs() < 1e-9, || format!("{p}/{s}: {got}"))?;
        // the quoted approximations are loose in the fourth decimal
        ensure((got - approx).abs() < 2e-4, || format!("{p}/{s}: {got} vs ≈{approx}"))?;
    }
    Ok("3 examples".into())
}

fn cumulative_example() -> Outcome {
    let got = cumulative(&[100.0, 200.0, 200.0, 100.0, 200.0]);
    ensure(got == [100.0, 300.0, 500.0, 600.0, 800.0], || format!("{got:?}"))?;
    Ok(format!("{got:?}"))
}

// ---- chi-squared --------------------------------------------------------

/// Expands the table into individual observations and recounts everything.
fn chi2_oracle(table: &[Vec<u32>]) -> (f64, usize) {
    let obs: Vec<(usize, usize)> = table
        .iter()
        .enumerate()
        .flat_map(|(i, r)| r.iter().enumerate().flat_map(move |(j, &n)| (0..n).map(move |_| (i, j))))
        .collect();
    let n = obs.len() as f64;
    let (bins, classes) = (table.len(), table[0].len());
    let row_n = |i: usize| obs.iter().filter(|o| o.0 == i).count() as f64;
    let col_n = |j: usize| obs.iter().filter(|o| o.1 == j).count() as f64;
    let rows: Vec<usize> = (0..bins).filter(|&i| row_n(i) > 0.0).collect();
    let cols: Vec<usize> = (0..classes).filter(|&j| col_n(j) > 0.0).collect();
    if rows.len() < 2 || cols.len() < 2 {
        return (0.0, 0);
    }
    let mut stat = 0.0;
    for &i in &rows {
        for &j in &cols {
            let o = obs.iter().filter(|&&x| x == (i, j)).count() as f64;
            let e = row_n(i) * col_n(j) / n;
            stat += (o - e).powi(2) / e;
        }
    }
    (stat, (rows.len() - 1) * (cols.len() - 1))
}

fn chi2_vs_oracle() -> Outcome {
    let mut r = stream(1, "acceptance-chi2", 0);
    let mut worst = 0.0f64;
    for t in 0..100 {
        let (bins, classes) = (r.gen_range(1..=6), r.gen_range(1..=3));
        let table: Vec<Vec<u32>> = (0..bins)
            .map(|_| (0..classes).map(|_| if r.gen_bool(0.15) { 0 } else { r.gen_range(0..25) }).collect())
            .collect();
        let (want, dof) = chi2_oracle(&table);
        let got = chi_squared_table(&table.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect::<Vec<_>>());
        let err = (got.chi2 - want).abs();
        worst = worst.max(err);
        ensure(err < 1e-9 && got.dof == dof, || format!("table {t}: {} vs {want} (dof {} vs {dof})", got.chi2, got.dof))?;
    }
    Ok(format!("100 tables, max |err| {worst:.1e}"))
}

// ---- AUC ----------------------------------------------------------------

fn auc_vs_pairs() -> Outcome {
    let mut r = stream(2, "acceptance-auc", 0);
    for t in 0..200 {
        let n = r.gen_range(2..=50);
        let mut pos: Vec<bool> = (0..n).map(|_| r.gen_bool(0.5)).collect();
        pos[0] = true;
        pos[1] = false;
        // coarse scores force plenty of ties
        let scores: Vec<f64> = (0..n).map(|_| r.gen_range(0..8) as f64 / 4.0).collect();
        let (mut wins, mut pairs) = (0.0, 0.0);
        for i in (0..n).filter(|&i| pos[i]) {
            for j in (0..n).filter(|&j| !pos[j]) {
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
        let want = wins / pairs;
        let got = auc(&scores, &pos).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("instance {t}: {got} vs {want}"))?;
    }
    Ok("200 instances exact".into())
}

// ---- Naive Bayes --------------------------------------------------------

fn nb_posteriors() -> Outcome {
    // class 0: (1,2) (2,4) (3,3); class 1: (5,7) (7,9) (9,8) (7,8)
    let rows = vec![
        vec![1.0, 2.0],
        vec![2.0, 4.0],
        vec![3.0, 3.0],
        vec![5.0, 7.0],
        vec![7.0, 9.0],
        vec![9.0, 8.0],
        vec![7.0, 8.0],
    ];
    let d = EncodedDataset::from_matrix(&rows, vec![0, 0, 0, 1, 1, 1, 1], 2).map_err(|e| e.to_string())?;
    let nb = GaussianNb::fit(&d, &(0..7).collect::<Vec<_>>(), 1e-9).map_err(|e| e.to_string())?;
    // by hand: priors 3/7, 4/7; means (2,3), (7,8); ML variances
    // class 0: (2/3, 2/3); class 1: (2, 1/2)
    let params = [
        (3.0 / 7.0, [2.0, 3.0], [2.0 / 3.0, 2.0 / 3.0]),
        (4.0 / 7.0, [7.0, 8.0], [2.0, 0.5]),
    ];
    let density = |x: f64, m: f64, v: f64| (-(x - m) * (x - m) / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v).sqrt();
    let mut checked = 0;
    for x in [[4.0, 5.0], [6.0, 6.0], [3.0, 7.5], [5.5, 5.5]] {
        let joint: Vec<f64> = params
            .iter()
            .map(|(p, m, v)| p * density(x[0], m[0], v[0]) * density(x[1], m[1], v[1]))
            .collect();
        let z: f64 = joint.iter().sum();
        let got = nb.predict_proba(&x);
        for c in 0..2 {
            ensure((got[c] - joint[c] / z).abs() < 1e-9, || format!("x={x:?} class {c}: {} vs {}", got[c], joint[c] / z))?;
        }
        checked += 1;
    }
    Ok(format!("{checked} points"))
}

// ---- classifier sanity --------------------------------------------------

fn classifier_sanity() -> Outcome {
    let mut r = stream(3, "acceptance-sanity", 0);
    let n = 1000;
    let y: Vec<usize> = (0..n).map(|_| usize::from(r.gen_bool(0.4))).collect();
    let copy: Vec<Vec<f64>> = y
        .iter()
        .map(|&c| {
            let mut row = vec![c as f64];
            row.extend((0..4).map(|_| r.gen::<f64>()));
            row
        })
        .collect();
    let noise: Vec<Vec<f64>> = (0..n).map(|_| (0..5).map(|_| r.gen::<f64>()).collect()).collect();
    let copy = EncodedDataset::from_matrix(&copy, y.clone(), 2).map_err(|e| e.to_string())?;
    let noise = EncodedDataset::from_matrix(&noise, y, 2).map_err(|e| e.to_string())?;
    let params = TrainParams::default();
    let mut detail = Vec::new();
    for algo in [Algorithm::NaiveBayes, Algorithm::RandomForest, Algorithm::AdaBoostM1] {
        let a = cross_validate_encoded(&copy, Task::Success, algo, &params, 5, 42).map_err(|e| e.to_string())?;
        let b = cross_validate_encoded(&noise, Task::Success, algo, &params, 5, 42).map_err(|e| e.to_string())?;
        ensure(a.accuracy >= 0.95, || format!("{algo} label-copy accuracy {:.4}", a.accuracy))?;
        ensure((b.accuracy - b.majority_baseline).abs() <= 0.10, || {
            format!("{algo} noise accuracy {:.4} vs baseline {:.4}", b.accuracy, b.majority_baseline)
        })?;
        detail.push(format!("{algo} {:.3}/{:.3}", a.accuracy, b.accuracy));
    }
    Ok(format!("copy/noise accuracy: {} (baseline {:.3})", detail.join(", "), 1.0 - 0.4))
}

// ---- determinism through the binary ------------------------------------

fn crowdcast(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_crowdcast"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "{} exited {:?}: {}",
            args.first().copied().unwrap_or(""),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr).trim()
        ))
    }
}

fn on_threads(threads: &str, args: &[&str]) -> Result<(), String> {
    crowdcast(&[&["--threads", threads][..], args].concat())
}

fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let f = |n: &str| d.join(n);
    crowdcast(&["synth", "--n-projects", "1500", "--out-dir", s(&f("raw"))])?;
    let outputs = [
        "corpus.bin",
        "data.fv",
        "rf.bin",
        "ada.bin",
        "nb.bin",
        "eval.csv",
        "pairs.csv",
        "relaunch_tests.csv",
        "clusters.csv",
        "bic.csv",
        "profile.csv",
        "promo.csv",
        "rep/report.md",
        "rep/cluster_curves.csv",
    ];
    let mut runs: Vec<Vec<Vec<u8>>> = Vec::new();
    for threads in ["1", "8"] {
        on_threads(threads, &["ingest", "--dir", s(&f("raw")), "--out", s(&f("corpus.bin"))])?;
        on_threads(threads, &["featurize", "--corpus", s(&f("corpus.bin")), "--out", s(&f("data.fv"))])?;
        for (algo, out) in [("rf", "rf.bin"), ("ada", "ada.bin"), ("nb", "nb.bin")] {
            on_threads(threads, &["train", "--data", s(&f("data.fv")), "--algo", algo, "--n-trees", "30", "--out", s(&f(out))])?;
        }
        on_threads(threads, &["evaluate", "--data", s(&f("data.fv")), "--algo", "rf", "--n-trees", "30", "--report", s(&f("eval.csv"))])?;
        on_threads(threads, &["pairs", "--corpus", s(&f("corpus.bin")), "--out", s(&f("pairs.csv")), "--report", s(&f("relaunch_tests.csv"))])?;
        on_threads(threads, &[
            "cluster",
            "--corpus",
            s(&f("corpus.bin")),
            "--k-max",
            "6",
            "--out",
            s(&f("clusters.csv")),
            "--bic",
            s(&f("bic.csv")),
            "--profile",
            s(&f("profile.csv")),
            "--promo",
            s(&f("promo.csv")),
        ])?;
        on_threads(threads, &[
            "report",
            "--eval",
            s(&f("eval.csv")),
            "--bic",
            s(&f("bic.csv")),
            "--profile",
            s(&f("profile.csv")),
            "--out-dir",
            s(&f("rep")),
        ])?;
        runs.push(outputs.iter().map(|o| fs::read(f(o)).unwrap_or_default()).collect());
        for o in outputs {
            let _ = fs::remove_file(f(o));
        }
    }
    for (i, o) in outputs.iter().enumerate() {
        ensure(!runs[0][i].is_empty(), || format!("{o} was not written"))?;
        ensure(runs[0][i] == runs[1][i], || format!("{o} differs between 1 and 8 threads"))?;
    }
    Ok(format!("{} outputs byte-identical", outputs.len()))
}

// ---- mixtures -----------------------------------------------------------

fn em_monotone() -> Outcome {
    let mut iters = 0;
    for seed in 0..100u64 {
        let k_true = 1 + (seed % 4) as usize;
        let data = planted_mixture(200, k_true, 20, 3.0, seed).map_err(|e| e.to_string())?;
        let k = 1 + (seed % 6) as usize;
        let cov = if seed % 4 == 3 { CovType::Full } else { CovType::Diagonal };
        let opts = GmmOptions {
            cov,
            n_init: 1,
            ..Default::default()
        };
        let m = fit_gmm(&data.x, k, &opts, seed).map_err(|e| format!("seed {seed}: {e}"))?;
        for (i, w) in m.trace.windows(2).enumerate() {
            ensure(w[1] >= w[0] - 1e-9, || format!("seed {seed} K={k} iteration {i}: {} -> {}", w[0], w[1]))?;
        }
        iters += m.trace.len();
    }
    Ok(format!("100 fits, {iters} log-likelihood steps"))
}

fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn gmm_recovery(info: &mut Vec<String>) -> Outcome {
    let start = Instant::now();
    let (mut hits, mut literal_hits, mut worst) = (0, 0, 0.0f64);
    let mut literal_k = Vec::new();
    for seed in 0..10u64 {
        let data = planted_mixture(600, 3, 20, 5.0, seed).map_err(|e| e.to_string())?;
        let m = BucketMatrix {
            project_ids: vec![String::new(); data.x.len()],
            rows: data.x.clone(),
            mean: None,
            sd: None,
        };
        let z = normalize_buckets(&m).map_err(|e| e.to_string())?;
        let (mean, sd) = (z.mean.clone().unwrap(), z.sd.clone().unwrap());
        let sel = select_k(&z.rows, 1, 10, &GmmOptions::default(), BicPenalty::ParameterCount, seed)
            .map_err(|e| e.to_string())?;
        // the same fits ranked under the K·ln N penalty
        let lit = sel
            .curve
            .iter()
            .map(|p| (p.k, bic_value(p.log_likelihood, p.k, 600).unwrap()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
            .0;
        literal_k.push(lit);
        literal_hits += usize::from(lit == 3);
        if sel.best_k != 3 {
            continue;
        }
        let truth: Vec<Vec<f64>> = data
            .means
            .iter()
            .map(|t| t.iter().zip(&mean).zip(&sd).map(|((v, mu), s)| (v - mu) / s).collect())
            .collect();
        let est = &sel.best.means;
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let err = perms
            .iter()
            .map(|p| (0..3).map(|c| max_abs(&truth[c], &est[p[c]])).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(err);
        if err < 0.2 {
            hits += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    info.push(format!(
        "GMM recovery under the K·ln N penalty: K=3 in {literal_hits}/10 seeds (selected {literal_k:?})"
    ));
    ensure(hits >= 9, || format!("K=3 with means within 0.2 in {hits}/10 seeds (worst error {worst:.3})"))?;
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!("K=3 in {hits}/10 seeds, max mean error {worst:.3}, {secs:.1}s"))
}

fn bic_arithmetic() -> Outcome {
    let data = planted_mixture(300, 2, 4, 4.0, 5).map_err(|e| e.to_string())?;
    let sel = select_k(&data.x, 1, 4, &GmmOptions::default(), BicPenalty::ComponentCount, 5).map_err(|e| e.to_string())?;
    for p in &sel.curve {
        let want = -2.0 * p.log_likelihood + p.k as f64 * 300f64.ln();
        ensure((p.bic - want).abs() < 1e-9, || format!("K={}: {} vs {want}", p.k, p.bic))?;
    }
    for (ll, k, n, want) in [(-1000.0, 3, 600, 2019.190_788_965_648_4), (0.0, 1, 1, 0.0), (12.5, 2, 100, -15.789_659_628_023_816)] {
        let got = bic_value(ll, k, n).map_err(|e| e.to_string())?;
        ensure((got - want).abs() < 1e-9, || format!("({ll}, {k}, {n}): {got} vs {want}"))?;
    }
    Ok(format!("{} fitted + 3 canned values", sel.curve.len()))
}

fn buckets() -> Outcome {
    let mut r = stream(4, "acceptance-buckets", 0);
    let rows: Vec<Vec<f64>> = (0..50)
        .map(|_| {
            let mut v: Vec<f64> = (0..19).map(|_| r.gen_range(0.0..1000.0)).collect();
            v.push(7.0);
            v
        })
        .collect();
    let m = BucketMatrix {
        project_ids: vec![String::new(); rows.len()],
        rows,
        mean: None,
        sd: None,
    };
    let z = normalize_buckets(&m).map_err(|e| e.to_string())?;
    for j in 0..20 {
        let col: Vec<f64> = z.rows.iter().map(|r| r[j]).collect();
        let mu = col.iter().sum::<f64>() / col.len() as f64;
        let sd = (col.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / col.len() as f64).sqrt();
        if j == 19 {
            ensure(col.iter().all(|&v| v == 0.0), || "constant column not zeroed".into())?;
        } else {
            ensure(mu.abs() < 1e-9 && (sd - 1.0).abs() < 1e-9, || format!("column {j}: mean {mu}, sd {sd}"))?;
        }
    }
    let mut worst = 0.0f64;
    for t in 0..100 {
        let days = r.gen_range(1..=90);
        let daily: Vec<f64> = (0..days).map(|_| if r.gen_bool(0.3) { 0.0 } else { r.gen_range(0.0..5000.0) }).collect();
        let total: f64 = daily.iter().sum();
        let series = TemporalSeries {
            project_id: format!("p{t}"),
            daily_pledged: daily,
            daily_backers: vec![0; days],
        };
        for b in [1, 5, 20] {
            let got: f64 = bucketize(&series, b).map_err(|e| e.to_string())?.iter().sum();
            let rel = (got - total).abs() / total.max(1.0);
            worst = worst.max(rel);
            ensure(rel < 1e-6, || format!("series {t}, B={b}: {got} vs {total}"))?;
        }
    }
    Ok(format!("20 columns normalized; 300 conservation checks, max rel err {worst:.1e}"))
}

// ---- Welch --------------------------------------------------------------

/// Lanczos approximation (g = 7, n = 9).
fn ln_gamma(x: f64) -> f64 {
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let x = x - 1.0;
    let t = x + 7.5;
    let s: f64 = C[0] + (1..9).map(|i| C[i] / (x + i as f64)).sum::<f64>();
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + s.ln()
}

/// Upper tail of Student's t by Simpson integration of the density.
fn t_sf(t: f64, df: f64) -> f64 {
    let c = (ln_gamma((df + 1.0) / 2.0) - ln_gamma(df / 2.0)).exp() / (df * std::f64::consts::PI).sqrt();
    let f = |x: f64| c * (1.0 + x * x / df).powf(-(df + 1.0) / 2.0);
    let n = 20_000;
    let h = t.abs() / n as f64;
    let mut acc = f(0.0) + f(t.abs());
    for i in 1..n {
        acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    0.5 - acc * h / 3.0
}

fn welch_oracle(a: &[f64], b: &[f64]) -> (f64, f64, f64) {
    let mv = |x: &[f64]| {
        let m = x.iter().sum::<f64>() / x.len() as f64;
        (m, x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64)
    };
    let ((ma, va), (mb, vb)) = (mv(a), mv(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let t = (ma - mb) / (va / na + vb / nb).sqrt();
    let df = (va / na + vb / nb).powi(2) / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
    (t, df, t_sf(t, df))
}

fn welch() -> Outcome {
    let cases: [(&[f64], &[f64]); 5] = [
        (&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 3.0, 4.0, 5.0, 6.0]),
        (&[10.1, 9.8, 10.4, 10.0, 9.7, 10.3], &[9.2, 9.9, 9.5, 9.0, 9.6]),
        (&[0.5, 0.7, 0.2, 0.9, 1.4, 0.3, 0.8], &[1.9, 2.5, 0.4, 3.1]),
        (&[2.0, 2.0, 2.0, 2.0], &[1.0, 3.0, 2.5, 4.0, 0.5]),
        (&[1.0, 1.1, 0.9, 1.05, 0.95], &[3.0, 3.2, 2.9, 3.1, 2.8]),
    ];
    let mut worst = 0.0f64;
    for (i, (a, b)) in cases.iter().enumerate() {
        let got = welch_t_test(a, b).map_err(|e| e.to_string())?;
        let (t, df, p) = welch_oracle(a, b);
        worst = worst.max((got.p - p).abs());
        ensure((got.t - t).abs() < 1e-9 && (got.df - df).abs() < 1e-9, || {
            format!("case {i}: t {} vs {t}, df {} vs {df}", got.t, got.df)
        })?;
        ensure((got.p - p).abs() < 1e-6, || format!("case {i}: p {} vs {p}", got.p))?;
    }
    let first = welch_t_test(cases[0].0, cases[0].1).map_err(|e| e.to_string())?;
    ensure(first.t == -1.0 && first.df == 8.0 && (first.p - 0.1733).abs() < 5e-5, || {
        format!("t=-1 case: t {}, df {}, p {}", first.t, first.df, first.p)
    })?;
    Ok(format!("5 cases, max |Δp| {worst:.1e}; t=-1, df=8 gives p={:.4}", first.p))
}

// ---- corpus-level -------------------------------------------------------

fn relaunch() -> Outcome {
    let s = generate(&SynthParams::default(), 42).map_err(|e| e.to_string())?;
    let planted: BTreeSet<(String, String)> = s
        .truth
        .pairs
        .iter()
        .filter(|p| p.identical)
        .map(|p| (p.former_id.clone(), p.latter_id.clone()))
        .collect();
    let (c, _) = Corpus::from_parts(s.parts, false).map_err(|e| e.to_string())?;
    let (c, _) = c.filter_eligible();
    let scored = score_pairs(&c, &candidate_pairs(&c)).map_err(|e| e.to_string())?;
    let kept: BTreeSet<(String, String)> = similar_pairs(&scored, 0.8)
        .iter()
        .map(|p| (p.pair.former_id.clone(), p.pair.latter_id.clone()))
        .collect();
    ensure(planted.len() == 10 && kept == planted, || {
        format!("kept {} pairs, {} planted, {} in common", kept.len(), planted.len(), kept.intersection(&planted).count())
    })?;
    let grid = lambda_grid(0.0, 1.0, 0.05).map_err(|e| e.to_string())?;
    let sweep = lambda_sweep(&scored, &grid);
    for w in sweep.windows(2) {
        ensure(
            w[1].total() <= w[0].total() && w[1].group_i <= w[0].group_i && w[1].group_ii <= w[0].group_ii,
            || format!("count rises from λ={} to λ={}", w[0].lambda, w[1].lambda),
        )?;
    }
    Ok(format!(
        "{} of {} candidates kept at λ=0.8; sweep {} → {}",
        kept.len(),
        scored.len(),
        sweep[0].total(),
        sweep.last().unwrap().total()
    ))
}

fn state_endpoints() -> Outcome {
    let p = SynthParams {
        n_projects: 1000,
        ..Default::default()
    };
    let (c, _) = Corpus::from_parts(generate(&p, 9).map_err(|e| e.to_string())?.parts, false).map_err(|e| e.to_string())?;
    let (d0, _) = assemble_dataset(&c, DatasetConfig::Full, Some(0), AssembleOptions::default()).map_err(|e| e.to_string())?;
    let temporal: Vec<usize> = (0..d0.schema.len()).filter(|&j| d0.schema.get(j).family == Family::Temporal).collect();
    ensure(!temporal.is_empty(), || "no temporal columns".into())?;
    ensure(d0.rows.iter().all(|r| temporal.iter().all(|&j| r.values[j] == 0.0)), || {
        "temporal features nonzero at state 0".into()
    })?;
    let params = TrainParams {
        forest: ForestParams {
            n_trees: 50,
            ..Default::default()
        },
        ..Default::default()
    };
    let pts = state_sweep(&c, Task::Success, Algorithm::RandomForest, &params, &[0, 100], SweepOptions::default(), 42)
        .map_err(|e| e.to_string())?;
    let end = pts[1].report.accuracy;
    ensure(end >= 0.99, || format!("state 100 accuracy {end:.4}"))?;
    Ok(format!(
        "{} temporal columns zero at state 0; accuracy {:.3} at 0, {end:.3} at 100",
        temporal.len(),
        pts[0].report.accuracy
    ))
}

fn smoke() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let f = |n: &str| d.join(n);
    let start = Instant::now();
    crowdcast(&["synth", "--n-projects", "10000", "--out-dir", s(&f("raw"))])?;
    crowdcast(&["ingest", "--dir", s(&f("raw")), "--out", s(&f("corpus.bin"))])?;
    crowdcast(&["featurize", "--corpus", s(&f("corpus.bin")), "--out", s(&f("data.fv"))])?;
    crowdcast(&["evaluate", "--data", s(&f("data.fv")), "--algo", "rf", "--report", s(&f("eval.csv"))])?;
    crowdcast(&[
        "sweep-states",
        "--corpus",
        s(&f("corpus.bin")),
        "--algo",
        "rf",
        "--n-trees",
        "10",
        "--states",
        "0..100:10",
        "--out",
        s(&f("curve.csv")),
    ])?;
    crowdcast(&[
        "pairs",
        "--corpus",
        s(&f("corpus.bin")),
        "--sweep",
        "0:1:0.1",
        "--sweep-out",
        s(&f("sweep.csv")),
        "--report",
        s(&f("relaunch_tests.csv")),
    ])?;
    crowdcast(&[
        "cluster",
        "--corpus",
        s(&f("corpus.bin")),
        "--k-max",
        "10",
        "--bic-param-count",
        "--out",
        s(&f("clusters.csv")),
        "--bic",
        s(&f("bic.csv")),
        "--profile",
        s(&f("profile.csv")),
        "--promo",
        s(&f("promo.csv")),
    ])?;
    crowdcast(&["summarize", "--corpus", s(&f("corpus.bin")), "--out", s(&f("summary.csv"))])?;
    crowdcast(&[
        "report",
        "--eval",
        s(&f("eval.csv")),
        "--curve",
        s(&f("curve.csv")),
        "--pairs-report",
        s(&f("relaunch_tests.csv")),
        "--lambda-sweep",
        s(&f("sweep.csv")),
        "--bic",
        s(&f("bic.csv")),
        "--profile",
        s(&f("profile.csv")),
        "--promo",
        s(&f("promo.csv")),
        "--summary",
        s(&f("summary.csv")),
        "--out-dir",
        s(&f("report")),
    ])?;
    let took = start.elapsed();
    ensure(f("report/report.md").is_file(), || "report.md missing".into())?;
    ensure(took < Duration::from_secs(300), || format!("took {:.1}s", took.as_secs_f64()))?;
    Ok(format!("10,000 projects in {:.1}s", took.as_secs_f64()))
}

fn main() {
    let mut info = Vec::new();
    let criteria: Vec<(&str, Box<dyn FnOnce(&mut Vec<String>) -> Outcome>)> = vec![
        ("smog-formula", Box::new(|_| smog_examples())),
        ("cumulative-example", Box::new(|_| cumulative_example())),
        ("chi2-oracle", Box::new(|_| chi2_vs_oracle())),
        ("auc-oracle", Box::new(|_| auc_vs_pairs())),
        ("naive-bayes-posteriors", Box::new(|_| nb_posteriors())),
        ("classifier-sanity", Box::new(|_| classifier_sanity())),
        ("thread-determinism", Box::new(|_| determinism())),
        ("em-monotonicity", Box::new(|_| em_monotone())),
        ("gmm-recovery", Box::new(gmm_recovery)),
        ("bic-arithmetic", Box::new(|_| bic_arithmetic())),
        ("bucket-normalization", Box::new(|_| buckets())),
        ("welch-oracle", Box::new(|_| welch())),
        ("relaunch-pairs", Box::new(|_| relaunch())),
        ("state-sweep-endpoints", Box::new(|_| state_endpoints())),
        ("end-to-end-smoke", Box::new(|_| smoke())),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| check(&mut info)))
            .unwrap_or_else(|p| Err(format!("panicked: {}", p.downcast_ref::<String>().cloned().unwrap_or_default())));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name} ({secs:.1}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name} ({secs:.1}s): {why}");
            }
        }
    }
    for line in info {
        println!("INFO {line}");
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
