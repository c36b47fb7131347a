use crowdcast_core::clusterlab::{
    assign, cluster_profile, normalize_buckets, promotion_curve, select_cluster_inputs, select_k, BicPenalty,
    BucketMatrix, CovType, GmmOptions,
};

use super::{parse, usage};
use crate::args::ClusterArgs;
use crate::provenance::{num, opt, CsvOut, RunConfig};
use crate::CliResult;

pub fn cluster(a: &ClusterArgs, run: &RunConfig) -> CliResult<()> {
    let cov: CovType = parse("cov", &a.cov)?;
    if a.buckets == 0 {
        return Err(usage("'--buckets' must be at least 1"));
    }
    if a.k_min == 0 || a.k_max < a.k_min {
        return Err(usage(format!("'--k-min' {} and '--k-max' {} do not form a range", a.k_min, a.k_max)));
    }
    if a.n_init == 0 || a.max_iter == 0 {
        return Err(usage("'--n-init' and '--max-iter' must be at least 1"));
    }
    if !(a.tol > 0.0) || !(a.ridge >= 0.0) {
        return Err(usage("'--tol' must be positive and '--ridge' non-negative"));
    }
    let opts = GmmOptions {
        cov,
        tol: a.tol,
        max_iter: a.max_iter,
        n_init: a.n_init,
        ridge: a.ridge,
    };
    let penalty = if a.bic_param_count {
        BicPenalty::ParameterCount
    } else {
        BicPenalty::ComponentCount
    };

    let corpus = super::load_corpus(&a.corpus)?;
    let inputs = select_cluster_inputs(&corpus)?;
    let raw = BucketMatrix::build(&corpus, &inputs, a.buckets)?;
    let z = normalize_buckets(&raw)?;
    let sel = select_k(&z.rows, a.k_min, a.k_max, &opts, penalty, run.seed)?;
    let labels = assign(&sel.best, &z.rows)?;
    let k = sel.best_k;
    eprintln!("{} projects, selected K = {k}", z.rows.len());

    if let Some(path) = &a.out {
        let mut w = CsvOut::create(path, run, &["project_id", "cluster"])?;
        for (id, l) in z.project_ids.iter().zip(&labels) {
            w.row([id.as_str(), &l.to_string()])?;
        }
        w.finish()?;
    }
    if let Some(path) = &a.bic {
        let mut w = CsvOut::create(path, run, &["k", "log_likelihood", "bic", "n_iter", "converged", "selected"])?;
        for p in &sel.curve {
            w.row([
                p.k.to_string(),
                num(p.log_likelihood),
                num(p.bic),
                p.n_iter.to_string(),
                p.converged.to_string(),
                (p.k == k).to_string(),
            ])?;
        }
        w.finish()?;
    }
    if let Some(path) = &a.profile {
        let profiles = cluster_profile(&corpus, &raw, &z, &labels, k)?;
        let mut header: Vec<String> = [
            "cluster",
            "count",
            "mean_goal",
            "mean_pledged",
            "mean_percent_to_goal",
            "mean_images",
            "mean_videos",
            "mean_faqs",
            "mean_rewards",
            "mean_updates",
            "mean_comments",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        header.extend((1..=a.buckets).map(|b| format!("b{b}")));
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut w = CsvOut::create(path, run, &header)?;
        for p in &profiles {
            let mut rec = vec![
                p.cluster.to_string(),
                p.count.to_string(),
                opt(p.mean_goal),
                opt(p.mean_pledged),
                opt(p.mean_percent_to_goal),
                opt(p.mean_images),
                opt(p.mean_videos),
                opt(p.mean_faqs),
                opt(p.mean_rewards),
                opt(p.mean_updates),
                opt(p.mean_comments),
            ];
            if p.relative_curve.is_empty() {
                rec.extend(std::iter::repeat_n(String::new(), a.buckets));
            } else {
                rec.extend(p.relative_curve.iter().map(|&v| num(v)));
            }
            w.row(&rec)?;
        }
        w.finish()?;
    }
    if let Some(path) = &a.promo {
        if !corpus.has_promo_data() {
            log::warn!("corpus has no promotion tweets; promotion curves are all zero");
        }
        let pc = promotion_curve(&corpus, &z.project_ids, &labels, k, a.buckets)?;
        let mut w = CsvOut::create(path, run, &["cluster", "bucket", "mean_tweets", "count"])?;
        for (c, curve) in pc.curves.iter().enumerate() {
            for (b, &v) in curve.iter().enumerate() {
                w.row([c.to_string(), (b + 1).to_string(), num(v), pc.counts[c].to_string()])?;
            }
        }
        w.finish()?;
    }
    Ok(())
}
