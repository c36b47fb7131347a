use crowdcast_core::clusterlab::{
    assign, normalize_buckets, select_cluster_inputs, select_k, BicPenalty, BucketMatrix, GmmOptions,
};
use crowdcast_core::corpus::Corpus;
use crowdcast_core::features::{assemble_dataset, AssembleOptions, DatasetConfig, Task};
use crowdcast_core::mlcore::{cross_validate, state_sweep, Algorithm, SweepOptions, TrainParams};
use crowdcast_core::relaunch::{candidate_pairs, lambda_grid, lambda_sweep, score_pairs, similar_pairs};
use crowdcast_core::synth::{generate, SynthParams};

fn corpus(params: &SynthParams, seed: u64) -> (Corpus, crowdcast_core::synth::Truth) {
    let s = generate(params, seed).unwrap();
    let (c, _) = Corpus::from_parts(s.parts, true).unwrap();
    (c.filter_eligible().0, s.truth)
}

#[test]
fn label_copy_is_learned_by_every_algorithm() {
    let (c, _) = corpus(
        &SynthParams {
            n_projects: 1000,
            label_copy: true,
            ..Default::default()
        },
        7,
    );
    let (d, _) = assemble_dataset(&c, DatasetConfig::Static, None, AssembleOptions::default()).unwrap();
    for algo in [Algorithm::NaiveBayes, Algorithm::RandomForest, Algorithm::AdaBoostM1] {
        let r = cross_validate(&d, Task::Success, algo, &TrainParams::default(), 5, 42).unwrap();
        assert!(r.accuracy >= 0.95, "{algo}: {}", r.accuracy);
    }
}

#[test]
fn sweep_endpoints() {
    let (c, _) = corpus(&SynthParams::default(), 11);
    let pts = state_sweep(
        &c,
        Task::Success,
        Algorithm::RandomForest,
        &TrainParams::default(),
        &[0, 100],
        SweepOptions::default(),
        42,
    )
    .unwrap();
    assert!(pts[1].report.accuracy >= 0.99, "{}", pts[1].report.accuracy);
    let (d0, _) = assemble_dataset(&c, DatasetConfig::Full, Some(0), AssembleOptions::default()).unwrap();
    let j = d0.schema.index_of("cum_pledged_ratio").unwrap();
    assert!(d0.rows.iter().all(|r| r.values[j] == 0.0 && r.values[j + 1] == 0.0));
}

#[test]
fn planted_relaunch_pairs_are_recovered() {
    let (c, truth) = corpus(&SynthParams::default(), 5);
    let pairs = candidate_pairs(&c);
    assert_eq!(pairs.len(), 60);
    let scored = score_pairs(&c, &pairs).unwrap();
    let kept = similar_pairs(&scored, 0.8);
    let mut got: Vec<&str> = kept.iter().map(|s| s.pair.former_id.as_str()).collect();
    let mut want: Vec<&str> = truth.pairs.iter().filter(|p| p.identical).map(|p| p.former_id.as_str()).collect();
    got.sort_unstable();
    want.sort_unstable();
    assert_eq!(got, want);
    let sweep = lambda_sweep(&scored, &lambda_grid(0.0, 1.0, 0.1).unwrap());
    assert!(sweep.windows(2).all(|w| w[1].total() <= w[0].total()));
}

#[test]
fn planted_temporal_shapes_form_three_clusters() {
    let (c, truth) = corpus(&SynthParams::default(), 9);
    let inputs = select_cluster_inputs(&c).unwrap();
    let raw = BucketMatrix::build(&c, &inputs, 20).unwrap();
    let z = normalize_buckets(&raw).unwrap();
    let sel = select_k(&z.rows, 1, 6, &GmmOptions::default(), BicPenalty::ParameterCount, 42).unwrap();
    assert_eq!(sel.best_k, 3, "{:?}", sel.curve);
    let labels = assign(&sel.best, &z.rows).unwrap();
    let shape: std::collections::HashMap<&str, usize> =
        truth.shapes.iter().map(|(id, s)| (id.as_str(), *s)).collect();
    // purity: each cluster is dominated by a single planted shape
    let mut table = [[0usize; 3]; 3];
    for (id, &l) in z.project_ids.iter().zip(&labels) {
        table[l][shape[id.as_str()]] += 1;
    }
    let matched: usize = table.iter().map(|row| *row.iter().max().unwrap()).sum();
    assert!(matched as f64 >= 0.95 * labels.len() as f64, "{table:?}");
}
