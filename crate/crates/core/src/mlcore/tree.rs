use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::encode::EncodedDataset;
use crate::error::{Error, Result};
use crate::rng;

/// Features examined per split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaxFeatures {
    /// ⌈√d⌉
    Sqrt,
    All,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, d: usize) -> usize {
        let k = match self {
            MaxFeatures::Sqrt => (d as f64).sqrt().ceil() as usize,
            MaxFeatures::All => d,
            MaxFeatures::Count(k) => k,
        };
        k.clamp(1, d.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_features: MaxFeatures,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_features: MaxFeatures::Sqrt,
            max_depth: None,
            min_leaf: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf(Vec<f64>),
    /// `x[feature] <= threshold` goes left.
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
}

/// CART classification tree grown on Gini impurity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

struct Candidate {
    score: f64,
    feature: usize,
    threshold: f64,
}

fn better(a: &Candidate, b: &Option<Candidate>) -> bool {
    match b {
        None => true,
        Some(b) => {
            a.score > b.score
                || (a.score == b.score
                    && (a.feature < b.feature || (a.feature == b.feature && a.threshold < b.threshold)))
        }
    }
}

/// Σ c² / n for both sides; maximizing it minimizes weighted Gini.
fn purity(counts: &[f64], n: f64) -> f64 {
    counts.iter().map(|c| c * c).sum::<f64>() / n
}

fn best_split_on(
    d: &EncodedDataset,
    rows: &[u32],
    feature: usize,
    min_leaf: usize,
    total: &[f64],
    buf: &mut Vec<(f64, usize)>,
) -> Option<Candidate> {
    buf.clear();
    buf.extend(rows.iter().map(|&i| (d.x[i as usize * d.n_cols + feature], d.y[i as usize])));
    buf.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let n = buf.len();
    if buf[0].0 == buf[n - 1].0 {
        return None;
    }
    let k = total.len();
    let mut left = vec![0.0; k];
    let mut right = total.to_vec();
    let mut best: Option<Candidate> = None;
    for i in 0..n - 1 {
        let c = buf[i].1;
        left[c] += 1.0;
        right[c] -= 1.0;
        let (a, b) = (buf[i].0, buf[i + 1].0);
        let nl = i + 1;
        if a == b || nl < min_leaf || n - nl < min_leaf {
            continue;
        }
        let score = purity(&left, nl as f64) + purity(&right, (n - nl) as f64);
        if best.as_ref().is_none_or(|bst| score > bst.score) {
            let mid = a + (b - a) / 2.0;
            let threshold = if mid < b { mid } else { a };
            best = Some(Candidate {
                score,
                feature,
                threshold,
            });
        }
    }
    best
}

impl DecisionTree {
    /// Grows a tree on `rows` (repeats allowed, as in a bootstrap sample).
    pub fn fit<R: Rng>(d: &EncodedDataset, mut rows: Vec<u32>, params: &TreeParams, rng: &mut R) -> DecisionTree {
        let k = d.n_classes;
        let m = d.n_cols;
        let mtry = params.max_features.resolve(m);
        let min_leaf = params.min_leaf.max(1);
        let mut nodes = Vec::new();
        let mut buf = Vec::with_capacity(rows.len());
        let mut order: Vec<usize> = (0..m).collect();
        // (start, end, depth, slot); slot is the index reserved in `nodes`.
        nodes.push(Node::Leaf(Vec::new()));
        let mut stack = vec![(0usize, rows.len(), 0usize, 0usize)];
        while let Some((lo, hi, depth, slot)) = stack.pop() {
            let part = &mut rows[lo..hi];
            let n = part.len();
            let mut counts = vec![0.0; k];
            for &i in part.iter() {
                counts[d.y[i as usize]] += 1.0;
            }
            let pure = counts.iter().filter(|&&c| c > 0.0).count() <= 1;
            let depth_capped = params.max_depth.is_some_and(|md| depth >= md);
            let mut best: Option<Candidate> = None;
            if !pure && !depth_capped && n >= 2 * min_leaf && m > 0 {
                order.shuffle(rng);
                let mut examined = 0;
                for &f in &order {
                    if examined >= mtry && best.is_some() {
                        break;
                    }
                    examined += 1;
                    if let Some(c) = best_split_on(d, part, f, min_leaf, &counts, &mut buf) {
                        if better(&c, &best) {
                            best = Some(c);
                        }
                    }
                }
            }
            match best {
                None => {
                    let dist = counts.iter().map(|c| c / n as f64).collect();
                    nodes[slot] = Node::Leaf(dist);
                }
                Some(c) => {
                    let mut split = 0;
                    for j in 0..n {
                        let i = part[j] as usize;
                        if d.x[i * m + c.feature] <= c.threshold {
                            part.swap(split, j);
                            split += 1;
                        }
                    }
                    let left = nodes.len();
                    nodes.push(Node::Leaf(Vec::new()));
                    nodes.push(Node::Leaf(Vec::new()));
                    nodes[slot] = Node::Split {
                        feature: c.feature as u32,
                        threshold: c.threshold,
                        left: left as u32,
                        right: left as u32 + 1,
                    };
                    stack.push((lo + split, hi, depth + 1, left + 1));
                    stack.push((lo, lo + split, depth + 1, left));
                }
            }
        }
        DecisionTree { nodes }
    }

    pub fn predict_proba(&self, x: &[f64]) -> &[f64] {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf(p) => return p,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[*feature as usize] <= *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &DecisionTree, at: usize) -> usize {
            match &t.nodes[at] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + go(t, *left as usize).max(go(t, *right as usize)),
            }
        }
        go(self, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub bootstrap: bool,
    pub tree: TreeParams,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            bootstrap: true,
            tree: TreeParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub n_classes: usize,
    pub trees: Vec<DecisionTree>,
}

impl RandomForest {
    /// Tree `t` draws from its own stream, so the forest does not depend on
    /// how trees are scheduled across threads.
    pub fn fit(d: &EncodedDataset, rows: &[usize], params: &ForestParams, seed: u64) -> Result<RandomForest> {
        if params.n_trees == 0 {
            return Err(Error::invalid("a forest needs at least one tree"));
        }
        if rows.is_empty() {
            return Err(Error::invalid("empty training set"));
        }
        let trees = (0..params.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut r = rng::stream(seed, "tree", t as u64);
                let sample: Vec<u32> = if params.bootstrap {
                    (0..rows.len()).map(|_| rows[r.gen_range(0..rows.len())] as u32).collect()
                } else {
                    rows.iter().map(|&i| i as u32).collect()
                };
                DecisionTree::fit(d, sample, &params.tree, &mut r)
            })
            .collect();
        Ok(RandomForest {
            n_classes: d.n_classes,
            trees,
        })
    }

    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let mut p = vec![0.0; self.n_classes];
        for t in &self.trees {
            for (a, b) in p.iter_mut().zip(t.predict_proba(x)) {
                *a += b;
            }
        }
        let n = self.trees.len() as f64;
        p.iter_mut().for_each(|v| *v /= n);
        p
    }
}
