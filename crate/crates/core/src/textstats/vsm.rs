use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::lexicon::is_stop_word;
use crate::error::{Error, Result};

/// Sparse vector: `(dimension, weight)` pairs with strictly increasing dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    pub dim: usize,
    pub entries: Vec<(u32, f64)>,
}

impl SparseVector {
    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w * w).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> SparseVector {
        SparseVector {
            dim: self.dim,
            entries: self.entries.iter().map(|&(i, w)| (i, w * factor)).collect(),
        }
    }
}

/// Tokens used for term vectors: lowercase alphanumeric runs of length two
/// or more, minus stop words.
pub fn vsm_tokens(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .map(str::to_lowercase)
        .filter(|t| t.chars().count() >= 2 && !is_stop_word(t))
        .collect()
}

/// TF-IDF term space over a fixed document collection.
///
/// `tf` is the raw term count and `idf = ln(n_docs / df)`. Vocabulary
/// dimensions follow lexicographic term order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorSpaceModel {
    vocabulary: BTreeMap<String, u32>,
    document_frequency: Vec<u32>,
    n_docs: usize,
    vectors: Vec<SparseVector>,
}

impl VectorSpaceModel {
    pub fn build<S: AsRef<str>>(docs: &[S]) -> Result<VectorSpaceModel> {
        if docs.is_empty() {
            return Err(Error::invalid("vector space model needs at least one document"));
        }
        let counts: Vec<BTreeMap<String, u32>> = docs
            .iter()
            .map(|d| {
                let mut m = BTreeMap::new();
                for t in vsm_tokens(d.as_ref()) {
                    *m.entry(t).or_insert(0) += 1;
                }
                m
            })
            .collect();
        let mut df: BTreeMap<&str, u32> = BTreeMap::new();
        for m in &counts {
            for t in m.keys() {
                *df.entry(t.as_str()).or_insert(0) += 1;
            }
        }
        let vocabulary: BTreeMap<String, u32> = df
            .keys()
            .enumerate()
            .map(|(i, t)| (t.to_string(), i as u32))
            .collect();
        let document_frequency: Vec<u32> = df.values().copied().collect();
        let n_docs = docs.len();
        let idf: Vec<f64> = document_frequency
            .iter()
            .map(|&d| (n_docs as f64 / f64::from(d)).ln())
            .collect();
        let dim = vocabulary.len();
        let vectors = counts
            .iter()
            .map(|m| SparseVector {
                dim,
                entries: m
                    .iter()
                    .map(|(t, &tf)| {
                        let i = vocabulary[t];
                        (i, f64::from(tf) * idf[i as usize])
                    })
                    .collect(),
            })
            .collect();
        Ok(VectorSpaceModel {
            vocabulary,
            document_frequency,
            n_docs,
            vectors,
        })
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn dim(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn vocabulary(&self) -> &BTreeMap<String, u32> {
        &self.vocabulary
    }

    pub fn document_frequency(&self, term: &str) -> Option<u32> {
        self.vocabulary
            .get(term)
            .map(|&i| self.document_frequency[i as usize])
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.document_frequency(term)
            .map(|df| (self.n_docs as f64 / f64::from(df)).ln())
    }

    pub fn vector(&self, doc: usize) -> &SparseVector {
        &self.vectors[doc]
    }

    pub fn vectors(&self) -> &[SparseVector] {
        &self.vectors
    }

    /// Cosine similarity between two stored documents.
    pub fn similarity(&self, a: usize, b: usize) -> f64 {
        cosine(&self.vectors[a], &self.vectors[b]).expect("vectors share one space")
    }
}

/// Cosine similarity in `[0, 1]` for non-negative weights; 0 when either
/// vector is zero.
pub fn cosine(u: &SparseVector, v: &SparseVector) -> Result<f64> {
    if u.dim != v.dim {
        return Err(Error::invalid(format!(
            "cosine: dimension mismatch {} vs {}",
            u.dim, v.dim
        )));
    }
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    // identical vectors are exactly 1, not 1 - ulp
    if u.entries == v.entries {
        return Ok(1.0);
    }
    let (mut i, mut j, mut dot) = (0, 0, 0.0);
    while i < u.entries.len() && j < v.entries.len() {
        let (a, b) = (u.entries[i], v.entries[j]);
        match a.0.cmp(&b.0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot += a.1 * b.1;
                i += 1;
                j += 1;
            }
        }
    }
    Ok((dot / (nu * nv)).clamp(0.0, 1.0))
}
