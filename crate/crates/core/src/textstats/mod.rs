//! Deterministic text measurements: sentences, syllables, SMOG grade and a
//! TF-IDF vector space with cosine similarity.

pub mod lexicon;
mod sentences;
mod smog;
mod syllables;
mod vsm;

pub use sentences::split_sentences;
pub use smog::{smog, smog_grade, text_stats, words, TextStats};
pub use syllables::count_syllables;
pub use vsm::{cosine, vsm_tokens, SparseVector, VectorSpaceModel};
