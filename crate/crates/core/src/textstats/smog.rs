use serde::Serialize;

use super::sentences::split_sentences;
use super::syllables::count_syllables;

/// Lowercased maximal runs of alphabetic characters.
pub fn words(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphabetic())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
}

/// SMOG grade from raw counts; 0 when there are no sentences.
pub fn smog_grade(polysyllables: usize, sentences: usize) -> f64 {
    if sentences == 0 {
        return 0.0;
    }
    1.043 * (polysyllables as f64 * 30.0 / sentences as f64).sqrt() + 3.1291
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TextStats {
    pub sentences: usize,
    pub words: usize,
    pub polysyllables: usize,
    pub smog: f64,
}

pub fn text_stats(text: &str) -> TextStats {
    let sentences = split_sentences(text).len();
    let (mut n_words, mut polysyllables) = (0, 0);
    for w in words(text) {
        n_words += 1;
        if count_syllables(&w) >= 3 {
            polysyllables += 1;
        }
    }
    TextStats {
        sentences,
        words: n_words,
        polysyllables,
        smog: smog_grade(polysyllables, sentences),
    }
}

pub fn smog(text: &str) -> f64 {
    text_stats(text).smog
}
