use super::lexicon::ABBREVIATIONS;

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '\u{201d}' | '\u{2019}')
}

/// Lowercased word immediately before byte offset `end`, stripped of leading
/// punctuation.
fn preceding_word(text: &str, end: usize) -> String {
    let head = &text[..end];
    let start = head
        .char_indices()
        .rev()
        .find(|(_, c)| c.is_whitespace())
        .map(|(i, c)| i + c.len_utf8())
        .unwrap_or(0);
    head[start..]
        .trim_start_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase()
}

/// Splits text into sentences.
///
/// A sentence ends at a run of `.`, `!` or `?` (optionally followed by
/// closing quotes or brackets) that is followed by whitespace or the end of
/// the text. A lone period after a known abbreviation does not end a
/// sentence; periods inside numbers never do because no whitespace follows
/// them. Fragments without any alphanumeric character are discarded.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if !is_terminator(c) {
            i += 1;
            continue;
        }
        let mut j = i;
        while j < chars.len() && is_terminator(chars[j].1) {
            j += 1;
        }
        let single_period = c == '.' && j == i + 1;
        while j < chars.len() && is_closer(chars[j].1) {
            j += 1;
        }
        let at_boundary = j == chars.len() || chars[j].1.is_whitespace();
        let end = chars.get(j).map_or(text.len(), |(p, _)| *p);
        if at_boundary
            && !(single_period && ABBREVIATIONS.contains(&preceding_word(text, pos).as_str()))
        {
            push_sentence(&mut out, &text[start..end]);
            start = end;
        }
        i = j;
    }
    push_sentence(&mut out, &text[start..]);
    out
}

fn push_sentence<'a>(out: &mut Vec<&'a str>, piece: &'a str) {
    let piece = piece.trim();
    if piece.chars().any(char::is_alphanumeric) {
        out.push(piece);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_terminators() {
        assert_eq!(split_sentences("A. B! C?"), ["A.", "B!", "C?"]);
        assert!(split_sentences("").is_empty());
        assert!(split_sentences("   ...  ").is_empty());
    }

    #[test]
    fn decimals_and_abbreviations_do_not_split() {
        assert_eq!(split_sentences("We raised $5.00 today."), ["We raised $5.00 today."]);
        assert_eq!(
            split_sentences("Ask Dr. Who about it, e.g. tomorrow. Then go."),
            ["Ask Dr. Who about it, e.g. tomorrow.", "Then go."]
        );
    }

    #[test]
    fn runs_quotes_and_trailing_fragment() {
        assert_eq!(
            split_sentences("Wow?! \"Really.\" and more"),
            ["Wow?!", "\"Really.\"", "and more"]
        );
        assert_eq!(split_sentences("version 2.0 ships"), ["version 2.0 ships"]);
    }
}
