//! Heuristic English syllable counter.
//!
//! Base rule: one syllable per maximal run of vowels (`a e i o u y`), minus a
//! terminal silent `e` unless the word ends in consonant + `le`, floored at
//! one. A handful of refinements cover common hiatus vowels (`idea`, `video`),
//! silent `-ed`/`-es` endings and silent `e` before `-ly`/`-ment`/`-ness`.

fn is_vowel(b: u8) -> bool {
    matches!(b, b'a' | b'e' | b'i' | b'o' | b'u' | b'y')
}

/// Vowel pairs pronounced as two syllables.
const HIATUS: [&[u8; 2]; 6] = [b"ia", b"io", b"iu", b"eo", b"uo", b"ii"];

fn hiatus_extra(w: &[u8], start: usize, end: usize) -> i32 {
    let group = &w[start..end];
    for h in HIATUS {
        let Some(i) = group.windows(2).position(|p| p == h) else {
            continue;
        };
        let pos = start + i;
        let pre = pos.checked_sub(1).map(|p| w[p]);
        // -tion, -cial, -sion: the i softens the consonant
        if matches!(h, b"ia" | b"io" | b"iu") && matches!(pre, Some(b'c' | b't' | b's' | b'g' | b'x'))
        {
            continue;
        }
        // million, billion
        if matches!(h, b"io" | b"ia") && pos >= 2 && &w[pos - 2..pos] == b"ll" {
            continue;
        }
        // people
        if h == b"eo" && w.get(pos + 2) == Some(&b'p') {
            continue;
        }
        return 1;
    }
    i32::from(group.ends_with(b"ea") && end == w.len())
}

fn silent_final_e(w: &[u8]) -> bool {
    let n = w.len();
    w.ends_with(b"e") && !(n >= 3 && w.ends_with(b"le") && !is_vowel(w[n - 3]))
}

/// Counts syllables in a lowercase word. Non-ASCII letters are treated as
/// consonants. Always returns at least 1.
pub fn count_syllables(word: &str) -> usize {
    let w = word.as_bytes();
    let n = w.len();
    let mut count: i32 = 0;
    let mut i = 0;
    while i < n {
        if !is_vowel(w[i]) {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && is_vowel(w[i]) {
            i += 1;
        }
        count += 1 + hiatus_extra(w, start, i);
        if w[start..i].windows(2).any(|p| p == b"yi") {
            count += 1;
        }
    }
    if w.starts_with(b"crea") {
        count += 1;
    }

    if silent_final_e(w) {
        count -= 1;
    } else if n > 3 && w.ends_with(b"ed") && !is_vowel(w[n - 3]) && !matches!(w[n - 3], b't' | b'd')
    {
        count -= 1;
    } else if n > 3
        && w.ends_with(b"es")
        && !is_vowel(w[n - 3])
        && !matches!(w[n - 3], b's' | b'x' | b'z' | b'c' | b'g')
        && !matches!(&w[n - 4..n - 2], b"ch" | b"sh")
        && !(w[n - 3] == b'l' && !is_vowel(w[n - 4]))
    {
        count -= 1;
    }

    for suffix in [&b"ments"[..], b"ment", b"ness", b"ly"] {
        if w.ends_with(suffix) && n > suffix.len() + 2 {
            let stem = &w[..n - suffix.len()];
            let m = stem.len();
            if stem.ends_with(b"e")
                && !is_vowel(stem[m - 2])
                && !(stem.ends_with(b"le") && !is_vowel(stem[m - 3]))
            {
                count -= 1;
            }
            break;
        }
    }
    count.max(1) as usize
}
