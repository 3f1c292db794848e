//! Phoneme strings: rule-based Spanish G2P and a small English table,
//! both over one shared symbol set.
//!
//! A phoneme string is space-separated symbols, e.g. `"k w a t r o"`.

use crate::dataset::Language;

/// Symbols the converters emit. A token that already is one of these is
/// left alone, which makes [`g2p_spanish`] idempotent on its own output.
pub const PHONEMES: &[&str] = &[
    "a", "e", "i", "o", "u", "j", "w", "p", "b", "t", "d", "k", "g", "f", "s", "x", "m", "n", "ɲ", "l", "r", "rr",
    "tʃ", "ʝ",
];

/// English keyword pronunciations approximated with the Spanish symbols.
const ENGLISH: &[(&str, &str)] = &[
    ("zero", "s i r o"),
    ("one", "w a n"),
    ("two", "t u"),
    ("three", "t r i"),
    ("four", "f o r"),
    ("five", "f a i f"),
    ("six", "s i k s"),
    ("seven", "s e b e n"),
    ("eight", "e i t"),
    ("nine", "n a i n"),
    ("ten", "t e n"),
    ("computer", "k o m p j u t e r"),
    ("number", "n a m b e r"),
    ("keyboard", "k i b o r d"),
    ("monitor", "m o n i t o r"),
    ("mouse", "m a u s"),
    ("okay", "o k e i"),
    ("yes", "ʝ e s"),
];

fn is_vowel(c: Option<&char>) -> bool {
    matches!(c, Some('a' | 'e' | 'i' | 'o' | 'u'))
}

fn front_vowel(c: Option<&char>) -> bool {
    matches!(c, Some('e' | 'i'))
}

fn word_to_phonemes(word: &str, out: &mut Vec<String>) {
    let w: Vec<char> = word.chars().collect();
    let mut i = 0;
    let mut push = |s: &str| out.push(s.to_string());
    while i < w.len() {
        let next = w.get(i + 1);
        let prev = if i > 0 { w.get(i - 1) } else { None };
        let mut step = 1;
        match w[i] {
            'a' => push("a"),
            'e' => push("e"),
            'o' => push("o"),
            'i' => push(if is_vowel(next) { "j" } else { "i" }),
            'u' => push(if is_vowel(next) { "w" } else { "u" }),
            'y' => push(if next.is_none() || !is_vowel(next) { "i" } else { "ʝ" }),
            'b' | 'v' => push("b"),
            'c' if next == Some(&'h') => {
                push("tʃ");
                step = 2;
            }
            'c' => push(if front_vowel(next) { "s" } else { "k" }),
            'd' => push("d"),
            'f' => push("f"),
            'g' if front_vowel(next) => push("x"),
            'g' if next == Some(&'u') && front_vowel(w.get(i + 2)) => {
                push("g");
                step = 2;
            }
            'g' => push("g"),
            'h' => {}
            'j' => push("x"),
            'k' => push("k"),
            'l' if next == Some(&'l') => {
                push("ʝ");
                step = 2;
            }
            'l' => push("l"),
            'm' => push("m"),
            'n' => push("n"),
            'ñ' => push("ɲ"),
            'p' => push("p"),
            'q' => {
                push("k");
                if next == Some(&'u') {
                    step = 2;
                }
            }
            'r' if next == Some(&'r') => {
                push("rr");
                step = 2;
            }
            'r' if i == 0 || matches!(prev, Some('n' | 'l' | 's')) => push("rr"),
            'r' => push("r"),
            's' => push("s"),
            't' => push("t"),
            'w' => push("w"),
            'x' => {
                push("k");
                push("s");
            }
            'z' => push("s"),
            other => push(&other.to_string()),
        }
        i += step;
    }
}

/// Rule-based Spanish grapheme-to-phoneme conversion (Latin American
/// seseo, no stress). Words are concatenated; symbols it does not know pass
/// through unchanged.
pub fn g2p_spanish(text: &str) -> String {
    let mut out = Vec::new();
    for token in text.split_whitespace() {
        if PHONEMES.contains(&token) {
            out.push(token.to_string());
        } else {
            word_to_phonemes(token, &mut out);
        }
    }
    out.join(" ")
}

pub fn english_pronunciation(word: &str) -> Option<&'static str> {
    ENGLISH.iter().find(|(w, _)| *w == word).map(|(_, p)| *p)
}

/// Phonemes for normalized text: English words from the table when the
/// language allows it, everything else through the Spanish rules.
pub fn pronounce(text: &str, language: Language) -> String {
    let parts: Vec<String> = text
        .split_whitespace()
        .map(|w| match (language, english_pronunciation(w)) {
            (Language::En | Language::Mixed, Some(p)) => p.to_string(),
            _ => g2p_spanish(w),
        })
        .filter(|p| !p.is_empty())
        .collect();
    parts.join(" ")
}

/// Lowercases and strips accents like transcript normalization does, but
/// keeps the phoneme symbols outside `[a-z0-9ñ]`.
pub fn normalize_hypothesis(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.chars().flat_map(char::to_lowercase) {
        if matches!(c, '\'' | '’' | '`') {
            continue;
        }
        let kept = match c {
            'ɲ' | 'ʝ' | 'ʃ' => Some(c),
            _ => crate::dataset::text::fold_char(c),
        };
        match kept {
            Some(k) => {
                if pending_space && !out.is_empty() {
                    out.push(' ');
                }
                pending_space = false;
                out.push(k);
            }
            None => pending_space = true,
        }
    }
    out
}

/// Hypothesis (text or phonemes, any case or accents) to a phoneme string.
pub fn hypothesis_phonemes(hypothesis: &str) -> String {
    g2p_spanish(&normalize_hypothesis(hypothesis))
}

pub fn symbols(phonemes: &str) -> Vec<&str> {
    phonemes.split_whitespace().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keywords() {
        assert_eq!(g2p_spanish("cero"), "s e r o");
        assert_eq!(g2p_spanish("cuatro"), "k w a t r o");
        assert_eq!(g2p_spanish("uno"), "u n o");
        assert_eq!(g2p_spanish("tres"), "t r e s");
        assert_eq!(g2p_spanish("cinco"), "s i n k o");
        assert_eq!(g2p_spanish("computadora"), "k o m p u t a d o r a");
        assert_eq!(g2p_spanish("numero"), "n u m e r o");
    }

    #[test]
    fn digraphs_and_silent_letters() {
        assert_eq!(g2p_spanish("queso"), "k e s o");
        assert_eq!(g2p_spanish("guitarra"), "g i t a rr a");
        assert_eq!(g2p_spanish("gente"), "x e n t e");
        assert_eq!(g2p_spanish("llama"), "ʝ a m a");
        assert_eq!(g2p_spanish("niño"), "n i ɲ o");
        assert_eq!(g2p_spanish("hola"), "o l a");
        assert_eq!(g2p_spanish("chico"), "tʃ i k o");
        assert_eq!(g2p_spanish("rosa"), "rr o s a");
        assert_eq!(g2p_spanish("hoy y yo"), "o i i ʝ o");
        assert_eq!(g2p_spanish("taxi"), "t a k s i");
    }

    #[test]
    fn idempotent_on_output() {
        for w in ["cero", "cuatro", "chorro", "llueve", "pingüino", "examen", "7 x"] {
            let p = g2p_spanish(w);
            assert_eq!(g2p_spanish(&p), p, "{w}");
        }
    }

    #[test]
    fn unknown_symbols_pass_through() {
        assert_eq!(g2p_spanish("a7"), "a 7");
    }

    #[test]
    fn hypothesis_normalization() {
        assert_eq!(hypothesis_phonemes("Úno"), "u n o");
        assert_eq!(hypothesis_phonemes("U N O"), "u n o");
        assert_eq!(hypothesis_phonemes("K W A T R O"), "k w a t r o");
        assert_eq!(hypothesis_phonemes("ʝ a"), "ʝ a");
    }

    #[test]
    fn bilingual_pronunciation() {
        assert_eq!(pronounce("zero", Language::En), "s i r o");
        assert_eq!(pronounce("uno zero", Language::Mixed), "u n o s i r o");
        assert_eq!(pronounce("zero", Language::Es), "s e r o");
    }
}
