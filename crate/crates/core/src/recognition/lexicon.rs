use serde::{Deserialize, Serialize};

use super::distance::levenshtein;
use super::phonemes::{g2p_spanish, hypothesis_phonemes, symbols};
use super::{RecognitionError, Result};
use crate::dataset::normalize;

pub const OTHERS: &str = "Others";
pub const DEFAULT_TAU: f64 = 0.5;

/// The keywords scored in the lesson recordings, in reporting order.
pub const SPANISH_KEYWORDS: &[&str] = &["uno", "dos", "tres", "cuatro", "cinco", "cero", "computadora", "numero"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub keyword: String,
    pub phonemes: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordLexicon {
    entries: Vec<LexiconEntry>,
    pub rejection: String,
    /// Acceptance threshold as a fraction of the keyword's phoneme count.
    pub tau: f64,
}

impl KeywordLexicon {
    pub fn new(entries: Vec<LexiconEntry>, tau: f64) -> Result<Self> {
        if entries.is_empty() {
            return Err(RecognitionError::EmptyLexicon);
        }
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(RecognitionError::InvalidConfig(format!("tau {tau}")));
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut clean = Vec::with_capacity(entries.len());
        for e in entries {
            let keyword = normalize(&e.keyword);
            if keyword.is_empty() || keyword == normalize(OTHERS) {
                return Err(RecognitionError::InvalidLexicon(format!("keyword {:?}", e.keyword)));
            }
            if !seen.insert(keyword.clone()) {
                return Err(RecognitionError::DuplicateKeyword(keyword));
            }
            let phonemes = symbols(&e.phonemes).join(" ");
            if phonemes.is_empty() {
                return Err(RecognitionError::InvalidLexicon(format!("{keyword} has no phonemes")));
            }
            clean.push(LexiconEntry { keyword, phonemes });
        }
        Ok(KeywordLexicon {
            entries: clean,
            rejection: OTHERS.to_string(),
            tau,
        })
    }

    /// Keywords with phonemes from the Spanish rules.
    pub fn from_words(words: &[&str], tau: f64) -> Result<Self> {
        let entries = words
            .iter()
            .map(|w| LexiconEntry {
                keyword: w.to_string(),
                phonemes: g2p_spanish(&normalize(w)),
            })
            .collect();
        KeywordLexicon::new(entries, tau)
    }

    pub fn spanish_default() -> Self {
        KeywordLexicon::from_words(SPANISH_KEYWORDS, DEFAULT_TAU).expect("built-in lexicon is valid")
    }

    /// `keyword<TAB>phonemes` per line; blank lines and `#` comments skipped.
    pub fn from_tsv(text: &str, tau: f64) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (keyword, phonemes) = line.split_once('\t').ok_or_else(|| RecognitionError::MalformedLexicon {
                line: i + 1,
                message: "expected keyword<TAB>phonemes".into(),
            })?;
            if phonemes.trim().is_empty() {
                return Err(RecognitionError::MalformedLexicon {
                    line: i + 1,
                    message: format!("{keyword:?} has no phonemes"),
                });
            }
            entries.push(LexiconEntry {
                keyword: keyword.trim().to_string(),
                phonemes: phonemes.to_string(),
            });
        }
        KeywordLexicon::new(entries, tau)
    }

    pub fn to_tsv(&self) -> String {
        self.entries.iter().map(|e| format!("{}\t{}\n", e.keyword, e.phonemes)).collect()
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn keywords(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.keyword.clone()).collect()
    }

    /// Keywords followed by the rejection class.
    pub fn classes(&self) -> Vec<String> {
        let mut c = self.keywords();
        c.push(self.rejection.clone());
        c
    }

    pub fn contains(&self, keyword: &str) -> bool {
        self.entries.iter().any(|e| e.keyword == keyword)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub label: String,
    /// Closest keyword and its distance, whether or not it was accepted.
    pub nearest: String,
    pub distance: usize,
    pub hypothesis_phonemes: String,
}

/// Minimum edit distance over phoneme symbols. The closest keyword wins
/// (first in lexicon order on ties) if its distance is at most
/// `tau * len(keyword phonemes)`; otherwise the rejection class.
pub fn classify_detailed(hypothesis: &str, lexicon: &KeywordLexicon) -> Classification {
    let hyp = hypothesis_phonemes(hypothesis);
    let h = symbols(&hyp);
    let mut best: Option<(usize, &LexiconEntry)> = None;
    for e in &lexicon.entries {
        let d = levenshtein(&h, &symbols(&e.phonemes));
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, e));
        }
    }
    let (distance, entry) = best.expect("lexicon is nonempty");
    let limit = lexicon.tau * symbols(&entry.phonemes).len() as f64;
    let label = if distance as f64 <= limit { entry.keyword.clone() } else { lexicon.rejection.clone() };
    Classification {
        label,
        nearest: entry.keyword.clone(),
        distance,
        hypothesis_phonemes: hyp,
    }
}

pub fn classify_keyword(hypothesis: &str, lexicon: &KeywordLexicon) -> String {
    classify_detailed(hypothesis, lexicon).label
}
