use serde::{Deserialize, Serialize};

use super::{RecognitionError, Result};

/// Unit-cost edit distance, two-row dynamic programming.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

pub fn levenshtein_str(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein(&a, &b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRate {
    pub edits: usize,
    pub reference_len: usize,
}

impl ErrorRate {
    pub fn rate(&self) -> f64 {
        self.edits as f64 / self.reference_len as f64
    }

    /// `max(0, 1 - CER)`.
    pub fn accuracy(&self) -> f64 {
        (1.0 - self.rate()).max(0.0)
    }
}

/// Character error rate of `hypothesis` against a nonempty `reference`.
pub fn character_error_rate(hypothesis: &str, reference: &str) -> Result<ErrorRate> {
    let reference_len = reference.chars().count();
    if reference_len == 0 {
        return Err(RecognitionError::EmptyReference);
    }
    Ok(ErrorRate {
        edits: levenshtein_str(hypothesis, reference),
        reference_len,
    })
}

/// Corpus CER: total edits over total reference characters.
pub fn corpus_error_rate<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<ErrorRate> {
    let mut total = ErrorRate {
        edits: 0,
        reference_len: 0,
    };
    for (h, r) in pairs {
        let e = character_error_rate(h, r)?;
        total.edits += e.edits;
        total.reference_len += e.reference_len;
    }
    if total.reference_len == 0 {
        return Err(RecognitionError::EmptyReference);
    }
    Ok(total)
}
