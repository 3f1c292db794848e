//! Keyword recognition evaluation: Mel-spectrogram features, phoneme
//! strings, the minimum edit distance keyword classifier, and
//! sensitivity/specificity scoring.
//!
//! The phoneme recognizer itself is not part of this crate; hypotheses
//! come in as phoneme or character strings from any source.

mod decoder;
mod distance;
mod lexicon;
mod mel;
mod metrics;
mod phonemes;

use thiserror::Error;

pub use decoder::{decode_session, DecodedWord, DecoderConfig};
pub use distance::{character_error_rate, corpus_error_rate, levenshtein, levenshtein_str, ErrorRate};
pub use lexicon::{
    classify_detailed, classify_keyword, Classification, KeywordLexicon, LexiconEntry, DEFAULT_TAU, OTHERS,
    SPANISH_KEYWORDS,
};
pub use mel::{
    band_edges_hz, hz_to_mel, mel_energies, mel_filterbank, mel_spectrogram, mel_to_hz, MelConfig, MelSpectrogram,
    LOG_FLOOR,
};
pub use metrics::{
    macro_average, read_decisions, score_keywords, write_decisions, ClassScore, ConfusionStats, Decision,
    KeywordReport,
};
pub use phonemes::{
    english_pronunciation, g2p_spanish, hypothesis_phonemes, normalize_hypothesis, pronounce, symbols, PHONEMES,
};

#[derive(Debug, Error)]
pub enum RecognitionError {
    #[error("signal has {samples} samples, shorter than one {window}-sample window")]
    SignalTooShort { samples: usize, window: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("reference text is empty")]
    EmptyReference,
    #[error("lexicon is empty")]
    EmptyLexicon,
    #[error("keyword {0:?} appears twice")]
    DuplicateKeyword(String),
    #[error("invalid lexicon: {0}")]
    InvalidLexicon(String),
    #[error("lexicon line {line}: {message}")]
    MalformedLexicon { line: usize, message: String },
    #[error("decisions row {row}: {message}")]
    MalformedDecisions { row: usize, message: String },
    #[error("no decisions")]
    EmptyDecisions,
    #[error("decisions row {row}: unknown label {label:?}")]
    UnknownLabel { label: String, row: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Acoustics(#[from] crate::acoustics::AcousticsError),
}

impl RecognitionError {
    pub fn code(&self) -> &'static str {
        match self {
            RecognitionError::SignalTooShort { .. } => "SignalTooShort",
            RecognitionError::InvalidConfig(_) => "InvalidConfig",
            RecognitionError::EmptyReference => "EmptyReference",
            RecognitionError::EmptyLexicon => "EmptyLexicon",
            RecognitionError::DuplicateKeyword(_) => "DuplicateKeyword",
            RecognitionError::InvalidLexicon(_) => "InvalidLexicon",
            RecognitionError::MalformedLexicon { .. } => "MalformedLexicon",
            RecognitionError::MalformedDecisions { .. } => "MalformedDecisions",
            RecognitionError::EmptyDecisions => "EmptyDecisions",
            RecognitionError::UnknownLabel { .. } => "UnknownLabel",
            RecognitionError::Csv(_) => "MalformedCsv",
            RecognitionError::Json(_) => "Json",
            RecognitionError::Io(_) => "Io",
            RecognitionError::Acoustics(e) => e.code(),
        }
    }
}

pub type Result<T> = std::result::Result<T, RecognitionError>;
