//! Simulated classroom corpus: transcripts in, mixture WAVs and a JSONL
//! manifest out.

mod pipeline;
mod schedule;
mod synthetic;
pub(crate) mod text;
pub mod tts;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acoustics::{AcousticsError, SceneConfig};
use crate::geometry::GeometryError;

pub use pipeline::{
    build_dataset, derive_seed, load_transcripts, read_manifest, render_session, DatasetManifest, FailedUtterance,
    ManifestEntry, NoiseEvent, SessionFailure, SessionRender, SessionTranscript, UtteranceRef, MANIFEST_FILE,
};
pub use synthetic::synthetic_transcript;
pub use schedule::{schedule_session, Schedule, Slot, OVERLAP_TOLERANCE};
pub use text::{language_tag, normalize, preprocess_transcript, Language, LineWarning, TranscriptLine};
pub use tts::{CachedTts, HttpTts, HttpTtsConfig, MockTts, TtsBackend};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("empty text")]
    EmptyText,
    #[error("speech service unavailable: {0}")]
    ServiceUnavailable(String),
    #[error("speech service quota exceeded: {0}")]
    QuotaExceeded(String),
    #[error("speech service error: {0}")]
    Service(String),
    #[error("overlap target {target} unreachable (best {reachable:.3})")]
    InfeasibleOverlap { target: f64, reachable: f64 },
    #[error("overlap target {0} outside [0, 1)")]
    InvalidTarget(f64),
    #[error("speaker {0} has no position in the geometry")]
    UnknownSpeaker(String),
    #[error("session {session}: {failed} of {total} utterances failed")]
    SessionFailed { session: String, failed: usize, total: usize },
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Acoustics(#[from] AcousticsError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl DatasetError {
    pub fn code(&self) -> &'static str {
        match self {
            DatasetError::EmptyText => "EmptyText",
            DatasetError::ServiceUnavailable(_) => "ServiceUnavailable",
            DatasetError::QuotaExceeded(_) => "QuotaExceeded",
            DatasetError::Service(_) => "ServiceError",
            DatasetError::InfeasibleOverlap { .. } => "InfeasibleOverlap",
            DatasetError::InvalidTarget(_) => "InvalidTarget",
            DatasetError::UnknownSpeaker(_) => "UnknownSpeaker",
            DatasetError::SessionFailed { .. } => "SessionFailed",
            DatasetError::Config(_) => "InvalidConfig",
            DatasetError::Acoustics(e) => e.code(),
            DatasetError::Geometry(e) => e.code(),
            DatasetError::Io(_) => "Io",
            DatasetError::Json(_) => "Json",
        }
    }
}

pub type Result<T> = std::result::Result<T, DatasetError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TtsKind {
    Mock,
    Http,
}

/// `[tts]` section of the run config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TtsConfig {
    pub backend: TtsKind,
    pub voice_es: String,
    pub voice_en: String,
    /// Defaults to `tts_cache/` inside the output directory.
    pub cache_dir: Option<PathBuf>,
    pub max_retries: u32,
    pub requests_per_second: f64,
}

impl Default for TtsConfig {
    fn default() -> Self {
        TtsConfig {
            backend: TtsKind::Mock,
            voice_es: "es-1".into(),
            voice_en: "en-1".into(),
            cache_dir: None,
            max_retries: 3,
            requests_per_second: 5.0,
        }
    }
}

impl TtsConfig {
    /// Mixed lines use the Spanish voice.
    pub fn voice_for(&self, language: Language) -> &str {
        match language {
            Language::En => &self.voice_en,
            Language::Es | Language::Mixed => &self.voice_es,
        }
    }
}

/// Scene config plus the `[tts]` section, read from one TOML file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetConfig {
    #[serde(flatten)]
    pub scene: SceneConfig,
    pub tts: TtsConfig,
}

impl DatasetConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: DatasetConfig = toml::from_str(text).map_err(|e| DatasetError::Config(e.to_string()))?;
        c.scene.validate()?;
        if !(c.tts.requests_per_second > 0.0) {
            return Err(DatasetError::Config("tts.requests_per_second must be > 0".into()));
        }
        Ok(c)
    }
}
