use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::schedule::schedule_session;
use super::text::{preprocess_transcript, LineWarning, TranscriptLine};
use super::tts::{write_atomic, MockTts, TtsBackend};
use super::{DatasetConfig, DatasetError, Result};
use crate::acoustics::{
    compute_rirs, is_noise_id, mix_at_snr, normalize_peak, render_sum_with, wav, AudioSignal, ImpulseResponse,
    Point3m, RoomSpec, SceneLayout,
};
use crate::geometry::json::GeometryJson;
use crate::geometry::SpeakerGeometry;

pub const MANIFEST_FILE: &str = "manifest.jsonl";

/// Words the background talkers babble.
const BABBLE_WORDS: &[&str] = &[
    "si", "no", "mira", "aqui", "okay", "que", "pues", "yeah", "ahora", "espera", "look", "dale",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SessionTranscript {
    pub name: String,
    pub lines: Vec<TranscriptLine>,
    pub warnings: Vec<LineWarning>,
}

impl SessionTranscript {
    pub fn parse(name: impl Into<String>, raw: &str) -> Self {
        let (lines, warnings) = preprocess_transcript(raw);
        SessionTranscript {
            name: name.into(),
            lines,
            warnings,
        }
    }
}

/// A transcript file is one session; a directory holds one session per
/// `*.txt` file, in file-name order.
pub fn load_transcripts(path: &Path) -> Result<Vec<SessionTranscript>> {
    let files: Vec<PathBuf> = if path.is_dir() {
        let mut v: Vec<PathBuf> = fs::read_dir(path)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "txt"))
            .collect();
        v.sort();
        v
    } else {
        vec![path.to_path_buf()]
    };
    files
        .iter()
        .map(|f| {
            let name = f.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            Ok(SessionTranscript::parse(name, &fs::read_to_string(f)?))
        })
        .collect()
}

/// Per-task seed: the first 8 bytes of SHA-256(master, index).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(index.to_le_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("8 bytes"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtteranceRef {
    pub speaker: String,
    pub text: String,
    pub raw_text: String,
    pub language: String,
    pub voice: String,
    pub start_s: f64,
    pub end_s: f64,
    pub onset_sample: usize,
    pub len_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedUtterance {
    pub line_index: usize,
    pub speaker: String,
    pub text: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseEvent {
    pub source: String,
    pub onset_s: f64,
    pub duration_s: f64,
    pub snr_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub session: String,
    pub index: usize,
    /// Relative to the manifest's directory.
    pub wav: String,
    pub sample_rate: u32,
    pub samples: usize,
    pub duration_s: f64,
    /// Length of the speech schedule, before the reverberant tail.
    pub scheduled_s: f64,
    pub master_seed: u64,
    pub seed: u64,
    pub overlap_target: f64,
    pub overlap_fraction: f64,
    pub normalization_gain: f64,
    pub normalized: bool,
    pub geometry: GeometryJson,
    pub room: RoomSpec,
    pub mic_m: Point3m,
    pub sources_m: BTreeMap<String, Point3m>,
    pub utterances: Vec<UtteranceRef>,
    pub failed_utterances: Vec<FailedUtterance>,
    pub noise_events: Vec<NoiseEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionFailure {
    pub session: String,
    pub index: usize,
    pub code: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
    pub failures: Vec<SessionFailure>,
}

impl DatasetManifest {
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&serde_json::to_string(e)?);
            out.push('\n');
        }
        Ok(out)
    }
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    fs::read_to_string(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}

pub struct SessionRender {
    pub entry: ManifestEntry,
    pub mixture: AudioSignal,
}

fn file_stem(index: usize, name: &str) -> String {
    let clean: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    format!("session_{index:03}_{clean}")
}

/// Seeded background talker: mock speech of random filler words, looped
/// to `len` samples.
fn babble(seed: u64, len: usize, sample_rate: u32) -> Result<AudioSignal> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tts = MockTts { sample_rate };
    let mut samples = Vec::with_capacity(len);
    while samples.len() < len {
        let n = rng.random_range(1..=3);
        let words: Vec<&str> = (0..n).map(|_| BABBLE_WORDS[rng.random_range(0..BABBLE_WORDS.len())]).collect();
        samples.extend(tts.synthesize(&words.join(" "), "background")?.samples);
        let pause = rng.random_range(0.05..0.3) * sample_rate as f64;
        samples.extend(std::iter::repeat_n(0.0, pause as usize));
    }
    samples.truncate(len);
    Ok(AudioSignal::new(samples, sample_rate))
}

/// Renders one session from its own seed. Same inputs, same bytes.
#[allow(clippy::too_many_arguments)]
pub fn render_session(
    session: &SessionTranscript,
    index: usize,
    master_seed: u64,
    geometry: &SpeakerGeometry,
    layout: &SceneLayout,
    rirs: &BTreeMap<String, ImpulseResponse>,
    config: &DatasetConfig,
    tts: &dyn TtsBackend,
) -> Result<SessionRender> {
    let seed = derive_seed(master_seed, index as u64);
    let fs = layout.room.sample_rate;
    let mixing = &config.scene.mixing;

    let mut audio = Vec::new();
    let mut failed = Vec::new();
    for (i, line) in session.lines.iter().enumerate() {
        if !layout.sources.contains_key(&line.speaker_id) {
            return Err(DatasetError::UnknownSpeaker(line.speaker_id.clone()));
        }
        let voice = config.tts.voice_for(line.language);
        match tts.synthesize(&line.normalized_text, voice) {
            Ok(a) if a.sample_rate == fs => audio.push((line, voice.to_string(), a)),
            Ok(a) => {
                return Err(DatasetError::Acoustics(crate::acoustics::AcousticsError::SampleRateMismatch {
                    expected: fs,
                    found: a.sample_rate,
                }))
            }
            Err(e) => {
                log::warn!("session {}: utterance {i} failed: {e}", session.name);
                failed.push(FailedUtterance {
                    line_index: i,
                    speaker: line.speaker_id.clone(),
                    text: line.normalized_text.clone(),
                    error: e.to_string(),
                });
            }
        }
    }
    if session.lines.is_empty() || 2 * failed.len() > session.lines.len() {
        return Err(DatasetError::SessionFailed {
            session: session.name.clone(),
            failed: failed.len(),
            total: session.lines.len(),
        });
    }

    let lens: Vec<(String, usize)> = audio.iter().map(|(l, _, a)| (l.speaker_id.clone(), a.len())).collect();
    let schedule = schedule_session(&lens, mixing.overlap_fraction, seed, fs)?;

    let mut tracks: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut utterances = Vec::with_capacity(audio.len());
    for ((line, voice, a), slot) in audio.iter().zip(&schedule.slots) {
        let track = tracks.entry(line.speaker_id.clone()).or_insert_with(|| vec![0.0; schedule.duration]);
        for (t, s) in track[slot.onset..].iter_mut().zip(&a.samples) {
            *t += s;
        }
        utterances.push(UtteranceRef {
            speaker: line.speaker_id.clone(),
            text: line.normalized_text.clone(),
            raw_text: line.raw_text.clone(),
            language: line.language.as_str().to_string(),
            voice: voice.clone(),
            start_s: slot.onset as f64 / fs as f64,
            end_s: slot.end() as f64 / fs as f64,
            onset_sample: slot.onset,
            len_samples: slot.len,
        });
    }
    let signals: BTreeMap<String, AudioSignal> =
        tracks.into_iter().map(|(k, v)| (k, AudioSignal::new(v, fs))).collect();
    let speech = render_sum_with(rirs, &signals, &BTreeMap::new(), fs)?;

    let noise_ids: Vec<&String> = layout.sources.keys().filter(|k| is_noise_id(k)).collect();
    let mut noise_events = Vec::new();
    let mixed = if noise_ids.is_empty() {
        speech
    } else {
        let mut noise_signals = BTreeMap::new();
        for (k, id) in noise_ids.iter().enumerate() {
            let s = derive_seed(seed, k as u64 + 1);
            noise_signals.insert((*id).clone(), babble(s, schedule.duration, fs)?);
            noise_events.push(NoiseEvent {
                source: (*id).clone(),
                onset_s: 0.0,
                duration_s: schedule.duration as f64 / fs as f64,
                snr_db: mixing.snr_db,
            });
        }
        let noise = render_sum_with(rirs, &noise_signals, &BTreeMap::new(), fs)?;
        mix_at_snr(&speech, &noise, mixing.snr_db)?
    };
    let mixture = normalize_peak(mixed);

    let entry = ManifestEntry {
        session: session.name.clone(),
        index,
        wav: format!("{}.wav", file_stem(index, &session.name)),
        sample_rate: fs,
        samples: mixture.signal.len(),
        duration_s: mixture.signal.duration_s(),
        scheduled_s: schedule.duration as f64 / fs as f64,
        master_seed,
        seed,
        overlap_target: mixing.overlap_fraction,
        overlap_fraction: schedule.overlap_fraction(),
        normalization_gain: mixture.gain,
        normalized: mixture.normalized(),
        geometry: GeometryJson::from(geometry),
        room: layout.room,
        mic_m: layout.mic,
        sources_m: layout.sources.clone(),
        utterances,
        failed_utterances: failed,
        noise_events,
    };
    Ok(SessionRender {
        entry,
        mixture: mixture.signal,
    })
}

/// Renders every session in parallel, writes one WAV per session and
/// `manifest.jsonl` into `out_dir`. Sessions with more than half of their
/// utterances failing are reported in `failures` instead of the manifest.
pub fn build_dataset(
    sessions: &[SessionTranscript],
    geometry: &SpeakerGeometry,
    config: &DatasetConfig,
    master_seed: u64,
    out_dir: &Path,
    tts: &dyn TtsBackend,
) -> Result<DatasetManifest> {
    for s in sessions {
        for l in &s.lines {
            if !geometry.mouths.contains_key(&l.speaker_id) {
                return Err(DatasetError::UnknownSpeaker(l.speaker_id.clone()));
            }
        }
    }
    let room = config.scene.room.to_spec()?;
    let layout = SceneLayout::from_geometry(geometry, room, &config.scene.placement)?;
    let rirs = compute_rirs(&layout)?;
    fs::create_dir_all(out_dir)?;

    let results: Vec<Result<SessionRender>> = sessions
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let r = render_session(s, i, master_seed, geometry, &layout, &rirs, config, tts)?;
            write_atomic(&out_dir.join(&r.entry.wav), &wav::encode(&r.mixture)?)?;
            Ok(r)
        })
        .collect();

    let mut manifest = DatasetManifest::default();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(r) => manifest.entries.push(r.entry),
            Err(e @ (DatasetError::SessionFailed { .. } | DatasetError::InfeasibleOverlap { .. })) => {
                log::error!("session {} failed: {e}", sessions[i].name);
                manifest.failures.push(SessionFailure {
                    session: sessions[i].name.clone(),
                    index: i,
                    code: e.code().to_string(),
                    error: e.to_string(),
                });
            }
            Err(e) => return Err(e),
        }
    }
    write_atomic(&out_dir.join(MANIFEST_FILE), manifest.to_jsonl()?.as_bytes())?;
    Ok(manifest)
}
