//! Stand-in for the phoneme recognizer, so the evaluation chain can run
//! end to end on simulated sessions.
//!
//! Each reference word is turned into phonemes and corrupted at a rate
//! that grows as its utterance gets quieter in the mixture's Mel energy
//! and as more of it is overlapped by other talkers. It is a seeded noise
//! model, not a speech recognizer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lexicon::{classify_detailed, KeywordLexicon};
use super::mel::{mel_spectrogram, MelConfig};
use super::phonemes::{pronounce, symbols, PHONEMES};
use super::Result;
use crate::acoustics::AudioSignal;
use crate::dataset::{derive_seed, Language, ManifestEntry};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub mel: MelConfig,
    /// Per-phoneme error probability for a loud, unoverlapped utterance.
    pub base_error: f64,
    /// Error probability for a silent, fully overlapped one.
    pub max_error: f64,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            mel: MelConfig::default(),
            base_error: 0.08,
            max_error: 0.6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodedWord {
    pub utterance: usize,
    pub word: String,
    pub true_label: String,
    pub hypothesis: String,
    pub predicted: String,
    pub distance: usize,
    pub error_rate: f64,
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let i = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[i]
}

fn overlap_share(entry: &ManifestEntry, i: usize) -> f64 {
    let u = &entry.utterances[i];
    let (a0, a1) = (u.onset_sample, u.onset_sample + u.len_samples);
    let mut spans: Vec<(usize, usize)> = entry
        .utterances
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, v)| (a0.max(v.onset_sample), a1.min(v.onset_sample + v.len_samples)))
        .filter(|(s, e)| s < e)
        .collect();
    spans.sort_unstable();
    let (mut covered, mut reach) = (0, a0);
    for (s, e) in spans {
        let s = s.max(reach);
        if e > s {
            covered += e - s;
            reach = e;
        }
    }
    if u.len_samples == 0 {
        0.0
    } else {
        covered as f64 / u.len_samples as f64
    }
}

fn corrupt(phonemes: &str, p: f64, rng: &mut ChaCha8Rng) -> String {
    let mut out: Vec<&str> = Vec::new();
    for s in symbols(phonemes) {
        if rng.random_bool(p) {
            match rng.random_range(0..3) {
                0 => out.push(PHONEMES[rng.random_range(0..PHONEMES.len())]),
                1 => {}
                _ => {
                    out.push(s);
                    out.push(PHONEMES[rng.random_range(0..PHONEMES.len())]);
                }
            }
        } else {
            out.push(s);
        }
    }
    out.join(" ")
}

/// Decodes every word of every utterance in `entry` against `mixture`
/// and classifies it. Deterministic given the entry's seed.
pub fn decode_session(
    mixture: &AudioSignal,
    entry: &ManifestEntry,
    lexicon: &KeywordLexicon,
    config: &DecoderConfig,
) -> Result<Vec<DecodedWord>> {
    let mel = mel_spectrogram(mixture, &config.mel)?;
    let frame_energy: Vec<f64> = mel.frames().map(|f| f.iter().sum::<f64>() / f.len() as f64).collect();
    let mut sorted = frame_energy.clone();
    sorted.sort_by(f64::total_cmp);
    let (floor, loud) = (percentile(&sorted, 0.1), percentile(&sorted, 0.9));
    let hop = config.mel.hop_samples(mixture.sample_rate);

    let mut out = Vec::new();
    for (i, u) in entry.utterances.iter().enumerate() {
        let first = (u.onset_sample / hop).min(mel.n_frames - 1);
        let last = ((u.onset_sample + u.len_samples) / hop).clamp(first + 1, mel.n_frames);
        let level = frame_energy[first..last].iter().sum::<f64>() / (last - first) as f64;
        let clarity = if loud > floor { ((level - floor) / (loud - floor)).clamp(0.0, 1.0) } else { 1.0 };
        let hardness = 0.5 * (1.0 - clarity) + 0.5 * overlap_share(entry, i);
        let p = config.base_error + (config.max_error - config.base_error) * hardness;

        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(entry.seed, i as u64));
        let language = Language::parse(&u.language).unwrap_or(Language::Es);
        for word in u.text.split_whitespace() {
            let reference = pronounce(word, language);
            let hypothesis = corrupt(&reference, p, &mut rng);
            let c = classify_detailed(&hypothesis, lexicon);
            out.push(DecodedWord {
                utterance: i,
                word: word.to_string(),
                true_label: if lexicon.contains(word) { word.to_string() } else { lexicon.rejection.clone() },
                hypothesis,
                predicted: c.label,
                distance: c.distance,
                error_rate: p,
            });
        }
    }
    Ok(out)
}
