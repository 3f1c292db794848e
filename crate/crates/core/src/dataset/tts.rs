//! Speech synthesis backends: an offline mock, a disk cache, and a thin
//! HTTP client for a text-to-speech service.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};

use super::{DatasetError, Result};
use crate::acoustics::{wav, AudioSignal};

/// Mock speech length per character of normalized text.
pub const MOCK_SECONDS_PER_CHAR: f64 = 0.080;

pub const ENDPOINT_ENV: &str = "CROSSROOM_TTS_ENDPOINT";
pub const API_KEY_ENV: &str = "CROSSROOM_TTS_API_KEY";

pub trait TtsBackend: Send + Sync {
    /// Mono audio at the backend's native rate.
    fn synthesize(&self, text: &str, voice: &str) -> Result<AudioSignal>;
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn digest(parts: &[&[u8]]) -> [u8; 32] {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    let mut out = [0u8; 32];
    out.copy_from_slice(&h.finalize());
    out
}

/// Cache key: SHA-256 over (normalized text, voice, sample rate).
pub fn cache_key(text: &str, voice: &str, sample_rate: u32) -> String {
    hex(&digest(&[text.as_bytes(), voice.as_bytes(), &sample_rate.to_le_bytes()]))
}

/// Deterministic stand-in for a speech service: one 80 ms tone per
/// character, pitch drawn from a hash of (text, voice), silence for spaces.
#[derive(Debug, Clone)]
pub struct MockTts {
    pub sample_rate: u32,
}

impl Default for MockTts {
    fn default() -> Self {
        MockTts { sample_rate: 16_000 }
    }
}

impl TtsBackend for MockTts {
    fn synthesize(&self, text: &str, voice: &str) -> Result<AudioSignal> {
        if text.trim().is_empty() {
            return Err(DatasetError::EmptyText);
        }
        let fs = self.sample_rate as f64;
        let seg = (MOCK_SECONDS_PER_CHAR * fs).round() as usize;
        let h = digest(&[text.as_bytes(), voice.as_bytes()]);
        let fade = (seg / 10).max(1);
        let mut samples = Vec::with_capacity(seg * text.chars().count());
        for (i, c) in text.chars().enumerate() {
            if c == ' ' {
                samples.extend(std::iter::repeat_n(0.0, seg));
                continue;
            }
            let f0 = 110.0 + (h[i % 32] as f64) + 3.0 * ((c as u32 % 64) as f64);
            for n in 0..seg {
                let t = n as f64 / fs;
                let env = (n.min(seg - 1 - n) as f64 / fade as f64).min(1.0);
                let v = (2.0 * PI * f0 * t).sin() + 0.5 * (4.0 * PI * f0 * t).sin() + 0.25 * (6.0 * PI * f0 * t).sin();
                samples.push(0.25 * env * v);
            }
        }
        Ok(AudioSignal::new(samples, self.sample_rate))
    }
}

/// Band-limited resampling with a Hann-windowed sinc, 16 zero crossings per side.
pub fn resample(signal: &AudioSignal, target_rate: u32) -> AudioSignal {
    if signal.sample_rate == target_rate || signal.is_empty() {
        return AudioSignal::new(signal.samples.clone(), target_rate);
    }
    let ratio = target_rate as f64 / signal.sample_rate as f64;
    let cutoff = ratio.min(1.0);
    let half = 16.0 / cutoff;
    let out_len = (signal.len() as f64 * ratio).round() as usize;
    let x = &signal.samples;
    let samples = (0..out_len)
        .map(|n| {
            let t = n as f64 / ratio;
            let lo = (t - half).ceil().max(0.0) as usize;
            let hi = ((t + half).floor() as usize).min(x.len() - 1);
            let mut acc = 0.0;
            for (k, xv) in x.iter().enumerate().take(hi + 1).skip(lo) {
                let d = t - k as f64;
                let arg = PI * cutoff * d;
                let sinc = if arg == 0.0 { 1.0 } else { arg.sin() / arg };
                let w = 0.5 * (1.0 + (PI * d / half).cos());
                acc += xv * cutoff * sinc * w;
            }
            acc
        })
        .collect();
    AudioSignal::new(samples, target_rate)
}

/// Serves audio from `dir` when present; otherwise calls the backend,
/// resamples to `sample_rate` and stores the 16-bit WAV. Returned audio is
/// always the stored (quantized) version, so hits and misses agree exactly.
pub struct CachedTts<B> {
    backend: B,
    dir: PathBuf,
    sample_rate: u32,
    calls: AtomicUsize,
}

impl<B: TtsBackend> CachedTts<B> {
    pub fn new(backend: B, dir: impl Into<PathBuf>, sample_rate: u32) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(CachedTts {
            backend,
            dir,
            sample_rate,
            calls: AtomicUsize::new(0),
        })
    }

    /// Number of requests that reached the backend.
    pub fn backend_calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn path_for(&self, text: &str, voice: &str) -> PathBuf {
        self.dir.join(format!("{}.wav", cache_key(text, voice, self.sample_rate)))
    }
}

impl<B: TtsBackend> TtsBackend for CachedTts<B> {
    fn synthesize(&self, text: &str, voice: &str) -> Result<AudioSignal> {
        if text.trim().is_empty() {
            return Err(DatasetError::EmptyText);
        }
        let path = self.path_for(text, voice);
        if let Ok(bytes) = fs::read(&path) {
            match wav::decode(&bytes) {
                Ok(s) if s.sample_rate == self.sample_rate => return Ok(s),
                _ => log::warn!("ignoring unreadable cache entry {}", path.display()),
            }
        }
        self.calls.fetch_add(1, Ordering::SeqCst);
        let audio = resample(&self.backend.synthesize(text, voice)?, self.sample_rate);
        let bytes = wav::encode(&audio)?;
        write_atomic(&path, &bytes)?;
        Ok(wav::decode(&bytes)?)
    }
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    static COUNTER: AtomicUsize = AtomicUsize::new(0);
    let n = COUNTER.fetch_add(1, Ordering::Relaxed);
    let tmp = path.with_extension(format!("tmp{}.{n}", std::process::id()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

#[derive(Debug, Clone)]
pub struct HttpTtsConfig {
    pub endpoint: String,
    pub api_key: Option<String>,
    pub max_retries: u32,
    pub initial_backoff: Duration,
    /// Request-rate ceiling; `None` for unlimited.
    pub max_requests_per_second: Option<f64>,
    pub timeout: Duration,
}

impl HttpTtsConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        HttpTtsConfig {
            endpoint: endpoint.into(),
            api_key: None,
            max_retries: 3,
            initial_backoff: Duration::from_millis(250),
            max_requests_per_second: Some(5.0),
            timeout: Duration::from_secs(30),
        }
    }

    /// Endpoint from `CROSSROOM_TTS_ENDPOINT`, key from `CROSSROOM_TTS_API_KEY`.
    pub fn from_env() -> Result<Self> {
        let endpoint = std::env::var(ENDPOINT_ENV)
            .map_err(|_| DatasetError::Config(format!("{ENDPOINT_ENV} is not set")))?;
        let mut c = HttpTtsConfig::new(endpoint);
        c.api_key = std::env::var(API_KEY_ENV).ok();
        Ok(c)
    }
}

/// POSTs `{"text", "voice"}` as JSON and expects a PCM WAV body back.
/// 503 maps to ServiceUnavailable and 429 to QuotaExceeded; both are
/// retried with doubling backoff before giving up.
pub struct HttpTts {
    config: HttpTtsConfig,
    client: reqwest::blocking::Client,
    last_request: Mutex<Option<Instant>>,
}

impl HttpTts {
    pub fn new(config: HttpTtsConfig) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| DatasetError::Config(e.to_string()))?;
        Ok(HttpTts {
            config,
            client,
            last_request: Mutex::new(None),
        })
    }

    fn throttle(&self) {
        let Some(rps) = self.config.max_requests_per_second else {
            return;
        };
        let gap = Duration::from_secs_f64(1.0 / rps);
        let mut last = self.last_request.lock().expect("rate limiter lock");
        if let Some(t) = *last {
            let since = t.elapsed();
            if since < gap {
                std::thread::sleep(gap - since);
            }
        }
        *last = Some(Instant::now());
    }

    fn attempt(&self, text: &str, voice: &str) -> Result<AudioSignal> {
        self.throttle();
        let body = serde_json::to_vec(&serde_json::json!({ "text": text, "voice": voice }))?;
        let mut req = self
            .client
            .post(&self.config.endpoint)
            .header(reqwest::header::CONTENT_TYPE, "application/json")
            .body(body);
        if let Some(key) = &self.config.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| DatasetError::ServiceUnavailable(e.to_string()))?;
        let status = resp.status().as_u16();
        match status {
            200..=299 => {
                let bytes = resp.bytes().map_err(|e| DatasetError::ServiceUnavailable(e.to_string()))?;
                Ok(wav::decode(&bytes)?)
            }
            429 => Err(DatasetError::QuotaExceeded(format!("HTTP {status}"))),
            503 => Err(DatasetError::ServiceUnavailable(format!("HTTP {status}"))),
            _ => Err(DatasetError::Service(format!("HTTP {status}"))),
        }
    }
}

impl TtsBackend for HttpTts {
    fn synthesize(&self, text: &str, voice: &str) -> Result<AudioSignal> {
        if text.trim().is_empty() {
            return Err(DatasetError::EmptyText);
        }
        let mut backoff = self.config.initial_backoff;
        let mut attempt = 0;
        loop {
            match self.attempt(text, voice) {
                Err(e @ (DatasetError::ServiceUnavailable(_) | DatasetError::QuotaExceeded(_)))
                    if attempt < self.config.max_retries =>
                {
                    log::warn!("tts request failed ({e}); retrying in {backoff:?}");
                    std::thread::sleep(backoff);
                    backoff *= 2;
                    attempt += 1;
                }
                other => return other,
            }
        }
    }
}
