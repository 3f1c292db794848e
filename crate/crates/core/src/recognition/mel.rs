//! Log Mel-spectrogram front end.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{RecognitionError, Result};
use crate::acoustics::AudioSignal;

/// Floor applied before the logarithm.
pub const LOG_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MelConfig {
    pub n_bands: usize,
    pub frame_length_ms: f64,
    pub hop_ms: f64,
    pub f_min_hz: f64,
    /// `None` means half the sample rate.
    pub f_max_hz: Option<f64>,
}

impl Default for MelConfig {
    fn default() -> Self {
        MelConfig {
            n_bands: 40,
            frame_length_ms: 25.0,
            hop_ms: 10.0,
            f_min_hz: 0.0,
            f_max_hz: None,
        }
    }
}

impl MelConfig {
    pub fn window_samples(&self, sample_rate: u32) -> usize {
        (self.frame_length_ms * 1e-3 * sample_rate as f64).round() as usize
    }

    pub fn hop_samples(&self, sample_rate: u32) -> usize {
        (self.hop_ms * 1e-3 * sample_rate as f64).round() as usize
    }

    /// FFT size: the window rounded up to a power of two.
    pub fn fft_size(&self, sample_rate: u32) -> usize {
        self.window_samples(sample_rate).next_power_of_two()
    }

    fn validate(&self, sample_rate: u32) -> Result<()> {
        let nyquist = sample_rate as f64 / 2.0;
        let f_max = self.f_max_hz.unwrap_or(nyquist);
        if self.n_bands == 0
            || self.window_samples(sample_rate) < 2
            || self.hop_samples(sample_rate) == 0
            || !(0.0..f_max).contains(&self.f_min_hz)
            || f_max > nyquist
        {
            return Err(RecognitionError::InvalidConfig(format!("{self:?} at {sample_rate} Hz")));
        }
        Ok(())
    }
}

pub fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

pub fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// `n_bands + 2` frequencies equally spaced on the Mel scale; band `b`
/// rises from edge `b`, peaks at `b + 1` and falls to `b + 2`.
pub fn band_edges_hz(n_bands: usize, f_min: f64, f_max: f64) -> Vec<f64> {
    let (lo, hi) = (hz_to_mel(f_min), hz_to_mel(f_max));
    (0..n_bands + 2)
        .map(|i| mel_to_hz(lo + (hi - lo) * i as f64 / (n_bands + 1) as f64))
        .collect()
}

/// Triangular filters over the `n_fft / 2 + 1` bins, unnormalized (peak 1).
pub fn mel_filterbank(config: &MelConfig, sample_rate: u32) -> Vec<Vec<f64>> {
    let n_fft = config.fft_size(sample_rate);
    let f_max = config.f_max_hz.unwrap_or(sample_rate as f64 / 2.0);
    let edges = band_edges_hz(config.n_bands, config.f_min_hz, f_max);
    let bin_hz = sample_rate as f64 / n_fft as f64;
    (0..config.n_bands)
        .map(|b| {
            let (l, c, r) = (edges[b], edges[b + 1], edges[b + 2]);
            (0..n_fft / 2 + 1)
                .map(|k| {
                    let f = k as f64 * bin_hz;
                    if f <= l || f >= r {
                        0.0
                    } else if f <= c {
                        (f - l) / (c - l)
                    } else {
                        (r - f) / (r - c)
                    }
                })
                .collect()
        })
        .collect()
}

fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos())
        .collect()
}

/// Frames x bands, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MelSpectrogram {
    pub data: Vec<f64>,
    pub n_frames: usize,
    pub n_bands: usize,
    pub frame_length_ms: f64,
    pub hop_ms: f64,
    pub sample_rate: u32,
}

impl MelSpectrogram {
    pub fn frame(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_bands..(i + 1) * self.n_bands]
    }

    pub fn frames(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n_bands.max(1))
    }

    /// Index of the loudest band in frame `i`.
    pub fn argmax_band(&self, i: usize) -> usize {
        let f = self.frame(i);
        (0..f.len()).fold(0, |best, b| if f[b] > f[best] { b } else { best })
    }
}

/// Mel filterbank magnitudes before the logarithm, frames x bands.
pub fn mel_energies(signal: &AudioSignal, config: &MelConfig) -> Result<(Vec<f64>, usize)> {
    let fs = signal.sample_rate;
    config.validate(fs)?;
    let win = config.window_samples(fs);
    let hop = config.hop_samples(fs);
    if signal.len() < win {
        return Err(RecognitionError::SignalTooShort {
            samples: signal.len(),
            window: win,
        });
    }
    let n_fft = config.fft_size(fs);
    let n_frames = (signal.len() - win) / hop + 1;
    let window = hann(win);
    let bank = mel_filterbank(config, fs);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n_fft);

    let mut out = Vec::with_capacity(n_frames * config.n_bands);
    let mut buf = vec![Complex::new(0.0, 0.0); n_fft];
    let mut mag = vec![0.0; n_fft / 2 + 1];
    for t in 0..n_frames {
        let frame = &signal.samples[t * hop..t * hop + win];
        buf.fill(Complex::new(0.0, 0.0));
        for ((b, x), w) in buf.iter_mut().zip(frame).zip(&window) {
            b.re = x * w;
        }
        fft.process(&mut buf);
        for (m, b) in mag.iter_mut().zip(&buf) {
            *m = b.norm();
        }
        out.extend(bank.iter().map(|f| f.iter().zip(&mag).map(|(a, b)| a * b).sum::<f64>()));
    }
    Ok((out, n_frames))
}

/// Hann-windowed magnitude STFT, triangular HTK Mel filterbank over
/// `[f_min, f_max]`, natural log floored at [`LOG_FLOOR`].
pub fn mel_spectrogram(signal: &AudioSignal, config: &MelConfig) -> Result<MelSpectrogram> {
    let (energies, n_frames) = mel_energies(signal, config)?;
    Ok(MelSpectrogram {
        data: energies.into_iter().map(|e| e.max(LOG_FLOOR).ln()).collect(),
        n_frames,
        n_bands: config.n_bands,
        frame_length_ms: config.frame_length_ms,
        hop_ms: config.hop_ms,
        sample_rate: signal.sample_rate,
    })
}
