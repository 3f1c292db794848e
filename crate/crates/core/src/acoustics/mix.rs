use std::collections::BTreeMap;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::rir::{compute_rir, ImpulseResponse};
use super::{AcousticsError, Result, SceneLayout};

/// Peak level a mixture is scaled to when it would otherwise clip.
pub const NORMALIZED_PEAK: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioSignal {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl AudioSignal {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Self {
        AudioSignal { samples, sample_rate }
    }

    pub fn silence(len: usize, sample_rate: u32) -> Self {
        AudioSignal::new(vec![0.0; len], sample_rate)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.abs()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_rate == 0 {
            return Err(AcousticsError::InvalidSignal("sample rate 0".into()));
        }
        if let Some(i) = self.samples.iter().position(|s| !s.is_finite()) {
            return Err(AcousticsError::InvalidSignal(format!("non-finite sample at {i}")));
        }
        Ok(())
    }

    fn require_rate(&self, expected: u32) -> Result<()> {
        if self.sample_rate != expected {
            return Err(AcousticsError::SampleRateMismatch {
                expected,
                found: self.sample_rate,
            });
        }
        Ok(())
    }
}

/// Mean square of the samples; 0 for an empty slice.
pub fn power(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().map(|s| s * s).sum::<f64>() / samples.len() as f64
}

/// Full linear convolution. Short kernels run directly; otherwise FFT
/// overlap-add, with two real input blocks packed into each complex
/// transform (the kernel is real, so the halves do not mix).
pub fn convolve(x: &[f64], h: &[f64]) -> Vec<f64> {
    if x.is_empty() || h.is_empty() {
        return Vec::new();
    }
    let out_len = x.len() + h.len() - 1;
    if x.len().min(h.len()) <= 32 {
        let mut y = vec![0.0; out_len];
        for (i, a) in x.iter().enumerate() {
            for (j, b) in h.iter().enumerate() {
                y[i + j] += a * b;
            }
        }
        return y;
    }
    // the longer input is streamed in blocks, the shorter is the kernel
    let (x, h) = if x.len() >= h.len() { (x, h) } else { (h, x) };
    let n = (4 * h.len()).next_power_of_two().max(4096).min(out_len.next_power_of_two());
    let block = n - h.len() + 1;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let zero = Complex::new(0.0, 0.0);

    let mut kernel: Vec<Complex<f64>> = h.iter().map(|&r| Complex::new(r, 0.0)).collect();
    kernel.resize(n, zero);
    fwd.process(&mut kernel);
    let scale = 1.0 / n as f64;
    kernel.iter_mut().for_each(|k| *k *= scale);

    let mut y = vec![0.0; out_len];
    let mut buf = vec![zero; n];
    let mut start = 0;
    while start < x.len() {
        let a = &x[start..(start + block).min(x.len())];
        let second = start + block;
        let b = if second < x.len() { &x[second..(second + block).min(x.len())] } else { &[][..] };
        buf.fill(zero);
        for (c, &v) in buf.iter_mut().zip(a) {
            c.re = v;
        }
        for (c, &v) in buf.iter_mut().zip(b) {
            c.im = v;
        }
        fwd.process(&mut buf);
        for (c, k) in buf.iter_mut().zip(&kernel) {
            *c *= k;
        }
        inv.process(&mut buf);
        for (o, c) in y[start..].iter_mut().zip(&buf[..a.len() + h.len() - 1]) {
            *o += c.re;
        }
        if !b.is_empty() {
            for (o, c) in y[second..].iter_mut().zip(&buf[..b.len() + h.len() - 1]) {
                *o += c.im;
            }
        }
        start += 2 * block;
    }
    y
}

/// RIRs for every source in `layout`, computed in parallel.
pub fn compute_rirs(layout: &SceneLayout) -> Result<BTreeMap<String, ImpulseResponse>> {
    layout
        .sources
        .par_iter()
        .map(|(id, _)| Ok((id.clone(), compute_rir(layout, id)?)))
        .collect()
}

/// Each source's signal convolved with its RIR and delayed by its onset,
/// keyed by source id. Sources run in parallel.
pub fn render_tracks(
    layout: &SceneLayout,
    signals: &BTreeMap<String, AudioSignal>,
    onsets: &BTreeMap<String, usize>,
) -> Result<BTreeMap<String, (usize, Vec<f64>)>> {
    let rirs = signals
        .keys()
        .map(|id| Ok((id.clone(), compute_rir(layout, id)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    tracks_with(&rirs, signals, onsets, layout.room.sample_rate)
}

fn tracks_with(
    rirs: &BTreeMap<String, ImpulseResponse>,
    signals: &BTreeMap<String, AudioSignal>,
    onsets: &BTreeMap<String, usize>,
    sample_rate: u32,
) -> Result<BTreeMap<String, (usize, Vec<f64>)>> {
    for s in signals.values() {
        s.validate()?;
        s.require_rate(sample_rate)?;
    }
    signals
        .par_iter()
        .map(|(id, sig)| {
            let rir = rirs.get(id).ok_or_else(|| AcousticsError::UnknownSource(id.clone()))?;
            let onset = onsets.get(id).copied().unwrap_or(0);
            Ok((id.clone(), (onset, convolve(&sig.samples, &rir.taps))))
        })
        .collect()
}

/// Sum of all rendered tracks before any normalization.
pub fn render_sum(
    layout: &SceneLayout,
    signals: &BTreeMap<String, AudioSignal>,
    onsets: &BTreeMap<String, usize>,
) -> Result<AudioSignal> {
    let tracks = render_tracks(layout, signals, onsets)?;
    Ok(sum_tracks(&tracks, layout.room.sample_rate))
}

/// Like [`render_sum`] with precomputed RIRs (see [`compute_rirs`]).
pub fn render_sum_with(
    rirs: &BTreeMap<String, ImpulseResponse>,
    signals: &BTreeMap<String, AudioSignal>,
    onsets: &BTreeMap<String, usize>,
    sample_rate: u32,
) -> Result<AudioSignal> {
    let tracks = tracks_with(rirs, signals, onsets, sample_rate)?;
    Ok(sum_tracks(&tracks, sample_rate))
}

fn sum_tracks(tracks: &BTreeMap<String, (usize, Vec<f64>)>, sample_rate: u32) -> AudioSignal {
    let len = tracks.values().map(|(o, t)| o + t.len()).max().unwrap_or(0);
    let mut out = vec![0.0; len];
    // BTreeMap order keeps the summation order fixed
    for (onset, track) in tracks.values() {
        for (o, t) in out[*onset..].iter_mut().zip(track) {
            *o += t;
        }
    }
    AudioSignal::new(out, sample_rate)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    pub signal: AudioSignal,
    /// Gain applied by peak normalization; 1.0 when none was needed.
    pub gain: f64,
}

impl Mixture {
    pub fn normalized(&self) -> bool {
        self.gain != 1.0
    }
}

/// Renders all sources and scales the result to a 0.9 peak if it would clip.
pub fn render_mixture(
    layout: &SceneLayout,
    signals: &BTreeMap<String, AudioSignal>,
    onsets: &BTreeMap<String, usize>,
) -> Result<Mixture> {
    Ok(normalize_peak(render_sum(layout, signals, onsets)?))
}

pub fn normalize_peak(mut signal: AudioSignal) -> Mixture {
    let peak = signal.peak();
    let gain = if peak > 1.0 { NORMALIZED_PEAK / peak } else { 1.0 };
    if gain != 1.0 {
        signal.samples.iter_mut().for_each(|s| *s *= gain);
    }
    Mixture { signal, gain }
}

/// Adds `noise` scaled so that signal power over noise power, both measured
/// where the two overlap, is `snr_db`. The output has the signal's length.
pub fn mix_at_snr(signal: &AudioSignal, noise: &AudioSignal, snr_db: f64) -> Result<AudioSignal> {
    signal.validate()?;
    noise.validate()?;
    noise.require_rate(signal.sample_rate)?;
    if !snr_db.is_finite() {
        return Err(AcousticsError::InvalidSignal(format!("snr {snr_db} dB")));
    }
    let n = signal.len().min(noise.len());
    let p_noise = power(&noise.samples[..n]);
    if p_noise == 0.0 {
        return Err(AcousticsError::SilentNoise);
    }
    let p_signal = power(&signal.samples[..n]);
    let g = (p_signal / (p_noise * 10f64.powf(snr_db / 10.0))).sqrt();
    let mut out = signal.samples.clone();
    for (o, v) in out.iter_mut().zip(&noise.samples) {
        *o += g * v;
    }
    Ok(AudioSignal::new(out, signal.sample_rate))
}
