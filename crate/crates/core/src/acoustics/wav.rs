//! Mono 16-bit little-endian PCM WAV.
//!
//! Samples are clipped to [-1, 1] and stored as `round(x * 32767)`, so 1.0
//! becomes 32767 and the round trip is off by at most half a step.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{AcousticsError, AudioSignal, Result};

const FULL_SCALE: f64 = 32767.0;
const FORMAT_PCM: u16 = 1;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

pub fn encode(signal: &AudioSignal) -> Result<Vec<u8>> {
    signal.validate()?;
    let data_len = signal.len() * 2;
    let riff_len = u32::try_from(36 + data_len)
        .map_err(|_| AcousticsError::InvalidSignal("too long for a WAV file".into()))?;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&riff_len.to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&signal.sample_rate.to_le_bytes());
    out.extend_from_slice(&(signal.sample_rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for s in &signal.samples {
        out.extend_from_slice(&quantize(*s).to_le_bytes());
    }
    Ok(out)
}

pub fn quantize(x: f64) -> i16 {
    (x.clamp(-1.0, 1.0) * FULL_SCALE).round() as i16
}

pub fn decode(bytes: &[u8]) -> Result<AudioSignal> {
    let malformed = |m: &str| AcousticsError::MalformedWav(m.to_string());
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(malformed("missing RIFF/WAVE header"));
    }
    let mut pos = 12;
    let mut format: Option<(u16, u16, u32, u16)> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body_start = pos + 8;
        let body_end = body_start.checked_add(size).ok_or_else(|| malformed("chunk size overflow"))?;
        match id {
            b"fmt " => {
                if size < 16 || body_end > bytes.len() {
                    return Err(malformed("short fmt chunk"));
                }
                let b = &bytes[body_start..body_end];
                let u16_at = |i: usize| u16::from_le_bytes([b[i], b[i + 1]]);
                let mut tag = u16_at(0);
                if tag == FORMAT_EXTENSIBLE {
                    if size < 40 {
                        return Err(malformed("short extensible fmt chunk"));
                    }
                    tag = u16_at(24);
                }
                let rate = u32::from_le_bytes(b[4..8].try_into().unwrap());
                format = Some((tag, u16_at(2), rate, u16_at(14)));
            }
            b"data" => {
                let (tag, channels, rate, bits) = format.ok_or_else(|| malformed("data before fmt"))?;
                if tag != FORMAT_PCM {
                    return Err(AcousticsError::UnsupportedEncoding(format!("format tag {tag:#x}")));
                }
                if bits != 16 {
                    return Err(AcousticsError::UnsupportedEncoding(format!("{bits}-bit samples")));
                }
                if channels != 1 {
                    return Err(AcousticsError::UnsupportedEncoding(format!("{channels} channels")));
                }
                if rate == 0 {
                    return Err(malformed("sample rate 0"));
                }
                // tolerate a data size running past EOF, as some writers leave it unset
                let end = body_end.min(bytes.len());
                let body = &bytes[body_start..end];
                if !body.len().is_multiple_of(2) {
                    return Err(malformed("odd data length"));
                }
                let samples = body
                    .chunks_exact(2)
                    .map(|c| i16::from_le_bytes([c[0], c[1]]) as f64 / FULL_SCALE)
                    .collect();
                return Ok(AudioSignal::new(samples, rate));
            }
            _ => {}
        }
        // chunks are word aligned
        pos = body_end + (size & 1);
    }
    Err(malformed("no data chunk"))
}

pub fn write_wav(path: impl AsRef<Path>, signal: &AudioSignal) -> Result<()> {
    let bytes = encode(signal)?;
    let mut f = fs::File::create(path)?;
    f.write_all(&bytes)?;
    Ok(())
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioSignal> {
    decode(&fs::read(path)?)
}
