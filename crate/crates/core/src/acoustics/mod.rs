//! Shoebox room acoustics: image-source impulse responses, convolution,
//! cross-talk and noise mixing, and 16-bit PCM WAV files.
//!
//! Room coordinates are meters with the origin at one floor corner and the
//! room spanning `[0, L]` on each axis.

mod config;
mod image;
mod layout;
mod mix;
mod rir;
pub mod wav;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{Absorption, MixingConfig, PlacementConfig, RoomConfig, SceneConfig};
pub use image::{image_sources, ImageSource};
pub use layout::{is_noise_id, noise_id, SceneLayout};
pub use mix::{
    compute_rirs, convolve, mix_at_snr, normalize_peak, power, render_mixture, render_sum, render_sum_with, render_tracks,
    AudioSignal, Mixture, NORMALIZED_PEAK,
};
pub use rir::{compute_rir, fractional_delay_tap, rir_between, ImpulseResponse, KERNEL_HALF_WIDTH, KERNEL_TAPS};
pub use wav::{read_wav, write_wav};

pub type Point3m = [f64; 3];

/// Meters per inch.
pub const METERS_PER_INCH: f64 = 0.0254;

#[derive(Debug, Error)]
pub enum AcousticsError {
    #[error("point {point:?} is not strictly inside the {dims:?} m room")]
    SourceOutsideRoom { point: Point3m, dims: Point3m },
    #[error("source {0} is within 1 mm of the microphone")]
    CoincidentSourceMic(String),
    #[error("sample rate mismatch: expected {expected} Hz, got {found} Hz")]
    SampleRateMismatch { expected: u32, found: u32 },
    #[error("noise signal has zero power")]
    SilentNoise,
    #[error("malformed WAV: {0}")]
    MalformedWav(String),
    #[error("unsupported WAV encoding: {0}")]
    UnsupportedEncoding(String),
    #[error("invalid room: {0}")]
    InvalidRoom(String),
    #[error("invalid signal: {0}")]
    InvalidSignal(String),
    #[error("unknown source {0}")]
    UnknownSource(String),
    #[error("invalid scene config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl AcousticsError {
    pub fn code(&self) -> &'static str {
        match self {
            AcousticsError::SourceOutsideRoom { .. } => "SourceOutsideRoom",
            AcousticsError::CoincidentSourceMic(_) => "CoincidentSourceMic",
            AcousticsError::SampleRateMismatch { .. } => "SampleRateMismatch",
            AcousticsError::SilentNoise => "SilentNoise",
            AcousticsError::MalformedWav(_) => "MalformedWav",
            AcousticsError::UnsupportedEncoding(_) => "UnsupportedEncoding",
            AcousticsError::InvalidRoom(_) => "InvalidRoom",
            AcousticsError::InvalidSignal(_) => "InvalidSignal",
            AcousticsError::UnknownSource(_) => "UnknownSource",
            AcousticsError::InvalidConfig(_) => "InvalidConfig",
            AcousticsError::Io(_) => "Io",
        }
    }
}

pub type Result<T> = std::result::Result<T, AcousticsError>;

/// Wall order used by `absorption`: x = 0, x = Lx, y = 0, y = Ly, z = 0 (floor), z = Lz (ceiling).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoomSpec {
    pub dimensions: Point3m,
    pub absorption: [f64; 6],
    pub max_order: u32,
    pub sample_rate: u32,
    pub speed_of_sound: f64,
}

impl Default for RoomSpec {
    /// A 6 x 5 x 3 m classroom.
    fn default() -> Self {
        RoomSpec {
            dimensions: [6.0, 5.0, 3.0],
            absorption: [0.35; 6],
            max_order: 10,
            sample_rate: 16_000,
            speed_of_sound: 343.0,
        }
    }
}

impl RoomSpec {
    pub fn anechoic(dimensions: Point3m) -> Self {
        RoomSpec {
            dimensions,
            absorption: [1.0; 6],
            max_order: 0,
            ..RoomSpec::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.dimensions.iter().all(|l| l.is_finite() && *l > 0.0) {
            return Err(AcousticsError::InvalidRoom(format!("dimensions {:?}", self.dimensions)));
        }
        if !self.absorption.iter().all(|a| (0.0..=1.0).contains(a)) {
            return Err(AcousticsError::InvalidRoom(format!("absorption {:?} outside [0, 1]", self.absorption)));
        }
        if self.sample_rate == 0 {
            return Err(AcousticsError::InvalidRoom("sample rate 0".into()));
        }
        if !(self.speed_of_sound.is_finite() && self.speed_of_sound > 0.0) {
            return Err(AcousticsError::InvalidRoom(format!("speed of sound {}", self.speed_of_sound)));
        }
        Ok(())
    }

    /// Pressure reflection coefficient per wall, sqrt(1 - alpha).
    pub fn reflection(&self) -> [f64; 6] {
        self.absorption.map(|a| (1.0 - a).max(0.0).sqrt())
    }

    pub fn contains(&self, p: Point3m) -> bool {
        p.iter().zip(&self.dimensions).all(|(x, l)| x.is_finite() && *x > 0.0 && x < l)
    }

    pub fn require_inside(&self, p: Point3m) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(AcousticsError::SourceOutsideRoom {
                point: p,
                dims: self.dimensions,
            })
        }
    }
}

pub(crate) fn distance(a: Point3m, b: Point3m) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}
