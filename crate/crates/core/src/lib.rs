//! Classroom speaker geometry, acoustic dataset synthesis and bilingual
//! keyword evaluation.
//!
//! - [`geometry`]: physical table size and speaker mouth positions from one
//!   annotated video frame, via cross-ratios, plus an equidistant baseline.
//! - [`acoustics`]: shoebox image-source room impulse responses, mixture
//!   rendering, SNR mixing and 16-bit PCM WAV I/O.
//! - [`dataset`]: transcript preprocessing, speech synthesis clients,
//!   cross-talk scheduling and reproducible corpus generation.
//! - [`recognition`]: Mel-spectrograms, Spanish G2P, the minimum edit
//!   distance keyword classifier and sensitivity/specificity scoring.

pub mod acoustics;
pub mod dataset;
pub mod geometry;
pub mod recognition;
