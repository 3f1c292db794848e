//! Seeded stand-in transcripts for offline runs and tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tts::MOCK_SECONDS_PER_CHAR;

const SPANISH: &[&str] = &[
    "uno", "dos", "tres", "cuatro", "cinco", "cero", "computadora", "número", "¿cuál", "es", "el", "la", "mira",
    "aquí", "pon", "ahora", "sí", "no", "pues", "otro", "código", "la pantalla", "vamos",
];
const ENGLISH: &[&str] = &[
    "zero", "one", "two", "three", "computer", "okay", "print", "the", "next", "loop", "what", "is", "this",
];

/// "S0: ..." lines for `speakers` speakers whose mock speech (80 ms per
/// character) adds up to at least `seconds`. Mostly Spanish with some
/// English and code-switched lines.
pub fn synthetic_transcript(seed: u64, seconds: f64, speakers: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let speakers = speakers.max(1);
    let mut out = String::new();
    let mut spoken = 0.0;
    while spoken < seconds {
        let speaker = rng.random_range(0..speakers);
        let n = rng.random_range(1..=5);
        let roll: f64 = rng.random();
        let words: Vec<&str> = (0..n)
            .map(|_| {
                let english = if roll < 0.6 { rng.random_bool(0.05) } else if roll < 0.8 { true } else { rng.random_bool(0.5) };
                if english {
                    ENGLISH[rng.random_range(0..ENGLISH.len())]
                } else {
                    SPANISH[rng.random_range(0..SPANISH.len())]
                }
            })
            .collect();
        let mut line = words.join(" ");
        if line.starts_with('¿') {
            line.push('?');
        } else if rng.random_bool(0.3) {
            line.push('.');
        }
        let chars = super::normalize(&line).chars().count();
        spoken += chars as f64 * MOCK_SECONDS_PER_CHAR;
        out.push_str(&format!("S{speaker}: {line}\n"));
    }
    out
}
