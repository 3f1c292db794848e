//! Cross-talk scheduling in whole samples.
//!
//! Utterances keep transcript order. Each consecutive pair from different
//! speakers may overlap by up to half the shorter of the two, which keeps
//! overlaps strictly pairwise; same-speaker pairs never overlap. A single
//! scale `f`, found by bisection, sets how much of each pair's allowance is
//! used, jittered per pair by the seed. Non-overlapping pairs get a seeded
//! 0.1 to 0.4 s pause.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DatasetError, Result};

/// Tolerance on the realized overlap fraction.
pub const OVERLAP_TOLERANCE: f64 = 0.05;
const GAP_RANGE_S: (f64, f64) = (0.1, 0.4);
const JITTER_RANGE: (f64, f64) = (0.6, 1.0);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub onset: usize,
    pub len: usize,
}

impl Slot {
    pub fn end(&self) -> usize {
        self.onset + self.len
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub slots: Vec<Slot>,
    pub duration: usize,
    /// Speech samples that coincide with another utterance, summed per utterance.
    pub overlapped_samples: usize,
    pub speech_samples: usize,
}

impl Schedule {
    pub fn overlap_fraction(&self) -> f64 {
        if self.speech_samples == 0 {
            0.0
        } else {
            self.overlapped_samples as f64 / self.speech_samples as f64
        }
    }
}

struct Plan {
    caps: Vec<usize>,
    jitter: Vec<f64>,
    gaps: Vec<usize>,
}

impl Plan {
    fn overlaps(&self, f: f64) -> Vec<usize> {
        self.caps
            .iter()
            .zip(&self.jitter)
            .map(|(&cap, &j)| ((f * j).min(1.0) * cap as f64).round() as usize)
            .collect()
    }

    fn fraction(&self, f: f64, speech: usize) -> f64 {
        2.0 * self.overlaps(f).iter().sum::<usize>() as f64 / speech as f64
    }
}

/// `utterances` are (speaker, length in samples) in transcript order.
pub fn schedule_session(
    utterances: &[(String, usize)],
    overlap_target: f64,
    seed: u64,
    sample_rate: u32,
) -> Result<Schedule> {
    if !(0.0..1.0).contains(&overlap_target) {
        return Err(DatasetError::InvalidTarget(overlap_target));
    }
    if utterances.is_empty() {
        return Ok(Schedule {
            slots: Vec::new(),
            duration: 0,
            overlapped_samples: 0,
            speech_samples: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = utterances.len() - 1;
    let mut plan = Plan {
        caps: Vec::with_capacity(pairs),
        jitter: Vec::with_capacity(pairs),
        gaps: Vec::with_capacity(pairs),
    };
    for w in utterances.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        plan.caps.push(if a.0 == b.0 { 0 } else { a.1.min(b.1) / 2 });
        plan.jitter.push(rng.random_range(JITTER_RANGE.0..=JITTER_RANGE.1));
        let gap_s = rng.random_range(GAP_RANGE_S.0..=GAP_RANGE_S.1);
        plan.gaps.push((gap_s * sample_rate as f64).round() as usize);
    }
    let speech: usize = utterances.iter().map(|u| u.1).sum();
    let f_max = 1.0 / JITTER_RANGE.0;

    let f = if overlap_target == 0.0 || speech == 0 {
        0.0
    } else {
        let reachable = plan.fraction(f_max, speech);
        if reachable + OVERLAP_TOLERANCE < overlap_target {
            return Err(DatasetError::InfeasibleOverlap {
                target: overlap_target,
                reachable,
            });
        }
        // smallest f reaching the target, then the closer side of the step
        let (mut lo, mut hi) = (0.0, f_max);
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if plan.fraction(mid, speech) >= overlap_target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let (flo, fhi) = (plan.fraction(lo, speech), plan.fraction(hi, speech));
        let best = if (overlap_target - flo).abs() < (fhi - overlap_target).abs() { lo } else { hi };
        let got = plan.fraction(best, speech);
        if (got - overlap_target).abs() > OVERLAP_TOLERANCE {
            return Err(DatasetError::InfeasibleOverlap {
                target: overlap_target,
                reachable: got,
            });
        }
        best
    };

    let overlaps = plan.overlaps(f);
    let mut slots = Vec::with_capacity(utterances.len());
    let mut onset = 0;
    for (i, u) in utterances.iter().enumerate() {
        if i > 0 {
            let prev_end: usize = slots.last().map(Slot::end).unwrap_or(0);
            onset = match overlaps[i - 1] {
                0 => prev_end + plan.gaps[i - 1],
                o => prev_end - o,
            };
        }
        slots.push(Slot { onset, len: u.1 });
    }
    let duration = slots.iter().map(Slot::end).max().unwrap_or(0);
    Ok(Schedule {
        slots,
        duration,
        overlapped_samples: 2 * overlaps.iter().sum::<usize>(),
        speech_samples: speech,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn utts(spec: &[(&str, usize)]) -> Vec<(String, usize)> {
        spec.iter().map(|(s, n)| (s.to_string(), *n)).collect()
    }

    #[test]
    fn zero_target_is_sequential() {
        let u = utts(&[("S0", 1000), ("S1", 800), ("S0", 500)]);
        let s = schedule_session(&u, 0.0, 1, 16000).unwrap();
        for w in s.slots.windows(2) {
            assert!(w[1].onset >= w[0].end() + 1600);
        }
        assert_eq!(s.overlap_fraction(), 0.0);
    }

    #[test]
    fn two_equal_utterances_half_overlap() {
        let u = utts(&[("S0", 16000), ("S1", 16000)]);
        let s = schedule_session(&u, 0.5, 3, 16000).unwrap();
        assert_eq!(s.slots[1].onset, 8000);
        assert_eq!(s.overlap_fraction(), 0.5);
    }

    #[test]
    fn same_speaker_cannot_overlap() {
        let u = utts(&[("S0", 16000), ("S0", 16000)]);
        let e = schedule_session(&u, 0.3, 3, 16000).unwrap_err();
        assert!(matches!(e, DatasetError::InfeasibleOverlap { .. }));
    }

    #[test]
    fn target_must_be_below_one() {
        assert!(schedule_session(&utts(&[("S0", 10)]), 1.0, 0, 16000).is_err());
    }
}
