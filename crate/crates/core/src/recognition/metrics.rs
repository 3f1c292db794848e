//! One-vs-rest keyword scoring and its file formats.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lexicon::OTHERS;
use super::{RecognitionError, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionStats {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionStats {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// TP / (TP + FN); `None` when the class never occurs.
    pub fn sensitivity(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// TN / (TN + FP); `None` when every decision belongs to the class.
    pub fn specificity(&self) -> Option<f64> {
        ratio(self.tn, self.tn + self.fp)
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Unweighted mean of the defined values; `None` if there are none.
pub fn macro_average(values: &[Option<f64>]) -> Option<f64> {
    let defined: Vec<f64> = values.iter().flatten().copied().collect();
    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassScore {
    pub class: String,
    pub stats: ConfusionStats,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordReport {
    pub decisions: usize,
    pub classes: Vec<ClassScore>,
    pub macro_sensitivity: Option<f64>,
    pub macro_specificity: Option<f64>,
}

/// A (predicted, true) label pair.
pub type Decision = (String, String);

/// Scores `decisions` one-vs-rest for each of `classes`, with the rejection
/// class appended when absent. Macro averages run over every class,
/// skipping undefined rates.
pub fn score_keywords(decisions: &[Decision], classes: &[String]) -> Result<KeywordReport> {
    let mut classes: Vec<String> = classes.to_vec();
    if !classes.iter().any(|c| c == OTHERS) {
        classes.push(OTHERS.to_string());
    }
    let index: BTreeMap<&str, usize> = classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let lookup = |label: &str, row: usize| {
        index.get(label).copied().ok_or_else(|| RecognitionError::UnknownLabel {
            label: label.to_string(),
            row,
        })
    };
    let pairs = decisions
        .iter()
        .enumerate()
        .map(|(row, (p, t))| Ok((lookup(p, row + 1)?, lookup(t, row + 1)?)))
        .collect::<Result<Vec<_>>>()?;

    let k = classes.len();
    // per class: (predicted count, true count, hits); integer sums, so the
    // parallel reduction is order independent
    let counts = pairs
        .par_iter()
        .fold(
            || vec![[0usize; 3]; k],
            |mut acc, &(p, t)| {
                acc[p][0] += 1;
                acc[t][1] += 1;
                acc[p][2] += usize::from(p == t);
                acc
            },
        )
        .reduce(
            || vec![[0usize; 3]; k],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    for i in 0..3 {
                        x[i] += y[i];
                    }
                }
                a
            },
        );

    let n = pairs.len();
    let scores: Vec<ClassScore> = classes
        .iter()
        .zip(&counts)
        .map(|(class, &[predicted, actual, tp])| {
            let stats = ConfusionStats {
                tp,
                fp: predicted - tp,
                fn_: actual - tp,
                tn: n + tp - predicted - actual,
            };
            ClassScore {
                class: class.clone(),
                sensitivity: stats.sensitivity(),
                specificity: stats.specificity(),
                stats,
            }
        })
        .collect();
    let sens: Vec<Option<f64>> = scores.iter().map(|s| s.sensitivity).collect();
    let spec: Vec<Option<f64>> = scores.iter().map(|s| s.specificity).collect();
    Ok(KeywordReport {
        decisions: n,
        macro_sensitivity: macro_average(&sens),
        macro_specificity: macro_average(&spec),
        classes: scores,
    })
}

/// Reads `predicted,true` rows. A first row spelled `predicted,true` is a
/// header. Empty input is an error.
pub fn read_decisions(text: &str) -> Result<Vec<Decision>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| RecognitionError::MalformedDecisions {
            row,
            message: e.to_string(),
        })?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 2 || record[0].is_empty() || record[1].is_empty() {
            return Err(RecognitionError::MalformedDecisions {
                row,
                message: format!("expected 2 nonempty fields, got {:?}", record.iter().collect::<Vec<_>>()),
            });
        }
        if row == 1 && record[0].eq_ignore_ascii_case("predicted") && record[1].eq_ignore_ascii_case("true") {
            continue;
        }
        out.push((record[0].to_string(), record[1].to_string()));
    }
    if out.is_empty() {
        return Err(RecognitionError::EmptyDecisions);
    }
    Ok(out)
}

pub fn write_decisions(decisions: &[Decision]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["predicted", "true"])?;
    for (p, t) in decisions {
        w.write_record([p, t])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| RecognitionError::Io(e.into_error()))?)
        .expect("csv output is utf-8"))
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_default()
}

impl KeywordReport {
    /// One row per class plus `Average`, like the published results table.
    /// Undefined rates are left empty.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["keyword", "sensitivity", "specificity"])?;
        for c in &self.classes {
            w.write_record([c.class.clone(), cell(c.sensitivity), cell(c.specificity)])?;
        }
        w.write_record(["Average".to_string(), cell(self.macro_sensitivity), cell(self.macro_specificity)])?;
        Ok(String::from_utf8(w.into_inner().map_err(|e| RecognitionError::Io(e.into_error()))?)
            .expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn class(&self, name: &str) -> Option<&ClassScore> {
        self.classes.iter().find(|c| c.class == name)
    }
}
