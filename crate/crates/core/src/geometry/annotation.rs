use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use nalgebra::Point2;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{GeometryError, Result};

/// Role of an annotated point.
///
/// Text form: `table_corner_1`..`table_corner_4`, `keyboard_5`..`keyboard_8`,
/// `monitor_9`..`monitor_13`, `hand:<speaker>`, `head:<speaker>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointLabel {
    TableCorner(u8),
    Keyboard(u8),
    Monitor(u8),
    Hand(String),
    Head(String),
}

impl fmt::Display for PointLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointLabel::TableCorner(n) => write!(f, "table_corner_{n}"),
            PointLabel::Keyboard(n) => write!(f, "keyboard_{n}"),
            PointLabel::Monitor(n) => write!(f, "monitor_{n}"),
            PointLabel::Hand(s) => write!(f, "hand:{s}"),
            PointLabel::Head(s) => write!(f, "head:{s}"),
        }
    }
}

impl FromStr for PointLabel {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || GeometryError::InvalidAnnotation(format!("unknown point label `{s}`"));
        if let Some(id) = s.strip_prefix("hand:") {
            return if id.is_empty() { Err(bad()) } else { Ok(PointLabel::Hand(id.to_string())) };
        }
        if let Some(id) = s.strip_prefix("head:") {
            return if id.is_empty() { Err(bad()) } else { Ok(PointLabel::Head(id.to_string())) };
        }
        let numbered = |prefix: &str, range: std::ops::RangeInclusive<u8>| -> Option<u8> {
            let n: u8 = s.strip_prefix(prefix)?.parse().ok()?;
            range.contains(&n).then_some(n)
        };
        if let Some(n) = numbered("table_corner_", 1..=4) {
            Ok(PointLabel::TableCorner(n))
        } else if let Some(n) = numbered("keyboard_", 5..=8) {
            Ok(PointLabel::Keyboard(n))
        } else if let Some(n) = numbered("monitor_", 9..=13) {
            Ok(PointLabel::Monitor(n))
        } else {
            Err(bad())
        }
    }
}

impl Serialize for PointLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PointLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PixelPoint {
    pub label: PointLabel,
    pub x: f64,
    pub y: f64,
}

impl PixelPoint {
    pub fn new(label: PointLabel, x: f64, y: f64) -> Self {
        PixelPoint { label, x, y }
    }

    pub fn position(&self) -> Point2<f64> {
        Point2::new(self.x, self.y)
    }
}

/// Labeled points of one frame plus the known physical dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub frame_id: String,
    #[serde(rename = "keyboard_width_in")]
    pub keyboard_width: f64,
    /// Width of the monitor base, which lies on the table parallel to the depth edges.
    #[serde(rename = "monitor_width_in", default, skip_serializing_if = "Option::is_none")]
    pub monitor_width: Option<f64>,
    #[serde(rename = "speakers")]
    pub speaker_ids: Vec<String>,
    #[serde(rename = "scales_ppi", default)]
    pub per_speaker_scale: BTreeMap<String, f64>,
    pub points: Vec<PixelPoint>,
}

impl Annotation {
    pub fn from_json(text: &str) -> Result<Self> {
        let a: Annotation = serde_json::from_str(text)
            .map_err(|e| GeometryError::InvalidAnnotation(e.to_string()))?;
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(GeometryError::InvalidAnnotation(m));
        if !(self.keyboard_width.is_finite() && self.keyboard_width > 0.0) {
            return invalid(format!("keyboard width must be > 0, got {}", self.keyboard_width));
        }
        if let Some(w) = self.monitor_width {
            if !(w.is_finite() && w > 0.0) {
                return invalid(format!("monitor width must be > 0, got {w}"));
            }
        }
        for (id, s) in &self.per_speaker_scale {
            if !(s.is_finite() && *s > 0.0) {
                return invalid(format!("scale for {id} must be > 0, got {s}"));
            }
        }
        let mut ids = HashSet::new();
        for id in &self.speaker_ids {
            if id.is_empty() || !ids.insert(id) {
                return invalid(format!("speaker id `{id}` is empty or repeated"));
            }
        }
        let mut seen = HashSet::new();
        for p in &self.points {
            if !(p.x.is_finite() && p.y.is_finite() && p.x >= 0.0 && p.y >= 0.0) {
                return invalid(format!("{}: coordinates ({}, {}) must be finite and >= 0", p.label, p.x, p.y));
            }
            if !seen.insert(&p.label) {
                return invalid(format!("label {} appears twice", p.label));
            }
            if let PointLabel::Hand(s) | PointLabel::Head(s) = &p.label {
                if !ids.contains(s) {
                    return invalid(format!("{} refers to an undeclared speaker", p.label));
                }
            }
        }
        Ok(())
    }

    pub fn point(&self, label: &PointLabel) -> Option<Point2<f64>> {
        self.points.iter().find(|p| &p.label == label).map(PixelPoint::position)
    }

    /// Looks up all labels, reporting every absent one at once.
    pub fn require(&self, labels: &[PointLabel]) -> Result<Vec<Point2<f64>>> {
        let mut found = Vec::with_capacity(labels.len());
        let mut missing = Vec::new();
        for l in labels {
            match self.point(l) {
                Some(p) => found.push(p),
                None => missing.push(l.to_string()),
            }
        }
        if missing.is_empty() {
            Ok(found)
        } else {
            Err(GeometryError::MissingPoints(missing))
        }
    }
}
