//! Speaker geometry from a single annotated video frame.
//!
//! Physical distances on the tabletop are recovered with cross-ratios along
//! image lines whose endpoints are partly known (the keyboard and monitor
//! base), then speakers are placed on vertical planes a fixed offset outside
//! the table edge they sit at.
//!
//! Coordinate frame: origin at the table center on the tabletop, `x` along
//! the width (parallel to the keyboard), `y` along the depth, `z` up. The
//! microphone sits at the origin. All lengths are inches.
//!
//! Corner numbering is cyclic: `1-2` and `3-4` are depth edges (at
//! `x = -W/2` and `x = +W/2`), `2-3` and `4-1` are width edges (at
//! `y = +D/2` and `y = -D/2`).

mod annotation;
mod baseline;
mod cross_ratio;
mod estimate;
pub mod json;
pub mod projective;
mod speakers;
mod table;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use annotation::{Annotation, PixelPoint, PointLabel};
pub use baseline::baseline_geometry;
pub use cross_ratio::{cross_ratio, estimate_cd, CollinearQuad};
pub use estimate::{estimate_frame, EstimateDiagnostics, EstimateMethod, EstimateResponse};
pub use speakers::{estimate_speakers, estimate_speakers_detailed, SpeakerDiagnostic};
pub use table::{estimate_table, estimate_table_detailed, Diagnostics, TableFit};

pub type Point3 = [f64; 3];

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    /// Maximum perpendicular deviation of a quad, as a fraction of its length.
    pub collinearity_tol: f64,
    /// Grid lines meeting at less than this angle are rejected.
    pub min_intersection_angle_deg: f64,
    /// Multiplier applied to the visible table depth.
    pub depth_extension: f64,
    /// Distance of each speaker plane outside its table edge.
    pub speaker_offset_in: f64,
    /// Mouth height used when a speaker has no head point.
    pub default_mouth_height_in: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            collinearity_tol: 0.02,
            min_intersection_angle_deg: 0.5,
            depth_extension: 1.05,
            speaker_offset_in: 4.0,
            default_mouth_height_in: 12.0,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("points deviate {deviation:.3} px from their fitted line (limit {limit:.3} px)")]
    CollinearityViolation { deviation: f64, limit: f64 },
    #[error("two points of the quad coincide")]
    DegenerateQuad,
    #[error("cross-ratio cannot be inverted (denominator {denominator:e})")]
    InversionSingularity { denominator: f64 },
    #[error("estimated distance {distance} is not positive; check point order")]
    NegativeDistance { distance: f64 },
    #[error("missing points: {}", .0.join(", "))]
    MissingPoints(Vec<String>),
    #[error("missing physical dimension `{0}`")]
    MissingDimension(String),
    #[error("on {line}: {source}")]
    OnLine {
        line: String,
        #[source]
        source: Box<GeometryError>,
    },
    #[error("lines {first} and {second} meet at {angle_deg:.3} degrees, too close to parallel")]
    NearParallel {
        first: String,
        second: String,
        angle_deg: f64,
    },
    #[error("{line}: table edge intersections do not bracket the reference segment")]
    GridOrder { line: String },
    #[error("no pixels-per-inch scale for speaker {0}")]
    MissingScale(String),
    #[error("speaker {0} is equally close to two table edges")]
    SpeakerUnassignedEdge(String),
    #[error("speaker sets differ: {0}")]
    SpeakerSetMismatch(String),
    #[error("invalid annotation: {0}")]
    InvalidAnnotation(String),
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
}

impl GeometryError {
    /// Machine-readable error code; line-scoped errors report their cause.
    pub fn code(&self) -> &'static str {
        match self {
            GeometryError::CollinearityViolation { .. } => "CollinearityViolation",
            GeometryError::DegenerateQuad => "DegenerateQuad",
            GeometryError::InversionSingularity { .. } => "InversionSingularity",
            GeometryError::NegativeDistance { .. } => "NegativeDistance",
            GeometryError::MissingPoints(_) => "MissingPoints",
            GeometryError::MissingDimension(_) => "MissingDimension",
            GeometryError::OnLine { source, .. } => source.code(),
            GeometryError::NearParallel { .. } => "NearParallel",
            GeometryError::GridOrder { .. } => "GridOrder",
            GeometryError::MissingScale(_) => "MissingScale",
            GeometryError::SpeakerUnassignedEdge(_) => "SpeakerUnassignedEdge",
            GeometryError::SpeakerSetMismatch(_) => "SpeakerSetMismatch",
            GeometryError::InvalidAnnotation(_) => "InvalidAnnotation",
            GeometryError::InvalidTable(_) => "InvalidTable",
            GeometryError::InvalidGeometry(_) => "InvalidGeometry",
        }
    }

    /// Labels (points, lines or speakers) the error refers to.
    pub fn labels(&self) -> Vec<String> {
        match self {
            GeometryError::MissingPoints(labels) => labels.clone(),
            GeometryError::OnLine { line, source } => {
                let mut v = vec![line.clone()];
                v.extend(source.labels());
                v
            }
            GeometryError::NearParallel { first, second, .. } => vec![first.clone(), second.clone()],
            GeometryError::GridOrder { line } => vec![line.clone()],
            GeometryError::MissingScale(s) | GeometryError::SpeakerUnassignedEdge(s) => vec![s.clone()],
            GeometryError::MissingDimension(d) => vec![d.clone()],
            _ => Vec::new(),
        }
    }

    fn on_line(self, line: &str) -> Self {
        GeometryError::OnLine {
            line: line.to_string(),
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableModel {
    pub width: f64,
    pub depth: f64,
    pub mic: Point3,
    pub depth_extension_applied: bool,
}

impl TableModel {
    /// A table of known size, without any occlusion extension.
    pub fn new(width: f64, depth: f64) -> Result<Self> {
        let t = TableModel {
            width,
            depth,
            mic: [0.0; 3],
            depth_extension_applied: false,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(GeometryError::InvalidTable(format!("width {}", self.width)));
        }
        if !(self.depth.is_finite() && self.depth > 0.0) {
            return Err(GeometryError::InvalidTable(format!("depth {}", self.depth)));
        }
        if self.mic != [0.0; 3] {
            return Err(GeometryError::InvalidTable("microphone must be at the table center".into()));
        }
        Ok(())
    }
}

/// One of the four table edges, identified by its corner pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TableEdge {
    #[serde(rename = "1-2")]
    E12,
    #[serde(rename = "2-3")]
    E23,
    #[serde(rename = "3-4")]
    E34,
    #[serde(rename = "4-1")]
    E41,
}

impl TableEdge {
    pub const ALL: [TableEdge; 4] = [TableEdge::E12, TableEdge::E23, TableEdge::E34, TableEdge::E41];

    /// Corner numbers at the start and end of the edge.
    pub fn corners(self) -> (u8, u8) {
        match self {
            TableEdge::E12 => (1, 2),
            TableEdge::E23 => (2, 3),
            TableEdge::E34 => (3, 4),
            TableEdge::E41 => (4, 1),
        }
    }

    /// Outward unit normal in the table frame.
    pub fn normal(self) -> [f64; 2] {
        match self {
            TableEdge::E12 => [-1.0, 0.0],
            TableEdge::E23 => [0.0, 1.0],
            TableEdge::E34 => [1.0, 0.0],
            TableEdge::E41 => [0.0, -1.0],
        }
    }

    /// Unit vector along the edge, from its first corner to its second.
    pub fn along(self) -> [f64; 2] {
        match self {
            TableEdge::E12 => [0.0, 1.0],
            TableEdge::E23 => [1.0, 0.0],
            TableEdge::E34 => [0.0, -1.0],
            TableEdge::E41 => [-1.0, 0.0],
        }
    }

    /// Distance from the table center to this edge.
    pub fn half_extent(self, width: f64, depth: f64) -> f64 {
        match self {
            TableEdge::E12 | TableEdge::E34 => width / 2.0,
            TableEdge::E23 | TableEdge::E41 => depth / 2.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TableEdge::E12 => "edge_1_2",
            TableEdge::E23 => "edge_2_3",
            TableEdge::E34 => "edge_3_4",
            TableEdge::E41 => "edge_4_1",
        }
    }
}

/// Table-frame position of corner `n` (1..=4) for a `width` x `depth` table.
pub fn corner_position(n: u8, width: f64, depth: f64) -> [f64; 2] {
    let (hw, hd) = (width / 2.0, depth / 2.0);
    match n {
        1 => [-hw, -hd],
        2 => [-hw, hd],
        3 => [hw, hd],
        4 => [hw, -hd],
        _ => panic!("corner index {n} out of range"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeakerGeometry {
    pub table: TableModel,
    pub mouths: BTreeMap<String, Point3>,
    pub distances: BTreeMap<String, f64>,
}

impl SpeakerGeometry {
    pub fn from_mouths(table: TableModel, mouths: BTreeMap<String, Point3>) -> Self {
        let distances = mouths
            .iter()
            .map(|(id, m)| (id.clone(), distance_to_mic(&table, m)))
            .collect();
        SpeakerGeometry {
            table,
            mouths,
            distances,
        }
    }

    /// Checks the table, that distances match mouths exactly, and that each
    /// mouth sits outside the table footprint by at least `min_offset`.
    pub fn validate(&self, min_offset: f64) -> Result<()> {
        self.table.validate()?;
        if self.mouths.keys().ne(self.distances.keys()) {
            return Err(GeometryError::InvalidGeometry("mouth and distance speaker sets differ".into()));
        }
        for (id, m) in &self.mouths {
            if !m.iter().all(|v| v.is_finite()) {
                return Err(GeometryError::InvalidGeometry(format!("{id}: non-finite mouth")));
            }
            let d = distance_to_mic(&self.table, m);
            if d != self.distances[id] {
                return Err(GeometryError::InvalidGeometry(format!(
                    "{id}: distance {} does not match mouth ({d})",
                    self.distances[id]
                )));
            }
            let outside_x = m[0].abs() - self.table.width / 2.0;
            let outside_y = m[1].abs() - self.table.depth / 2.0;
            if outside_x.max(outside_y) < min_offset - 1e-9 {
                return Err(GeometryError::InvalidGeometry(format!(
                    "{id}: mouth is closer than {min_offset} in to the table edge"
                )));
            }
        }
        Ok(())
    }
}

fn distance_to_mic(table: &TableModel, m: &Point3) -> f64 {
    let d = [m[0] - table.mic[0], m[1] - table.mic[1], m[2] - table.mic[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

/// Per-speaker percentage errors against ground-truth distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryErrorReport {
    pub per_speaker: BTreeMap<String, f64>,
    pub mean: f64,
}

/// `|estimate - truth| / truth * 100` per speaker, and their arithmetic mean.
pub fn distance_errors(
    estimated: &BTreeMap<String, f64>,
    truth: &BTreeMap<String, f64>,
) -> Result<GeometryErrorReport> {
    if estimated.keys().ne(truth.keys()) {
        let est: Vec<_> = estimated.keys().cloned().collect();
        let tru: Vec<_> = truth.keys().cloned().collect();
        return Err(GeometryError::SpeakerSetMismatch(format!(
            "estimated {est:?} vs truth {tru:?}"
        )));
    }
    if estimated.is_empty() {
        return Err(GeometryError::SpeakerSetMismatch("no speakers".into()));
    }
    let mut per_speaker = BTreeMap::new();
    for (id, est) in estimated {
        let t = truth[id];
        if !(t.is_finite() && t > 0.0) {
            return Err(GeometryError::InvalidGeometry(format!("{id}: truth distance {t}")));
        }
        per_speaker.insert(id.clone(), (est - t).abs() / t * 100.0);
    }
    let mean = per_speaker.values().sum::<f64>() / per_speaker.len() as f64;
    Ok(GeometryErrorReport { per_speaker, mean })
}

pub fn geometry_error(
    estimated: &SpeakerGeometry,
    truth: &BTreeMap<String, f64>,
) -> Result<GeometryErrorReport> {
    distance_errors(&estimated.distances, truth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn map(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn single_published_row() {
        let r = distance_errors(&map(&[("S0", 34.16)]), &map(&[("S0", 36.70)])).unwrap();
        assert_abs_diff_eq!(r.per_speaker["S0"], 6.92, epsilon = 0.005);
    }

    #[test]
    fn identity_gives_zero_error() {
        let d = map(&[("S0", 20.0), ("S1", 31.5)]);
        let r = distance_errors(&d, &d).unwrap();
        assert!(r.per_speaker.values().all(|e| *e == 0.0));
        assert_eq!(r.mean, 0.0);
    }

    #[test]
    fn mismatched_speakers_rejected() {
        let err = distance_errors(&map(&[("S0", 1.0)]), &map(&[("S1", 1.0)])).unwrap_err();
        assert_eq!(err.code(), "SpeakerSetMismatch");
    }

    #[test]
    fn line_errors_report_inner_code() {
        let e = GeometryError::NegativeDistance { distance: -1.0 }.on_line("keyboard");
        assert_eq!(e.code(), "NegativeDistance");
        assert_eq!(e.labels(), vec!["keyboard".to_string()]);
    }

    #[test]
    fn geometry_validation_catches_tampered_distance() {
        let table = TableModel::new(48.0, 36.0).unwrap();
        let mut mouths = BTreeMap::new();
        mouths.insert("S0".to_string(), [0.0, -22.0, 0.0]);
        let mut g = SpeakerGeometry::from_mouths(table, mouths);
        g.validate(4.0).unwrap();
        g.distances.insert("S0".into(), 22.5);
        assert!(g.validate(4.0).is_err());
    }
}
