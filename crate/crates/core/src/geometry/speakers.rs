use std::collections::BTreeMap;

use nalgebra::{Point2, Vector3};
use serde::Serialize;

use super::annotation::{Annotation, PointLabel};
use super::projective::{euclid, hom, join, line_angle_deg, meet, perpendicular_foot, Hom, Homography};
use super::table::table_homography;
use super::{corner_position, GeometryConfig, GeometryError, Point3, Result, SpeakerGeometry, TableEdge, TableModel};

/// Below this angle the vertical through a head is too close to the speaker's
/// base line to intersect reliably.
const MIN_VERTICAL_ANGLE_DEG: f64 = 5.0;
const EDGE_TIE_PX: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeakerDiagnostic {
    pub speaker: String,
    pub edge: TableEdge,
    pub lateral_px: f64,
    pub height_px: f64,
    /// Image of the point on the speaker's base line below the head.
    pub foot: Option<[f64; 2]>,
    pub warnings: Vec<String>,
}

pub fn estimate_speakers(
    annotation: &Annotation,
    table: &TableModel,
    config: &GeometryConfig,
) -> Result<SpeakerGeometry> {
    estimate_speakers_detailed(annotation, table, config).map(|(g, _)| g)
}

/// Places each speaker's mouth on the vertical plane `speaker_offset_in`
/// outside the table edge nearest to their hand (or head) in the image.
///
/// Lateral position is the pixel offset of the hand (or head) along that
/// edge from its midpoint; mouth height is the pixel length of the vertical
/// from the head down to the speaker's base line on the tabletop plane.
/// Both are converted with the speaker's pixels-per-inch scale.
pub fn estimate_speakers_detailed(
    annotation: &Annotation,
    table: &TableModel,
    config: &GeometryConfig,
) -> Result<(SpeakerGeometry, Vec<SpeakerDiagnostic>)> {
    annotation.validate()?;
    table.validate()?;
    let visible_depth = if table.depth_extension_applied {
        table.depth / config.depth_extension
    } else {
        table.depth
    };
    let h = table_homography(annotation, table.width, visible_depth)?;
    let vertical = vertical_vanishing_point(annotation);

    let mut mouths = BTreeMap::new();
    let mut diagnostics = Vec::new();
    for id in &annotation.speaker_ids {
        let scale = *annotation
            .per_speaker_scale
            .get(id)
            .ok_or_else(|| GeometryError::MissingScale(id.clone()))?;
        let head = annotation.point(&PointLabel::Head(id.clone()));
        let hand = annotation.point(&PointLabel::Hand(id.clone()));
        let anchor = hand.or(head).ok_or_else(|| {
            GeometryError::MissingPoints(vec![PointLabel::Head(id.clone()).to_string()])
        })?;

        let edge = nearest_edge(&h, table.width, visible_depth, anchor)
            .ok_or_else(|| GeometryError::SpeakerUnassignedEdge(id.clone()))?;
        let mut warnings = Vec::new();

        let lateral_px = lateral_offset_px(&h, edge, table.width, visible_depth, anchor);
        let n = edge.normal();
        let u = edge.along();
        let plane_dist = edge.half_extent(table.width, table.depth) + config.speaker_offset_in;

        let (height_px, foot, height_in) = match head {
            Some(head) => {
                let base_a = Point2::new(n[0] * plane_dist, n[1] * plane_dist);
                let base_b = Point2::new(base_a.x + 10.0 * u[0], base_a.y + 10.0 * u[1]);
                let base = join(&h.apply(base_a), &h.apply(base_b));
                let below_hand = hand.and_then(|p| {
                    let t = h.inverse()?.map(p)?;
                    let along = t.x * u[0] + t.y * u[1];
                    h.map(Point2::new(base_a.x + along * u[0], base_a.y + along * u[1]))
                });
                let foot = vertical_foot(&base, &vertical, head, below_hand, &mut warnings);
                let mut px = (head - foot).norm();
                if head.y > foot.y {
                    warnings.push(format!("head of {id} appears below its base line; height set to 0"));
                    px = 0.0;
                }
                (px, Some([foot.x, foot.y]), px / scale)
            }
            None => {
                warnings.push(format!(
                    "no head point for {id}; using default mouth height {} in",
                    config.default_mouth_height_in
                ));
                (0.0, None, config.default_mouth_height_in)
            }
        };

        let lateral_in = lateral_px / scale;
        let mouth: Point3 = [
            n[0] * plane_dist + u[0] * lateral_in,
            n[1] * plane_dist + u[1] * lateral_in,
            height_in,
        ];
        mouths.insert(id.clone(), mouth);
        diagnostics.push(SpeakerDiagnostic {
            speaker: id.clone(),
            edge,
            lateral_px,
            height_px,
            foot,
            warnings,
        });
    }
    let geometry = SpeakerGeometry::from_mouths(*table, mouths);
    Ok((geometry, diagnostics))
}

/// Vanishing point of the monitor's vertical sides, or the image vertical.
fn vertical_vanishing_point(annotation: &Annotation) -> Hom {
    let m = |n| annotation.point(&PointLabel::Monitor(n));
    if let (Some(m9), Some(m10), Some(m11), Some(m12)) = (m(9), m(10), m(11), m(12)) {
        let v = meet(&join(&hom(m9), &hom(m12)), &join(&hom(m10), &hom(m11)));
        if v.norm() > 0.0 {
            return v;
        }
    }
    Vector3::new(0.0, 1.0, 0.0)
}

/// Where the vertical through the head meets the base line. When the two are
/// nearly parallel, falls back to the base-line point level with the hand,
/// then to the perpendicular foot.
fn vertical_foot(
    base: &Hom,
    vertical: &Hom,
    head: Point2<f64>,
    below_hand: Option<Point2<f64>>,
    warnings: &mut Vec<String>,
) -> Point2<f64> {
    let through_head = join(&hom(head), vertical);
    if through_head.norm() > 0.0 && line_angle_deg(&through_head, base) >= MIN_VERTICAL_ANGLE_DEG {
        if let Some(p) = euclid(&meet(&through_head, base)) {
            return p;
        }
    }
    if let Some(p) = below_hand {
        warnings.push("vertical nearly parallel to base line; using the base point in line with the hand".into());
        return p;
    }
    warnings.push("vertical nearly parallel to base line; using perpendicular distance".into());
    perpendicular_foot(base, head)
}

fn edge_image(h: &Homography, edge: TableEdge, width: f64, depth: f64) -> (Point2<f64>, Point2<f64>) {
    let (i, j) = edge.corners();
    let p = |n| {
        let c = corner_position(n, width, depth);
        h.map(Point2::new(c[0], c[1])).expect("table corners map to finite pixels")
    };
    (p(i), p(j))
}

fn nearest_edge(h: &Homography, width: f64, depth: f64, p: Point2<f64>) -> Option<TableEdge> {
    let mut d: Vec<(f64, TableEdge)> = TableEdge::ALL
        .iter()
        .map(|&e| {
            let (a, b) = edge_image(h, e, width, depth);
            (segment_distance(a, b, p), e)
        })
        .collect();
    d.sort_by(|x, y| x.0.total_cmp(&y.0));
    if d[1].0 - d[0].0 <= EDGE_TIE_PX {
        None
    } else {
        Some(d[0].1)
    }
}

fn segment_distance(a: Point2<f64>, b: Point2<f64>, p: Point2<f64>) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Signed pixel offset of `p`, projected onto the edge, from the image of
/// the edge midpoint, positive toward the edge's second corner.
fn lateral_offset_px(h: &Homography, edge: TableEdge, width: f64, depth: f64, p: Point2<f64>) -> f64 {
    let (a, b) = edge_image(h, edge, width, depth);
    let n = edge.normal();
    let half = edge.half_extent(width, depth);
    let mid = h
        .map(Point2::new(n[0] * half, n[1] * half))
        .expect("edge midpoint maps to a finite pixel");
    let line = join(&hom(a), &hom(b));
    let foot = perpendicular_foot(&line, p);
    let dir = (b - a).normalize();
    (foot - mid).dot(&dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::annotation::PixelPoint;
    use approx::assert_abs_diff_eq;

    const PPI: f64 = 5.0;

    fn px(x: f64, y: f64) -> (f64, f64) {
        (400.0 + PPI * x, 300.0 - PPI * y)
    }

    fn table_only() -> Annotation {
        let mut points = Vec::new();
        for n in 1..=4u8 {
            let c = corner_position(n, 48.0, 36.0);
            let (x, y) = px(c[0], c[1]);
            points.push(PixelPoint::new(PointLabel::TableCorner(n), x, y));
        }
        Annotation {
            frame_id: "t".into(),
            keyboard_width: 17.0,
            monitor_width: None,
            speaker_ids: vec![],
            per_speaker_scale: BTreeMap::new(),
            points,
        }
    }

    fn add_speaker(a: &mut Annotation, id: &str, hand: Option<(f64, f64)>, head: Option<(f64, f64)>) {
        a.speaker_ids.push(id.into());
        a.per_speaker_scale.insert(id.into(), PPI);
        if let Some((x, y)) = hand {
            a.points.push(PixelPoint::new(PointLabel::Hand(id.into()), x, y));
        }
        if let Some((x, y)) = head {
            a.points.push(PixelPoint::new(PointLabel::Head(id.into()), x, y));
        }
    }

    #[test]
    fn centered_speaker_on_long_edge_flat() {
        let mut a = table_only();
        // head exactly on the base line 4 in outside the y = -18 edge
        add_speaker(&mut a, "S0", None, Some(px(0.0, -22.0)));
        let table = TableModel::new(48.0, 36.0).unwrap();
        let g = estimate_speakers(&a, &table, &GeometryConfig::default()).unwrap();
        assert_abs_diff_eq!(g.distances["S0"], 22.0, epsilon = 1e-9);
    }

    #[test]
    fn centered_speaker_with_height() {
        let mut a = table_only();
        // head drawn 12 in above its base line on the far edge
        let (x, y) = px(0.0, 22.0);
        add_speaker(&mut a, "S1", Some(px(0.0, 17.0)), Some((x, y - 12.0 * PPI)));
        let table = TableModel::new(48.0, 36.0).unwrap();
        let g = estimate_speakers(&a, &table, &GeometryConfig::default()).unwrap();
        assert_abs_diff_eq!(g.mouths["S1"][2], 12.0, epsilon = 1e-9);
        assert_abs_diff_eq!(g.distances["S1"], (22.0f64 * 22.0 + 144.0).sqrt(), epsilon = 1e-9);
        assert_abs_diff_eq!(g.distances["S1"], 25.06, epsilon = 0.005);
    }

    #[test]
    fn lateral_offset_follows_hand() {
        let mut a = table_only();
        add_speaker(&mut a, "S2", Some(px(28.0 - 6.0, 7.0)), None);
        let table = TableModel::new(48.0, 36.0).unwrap();
        let (g, diag) = estimate_speakers_detailed(&a, &table, &GeometryConfig::default()).unwrap();
        assert_eq!(diag[0].edge, TableEdge::E34);
        let m = g.mouths["S2"];
        assert_abs_diff_eq!(m[0], 28.0, epsilon = 1e-9);
        assert_abs_diff_eq!(m[1], 7.0, epsilon = 1e-9);
        // no head point: default height, with a warning
        assert_abs_diff_eq!(m[2], 12.0, epsilon = 1e-12);
        assert_eq!(diag[0].warnings.len(), 1);
    }

    #[test]
    fn missing_scale_is_reported() {
        let mut a = table_only();
        add_speaker(&mut a, "S0", None, Some(px(0.0, -22.0)));
        a.per_speaker_scale.clear();
        let table = TableModel::new(48.0, 36.0).unwrap();
        let err = estimate_speakers(&a, &table, &GeometryConfig::default()).unwrap_err();
        assert_eq!(err, GeometryError::MissingScale("S0".into()));
    }

    #[test]
    fn corner_diagonal_head_is_a_tie() {
        let mut a = table_only();
        // equidistant from edges 1-2 and 4-1 along the corner bisector
        add_speaker(&mut a, "S0", None, Some(px(-30.0, -24.0)));
        let table = TableModel::new(48.0, 36.0).unwrap();
        let err = estimate_speakers(&a, &table, &GeometryConfig::default()).unwrap_err();
        assert_eq!(err, GeometryError::SpeakerUnassignedEdge("S0".into()));
    }

    #[test]
    fn speaker_without_any_point() {
        let mut a = table_only();
        add_speaker(&mut a, "S0", None, None);
        let table = TableModel::new(48.0, 36.0).unwrap();
        let err = estimate_speakers(&a, &table, &GeometryConfig::default()).unwrap_err();
        assert_eq!(err.code(), "MissingPoints");
    }
}
