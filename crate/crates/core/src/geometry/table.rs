use nalgebra::Point2;
use serde::Serialize;

use super::annotation::{Annotation, PointLabel};
use super::cross_ratio::{cross_ratio, estimate_cd, CollinearQuad};
use super::projective::{euclid, hom, join, line_angle_deg, meet, normalized_line, Hom, Homography};
use super::{corner_position, GeometryConfig, GeometryError, Result, TableModel};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineDiagnostic {
    pub name: String,
    /// `[a, b, c]` of `a x + b y + c = 0` with unit normal.
    pub coefficients: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossRatioDiagnostic {
    pub name: String,
    pub ratio: f64,
    pub ab_in: f64,
    pub bc_in: f64,
    pub cd_in: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint {
    pub name: String,
    pub x: f64,
    pub y: f64,
}

/// Intermediate construction, for overlays and debugging.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub lines: Vec<LineDiagnostic>,
    pub cross_ratios: Vec<CrossRatioDiagnostic>,
    pub grid_points: Vec<GridPoint>,
    pub warnings: Vec<String>,
}

impl Diagnostics {
    fn line(&mut self, name: &str, l: &Hom) {
        self.lines.push(LineDiagnostic {
            name: name.to_string(),
            coefficients: normalized_line(l),
        });
    }

    fn point(&mut self, name: &str, p: Point2<f64>) {
        self.grid_points.push(GridPoint {
            name: name.to_string(),
            x: p.x,
            y: p.y,
        });
    }
}

#[derive(Debug, Clone)]
pub struct TableFit {
    pub table: TableModel,
    /// Depth spanned by the annotated corners, before the occlusion extension.
    pub visible_depth: f64,
    pub diagnostics: Diagnostics,
}

pub fn estimate_table(annotation: &Annotation, config: &GeometryConfig) -> Result<TableModel> {
    estimate_table_detailed(annotation, config).map(|fit| fit.table)
}

/// Table width from the keyboard line and visible depth from the monitor
/// base line, each measured between the two table edges it crosses.
pub fn estimate_table_detailed(annotation: &Annotation, config: &GeometryConfig) -> Result<TableFit> {
    annotation.validate()?;
    let monitor_mid_label = monitor_midpoint_labels(annotation);
    let mut required: Vec<PointLabel> = (1..=4).map(PointLabel::TableCorner).collect();
    required.extend((5..=8).map(PointLabel::Keyboard));
    required.extend([PointLabel::Monitor(9), PointLabel::Monitor(10)]);
    required.extend(monitor_mid_label.iter().cloned());
    let pts = annotation.require(&required)?;
    let monitor_width = annotation
        .monitor_width
        .ok_or_else(|| GeometryError::MissingDimension("monitor_width_in".into()))?;

    let corners: Vec<Hom> = pts[0..4].iter().map(|p| hom(*p)).collect();
    let edge = |i: usize, j: usize| join(&corners[i], &corners[j]);
    let e12 = edge(0, 1);
    let e23 = edge(1, 2);
    let e34 = edge(2, 3);
    let e41 = edge(3, 0);

    let mut diag = Diagnostics::default();
    for (name, l) in [("edge_1_2", &e12), ("edge_2_3", &e23), ("edge_3_4", &e34), ("edge_4_1", &e41)] {
        diag.line(name, l);
    }

    let [k5, k6, k7, k8] = [pts[4], pts[5], pts[6], pts[7]];
    let keyboard_mid = rectangle_edge_midpoint(k5, k6, k7, k8, "keyboard")?;
    diag.point("keyboard_midpoint", keyboard_mid);
    let width = measure_between_edges(
        "keyboard_5_6",
        k5,
        keyboard_mid,
        k6,
        annotation.keyboard_width,
        [("edge_1_2", &e12), ("edge_3_4", &e34)],
        config,
        &mut diag,
    )?;

    let (m9, m10) = (pts[8], pts[9]);
    let monitor_mid = if monitor_mid_label.len() == 1 {
        pts[10]
    } else {
        rectangle_edge_midpoint(m9, m10, pts[10], pts[11], "monitor")?
    };
    diag.point("monitor_base_midpoint", monitor_mid);
    let visible_depth = measure_between_edges(
        "monitor_9_10",
        m9,
        monitor_mid,
        m10,
        monitor_width,
        [("edge_2_3", &e23), ("edge_4_1", &e41)],
        config,
        &mut diag,
    )?;

    let table = TableModel {
        width,
        depth: visible_depth * config.depth_extension,
        mic: [0.0; 3],
        depth_extension_applied: true,
    };
    table.validate()?;
    Ok(TableFit {
        table,
        visible_depth,
        diagnostics: diag,
    })
}

/// `monitor_13` (base midpoint) when annotated, otherwise the top corners.
fn monitor_midpoint_labels(annotation: &Annotation) -> Vec<PointLabel> {
    if annotation.point(&PointLabel::Monitor(13)).is_some() {
        vec![PointLabel::Monitor(13)]
    } else {
        vec![PointLabel::Monitor(11), PointLabel::Monitor(12)]
    }
}

/// Image of the midpoint of side `p0-p1` of the rectangle `p0 p1 p2 p3`:
/// the line through the rectangle center and the vanishing point of the
/// sides `p0-p3`, `p1-p2` bisects `p0-p1`.
fn rectangle_edge_midpoint(
    p0: Point2<f64>,
    p1: Point2<f64>,
    p2: Point2<f64>,
    p3: Point2<f64>,
    name: &str,
) -> Result<Point2<f64>> {
    let [h0, h1, h2, h3] = [hom(p0), hom(p1), hom(p2), hom(p3)];
    let degenerate = || GeometryError::InvalidAnnotation(format!("{name} corners do not form a quadrilateral"));
    let center = meet(&join(&h0, &h2), &join(&h1, &h3));
    euclid(&center).ok_or_else(degenerate)?;
    let vanishing = meet(&join(&h0, &h3), &join(&h1, &h2));
    if vanishing.norm() == 0.0 {
        return Err(degenerate());
    }
    let bisector = join(&center, &vanishing);
    if bisector.norm() == 0.0 {
        return Err(degenerate());
    }
    euclid(&meet(&bisector, &join(&h0, &h1))).ok_or_else(degenerate)
}

/// Physical length of the line `a-c` between the two table edges it
/// crosses, from the known length of `a-c` and its midpoint `b`.
#[allow(clippy::too_many_arguments)]
fn measure_between_edges(
    name: &str,
    a: Point2<f64>,
    b: Point2<f64>,
    c: Point2<f64>,
    reference_len: f64,
    edges: [(&str, &Hom); 2],
    config: &GeometryConfig,
    diag: &mut Diagnostics,
) -> Result<f64> {
    let line = join(&hom(a), &hom(c));
    if line.x == 0.0 && line.y == 0.0 {
        return Err(GeometryError::DegenerateQuad.on_line(name));
    }
    diag.line(name, &line);
    let ac = c - a;
    let param = |p: Point2<f64>| (p - a).dot(&ac) / ac.norm_squared();

    let mut forward = None;
    let mut backward = None;
    for (edge_name, edge) in edges {
        let angle = line_angle_deg(&line, edge);
        if angle < config.min_intersection_angle_deg {
            return Err(GeometryError::NearParallel {
                first: name.to_string(),
                second: edge_name.to_string(),
                angle_deg: angle,
            });
        }
        let p = euclid(&meet(&line, edge)).ok_or_else(|| GeometryError::NearParallel {
            first: name.to_string(),
            second: edge_name.to_string(),
            angle_deg: angle,
        })?;
        diag.point(&format!("{name}_x_{edge_name}"), p);
        let t = param(p);
        if t > 1.0 && forward.is_none() {
            forward = Some(p);
        } else if t < 0.0 && backward.is_none() {
            backward = Some(p);
        } else {
            return Err(GeometryError::GridOrder { line: name.to_string() });
        }
    }
    let (Some(d_fwd), Some(d_back)) = (forward, backward) else {
        return Err(GeometryError::GridOrder { line: name.to_string() });
    };

    let half = reference_len / 2.0;
    let mut beyond = |label: &str, quad: CollinearQuad| -> Result<f64> {
        let quad = quad.with_tolerance(config.collinearity_tol);
        let cd = estimate_cd(&quad).map_err(|e| e.on_line(name))?;
        diag.cross_ratios.push(CrossRatioDiagnostic {
            name: format!("{name}_{label}"),
            ratio: cross_ratio(&quad).map_err(|e| e.on_line(name))?,
            ab_in: half,
            bc_in: half,
            cd_in: cd,
        });
        Ok(cd)
    };
    let after_c = beyond("forward", CollinearQuad::new(a, b, c, d_fwd, half, half))?;
    let before_a = beyond("backward", CollinearQuad::new(c, b, a, d_back, half, half))?;
    Ok(before_a + reference_len + after_c)
}

/// Table-plane to image homography from the annotated corners, which span
/// the visible (unextended) depth.
pub(crate) fn table_homography(
    annotation: &Annotation,
    width: f64,
    visible_depth: f64,
) -> Result<Homography> {
    let labels: Vec<PointLabel> = (1..=4).map(PointLabel::TableCorner).collect();
    let pts = annotation.require(&labels)?;
    let plane = [1u8, 2, 3, 4].map(|n| {
        let c = corner_position(n, width, visible_depth);
        Point2::new(c[0], c[1])
    });
    let image = [pts[0], pts[1], pts[2], pts[3]];
    Homography::from_correspondences(&plane, &image).ok_or_else(|| {
        GeometryError::InvalidAnnotation("table corners are degenerate (three collinear)".into())
    })
}
