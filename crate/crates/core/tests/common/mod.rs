//! Test-only pinhole camera and synthetic classroom frames.
//!
//! Nothing here calls into the geometry module: scenes are rendered by
//! straightforward perspective projection of known 3D points.

#![allow(dead_code)]

pub mod tables;

use std::collections::BTreeMap;

use crossroom::geometry::{Annotation, PixelPoint, PointLabel};
use nalgebra::{Matrix3, Vector3};

#[derive(Debug, Clone)]
pub struct PinholeCamera {
    eye: Vector3<f64>,
    /// Rows: camera right, down, forward in world coordinates.
    rotation: Matrix3<f64>,
    focal_px: f64,
    cx: f64,
    cy: f64,
}

impl PinholeCamera {
    pub fn look_at(eye: [f64; 3], target: [f64; 3], focal_px: f64, cx: f64, cy: f64) -> Self {
        let eye = Vector3::from(eye);
        let forward = (Vector3::from(target) - eye).normalize();
        let mut up = Vector3::new(0.0, 0.0, 1.0);
        if forward.cross(&up).norm() < 1e-6 {
            up = Vector3::new(0.0, 1.0, 0.0);
        }
        let right = forward.cross(&up).normalize();
        let down = forward.cross(&right);
        let rotation = Matrix3::from_rows(&[right.transpose(), down.transpose(), forward.transpose()]);
        PinholeCamera {
            eye,
            rotation,
            focal_px,
            cx,
            cy,
        }
    }

    /// Camera-frame depth of a world point.
    pub fn depth(&self, p: [f64; 3]) -> f64 {
        (self.rotation * (Vector3::from(p) - self.eye)).z
    }

    pub fn project(&self, p: [f64; 3]) -> [f64; 2] {
        let c = self.rotation * (Vector3::from(p) - self.eye);
        assert!(c.z > 0.0, "point behind camera");
        [self.focal_px * c.x / c.z + self.cx, self.focal_px * c.y / c.z + self.cy]
    }

    /// Pixels per inch of a fronto-parallel object at `p`.
    pub fn scale_at(&self, p: [f64; 3]) -> f64 {
        self.focal_px / self.depth(p)
    }

    /// Local pixels-per-inch for a small displacement along `dir` at `p`.
    pub fn local_scale(&self, p: [f64; 3], dir: [f64; 3]) -> f64 {
        let a = self.project([p[0] - 0.5 * dir[0], p[1] - 0.5 * dir[1], p[2] - 0.5 * dir[2]]);
        let b = self.project([p[0] + 0.5 * dir[0], p[1] + 0.5 * dir[1], p[2] + 0.5 * dir[2]]);
        (b[0] - a[0]).hypot(b[1] - a[1])
    }
}

/// Which table edge a synthetic speaker sits at, by corner pair.
#[derive(Debug, Clone, Copy)]
pub enum Side {
    E12,
    E23,
    E34,
    E41,
}

impl Side {
    fn normal(self) -> [f64; 2] {
        match self {
            Side::E12 => [-1.0, 0.0],
            Side::E23 => [0.0, 1.0],
            Side::E34 => [1.0, 0.0],
            Side::E41 => [0.0, -1.0],
        }
    }

    fn along(self) -> [f64; 2] {
        match self {
            Side::E12 => [0.0, 1.0],
            Side::E23 => [1.0, 0.0],
            Side::E34 => [0.0, -1.0],
            Side::E41 => [-1.0, 0.0],
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticSpeaker {
    pub id: String,
    pub side: Side,
    pub lateral_in: f64,
    pub mouth_height_in: f64,
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub table_width: f64,
    pub table_depth: f64,
    /// Fraction of the true depth visible to the annotator, trimmed evenly
    /// from both width edges.
    pub visible_depth_fraction: f64,
    pub keyboard_width: f64,
    pub keyboard_depth: f64,
    /// Center of the keyboard's front edge (5-6) on the tabletop.
    pub keyboard_front_center: [f64; 2],
    pub monitor_width: f64,
    pub monitor_height: f64,
    /// Center of the monitor base, which runs along the depth direction.
    pub monitor_base_center: [f64; 2],
    pub speaker_offset: f64,
    pub speakers: Vec<SyntheticSpeaker>,
}

impl Scene {
    /// 48 x 36 in table, 17 in keyboard parallel to the 48 in side.
    pub fn classroom() -> Self {
        Scene {
            table_width: 48.0,
            table_depth: 36.0,
            visible_depth_fraction: 1.0,
            keyboard_width: 17.0,
            keyboard_depth: 6.0,
            keyboard_front_center: [-3.0, -11.0],
            monitor_width: 20.0,
            monitor_height: 14.0,
            monitor_base_center: [15.0, 4.0],
            speaker_offset: 4.0,
            speakers: Vec::new(),
        }
    }

    pub fn with_four_speakers(mut self) -> Self {
        let s = |id: &str, side, lateral_in, mouth_height_in| SyntheticSpeaker {
            id: id.to_string(),
            side,
            lateral_in,
            mouth_height_in,
        };
        self.speakers = vec![
            s("S0", Side::E41, 3.0, 12.0),
            s("S1", Side::E12, -2.0, 13.0),
            s("S2", Side::E23, -6.0, 11.0),
            s("S3", Side::E34, 1.5, 12.5),
        ];
        self
    }

    pub fn mouth(&self, sp: &SyntheticSpeaker) -> [f64; 3] {
        let n = sp.side.normal();
        let u = sp.side.along();
        let half = if n[0] != 0.0 { self.table_width / 2.0 } else { self.table_depth / 2.0 };
        let r = half + self.speaker_offset;
        [
            n[0] * r + u[0] * sp.lateral_in,
            n[1] * r + u[1] * sp.lateral_in,
            sp.mouth_height_in,
        ]
    }

    /// Hand resting on the tabletop 3 in inside the edge, in line with the mouth.
    pub fn hand(&self, sp: &SyntheticSpeaker) -> [f64; 3] {
        let n = sp.side.normal();
        let u = sp.side.along();
        let half = if n[0] != 0.0 { self.table_width / 2.0 } else { self.table_depth / 2.0 };
        let r = half - 3.0;
        [n[0] * r + u[0] * sp.lateral_in, n[1] * r + u[1] * sp.lateral_in, 0.0]
    }

    pub fn true_distances(&self) -> BTreeMap<String, f64> {
        self.speakers
            .iter()
            .map(|s| {
                let m = self.mouth(s);
                (s.id.clone(), (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt())
            })
            .collect()
    }

    pub fn render(&self, cam: &PinholeCamera, frame_id: &str) -> Annotation {
        let mut points = Vec::new();
        let mut put = |label: PointLabel, p: [f64; 3]| {
            let q = cam.project(p);
            points.push(PixelPoint::new(label, q[0], q[1]));
        };
        let hw = self.table_width / 2.0;
        let hd = self.table_depth * self.visible_depth_fraction / 2.0;
        put(PointLabel::TableCorner(1), [-hw, -hd, 0.0]);
        put(PointLabel::TableCorner(2), [-hw, hd, 0.0]);
        put(PointLabel::TableCorner(3), [hw, hd, 0.0]);
        put(PointLabel::TableCorner(4), [hw, -hd, 0.0]);

        let [kx, ky] = self.keyboard_front_center;
        let kw = self.keyboard_width / 2.0;
        put(PointLabel::Keyboard(5), [kx - kw, ky, 0.0]);
        put(PointLabel::Keyboard(6), [kx + kw, ky, 0.0]);
        put(PointLabel::Keyboard(7), [kx + kw, ky + self.keyboard_depth, 0.0]);
        put(PointLabel::Keyboard(8), [kx - kw, ky + self.keyboard_depth, 0.0]);

        let [mx, my] = self.monitor_base_center;
        let mw = self.monitor_width / 2.0;
        let mh = self.monitor_height;
        put(PointLabel::Monitor(9), [mx, my - mw, 0.0]);
        put(PointLabel::Monitor(10), [mx, my + mw, 0.0]);
        put(PointLabel::Monitor(11), [mx, my + mw, mh]);
        put(PointLabel::Monitor(12), [mx, my - mw, mh]);

        let mut scales = BTreeMap::new();
        for sp in &self.speakers {
            let mouth = self.mouth(sp);
            put(PointLabel::Head(sp.id.clone()), mouth);
            put(PointLabel::Hand(sp.id.clone()), self.hand(sp));
            // what a ruler held up facing the camera at the mouth would read
            scales.insert(sp.id.clone(), cam.scale_at(mouth));
        }

        Annotation {
            frame_id: frame_id.to_string(),
            keyboard_width: self.keyboard_width,
            monitor_width: Some(self.monitor_width),
            speaker_ids: self.speakers.iter().map(|s| s.id.clone()).collect(),
            per_speaker_scale: scales,
            points,
        }
    }
}

/// A tripod at standing height (about 30 in above a classroom tabletop),
/// in front of the table and slightly off axis.
pub fn tripod_camera() -> PinholeCamera {
    PinholeCamera::look_at([18.0, -130.0, 30.0], [0.0, 2.0, 0.0], 1000.0, 960.0, 540.0)
}
