//! Homogeneous 2D primitives: lines, intersections, line fitting and
//! plane-to-image homographies.

use nalgebra::{Matrix3, Point2, SMatrix, SVector, Vector3};

/// Points and lines of the projective plane share one representation.
pub type Hom = Vector3<f64>;

pub fn hom(p: Point2<f64>) -> Hom {
    Vector3::new(p.x, p.y, 1.0)
}

/// Line through two points, or point on two lines.
pub fn join(p: &Hom, q: &Hom) -> Hom {
    p.cross(q)
}

pub fn meet(l: &Hom, m: &Hom) -> Hom {
    l.cross(m)
}

/// Euclidean point of a homogeneous point; `None` at (or numerically near) infinity.
pub fn euclid(p: &Hom) -> Option<Point2<f64>> {
    let scale = p.x.abs().max(p.y.abs()).max(1.0);
    if p.z.abs() <= 1e-12 * scale {
        return None;
    }
    Some(Point2::new(p.x / p.z, p.y / p.z))
}

/// Unit direction vector of an image line `ax + by + c = 0`.
pub fn line_direction(l: &Hom) -> [f64; 2] {
    let n = l.x.hypot(l.y);
    [-l.y / n, l.x / n]
}

/// Acute angle between two image lines, in degrees.
pub fn line_angle_deg(l: &Hom, m: &Hom) -> f64 {
    let a = line_direction(l);
    let b = line_direction(m);
    let cross = (a[0] * b[1] - a[1] * b[0]).abs();
    let dot = (a[0] * b[0] + a[1] * b[1]).abs();
    cross.atan2(dot).to_degrees()
}

/// Line normalised so that (a, b) is a unit normal.
pub fn normalized_line(l: &Hom) -> [f64; 3] {
    let n = l.x.hypot(l.y);
    [l.x / n, l.y / n, l.z / n]
}

/// Foot of the perpendicular from `p` onto the line.
pub fn perpendicular_foot(l: &Hom, p: Point2<f64>) -> Point2<f64> {
    let [a, b, c] = normalized_line(l);
    let d = a * p.x + b * p.y + c;
    Point2::new(p.x - d * a, p.y - d * b)
}

/// Total-least-squares line through a point set.
#[derive(Debug, Clone, Copy)]
pub struct FittedLine {
    pub centroid: Point2<f64>,
    /// Unit vector along the line.
    pub direction: [f64; 2],
}

impl FittedLine {
    pub fn fit(points: &[Point2<f64>]) -> Self {
        let n = points.len() as f64;
        let cx = points.iter().map(|p| p.x).sum::<f64>() / n;
        let cy = points.iter().map(|p| p.y).sum::<f64>() / n;
        let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
        for p in points {
            let dx = p.x - cx;
            let dy = p.y - cy;
            sxx += dx * dx;
            syy += dy * dy;
            sxy += dx * dy;
        }
        // principal axis of the 2x2 scatter matrix
        let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
        FittedLine {
            centroid: Point2::new(cx, cy),
            direction: [theta.cos(), theta.sin()],
        }
    }

    /// Signed coordinate of the orthogonal projection of `p` along the line.
    pub fn coordinate(&self, p: Point2<f64>) -> f64 {
        (p.x - self.centroid.x) * self.direction[0] + (p.y - self.centroid.y) * self.direction[1]
    }

    /// Perpendicular distance of `p` from the line.
    pub fn deviation(&self, p: Point2<f64>) -> f64 {
        ((p.x - self.centroid.x) * -self.direction[1] + (p.y - self.centroid.y) * self.direction[0])
            .abs()
    }

    pub fn as_hom(&self) -> Hom {
        let q = Point2::new(
            self.centroid.x + self.direction[0],
            self.centroid.y + self.direction[1],
        );
        join(&hom(self.centroid), &hom(q))
    }
}

/// Plane-to-image homography estimated from exactly four correspondences.
#[derive(Debug, Clone, Copy)]
pub struct Homography(pub Matrix3<f64>);

impl Homography {
    /// Returns `None` when the correspondences are degenerate (three collinear points).
    pub fn from_correspondences(plane: &[Point2<f64>; 4], image: &[Point2<f64>; 4]) -> Option<Self> {
        // Normalise both sides so the 8x8 system is well conditioned.
        let tp = normalizer(plane);
        let ti = normalizer(image);
        let mut a = SMatrix::<f64, 8, 8>::zeros();
        let mut b = SVector::<f64, 8>::zeros();
        for k in 0..4 {
            let p = tp * hom(plane[k]);
            let q = ti * hom(image[k]);
            let (x, y) = (p.x / p.z, p.y / p.z);
            let (u, v) = (q.x / q.z, q.y / q.z);
            let r = 2 * k;
            a.set_row(r, &SMatrix::<f64, 1, 8>::from_row_slice(&[x, y, 1.0, 0.0, 0.0, 0.0, -u * x, -u * y]));
            a.set_row(r + 1, &SMatrix::<f64, 1, 8>::from_row_slice(&[0.0, 0.0, 0.0, x, y, 1.0, -v * x, -v * y]));
            b[r] = u;
            b[r + 1] = v;
        }
        let h = a.lu().solve(&b)?;
        let hn = Matrix3::new(h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], 1.0);
        let full = ti.try_inverse()? * hn * tp;
        if !full.iter().all(|v| v.is_finite()) {
            return None;
        }
        Some(Homography(full))
    }

    pub fn apply(&self, p: Point2<f64>) -> Hom {
        self.0 * hom(p)
    }

    pub fn map(&self, p: Point2<f64>) -> Option<Point2<f64>> {
        euclid(&self.apply(p))
    }

    pub fn inverse(&self) -> Option<Self> {
        self.0.try_inverse().map(Homography)
    }
}

fn normalizer(points: &[Point2<f64>; 4]) -> Matrix3<f64> {
    let cx = points.iter().map(|p| p.x).sum::<f64>() / 4.0;
    let cy = points.iter().map(|p| p.y).sum::<f64>() / 4.0;
    let mean_dist = points
        .iter()
        .map(|p| (p.x - cx).hypot(p.y - cy))
        .sum::<f64>()
        / 4.0;
    let s = if mean_dist > 0.0 { std::f64::consts::SQRT_2 / mean_dist } else { 1.0 };
    Matrix3::new(s, 0.0, -s * cx, 0.0, s, -s * cy, 0.0, 0.0, 1.0)
}
