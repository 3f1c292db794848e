use nalgebra::Point2;

use super::projective::FittedLine;
use super::{GeometryError, Result};

const COINCIDENT_PX: f64 = 1e-9;
const SINGULAR_DENOMINATOR: f64 = 1e-12;

/// Image projections of four collinear points `A, B, C, D`, in that order
/// along the physical line, with the known physical lengths `AB` and `BC`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollinearQuad {
    pub a: Point2<f64>,
    pub b: Point2<f64>,
    pub c: Point2<f64>,
    pub d: Point2<f64>,
    pub ab: f64,
    pub bc: f64,
    /// Allowed perpendicular deviation as a fraction of the quad's extent.
    pub collinearity_tol: f64,
}

impl CollinearQuad {
    pub fn new(a: Point2<f64>, b: Point2<f64>, c: Point2<f64>, d: Point2<f64>, ab: f64, bc: f64) -> Self {
        CollinearQuad {
            a,
            b,
            c,
            d,
            ab,
            bc,
            collinearity_tol: 0.02,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.collinearity_tol = tol;
        self
    }

    /// Quad from 1D pixel coordinates along the image x axis.
    pub fn from_coordinates(a: f64, b: f64, c: f64, d: f64, ab: f64, bc: f64) -> Self {
        let p = |x| Point2::new(x, 0.0);
        CollinearQuad::new(p(a), p(b), p(c), p(d), ab, bc)
    }

    /// Signed coordinates of the four points on their total-least-squares
    /// line, oriented so that `A` precedes `D`.
    pub fn line_coordinates(&self) -> Result<[f64; 4]> {
        let pts = [self.a, self.b, self.c, self.d];
        if !pts.iter().all(|p| p.x.is_finite() && p.y.is_finite()) {
            return Err(GeometryError::InvalidAnnotation("non-finite quad point".into()));
        }
        let line = FittedLine::fit(&pts);
        let mut t = pts.map(|p| line.coordinate(p));
        if t[3] < t[0] {
            t = t.map(|v| -v);
        }
        let extent = t.iter().cloned().fold(f64::MIN, f64::max) - t.iter().cloned().fold(f64::MAX, f64::min);
        if extent <= COINCIDENT_PX {
            return Err(GeometryError::DegenerateQuad);
        }
        let deviation = pts.iter().map(|p| line.deviation(*p)).fold(0.0, f64::max);
        let limit = self.collinearity_tol * extent;
        if deviation > limit {
            return Err(GeometryError::CollinearityViolation { deviation, limit });
        }
        for i in 0..4 {
            for j in i + 1..4 {
                if (t[i] - t[j]).abs() <= COINCIDENT_PX {
                    return Err(GeometryError::DegenerateQuad);
                }
            }
        }
        Ok(t)
    }
}

/// `R = (AC * BD) / (BC * AD)` from the projected pixel positions.
pub fn cross_ratio(quad: &CollinearQuad) -> Result<f64> {
    let [a, b, c, d] = quad.line_coordinates()?;
    let r = ((c - a) * (d - b)) / ((c - b) * (d - a));
    if !r.is_finite() {
        return Err(GeometryError::DegenerateQuad);
    }
    Ok(r)
}

/// Physical length `CD` that reproduces the observed cross-ratio, given `AB` and `BC`.
pub fn estimate_cd(quad: &CollinearQuad) -> Result<f64> {
    if !(quad.ab.is_finite() && quad.ab > 0.0 && quad.bc.is_finite() && quad.bc > 0.0) {
        return Err(GeometryError::InvalidAnnotation(format!(
            "quad lengths must be positive (ab = {}, bc = {})",
            quad.ab, quad.bc
        )));
    }
    let r = cross_ratio(quad)?;
    cd_from_ratio(r, quad.ab, quad.bc)
}

/// Inverts `R = (AB+BC)(BC+CD) / (BC (AB+BC+CD))` for `CD`.
pub(crate) fn cd_from_ratio(r: f64, ab: f64, bc: f64) -> Result<f64> {
    let ac = ab + bc;
    let denominator = r * bc - ac;
    if denominator.abs() < SINGULAR_DENOMINATOR {
        return Err(GeometryError::InversionSingularity { denominator });
    }
    let cd = bc * ac * (1.0 - r) / denominator;
    if !(cd > 0.0) {
        return Err(GeometryError::NegativeDistance { distance: cd });
    }
    Ok(cd)
}
