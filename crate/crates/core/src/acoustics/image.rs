use super::{Point3m, Result, RoomSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageSource {
    pub position: Point3m,
    /// Product of the wall reflection coefficients along the path.
    pub coefficient: f64,
    /// Number of wall reflections.
    pub order: u32,
}

/// All mirror images of `source` reached with at most `max_order` reflections.
///
/// Along each axis an image is indexed by (n, q) with n an integer and q in
/// {0, 1}: position (1 - 2q) s + 2nL, reflecting |n - q| times off the wall
/// at 0 and |n| times off the wall at L.
pub fn image_sources(room: &RoomSpec, source: Point3m, max_order: u32) -> Result<Vec<ImageSource>> {
    room.validate()?;
    room.require_inside(source)?;
    let beta = room.reflection();
    let n_max = max_order as i64;

    // per-axis candidates: (coordinate, reflections, coefficient)
    let axis = |k: usize| {
        let (s, l) = (source[k], room.dimensions[k]);
        let (b0, b1) = (beta[2 * k], beta[2 * k + 1]);
        let mut out = Vec::new();
        for n in -n_max..=n_max {
            for q in 0..=1i64 {
                let at_zero = (n - q).unsigned_abs() as u32;
                let at_far = n.unsigned_abs() as u32;
                if at_zero + at_far > max_order {
                    continue;
                }
                let x = (1 - 2 * q) as f64 * s + 2.0 * n as f64 * l;
                out.push((x, at_zero + at_far, b0.powi(at_zero as i32) * b1.powi(at_far as i32)));
            }
        }
        out
    };
    let (ax, ay, az) = (axis(0), axis(1), axis(2));

    let mut images = Vec::new();
    for &(x, ox, cx) in &ax {
        for &(y, oy, cy) in &ay {
            if ox + oy > max_order {
                continue;
            }
            for &(z, oz, cz) in &az {
                let order = ox + oy + oz;
                if order > max_order {
                    continue;
                }
                images.push(ImageSource {
                    position: [x, y, z],
                    coefficient: cx * cy * cz,
                    order,
                });
            }
        }
    }
    images.sort_by_key(|i| i.order);
    Ok(images)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_zero_is_the_source() {
        let room = RoomSpec::default();
        let im = image_sources(&room, [1.0, 2.0, 1.5], 0).unwrap();
        assert_eq!(im.len(), 1);
        assert_eq!(im[0].position, [1.0, 2.0, 1.5]);
        assert_eq!(im[0].coefficient, 1.0);
    }

    #[test]
    fn first_order_has_seven() {
        let room = RoomSpec::default();
        assert_eq!(image_sources(&room, [1.0, 2.0, 1.5], 1).unwrap().len(), 7);
    }

    #[test]
    fn reflective_cube_first_order_at_ten_meters() {
        let room = RoomSpec {
            dimensions: [10.0; 3],
            absorption: [0.0; 6],
            ..RoomSpec::default()
        };
        let s = [5.0; 3];
        let im = image_sources(&room, s, 1).unwrap();
        let first: Vec<_> = im.iter().filter(|i| i.order == 1).collect();
        assert_eq!(first.len(), 6);
        for i in first {
            assert!((super::super::distance(i.position, s) - 10.0).abs() < 1e-12);
            assert_eq!(i.coefficient, 1.0);
        }
    }

    #[test]
    fn outside_source_rejected() {
        let room = RoomSpec::default();
        assert!(image_sources(&room, [-0.1, 1.0, 1.0], 2).is_err());
    }
}
