use std::collections::BTreeMap;

use super::{GeometryConfig, GeometryError, Point3, Result, SpeakerGeometry, TableModel};

/// Equidistant baseline: speakers at equal arc-length spacing along the
/// table outline grown by `speaker_offset_in`, starting at the midpoint of
/// edge 4-1 and walking toward corner 1, then along 1-2, 2-3 and 3-4.
/// All mouths sit at `mouth_height_in`.
pub fn baseline_geometry(
    table: &TableModel,
    speaker_ids: &[String],
    mouth_height_in: f64,
    config: &GeometryConfig,
) -> Result<SpeakerGeometry> {
    table.validate()?;
    if speaker_ids.is_empty() {
        return Err(GeometryError::InvalidGeometry("baseline needs at least one speaker".into()));
    }
    if !mouth_height_in.is_finite() {
        return Err(GeometryError::InvalidGeometry(format!("mouth height {mouth_height_in}")));
    }
    let a = table.width / 2.0 + config.speaker_offset_in;
    let b = table.depth / 2.0 + config.speaker_offset_in;
    let waypoints = [[0.0, -b], [-a, -b], [-a, b], [a, b], [a, -b], [0.0, -b]];
    let perimeter = 4.0 * (a + b);
    let spacing = perimeter / speaker_ids.len() as f64;

    let mut mouths = BTreeMap::new();
    for (k, id) in speaker_ids.iter().enumerate() {
        let [x, y] = point_at(&waypoints, k as f64 * spacing);
        let mouth: Point3 = [x, y, mouth_height_in];
        mouths.insert(id.clone(), mouth);
    }
    Ok(SpeakerGeometry::from_mouths(*table, mouths))
}

fn point_at(waypoints: &[[f64; 2]], mut s: f64) -> [f64; 2] {
    for w in waypoints.windows(2) {
        let (p, q) = (w[0], w[1]);
        let len = (q[0] - p[0]).hypot(q[1] - p[1]);
        if s <= len {
            let t = s / len;
            return [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])];
        }
        s -= len;
    }
    *waypoints.last().expect("non-empty path")
}
