use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::PlacementConfig;
use super::{Point3m, Result, RoomSpec, METERS_PER_INCH};
use crate::geometry::SpeakerGeometry;

/// Keeps clamped background sources this far from the walls.
const WALL_MARGIN_M: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneLayout {
    pub room: RoomSpec,
    pub mic: Point3m,
    pub sources: BTreeMap<String, Point3m>,
    /// Room position of the table-centered origin, meters.
    pub origin_offset: Point3m,
}

impl SceneLayout {
    /// Empty layout with the mic at the table-centered origin.
    pub fn new(room: RoomSpec, origin_offset: Point3m) -> Self {
        SceneLayout {
            room,
            mic: origin_offset,
            sources: BTreeMap::new(),
            origin_offset,
        }
    }

    /// Table-centered inches to room meters.
    pub fn to_room(&self, p_in: [f64; 3]) -> Point3m {
        [
            self.origin_offset[0] + METERS_PER_INCH * p_in[0],
            self.origin_offset[1] + METERS_PER_INCH * p_in[1],
            self.origin_offset[2] + METERS_PER_INCH * p_in[2],
        ]
    }

    /// Places the mic and every speaker mouth, plus `placement.noise_sources`
    /// background talkers `noise_distance_m` behind the table's +y edge
    /// (the side away from the camera). Those are spread 1 m apart along x
    /// and clamped inside the room.
    pub fn from_geometry(geometry: &SpeakerGeometry, room: RoomSpec, placement: &PlacementConfig) -> Result<Self> {
        let center = placement.table_center(&room);
        let mut layout = SceneLayout::new(room, center);
        layout.mic = layout.to_room(geometry.table.mic);
        for (id, mouth) in &geometry.mouths {
            layout.sources.insert(id.clone(), layout.to_room(*mouth));
        }
        let edge_y = center[1] + METERS_PER_INCH * geometry.table.depth / 2.0;
        let n = placement.noise_sources;
        for k in 0..n {
            let x = center[0] + (k as f64 - (n as f64 - 1.0) / 2.0);
            let p = [x, edge_y + placement.noise_distance_m, placement.noise_height_m];
            layout.sources.insert(noise_id(k), layout.clamp_inside(p));
        }
        layout.validate()?;
        Ok(layout)
    }

    pub fn clamp_inside(&self, p: Point3m) -> Point3m {
        let mut out = p;
        for k in 0..3 {
            let l = self.room.dimensions[k];
            let m = WALL_MARGIN_M.min(l / 4.0);
            out[k] = p[k].clamp(m, l - m);
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        self.room.validate()?;
        self.room.require_inside(self.mic)?;
        for p in self.sources.values() {
            self.room.require_inside(*p)?;
        }
        Ok(())
    }

    pub fn noise_ids(&self) -> impl Iterator<Item = &String> {
        self.sources.keys().filter(|k| is_noise_id(k))
    }
}

pub fn noise_id(k: usize) -> String {
    format!("noise{k}")
}

pub fn is_noise_id(id: &str) -> bool {
    id.strip_prefix("noise").is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}
