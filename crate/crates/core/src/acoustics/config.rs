//! Scene configuration file (TOML). Keys carry their unit as a suffix.
//!
//! ```toml
//! [room]
//! dimensions_m = [6.0, 5.0, 3.0]
//! absorption = 0.35            # or six values: x0, x1, y0, y1, floor, ceiling
//! max_order = 10
//! sample_rate_hz = 16000
//! speed_of_sound_m_s = 343.0
//!
//! [placement]
//! table_center_m = [3.0, 2.5, 0.75]
//! noise_sources = 2
//! noise_distance_m = 2.0
//! noise_height_m = 1.2
//!
//! [mixing]
//! snr_db = 10.0
//! overlap_fraction = 0.2
//! ```

use serde::{Deserialize, Serialize};

use super::{AcousticsError, Point3m, Result, RoomSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Absorption {
    Uniform(f64),
    PerWall([f64; 6]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoomConfig {
    pub dimensions_m: Point3m,
    pub absorption: Absorption,
    pub max_order: u32,
    pub sample_rate_hz: u32,
    pub speed_of_sound_m_s: f64,
}

impl Default for RoomConfig {
    fn default() -> Self {
        let r = RoomSpec::default();
        RoomConfig {
            dimensions_m: r.dimensions,
            absorption: Absorption::Uniform(r.absorption[0]),
            max_order: r.max_order,
            sample_rate_hz: r.sample_rate,
            speed_of_sound_m_s: r.speed_of_sound,
        }
    }
}

impl RoomConfig {
    pub fn to_spec(&self) -> Result<RoomSpec> {
        let spec = RoomSpec {
            dimensions: self.dimensions_m,
            absorption: match self.absorption {
                Absorption::Uniform(a) => [a; 6],
                Absorption::PerWall(a) => a,
            },
            max_order: self.max_order,
            sample_rate: self.sample_rate_hz,
            speed_of_sound: self.speed_of_sound_m_s,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlacementConfig {
    /// Room position of the table center; defaults to the middle of the
    /// floor plan at 0.75 m.
    pub table_center_m: Option<Point3m>,
    pub noise_sources: usize,
    pub noise_distance_m: f64,
    pub noise_height_m: f64,
}

impl Default for PlacementConfig {
    fn default() -> Self {
        PlacementConfig {
            table_center_m: None,
            noise_sources: 2,
            noise_distance_m: 2.0,
            noise_height_m: 1.2,
        }
    }
}

impl PlacementConfig {
    pub fn table_center(&self, room: &RoomSpec) -> Point3m {
        self.table_center_m
            .unwrap_or([room.dimensions[0] / 2.0, room.dimensions[1] / 2.0, 0.75])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MixingConfig {
    pub snr_db: f64,
    pub overlap_fraction: f64,
}

impl Default for MixingConfig {
    fn default() -> Self {
        MixingConfig {
            snr_db: 10.0,
            overlap_fraction: 0.2,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneConfig {
    pub room: RoomConfig,
    pub placement: PlacementConfig,
    pub mixing: MixingConfig,
}

impl SceneConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: SceneConfig = toml::from_str(text).map_err(|e| AcousticsError::InvalidConfig(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        self.room.to_spec()?;
        let m = &self.mixing;
        if !(0.0..1.0).contains(&m.overlap_fraction) {
            return Err(AcousticsError::InvalidConfig(format!("overlap_fraction {}", m.overlap_fraction)));
        }
        if !m.snr_db.is_finite() {
            return Err(AcousticsError::InvalidConfig(format!("snr_db {}", m.snr_db)));
        }
        let p = &self.placement;
        if !(p.noise_distance_m.is_finite() && p.noise_height_m.is_finite()) {
            return Err(AcousticsError::InvalidConfig("noise placement must be finite".into()));
        }
        Ok(())
    }
}
