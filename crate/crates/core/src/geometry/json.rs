//! Geometry JSON document exchanged by the CLI and the annotation service.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{GeometryError, Point3, Result, SpeakerGeometry, TableModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableJson {
    pub width_in: f64,
    pub depth_in: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryJson {
    pub table: TableJson,
    pub mic: Point3,
    pub mouths_in: BTreeMap<String, Point3>,
    pub distances_in: BTreeMap<String, f64>,
}

impl From<&SpeakerGeometry> for GeometryJson {
    fn from(g: &SpeakerGeometry) -> Self {
        GeometryJson {
            table: TableJson {
                width_in: g.table.width,
                depth_in: g.table.depth,
            },
            mic: g.table.mic,
            mouths_in: g.mouths.clone(),
            distances_in: g.distances.clone(),
        }
    }
}

impl GeometryJson {
    /// Canonical text form: pretty-printed with a trailing newline.
    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("geometry serializes");
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| GeometryError::InvalidGeometry(e.to_string()))
    }

    /// Rebuilds the geometry; the stored depth is taken as final.
    pub fn into_geometry(self) -> Result<SpeakerGeometry> {
        let table = TableModel {
            width: self.table.width_in,
            depth: self.table.depth_in,
            mic: self.mic,
            depth_extension_applied: false,
        };
        table.validate()?;
        let g = SpeakerGeometry::from_mouths(table, self.mouths_in);
        for (id, d) in &self.distances_in {
            match g.distances.get(id) {
                Some(ours) if (ours - d).abs() <= 1e-9 * d.abs().max(1.0) => {}
                _ => {
                    return Err(GeometryError::InvalidGeometry(format!(
                        "distance for {id} does not match its mouth position"
                    )))
                }
            }
        }
        if g.distances.len() != self.distances_in.len() {
            return Err(GeometryError::InvalidGeometry("mouth and distance speaker sets differ".into()));
        }
        Ok(g)
    }
}

/// Ground-truth distance file: `{ "<speaker>": inches, ... }`.
pub fn parse_truth(text: &str) -> Result<BTreeMap<String, f64>> {
    serde_json::from_str(text).map_err(|e| GeometryError::InvalidAnnotation(format!("truth file: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn document_round_trip() {
        let table = TableModel::new(48.0, 37.8).unwrap();
        let mut mouths = BTreeMap::new();
        mouths.insert("S0".to_string(), [0.5, -22.9, 11.25]);
        mouths.insert("S1".to_string(), [28.0, 3.0, 12.0]);
        let g = SpeakerGeometry::from_mouths(table, mouths);
        let text = GeometryJson::from(&g).to_text();
        assert!(text.contains("\"width_in\": 48.0"));
        let back = GeometryJson::from_text(&text).unwrap().into_geometry().unwrap();
        assert_eq!(back.mouths, g.mouths);
        assert_eq!(back.distances, g.distances);
    }

    #[test]
    fn inconsistent_distance_rejected() {
        let text = r#"{"table":{"width_in":48,"depth_in":36},"mic":[0,0,0],
            "mouths_in":{"S0":[0,-22,0]},"distances_in":{"S0":30}}"#;
        assert!(GeometryJson::from_text(text).unwrap().into_geometry().is_err());
    }
}
