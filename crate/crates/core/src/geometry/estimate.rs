//! One call from an annotation to the geometry document plus everything an
//! overlay needs. Shared by the CLI and the HTTP service so both emit the
//! same bytes.

use serde::Serialize;

use super::json::GeometryJson;
use super::speakers::{estimate_speakers_detailed, SpeakerDiagnostic};
use super::table::{estimate_table_detailed, Diagnostics};
use super::{baseline_geometry, Annotation, GeometryConfig, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    CrossRatio,
    /// Table from cross-ratios, speakers spaced equally around it.
    Baseline,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateDiagnostics {
    pub method: EstimateMethod,
    pub visible_depth_in: f64,
    pub table: Diagnostics,
    pub speakers: Vec<SpeakerDiagnostic>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateResponse {
    pub geometry: GeometryJson,
    pub diagnostics: EstimateDiagnostics,
}

pub fn estimate_frame(
    annotation: &Annotation,
    config: &GeometryConfig,
    method: EstimateMethod,
) -> Result<EstimateResponse> {
    let fit = estimate_table_detailed(annotation, config)?;
    let (geometry, speakers) = match method {
        EstimateMethod::CrossRatio => estimate_speakers_detailed(annotation, &fit.table, config)?,
        EstimateMethod::Baseline => (
            baseline_geometry(&fit.table, &annotation.speaker_ids, config.default_mouth_height_in, config)?,
            Vec::new(),
        ),
    };
    geometry.validate(config.speaker_offset_in)?;
    let mut warnings = fit.diagnostics.warnings.clone();
    for s in &speakers {
        warnings.extend(s.warnings.iter().map(|w| format!("{}: {w}", s.speaker)));
    }
    Ok(EstimateResponse {
        geometry: GeometryJson::from(&geometry),
        diagnostics: EstimateDiagnostics {
            method,
            visible_depth_in: fit.visible_depth,
            table: fit.diagnostics,
            speakers,
            warnings,
        },
    })
}
