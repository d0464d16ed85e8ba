use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const BUNDLED: &str = include_str!("../../assets/schemes.toml");

#[derive(Debug, Error)]
pub enum ParamError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid scheme parameters: {0}")]
    Parse(String),
    #[error("invalid scheme parameters: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpatialParams {
    pub overlap: f64,
    pub edge: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlapParams {
    pub sigma: f64,
    pub max_separation: usize,
    pub reversed: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriolParams {
    pub first: Vec<f64>,
    pub separation: Vec<f64>,
    pub edge: f64,
}

impl SeriolParams {
    pub fn pair_weight(&self, i: usize, j: usize) -> f64 {
        clamped(&self.first, i) * clamped(&self.separation, j - i - 1)
    }
}

fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

fn non_negative(x: f64) -> bool {
    x.is_finite() && x >= 0.0
}

fn clamped(table: &[f64], i: usize) -> f64 {
    table[i.min(table.len() - 1)]
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Candidates {
    #[serde(default)]
    pub spatial: Vec<SpatialParams>,
    #[serde(default)]
    pub overlap_ob: Vec<OverlapParams>,
    #[serde(default)]
    pub seriol_ob: Vec<SeriolParams>,
}

/// Parameters for every weighted scheme, plus alternative sets for calibration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeParams {
    pub spatial: SpatialParams,
    pub overlap_ob: OverlapParams,
    pub seriol_ob: SeriolParams,
    #[serde(default)]
    pub candidates: Candidates,
}

impl Default for SchemeParams {
    fn default() -> Self {
        Self::from_toml(BUNDLED).expect("bundled scheme parameters are valid")
    }
}

impl SchemeParams {
    pub fn bundled_text() -> &'static str {
        BUNDLED
    }

    pub fn from_toml(text: &str) -> Result<Self, ParamError> {
        let p: Self = toml::from_str(text).map_err(|e| ParamError::Parse(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self, ParamError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ParamError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let bad = |m: &str| Err(ParamError::Invalid(m.to_string()));
        let spatial = std::iter::once(&self.spatial).chain(&self.candidates.spatial);
        for s in spatial {
            if !(s.overlap > 0.0 && s.overlap < 1.0) || !non_negative(s.edge) {
                return bad("spatial.overlap must be in (0,1) and spatial.edge >= 0");
            }
        }
        for o in std::iter::once(&self.overlap_ob).chain(&self.candidates.overlap_ob) {
            if !positive(o.sigma) || o.max_separation == 0 || !non_negative(o.reversed) {
                return bad("overlap_ob needs sigma > 0, max_separation >= 1, reversed >= 0");
            }
        }
        for s in std::iter::once(&self.seriol_ob).chain(&self.candidates.seriol_ob) {
            let finite = |t: &[f64]| !t.is_empty() && t.iter().all(|w| w.is_finite() && *w >= 0.0);
            if !finite(&s.first) || !finite(&s.separation) || !non_negative(s.edge) {
                return bad("seriol_ob tables must be non-empty and non-negative");
            }
        }
        Ok(())
    }
}
