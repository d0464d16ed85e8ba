//! Scores parameter sets against the reference per-condition match values.

use serde::Serialize;
use thiserror::Error;

use super::{Matcher, Scheme, SchemeParams};
use crate::ingest::fixtures::load_fixtures;
use crate::lexicon::catalog;

/// Tolerance for the calibrated schemes.
pub const CALIBRATED_TOLERANCE: f64 = 0.01;
/// Tolerance for the parameter-free schemes (reference values carry two decimals).
pub const EXACT_TOLERANCE: f64 = 0.005;

#[derive(Debug, Error)]
#[error("{scheme}: best candidate misses the reference by {max_error:.4} (tolerance {tolerance})")]
pub struct CalibrationError {
    pub scheme: Scheme,
    pub max_error: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CalibrationRow {
    pub short_code: &'static str,
    pub reference: f64,
    pub predicted: f64,
}

impl CalibrationRow {
    pub fn error(&self) -> f64 {
        (self.predicted - self.reference).abs()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CalibrationReport {
    pub scheme: Scheme,
    pub rows: Vec<CalibrationRow>,
    pub max_error: f64,
}

impl CalibrationReport {
    pub fn within(&self, tolerance: f64) -> bool {
        self.max_error <= tolerance + 1e-9
    }

    pub fn worst(&self) -> &CalibrationRow {
        self.rows.iter().max_by(|a, b| a.error().total_cmp(&b.error())).expect("28 rows")
    }
}

pub fn reference_column(scheme: Scheme) -> Vec<f64> {
    load_fixtures().column(scheme.column()).expect("fixture has every scheme column").to_vec()
}

pub fn evaluate(matcher: &Matcher, scheme: Scheme) -> CalibrationReport {
    let reference = reference_column(scheme);
    let rows: Vec<CalibrationRow> = catalog()
        .iter()
        .zip(reference)
        .map(|(cond, r)| CalibrationRow {
            short_code: cond.short_code,
            reference: r,
            predicted: matcher.condition_match(scheme, cond),
        })
        .collect();
    let max_error = rows.iter().map(CalibrationRow::error).fold(0.0, f64::max);
    CalibrationReport { scheme, rows, max_error }
}

/// Parameter sets tried for one scheme: the configured one first, then the candidates.
fn variants(params: &SchemeParams, scheme: Scheme) -> Vec<SchemeParams> {
    let mut out = vec![params.clone()];
    let with = |f: &dyn Fn(&mut SchemeParams)| {
        let mut p = params.clone();
        f(&mut p);
        p
    };
    match scheme {
        Scheme::SpatialCoding => {
            out.extend(params.candidates.spatial.iter().map(|c| with(&|p| p.spatial = c.clone())))
        }
        Scheme::OverlapOB => {
            out.extend(params.candidates.overlap_ob.iter().map(|c| with(&|p| p.overlap_ob = c.clone())))
        }
        Scheme::SeriolOB => {
            out.extend(params.candidates.seriol_ob.iter().map(|c| with(&|p| p.seriol_ob = c.clone())))
        }
        Scheme::Absolute | Scheme::BinaryOB => {}
    }
    out
}

/// Best-scoring parameter set for `scheme`, or an error if none is within tolerance.
pub fn select(params: &SchemeParams, scheme: Scheme, tolerance: f64) -> Result<(SchemeParams, CalibrationReport), CalibrationError> {
    let (best, report) = variants(params, scheme)
        .into_iter()
        .map(|p| {
            let r = evaluate(&Matcher::new(p.clone()), scheme);
            (p, r)
        })
        .min_by(|a, b| a.1.max_error.total_cmp(&b.1.max_error))
        .expect("at least the configured set");
    if report.within(tolerance) {
        Ok((best, report))
    } else {
        Err(CalibrationError { scheme, max_error: report.max_error, tolerance })
    }
}

/// Runs selection for all three weighted schemes and returns the combined parameter set.
pub fn calibrate(params: &SchemeParams) -> Result<SchemeParams, CalibrationError> {
    let mut out = params.clone();
    out.spatial = select(params, Scheme::SpatialCoding, CALIBRATED_TOLERANCE)?.0.spatial;
    out.overlap_ob = select(params, Scheme::OverlapOB, CALIBRATED_TOLERANCE)?.0.overlap_ob;
    out.seriol_ob = select(params, Scheme::SeriolOB, CALIBRATED_TOLERANCE)?.0.seriol_ob;
    Ok(out)
}
