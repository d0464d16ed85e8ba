//! Similarity measures and rank statistics over the 28 prime conditions.

use serde::Serialize;
use thiserror::Error;

mod aggregate;
mod bootstrap;
mod kendall;
mod matrix;
mod pearson;
mod pixels;

pub use aggregate::{aggregate_by_condition, condition_distributions, distributions_csv, ConditionDistribution, ConditionSummary};
pub use bootstrap::{bootstrap_se, BOOTSTRAP_MAX_REDRAWS};
pub use kendall::{kendall_tau, Tau};
pub use matrix::{correlation_matrix, CorrelationMatrix};
pub use pixels::{pixel_cs, pixel_cs_in, pixel_cs_pairs, PixelSpace};
pub use pearson::{letter_similarity_analysis, pearson_r, LetterSimilarityResult, Pearson};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {min} observations, got {n}")]
    TooShort { n: usize, min: usize },
    #[error("input is constant; correlation undefined")]
    Constant,
    #[error("input contains NaN or infinity")]
    NonFinite,
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("bootstrap gave up after {redraws} degenerate resamples in a row")]
    BootstrapDegenerate { redraws: usize },
    #[error("unknown condition index {0}")]
    UnknownCondition(u8),
    #[error("{0}")]
    Invalid(String),
}

/// Cosine of the angle between two vectors, accumulated in f64.
pub fn cosine<T: Copy + Into<f64>>(a: &[T], b: &[T]) -> Result<f64, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch { left: a.len(), right: b.len() });
    }
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y): (f64, f64) = (x.into(), y.into());
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if !(dot.is_finite() && na.is_finite() && nb.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    if na == 0.0 || nb == 0.0 {
        return Err(StatsError::ZeroVector);
    }
    if a.iter().zip(b).all(|(x, y)| (*x).into() == (*y).into()) {
        return Ok(1.0);
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}

pub fn stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub x: String,
    pub y: String,
    pub tau: f64,
    pub p: f64,
    pub se: Option<f64>,
    pub n: usize,
    pub stars: &'static str,
}

impl CorrelationReport {
    pub fn new(x: &str, y: &str, t: Tau, se: Option<f64>, n: usize) -> Self {
        Self { x: x.into(), y: y.into(), tau: t.tau, p: t.p_value, se, n, stars: stars(t.p_value) }
    }

    pub fn significant(&self, alpha: f64) -> bool {
        self.p < alpha
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_basics() {
        let v = [0.3f64, -1.2, 4.0];
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        assert_eq!(cosine(&v, &v).unwrap(), 1.0);
        assert!((cosine(&v, &neg).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let expect = 32.0 / (14f64.sqrt() * 77f64.sqrt());
        assert!((cosine(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap() - expect).abs() < 1e-15);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 1.0]), Err(StatsError::ZeroVector));
        assert!(cosine(&[1.0], &[1.0, 2.0]).is_err());
        assert_eq!(cosine(&[1.0f32, 2.0], &[1.0f32, 2.0]).unwrap(), 1.0);
    }

    #[test]
    fn star_thresholds() {
        assert_eq!(stars(0.0009), "***");
        assert_eq!(stars(0.001), "**");
        assert_eq!(stars(0.049), "*");
        assert_eq!(stars(0.05), "");
    }
}
