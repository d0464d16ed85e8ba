use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::kendall::validate;
use super::StatsError;
use crate::ingest::LetterRatings;
use crate::prime_gen::PrimeRecord;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Pearson {
    pub r: f64,
    /// Two-sided t-test with n − 2 degrees of freedom.
    pub p: f64,
    pub n: usize,
}

pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<Pearson, StatsError> {
    validate(x, y)?;
    let n = x.len();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n as f64;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::Constant);
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let df = (n - 2) as f64;
    let p = if r.abs() == 1.0 {
        0.0
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
        2.0 * (1.0 - dist.cdf(t.abs()))
    };
    Ok(Pearson { r, p, n })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LetterSimilarityResult {
    pub short_code: &'static str,
    pub r: f64,
    pub p: f64,
    pub n: usize,
}

/// Substitution conditions examined, in initial / middle / final order.
pub const SUBSTITUTION_CONDITIONS: [&str; 3] = ["SN-I", "SN-M", "SN-F"];

/// For each single-letter substitution condition, correlates the rated visual
/// similarity of (original, substituted) letter with the per-target similarity.
pub fn letter_similarity_analysis(
    records: &[(PrimeRecord, f64)],
    ratings: &LetterRatings,
) -> Result<Vec<LetterSimilarityResult>, StatsError> {
    SUBSTITUTION_CONDITIONS
        .iter()
        .map(|&code| {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for (rec, sim) in records.iter().filter(|(r, _)| r.short_code == code) {
                let (t, p) = (rec.target.as_bytes(), rec.prime.as_bytes());
                let pos = (0..t.len().min(p.len())).find(|&i| t[i] != p[i]).ok_or_else(|| {
                    StatsError::Invalid(format!("{}: prime {} does not substitute a letter", code, rec.prime))
                })?;
                let rating = ratings
                    .get(t[pos], p[pos])
                    .ok_or_else(|| StatsError::Invalid(format!("no rating for {}/{}", t[pos] as char, p[pos] as char)))?;
                xs.push(rating);
                ys.push(*sim);
            }
            let r = pearson_r(&xs, &ys)?;
            Ok(LetterSimilarityResult { short_code: code, r: r.r, p: r.p, n: r.n })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_relations() {
        let x = [1.0, 2.0, 4.0, 7.0, 11.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson_r(&x, &y).unwrap().r - 1.0).abs() < 1e-15);
        assert!((pearson_r(&x, &neg).unwrap().r + 1.0).abs() < 1e-15);
        assert_eq!(pearson_r(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(StatsError::Constant));
    }

    #[test]
    fn hand_computed_five_points() {
        // x = 1..5, y = [2, 4, 5, 4, 5]: sxy = 6, sxx = 10, syy = 6 -> r = 6 / sqrt(60)
        let p = pearson_r(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 4.0, 5.0, 4.0, 5.0]).unwrap();
        assert!((p.r - 6.0 / 60f64.sqrt()).abs() < 1e-15);
        // scipy.stats.pearsonr gives p = 0.1240270626575546
        assert!((p.p - 0.124_027_062_657_554_6).abs() < 1e-10, "{}", p.p);
    }
}
