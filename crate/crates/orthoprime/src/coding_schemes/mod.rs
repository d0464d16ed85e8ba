//! Orthographic match values between a prime and a target.
//!
//! All schemes return a value in [0, 1] normalised by the target's match with
//! itself, so an identity prime always scores 1.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::exec::Exec;
use crate::lexicon::{catalog, LetterString, PrimeCondition};
use crate::prime_gen::{PrimeSet, TransformCode};

pub mod calibration;
mod params;

pub use params::{Candidates, OverlapParams, ParamError, SchemeParams, SeriolParams, SpatialParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    Absolute,
    SpatialCoding,
    BinaryOB,
    OverlapOB,
    SeriolOB,
}

impl Scheme {
    pub const ALL: [Scheme; 5] =
        [Scheme::Absolute, Scheme::SpatialCoding, Scheme::BinaryOB, Scheme::OverlapOB, Scheme::SeriolOB];

    /// Column label used in tables and CSV output.
    pub fn column(self) -> &'static str {
        match self {
            Scheme::Absolute => "Absolute",
            Scheme::SpatialCoding => "SC",
            Scheme::BinaryOB => "BOB",
            Scheme::OverlapOB => "OOB",
            Scheme::SeriolOB => "SOB",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Scheme::Absolute => "absolute",
            Scheme::SpatialCoding => "spatial",
            Scheme::BinaryOB => "binary_ob",
            Scheme::OverlapOB => "overlap_ob",
            Scheme::SeriolOB => "seriol_ob",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.key().eq_ignore_ascii_case(s) || sc.column().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown scheme {s:?} (expected one of absolute, spatial, binary_ob, overlap_ob, seriol_ob)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MatchValue {
    pub scheme: Scheme,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Gap {
    /// Number of intervening letters.
    Interior(usize),
    /// Word-boundary bigram.
    Edge,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeightedBigram {
    pub first: u8,
    pub second: u8,
    pub weight: f64,
    pub gap: Gap,
}

/// Ordered pairs `(s[i], s[j])`, `i < j`, with at most `max_gap` letters between
/// them. Repeated pairs keep their smallest gap.
pub fn open_bigrams(s: &[u8], max_gap: usize) -> Vec<WeightedBigram> {
    let mut out: Vec<WeightedBigram> = Vec::new();
    for i in 0..s.len() {
        for j in i + 1..s.len().min(i + max_gap + 2) {
            if out.iter().any(|b| b.first == s[i] && b.second == s[j]) {
                continue;
            }
            out.push(WeightedBigram { first: s[i], second: s[j], weight: 1.0, gap: Gap::Interior(j - i - 1) });
        }
    }
    out
}

/// Left-aligned slot match: target positions whose letter the prime repeats in place.
pub fn absolute(prime: &[u8], target: &[u8]) -> f64 {
    if target.is_empty() {
        return 0.0;
    }
    let hits = target.iter().zip(prime).filter(|(t, p)| t == p).count();
    hits as f64 / target.len() as f64
}

pub const BINARY_MAX_GAP: usize = 2;

/// Shared open bigrams (up to two intervening letters) over the target's bigram count.
pub fn binary_ob(prime: &[u8], target: &[u8]) -> f64 {
    let t = open_bigrams(target, BINARY_MAX_GAP);
    if t.is_empty() {
        return exact(prime, target);
    }
    let p = open_bigrams(prime, BINARY_MAX_GAP);
    let shared = t.iter().filter(|b| p.iter().any(|q| q.first == b.first && q.second == b.second)).count();
    shared as f64 / t.len() as f64
}

fn exact(prime: &[u8], target: &[u8]) -> f64 {
    if prime == target {
        1.0
    } else {
        0.0
    }
}

/// Spatial coding: each target letter found in the prime contributes a position
/// signal centred on its offset. The match is the best superposition over the
/// candidate alignments, plus end-letter markers, over the target's own total.
pub fn spatial(prime: &[u8], target: &[u8], p: &SpatialParams) -> f64 {
    if prime.is_empty() || target.is_empty() {
        return 0.0;
    }
    let offsets: Vec<f64> = target
        .iter()
        .enumerate()
        .filter_map(|(i, c)| nearest(prime, *c, i).map(|j| j as f64 - i as f64))
        .collect();
    let best = offsets
        .iter()
        .map(|theta| offsets.iter().map(|d| p.overlap.powf((d - theta).powi(2))).sum::<f64>())
        .fold(0.0, f64::max);
    let mut ends = 0.0;
    if prime[0] == target[0] {
        ends += p.edge;
    }
    if prime[prime.len() - 1] == target[target.len() - 1] {
        ends += p.edge;
    }
    ((best + ends) / (target.len() as f64 + 2.0 * p.edge)).clamp(0.0, 1.0)
}

/// Occurrence of `c` in `s` closest to position `i` (earlier wins ties).
fn nearest(s: &[u8], c: u8, i: usize) -> Option<usize> {
    s.iter().enumerate().filter(|(_, x)| **x == c).map(|(j, _)| j).min_by_key(|j| j.abs_diff(i))
}

/// Packed `(first, second)` key and weight.
pub type Feature = (u16, f64);

const EDGE: u8 = 0;

fn key(a: u8, b: u8) -> u16 {
    (a as u16) << 8 | b as u16
}

/// Sort and merge duplicate keys, keeping the largest weight.
fn collapse(mut v: Vec<Feature>) -> Vec<Feature> {
    v.retain(|f| f.1 > 0.0);
    v.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.total_cmp(&a.1)));
    v.dedup_by_key(|f| f.0);
    v
}

fn weighted_match(prime: &[Feature], target: &[Feature], fallback: f64) -> f64 {
    let norm: f64 = target.iter().map(|f| f.1 * f.1).sum();
    if norm == 0.0 {
        return fallback;
    }
    let (mut i, mut j, mut dot) = (0, 0, 0.0);
    while i < prime.len() && j < target.len() {
        match prime[i].0.cmp(&target[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot += prime[i].1 * target[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    (dot / norm).clamp(0.0, 1.0)
}

pub fn overlap_features(s: &[u8], p: &OverlapParams) -> Vec<Feature> {
    let mut v = Vec::new();
    for i in 0..s.len() {
        for j in i + 1..s.len().min(i + p.max_separation + 1) {
            let d = (j - i - 1) as f64;
            v.push((key(s[i], s[j]), (-d * d / (2.0 * p.sigma * p.sigma)).exp()));
        }
        if i + 1 < s.len() {
            v.push((key(s[i + 1], s[i]), p.reversed));
        }
    }
    collapse(v)
}

/// Overlap open bigrams: forward pairs weighted by a Gaussian of their
/// separation, plus weakly weighted reversed neighbours.
pub fn overlap_ob(prime: &[u8], target: &[u8], p: &OverlapParams) -> f64 {
    weighted_match(&overlap_features(prime, p), &overlap_features(target, p), exact(prime, target))
}

pub fn seriol_features(s: &[u8], p: &SeriolParams) -> Vec<Feature> {
    let mut v = Vec::new();
    if let Some(&first) = s.first() {
        v.push((key(EDGE, first), p.edge));
    }
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            v.push((key(s[i], s[j]), p.pair_weight(i, j)));
        }
    }
    collapse(v)
}

/// SERIOL open bigrams: every ordered pair, weighted by the position of its
/// first letter and by separation, plus a start-of-word edge bigram.
pub fn seriol_ob(prime: &[u8], target: &[u8], p: &SeriolParams) -> f64 {
    weighted_match(&seriol_features(prime, p), &seriol_features(target, p), exact(prime, target))
}

/// Scores prime–target pairs under one parameter set.
#[derive(Clone, Debug, Default)]
pub struct Matcher {
    pub params: SchemeParams,
}

impl Matcher {
    pub fn new(params: SchemeParams) -> Self {
        Self { params }
    }

    pub fn score(&self, scheme: Scheme, prime: &[u8], target: &[u8]) -> f64 {
        match scheme {
            Scheme::Absolute => absolute(prime, target),
            Scheme::SpatialCoding => spatial(prime, target, &self.params.spatial),
            Scheme::BinaryOB => binary_ob(prime, target),
            Scheme::OverlapOB => overlap_ob(prime, target, &self.params.overlap_ob),
            Scheme::SeriolOB => seriol_ob(prime, target, &self.params.seriol_ob),
        }
    }

    pub fn match_value(&self, scheme: Scheme, prime: &LetterString, target: &LetterString) -> MatchValue {
        MatchValue { scheme, value: self.score(scheme, prime.as_bytes(), target.as_bytes()) }
    }

    /// Mean over the condition's codes, with every random-letter slot filled by
    /// a letter that matches nothing in the target.
    pub fn condition_match(&self, scheme: Scheme, cond: &PrimeCondition) -> f64 {
        let total: f64 = cond.codes.iter().map(|c| self.score(scheme, &symbolic_prime(c), SYMBOLIC_TARGET)).sum();
        total / cond.codes.len() as f64
    }

    /// 28 × |schemes| table of condition match values in catalog order.
    pub fn condition_table(&self, schemes: &[Scheme], exec: Exec) -> Vec<Vec<f64>> {
        let conds: Vec<&PrimeCondition> = catalog().iter().collect();
        exec.map(&conds, |c| schemes.iter().map(|s| self.condition_match(*s, c)).collect())
    }

    /// Per-condition mean over concrete primes (one value per condition index 1..=28).
    pub fn prime_set_means(&self, scheme: Scheme, set: &PrimeSet, exec: Exec) -> Vec<f64> {
        let scores = exec.map(&set.records, |r| (r.condition_index, self.score(scheme, r.prime.as_bytes(), r.target.as_bytes())));
        let mut sum = [0.0; 28];
        let mut n = [0usize; 28];
        for (c, v) in scores {
            sum[c as usize - 1] += v;
            n[c as usize - 1] += 1;
        }
        sum.iter().zip(n).map(|(s, n)| if n == 0 { f64::NAN } else { s / n as f64 }).collect()
    }
}

const SYMBOLIC_TARGET: &[u8] = b"ABCDEF";

fn symbolic_prime(code: &str) -> Vec<u8> {
    let code = TransformCode::parse(code).expect("catalog codes are valid");
    code.fill(SYMBOLIC_TARGET, b"TUVWXYZ", Some(b'Q'))
}

pub fn match_absolute(prime: &LetterString, target: &LetterString) -> MatchValue {
    Matcher::default().match_value(Scheme::Absolute, prime, target)
}

pub fn match_binary_ob(prime: &LetterString, target: &LetterString) -> MatchValue {
    Matcher::default().match_value(Scheme::BinaryOB, prime, target)
}

pub fn match_spatial_coding(prime: &LetterString, target: &LetterString) -> MatchValue {
    Matcher::default().match_value(Scheme::SpatialCoding, prime, target)
}

pub fn match_overlap_ob(prime: &LetterString, target: &LetterString) -> MatchValue {
    Matcher::default().match_value(Scheme::OverlapOB, prime, target)
}

pub fn match_seriol_ob(prime: &LetterString, target: &LetterString) -> MatchValue {
    Matcher::default().match_value(Scheme::SeriolOB, prime, target)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bob(p: &str, t: &str) -> f64 {
        binary_ob(p.as_bytes(), t.as_bytes())
    }

    #[test]
    fn bigram_enumeration() {
        let cat = open_bigrams(b"CAT", 2);
        let pairs: Vec<(u8, u8, Gap)> = cat.iter().map(|b| (b.first, b.second, b.gap)).collect();
        assert_eq!(
            pairs,
            vec![(b'C', b'A', Gap::Interior(0)), (b'C', b'T', Gap::Interior(1)), (b'A', b'T', Gap::Interior(0))]
        );
        assert_eq!(open_bigrams(b"AB", 2).len(), 1);
        assert_eq!(open_bigrams(b"DESIGN", 2).len(), 12);
        assert!(open_bigrams(b"A", 2).is_empty());
    }

    #[test]
    fn absolute_examples() {
        assert!((absolute(b"DESIG", b"DESIGN") - 5.0 / 6.0).abs() < 1e-12);
        assert_eq!(absolute(b"DESIGNL", b"DESIGN"), 1.0);
        assert_eq!(absolute(b"MDESIGN", b"DESIGN"), 0.0);
    }

    #[test]
    fn binary_examples() {
        assert_eq!(bob("DESIG", "DESIGN"), 0.75);
        assert_eq!(bob("DESING", "DESIGN"), 10.0 / 12.0);
        assert_eq!(bob("MDESIGN", "DESIGN"), 1.0);
        assert_eq!(bob("EDISNG", "DESIGN"), 8.0 / 12.0);
    }

    #[test]
    fn identity_is_one() {
        let m = Matcher::default();
        for s in Scheme::ALL {
            for w in ["DESIGN", "A", "AB", "LETTER"] {
                assert!((m.score(s, w.as_bytes(), w.as_bytes()) - 1.0).abs() < 1e-12, "{s} {w}");
            }
        }
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.key().parse::<Scheme>().unwrap(), s);
            assert_eq!(s.column().parse::<Scheme>().unwrap(), s);
        }
        assert!("nope".parse::<Scheme>().is_err());
    }

    #[test]
    fn symbolic_primes() {
        assert_eq!(symbolic_prime("123DD456"), b"ABCQQDEF");
        assert_eq!(symbolic_prime("1dddd6"), b"ATUVWF");
    }
}
