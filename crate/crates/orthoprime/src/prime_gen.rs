//! Applies transformation codes to targets and builds full prime sets.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::Rng as _;
use serde::Serialize;
use thiserror::Error;

use crate::exec::Exec;
use crate::lexicon::{catalog, Generator, LetterString, PrimeCondition, TargetLexicon};
use crate::seed::{derive_seed, rng_from, Rng};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PrimeError {
    #[error("code {code:?}: invalid character {ch:?}")]
    BadCode { code: String, ch: char },
    #[error("code {code:?}: digit {digit} exceeds target length {len}")]
    DigitOutOfRange { code: String, digit: usize, len: usize },
    #[error("target {target} repeats a letter; random-letter slots would be ambiguous")]
    RepeatedLetters { target: String },
    #[error("target {target}: only {available} letters absent, need {needed}")]
    NotEnoughLetters { target: String, available: usize, needed: usize },
    #[error("{n_targets} targets cannot be split evenly over {n_codes} codes (remainder {remainder})")]
    Unbalanced { n_targets: usize, n_codes: usize, remainder: usize },
    #[error("no pronounceable pseudoword for {target} after {attempts} attempts")]
    PseudowordExhausted { target: String, attempts: usize },
    #[error("io: {0}")]
    Io(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    /// Zero-based target position.
    Copy(usize),
    Fresh,
    Repeated,
}

/// A parsed code such as `123dd456`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformCode {
    pub text: String,
    pub slots: Vec<Slot>,
}

impl TransformCode {
    pub fn parse(code: &str) -> Result<Self, PrimeError> {
        let mut slots = Vec::with_capacity(code.len());
        for ch in code.chars() {
            slots.push(match ch {
                '1'..='9' => Slot::Copy(ch as usize - '1' as usize),
                'd' => Slot::Fresh,
                'D' => Slot::Repeated,
                _ => return Err(PrimeError::BadCode { code: code.into(), ch }),
            });
        }
        if slots.is_empty() {
            return Err(PrimeError::BadCode { code: code.into(), ch: ' ' });
        }
        Ok(Self { text: code.into(), slots })
    }

    pub fn n_fresh(&self) -> usize {
        self.slots.iter().filter(|s| **s == Slot::Fresh).count()
    }

    pub fn has_repeated(&self) -> bool {
        self.slots.contains(&Slot::Repeated)
    }

    pub fn is_deterministic(&self) -> bool {
        self.slots.iter().all(|s| matches!(s, Slot::Copy(_)))
    }

    /// Fill the code using explicit letters for the policy slots.
    pub(crate) fn fill(&self, target: &[u8], fresh: &[u8], repeated: Option<u8>) -> Vec<u8> {
        let mut fresh = fresh.iter();
        self.slots
            .iter()
            .map(|s| match *s {
                Slot::Copy(i) => target[i],
                Slot::Fresh => *fresh.next().expect("enough fresh letters"),
                Slot::Repeated => repeated.expect("repeated letter drawn"),
            })
            .collect()
    }
}

fn absent_letters(target: &LetterString) -> Vec<u8> {
    (b'A'..=b'Z').filter(|c| !target.contains(*c)).collect()
}

fn check_target(target: &LetterString) -> Result<(), PrimeError> {
    if target.has_repeats() {
        return Err(PrimeError::RepeatedLetters { target: target.to_string() });
    }
    Ok(())
}

fn draw_absent(target: &LetterString, n: usize, rng: &mut Rng) -> Result<Vec<u8>, PrimeError> {
    let pool = absent_letters(target);
    if pool.len() < n {
        return Err(PrimeError::NotEnoughLetters { target: target.to_string(), available: pool.len(), needed: n });
    }
    Ok(pool.choose_multiple(rng, n).copied().collect())
}

/// Digits copy target letters, each `d` gets a distinct letter absent from the
/// target, and all `D` slots share one further absent letter.
pub fn apply_code(target: &LetterString, code: &str, rng: &mut Rng) -> Result<LetterString, PrimeError> {
    let code = TransformCode::parse(code)?;
    apply_parsed(target, &code, rng)
}

pub fn apply_parsed(target: &LetterString, code: &TransformCode, rng: &mut Rng) -> Result<LetterString, PrimeError> {
    check_target(target)?;
    for s in &code.slots {
        if let Slot::Copy(i) = *s {
            if i >= target.len() {
                return Err(PrimeError::DigitOutOfRange { code: code.text.clone(), digit: i + 1, len: target.len() });
            }
        }
    }
    let n_fresh = code.n_fresh();
    let n_draw = n_fresh + usize::from(code.has_repeated());
    let drawn = if n_draw > 0 { draw_absent(target, n_draw, rng)? } else { Vec::new() };
    let repeated = code.has_repeated().then(|| drawn[n_fresh]);
    let bytes = code.fill(target.as_bytes(), &drawn[..n_fresh], repeated);
    Ok(LetterString::parse(std::str::from_utf8(&bytes).unwrap()).expect("letters only"))
}

/// Round-robin assignment of sorted targets to codes; entry `i` is the code
/// index for the target of sorted rank `i`.
pub fn assign_subconditions(n_targets: usize, n_codes: usize) -> Result<Vec<usize>, PrimeError> {
    let remainder = if n_codes == 0 { n_targets } else { n_targets % n_codes };
    if n_codes == 0 || remainder != 0 {
        return Err(PrimeError::Unbalanced { n_targets, n_codes, remainder });
    }
    Ok((0..n_targets).map(|i| i % n_codes).collect())
}

pub fn gen_arbitrary(target: &LetterString, rng: &mut Rng) -> Result<LetterString, PrimeError> {
    check_target(target)?;
    let letters = draw_absent(target, 6, rng)?;
    Ok(LetterString::parse(std::str::from_utf8(&letters).unwrap()).unwrap())
}

pub const VOWELS: &[u8] = b"AEIOU";
pub const TEMPLATES: [&str; 3] = ["CVCCVC", "CVCVCC", "CCVCVC"];
const ONSETS: &[&str] = &[
    "BL", "BR", "CL", "CR", "DR", "FL", "FR", "GL", "GR", "PL", "PR", "SC", "SK", "SL", "SM", "SN", "SP", "ST",
    "SW", "TR", "TW",
];
const MEDIALS: &[&str] = &[
    "CT", "LB", "LC", "LD", "LF", "LK", "LM", "LP", "LT", "LV", "MB", "MP", "ND", "NK", "NT", "NV", "PT", "RB",
    "RC", "RD", "RF", "RG", "RK", "RM", "RN", "RP", "RT", "RV", "SC", "SK", "SP", "ST", "BL", "BR", "CL", "CR",
    "DR", "FL", "FR", "GL", "GR", "PL", "PR", "TR",
];
const CODAS: &[&str] = &[
    "CT", "FT", "LD", "LF", "LK", "LM", "LP", "LT", "MP", "ND", "NK", "NT", "PT", "RB", "RD", "RF", "RK", "RM",
    "RN", "RP", "RT", "SK", "SP", "ST",
];

/// Whether `word` fits one of the pseudoword templates with allowed clusters.
pub fn is_pronounceable(word: &[u8]) -> bool {
    TEMPLATES.iter().any(|t| fits_template(word, t.as_bytes()))
}

fn fits_template(word: &[u8], template: &[u8]) -> bool {
    if word.len() != template.len() {
        return false;
    }
    for (c, t) in word.iter().zip(template) {
        if VOWELS.contains(c) != (*t == b'V') {
            return false;
        }
    }
    let mut i = 0;
    while i + 1 < template.len() {
        if template[i] == b'C' && template[i + 1] == b'C' {
            let pair = std::str::from_utf8(&word[i..i + 2]).unwrap();
            let allowed = if i == 0 {
                ONSETS
            } else if i + 2 == template.len() {
                CODAS
            } else {
                MEDIALS
            };
            if !allowed.contains(&pair) {
                return false;
            }
            i += 2;
        } else {
            i += 1;
        }
    }
    true
}

/// Fill a template left to right, drawing each consonant cluster from the
/// allowlist for its position. `None` on a dead end.
fn fill_template(template: &[u8], vowels: &[u8], consonants: &[u8], rng: &mut Rng) -> Option<Vec<u8>> {
    let mut word: Vec<u8> = Vec::with_capacity(template.len());
    let unused = |pool: &[u8], word: &[u8]| -> Vec<u8> { pool.iter().copied().filter(|c| !word.contains(c)).collect() };
    let mut i = 0;
    while i < template.len() {
        if template[i] == b'V' {
            word.push(*unused(vowels, &word).choose(rng)?);
            i += 1;
        } else if i + 1 < template.len() && template[i + 1] == b'C' {
            let allowed = if i == 0 {
                ONSETS
            } else if i + 2 == template.len() {
                CODAS
            } else {
                MEDIALS
            };
            let free = unused(consonants, &word);
            let options: Vec<&[u8]> = allowed
                .iter()
                .map(|p| p.as_bytes())
                .filter(|p| p[0] != p[1] && free.contains(&p[0]) && free.contains(&p[1]))
                .collect();
            word.extend_from_slice(options.choose(rng)?);
            i += 2;
        } else {
            word.push(*unused(consonants, &word).choose(rng)?);
            i += 1;
        }
    }
    Some(word)
}

pub const PSEUDOWORD_ATTEMPTS: usize = 100;

/// Six distinct letters absent from the target, shaped CVCCVC, CVCVCC or CCVCVC.
pub fn gen_pseudoword(target: &LetterString, rng: &mut Rng) -> Result<LetterString, PrimeError> {
    check_target(target)?;
    let pool = absent_letters(target);
    let vowels: Vec<u8> = pool.iter().copied().filter(|c| VOWELS.contains(c)).collect();
    let consonants: Vec<u8> = pool.iter().copied().filter(|c| !VOWELS.contains(c)).collect();
    let exhausted = || PrimeError::PseudowordExhausted { target: target.to_string(), attempts: PSEUDOWORD_ATTEMPTS };
    if vowels.len() < 2 || consonants.len() < 4 {
        return Err(exhausted());
    }
    for _ in 0..PSEUDOWORD_ATTEMPTS {
        let template = TEMPLATES[rng.random_range(0..TEMPLATES.len())].as_bytes();
        if let Some(word) = fill_template(template, &vowels, &consonants, rng) {
            debug_assert!(fits_template(&word, template));
            return Ok(LetterString::parse(std::str::from_utf8(&word).unwrap()).unwrap());
        }
    }
    Err(exhausted())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeRecord {
    pub target: LetterString,
    pub condition_index: u8,
    pub short_code: &'static str,
    pub subcondition_code: &'static str,
    pub prime: LetterString,
    pub seed: u64,
}

impl PrimeRecord {
    /// Stimulus id used in activation files: `{target}_{short_code}`.
    pub fn stimulus_id(&self) -> String {
        format!("{}_{}", self.target, self.short_code)
    }
}

pub fn target_stimulus_id(target: &LetterString) -> String {
    format!("{target}_TARGET")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeSet {
    pub records: Vec<PrimeRecord>,
    pub seed: u64,
    pub lexicon_fingerprint: String,
}

pub const CSV_HEADER: &str = "target,condition_index,short_code,subcondition_code,prime,seed";

impl PrimeSet {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.records.len() * 48);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.target, r.condition_index, r.short_code, r.subcondition_code, r.prime, r.seed
            );
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), PrimeError> {
        fs::write(path, self.to_csv()).map_err(|e| PrimeError::Io(format!("{}: {e}", path.display())))
    }

    pub fn for_condition(&self, index: u8) -> impl Iterator<Item = &PrimeRecord> {
        self.records.iter().filter(move |r| r.condition_index == index)
    }
}

/// Seed of the stream used for one (target, condition) record.
pub fn record_seed(global: u64, target: &LetterString, condition_index: u8) -> u64 {
    derive_seed(global, &[target.as_bytes(), &[condition_index]])
}

pub fn make_prime(
    target: &LetterString,
    cond: &PrimeCondition,
    code: &'static str,
    seed: u64,
) -> Result<PrimeRecord, PrimeError> {
    let mut rng = rng_from(seed);
    let prime = match cond.generator {
        Generator::Code => apply_code(target, code, &mut rng)?,
        Generator::Pseudoword => gen_pseudoword(target, &mut rng)?,
        Generator::Arbitrary => gen_arbitrary(target, &mut rng)?,
    };
    Ok(PrimeRecord {
        target: target.clone(),
        condition_index: cond.index,
        short_code: cond.short_code,
        subcondition_code: code,
        prime,
        seed,
    })
}

/// All 28 primes for every target, in (sorted target, condition) order.
pub fn generate_prime_set(lexicon: &TargetLexicon, seed: u64, exec: Exec) -> Result<PrimeSet, PrimeError> {
    let mut targets = lexicon.targets.clone();
    targets.sort();
    let cat = catalog();
    let mut assignments = Vec::with_capacity(28);
    for cond in cat.iter() {
        assignments.push(assign_subconditions(targets.len(), cond.codes.len())?);
    }
    let per_target = exec.try_map_range(targets.len(), |rank| {
        let target = &targets[rank];
        cat.iter()
            .zip(&assignments)
            .map(|(cond, assign)| {
                let code = cond.codes[assign[rank]];
                make_prime(target, cond, code, record_seed(seed, target, cond.index))
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(PrimeSet {
        records: per_target.into_iter().flatten().collect(),
        seed,
        lexicon_fingerprint: lexicon.fingerprint(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::LexiconMode;

    fn ls(s: &str) -> LetterString {
        LetterString::parse(s).unwrap()
    }

    #[test]
    fn deterministic_codes() {
        let mut rng = rng_from(0);
        assert_eq!(apply_code(&ls("DESIGN"), "123465", &mut rng).unwrap().as_str(), "DESING");
        assert_eq!(apply_code(&ls("ABDUCT"), "213456", &mut rng).unwrap().as_str(), "BADUCT");
        assert_eq!(apply_code(&ls("ABDUCT"), "123465", &mut rng).unwrap().as_str(), "ABDUTC");
    }

    #[test]
    fn policy_slots() {
        let t = ls("DESIGN");
        for s in 0..50 {
            let mut rng = rng_from(s);
            let p = apply_code(&t, "123DD456", &mut rng).unwrap();
            let b = p.as_bytes();
            assert_eq!(&b[..3], b"DES");
            assert_eq!(&b[5..], b"IGN");
            assert_eq!(b[3], b[4]);
            assert!(!t.contains(b[3]));
            let p = apply_code(&t, "1dddd6", &mut rng).unwrap();
            assert!(!p.has_repeats());
        }
    }

    #[test]
    fn code_errors() {
        let mut rng = rng_from(0);
        assert!(matches!(apply_code(&ls("DESIGN"), "12x", &mut rng), Err(PrimeError::BadCode { ch: 'x', .. })));
        assert!(matches!(
            apply_code(&ls("CAT"), "1234", &mut rng),
            Err(PrimeError::DigitOutOfRange { digit: 4, len: 3, .. })
        ));
        assert!(matches!(apply_code(&ls("LETTER"), "123456", &mut rng), Err(PrimeError::RepeatedLetters { .. })));
    }

    #[test]
    fn subcondition_balance() {
        let a = assign_subconditions(420, 3).unwrap();
        for k in 0..3 {
            assert_eq!(a.iter().filter(|&&c| c == k).count(), 140);
        }
        assert!(assign_subconditions(420, 1).unwrap().iter().all(|&c| c == 0));
        assert_eq!(
            assign_subconditions(10, 4),
            Err(PrimeError::Unbalanced { n_targets: 10, n_codes: 4, remainder: 2 })
        );
    }

    #[test]
    fn pseudoword_templates() {
        assert!(is_pronounceable(b"VOCTAL"));
        assert!(is_pronounceable(b"BRAMEK"));
        assert!(!is_pronounceable(b"CBHAUX"));
        let t = ls("DESIGN");
        for s in 0..200 {
            let p = gen_pseudoword(&t, &mut rng_from(s)).unwrap();
            assert!(is_pronounceable(p.as_bytes()), "{p}");
            assert!(!p.has_repeats());
            assert!(p.as_bytes().iter().all(|c| !t.contains(*c)));
        }
        assert!(gen_pseudoword(&ls("AEIOUB"), &mut rng_from(0)).is_err());
    }

    #[test]
    fn prime_set_independent_of_input_order() {
        let words = [
            "DESIGN", "ABDUCT", "FOREST", "BASKET", "PLANET", "HUNTER", "WONDER", "GOLDEN", "MARKET", "SILVER",
            "CASTLE", "PRISON",
        ];
        let mut rev = words;
        rev.reverse();
        let a = TargetLexicon::from_words(&words, LexiconMode::Free).unwrap();
        let b = TargetLexicon::from_words(&rev, LexiconMode::Free).unwrap();
        let pa = generate_prime_set(&a, 7, Exec::Sequential).unwrap();
        let pb = generate_prime_set(&b, 7, Exec::Parallel).unwrap();
        assert_eq!(pa.records, pb.records);
        assert_eq!(pa.records.len(), 12 * 28);
        let four = TargetLexicon::from_words(&words[..4], LexiconMode::Free).unwrap();
        assert!(matches!(generate_prime_set(&four, 7, Exec::Sequential), Err(PrimeError::Unbalanced { .. })));
        assert!(pa.to_csv().starts_with(CSV_HEADER));
    }
}
