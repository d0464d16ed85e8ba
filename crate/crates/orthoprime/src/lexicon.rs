//! Letter strings, target word lists and the 28-condition prime catalog.

use std::fmt;
use std::fs;
use std::hash::{Hash, Hasher};
use std::ops::Index;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Longest string accepted anywhere in the toolkit.
pub const MAX_LEN: usize = 12;
/// Size of the Form Priming Project target set.
pub const FPP_TARGETS: usize = 420;
/// Target length in the Form Priming Project.
pub const FPP_WORD_LEN: usize = 6;

const STAND_IN_LEXICON: &str = include_str!("../assets/lexicon_stand_in.txt");

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LexiconError {
    #[error("empty string")]
    Empty,
    #[error("{word:?} is longer than {MAX_LEN} letters")]
    TooLong { word: String },
    #[error("{word:?} contains non-letter character {ch:?}")]
    NonLetter { word: String, ch: char },
    #[error("line {line}: {source}")]
    Line {
        line: usize,
        #[source]
        source: Box<LexiconError>,
    },
    #[error("strict mode: {word:?} violates rule: {rule}")]
    Strict { word: String, rule: &'static str },
    #[error("strict mode: expected {expected} targets, found {found}")]
    Count { expected: usize, found: usize },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

/// A case-insensitive A–Z string. The original spelling is kept for display only.
#[derive(Clone, Serialize)]
pub struct LetterString {
    upper: String,
    #[serde(skip)]
    display: String,
}

impl LetterString {
    pub fn parse(raw: &str) -> Result<Self, LexiconError> {
        let raw = raw.trim();
        if raw.is_empty() {
            return Err(LexiconError::Empty);
        }
        if let Some(ch) = raw.chars().find(|c| !c.is_ascii_alphabetic()) {
            return Err(LexiconError::NonLetter { word: raw.to_string(), ch });
        }
        if raw.len() > MAX_LEN {
            return Err(LexiconError::TooLong { word: raw.to_string() });
        }
        Ok(Self { upper: raw.to_ascii_uppercase(), display: raw.to_string() })
    }

    /// Upper-case form used for every comparison.
    pub fn as_str(&self) -> &str {
        &self.upper
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.upper.as_bytes()
    }

    /// Spelling as originally supplied.
    pub fn display(&self) -> &str {
        &self.display
    }

    pub fn len(&self) -> usize {
        self.upper.len()
    }

    pub fn is_empty(&self) -> bool {
        self.upper.is_empty()
    }

    pub fn has_repeats(&self) -> bool {
        let mut seen = 0u32;
        for b in self.as_bytes() {
            let bit = 1 << (b - b'A');
            if seen & bit != 0 {
                return true;
            }
            seen |= bit;
        }
        false
    }

    pub fn contains(&self, letter: u8) -> bool {
        self.as_bytes().contains(&letter.to_ascii_uppercase())
    }
}

impl PartialEq for LetterString {
    fn eq(&self, other: &Self) -> bool {
        self.upper == other.upper
    }
}

impl Eq for LetterString {}

impl Hash for LetterString {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.upper.hash(state)
    }
}

impl PartialOrd for LetterString {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LetterString {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.upper.cmp(&other.upper)
    }
}

impl fmt::Debug for LetterString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.upper)
    }
}

impl fmt::Display for LetterString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.upper)
    }
}

impl std::str::FromStr for LetterString {
    type Err = LexiconError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LexiconMode {
    /// 420 distinct six-letter words, none with a repeated letter.
    FppStrict,
    Free,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetLexicon {
    pub targets: Vec<LetterString>,
    pub source: String,
}

impl TargetLexicon {
    pub fn parse(text: &str, source: &str, mode: LexiconMode) -> Result<Self, LexiconError> {
        let mut targets = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r').trim();
            if line.is_empty() {
                continue;
            }
            let word = LetterString::parse(line)
                .map_err(|e| LexiconError::Line { line: i + 1, source: Box::new(e) })?;
            targets.push(word);
        }
        let lex = Self { targets, source: source.to_string() };
        if mode == LexiconMode::FppStrict {
            lex.check_strict()?;
        }
        Ok(lex)
    }

    pub fn from_words<S: AsRef<str>>(words: &[S], mode: LexiconMode) -> Result<Self, LexiconError> {
        let text = words.iter().map(|w| w.as_ref()).collect::<Vec<_>>().join("\n");
        Self::parse(&text, "inline", mode)
    }

    /// The bundled 420-word stand-in list (common English words with six distinct letters).
    pub fn stand_in() -> Self {
        Self::parse(STAND_IN_LEXICON, "bundled:stand-in-420", LexiconMode::FppStrict)
            .expect("bundled lexicon is valid")
    }

    fn check_strict(&self) -> Result<(), LexiconError> {
        let mut seen = std::collections::HashSet::new();
        for w in &self.targets {
            if w.len() != FPP_WORD_LEN {
                return Err(LexiconError::Strict { word: w.to_string(), rule: "length must be 6" });
            }
            if w.has_repeats() {
                return Err(LexiconError::Strict { word: w.to_string(), rule: "repeated letter" });
            }
            if !seen.insert(w.as_str()) {
                return Err(LexiconError::Strict { word: w.to_string(), rule: "duplicate entry" });
            }
        }
        if self.targets.len() != FPP_TARGETS {
            return Err(LexiconError::Count { expected: FPP_TARGETS, found: self.targets.len() });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Newline-delimited upper-case form; parsing it back yields the same list.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.targets.len() * 7);
        for t in &self.targets {
            s.push_str(t.as_str());
            s.push('\n');
        }
        s
    }

    /// SHA-256 of the canonical text form, hex encoded.
    pub fn fingerprint(&self) -> String {
        hex(&Sha256::digest(self.to_text().as_bytes()))
    }
}

pub fn load_lexicon(path: &Path, mode: LexiconMode) -> Result<TargetLexicon, LexiconError> {
    let text = fs::read_to_string(path).map_err(|e| LexiconError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    TargetLexicon::parse(&text, &path.display().to_string(), mode)
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// How a condition fills slots that are not copied from the target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LetterPolicy {
    None,
    /// `d`: distinct random letters absent from the target.
    FreshDistinct,
    /// `D`: one random letter absent from the target, reused.
    Repeated,
    Mixed,
}

/// Random-letter generator used for a whole condition instead of per-slot codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Code,
    Pseudoword,
    Arbitrary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeCondition {
    pub index: u8,
    pub long_name: &'static str,
    pub short_code: &'static str,
    pub codes: &'static [&'static str],
    pub letter_policy: LetterPolicy,
    pub generator: Generator,
}

impl PrimeCondition {
    pub fn is_multi_code(&self) -> bool {
        self.codes.len() > 1
    }
}

macro_rules! cond {
    ($i:expr, $long:expr, $short:expr, [$($c:expr),+], $pol:ident) => {
        cond!($i, $long, $short, [$($c),+], $pol, Code)
    };
    ($i:expr, $long:expr, $short:expr, [$($c:expr),+], $pol:ident, $gen:ident) => {
        PrimeCondition {
            index: $i,
            long_name: $long,
            short_code: $short,
            codes: &[$($c),+],
            letter_policy: LetterPolicy::$pol,
            generator: Generator::$gen,
        }
    };
}

static CONDITIONS: [PrimeCondition; 28] = [
    cond!(1, "Identity", "ID", ["123456"], None),
    cond!(2, "Final deletion", "DL-1F", ["12345"], None),
    cond!(3, "Suffix", "IL-1F", ["123456d"], FreshDistinct),
    cond!(4, "Final transposition", "TL56", ["123465"], None),
    cond!(5, "Medial transposition", "TL-M", ["132456", "124356", "123546"], None),
    cond!(6, "Medial deletion", "DL-1M", ["13456", "12456", "12356", "12346"], None),
    cond!(7, "Final substitution", "SN-F", ["12345d"], FreshDistinct),
    cond!(8, "Initial substitution", "SN-I", ["d23456"], FreshDistinct),
    cond!(9, "Initial transposition", "TL12", ["213456"], None),
    cond!(10, "Central insertion", "IL-1M", ["123d456"], FreshDistinct),
    cond!(11, "Prefix", "IL-1I", ["d123456"], FreshDistinct),
    cond!(12, "Half", "SUB3", ["123", "456"], None),
    cond!(13, "Repeated letter", "IL-2MR", ["123DD456"], Repeated),
    cond!(14, "Central-double-deletion", "DL-2M", ["1256"], None),
    cond!(15, "Medial substitution", "SN-M", ["1d3456", "12d456", "123d56", "1234d6"], FreshDistinct),
    cond!(16, "Neighbour once removed", "N1R", ["12d356", "13d456", "124d56", "123d46"], FreshDistinct),
    cond!(17, "2 apart transposition", "NATL-24/35", ["143256", "125436"], None),
    cond!(18, "Central double insertion", "IL-2M", ["123dd456"], FreshDistinct),
    cond!(19, "All-transposed", "T-All", ["214365"], None),
    cond!(20, "Central double substitution", "DSN-M", ["12dd56"], FreshDistinct),
    cond!(21, "Reversed halves", "RH", ["321654"], None),
    cond!(22, "3-apart-transposition", "NATL25", ["153426"], None),
    cond!(23, "Interleaved halves", "IH", ["415263"], None),
    cond!(24, "Transposed halves", "TH", ["456123"], None),
    cond!(25, "Unrelated pseudoword", "ALD-PW", ["dddddd"], FreshDistinct, Pseudoword),
    cond!(26, "Reversed except initial", "RF", ["165432"], None),
    cond!(27, "Central quadruple substitution", "EL", ["1dddd6"], FreshDistinct),
    cond!(28, "Unrelated arbitrary", "ALD-ARB", ["dddddd"], FreshDistinct, Arbitrary),
];

/// The 28 prime conditions in their canonical order. Indexing is 1-based, like the condition numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConditionCatalog {
    conditions: &'static [PrimeCondition; 28],
}

impl ConditionCatalog {
    pub fn len(&self) -> usize {
        28
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, index: usize) -> Option<&'static PrimeCondition> {
        index.checked_sub(1).and_then(|i| self.conditions.get(i))
    }

    pub fn by_short_code(&self, code: &str) -> Option<&'static PrimeCondition> {
        self.conditions.iter().find(|c| c.short_code.eq_ignore_ascii_case(code))
    }

    pub fn iter(&self) -> std::slice::Iter<'static, PrimeCondition> {
        self.conditions.iter()
    }

    pub fn short_codes(&self) -> Vec<&'static str> {
        self.iter().map(|c| c.short_code).collect()
    }
}

impl Index<usize> for ConditionCatalog {
    type Output = PrimeCondition;
    fn index(&self, index: usize) -> &PrimeCondition {
        self.get(index).unwrap_or_else(|| panic!("condition index {index} outside 1..=28"))
    }
}

impl IntoIterator for ConditionCatalog {
    type Item = &'static PrimeCondition;
    type IntoIter = std::slice::Iter<'static, PrimeCondition>;
    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

pub fn catalog() -> ConditionCatalog {
    ConditionCatalog { conditions: &CONDITIONS }
}
