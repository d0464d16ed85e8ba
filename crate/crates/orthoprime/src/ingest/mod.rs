//! Readers for activation files, bundled reference tables and letter ratings.

use thiserror::Error;

pub mod fixtures;
pub mod oact;
pub mod ratings;

pub use fixtures::{load_fixtures, ColumnGroup, FixtureColumn, FixtureTable};
pub use oact::{read_activations, write_activations, ActivationSet, ActivationVector};
pub use ratings::{load_letter_ratings, LetterRatings};

#[derive(Debug, Error, PartialEq)]
pub enum IngestError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("bad magic: expected \"OACT1\", found {found:?}")]
    BadMagic { found: Vec<u8> },
    #[error("truncated at byte {offset}: expected {needed} more bytes for {what}")]
    Truncated { offset: usize, needed: usize, what: &'static str },
    #[error("{extra} trailing bytes after the last record (byte {offset})")]
    TrailingBytes { offset: usize, extra: usize },
    #[error("record name at byte {offset} is not valid UTF-8")]
    BadName { offset: usize },
    #[error("duplicate stimulus name {name:?}")]
    DuplicateName { name: String },
    #[error("non-finite value in {name:?} at element {index}")]
    NonFinite { name: String, index: usize },
    #[error("vector {name:?} has dimension {found}, expected {expected}")]
    Dimension { name: String, expected: usize, found: usize },
    #[error("{0}")]
    Format(String),
    #[error("ratings not symmetric: {a}{b} = {ab} but {b}{a} = {ba}")]
    Asymmetric { a: char, b: char, ab: f64, ba: f64 },
    #[error("ratings missing letter {0}")]
    MissingLetter(char),
}

pub(crate) fn io_err(path: &std::path::Path, e: impl std::fmt::Display) -> IngestError {
    IngestError::Io { path: path.display().to_string(), message: e.to_string() }
}
