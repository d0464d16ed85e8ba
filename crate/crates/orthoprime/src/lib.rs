//! Masked form-priming toolkit: prime generation, orthographic coding schemes,
//! stimulus rendering, activation ingest and rank statistics against human
//! priming data.

pub mod coding_schemes;
pub mod exec;
pub mod ingest;
pub mod lexicon;
pub mod prime_gen;
pub mod renderer;
mod seed;
pub mod stats;

pub use coding_schemes::{Matcher, Scheme, SchemeParams};
pub use exec::Exec;
pub use lexicon::{catalog, LetterString, TargetLexicon};
pub use prime_gen::{generate_prime_set, PrimeRecord, PrimeSet};
pub use renderer::{RenderConfig, StimulusImage};
pub use seed::{derive_seed, rng_from, Rng};
