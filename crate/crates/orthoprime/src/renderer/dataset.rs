//! Image trees on disk plus their JSON manifests.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{render_prime_with, render_training_image, FontFace, RenderConfig, RenderError};
use crate::exec::Exec;
use crate::lexicon::{hex, LetterString};
use crate::prime_gen::{target_stimulus_id, PrimeSet};
use crate::seed::derive_seed;

/// Every sixth image of a word goes to validation (5:1 split).
pub const VALIDATION_EVERY: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Prime,
    Target,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub word: String,
    /// Relative to the manifest's directory.
    pub path: String,
    pub split: Split,
    pub seed: Option<u64>,
    pub font: String,
    pub size: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serialises")
    }

    pub fn write(&self, path: &Path) -> Result<(), RenderError> {
        std::fs::write(path, self.to_json()).map_err(|e| RenderError::Io { path: path.display().to_string(), message: e.to_string() })
    }

    pub fn read(path: &Path) -> Result<Self, RenderError> {
        let io = |m: String| RenderError::Io { path: path.display().to_string(), message: m };
        let text = std::fs::read_to_string(path).map_err(|e| io(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| io(e.to_string()))
    }

    pub fn count(&self, split: Split) -> usize {
        self.entries.iter().filter(|e| e.split == split).count()
    }
}

pub fn manifest_hash(m: &Manifest) -> String {
    hex(&Sha256::digest(m.to_json().as_bytes()))
}

pub fn image_seed(global: u64, word: &LetterString, index: usize) -> u64 {
    derive_seed(global, &[word.as_bytes(), &(index as u64).to_le_bytes()])
}

fn file_safe(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '-' }).collect()
}

/// Render `per_word` augmented images for each word into `out/images/`,
/// named `{word}_{index}_{seed}.png`, and write `out/manifest.json`.
pub fn render_training_set(
    words: &[LetterString],
    per_word: usize,
    config: &RenderConfig,
    seed: u64,
    out: &Path,
    exec: Exec,
) -> Result<Manifest, RenderError> {
    config.validate()?;
    let entries = exec.try_map_range(words.len() * per_word, |k| {
        let (word, index) = (&words[k / per_word], k % per_word);
        let s = image_seed(seed, word, index);
        let img = render_training_image(word, config, s)?;
        let rel = format!("images/{}_{index}_{s:016x}.png", word.as_str());
        img.save_png(&out.join(&rel))?;
        let split = if index % VALIDATION_EVERY == VALIDATION_EVERY - 1 { Split::Validation } else { Split::Train };
        Ok(ManifestEntry { id: None, word: word.as_str().into(), path: rel, split, seed: Some(s), font: img.font, size: img.size })
    })?;
    let m = Manifest { seed, entries };
    m.write(&out.join("manifest.json"))?;
    Ok(m)
}

/// Render every prime of `set` plus each distinct target into `out/`, with ids
/// matching the stimulus ids used for activation files.
pub fn render_prime_images(set: &PrimeSet, face: &FontFace, out: &Path, exec: Exec) -> Result<Manifest, RenderError> {
    let mut jobs: Vec<(String, &LetterString, Split)> =
        set.records.iter().map(|r| (r.stimulus_id(), &r.prime, Split::Prime)).collect();
    let mut targets: Vec<&LetterString> = set.records.iter().map(|r| &r.target).collect();
    targets.sort();
    targets.dedup();
    jobs.extend(targets.into_iter().map(|t| (target_stimulus_id(t), t, Split::Target)));
    let entries = exec.try_map_range(jobs.len(), |k| {
        let (id, word, split) = &jobs[k];
        let img = render_prime_with(word, face)?;
        let dir = if *split == Split::Prime { "primes" } else { "targets" };
        let rel = format!("{dir}/{}.png", file_safe(id));
        img.save_png(&out.join(&rel))?;
        Ok(ManifestEntry { id: Some(id.clone()), word: word.as_str().into(), path: rel, split: *split, seed: None, font: img.font, size: img.size })
    })?;
    let m = Manifest { seed: set.seed, entries };
    m.write(&out.join("manifest.json"))?;
    Ok(m)
}
