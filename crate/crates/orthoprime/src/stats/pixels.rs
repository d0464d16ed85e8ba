use std::collections::HashMap;

use serde::Serialize;

use super::{cosine, StatsError};
use crate::exec::Exec;
use crate::lexicon::LetterString;
use crate::prime_gen::PrimeSet;
use crate::renderer::{render_prime_with, FontFace, RenderError, StimulusImage};

/// Which pixel representation the pixel baseline compares.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum PixelSpace {
    /// Distance from the background, so blank canvas contributes nothing.
    #[default]
    Ink,
    /// Raw intensities; the shared white background dominates.
    Intensity,
}

/// Cosine between two rendered images in the given pixel space.
pub fn pixel_cs_in(a: &StimulusImage, b: &StimulusImage, space: PixelSpace) -> Result<f64, StatsError> {
    match space {
        PixelSpace::Intensity => cosine(&a.pixels, &b.pixels),
        PixelSpace::Ink => {
            let ink = |img: &StimulusImage| -> Vec<f32> { img.pixels.iter().map(|p| (p - img.background).abs()).collect() };
            cosine(&ink(a), &ink(b))
        }
    }
}

/// Pixel-level cosine similarity between prime and target renders.
pub fn pixel_cs(a: &StimulusImage, b: &StimulusImage) -> Result<f64, StatsError> {
    pixel_cs_in(a, b, PixelSpace::default())
}

/// `(condition_index, pixCS)` for every record of `set`, rendering each target
/// once and each prime on the fly.
pub fn pixel_cs_pairs(set: &PrimeSet, face: &FontFace, space: PixelSpace, exec: Exec) -> Result<Vec<(u8, f64)>, RenderError> {
    let mut targets: Vec<&LetterString> = set.records.iter().map(|r| &r.target).collect();
    targets.sort();
    targets.dedup();
    let renders = exec.map(&targets, |t| render_prime_with(t, face));
    let mut images: HashMap<&LetterString, StimulusImage> = HashMap::with_capacity(targets.len());
    for (t, img) in targets.into_iter().zip(renders) {
        images.insert(t, img?);
    }
    let out = exec.map(&set.records, |r| -> Result<(u8, f64), RenderError> {
        let prime = render_prime_with(&r.prime, face)?;
        let cs = pixel_cs_in(&prime, &images[&r.target], space).unwrap_or(0.0);
        Ok((r.condition_index, cs))
    });
    out.into_iter().collect()
}
