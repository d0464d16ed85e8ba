//! Word rasterisation: augmented training images and canonical prime images.
//!
//! Letters are typeset with kerning at their native pixel size, each glyph is
//! rotated about its bounding-box centre and translated inside the disc of
//! radius `translation_factor · √(h² + w²)`, and the square canvas is resized
//! to 224 × 224 with a bilinear filter when the word does not fit.

use std::f64::consts::PI;
use std::path::Path;

use ab_glyph::{point, Font, GlyphId, PxScale, ScaleFont};
use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::LetterString;
use crate::seed::rng_from;

mod dataset;
mod fonts;

pub use dataset::{manifest_hash, render_prime_images, render_training_set, Manifest, ManifestEntry, Split, VALIDATION_EVERY};
pub use fonts::{discover_fonts, discover_in, prime_font, FontFace, FONT_DIR_ENV, MAX_FACES, PRIME_FACE};

pub const SIDE: usize = 224;
pub const PRIME_SIZE: u32 = 26;
pub const TRANSLATION_FACTOR: f64 = 0.8;

pub fn default_rotation_sigma() -> f64 {
    2.0 * PI / 45.0
}

pub fn default_sizes() -> Vec<u32> {
    (18..38).step_by(2).collect()
}

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("cannot load font {path}: {message}")]
    FontLoad { path: String, message: String },
    #[error("font {font} has no glyph for {ch:?}")]
    MissingGlyph { ch: char, font: String },
    #[error("cannot render an empty word")]
    EmptyWord,
    #[error("invalid render config: {0}")]
    InvalidConfig(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// Where one letter was drawn. `(a, b)` is the nominal glyph-box centre
/// (row, column) and `(x, y)` the centre after translation (column, row).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LetterPlacement {
    pub letter: char,
    pub a: f64,
    pub b: f64,
    pub x: f64,
    pub y: f64,
    pub rotation: f64,
    pub height: f64,
    pub width: f64,
}

impl LetterPlacement {
    pub fn translation_radius(&self, factor: f64) -> f64 {
        factor * self.height.hypot(self.width)
    }

    /// The bounding-circle constraint on the applied offset.
    pub fn within_circle(&self, factor: f64) -> bool {
        let r = self.translation_radius(factor);
        r * r >= (self.x - self.b).powi(2) + (self.y - self.a).powi(2)
    }

    fn scaled(mut self, k: f64) -> Self {
        for v in [&mut self.a, &mut self.b, &mut self.x, &mut self.y, &mut self.height, &mut self.width] {
            *v *= k;
        }
        self
    }
}

/// A 224 × 224 single-channel image with intensities in [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct StimulusImage {
    pub pixels: Vec<f32>,
    pub placements: Vec<LetterPlacement>,
    pub word: String,
    pub font: String,
    pub size: u32,
    pub seed: Option<u64>,
    pub background: f32,
}

impl StimulusImage {
    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.pixels[y * SIDE + x]
    }

    /// `[x0, y0, x1, y1]` (inclusive) of pixels that differ from the background.
    pub fn ink_bbox(&self) -> Option<[usize; 4]> {
        let mut b: Option<[usize; 4]> = None;
        for (i, p) in self.pixels.iter().enumerate() {
            if (p - self.background).abs() > 1e-6 {
                let (x, y) = (i % SIDE, i / SIDE);
                b = Some(match b {
                    None => [x, y, x, y],
                    Some([x0, y0, x1, y1]) => [x0.min(x), y0.min(y), x1.max(x), y1.max(y)],
                });
            }
        }
        b
    }

    /// Centre of the ink box in continuous pixel coordinates.
    pub fn ink_center(&self) -> Option<(f64, f64)> {
        self.ink_bbox().map(|[x0, y0, x1, y1]| ((x0 + x1 + 1) as f64 / 2.0, (y0 + y1 + 1) as f64 / 2.0))
    }

    pub fn to_gray8(&self) -> Vec<u8> {
        self.pixels.iter().map(|p| (p.clamp(0.0, 1.0) * 255.0).round() as u8).collect()
    }

    pub fn save_png(&self, path: &Path) -> Result<(), RenderError> {
        let io = |e: String| RenderError::Io { path: path.display().to_string(), message: e };
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| io(e.to_string()))?;
        }
        let img = image::GrayImage::from_raw(SIDE as u32, SIDE as u32, self.to_gray8()).expect("buffer size matches");
        img.save_with_format(path, image::ImageFormat::Png).map_err(|e| io(e.to_string()))
    }
}

#[derive(Clone, Debug)]
pub struct RenderConfig {
    pub fonts: Vec<FontFace>,
    pub sizes: Vec<u32>,
    /// Standard deviation of the per-letter rotation, radians.
    pub rotation_sigma: f64,
    pub translation_factor: f64,
    /// Also shift the whole word to a random position that keeps it on the canvas.
    pub word_shift: bool,
    pub background: f32,
    pub foreground: f32,
}

impl RenderConfig {
    pub fn with_fonts(fonts: Vec<FontFace>) -> Self {
        Self {
            fonts,
            sizes: default_sizes(),
            rotation_sigma: default_rotation_sigma(),
            translation_factor: TRANSLATION_FACTOR,
            word_shift: false,
            background: 1.0,
            foreground: 0.0,
        }
    }

    /// Discovered system fonts (see [`discover_fonts`]).
    pub fn discover() -> Self {
        Self::with_fonts(discover_fonts())
    }

    /// No augmentation: letters stay at their typeset positions.
    pub fn plain(mut self) -> Self {
        self.rotation_sigma = 0.0;
        self.translation_factor = 0.0;
        self
    }

    pub fn validate(&self) -> Result<(), RenderError> {
        let bad = |m: &str| Err(RenderError::InvalidConfig(m.into()));
        if self.fonts.is_empty() {
            return bad("no fonts");
        }
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return bad("sizes must be non-empty and positive");
        }
        let non_negative = |x: f64| x.is_finite() && x >= 0.0;
        if !non_negative(self.rotation_sigma) || !non_negative(self.translation_factor) {
            return bad("rotation sigma and translation factor must be non-negative");
        }
        if !(0.0..=1.0).contains(&self.background) || !(0.0..=1.0).contains(&self.foreground) {
            return bad("intensities must lie in [0, 1]");
        }
        Ok(())
    }
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self::discover()
    }
}

/// Antialiased coverage of one glyph at its typeset position.
struct Glyph {
    letter: char,
    min_x: i32,
    min_y: i32,
    w: usize,
    h: usize,
    cov: Vec<f32>,
}

impl Glyph {
    fn center(&self) -> (f64, f64) {
        (self.min_x as f64 + self.w as f64 / 2.0, self.min_y as f64 + self.h as f64 / 2.0)
    }

    /// Tight box of nonzero coverage, in layout coordinates.
    fn ink(&self) -> Option<[i32; 4]> {
        let mut b: Option<[i32; 4]> = None;
        for (i, c) in self.cov.iter().enumerate() {
            if *c > 0.0 {
                let (x, y) = (self.min_x + (i % self.w) as i32, self.min_y + (i / self.w) as i32);
                b = Some(b.map_or([x, y, x, y], |[x0, y0, x1, y1]| [x0.min(x), y0.min(y), x1.max(x), y1.max(y)]));
            }
        }
        b
    }

    fn sample(&self, u: f64, v: f64) -> f32 {
        let (x0, y0) = (u.floor(), v.floor());
        let (fx, fy) = ((u - x0) as f32, (v - y0) as f32);
        let at = |x: f64, y: f64| -> f32 {
            if x < 0.0 || y < 0.0 || x >= self.w as f64 || y >= self.h as f64 {
                0.0
            } else {
                self.cov[y as usize * self.w + x as usize]
            }
        };
        let top = at(x0, y0) * (1.0 - fx) + at(x0 + 1.0, y0) * fx;
        let bottom = at(x0, y0 + 1.0) * (1.0 - fx) + at(x0 + 1.0, y0 + 1.0) * fx;
        top * (1.0 - fy) + bottom * fy
    }
}

/// Lay out `word` with the em square equal to `size` pixels, baseline at the ascent.
fn typeset(word: &str, face: &FontFace, size: u32) -> Result<Vec<Glyph>, RenderError> {
    if word.is_empty() {
        return Err(RenderError::EmptyWord);
    }
    let font = &face.font;
    let upem = font.units_per_em().unwrap_or(1000.0);
    let scale = PxScale::from(size as f32 * font.height_unscaled() / upem);
    let scaled = font.as_scaled(scale);
    let missing = |ch| RenderError::MissingGlyph { ch, font: face.name.clone() };
    let mut caret = 0.0f32;
    let mut prev: Option<GlyphId> = None;
    let mut out = Vec::with_capacity(word.len());
    for ch in word.chars() {
        let id = font.glyph_id(ch);
        if id.0 == 0 {
            return Err(missing(ch));
        }
        if let Some(p) = prev {
            caret += scaled.kern(p, id);
        }
        let glyph = id.with_scale_and_position(scale, point(caret, scaled.ascent()));
        caret += scaled.h_advance(id);
        prev = Some(id);
        let outlined = font.outline_glyph(glyph).ok_or_else(|| missing(ch))?;
        let bounds = outlined.px_bounds();
        let (w, h) = (bounds.width() as usize, bounds.height() as usize);
        let mut cov = vec![0.0f32; w * h];
        outlined.draw(|x, y, c| {
            if let Some(p) = cov.get_mut(y as usize * w + x as usize) {
                *p = c.clamp(0.0, 1.0);
            }
        });
        out.push(Glyph { letter: ch, min_x: bounds.min.x as i32, min_y: bounds.min.y as i32, w, h, cov });
    }
    Ok(out)
}

fn extent(glyphs: &[Glyph]) -> [i32; 4] {
    glyphs.iter().fold([i32::MAX, i32::MAX, i32::MIN, i32::MIN], |[x0, y0, x1, y1], g| {
        [x0.min(g.min_x), y0.min(g.min_y), x1.max(g.min_x + g.w as i32), y1.max(g.min_y + g.h as i32)]
    })
}

/// Accumulate one glyph into an ink buffer, rotated by `theta` about its box
/// centre placed at `(cx, cy)`.
fn composite(ink: &mut [f32], side: usize, g: &Glyph, cx: f64, cy: f64, theta: f64) {
    let (s, c) = theta.sin_cos();
    let r = 0.5 * (g.w as f64).hypot(g.h as f64) + 1.0;
    let lo = |v: f64| ((v - r).floor().max(0.0)) as usize;
    let hi = |v: f64| ((v + r).ceil().max(0.0) as usize).min(side);
    let (hw, hh) = (g.w as f64 / 2.0, g.h as f64 / 2.0);
    for py in lo(cy)..hi(cy) {
        for px in lo(cx)..hi(cx) {
            let dx = px as f64 + 0.5 - cx;
            let dy = py as f64 + 0.5 - cy;
            let u = c * dx + s * dy + hw - 0.5;
            let v = -s * dx + c * dy + hh - 0.5;
            let cov = g.sample(u, v);
            if cov > 0.0 {
                let p = &mut ink[py * side + px];
                *p = 1.0 - (1.0 - *p) * (1.0 - cov);
            }
        }
    }
}

fn shade(ink: &[f32], background: f32, foreground: f32) -> Vec<f32> {
    ink.iter().map(|i| (background + (foreground - background) * i).clamp(0.0, 1.0)).collect()
}

fn resize(pixels: Vec<f32>, side: usize) -> Vec<f32> {
    if side == SIDE {
        return pixels;
    }
    let buf: image::ImageBuffer<image::Luma<f32>, Vec<f32>> =
        image::ImageBuffer::from_raw(side as u32, side as u32, pixels).expect("buffer size matches");
    let out = image::imageops::resize(&buf, SIDE as u32, SIDE as u32, image::imageops::FilterType::Triangle);
    out.into_raw().into_iter().map(|p| p.clamp(0.0, 1.0)).collect()
}

/// One augmented image. Font and size are drawn uniformly, each letter gets a
/// normally distributed rotation and a translation rejection-sampled inside
/// its bounding circle. All randomness comes from `seed`.
pub fn render_training_image(word: &LetterString, config: &RenderConfig, seed: u64) -> Result<StimulusImage, RenderError> {
    config.validate()?;
    let mut rng = rng_from(seed);
    let face = &config.fonts[rng.random_range(0..config.fonts.len())];
    let size = config.sizes[rng.random_range(0..config.sizes.len())];
    let glyphs = typeset(word.as_str(), face, size)?;
    let [x0, y0, x1, y1] = extent(&glyphs);
    let (ww, wh) = ((x1 - x0) as usize, (y1 - y0) as usize);
    let margin = glyphs.iter().map(|g| config.translation_factor * (g.w as f64).hypot(g.h as f64)).fold(0.0, f64::max);
    let side = SIDE.max((ww.max(wh) as f64 + 2.0 * margin).ceil() as usize);

    let mut off_x = (side as i32 - ww as i32) / 2 - x0;
    let mut off_y = (side as i32 - wh as i32) / 2 - y0;
    if config.word_shift {
        off_x += rng.random_range(-((side - ww) as i32 / 2)..=(side - ww) as i32 / 2);
        off_y += rng.random_range(-((side - wh) as i32 / 2)..=(side - wh) as i32 / 2);
    }

    let rotation = Normal::new(0.0, config.rotation_sigma).map_err(|e| RenderError::InvalidConfig(e.to_string()))?;
    let mut ink = vec![0.0f32; side * side];
    let mut placements = Vec::with_capacity(glyphs.len());
    for g in &glyphs {
        let (gx, gy) = g.center();
        let (b, a) = (gx + off_x as f64, gy + off_y as f64);
        let theta = rotation.sample(&mut rng);
        let mut p = LetterPlacement { letter: g.letter, a, b, x: b, y: a, rotation: theta, height: g.h as f64, width: g.w as f64 };
        let r = p.translation_radius(config.translation_factor);
        loop {
            let (u, v): (f64, f64) = (rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
            if u * u + v * v > 1.0 {
                continue;
            }
            p.x = b + r * u;
            p.y = a + r * v;
            if p.within_circle(config.translation_factor) {
                break;
            }
        }
        composite(&mut ink, side, g, p.x, p.y, theta);
        placements.push(p);
    }
    let k = SIDE as f64 / side as f64;
    Ok(StimulusImage {
        pixels: resize(shade(&ink, config.background, config.foreground), side),
        placements: placements.into_iter().map(|p| p.scaled(k)).collect(),
        word: word.as_str().into(),
        font: face.name.clone(),
        size,
        seed: Some(seed),
        background: config.background,
    })
}

/// Canonical prime image: `face` at size 26, no augmentation, ink box centred.
pub fn render_prime_with(s: &LetterString, face: &FontFace) -> Result<StimulusImage, RenderError> {
    let glyphs = typeset(s.as_str(), face, PRIME_SIZE)?;
    let ink = glyphs.iter().filter_map(Glyph::ink).reduce(|[a, b, c, d], [e, f, g, h]| [a.min(e), b.min(f), c.max(g), d.max(h)]);
    let [x0, y0, x1, y1] = ink.unwrap_or_else(|| extent(&glyphs));
    let half = SIDE as f64 / 2.0;
    let off_x = (half - (x0 + x1 + 1) as f64 / 2.0).round();
    let off_y = (half - (y0 + y1 + 1) as f64 / 2.0).round();
    let mut buf = vec![0.0f32; SIDE * SIDE];
    let mut placements = Vec::with_capacity(glyphs.len());
    for g in &glyphs {
        let (gx, gy) = g.center();
        let (b, a) = (gx + off_x, gy + off_y);
        composite(&mut buf, SIDE, g, b, a, 0.0);
        placements.push(LetterPlacement { letter: g.letter, a, b, x: b, y: a, rotation: 0.0, height: g.h as f64, width: g.w as f64 });
    }
    Ok(StimulusImage {
        pixels: shade(&buf, 1.0, 0.0),
        placements,
        word: s.as_str().into(),
        font: face.name.clone(),
        size: PRIME_SIZE,
        seed: None,
        background: 1.0,
    })
}

/// [`render_prime_with`] using Arial when available (see [`prime_font`]).
pub fn render_prime_image(s: &LetterString) -> Result<StimulusImage, RenderError> {
    render_prime_with(s, &prime_font())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &str) -> LetterString {
        LetterString::parse(s).unwrap()
    }

    fn bundled() -> RenderConfig {
        RenderConfig::with_fonts(vec![FontFace::bundled()])
    }

    #[test]
    fn size_set_is_even_18_to_36() {
        assert_eq!(default_sizes(), vec![18, 20, 22, 24, 26, 28, 30, 32, 34, 36]);
    }

    #[test]
    fn placements_satisfy_circle() {
        let cfg = bundled();
        for seed in 0..20 {
            let img = render_training_image(&word("ABDUCT"), &cfg, seed).unwrap();
            assert_eq!(img.pixels.len(), SIDE * SIDE);
            assert_eq!(img.placements.len(), 6);
            assert!(img.placements.iter().all(|p| p.within_circle(TRANSLATION_FACTOR)));
            assert!(img.ink_bbox().is_some());
        }
    }

    #[test]
    fn plain_config_keeps_nominal_positions() {
        let cfg = bundled().plain();
        let img = render_training_image(&word("DESIGN"), &cfg, 3).unwrap();
        for p in &img.placements {
            assert_eq!((p.x, p.y, p.rotation), (p.b, p.a, 0.0));
        }
    }

    #[test]
    fn prime_is_centred_and_deterministic() {
        let face = FontFace::bundled();
        let a = render_prime_with(&word("DESIGN"), &face).unwrap();
        let b = render_prime_with(&word("DESIGN"), &face).unwrap();
        assert_eq!(a.to_gray8(), b.to_gray8());
        let (cx, cy) = a.ink_center().unwrap();
        assert!((cx - 112.0).abs() <= 1.0 && (cy - 112.0).abs() <= 1.0, "{cx} {cy}");
    }

    #[test]
    fn missing_glyph_is_reported() {
        let face = FontFace::bundled();
        assert!(matches!(typeset("A\u{10FFFD}", &face, 26), Err(RenderError::MissingGlyph { .. })));
    }
}
