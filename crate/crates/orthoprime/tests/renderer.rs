use std::f64::consts::PI;

use orthoprime::renderer::{
    discover_in, manifest_hash, render_prime_images, render_prime_with, render_training_image, render_training_set, FontFace,
    Manifest, RenderConfig, Split, SIDE, TRANSLATION_FACTOR,
};
use orthoprime::stats::{pixel_cs, pixel_cs_in, PixelSpace};
use orthoprime::{generate_prime_set, Exec, LetterString, TargetLexicon};

fn word(s: &str) -> LetterString {
    LetterString::parse(s).unwrap()
}

fn bundled() -> RenderConfig {
    RenderConfig::with_fonts(vec![FontFace::bundled()])
}

#[test]
fn rotation_spread_matches_sigma() {
    let cfg = bundled();
    let mut rot = Vec::new();
    for seed in 0..1000 {
        let img = render_training_image(&word("ABDUCT"), &cfg, seed).unwrap();
        assert!(img.placements.iter().all(|p| p.within_circle(TRANSLATION_FACTOR)));
        assert!(img.pixels.iter().all(|p| (0.0..=1.0).contains(p)));
        rot.extend(img.placements.iter().map(|p| p.rotation));
    }
    let mean = rot.iter().sum::<f64>() / rot.len() as f64;
    let sd = (rot.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (rot.len() - 1) as f64).sqrt();
    let sigma = 2.0 * PI / 45.0;
    assert!((sd - sigma).abs() < 0.1 * sigma, "{sd} vs {sigma}");
}

#[test]
fn translations_fill_the_disc() {
    let cfg = bundled();
    let mut max_frac: f64 = 0.0;
    for seed in 0..200 {
        for p in render_training_image(&word("DESIGN"), &cfg, seed).unwrap().placements {
            let d = (p.x - p.b).hypot(p.y - p.a) / p.translation_radius(TRANSLATION_FACTOR);
            max_frac = max_frac.max(d);
        }
    }
    assert!(max_frac > 0.9 && max_frac <= 1.0, "{max_frac}");
}

#[test]
fn prime_widths_and_heights() {
    let face = FontFace::bundled();
    let des = render_prime_with(&word("DES"), &face).unwrap().ink_bbox().unwrap();
    let design = render_prime_with(&word("DESIGN"), &face).unwrap().ink_bbox().unwrap();
    assert_eq!(des[3] - des[1], design[3] - design[1]);
    assert!(des[2] - des[0] < design[2] - design[0]);
    let img = render_prime_with(&word("DESIGN"), &face).unwrap();
    assert!(img.placements.iter().all(|p| p.x == p.b && p.y == p.a && p.rotation == 0.0));
}

#[test]
fn pixel_similarity_ordering() {
    let face = FontFace::bundled();
    let target = render_prime_with(&word("DESIGN"), &face).unwrap();
    let again = render_prime_with(&word("DESIGN"), &face).unwrap();
    assert_eq!(pixel_cs(&target, &again).unwrap(), 1.0);
    let tl56 = pixel_cs(&render_prime_with(&word("DESING"), &face).unwrap(), &target).unwrap();
    let dl1f = pixel_cs(&render_prime_with(&word("DESIG"), &face).unwrap(), &target).unwrap();
    assert!(tl56 > dl1f, "{tl56} vs {dl1f}");
    // Raw intensities are dominated by the shared background.
    assert!(pixel_cs_in(&render_prime_with(&word("XQZVKP"), &face).unwrap(), &target, PixelSpace::Intensity).unwrap() > 0.9);
}

#[test]
fn training_set_split_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = bundled();
    let words = [word("DESIGN")];
    let m = render_training_set(&words, 6, &cfg, 5, dir.path(), Exec::Parallel).unwrap();
    assert_eq!(m.entries.len(), 6);
    assert_eq!((m.count(Split::Train), m.count(Split::Validation)), (5, 1));
    for e in &m.entries {
        let img = image::open(dir.path().join(&e.path)).unwrap();
        assert_eq!((img.width(), img.height()), (SIDE as u32, SIDE as u32));
        assert!(matches!(img, image::DynamicImage::ImageLuma8(_)));
        assert!(e.path.contains(&format!("DESIGN_{}_", e.path.split('_').nth(1).unwrap())));
    }
    let dir2 = tempfile::tempdir().unwrap();
    let m2 = render_training_set(&words, 6, &cfg, 5, dir2.path(), Exec::Sequential).unwrap();
    assert_eq!(manifest_hash(&m), manifest_hash(&m2));
    assert_eq!(Manifest::read(&dir.path().join("manifest.json")).unwrap(), m);
    for e in &m.entries {
        assert_eq!(std::fs::read(dir.path().join(&e.path)).unwrap(), std::fs::read(dir2.path().join(&e.path)).unwrap());
    }
}

#[test]
fn prime_tree_covers_primes_and_targets() {
    // Twelve targets split evenly over every condition's sub-codes.
    let mut words: Vec<&str> = vec!["DESIGN"];
    let stand_in = TargetLexicon::stand_in();
    words.extend(stand_in.targets.iter().map(|t| t.as_str()).filter(|w| *w != "DESIGN").take(11));
    let lex = TargetLexicon::from_words(&words, orthoprime::lexicon::LexiconMode::Free).unwrap();
    let set = generate_prime_set(&lex, 1, Exec::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let m = render_prime_images(&set, &FontFace::bundled(), dir.path(), Exec::default()).unwrap();
    assert_eq!(m.count(Split::Prime), 12 * 28);
    assert_eq!(m.count(Split::Target), 12);
    let entry = m.entries.iter().find(|e| e.id.as_deref() == Some("DESIGN_NATL-24/35")).unwrap();
    assert!(dir.path().join(&entry.path).exists());
}

#[test]
fn font_discovery_reads_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(concat!(env!("CARGO_MANIFEST_DIR"), "/assets/DejaVuSans.ttf"), dir.path().join("Arial.ttf")).unwrap();
    std::fs::write(dir.path().join("broken.ttf"), b"not a font").unwrap();
    let faces = discover_in(&[dir.path().to_path_buf()]);
    assert_eq!(faces.iter().map(|f| f.name.as_str()).collect::<Vec<_>>(), ["Arial"]);
    assert!(FontFace::load(&dir.path().join("broken.ttf")).is_err());
}
