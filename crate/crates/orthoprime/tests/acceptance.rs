//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use orthoprime::coding_schemes::calibration::{self, CALIBRATED_TOLERANCE, EXACT_TOLERANCE};
use orthoprime::ingest::fixtures::FIXTURE_CSV;
use orthoprime::ingest::load_fixtures;
use orthoprime::lexicon::Generator;
use orthoprime::prime_gen::{apply_code, gen_arbitrary, gen_pseudoword};
use orthoprime::renderer::{render_prime_with, render_training_image, FontFace, RenderConfig, TRANSLATION_FACTOR};
use orthoprime::stats::{aggregate_by_condition, bootstrap_se, correlation_matrix, kendall_tau, pixel_cs_pairs, PixelSpace};
use orthoprime::{catalog, generate_prime_set, rng_from, Exec, LetterString, Matcher, Scheme, SchemeParams, TargetLexicon};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const EXACT_RUNTIME: Duration = Duration::from_secs(1);
const MATRIX_RUNTIME: Duration = Duration::from_secs(5);
const KENDALL_TOLERANCE: f64 = 1e-12;
const FROZEN_TAU_ABSOLUTE: f64 = 0.5184617101350538;
const SE_RANGE: (f64, f64) = (0.0, 0.2);
const ALPHA: f64 = 0.05;
const PLACEMENTS: usize = 10_000;
const ROTATION_TOLERANCE: f64 = 0.10;
const CENTRE_TOLERANCE_PX: f64 = 1.0;
const PRIME_SET_SEED: u64 = 1;

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn exact_scheme(scheme: Scheme) -> Outcome {
    let start = Instant::now();
    let report = calibration::evaluate(&Matcher::default(), scheme);
    let elapsed = start.elapsed();
    let worst = report.worst();
    outcome(
        report.within(EXACT_TOLERANCE) && elapsed < EXACT_RUNTIME,
        format!("max|Δ|={:.4} at {} (tol {EXACT_TOLERANCE}), runtime {elapsed:?} (< {EXACT_RUNTIME:?})", report.max_error, worst.short_code),
    )
}

fn calibrated_schemes() -> Outcome {
    let params = SchemeParams::default();
    let m = Matcher::new(params.clone());
    let mut pass = calibration::calibrate(&params).is_ok();
    let mut parts = Vec::new();
    for s in [Scheme::OverlapOB, Scheme::SeriolOB, Scheme::SpatialCoding] {
        let r = calibration::evaluate(&m, s);
        pass &= r.within(CALIBRATED_TOLERANCE);
        parts.push(format!("{} {:.4}", s.column(), r.max_error));
    }
    outcome(pass, format!("max|Δ|: {} (tol {CALIBRATED_TOLERANCE})", parts.join(", ")))
}

fn code_properties(target: &LetterString, code: &str, prime: &LetterString) -> bool {
    let (t, p) = (target.as_bytes(), prime.as_bytes());
    if p.len() != code.len() {
        return false;
    }
    let mut fresh = Vec::new();
    let mut repeated = Vec::new();
    for (c, &l) in code.bytes().zip(p) {
        match c {
            b'd' => fresh.push(l),
            b'D' => repeated.push(l),
            _ if l != t[(c - b'1') as usize] => return false,
            _ => {}
        }
    }
    let mut uniq = fresh.clone();
    uniq.sort();
    uniq.dedup();
    uniq.len() == fresh.len()
        && fresh.iter().chain(&repeated).all(|l| !target.contains(*l))
        && repeated.windows(2).all(|w| w[0] == w[1])
        && repeated.first().is_none_or(|r| !fresh.contains(r))
}

fn prime_generation() -> Outcome {
    let design = LetterString::parse("DESIGN").unwrap();
    let rows = [
        ("12345", "DESIG"),
        ("123465", "DESING"),
        ("123546", "DESGIN"),
        ("1256", "DEGN"),
        ("214365", "EDISNG"),
        ("321654", "SEDNGI"),
        ("456123", "IGNDES"),
        ("415263", "IDGENS"),
        ("165432", "DNGISE"),
    ];
    let mut failures = Vec::new();
    for (code, expected) in rows {
        let got = apply_code(&design, code, &mut rng_from(0)).unwrap();
        if got.as_str() != expected {
            failures.push(format!("{code}->{got}"));
        }
    }
    // "designl": fixed prefix plus one fresh letter.
    let mut checked = 0usize;
    for seed in 0..1000u64 {
        for cond in catalog().iter().filter(|c| c.codes.iter().any(|k| k.contains(['d', 'D']))) {
            for code in cond.codes {
                let mut rng = rng_from(seed);
                let prime = match cond.generator {
                    Generator::Code => apply_code(&design, code, &mut rng),
                    Generator::Pseudoword => gen_pseudoword(&design, &mut rng),
                    Generator::Arbitrary => gen_arbitrary(&design, &mut rng),
                };
                checked += 1;
                match prime {
                    Ok(p) if code_properties(&design, code, &p) && (*code != "123456d" || p.as_str().starts_with("DESIGN")) => {}
                    Ok(p) => failures.push(format!("seed {seed} {code}->{p}")),
                    Err(e) => failures.push(format!("seed {seed} {code}: {e}")),
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("9 deterministic DESIGN rows + {checked} random-slot primes over 1000 seeds; failures: {:?}", &failures[..failures.len().min(3)]),
    )
}

fn brute_tau(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let (mut s, mut tx, mut ty) = (0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let a = (x[i] > x[j]) as i64 - (x[i] < x[j]) as i64;
            let b = (y[i] > y[j]) as i64 - (y[i] < y[j]) as i64;
            s += a * b;
            tx += (a == 0) as i64;
            ty += (b == 0) as i64;
        }
    }
    let n0 = (n * (n - 1) / 2) as i64;
    s as f64 / (((n0 - tx) * (n0 - ty)) as f64).sqrt()
}

fn statistics_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(28);
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let levels = if k % 2 == 0 { 6 } else { 10_000 };
        let x: Vec<f64> = (0..28).map(|_| rng.random_range(0..levels) as f64).collect();
        let y: Vec<f64> = (0..28).map(|_| rng.random_range(0..levels) as f64).collect();
        worst = worst.max((kendall_tau(&x, &y).unwrap().tau - brute_tau(&x, &y)).abs());
    }
    let fx = load_fixtures();
    let frozen = kendall_tau(fx.column("Absolute").unwrap(), fx.priming()).unwrap().tau;
    let drift = (frozen - FROZEN_TAU_ABSOLUTE).abs();
    outcome(
        worst < KENDALL_TOLERANCE && drift < KENDALL_TOLERANCE,
        format!("200 random 28-vectors max|Δ|={worst:.1e}; tau(Absolute, Priming-ARB)={frozen:.12} (frozen {FROZEN_TAU_ABSOLUTE}); tol {KENDALL_TOLERANCE:e}"),
    )
}

fn bootstrap() -> Outcome {
    let fx = load_fixtures();
    let mut pass = true;
    let mut parts = Vec::new();
    for s in Scheme::ALL {
        let x = fx.column(s.column()).unwrap();
        let a = bootstrap_se(x, fx.priming(), 1000, 2023, Exec::Parallel).unwrap();
        let b = bootstrap_se(x, fx.priming(), 1000, 2023, Exec::Sequential).unwrap();
        pass &= a.to_bits() == b.to_bits() && a > SE_RANGE.0 && a < SE_RANGE.1;
        parts.push(format!("{} {a:.4}", s.column()));
    }
    outcome(pass, format!("SE (n=1000, bit-identical across runs/paths, in ({}, {})): {}", SE_RANGE.0, SE_RANGE.1, parts.join(", ")))
}

fn pixcs() -> Outcome {
    let set = generate_prime_set(&TargetLexicon::stand_in(), PRIME_SET_SEED, Exec::default()).unwrap();
    let pairs = pixel_cs_pairs(&set, &FontFace::bundled(), PixelSpace::Ink, Exec::default()).unwrap();
    let agg = aggregate_by_condition(&pairs).unwrap();
    let mean = |code: &str| agg.iter().find(|a| a.short_code == code).unwrap().mean;
    let id_exact = agg[0].values.iter().all(|v| *v == 1.0);
    let means: Vec<f64> = agg.iter().map(|a| a.mean).collect();
    let t = kendall_tau(&means, load_fixtures().priming()).unwrap();
    let (tl56, dl1f) = (mean("TL56"), mean("DL-1F"));
    outcome(
        id_exact && t.p_value >= ALPHA && tl56 > dl1f,
        format!(
            "ID all 1.0: {id_exact}; tau(pixCS, Priming-ARB)={:.3} p={:.3} (non-significant at {ALPHA}); TL56 {tl56:.3} > DL-1F {dl1f:.3}",
            t.tau, t.p_value
        ),
    )
}

fn renderer() -> Outcome {
    let cfg = RenderConfig::with_fonts(vec![FontFace::bundled()]);
    let words: Vec<LetterString> = TargetLexicon::stand_in().targets.into_iter().take(50).collect();
    let (mut placements, mut violations, mut rotations) = (0usize, 0usize, Vec::new());
    let mut seed = 0u64;
    while placements < PLACEMENTS {
        let img = render_training_image(&words[seed as usize % words.len()], &cfg, seed).unwrap();
        for p in &img.placements {
            placements += 1;
            violations += !p.within_circle(TRANSLATION_FACTOR) as usize;
            rotations.push(p.rotation);
        }
        seed += 1;
    }
    let mean = rotations.iter().sum::<f64>() / rotations.len() as f64;
    let sd = (rotations.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (rotations.len() - 1) as f64).sqrt();
    let sigma = 2.0 * PI / 45.0;
    let face = FontFace::bundled();
    let (mut deterministic, mut worst_off) = (true, 0.0f64);
    for w in words.iter().chain(&[LetterString::parse("DESIGN").unwrap(), LetterString::parse("DES").unwrap()]) {
        let a = render_prime_with(w, &face).unwrap();
        deterministic &= a.to_gray8() == render_prime_with(w, &face).unwrap().to_gray8();
        let (cx, cy) = a.ink_center().unwrap();
        worst_off = worst_off.max((cx - 112.0).abs()).max((cy - 112.0).abs());
    }
    outcome(
        violations == 0 && (sd - sigma).abs() <= ROTATION_TOLERANCE * sigma && deterministic && worst_off <= CENTRE_TOLERANCE_PX,
        format!(
            "{placements} placements, {violations} outside circle; rotation sd {sd:.4} vs {sigma:.4} (±{}%); primes deterministic: {deterministic}; max centre offset {worst_off:.1}px (≤ {CENTRE_TOLERANCE_PX})",
            ROTATION_TOLERANCE * 100.0
        ),
    )
}

fn raw_column(name: &str) -> Vec<f64> {
    let mut rdr = csv::Reader::from_reader(FIXTURE_CSV.as_bytes());
    let idx = rdr.headers().unwrap().iter().position(|h| h == name).unwrap();
    rdr.records().map(|r| r.unwrap()[idx].parse().unwrap()).collect()
}

fn correlation_matrix_check() -> Outcome {
    let fx = load_fixtures();
    let cols: Vec<(&str, &[f64])> = fx.columns.iter().map(|c| (c.name.as_str(), c.values.as_slice())).collect();
    let start = Instant::now();
    let m = correlation_matrix(&cols, Exec::default()).unwrap();
    let elapsed = start.elapsed();
    let k = cols.len();
    let symmetric = (0..k).all(|i| (0..k).all(|j| m.tau(i, j) == m.tau(j, i)));
    let diagonal = (0..k).all(|i| m.tau(i, i) == 1.0);
    let p = fx.names().iter().position(|n| *n == "Priming-ARB").unwrap();
    let negated = ["SCM", "IA"].iter().all(|name| {
        let i = fx.names().iter().position(|n| n == name).unwrap();
        let raw = kendall_tau(&raw_column(name), fx.priming()).unwrap().tau;
        fx.columns[i].negated && (m.tau(i, p) + raw).abs() < 1e-12 && m.tau(i, p) > 0.0
    });
    outcome(
        symmetric && diagonal && negated && elapsed < MATRIX_RUNTIME,
        format!("{k}×{k}; symmetric {symmetric}; unit diagonal {diagonal}; SCM/IA negated {negated}; runtime {elapsed:?} (< {MATRIX_RUNTIME:?})"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 9] = [
        ("absolute-oracle", || exact_scheme(Scheme::Absolute)),
        ("binary-open-bigram-oracle", || exact_scheme(Scheme::BinaryOB)),
        ("calibrated-schemes", calibrated_schemes),
        ("prime-generation", prime_generation),
        ("statistics-oracle", statistics_oracle),
        ("bootstrap", bootstrap),
        ("pixcs-behaviour", pixcs),
        ("renderer-constraints", renderer),
        ("correlation-matrix", correlation_matrix_check),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        failed += !o.pass as usize;
        println!("{} [{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
