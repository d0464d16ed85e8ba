use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context as _};
use log::{info, warn};
use orthoprime::coding_schemes::SchemeParams;
use orthoprime::ingest::{load_fixtures, load_letter_ratings, read_activations, ActivationSet};
use orthoprime::lexicon::{load_lexicon, LexiconError, LexiconMode};
use orthoprime::prime_gen::{target_stimulus_id, PrimeError, PrimeRecord};
use orthoprime::renderer::{prime_font, render_prime_images, render_training_set, RenderConfig, RenderError, PRIME_FACE};
use orthoprime::stats::{
    aggregate_by_condition, bootstrap_se, condition_distributions, correlation_matrix, cosine, distributions_csv, kendall_tau,
    letter_similarity_analysis, pixel_cs_pairs, stars, ConditionSummary, PixelSpace,
};
use orthoprime::{catalog, generate_prime_set, Exec, LetterString, Matcher, PrimeSet, Scheme, TargetLexicon};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::{AnalyzeArgs, Cli, IngestCheckArgs, MatchArgs, RenderTrainArgs};

pub const DEFAULT_PER_WORD: u64 = 6000;
pub const DEFAULT_BOOTSTRAP: u64 = 1000;
const AGAINST: &str = "Priming-ARB";

#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Usage(e) | Failure::Runtime(e) => e,
        }
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

impl From<LexiconError> for Failure {
    fn from(e: LexiconError) -> Self {
        usage(e)
    }
}

impl From<PrimeError> for Failure {
    fn from(e: PrimeError) -> Self {
        match e {
            PrimeError::Io(_) => runtime(e),
            _ => usage(e),
        }
    }
}

impl From<RenderError> for Failure {
    fn from(e: RenderError) -> Self {
        match e {
            RenderError::Io { .. } => runtime(e),
            _ => usage(e),
        }
    }
}

pub struct Context {
    seed: Option<u64>,
    lexicon: Option<PathBuf>,
    free_lexicon: bool,
    out: Option<PathBuf>,
    exec: Exec,
}

impl Context {
    pub fn new(cli: &Cli, cfg: &RunConfig) -> anyhow::Result<Self> {
        let sequential = cli.sequential || cfg.bool("sequential")?;
        Ok(Self {
            seed: cli.seed.or(cfg.u64("seed")?),
            lexicon: cli.lexicon.clone().or(cfg.path("lexicon")?),
            free_lexicon: cli.free_lexicon || cfg.bool("free_lexicon")?,
            out: cli.out.clone().or(cfg.path("out")?),
            exec: if sequential { Exec::Sequential } else { Exec::default() },
        })
    }

    fn seed(&self) -> Result<u64, Failure> {
        self.seed.ok_or_else(|| usage(anyhow!("--seed is required for this command")))
    }

    fn out(&self) -> Result<&Path, Failure> {
        self.out.as_deref().ok_or_else(|| usage(anyhow!("--out is required for this command")))
    }

    fn lexicon(&self) -> Result<TargetLexicon, Failure> {
        let mode = if self.free_lexicon { LexiconMode::Free } else { LexiconMode::FppStrict };
        match &self.lexicon {
            Some(p) => Ok(load_lexicon(p, mode)?),
            None => {
                warn!("no --lexicon given; using the bundled stand-in word list");
                Ok(TargetLexicon::stand_in())
            }
        }
    }

    fn prime_set(&self) -> Result<PrimeSet, Failure> {
        let seed = self.seed()?;
        let lex = self.lexicon()?;
        info!("generating primes for {} targets (seed {seed})", lex.len());
        Ok(generate_prime_set(&lex, seed, self.exec)?)
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display())).map_err(runtime)?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display())).map_err(runtime)
}

fn emit(summary: Value) {
    println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
}

pub fn gen_primes(ctx: &Context) -> Result<(), Failure> {
    let set = ctx.prime_set()?;
    let summary = json!({
        "command": "gen-primes",
        "seed": set.seed,
        "records": set.records.len(),
        "lexicon_sha256": set.lexicon_fingerprint,
        "out": ctx.out,
    });
    match &ctx.out {
        Some(out) => {
            write(out, &set.to_csv())?;
            write(&out.with_extension("json"), &serde_json::to_string_pretty(&summary).expect("json"))?;
            emit(summary);
        }
        None => print!("{}", set.to_csv()),
    }
    Ok(())
}

pub fn match_values(ctx: &Context, cfg: &RunConfig, args: MatchArgs) -> Result<(), Failure> {
    let schemes: Vec<Scheme> = match args.schemes.or(cfg.string("schemes").map_err(usage)?) {
        Some(list) => list.split(',').map(|s| s.trim().parse::<Scheme>().map_err(|e| usage(anyhow!(e)))).collect::<Result<_, _>>()?,
        None => Scheme::ALL.to_vec(),
    };
    let params = match args.params.or(cfg.path("params").map_err(usage)?) {
        Some(p) => SchemeParams::load(&p).map_err(usage)?,
        None => SchemeParams::default(),
    };
    let m = Matcher::new(params);
    let header: Vec<&str> = schemes.iter().map(|s| s.column()).collect();
    let mut out;
    if args.pairs.is_empty() {
        out = format!("short_code,{}\n", header.join(","));
        for (cond, row) in catalog().iter().zip(m.condition_table(&schemes, ctx.exec)) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.4}")).collect();
            out.push_str(&format!("{},{}\n", cond.short_code, cells.join(",")));
        }
    } else {
        out = format!("prime,target,{}\n", header.join(","));
        for pair in &args.pairs {
            let (p, t) = pair.split_once(':').ok_or_else(|| usage(anyhow!("--pair expects PRIME:TARGET, got {pair:?}")))?;
            let (p, t) = (LetterString::parse(p)?, LetterString::parse(t)?);
            let cells: Vec<String> = schemes.iter().map(|s| format!("{:.4}", m.match_value(*s, &p, &t).value)).collect();
            out.push_str(&format!("{p},{t},{}\n", cells.join(",")));
        }
    }
    match &ctx.out {
        Some(path) => write(path, &out),
        None => {
            print!("{out}");
            Ok(())
        }
    }
}

pub fn render_train(ctx: &Context, cfg: &RunConfig, args: RenderTrainArgs) -> Result<(), Failure> {
    let seed = ctx.seed()?;
    let out = ctx.out()?;
    let per_word = args.per_word.or(cfg.u64("per_word").map_err(usage)?).unwrap_or(DEFAULT_PER_WORD);
    if per_word == 0 {
        return Err(usage(anyhow!("--per-word must be positive")));
    }
    let lex = ctx.lexicon()?;
    let mut config = RenderConfig::discover();
    config.word_shift = args.word_shift || cfg.bool("word_shift").map_err(usage)?;
    info!("fonts: {}", config.fonts.iter().map(|f| f.name.as_str()).collect::<Vec<_>>().join(", "));
    info!("rendering {} images for {} words (seed {seed})", per_word as usize * lex.len(), lex.len());
    let m = render_training_set(&lex.targets, per_word as usize, &config, seed, out, ctx.exec)?;
    emit(json!({
        "command": "render-train",
        "seed": seed,
        "images": m.entries.len(),
        "manifest": out.join("manifest.json"),
        "manifest_sha256": orthoprime::renderer::manifest_hash(&m),
    }));
    Ok(())
}

pub fn render_primes(ctx: &Context) -> Result<(), Failure> {
    let out = ctx.out()?.to_path_buf();
    let set = ctx.prime_set()?;
    let face = prime_font();
    if !face.name.eq_ignore_ascii_case(PRIME_FACE) {
        warn!("{PRIME_FACE} not found (set ORTHOPRIME_FONT_DIR); rendering primes with {}", face.name);
    }
    let m = render_prime_images(&set, &face, &out, ctx.exec)?;
    emit(json!({
        "command": "render-primes",
        "seed": set.seed,
        "font": face.name,
        "images": m.entries.len(),
        "manifest": out.join("manifest.json"),
        "manifest_sha256": orthoprime::renderer::manifest_hash(&m),
    }));
    Ok(())
}

/// Per-target cosine between each prime vector and its target vector.
fn activation_pairs(set: &ActivationSet) -> Result<(Vec<(u8, f64)>, usize), Failure> {
    let index = set.index();
    let mut pairs = Vec::new();
    let mut missing = 0;
    let mut targets: Vec<&str> = index.keys().filter_map(|id| id.strip_suffix("_TARGET")).collect();
    targets.sort_unstable();
    for t in targets {
        let tv = index[format!("{t}_TARGET").as_str()];
        for cond in catalog().iter() {
            match index.get(format!("{t}_{}", cond.short_code).as_str()) {
                Some(pv) => pairs.push((cond.index, cosine(pv, tv).map_err(|e| usage(anyhow!("{}: {t}: {e}", set.model)))?)),
                None => missing += 1,
            }
        }
    }
    Ok((pairs, missing))
}

fn condition_means(name: &str, pairs: &[(u8, f64)]) -> Result<Vec<ConditionSummary>, Failure> {
    let agg = aggregate_by_condition(pairs).map_err(usage)?;
    if let Some(empty) = agg.iter().find(|s| s.count == 0) {
        return Err(usage(anyhow!("{name}: no values for condition {}", empty.short_code)));
    }
    Ok(agg)
}

fn record_similarities(set: &PrimeSet, sim: impl Fn(&PrimeRecord) -> Option<f64>) -> Vec<(PrimeRecord, f64)> {
    set.records.iter().filter_map(|r| sim(r).map(|s| (r.clone(), s))).collect()
}

pub fn analyze(ctx: &Context, cfg: &RunConfig, args: AnalyzeArgs) -> Result<(), Failure> {
    let fx = load_fixtures();
    let mut activations = args.activations;
    activations.extend(cfg.paths("activations").map_err(usage)?);
    let pixels = args.pixels || cfg.bool("pixels").map_err(usage)?;
    let ratings = args.ratings.or(cfg.path("ratings").map_err(usage)?);
    let fixtures = args.fixtures || cfg.bool("fixtures").map_err(usage)? || (activations.is_empty() && !pixels);
    let n_boot = args.bootstrap.or(cfg.u64("bootstrap").map_err(usage)?).unwrap_or(DEFAULT_BOOTSTRAP) as usize;
    let seed = ctx.seed.unwrap_or(0);

    // Fail on unreadable inputs before any expensive work.
    let sets: Vec<ActivationSet> = activations
        .iter()
        .map(|p| read_activations(p).map_err(|e| usage(anyhow!("{}: {e}", p.display()))))
        .collect::<Result<_, _>>()?;
    let ratings = ratings.map(|p| load_letter_ratings(&p).map_err(|e| usage(anyhow!("{}: {e}", p.display())))).transpose()?;
    let needs_primes = pixels || ratings.is_some();
    let prime_set = if needs_primes { Some(ctx.prime_set()?) } else { None };

    let mut metrics: Vec<(String, Vec<f64>)> = Vec::new();
    let mut summaries: Vec<(String, Vec<ConditionSummary>)> = Vec::new();
    let mut letter_inputs: Vec<(String, Vec<(PrimeRecord, f64)>)> = Vec::new();
    if fixtures {
        for c in fx.columns.iter().filter(|c| c.name != AGAINST) {
            metrics.push((c.name.clone(), c.values.clone()));
        }
    }
    for set in &sets {
        let (pairs, missing) = activation_pairs(set)?;
        if missing > 0 {
            warn!("{}: {missing} prime vectors missing", set.model);
        }
        let agg = condition_means(&set.model, &pairs)?;
        metrics.push((set.model.clone(), agg.iter().map(|s| s.mean).collect()));
        summaries.push((set.model.clone(), agg));
        if let Some(ps) = &prime_set {
            let index = set.index();
            let recs = record_similarities(ps, |r| {
                let p = index.get(r.stimulus_id().as_str())?;
                let t = index.get(target_stimulus_id(&r.target).as_str())?;
                cosine(p, t).ok()
            });
            letter_inputs.push((set.model.clone(), recs));
        }
    }
    if pixels {
        let ps = prime_set.as_ref().expect("generated above");
        let face = prime_font();
        info!("rendering {} prime/target pairs with {}", ps.records.len(), face.name);
        let pairs = pixel_cs_pairs(ps, &face, PixelSpace::Ink, ctx.exec)?;
        let name = "pixCS-rendered".to_string();
        let agg = condition_means(&name, &pairs)?;
        metrics.push((name.clone(), agg.iter().map(|s| s.mean).collect()));
        summaries.push((name.clone(), agg));
        let recs: Vec<(PrimeRecord, f64)> = ps.records.iter().cloned().zip(pairs.iter().map(|p| p.1)).collect();
        letter_inputs.push((name, recs));
    }

    let priming = fx.priming();
    let mut rows = Vec::new();
    for (name, means) in &metrics {
        let t = kendall_tau(means, priming).map_err(|e| usage(anyhow!("{name}: {e}")))?;
        let se = if n_boot > 1 { Some(bootstrap_se(means, priming, n_boot, seed, ctx.exec).map_err(usage)?) } else { None };
        rows.push(json!({"metric": name, "tau": t.tau, "p": t.p_value, "se": se, "stars": stars(t.p_value), "n": means.len()}));
    }
    let mut columns: Vec<(&str, &[f64])> = vec![(AGAINST, priming)];
    columns.extend(metrics.iter().map(|(n, v)| (n.as_str(), v.as_slice())));
    let matrix = if columns.len() >= 2 { Some(correlation_matrix(&columns, ctx.exec).map_err(usage)?) } else { None };

    let mut letter = Vec::new();
    if let Some(r) = &ratings {
        if r.is_synthetic() {
            warn!("letter ratings are synthetic test data, not human judgements");
        }
        for (name, recs) in &letter_inputs {
            let res = letter_similarity_analysis(recs, r).map_err(|e| usage(anyhow!("{name}: {e}")))?;
            letter.push(json!({"metric": name, "ratings": r.source, "results": res}));
        }
    }

    let report = json!({
        "command": "analyze",
        "seed": seed,
        "against": AGAINST,
        "bootstrap": n_boot,
        "metrics": rows,
        "letter_similarity": letter,
    });
    if let Some(out) = &ctx.out {
        write(&out.join("report.json"), &serde_json::to_string_pretty(&report).expect("json"))?;
        if let Some(m) = &matrix {
            write(&out.join("matrix.csv"), &m.to_csv())?;
        }
        for (name, agg) in &summaries {
            let d = condition_distributions(agg, priming).map_err(usage)?;
            write(&out.join(format!("distributions_{}.csv", file_safe(name))), &distributions_csv(&d))?;
        }
    }
    emit(report);
    Ok(())
}

fn file_safe(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '-' }).collect()
}

pub fn ingest_check(ctx: &Context, args: IngestCheckArgs) -> Result<(), Failure> {
    let codes: HashMap<&str, ()> = catalog().iter().map(|c| (c.short_code, ())).collect();
    let mut reports = Vec::new();
    let mut incomplete = false;
    for path in &args.activations {
        let set = read_activations(path).map_err(|e| usage(anyhow!("{}: {e}", path.display())))?;
        let targets: Vec<&str> = set.vectors.iter().filter_map(|v| v.stimulus_id.strip_suffix("_TARGET")).collect();
        let index = set.index();
        let complete = targets
            .iter()
            .filter(|t| catalog().iter().all(|c| index.contains_key(format!("{t}_{}", c.short_code).as_str())))
            .count();
        let unknown: Vec<&str> = set
            .vectors
            .iter()
            .map(|v| v.stimulus_id.as_str())
            .filter(|id| match id.split_once('_') {
                Some((t, code)) => !(code == "TARGET" || (codes.contains_key(code) && targets.contains(&t))),
                None => true,
            })
            .collect();
        incomplete |= complete < targets.len() || targets.is_empty() || !unknown.is_empty();
        reports.push(json!({
            "file": path,
            "model": set.model,
            "records": set.vectors.len(),
            "dim": set.dim,
            "targets": targets.len(),
            "complete_targets": complete,
            "unmatched_ids": unknown.iter().take(10).collect::<Vec<_>>(),
            "unmatched_count": unknown.len(),
        }));
    }
    emit(json!({"command": "ingest-check", "seed": ctx.seed, "files": reports}));
    if args.strict && incomplete {
        return Err(usage(anyhow!("activation coverage is incomplete")));
    }
    Ok(())
}
