use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use polcomp_core::bws::{self, DEFAULT_TUPLES_PER_TERM};
use polcomp_core::embeddings::EmbeddingStore;
use polcomp_core::eval::{paired_significance, run_cv, CvPlan, EvalReport, EvalTask, GridSearch, System};
use polcomp_core::features::FeatureFlags;
use polcomp_core::io::{open_reader, write_atomic};
use polcomp_core::lexicon::{
    build_phrase_records, extract_opposing_candidates, read_corpus, Lexicon, PhraseRecord, PolarityLexicon,
    PosAnnotations, Term,
};
use polcomp_core::patterns::{self, MiningOptions};
use polcomp_core::pos::PosMapping;
use polcomp_service::{AppState, Campaign, CampaignConfig, DEFAULT_EXPIRY_SECS, DEFAULT_QUOTA};

use crate::args::*;
use crate::model_file::TrainedModel;
use crate::settings::{invalid, Settings};

/// Seed used when neither a flag nor the config sets one.
pub const DEFAULT_SEED: u64 = 20170801;

fn require(path: &Path, what: &str) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(invalid(format!("{what} file {} does not exist", path.display())))
    }
}

fn require_opt(path: Option<&PathBuf>, what: &str) -> Result<()> {
    path.map_or(Ok(()), |p| require(p, what))
}

/// Writes to `out` atomically, or to standard output.
fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(p) => {
            write_atomic(p, contents.as_bytes())?;
            log::info!("wrote {}", p.display());
            Ok(())
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(contents.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn parse_task(s: &str) -> Result<Vec<EvalTask>> {
    match s {
        "binary" => Ok(vec![EvalTask::Binary]),
        "regression" => Ok(vec![EvalTask::Regression]),
        "both" => Ok(vec![EvalTask::Binary, EvalTask::Regression]),
        other => Err(invalid(format!("unknown task `{other}` (binary, regression, both)"))),
    }
}

fn check_order(n: usize) -> Result<()> {
    if n == 2 || n == 3 {
        Ok(())
    } else {
        Err(invalid(format!("n-gram order must be 2 or 3, got {n}")))
    }
}

fn pos_mapping(path: Option<&PathBuf>) -> Result<PosMapping> {
    Ok(match path {
        Some(p) => PosMapping::load(p)?,
        None => PosMapping::default(),
    })
}

fn load_records(lexicon: &Path, pos: &PosInput, require_tags: bool) -> Result<Vec<PhraseRecord>> {
    require(lexicon, "lexicon")?;
    require_opt(pos.pos.as_ref(), "POS")?;
    require_opt(pos.pos_map.as_ref(), "POS mapping")?;
    let lex = Lexicon::load_scl(lexicon)?;
    let counts = lex.counts();
    log::info!(
        "lexicon {}: {} unigrams, {} bigrams, {} trigrams",
        lexicon.display(),
        counts.unigrams,
        counts.bigrams,
        counts.trigrams
    );
    let annotations = pos.pos.as_ref().map(|p| PosAnnotations::load(p)).transpose()?;
    let mapping = pos_mapping(pos.pos_map.as_ref())?;
    let records = build_phrase_records(&lex, annotations.as_ref().map(|a| (a, &mapping)));
    if require_tags {
        if let Some(r) = records.iter().find(|r| r.pos_tags.is_none()) {
            return Err(invalid(format!("no POS tags for `{}`", r.entry.term)));
        }
    }
    Ok(records)
}

fn load_store(path: Option<&PathBuf>) -> Result<Option<EmbeddingStore>> {
    match path {
        Some(p) => {
            require(p, "embeddings")?;
            let s = EmbeddingStore::load_text_vectors(p)?;
            log::info!("embeddings {}: {} vectors of dimension {}", p.display(), s.len(), s.dim());
            Ok(Some(s))
        }
        None => Ok(None),
    }
}

pub fn extract(a: ExtractArgs, cfg: &Settings) -> Result<()> {
    require(&a.corpus, "corpus")?;
    for l in &a.lexicons {
        require(l, "lexicon")?;
    }
    let n = cfg.pick(a.n, "n", 2)?;
    check_order(n)?;
    let corpus = read_corpus(&a.corpus)?;
    let lexicons = a.lexicons.iter().map(|p| PolarityLexicon::load(p)).collect::<polcomp_core::Result<Vec<_>>>()?;
    let found = extract_opposing_candidates(&corpus, &lexicons, n)?;
    log::info!("{} sentences, {} distinct opposing {n}-grams", corpus.len(), found.len());
    let mut out = String::new();
    for t in found {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    emit(a.out.as_deref(), &out)
}

pub fn tuples(a: TuplesArgs, cfg: &Settings) -> Result<()> {
    require(&a.terms, "terms")?;
    let k = cfg.pick(a.k, "k", DEFAULT_TUPLES_PER_TERM)?;
    let seed = cfg.pick(a.seed, "seed", DEFAULT_SEED)?;
    let mut terms = Vec::new();
    for line in open_reader(&a.terms)?.lines() {
        let line = line?;
        let t = line.trim();
        if !t.is_empty() {
            terms.push(t.to_string());
        }
    }
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = terms.iter().find(|t| !seen.insert(*t)) {
        return Err(invalid(format!("term `{dup}` is listed twice")));
    }
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let tuples = bws::generate_tuples(&terms, k, seed)?;
    log::info!("{} terms, k = {k}, seed {seed}: {} tuples", terms.len(), tuples.len());
    emit(a.out.as_deref(), &bws::tuples_to_jsonl(&tuples)?)
}

fn load_bws(tuples: &Path, responses: &Path) -> Result<(Vec<bws::BwsTuple>, Vec<bws::BwsResponse>)> {
    require(tuples, "tuples")?;
    require(responses, "responses")?;
    let t = bws::read_tuples(tuples)?;
    let r = bws::read_responses(responses)?;
    if r.is_empty() {
        return Err(invalid(format!("{} contains no responses", responses.display())));
    }
    Ok((t, r))
}

pub fn score_bws(a: ScoreBwsArgs, cfg: &Settings) -> Result<()> {
    let format = cfg.pick(a.format, "format", "tsv".to_string())?;
    if format != "tsv" && format != "json" {
        return Err(invalid(format!("unknown format `{format}` (tsv, json)")));
    }
    let (tuples, responses) = load_bws(&a.tuples, &a.responses)?;
    let table = bws::score(&responses, &tuples)?;
    log::info!("{} responses scored {} terms", responses.len(), table.len());
    let text = if format == "json" {
        let mut s = serde_json::to_string(&table)?;
        s.push('\n');
        s
    } else {
        table.to_scl_string()
    };
    emit(a.out.as_deref(), &text)
}

pub fn agreement(a: AgreementArgs) -> Result<()> {
    let (tuples, responses) = load_bws(&a.tuples, &a.responses)?;
    let v = bws::agreement(&responses, &tuples)?;
    emit(None, &format!("{v:.4}\n"))
}

pub fn mine_patterns(a: MineArgs, cfg: &Settings) -> Result<()> {
    if a.pos.pos.is_none() {
        return Err(invalid("mine-patterns needs --pos"));
    }
    let format = cfg.pick(a.format, "format", "text".to_string())?;
    if format != "text" && format != "tsv" {
        return Err(invalid(format!("unknown format `{format}` (text, tsv)")));
    }
    let defaults = MiningOptions::default();
    let opts = MiningOptions {
        min_support: cfg.pick(a.min_support, "min-support", defaults.min_support)?,
        min_rate: cfg.pick(a.min_rate, "min-rate", defaults.min_rate)?,
        neutral_threshold: cfg.pick(a.neutral_threshold, "neutral-threshold", defaults.neutral_threshold)?,
    };
    let records = load_records(&a.lexicon, &a.pos, true)?;
    let scps = patterns::mine_with(&records, &opts)?;
    log::info!("{} phrases, {} patterns", records.len(), scps.len());
    let text = if format == "tsv" {
        patterns::report_tsv(&scps)
    } else {
        patterns::report_text(&scps)
    };
    emit(a.out.as_deref(), &text)
}

fn apply_svm(system: &mut System, svm: &SvmFlags, cfg: &Settings, grid: bool) -> Result<()> {
    if let System::Supervised(spec) = system {
        spec.c = cfg.opt(svm.c, "C")?;
        spec.gamma = cfg.opt(svm.gamma, "gamma")?;
        spec.epsilon = cfg.pick(svm.epsilon, "epsilon", spec.epsilon)?;
        spec.scale = !cfg.switch(svm.no_scale, "no-scale")?;
        if grid {
            spec.grid = Some(GridSearch::default());
        }
        if spec.c.is_some_and(|c| c <= 0.0) || spec.gamma.is_some_and(|g| g <= 0.0) || spec.epsilon < 0.0 {
            return Err(invalid("C and gamma must be positive and epsilon non-negative"));
        }
    }
    Ok(())
}

pub fn eval(a: EvalArgs, cfg: &Settings) -> Result<()> {
    let orders = cfg.pick(a.n, "n", vec![2, 3])?;
    for &n in &orders {
        check_order(n)?;
    }
    let tasks = parse_task(&cfg.pick(a.task, "task", "both".to_string())?)?;
    let seed = cfg.pick(a.seed, "seed", DEFAULT_SEED)?;
    let folds = cfg.pick(a.folds, "folds", 10)?;
    let repeats = cfg.pick(a.repeats, "repeats", 10)?;
    if folds < 2 || repeats < 1 {
        return Err(invalid("need at least 2 folds and 1 repeat"));
    }
    let grid = cfg.switch(a.grid, "grid")?;
    let mut default_systems: Vec<String> = ["majority", "last", "most-polar"].iter().map(|s| s.to_string()).collect();
    if a.pos.pos.is_some() {
        default_systems.push("pos-rule".into());
    }
    let names = cfg.pick(a.systems, "systems", default_systems)?;
    let mut systems = Vec::new();
    for name in &names {
        let mut s: System = name.parse().map_err(|e: polcomp_core::Error| invalid(e.to_string()))?;
        apply_svm(&mut s, &a.svm, cfg, grid)?;
        systems.push(s);
    }
    let needs_pos = systems.iter().any(|s| match s {
        System::Baseline(k) => *k == polcomp_core::models::BaselineKind::PosRule,
        System::Supervised(spec) => spec.features.needs_pos(),
    });
    let needs_emb = systems
        .iter()
        .any(|s| matches!(s, System::Supervised(spec) if spec.features.needs_embeddings()));
    if needs_pos && a.pos.pos.is_none() {
        return Err(invalid("a requested system uses POS tags; pass --pos"));
    }
    if needs_emb && a.embeddings.is_none() {
        return Err(invalid("a requested system uses embeddings; pass --embeddings"));
    }
    if let Some(c) = &a.compare {
        if !names.contains(c) {
            return Err(invalid(format!("--compare {c} is not among --systems")));
        }
    }
    let records = load_records(&a.lexicon, &a.pos, needs_pos)?;
    let store = load_store(a.embeddings.as_ref())?;
    let mut by_order: BTreeMap<usize, Vec<PhraseRecord>> = BTreeMap::new();
    for r in records {
        by_order.entry(r.n()).or_default().push(r);
    }

    let mut report = EvalReport::new();
    for &n in &orders {
        let data = by_order.get(&n).filter(|d| !d.is_empty()).ok_or_else(|| invalid(format!("lexicon has no {n}-gram entries")))?;
        for &task in &tasks {
            let plan = CvPlan {
                folds,
                repeats,
                seed,
                stratified: task == EvalTask::Binary,
            };
            for system in systems.iter().filter(|s| s.supports(task)) {
                let started = std::time::Instant::now();
                let outcome = run_cv(data, store.as_ref(), system, task, &plan)?;
                if outcome.failed_runs() > 0 {
                    log::warn!(
                        "{} {n}gr {task}: {} runs had an undefined metric and were excluded",
                        outcome.system,
                        outcome.failed_runs()
                    );
                }
                log::info!("{} {n}gr {task}: mean {:?} in {:.2?}", outcome.system, outcome.mean(), started.elapsed());
                report.push(&outcome);
            }
        }
    }
    if let Some(path) = &a.runs {
        write_atomic(path, report.runs_csv(folds).as_bytes())?;
    }
    if let Some(base) = &a.compare {
        let base_name = systems[names.iter().position(|n| n == base).unwrap()].name();
        let mut out = String::from("system\tbaseline\tn\ttask\tp\n");
        for e in &report.entries {
            if e.system == base_name {
                continue;
            }
            let Some(b) = report.get(&base_name, e.n, e.task) else { continue };
            let pairs: (Vec<f64>, Vec<f64>) = e
                .runs
                .iter()
                .zip(&b.runs)
                .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
                .unzip();
            if pairs.0.len() < 2 {
                continue;
            }
            let p = paired_significance(&pairs.0, &pairs.1)?;
            out.push_str(&format!("{}\t{base_name}\t{}\t{}\t{p:.3e}\n", e.system, e.n, e.task));
        }
        match &a.significance {
            Some(p) => write_atomic(p, out.as_bytes())?,
            None => eprint!("{out}"),
        }
    }
    emit(a.out.as_deref(), &report.to_tsv())
}

pub fn train(a: TrainArgs, cfg: &Settings) -> Result<()> {
    let n = cfg.pick(a.n, "n", 2)?;
    check_order(n)?;
    let task = match cfg.pick(a.task, "task", "binary".to_string())?.as_str() {
        "binary" => EvalTask::Binary,
        "regression" => EvalTask::Regression,
        other => return Err(invalid(format!("unknown task `{other}` (binary, regression)"))),
    };
    let flags: FeatureFlags = a.features.parse().map_err(|e: polcomp_core::Error| invalid(e.to_string()))?;
    if flags.is_empty() {
        return Err(invalid("--features must name at least one block"));
    }
    if flags.needs_pos() && a.pos.pos.is_none() {
        return Err(invalid("these features use POS tags; pass --pos"));
    }
    if flags.needs_embeddings() && a.embeddings.is_none() {
        return Err(invalid("these features use embeddings; pass --embeddings"));
    }
    let mut system = System::Supervised(polcomp_core::eval::SupervisedSpec::new(flags));
    apply_svm(&mut system, &a.svm, cfg, false)?;
    let System::Supervised(spec) = system else { unreachable!() };
    let records: Vec<PhraseRecord> = load_records(&a.lexicon, &a.pos, flags.needs_pos())?
        .into_iter()
        .filter(|r| r.n() == n)
        .collect();
    if records.len() < 2 {
        return Err(invalid(format!("need at least two {n}-gram entries to train")));
    }
    let store = load_store(a.embeddings.as_ref())?;
    let model = TrainedModel::fit(&records, store.as_ref(), &spec, task, n)?;
    log::info!("trained on {} phrases, {} support vectors", records.len(), model.model.support_vectors.len());
    write_atomic(&a.out, serde_json::to_string_pretty(&model)?.as_bytes())?;
    Ok(())
}

pub fn predict(a: PredictArgs) -> Result<()> {
    require(&a.model, "model")?;
    require(&a.lexicon, "lexicon")?;
    require(&a.phrases, "phrases")?;
    require_opt(a.pos_map.as_ref(), "POS mapping")?;
    let model: TrainedModel = serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(&a.model)?))
        .map_err(|e| invalid(format!("model {}: {e}", a.model.display())))?;
    let lex = Lexicon::load_scl(&a.lexicon)?;
    let mapping = pos_mapping(a.pos_map.as_ref())?;
    let store = load_store(a.embeddings.as_ref())?;
    if model.features.flags.needs_embeddings() && store.is_none() {
        return Err(invalid("the model uses embeddings; pass --embeddings"));
    }
    let mut out = String::new();
    for (i, line) in open_reader(&a.phrases)?.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (phrase, tags) = match line.split_once('\t') {
            Some((p, t)) => (p, Some(t)),
            None => (line.as_str(), None),
        };
        let term: Term = phrase
            .parse()
            .map_err(|e| invalid(format!("{} line {}: {e}", a.phrases.display(), i + 1)))?;
        let record = PhraseRecord {
            entry: polcomp_core::lexicon::LexiconEntry::new(term.clone(), 0.0)?,
            pos_tags: tags.map(|t| t.split_whitespace().map(|tag| mapping.coarse(tag)).collect()),
            constituent_scores: term.tokens().iter().map(|t| lex.unigram_score(t)).collect(),
        };
        let (value, label) = model
            .predict(&record, store.as_ref())
            .with_context(|| format!("{} line {}", a.phrases.display(), i + 1))?;
        out.push_str(&format!("{term}\t{value:.6}\t{}\n", label.short()));
    }
    emit(a.out.as_deref(), &out)
}

pub fn serve(a: ServeArgs, cfg: &Settings) -> Result<()> {
    require(&a.tuples, "tuples")?;
    let addr: SocketAddr = cfg
        .pick(a.addr, "addr", "127.0.0.1:8080".to_string())?
        .parse()
        .map_err(|e| invalid(format!("bad --addr: {e}")))?;
    let config = CampaignConfig {
        name: cfg.pick(a.campaign, "campaign", "default".to_string())?,
        quota: cfg.pick(a.quota, "quota", DEFAULT_QUOTA)?,
        expiry: chrono::Duration::seconds(cfg.pick(a.expiry_secs, "expiry-secs", DEFAULT_EXPIRY_SECS)?),
    };
    let static_dir = cfg.opt(a.static_dir, "static")?;
    if let Some(d) = &static_dir {
        if !d.is_dir() {
            return Err(invalid(format!("static directory {} does not exist", d.display())));
        }
    }
    let campaign = Campaign::open(&a.tuples, &a.responses, config)?;
    let mut state = AppState::new(campaign);
    state.static_dir = static_dir;
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(polcomp_service::serve(addr, state))?;
    Ok(())
}
