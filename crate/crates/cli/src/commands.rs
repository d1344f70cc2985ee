use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use nl2sparql::alignment::{bootstrap_from_scratch, KeywordMap};
use nl2sparql::corpus::{
    geo, load_dataset, split_folds, tokenize_source, tokenize_target, Dataset, Role, TokenSequence,
};
use nl2sparql::embeddings::{
    load_pretrained, random_embeddings, skipgram_embeddings, tfidf_pca_embeddings, EmbeddingTable,
};
use nl2sparql::eval::{
    evaluate, render_report, results_from_json, results_to_json, run_grid, w2v10_config, Experiment, GridCell, Method,
};
use nl2sparql::seq2seq::{loss_curve_csv, train, translate, Checkpoint, ModelConfig, ModelParams, Variant};
use nl2sparql::sparql::validate;

use crate::heatmap::AttentionDump;
use crate::manifest::RunManifest;
use crate::{
    Command, DataArgs, EmbedArgs, EvaluateArgs, GenerateArgs, HeatmapArgs, LintArgs, OurappArgs, PrepareArgs,
    ReportArgs, Side, TrainArgs, TrainingArgs, TranslateArgs,
};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(nl2sparql::Error),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(nl2sparql::Error::Numerics(_)) => 3,
            CliError::Core(_) | CliError::Data(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<nl2sparql::Error> for CliError {
    fn from(e: nl2sparql::Error) -> Self {
        CliError::Core(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::GenerateCorpus(a) => generate_corpus(a),
        Command::Prepare(a) => prepare(a),
        Command::Embed(a) => embed(a),
        Command::Ourapp(a) => ourapp(a),
        Command::Train(a) => cmd_train(a),
        Command::Translate(a) => cmd_translate(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Report(a) => cmd_report(a),
        Command::Heatmap(a) => heatmap(a),
        Command::Lint(a) => lint(a),
    }
}

fn load_pairs(path: &Path) -> Result<Dataset> {
    let data = load_dataset(path)?;
    if data.is_empty() {
        return Err(CliError::Data(format!("{}: no examples", path.display())));
    }
    Ok(data)
}

fn load_keywords(path: Option<&Path>) -> Result<KeywordMap> {
    Ok(match path {
        Some(p) => KeywordMap::load(p)?,
        None => KeywordMap::default(),
    })
}

/// The pair file with its source vocabulary extended by the keyword words.
fn load_corpus(pairs: &Path, keywords: &KeywordMap) -> Result<Dataset> {
    Ok(load_pairs(pairs)?.with_extra_source_tokens(&keywords.english_words())?)
}

/// Seed of the random source vectors, kept apart from the target seed.
fn source_seed(seed: u64) -> u64 {
    seed.wrapping_add(1)
}

fn source_table(data: &Dataset, vectors: Option<&Path>, dim: usize, seed: u64) -> Result<EmbeddingTable> {
    Ok(match vectors {
        Some(p) => load_pretrained(p, &data.source_vocab, dim, source_seed(seed))?,
        None => random_embeddings(&data.source_vocab, dim, source_seed(seed)),
    })
}

fn model_config(variant: Variant, dim: usize, hidden: usize, seed: u64, t: &TrainingArgs) -> ModelConfig {
    ModelConfig {
        epochs: t.epochs,
        initial_lr: t.lr,
        seed,
        freeze_source: !t.train_source,
        freeze_target: t.freeze_target,
        ..ModelConfig::new(variant, dim, hidden)
    }
}

fn generate_corpus(a: GenerateArgs) -> Result<()> {
    if a.size == 0 || a.size > geo::GEO_CORPUS_SIZE {
        return Err(CliError::Usage(format!("--size must be between 1 and {}", geo::GEO_CORPUS_SIZE)));
    }
    write(&a.out, geo::generate_pair_file(a.size, a.seed))
}

fn prepare(a: PrepareArgs) -> Result<()> {
    let data = load_pairs(&a.pairs)?;
    let split = split_folds(data.len(), a.folds, a.seed)?;
    create_dir(&a.out)?;
    data.source_vocab.save(&a.out.join("source_vocab.txt"))?;
    data.target_vocab.save(&a.out.join("target_vocab.txt"))?;
    write(&a.out.join("folds.csv"), split.to_csv())?;
    RunManifest::new("prepare", a.seed).input("pairs", Some(&a.pairs)).setting("folds", a.folds).save(&a.out)?;
    println!(
        "{} examples, {} source and {} target tokens, {} folds",
        data.len(),
        data.source_vocab.len(),
        data.target_vocab.len(),
        a.folds
    );
    Ok(())
}

fn side_table(data: &Dataset, side: Side, method: Method, d: &DataArgs) -> Result<EmbeddingTable> {
    let (corpus, vocab, seed) = match side {
        Side::Source => (data.sources(), &data.source_vocab, source_seed(d.seed)),
        Side::Target => (data.targets(), &data.target_vocab, d.seed),
    };
    Ok(match method {
        Method::Random => match (side, &d.vectors) {
            (Side::Source, Some(p)) => load_pretrained(p, vocab, d.dim, seed)?,
            _ => random_embeddings(vocab, d.dim, seed),
        },
        Method::TfidfPca => tfidf_pca_embeddings(&corpus, vocab, d.dim, seed)?,
        Method::W2v10 => skipgram_embeddings(&corpus, vocab, &w2v10_config(d.dim, seed)),
        Method::OurApp => return Err(CliError::Usage("use the `ourapp` command for OUR-APP lexicons".into())),
    })
}

fn embed(a: EmbedArgs) -> Result<()> {
    let keywords = load_keywords(a.data.keywords.as_deref())?;
    let data = load_corpus(&a.data.pairs, &keywords)?;
    let table = side_table(&data, a.side, a.method.into(), &a.data)?;
    Ok(table.save(&a.out)?)
}

fn ourapp(a: OurappArgs) -> Result<()> {
    let keywords = load_keywords(a.keywords.as_deref())?;
    let data = load_corpus(&a.pairs, &keywords)?;
    let source = load_pretrained(&a.vectors, &data.source_vocab, a.dim, source_seed(a.seed))?;
    let config = model_config(Variant::Attention, a.dim, a.hidden, a.seed, &a.training);
    let (boot, curve) = bootstrap_from_scratch(&data, &source, &keywords, &config)?;
    create_dir(&a.out)?;
    boot.lexicon.save(&a.out.join("lexicon.vec"))?;
    write(&a.out.join("dictionary.tsv"), boot.dictionary.to_text())?;
    boot.alignment.save_csv(&a.out.join("alignment.csv"))?;
    write(&a.out.join("loss.csv"), loss_curve_csv(&curve))?;
    let mut m = RunManifest::new("ourapp", a.seed)
        .input("pairs", Some(&a.pairs))
        .input("vectors", Some(&a.vectors))
        .input("keywords", a.keywords.as_deref());
    m.config = Some(config);
    m.method = Some(Method::OurApp);
    m.save(&a.out)
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let keywords = load_keywords(a.data.keywords.as_deref())?;
    let data = load_corpus(&a.data.pairs, &keywords)?;
    let source = source_table(&data, a.data.vectors.as_deref(), a.data.dim, a.data.seed)?;
    let config = model_config(a.variant.into(), a.data.dim, a.hidden, a.data.seed, &a.training);
    let method: Method = a.method.into();
    let target = match (&a.target_vectors, method) {
        (Some(p), _) => load_pretrained(p, &data.target_vocab, a.data.dim, a.data.seed)?,
        (None, Method::OurApp) => {
            let align = ModelConfig { variant: Variant::Attention, ..config.clone() };
            bootstrap_from_scratch(&data, &source, &keywords, &align)?.0.lexicon
        }
        (None, m) => side_table(&data, Side::Target, m, &a.data)?,
    };
    let mut params = ModelParams::init(config.variant, &source, &target, config.hidden_dim, config.seed)?;
    let curve = train(&mut params, &data, &config)?;

    let mut manifest = RunManifest::new("train", a.data.seed)
        .input("pairs", Some(&a.data.pairs))
        .input("vectors", a.data.vectors.as_deref())
        .input("keywords", a.data.keywords.as_deref())
        .input("target_vectors", a.target_vectors.as_deref());
    manifest.config = Some(config);
    manifest.method = Some(method);
    let checkpoint = Checkpoint {
        params,
        source_vocab: data.source_vocab.clone(),
        target_vocab: data.target_vocab.clone(),
        manifest: manifest.to_value(),
    };
    create_dir(&a.out)?;
    checkpoint.save(&a.out.join("model.ckpt"))?;
    write(&a.out.join("loss.csv"), loss_curve_csv(&curve))?;
    manifest.save(&a.out)?;
    if let Some(last) = curve.last() {
        println!("epoch {} mean loss {:.5}", last.epoch + 1, last.mean_loss);
    }
    Ok(())
}

fn questions(path: &Path) -> Result<Vec<String>> {
    Ok(read(path)?
        .lines()
        .map(|l| l.split('\t').next().unwrap_or("").trim().to_string())
        .filter(|l| !l.is_empty())
        .collect())
}

fn cmd_translate(a: TranslateArgs) -> Result<()> {
    let ckpt = Checkpoint::load(&a.model)?;
    if let Some(dir) = &a.attention_dir {
        if ckpt.params.variant != Variant::Attention {
            return Err(CliError::Usage("--attention-dir needs an attention model".into()));
        }
        create_dir(dir)?;
    }
    let mut out = String::new();
    for (i, q) in questions(&a.input)?.iter().enumerate() {
        let src = tokenize_source(q)?;
        let ids: Vec<usize> = src.iter().map(|t| ckpt.source_vocab.id_or_unk(t)).collect();
        let tr = translate(&ckpt.params, &ids, a.max_len)?;
        let tokens = ckpt.target_vocab.decode(&tr.ids);
        out.push_str(&TokenSequence::new(tokens.clone(), Role::Target).to_text());
        out.push('\n');
        if let (Some(dir), Some(att)) = (&a.attention_dir, &tr.attention) {
            let mut target: Vec<String> = tokens.iter().map(|t| t.to_string()).collect();
            if !tr.truncated {
                target.push(nl2sparql::corpus::EOS.to_string());
            }
            let dump = AttentionDump {
                source: src.iter().map(|t| t.to_string()).collect(),
                target,
                weights: (0..att.steps()).map(|s| att.row(s).to_vec()).collect(),
            };
            write(&dir.join(format!("{i:04}.csv")), dump.to_csv())?;
        }
    }
    write(&a.out, out)
}

/// Queries from a file of one query per line or from a pair file's second
/// column. Lines that fail to tokenize become empty (invalid) predictions.
fn query_lines(path: &Path) -> Result<Vec<TokenSequence>> {
    let text = read(path)?;
    let mut lines: Vec<&str> = text.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l)).collect();
    if lines.last() == Some(&"") {
        lines.pop();
    }
    Ok(lines
        .iter()
        .map(|l| {
            let q = l.split_once('\t').map_or(*l, |(_, q)| q);
            tokenize_target(q).unwrap_or_else(|_| TokenSequence::new(vec![], Role::Target))
        })
        .collect())
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<()> {
    match (&a.predictions, &a.gold, &a.pairs) {
        (Some(p), Some(g), None) => {
            let m = evaluate(&query_lines(p)?, &query_lines(g)?)?;
            let json = serde_json::json!({
                "accuracy": m.accuracy(),
                "syntax_error_rate": m.syntax_error_rate(),
                "correct": m.correct,
                "syntax_errors": m.syntax_errors,
                "total": m.total,
            });
            println!("accuracy {:.2}%  syntax errors {:.2}%", 100.0 * m.accuracy(), 100.0 * m.syntax_error_rate());
            write(&a.out, serde_json::to_string_pretty(&json).expect("plain json") + "\n")
        }
        (None, None, Some(pairs)) => cross_validate(&a, pairs),
        _ => Err(CliError::Usage("give either --predictions with --gold, or --pairs".into())),
    }
}

fn cross_validate(a: &EvaluateArgs, pairs: &Path) -> Result<()> {
    let keywords = load_keywords(a.keywords.as_deref())?;
    let mut data = load_pairs(pairs)?;
    if let Some(n) = a.subsample {
        data = data.subsample(n, a.seed)?;
    }
    let data = data.with_extra_source_tokens(&keywords.english_words())?;
    let source = source_table(&data, a.vectors.as_deref(), a.dim, a.seed)?;
    let base = model_config(Variant::Attention, a.dim, 100, a.seed, &a.training);
    let mut exp = Experiment::new(data, source, keywords, base);
    exp.folds = a.folds;
    exp.max_len = a.max_len;
    exp.jobs = a.jobs;
    let mut cells = Vec::new();
    for &v in &a.variant {
        for &h in &a.hidden {
            for &m in &a.method {
                let cell = GridCell::new(v.into(), h, m.into());
                if !cells.contains(&cell) {
                    cells.push(cell);
                }
            }
        }
    }
    let results = run_grid(&exp, &cells)?;
    write(&a.out, results_to_json(&results)? + "\n")?;
    print!("{}", render_report(&results)?);
    Ok(())
}

fn cmd_report(a: ReportArgs) -> Result<()> {
    let results = results_from_json(&read(&a.results)?)?;
    let text = render_report(&results)?;
    if let Some(out) = &a.out {
        write(out, &text)?;
    }
    print!("{text}");
    Ok(())
}

fn heatmap(a: HeatmapArgs) -> Result<()> {
    let dump =
        AttentionDump::from_csv(&read(&a.dump)?).map_err(|e| CliError::Data(format!("{}: {e}", a.dump.display())))?;
    write(&a.out, dump.to_pgm())?;
    let csv: PathBuf = a.out.with_extension("csv");
    write(&csv, dump.to_csv())
}

fn lint(a: LintArgs) -> Result<()> {
    let lines = query_lines(&a.input)?;
    let mut bad = 0;
    for (i, q) in lines.iter().enumerate() {
        let r = validate(q);
        bad += usize::from(!r.valid);
        println!("{}\t{}", i + 1, r.to_line());
    }
    if bad > 0 {
        return Err(CliError::Data(format!("{bad} of {} queries are invalid", lines.len())));
    }
    Ok(())
}
