//! The `mtprep` command line.
//!
//! Exit status: 0 on success, 1 on usage errors (bad flags, missing
//! required settings), 2 on data errors (unreadable or malformed inputs).
//! On success the last line on stdout is a one-line JSON summary.

mod config;
mod profile;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub use config::{FinetuneConfig, PathsConfig, PipelineConfig, SamplingConfig, VocabConfig, WmtSource};
pub use profile::default_training_profile;

use crate::bpe::{Normalization, TokenId, Tokenizer, TrainParams};
use crate::dataprep::{
    assemble, build_stats, format_examples, ingest_directional, ingest_english_centric, ingest_multiparallel,
    DirectionPolicy, LanguagePair, LengthLimits, Origin, PromptTemplate, DEFAULT_COMPLETION_TEMPLATE,
    DEFAULT_MAX_SOURCE_TOKENS, DEFAULT_MAX_TARGET_TOKENS, DEFAULT_PROMPT_TEMPLATE,
};
use crate::efficiency::{analyze, AnalyzeOptions, ConcatMode, MultiParallelCorpus};
use crate::io::{read_lines, read_token_shard, with_atomic_writer, write_atomic, write_pack_header, write_pack_sequence, SHARD_MAGIC};
use crate::sampling::{
    compute_plan_with_share, count_words, CorpusMixer, LanguageStats, SamplingPlan, SequencePacker, DEFAULT_ENGLISH_SHARE,
    DEFAULT_SEQ_LEN, DEFAULT_TEMPERATURE,
};
use crate::vocab::{merge_vocabularies, train_extension_vocab, DEFAULT_EXTENSION_LANGUAGES, DEFAULT_EXTENSION_SIZE};
use crate::Execution;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "mtprep", version, about = "Data preparation for LLM-based multilingual translation")]
pub struct Cli {
    #[command(flatten)]
    common: CommonArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct CommonArgs {
    /// Pipeline config (JSON); flags override its values
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Seed for every randomized step
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Directory for all outputs
    #[arg(long, global = true, value_name = "DIR")]
    output_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a BPE vocabulary (round-robin over the given corpora)
    TrainVocab(TrainVocabArgs),
    /// Append an extension vocabulary to a base tokenizer
    MergeVocab(MergeVocabArgs),
    /// Length ratios per language and tokenizer over a multi-parallel corpus
    AnalyzeEfficiency(AnalyzeArgs),
    /// Temperature-based language sampling plan
    ComputePlan(PlanArgs),
    /// Draw a seeded language mix and pack it into fixed-length sequences
    MixPack(MixPackArgs),
    /// Build the parallel fine-tuning set and its statistics
    PrepareFinetune(FinetuneArgs),
    /// Write the training hyperparameter profile as JSON
    EmitTrainingProfile,
}

#[derive(Args, Debug)]
struct TrainVocabArgs {
    /// Corpus file, one document per line, as LANG=PATH or PATH (repeatable)
    #[arg(long = "corpus", value_name = "[LANG=]PATH")]
    corpora: Vec<String>,
    #[arg(long)]
    vocab_size: Option<usize>,
    #[arg(long)]
    min_frequency: Option<u64>,
    /// NFC-normalize training text
    #[arg(long)]
    nfc: bool,
}

#[derive(Args, Debug)]
struct MergeVocabArgs {
    /// Base tokenizer directory (vocab.json + merges.txt)
    #[arg(long, value_name = "DIR")]
    base: Option<PathBuf>,
    /// Extension tokenizer directory
    #[arg(long, value_name = "DIR")]
    ext: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
    Both,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Tokenizer as NAME=DIR (repeatable)
    #[arg(long = "tokenizer", value_name = "NAME=DIR")]
    tokenizers: Vec<String>,
    /// Directory with one sentence-per-line file per language
    #[arg(long, value_name = "DIR")]
    corpus_dir: Option<PathBuf>,
    #[arg(long)]
    english: Option<String>,
    #[arg(long)]
    corpus_id: Option<String>,
    /// Sum per-sentence counts instead of encoding the newline-joined text
    #[arg(long)]
    join_free: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Args, Debug)]
struct PlanArgs {
    /// JSON object of word counts per language
    #[arg(long, value_name = "FILE")]
    counts: Option<PathBuf>,
    /// Count words in LANG=PATH instead of reading --counts (repeatable)
    #[arg(long = "corpus", value_name = "LANG=PATH")]
    corpora: Vec<String>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    english: Option<String>,
    #[arg(long)]
    english_share: Option<f64>,
}

#[derive(Args, Debug)]
struct MixPackArgs {
    #[arg(long, value_name = "FILE")]
    plan: Option<PathBuf>,
    /// Shard as LANG=PATH: text (one document per line) or a binary token shard
    #[arg(long = "shard", value_name = "LANG=PATH")]
    shards: Vec<String>,
    /// Tokenizer directory, required for text shards
    #[arg(long, value_name = "DIR")]
    tokenizer: Option<PathBuf>,
    #[arg(long)]
    total_docs: Option<usize>,
    #[arg(long)]
    seq_len: Option<usize>,
    /// End-of-document id (default: the tokenizer's vocabulary size)
    #[arg(long)]
    eod_id: Option<u32>,
}

#[derive(Args, Debug)]
struct FinetuneArgs {
    /// Multi-parallel split directory, one file per language (repeatable;
    /// splits are concatenated)
    #[arg(long = "flores-dir", value_name = "DIR")]
    flores: Vec<PathBuf>,
    /// English-centric corpus directory, one file per language
    #[arg(long = "ntrex-dir", value_name = "DIR")]
    ntrex: Option<PathBuf>,
    /// Past-WMT pair as SRC-TGT=SRC_PATH,TGT_PATH (repeatable)
    #[arg(long = "wmt", value_name = "PAIR=SRC,TGT")]
    wmt: Vec<String>,
    /// Comma-separated pair list
    #[arg(long, value_delimiter = ',')]
    pairs: Option<Vec<String>>,
    /// Pair kept bidirectional for the English-centric source (repeatable)
    #[arg(long = "exception", value_name = "PAIR")]
    exceptions: Option<Vec<String>>,
    #[arg(long, value_name = "DIR")]
    tokenizer: Option<PathBuf>,
    #[arg(long)]
    max_src: Option<usize>,
    #[arg(long)]
    max_tgt: Option<usize>,
    #[arg(long)]
    prompt_template: Option<String>,
    #[arg(long)]
    completion_template: Option<String>,
    #[arg(long)]
    english: Option<String>,
}

/// A problem with how the command was invoked, as opposed to its data.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(summary) => {
            println!("{summary}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                EXIT_USAGE
            } else {
                EXIT_DATA
            }
        }
    }
}

struct Ctx {
    cfg: PipelineConfig,
    seed: Option<u64>,
    out: PathBuf,
}

impl Ctx {
    fn output(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn english(&self, flag: &Option<String>) -> String {
        flag.clone()
            .or_else(|| self.cfg.english.clone())
            .unwrap_or_else(|| "en".to_string())
    }
}

fn execute(cli: Cli) -> anyhow::Result<Value> {
    let cfg = match &cli.common.config {
        Some(p) => PipelineConfig::load(p).map_err(|e| usage(e.to_string()))?,
        None => PipelineConfig::default(),
    };
    cfg.validate().map_err(usage)?;
    let ctx = Ctx {
        seed: cli.common.seed.or(cfg.seed),
        out: cli
            .common
            .output_dir
            .clone()
            .or_else(|| cfg.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from(".")),
        cfg,
    };
    match cli.command {
        Command::TrainVocab(a) => train_vocab(&ctx, a),
        Command::MergeVocab(a) => merge_vocab(&ctx, a),
        Command::AnalyzeEfficiency(a) => analyze_efficiency(&ctx, a),
        Command::ComputePlan(a) => compute_plan_cmd(&ctx, a),
        Command::MixPack(a) => mix_pack(&ctx, a),
        Command::PrepareFinetune(a) => prepare_finetune(&ctx, a),
        Command::EmitTrainingProfile => emit_training_profile(&ctx),
    }
}

fn split_kv(s: &str) -> anyhow::Result<(&str, &str)> {
    s.split_once('=')
        .filter(|(k, v)| !k.is_empty() && !v.is_empty())
        .ok_or_else(|| usage(format!("expected KEY=VALUE, got `{s}`")))
}

fn file_stem_lang(path: &Path) -> String {
    path.file_name()
        .and_then(|n| n.to_str())
        .and_then(|n| n.split('.').next())
        .unwrap_or("corpus")
        .to_string()
}

fn load_tokenizer(dir: &Path) -> anyhow::Result<Tokenizer> {
    Tokenizer::load_dir(dir).with_context(|| format!("loading tokenizer from {}", dir.display()))
}

fn write_json(path: &Path, v: &impl serde::Serialize) -> anyhow::Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())?;
    Ok(())
}

fn summary(command: &str, outputs: &[&Path], extra: Value) -> Value {
    let mut v = json!({
        "command": command,
        "status": "ok",
        "outputs": outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    v
}

fn train_vocab(ctx: &Ctx, a: TrainVocabArgs) -> anyhow::Result<Value> {
    let sources: Vec<(String, PathBuf)> = if !a.corpora.is_empty() {
        a.corpora
            .iter()
            .map(|c| match c.split_once('=') {
                Some((l, p)) if !l.is_empty() => (l.to_string(), PathBuf::from(p)),
                _ => (file_stem_lang(Path::new(c)), PathBuf::from(c)),
            })
            .collect()
    } else {
        let langs: Vec<String> = ctx
            .cfg
            .vocab
            .extension_languages
            .clone()
            .unwrap_or_else(|| DEFAULT_EXTENSION_LANGUAGES.iter().map(|s| s.to_string()).collect());
        let mono = &ctx.cfg.paths.monolingual;
        langs
            .iter()
            .filter_map(|l| mono.get(l).map(|p| (l.clone(), p.clone())))
            .collect()
    };
    if sources.is_empty() {
        return Err(usage("train-vocab needs --corpus or paths.monolingual in the config"));
    }
    let mut corpora: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (lang, path) in &sources {
        corpora.entry(lang.clone()).or_default().extend(read_lines(path)?);
    }
    let params = TrainParams {
        target_vocab_size: a.vocab_size.or(ctx.cfg.vocab.size).unwrap_or(DEFAULT_EXTENSION_SIZE),
        min_pair_frequency: a.min_frequency.or(ctx.cfg.vocab.min_pair_frequency).unwrap_or(2),
        normalization: if a.nfc {
            Normalization::Nfc
        } else {
            ctx.cfg.vocab.normalization.unwrap_or_default()
        },
        execution: Execution::default(),
    };
    params.validate().map_err(|e| usage(e.to_string()))?;
    let tok = train_extension_vocab(&corpora, &params)?;
    tok.save_dir(&ctx.out)?;
    let inputs: BTreeMap<&String, usize> = corpora.iter().map(|(l, d)| (l, d.len())).collect();
    Ok(summary(
        "train-vocab",
        &[&ctx.output(crate::bpe::VOCAB_FILE), &ctx.output(crate::bpe::MERGES_FILE)],
        json!({"vocab_size": tok.vocab_size(), "merges": tok.num_merges(), "documents": inputs}),
    ))
}

fn merge_vocab(ctx: &Ctx, a: MergeVocabArgs) -> anyhow::Result<Value> {
    let base = a
        .base
        .or_else(|| ctx.cfg.paths.base_tokenizer.clone())
        .ok_or_else(|| usage("merge-vocab needs --base"))?;
    let ext = a
        .ext
        .or_else(|| ctx.cfg.paths.extension_tokenizer.clone())
        .ok_or_else(|| usage("merge-vocab needs --ext"))?;
    let base = load_tokenizer(&base)?;
    let ext = load_tokenizer(&ext)?;
    let (merged, report) = merge_vocabularies(&base, &ext)?;
    merged.save_dir(&ctx.out)?;
    let report_path = ctx.output("extension_report.json");
    write_json(&report_path, &report)?;
    Ok(summary(
        "merge-vocab",
        &[&ctx.output(crate::bpe::VOCAB_FILE), &ctx.output(crate::bpe::MERGES_FILE), &report_path],
        json!({"vocab_size": merged.vocab_size(), "added_tokens": report.added_tokens, "added_merges": report.added_merges}),
    ))
}

fn analyze_efficiency(ctx: &Ctx, a: AnalyzeArgs) -> anyhow::Result<Value> {
    let mut dirs: BTreeMap<String, PathBuf> = ctx.cfg.paths.tokenizers.clone();
    for t in &a.tokenizers {
        let (name, dir) = split_kv(t)?;
        dirs.insert(name.to_string(), PathBuf::from(dir));
    }
    if dirs.is_empty() {
        return Err(usage("analyze-efficiency needs at least one --tokenizer NAME=DIR"));
    }
    let corpus_dir = a
        .corpus_dir
        .or_else(|| ctx.cfg.paths.efficiency_corpus.clone())
        .ok_or_else(|| usage("analyze-efficiency needs --corpus-dir"))?;
    let english = ctx.english(&a.english);
    let corpus = MultiParallelCorpus::load_dir(&corpus_dir, &english)?;
    let tokenizers = dirs
        .iter()
        .map(|(n, d)| Ok((n.clone(), load_tokenizer(d)?)))
        .collect::<anyhow::Result<BTreeMap<_, _>>>()?;
    let corpus_id = a.corpus_id.unwrap_or_else(|| file_stem_lang(&corpus_dir));
    let opts = AnalyzeOptions {
        mode: if a.join_free { ConcatMode::JoinFree } else { ConcatMode::Newline },
        execution: Execution::default(),
    };
    let report = analyze(&tokenizers, &corpus, &corpus_id, opts)?;

    let mut outputs = Vec::new();
    if matches!(a.format, OutputFormat::Csv | OutputFormat::Both) {
        let p = ctx.output("efficiency.csv");
        write_atomic(&p, report.to_csv().as_bytes())?;
        outputs.push(p);
    }
    if matches!(a.format, OutputFormat::Json | OutputFormat::Both) {
        let p = ctx.output("efficiency.json");
        write_atomic(&p, report.to_json().as_bytes())?;
        outputs.push(p);
    }
    print!("{}", report.to_table());
    let refs: Vec<&Path> = outputs.iter().map(PathBuf::as_path).collect();
    Ok(summary(
        "analyze-efficiency",
        &refs,
        json!({"entries": report.entries.len(), "sentences": corpus.len()}),
    ))
}

fn compute_plan_cmd(ctx: &Ctx, a: PlanArgs) -> anyhow::Result<Value> {
    let english = ctx.english(&a.english);
    let counts: BTreeMap<String, u64> = if !a.corpora.is_empty() {
        let mut m = BTreeMap::new();
        for c in &a.corpora {
            let (lang, path) = split_kv(c)?;
            let docs = read_lines(Path::new(path))?;
            *m.entry(lang.to_string()).or_insert(0) += count_words(&docs);
        }
        m
    } else {
        let path = a
            .counts
            .or_else(|| ctx.cfg.paths.counts.clone())
            .ok_or_else(|| usage("compute-plan needs --counts or --corpus"))?;
        let text = crate::io::read_to_string(&path)?;
        serde_json::from_str(&text).map_err(|e| crate::Error::Parse {
            path: path.clone(),
            line: e.line(),
            message: e.to_string(),
        })?
    };
    let temperature = a.temperature.or(ctx.cfg.sampling.temperature).unwrap_or(DEFAULT_TEMPERATURE);
    let share = a.english_share.or(ctx.cfg.sampling.english_share).unwrap_or(DEFAULT_ENGLISH_SHARE);
    let plan = compute_plan_with_share(&LanguageStats::new(english, counts), temperature, share)?;
    let path = ctx.output("plan.json");
    write_atomic(&path, plan.to_json().as_bytes())?;
    Ok(summary(
        "compute-plan",
        &[&path],
        json!({"temperature": temperature, "english_share": plan.english_share, "languages": plan.probabilities.len()}),
    ))
}

fn is_token_shard(path: &Path) -> anyhow::Result<bool> {
    let mut f = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut magic = [0u8; 4];
    use std::io::Read;
    Ok(f.read(&mut magic)? == 4 && &magic == SHARD_MAGIC)
}

fn mix_pack(ctx: &Ctx, a: MixPackArgs) -> anyhow::Result<Value> {
    let seed = ctx.seed.ok_or_else(|| usage("mix-pack needs --seed (or `seed` in the config)"))?;
    let plan_path = a
        .plan
        .or_else(|| ctx.cfg.paths.plan.clone())
        .ok_or_else(|| usage("mix-pack needs --plan"))?;
    let plan = SamplingPlan::from_json(&crate::io::read_to_string(&plan_path)?)
        .with_context(|| format!("reading plan {}", plan_path.display()))?;
    let total_docs = a
        .total_docs
        .or(ctx.cfg.sampling.total_docs)
        .ok_or_else(|| usage("mix-pack needs --total-docs"))?;
    let seq_len = a.seq_len.or(ctx.cfg.sampling.seq_len).unwrap_or(DEFAULT_SEQ_LEN);
    if seq_len == 0 {
        return Err(usage("--seq-len must be positive"));
    }

    let mut shard_paths: BTreeMap<String, PathBuf> = ctx.cfg.paths.shards.clone();
    for s in &a.shards {
        let (lang, path) = split_kv(s)?;
        shard_paths.insert(lang.to_string(), PathBuf::from(path));
    }
    let tokenizer = match a.tokenizer.or_else(|| ctx.cfg.paths.tokenizer.clone()) {
        Some(d) => Some(load_tokenizer(&d)?),
        None => None,
    };
    let mut shards: BTreeMap<String, Vec<Vec<TokenId>>> = BTreeMap::new();
    for (lang, path) in &shard_paths {
        let docs = if is_token_shard(path)? {
            read_token_shard(path)?
        } else {
            let t = tokenizer
                .as_ref()
                .ok_or_else(|| usage(format!("text shard {} needs --tokenizer", path.display())))?;
            let lines = read_lines(path)?;
            Execution::default().map(&lines, |l| t.encode(l))
        };
        shards.insert(lang.clone(), docs);
    }
    let eod_id = match (a.eod_id.or(ctx.cfg.sampling.eod_id), &tokenizer) {
        (Some(id), _) => id,
        (None, Some(t)) => t.vocab_size() as TokenId,
        (None, None) => return Err(usage("mix-pack needs --eod-id when no tokenizer is given")),
    };

    let mut mixer = CorpusMixer::new(&plan, &shards, seed, total_docs)?;
    let mut packer = SequencePacker::new(seq_len, eod_id)?;
    let packed_path = ctx.output("packed.bin");
    with_atomic_writer(&packed_path, |w| {
        write_pack_header(w, seq_len as u32)?;
        for doc in mixer.by_ref() {
            packer.push(doc.doc, |seq| write_pack_sequence(w, seq))?;
        }
        Ok(())
    })?;
    let mix = mixer.stats();
    let pack = packer.finish();
    let manifest_path = ctx.output("mix_manifest.json");
    let manifest = json!({
        "seed": seed,
        "total_docs": total_docs,
        "seq_len": seq_len,
        "eod_id": eod_id,
        "mix": mix,
        "pack": pack,
    });
    write_json(&manifest_path, &manifest)?;
    Ok(summary(
        "mix-pack",
        &[&packed_path, &manifest_path],
        json!({"sequences": pack.sequences, "dropped": pack.dropped, "documents": pack.documents}),
    ))
}

fn parse_pairs(list: &[String]) -> anyhow::Result<Vec<LanguagePair>> {
    list.iter()
        .map(|p| p.parse::<LanguagePair>().map_err(|e| usage(e.to_string())))
        .collect()
}

fn prepare_finetune(ctx: &Ctx, a: FinetuneArgs) -> anyhow::Result<Value> {
    let cfg = &ctx.cfg.finetune;
    let english = ctx.english(&a.english);
    let pairs = match a.pairs.or_else(|| cfg.pairs.clone()) {
        Some(p) => parse_pairs(&p)?,
        None => LanguagePair::default_pairs(),
    };
    let exceptions = match a.exceptions.or_else(|| cfg.bidirectional_exceptions.clone()) {
        Some(p) => parse_pairs(&p)?,
        None => vec![LanguagePair::new(english.clone(), "fr")],
    };
    let policy = DirectionPolicy::with_exceptions(&english, &exceptions);
    let template = PromptTemplate::parse(
        a.prompt_template
            .as_deref()
            .or(cfg.prompt_template.as_deref())
            .unwrap_or(DEFAULT_PROMPT_TEMPLATE),
        a.completion_template
            .as_deref()
            .or(cfg.completion_template.as_deref())
            .unwrap_or(DEFAULT_COMPLETION_TEMPLATE),
    )
    .map_err(|e| usage(e.to_string()))?;
    let limits = LengthLimits {
        max_source_tokens: a.max_src.or(cfg.max_source_length).unwrap_or(DEFAULT_MAX_SOURCE_TOKENS),
        max_target_tokens: a.max_tgt.or(cfg.max_target_length).unwrap_or(DEFAULT_MAX_TARGET_TOKENS),
    };
    let tokenizer_dir = a
        .tokenizer
        .or_else(|| ctx.cfg.paths.tokenizer.clone())
        .ok_or_else(|| usage("prepare-finetune needs --tokenizer"))?;
    let tokenizer = load_tokenizer(&tokenizer_dir)?;

    let flores_dirs = if a.flores.is_empty() { ctx.cfg.paths.flores.clone() } else { a.flores };
    let ntrex_dir = a.ntrex.or_else(|| ctx.cfg.paths.ntrex.clone());
    let mut wmt_sources = ctx.cfg.paths.wmt.clone();
    for w in &a.wmt {
        let (pair, files) = split_kv(w)?;
        let (src, tgt) = files
            .split_once(',')
            .ok_or_else(|| usage(format!("--wmt expects PAIR=SRC,TGT, got `{w}`")))?;
        wmt_sources.push(WmtSource {
            pair: pair.to_string(),
            src: src.into(),
            tgt: tgt.into(),
        });
    }
    if flores_dirs.is_empty() && ntrex_dir.is_none() && wmt_sources.is_empty() {
        return Err(usage("prepare-finetune needs at least one of --flores-dir, --ntrex-dir, --wmt"));
    }

    let mut flores = Vec::new();
    if !flores_dirs.is_empty() {
        let mut corpus: Option<MultiParallelCorpus> = None;
        for d in &flores_dirs {
            let split = MultiParallelCorpus::load_dir(d, &english)?;
            corpus = Some(match corpus {
                None => split,
                Some(c) => c.concat(split)?,
            });
        }
        let corpus = corpus.expect("at least one split");
        let present: Vec<LanguagePair> = pairs
            .iter()
            .filter(|p| corpus.sentences(&p.src).is_some() && corpus.sentences(&p.tgt).is_some())
            .cloned()
            .collect();
        flores = ingest_multiparallel(&corpus, &present)?;
    }
    let ntrex = match &ntrex_dir {
        Some(d) => ingest_english_centric(&MultiParallelCorpus::load_dir(d, &english)?, &pairs, Origin::Ntrex)?,
        None => Vec::new(),
    };
    let mut wmt = Vec::new();
    for w in &wmt_sources {
        let p: LanguagePair = w.pair.parse().map_err(|e: crate::Error| usage(e.to_string()))?;
        wmt.extend(ingest_directional(&w.src, &w.tgt, &p.src, &p.tgt, Origin::Wmt)?);
    }
    let input_counts = json!({"flores": flores.len(), "ntrex": ntrex.len(), "wmt": wmt.len()});

    let records = assemble(flores, ntrex, wmt, &policy)?;
    let stats = build_stats(&records);
    let (examples, rejections) = format_examples(&records, &template, &tokenizer, limits, Execution::default());

    let jsonl_path = ctx.output("finetune.jsonl");
    with_atomic_writer(&jsonl_path, |w| {
        for e in &examples {
            writeln!(w, "{}", e.to_json_line())?;
        }
        Ok(())
    })?;
    let stats_txt = ctx.output("stats.txt");
    write_atomic(&stats_txt, stats.to_text(&english).as_bytes())?;
    let stats_json = ctx.output("stats.json");
    write_atomic(&stats_json, stats.to_json().as_bytes())?;
    let rej_path = ctx.output("rejections.json");
    let rej = json!({
        "max_source_length": limits.max_source_tokens,
        "max_target_length": limits.max_target_tokens,
        "records": records.len(),
        "accepted": examples.len(),
        "rejected": rejections.by_reason,
    });
    write_json(&rej_path, &rej)?;
    print!("{}", stats.to_text(&english));
    Ok(summary(
        "prepare-finetune",
        &[&jsonl_path, &stats_txt, &stats_json, &rej_path],
        json!({"inputs": input_counts, "records": records.len(), "accepted": examples.len(), "rejected": rejections.total()}),
    ))
}

fn emit_training_profile(ctx: &Ctx) -> anyhow::Result<Value> {
    let profile = ctx.cfg.training_profile.clone().unwrap_or_else(default_training_profile);
    if !profile.is_object() {
        bail!(usage("training_profile in the config must be a JSON object"));
    }
    let path = ctx.output("training_profile.json");
    write_json(&path, &profile)?;
    Ok(summary("emit-training-profile", &[&path], json!({})))
}

