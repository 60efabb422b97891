use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use xlift::alignment::{
    adversarial_train, extract_identical_seed, load_dictionary, procrustes, refine, AdversarialParams, MappingModel,
    RefineParams,
};
use xlift::corpus::{load_corpus, load_doc_bounds, Corpus, SegmentPolicy};
use xlift::embedding::{load_embeddings, normalize_rows, save_embeddings, train_joint, train_separate, SgnsParams, SubwordParams};
use xlift::experiment::{run_comparison_configs, run_grid, worker_limit, ExperimentConfig, TrainingMode};
use xlift::retrieval::{copying_baseline, evaluate_mapping, retrieve, RetrievalMethod};
use xlift::stdm::{stdm_corpora, RowSimilarity, StdmOptions, DEFAULT_RANK};
use xlift::synth::{
    generate_topical, make_cipher_language, make_domain_split, make_rotation_instance, AnchorPolicy, CipherSpec,
    TopicalSpec,
};
use xlift::wordsim::{load_dataset, predict_pairs, score};

#[derive(Parser)]
#[command(name = "xlift", version, about = "Cross-lingual embedding alignment and domain-mismatch tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train skip-gram embeddings on one corpus, or jointly on two.
    Train(TrainArgs),
    /// Learn a mapping from the source space into the target space.
    Align(AlignArgs),
    /// Print ranked translations for query words.
    Retrieve(RetrieveArgs),
    /// Accuracy@k of a mapping on a gold dictionary.
    EvalBli(EvalBliArgs),
    /// Accuracy of predicting every word as its own translation.
    CopyBaseline {
        #[arg(long)]
        dict: PathBuf,
    },
    /// Domain mismatch between two corpora of the same language.
    Stdm(StdmArgs),
    /// Cross-lingual word-similarity correlation.
    Wordsim(WordsimArgs),
    /// Generate synthetic data.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Grid search with unsupervised model selection, then evaluation.
    Grid(GridArgs),
    /// Matched, mismatched and joint conditions side by side.
    Compare {
        #[arg(long)]
        matched: PathBuf,
        #[arg(long)]
        mismatched: PathBuf,
        #[arg(long)]
        joint: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct SgnsArgs {
    #[arg(long, default_value_t = 50)]
    dim: usize,
    #[arg(long, default_value_t = 5)]
    window: usize,
    #[arg(long, default_value_t = 5)]
    negatives: usize,
    #[arg(long, default_value_t = 5)]
    epochs: usize,
    #[arg(long, default_value_t = 0.025)]
    lr: f64,
    #[arg(long, default_value_t = 1)]
    min_count: u64,
    #[arg(long, default_value_t = 1e-4)]
    subsample: f64,
    /// Add hashed character n-grams of length 3 to 6.
    #[arg(long)]
    subword: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Training threads; 1 is reproducible.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

impl SgnsArgs {
    fn params(&self) -> SgnsParams {
        SgnsParams {
            dim: self.dim,
            window: self.window,
            negatives: self.negatives,
            epochs: self.epochs,
            lr: self.lr,
            min_count: self.min_count,
            subsample_t: self.subsample,
            subword: self.subword.then(SubwordParams::default),
            seed: self.seed,
            workers: self.workers,
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    lang: String,
    #[arg(long, default_value = "")]
    domain: String,
    #[arg(long)]
    out: PathBuf,
    /// Second corpus for joint training.
    #[arg(long, requires_all = ["second_lang", "second_out"])]
    second: Option<PathBuf>,
    #[arg(long)]
    second_lang: Option<String>,
    #[arg(long, default_value = "")]
    second_domain: String,
    #[arg(long)]
    second_out: Option<PathBuf>,
    /// Also write the shared joint space.
    #[arg(long)]
    shared_out: Option<PathBuf>,
    #[command(flatten)]
    sgns: SgnsArgs,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum AlignMethod {
    Adversarial,
    Procrustes,
    /// Procrustes on identically spelled words.
    IdenticalSeed,
}

#[derive(Args)]
struct AlignArgs {
    #[arg(long)]
    src: PathBuf,
    #[arg(long)]
    tgt: PathBuf,
    #[arg(long, value_enum, default_value = "adversarial")]
    method: AlignMethod,
    /// Seed dictionary for procrustes.
    #[arg(long)]
    dict: Option<PathBuf>,
    /// Procrustes refinement iterations after the initial mapping.
    #[arg(long, default_value_t = 0)]
    refine: usize,
    #[arg(long, default_value_t = 123)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    epochs: usize,
    #[arg(long)]
    epoch_size: Option<usize>,
    #[arg(long)]
    full: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SpacesArgs {
    #[arg(long)]
    src: PathBuf,
    #[arg(long)]
    tgt: PathBuf,
    /// Mapping file; the identity when absent.
    #[arg(long)]
    mapping: Option<PathBuf>,
    #[arg(long, default_value = "csls:10")]
    retrieval: String,
}

#[derive(Args)]
struct RetrieveArgs {
    #[command(flatten)]
    spaces: SpacesArgs,
    /// File with one query word per line.
    #[arg(long, conflicts_with = "word")]
    queries: Option<PathBuf>,
    #[arg(long)]
    word: Vec<String>,
    #[arg(long, default_value_t = 5)]
    top: usize,
}

#[derive(Args)]
struct EvalBliArgs {
    #[command(flatten)]
    spaces: SpacesArgs,
    #[arg(long)]
    dict: PathBuf,
}

#[derive(Args)]
struct StdmArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long, default_value = "xx")]
    lang: String,
    /// Document boundary sidecars for `--segment native`.
    #[arg(long)]
    bounds_a: Option<PathBuf>,
    #[arg(long)]
    bounds_b: Option<PathBuf>,
    #[arg(long, default_value = "block:20")]
    segment: String,
    #[arg(long, default_value_t = DEFAULT_RANK)]
    rank: usize,
    #[arg(long, default_value = "dot")]
    similarity: String,
}

#[derive(Args)]
struct WordsimArgs {
    #[arg(long)]
    src: PathBuf,
    #[arg(long)]
    tgt: PathBuf,
    /// Map source vectors first; without it both files must come from one joint space.
    #[arg(long)]
    mapping: Option<PathBuf>,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    lang_a: String,
    #[arg(long)]
    lang_b: String,
}

#[derive(Subcommand)]
enum SynthCommand {
    /// Substitution-cipher a corpus into a new "language".
    Cipher {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out_corpus: PathBuf,
        #[arg(long)]
        out_dict: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Comma-separated: digits, punct, all, or none.
        #[arg(long, default_value = "digits,punct")]
        anchors: String,
        /// Extra tokens kept unciphered.
        #[arg(long)]
        keep: Vec<String>,
    },
    /// Split a corpus into two domains by keyword lexicons.
    Split {
        #[arg(long)]
        corpus: PathBuf,
        /// Files with one keyword per line.
        #[arg(long)]
        lexicon_a: PathBuf,
        #[arg(long)]
        lexicon_b: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        purity: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out_a: PathBuf,
        #[arg(long)]
        out_b: PathBuf,
    },
    /// Rotated point clouds with their identity dictionary.
    Rotation {
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        d: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Latent-topic two-domain text.
    Topical {
        #[arg(long, default_value_t = 60_000)]
        lines: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated overrides of the grid lists.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long, value_delimiter = ',')]
    refinement: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    epochs: Option<Vec<usize>>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    retrieval: Option<String>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn load_normalized(path: &Path) -> Result<xlift::embedding::EmbeddingMatrix> {
    let e = load_embeddings(path).with_context(|| format!("loading {}", path.display()))?;
    Ok(normalize_rows(&e)?)
}

fn load_mapping(path: Option<&PathBuf>, dim: usize) -> Result<MappingModel> {
    Ok(match path {
        Some(p) => MappingModel::load(p)?,
        None => MappingModel::identity(dim),
    })
}

fn train(a: TrainArgs) -> Result<()> {
    let p = a.sgns.params();
    let first = load_corpus(&a.corpus, &a.lang, &a.domain)?;
    match (&a.second, &a.second_lang, &a.second_out) {
        (Some(path), Some(lang), Some(out)) => {
            let second = load_corpus(path, lang, &a.second_domain)?;
            let j = train_joint(&first, &second, &p)?;
            save_embeddings(&j.a, &a.out)?;
            save_embeddings(&j.b, out)?;
            if let Some(s) = &a.shared_out {
                save_embeddings(&j.shared, s)?;
            }
            eprintln!("joint space: {} words ({} / {} per side)", j.shared.len(), j.a.len(), j.b.len());
        }
        _ => {
            let e = train_separate(&first, &p)?;
            save_embeddings(&e, &a.out)?;
            eprintln!("trained {} words", e.len());
        }
    }
    Ok(())
}

fn align(a: AlignArgs) -> Result<()> {
    let x = load_normalized(&a.src)?;
    let y = load_normalized(&a.tgt)?;
    let mut adv = if a.full { AdversarialParams::full() } else { AdversarialParams::desk() };
    adv.seed = a.seed;
    adv.epochs = a.epochs;
    if let Some(n) = a.epoch_size {
        adv.epoch_size = n;
    }
    let model = match a.method {
        AlignMethod::Adversarial => adversarial_train(&x, &y, &adv)?,
        AlignMethod::Procrustes => {
            let dict = a.dict.as_ref().context("--dict is required for procrustes")?;
            procrustes(&x, &y, &load_dictionary(dict)?)?
        }
        AlignMethod::IdenticalSeed => procrustes(&x, &y, &extract_identical_seed(&x.vocab, &y.vocab))?,
    };
    let model = if a.refine > 0 {
        refine(
            &model,
            &x,
            &y,
            RefineParams {
                iters: a.refine,
                max_rank: adv.refine_max_rank,
                csls_k: adv.csls_k,
            },
        )?
    } else {
        model
    };
    model.save(&a.out)?;
    Ok(())
}

fn retrieve_cmd(a: RetrieveArgs) -> Result<()> {
    let x = load_normalized(&a.spaces.src)?;
    let y = load_normalized(&a.spaces.tgt)?;
    let w = load_mapping(a.spaces.mapping.as_ref(), x.dim())?;
    let method: RetrievalMethod = a.spaces.retrieval.parse()?;
    let queries = match &a.queries {
        Some(p) => fs::read_to_string(p)?
            .lines()
            .map(|l| l.trim().to_lowercase())
            .filter(|l| !l.is_empty())
            .collect(),
        None => a.word.iter().map(|w| w.to_lowercase()).collect::<Vec<_>>(),
    };
    for r in retrieve(&w, &x, &y, &queries, method, a.top)? {
        match r.candidates {
            None => println!("{}\t<oov>", r.source),
            Some(c) => {
                let cands: Vec<String> = c.iter().map(|(t, s)| format!("{t}:{s:.4}")).collect();
                println!("{}\t{}", r.source, cands.join("\t"));
            }
        }
    }
    Ok(())
}

fn eval_bli(a: EvalBliArgs) -> Result<()> {
    let x = load_normalized(&a.spaces.src)?;
    let y = load_normalized(&a.spaces.tgt)?;
    let w = load_mapping(a.spaces.mapping.as_ref(), x.dim())?;
    let method: RetrievalMethod = a.spaces.retrieval.parse()?;
    print_json(&evaluate_mapping(&w, &x, &y, &load_dictionary(&a.dict)?, method)?)
}

fn stdm_cmd(a: StdmArgs) -> Result<()> {
    let policy: SegmentPolicy = a.segment.parse()?;
    let load = |path: &Path, bounds: &Option<PathBuf>, domain: &str| -> Result<Corpus> {
        let c = load_corpus(path, &a.lang, domain)?;
        Ok(match bounds {
            Some(b) => c.with_doc_bounds(load_doc_bounds(b)?)?,
            None => c,
        })
    };
    let ca = load(&a.a, &a.bounds_a, "a")?;
    let cb = load(&a.b, &a.bounds_b, "b")?;
    let opts = StdmOptions {
        rank: a.rank,
        similarity: a.similarity.parse::<RowSimilarity>()?,
    };
    let report = stdm_corpora(&ca, &cb, policy, opts)?;
    eprintln!("{}", report.summary());
    print_json(&report)
}

fn wordsim_cmd(a: WordsimArgs) -> Result<()> {
    let x = load_normalized(&a.src)?;
    let y = load_normalized(&a.tgt)?;
    let mapping = a.mapping.as_ref().map(MappingModel::load).transpose()?;
    let ds = load_dataset(&a.data, &a.lang_a, &a.lang_b)?;
    let preds = predict_pairs(&x, &y, mapping.as_ref(), &ds)?;
    let report = score(&preds, &ds)?;
    let space = if mapping.is_some() { "mapped" } else { "joint" };
    print_json(&serde_json::json!({ "space": space, "report": report }))
}

fn parse_anchors(s: &str, keep: &[String]) -> Result<AnchorPolicy> {
    let mut p = AnchorPolicy::none();
    for part in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        match part {
            "digits" => p.digits = true,
            "punct" | "punctuation" => p.punctuation = true,
            "all" => p.all = true,
            "none" => {}
            other => bail!("unknown anchor class {other:?}"),
        }
    }
    p.tokens.extend(keep.iter().cloned());
    Ok(p)
}

fn read_lexicon(path: &Path, name: &str) -> Result<xlift::synth::TopicLexicon> {
    let words = fs::read_to_string(path)?
        .lines()
        .map(|l| l.trim().to_lowercase())
        .filter(|l| !l.is_empty())
        .collect();
    Ok(xlift::synth::TopicLexicon {
        name: name.to_string(),
        words,
    })
}

fn synth(cmd: SynthCommand) -> Result<()> {
    match cmd {
        SynthCommand::Cipher {
            corpus,
            out_corpus,
            out_dict,
            seed,
            anchors,
            keep,
        } => {
            let c = load_corpus(&corpus, "src", "")?;
            let (out, dict) = make_cipher_language(&c, &CipherSpec::new(seed, parse_anchors(&anchors, &keep)?))?;
            out.save(&out_corpus)?;
            dict.save(&out_dict)?;
        }
        SynthCommand::Split {
            corpus,
            lexicon_a,
            lexicon_b,
            purity,
            seed,
            out_a,
            out_b,
        } => {
            let c = load_corpus(&corpus, "src", "")?;
            let lex = [read_lexicon(&lexicon_a, "a")?, read_lexicon(&lexicon_b, "b")?];
            let (a, b) = make_domain_split(&c, &lex, purity, seed)?;
            a.save(&out_a)?;
            b.save(&out_b)?;
            eprintln!("{} / {} lines", a.len(), b.len());
        }
        SynthCommand::Rotation {
            n,
            d,
            noise,
            seed,
            out_dir,
        } => {
            let inst = make_rotation_instance(n, d, noise, seed)?;
            fs::create_dir_all(&out_dir)?;
            save_embeddings(&inst.x, out_dir.join("src.vec"))?;
            save_embeddings(&inst.y, out_dir.join("tgt.vec"))?;
            inst.dict.save(out_dir.join("dict.txt"))?;
            let truth = MappingModel {
                w: inst.w_true,
                ..MappingModel::identity(d)
            };
            truth.save(out_dir.join("true_mapping.json"))?;
        }
        SynthCommand::Topical { lines, seed, out_dir } => {
            let t = generate_topical(&TopicalSpec {
                lines,
                seed,
                ..TopicalSpec::default()
            })?;
            fs::create_dir_all(&out_dir)?;
            t.corpus.save(out_dir.join("corpus.txt"))?;
            for lex in &t.lexicons {
                let words: Vec<&str> = lex.words.iter().map(String::as_str).collect();
                fs::write(out_dir.join(format!("lexicon_{}.txt", lex.name)), words.join("\n") + "\n")?;
            }
        }
    }
    Ok(())
}

fn grid(a: GridArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::load(&a.config)?;
    if let Some(s) = a.seeds {
        cfg.grid.seeds = s;
    }
    if let Some(r) = a.refinement {
        cfg.grid.refinement = r;
    }
    if let Some(e) = a.epochs {
        cfg.grid.epochs = e;
    }
    if let Some(m) = a.mode {
        cfg.mode = m.parse::<TrainingMode>()?;
    }
    if let Some(r) = a.retrieval {
        cfg.retrieval = r.parse()?;
    }
    if let Some(o) = a.out_dir {
        cfg.output_dir = o;
    }
    cfg.align.workers = cfg.align.workers.max(1).min(worker_limit());
    let run = run_grid(&cfg)?;
    print_json(&run)
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Train(a) => train(a),
        Command::Align(a) => align(a),
        Command::Retrieve(a) => retrieve_cmd(a),
        Command::EvalBli(a) => eval_bli(a),
        Command::CopyBaseline { dict } => print_json(&copying_baseline(&load_dictionary(&dict)?)?),
        Command::Stdm(a) => stdm_cmd(a),
        Command::Wordsim(a) => wordsim_cmd(a),
        Command::Synth(c) => synth(c),
        Command::Grid(a) => grid(a),
        Command::Compare {
            matched,
            mismatched,
            joint,
            out_dir,
        } => {
            let load = |p: &PathBuf| ExperimentConfig::load(p);
            let cmp = run_comparison_configs(&load(&matched)?, &load(&mismatched)?, &load(&joint)?, &out_dir)?;
            print!("{}", cmp.overall.to_tsv());
            Ok(())
        }
    }
}
