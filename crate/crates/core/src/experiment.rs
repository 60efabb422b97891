//! End-to-end experiments: grid search over alignment hyperparameters with
//! unsupervised CSLS model selection, and matched / mismatched / joint
//! comparison tables.
//!
//! Selection and evaluation are separate stages. [`grid_search`] only receives
//! the two embedding spaces; the gold dictionary enters through
//! [`evaluate_selection`] once a configuration has been chosen.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs::{self, File, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alignment::{adversarial_run, load_dictionary, refine, AdversarialParams, Dictionary, MappingModel, RefineParams};
use crate::corpus::{load_corpus, Corpus};
use crate::embedding::{normalize_rows, train_joint, train_separate, EmbeddingMatrix, SgnsParams};
use crate::error::{Error, Result};
use crate::retrieval::{csls_criterion, evaluate_mapping, BliReport, RetrievalMethod};
use crate::wordsim::{load_dataset, predict_pairs, score, SimReport};

/// Environment variable capping the number of concurrently trained configurations.
pub const WORKERS_ENV: &str = "XLIFT_WORKERS";

/// Value of [`WORKERS_ENV`], or the number of available cores.
pub fn worker_limit() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n: &usize| n >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrainingMode {
    #[default]
    Separate,
    Joint,
}

impl std::str::FromStr for TrainingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "separate" => Ok(TrainingMode::Separate),
            "joint" => Ok(TrainingMode::Joint),
            _ => Err(Error::InvalidParam(format!("unknown mode {s:?}"))),
        }
    }
}

impl std::fmt::Display for TrainingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TrainingMode::Separate => "separate",
            TrainingMode::Joint => "joint",
        })
    }
}

/// Seeds, refinement iteration counts and adversarial epoch counts to try.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub seeds: Vec<u64>,
    pub refinement: Vec<usize>,
    pub epochs: Vec<usize>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            seeds: vec![123, 456, 789, 321],
            refinement: vec![1, 3, 5],
            epochs: vec![1, 3, 5],
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() || self.refinement.is_empty() || self.epochs.is_empty() {
            return Err(Error::Config("grid lists must be non-empty".into()));
        }
        if self.refinement.contains(&0) || self.epochs.contains(&0) {
            return Err(Error::Config("grid epochs and refinement counts must be at least 1".into()));
        }
        let unique: BTreeSet<u64> = self.seeds.iter().copied().collect();
        if unique.len() != self.seeds.len() {
            return Err(Error::Config("grid seeds must be distinct".into()));
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.seeds.len() * self.refinement.len() * self.epochs.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigId {
    pub seed: u64,
    pub epochs: usize,
    pub refinement: usize,
}

/// Criterion value of one configuration, or why it failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigOutcome {
    pub config: ConfigId,
    pub criterion: Option<f64>,
    pub error: Option<String>,
}

/// Output of the selection stage.
#[derive(Debug, Clone)]
pub struct Selection {
    /// In grid order: seeds, then epochs, then refinement counts.
    pub outcomes: Vec<ConfigOutcome>,
    pub selected: ConfigId,
    pub criterion: f64,
    pub model: MappingModel,
    models: Vec<Option<MappingModel>>,
    seed_order: Vec<u64>,
}

impl Selection {
    fn pick(
        outcomes: Vec<ConfigOutcome>,
        models: Vec<Option<MappingModel>>,
        seed_order: Vec<u64>,
        allowed: impl Fn(&ConfigId) -> bool,
    ) -> Result<Self> {
        let rank = |c: &ConfigId| {
            let s = seed_order.iter().position(|&x| x == c.seed).unwrap_or(usize::MAX);
            (s, c.refinement, c.epochs)
        };
        let mut best: Option<(usize, f64)> = None;
        for (i, o) in outcomes.iter().enumerate() {
            let Some(v) = o.criterion.filter(|_| allowed(&o.config)) else {
                continue;
            };
            let better = match best {
                None => true,
                Some((j, b)) => v > b || (v == b && rank(&o.config) < rank(&outcomes[j].config)),
            };
            if better {
                best = Some((i, v));
            }
        }
        let (i, criterion) = best.ok_or(Error::AllConfigsFailed)?;
        Ok(Selection {
            selected: outcomes[i].config,
            criterion,
            model: models[i].clone().expect("successful configs keep their model"),
            outcomes,
            models,
            seed_order,
        })
    }

    /// The selection restricted to configurations with one seed.
    pub fn for_seed(&self, seed: u64) -> Result<Selection> {
        Selection::pick(
            self.outcomes.clone(),
            self.models.clone(),
            self.seed_order.clone(),
            |c| c.seed == seed,
        )
    }

    /// Mapping of any successful configuration in the grid.
    pub fn model_of(&self, config: &ConfigId) -> Option<&MappingModel> {
        let i = self.outcomes.iter().position(|o| o.config == *config)?;
        self.models[i].as_ref()
    }

    pub fn failed(&self) -> usize {
        self.outcomes.iter().filter(|o| o.criterion.is_none()).count()
    }
}

/// Alignment settings shared by every configuration of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlignSettings {
    pub adversarial: AdversarialParams,
    pub workers: usize,
}

impl Default for AlignSettings {
    fn default() -> Self {
        AlignSettings {
            adversarial: AdversarialParams::desk(),
            workers: 1,
        }
    }
}

type SeedResult = Vec<(ConfigOutcome, Option<MappingModel>)>;

fn run_seed(x: &EmbeddingMatrix, y: &EmbeddingMatrix, grid: &GridSpec, seed: u64, adv: &AdversarialParams) -> SeedResult {
    let mut epochs = grid.epochs.clone();
    epochs.sort_unstable();
    epochs.dedup();
    let mut refinement = grid.refinement.clone();
    refinement.sort_unstable();
    refinement.dedup();

    let fail_all = |msg: String| -> SeedResult {
        let mut out = Vec::new();
        for &e in &grid.epochs {
            for &r in &grid.refinement {
                let config = ConfigId {
                    seed,
                    epochs: e,
                    refinement: r,
                };
                out.push((
                    ConfigOutcome {
                        config,
                        criterion: None,
                        error: Some(msg.clone()),
                    },
                    None,
                ));
            }
        }
        out
    };

    let params = AdversarialParams {
        seed,
        epochs: *epochs.last().expect("validated grid"),
        ..adv.clone()
    };
    let run = match adversarial_run(x, y, &params) {
        Ok(r) => r,
        Err(e) => return fail_all(e.to_string()),
    };
    let n_eval = adv.criterion_words.min(x.len());
    let k = adv.csls_k.min(x.len()).min(y.len());
    let rp = |iters| RefineParams {
        iters,
        max_rank: adv.refine_max_rank,
        csls_k: adv.csls_k,
    };

    let mut found: Vec<(ConfigId, std::result::Result<(f64, MappingModel), String>)> = Vec::new();
    for &e in &epochs {
        let mut current = run.after_epochs(e).expect("epochs run").clone();
        let mut done = 0;
        let mut broken: Option<String> = None;
        for &r in &refinement {
            let config = ConfigId {
                seed,
                epochs: e,
                refinement: r,
            };
            if let Some(msg) = &broken {
                found.push((config, Err(msg.clone())));
                continue;
            }
            let step = refine(&current, x, y, rp(r - done))
                .and_then(|m| csls_criterion(&m, x, y, n_eval, k).map(|c| (c, m)));
            match step {
                Ok((c, m)) => {
                    log::debug!("seed={seed} epochs={e} refinement={r} criterion={c:.5}");
                    current = m.clone();
                    done = r;
                    found.push((config, Ok((c, m))));
                }
                Err(err) => {
                    broken = Some(err.to_string());
                    found.push((config, Err(err.to_string())));
                }
            }
        }
    }

    let mut out = Vec::new();
    for &e in &grid.epochs {
        for &r in &grid.refinement {
            let (config, res) = found
                .iter()
                .find(|(c, _)| c.epochs == e && c.refinement == r)
                .expect("every grid point computed");
            out.push(match res {
                Ok((c, m)) => (
                    ConfigOutcome {
                        config: *config,
                        criterion: Some(*c),
                        error: None,
                    },
                    Some(m.clone()),
                ),
                Err(msg) => (
                    ConfigOutcome {
                        config: *config,
                        criterion: None,
                        error: Some(msg.clone()),
                    },
                    None,
                ),
            });
        }
    }
    out
}

/// Trains every grid configuration and selects the one with the highest CSLS
/// criterion. Only the two spaces are visible here.
///
/// One adversarial run per seed serves all epoch counts (each epoch count
/// reads the run's snapshot), and refinement counts are reached incrementally.
/// Ties go to the earlier seed, then fewer refinement iterations, then fewer
/// epochs.
pub fn grid_search(x: &EmbeddingMatrix, y: &EmbeddingMatrix, grid: &GridSpec, settings: &AlignSettings) -> Result<Selection> {
    grid.validate()?;
    settings.adversarial.validate()?;
    let workers = settings.workers.max(1).min(grid.seeds.len());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let per_seed: Vec<SeedResult> = pool.install(|| {
        grid.seeds
            .par_iter()
            .map(|&s| run_seed(x, y, grid, s, &settings.adversarial))
            .collect()
    });
    let (outcomes, models): (Vec<_>, Vec<_>) = per_seed.into_iter().flatten().unzip();
    Selection::pick(outcomes, models, grid.seeds.clone(), |_| true)
}

/// Result of evaluating a selected configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub label: String,
    pub mode: TrainingMode,
    pub outcomes: Vec<ConfigOutcome>,
    pub selected: ConfigId,
    pub selected_criterion: f64,
    pub retrieval: RetrievalMethod,
    pub bli: BliReport,
}

/// Evaluation stage: scores the selected mapping against gold.
pub fn evaluate_selection(
    sel: &Selection,
    spaces: &Spaces,
    gold: &Dictionary,
    method: RetrievalMethod,
) -> Result<GridReport> {
    let bli = evaluate_mapping(&sel.model, &spaces.x, &spaces.y, gold, method)?;
    Ok(GridReport {
        label: spaces.label.clone(),
        mode: spaces.mode,
        outcomes: sel.outcomes.clone(),
        selected: sel.selected,
        selected_criterion: sel.criterion,
        retrieval: method,
        bli,
    })
}

/// Normalized source and target spaces for one condition.
#[derive(Debug, Clone)]
pub struct Spaces {
    pub label: String,
    pub mode: TrainingMode,
    pub x: EmbeddingMatrix,
    pub y: EmbeddingMatrix,
}

/// Trains embeddings for a source and target corpus.
///
/// In joint mode one model is trained on both corpora and each side is the
/// view of that model restricted to its own corpus.
pub fn prepare_spaces(label: &str, src: &Corpus, tgt: &Corpus, mode: TrainingMode, sgns: &SgnsParams) -> Result<Spaces> {
    let (x, y) = match mode {
        TrainingMode::Separate => (train_separate(src, sgns)?, train_separate(tgt, sgns)?),
        TrainingMode::Joint => {
            let j = train_joint(src, tgt, sgns)?;
            (j.a, j.b)
        }
    };
    Ok(Spaces {
        label: label.to_string(),
        mode,
        x: normalize_rows(&x)?,
        y: normalize_rows(&y)?,
    })
}

/// One row of a comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub label: String,
    pub mode: TrainingMode,
    pub selected: ConfigId,
    pub criterion: f64,
    pub acc1: f64,
    pub acc5: f64,
    pub n_evaluated: usize,
    pub oov: usize,
}

impl ComparisonRow {
    fn from_report(r: &GridReport) -> Self {
        ComparisonRow {
            label: r.label.clone(),
            mode: r.mode,
            selected: r.selected,
            criterion: r.selected_criterion,
            acc1: r.bli.acc(1),
            acc5: r.bli.acc(5),
            n_evaluated: r.bli.n_evaluated,
            oov: r.bli.oov_count,
        }
    }
}

/// Matched, mismatched and mismatched-with-joint-training rows plus the
/// joint-minus-mismatched difference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub rows: [ComparisonRow; 3],
    pub delta_acc1: f64,
    pub delta_acc5: f64,
}

impl ComparisonTable {
    pub fn new(matched: &GridReport, mismatched: &GridReport, joint: &GridReport) -> Self {
        let rows = [matched, mismatched, joint].map(ComparisonRow::from_report);
        ComparisonTable {
            delta_acc1: rows[2].acc1 - rows[1].acc1,
            delta_acc5: rows[2].acc5 - rows[1].acc5,
            rows,
        }
    }

    /// Tab-separated rendering with accuracies in percent.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("condition\tmode\tseed\tepochs\trefinement\tcriterion\tacc@1\tacc@5\tn\toov\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{:.6}\t{:.1}\t{:.1}\t{}\t{}",
                r.label,
                r.mode,
                r.selected.seed,
                r.selected.epochs,
                r.selected.refinement,
                r.criterion,
                100.0 * r.acc1,
                100.0 * r.acc5,
                r.n_evaluated,
                r.oov
            );
        }
        let _ = writeln!(
            out,
            "delta\t\t\t\t\t\t{:+.1}\t{:+.1}\t\t",
            100.0 * self.delta_acc1,
            100.0 * self.delta_acc5
        );
        out
    }
}

/// Comparison for every seed of the grid, each seed selecting among its own
/// configurations, plus the overall table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub overall: ComparisonTable,
    pub per_seed: Vec<(u64, ComparisonTable)>,
}

/// Runs the grid on each of the three conditions and tabulates the results.
/// All conditions are evaluated on the same gold dictionary.
pub fn run_comparison(
    conditions: [&Spaces; 3],
    gold: &Dictionary,
    grid: &GridSpec,
    settings: &AlignSettings,
    method: RetrievalMethod,
) -> Result<Comparison> {
    let selections = conditions
        .iter()
        .map(|s| grid_search(&s.x, &s.y, grid, settings))
        .collect::<Result<Vec<_>>>()?;
    let evaluate = |sels: [&Selection; 3]| -> Result<ComparisonTable> {
        let r: Vec<GridReport> = sels
            .iter()
            .zip(conditions)
            .map(|(sel, sp)| evaluate_selection(sel, sp, gold, method))
            .collect::<Result<_>>()?;
        Ok(ComparisonTable::new(&r[0], &r[1], &r[2]))
    };
    let overall = evaluate([&selections[0], &selections[1], &selections[2]])?;
    let mut per_seed = Vec::new();
    for &seed in &grid.seeds {
        let s: Vec<Selection> = selections.iter().map(|sel| sel.for_seed(seed)).collect::<Result<_>>()?;
        per_seed.push((seed, evaluate([&s[0], &s[1], &s[2]])?));
    }
    Ok(Comparison { overall, per_seed })
}

/// A corpus file with its language and domain tags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub path: PathBuf,
    pub lang: String,
    #[serde(default)]
    pub domain: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvaluationInputs {
    pub dictionary: Option<PathBuf>,
    pub wordsim: Option<PathBuf>,
}

/// One experiment, usually read from a TOML file.
///
/// ```toml
/// label = "en-fr wiki"
/// mode = "separate"          # or "joint"
/// retrieval = "csls:10"
/// output_dir = "runs/en-fr"
///
/// [[corpora]]
/// path = "en.txt"
/// lang = "en"
/// domain = "wiki"
///
/// [[corpora]]
/// path = "fr.txt"
/// lang = "fr"
/// domain = "wiki"
///
/// [sgns]
/// dim = 50
///
/// [grid]
/// seeds = [123, 456, 789, 321]
/// refinement = [1, 3, 5]
/// epochs = [1, 3, 5]
///
/// [align.adversarial]
/// epoch_size = 64000
///
/// [evaluation]
/// dictionary = "en-fr.test.txt"
/// wordsim = "en-fr.sim.tsv"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub label: String,
    pub corpora: Vec<CorpusEntry>,
    #[serde(default)]
    pub mode: TrainingMode,
    #[serde(default)]
    pub sgns: SgnsParams,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub align: AlignSettings,
    #[serde(default = "default_retrieval", with = "display_fromstr")]
    pub retrieval: RetrievalMethod,
    #[serde(default)]
    pub evaluation: EvaluationInputs,
    pub output_dir: PathBuf,
}

fn default_retrieval() -> RetrievalMethod {
    RetrievalMethod::default()
}

mod display_fromstr {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::retrieval::RetrievalMethod;

    pub fn serialize<S: Serializer>(m: &RetrievalMethod, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(m)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RetrievalMethod, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config; relative paths are resolved against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        if let Some(base) = path.parent() {
            let fix = |p: &mut PathBuf| {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            };
            cfg.corpora.iter_mut().for_each(|c| fix(&mut c.path));
            if let Some(p) = cfg.evaluation.dictionary.as_mut() {
                fix(p);
            }
            if let Some(p) = cfg.evaluation.wordsim.as_mut() {
                fix(p);
            }
            fix(&mut cfg.output_dir);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.corpora.len() != 2 {
            return Err(Error::Config(format!(
                "an experiment needs exactly two corpora, found {}",
                self.corpora.len()
            )));
        }
        self.grid.validate()?;
        self.sgns.validate()?;
        self.align.adversarial.validate()
    }

    fn label(&self) -> String {
        if self.label.is_empty() {
            format!("{}-{} {}", self.corpora[0].lang, self.corpora[1].lang, self.mode)
        } else {
            self.label.clone()
        }
    }

    pub fn spaces(&self) -> Result<Spaces> {
        let load = |c: &CorpusEntry| load_corpus(&c.path, &c.lang, &c.domain);
        prepare_spaces(&self.label(), &load(&self.corpora[0])?, &load(&self.corpora[1])?, self.mode, &self.sgns)
    }
}

/// Line-oriented JSON report writer; every record is appended and flushed.
pub struct ReportWriter {
    file: File,
}

impl ReportWriter {
    /// Starts a fresh report file.
    pub fn create(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        Ok(ReportWriter { file })
    }

    pub fn append_to(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        Ok(ReportWriter { file })
    }

    pub fn write<T: Serialize>(&mut self, kind: &str, record: &T) -> Result<()> {
        let line = serde_json::to_string(&serde_json::json!({ "kind": kind, "record": record }))?;
        writeln!(self.file, "{line}").map_err(|e| Error::io("<report>", e))?;
        self.file.flush().map_err(|e| Error::io("<report>", e))
    }
}

/// Everything a configured grid run produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRun {
    pub report: GridReport,
    /// Word-similarity scores of the selected mapping, when requested.
    pub wordsim: Option<SimReport>,
}

fn grid_tsv(r: &GridReport) -> String {
    let mut out = String::from("seed\tepochs\trefinement\tcriterion\tselected\n");
    for o in &r.outcomes {
        let crit = o.criterion.map_or_else(|| "failed".to_string(), |c| format!("{c:.6}"));
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            o.config.seed,
            o.config.epochs,
            o.config.refinement,
            crit,
            if o.config == r.selected { "*" } else { "" }
        );
    }
    let _ = writeln!(out, "# {} acc@1={:.4} acc@5={:.4} n={} oov={}", r.label, r.bli.acc(1), r.bli.acc(5), r.bli.n_evaluated, r.bli.oov_count);
    out
}

/// Trains, selects, evaluates and writes `grid.jsonl` and `grid.tsv` into the
/// output directory.
pub fn run_grid(cfg: &ExperimentConfig) -> Result<GridRun> {
    cfg.validate()?;
    let dict_path = cfg
        .evaluation
        .dictionary
        .as_ref()
        .ok_or_else(|| Error::Config("evaluation.dictionary is required for a grid run".into()))?;
    let spaces = cfg.spaces()?;
    let sel = grid_search(&spaces.x, &spaces.y, &cfg.grid, &cfg.align)?;
    let gold = load_dictionary(dict_path)?;
    let report = evaluate_selection(&sel, &spaces, &gold, cfg.retrieval)?;
    let wordsim = match &cfg.evaluation.wordsim {
        Some(p) => {
            let ds = load_dataset(p, &cfg.corpora[0].lang, &cfg.corpora[1].lang)?;
            let preds = predict_pairs(&spaces.x, &spaces.y, Some(&sel.model), &ds)?;
            Some(score(&preds, &ds)?)
        }
        None => None,
    };

    let mut w = ReportWriter::create(cfg.output_dir.join("grid.jsonl"))?;
    for o in &report.outcomes {
        w.write("config", o)?;
    }
    w.write("selection", &report)?;
    if let Some(ws) = &wordsim {
        w.write("wordsim", ws)?;
    }
    let tsv = cfg.output_dir.join("grid.tsv");
    fs::write(&tsv, grid_tsv(&report)).map_err(|e| Error::io(&tsv, e))?;
    sel.model.save(cfg.output_dir.join("mapping.json"))?;
    Ok(GridRun { report, wordsim })
}

/// Runs three configured experiments and writes `comparison.jsonl` and
/// `comparison.tsv` into `out_dir`.
pub fn run_comparison_configs(
    matched: &ExperimentConfig,
    mismatched: &ExperimentConfig,
    joint: &ExperimentConfig,
    out_dir: &Path,
) -> Result<Comparison> {
    let cfgs = [matched, mismatched, joint];
    for c in cfgs {
        c.validate()?;
    }
    let dicts: Vec<&PathBuf> = cfgs
        .iter()
        .map(|c| {
            c.evaluation
                .dictionary
                .as_ref()
                .ok_or_else(|| Error::Config(format!("{}: evaluation.dictionary is required", c.label())))
        })
        .collect::<Result<_>>()?;
    let texts: Vec<String> = dicts
        .iter()
        .map(|p| fs::read_to_string(p).map_err(|e| Error::io(p, e)))
        .collect::<Result<_>>()?;
    if texts.iter().any(|t| t != &texts[0]) {
        return Err(Error::Config("all conditions must share one evaluation dictionary".into()));
    }
    if cfgs.iter().any(|c| c.grid != matched.grid || c.align != matched.align) {
        return Err(Error::Config("all conditions must use the same grid and alignment settings".into()));
    }
    let gold = load_dictionary(dicts[0])?;
    let spaces: Vec<Spaces> = cfgs.iter().map(|c| c.spaces()).collect::<Result<_>>()?;
    let cmp = run_comparison(
        [&spaces[0], &spaces[1], &spaces[2]],
        &gold,
        &matched.grid,
        &matched.align,
        matched.retrieval,
    )?;
    let mut w = ReportWriter::create(out_dir.join("comparison.jsonl"))?;
    for (seed, t) in &cmp.per_seed {
        w.write("seed", &serde_json::json!({ "seed": seed, "table": t }))?;
    }
    w.write("overall", &cmp.overall)?;
    let tsv = out_dir.join("comparison.tsv");
    fs::write(&tsv, cmp.overall.to_tsv()).map_err(|e| Error::io(&tsv, e))?;
    Ok(cmp)
}
