//! Pipeline orchestration over a working directory of file artifacts.
//!
//! Each stage reads its prerequisites from the workdir and writes its own
//! artifacts, so stages can be rerun independently and a rerun of a
//! downstream stage never touches upstream files. `run_all` is the
//! composition. Every stage RNG is derived from the master seed plus the
//! stage name; two runs with the same config produce byte-identical files.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use crate::contest::{
    build_contest, load_labels, load_predictions, load_test_pairs, save_labels, save_test_pairs,
    write_predictions, ContestDataset,
};
use crate::crawl::{generate_scale_free, obfuscate, partial_crawl};
use crate::error::{Error, Result};
use crate::eval::{auc, combine_predictions, augment_training, evaluate, CombineConfig, EvalReport};
use crate::features::{build_training_rows, extract_features};
use crate::forest::{predict_proba, train, ForestConfig};
use crate::graph::{
    load_edge_list, load_mapping, save_edge_list, save_mapping, DirectedGraph, GraphBuilder,
    NodeId,
};
use crate::propagate::{propagate, PropagationConfig};
use crate::rng::derive_seed;
use crate::seed::{
    anneal, build_seed_weights, dump_matching_instance, seeds_to_mapping, AnnealConfig,
    WeightMode, DEFAULT_COOLING, DEFAULT_MIN_TEMP_RATIO, DEFAULT_RESTARTS,
};

pub const GROUND_TRUTH: &str = "ground_truth.csv";
/// Attacker crawl (fresh crawl ids).
pub const CRAWL_A: &str = "crawl_a.csv";
pub const TRUTH_A: &str = "truth_a.csv";
/// Contest crawl, already obfuscated (what the organizers would release).
pub const CRAWL_B: &str = "crawl_b.csv";
pub const TRUTH_B: &str = "truth_b.csv";
pub const TRAIN: &str = "train.csv";
pub const TEST_PAIRS: &str = "test_pairs.csv";
pub const HIDDEN_LABELS: &str = "hidden_labels.csv";
pub const MAPPING: &str = "mapping.csv";
/// Classifier-only probabilities; `predictions.csv` is the combined submission.
pub const CLF_PREDICTIONS: &str = "clf_predictions.csv";
pub const PREDICTIONS: &str = "predictions.csv";
pub const REPORT: &str = "report.txt";
pub const SEED_INSTANCE: &str = "seed_instance.csv";

// ---------------------------------------------------------------------------
// Config file: TOML with one section per stage. The config is itself an
// artifact; anything omitted takes the documented default.
// ---------------------------------------------------------------------------

fn default_n() -> usize {
    2000
}
fn default_m() -> usize {
    5
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateSection {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_m")]
    pub m: usize,
}

impl Default for GenerateSection {
    fn default() -> Self {
        Self {
            n: default_n(),
            m: default_m(),
        }
    }
}

fn default_coverage() -> f64 {
    0.8
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrawlSection {
    #[serde(default = "default_coverage")]
    pub coverage_attacker: f64,
    #[serde(default = "default_coverage")]
    pub coverage_contest: f64,
}

impl Default for CrawlSection {
    fn default() -> Self {
        Self {
            coverage_attacker: default_coverage(),
            coverage_contest: default_coverage(),
        }
    }
}

fn default_n_test() -> usize {
    500
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContestSection {
    #[serde(default = "default_n_test")]
    pub n_test: usize,
}

impl Default for ContestSection {
    fn default() -> Self {
        Self {
            n_test: default_n_test(),
        }
    }
}

fn default_k() -> usize {
    40
}
fn default_mode() -> String {
    "cosine".into()
}
fn default_cooling() -> f64 {
    DEFAULT_COOLING
}
fn default_min_temp_ratio() -> f64 {
    DEFAULT_MIN_TEMP_RATIO
}
fn default_restarts() -> usize {
    DEFAULT_RESTARTS
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSection {
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_mode")]
    pub mode: String,
    /// Also count test pairs as edges when building the hub weight matrix.
    #[serde(default)]
    pub include_test_edges: bool,
    /// Data-derived when omitted.
    #[serde(default)]
    pub initial_temp: Option<f64>,
    #[serde(default = "default_cooling")]
    pub cooling: f64,
    /// 100·k when omitted.
    #[serde(default)]
    pub steps_per_temp: Option<usize>,
    #[serde(default = "default_min_temp_ratio")]
    pub min_temp_ratio: f64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    /// Write the matching instance to `seed_instance.csv` for inspection.
    #[serde(default)]
    pub dump_instance: bool,
}

impl Default for SeedSection {
    fn default() -> Self {
        Self {
            k: default_k(),
            mode: default_mode(),
            include_test_edges: false,
            initial_temp: None,
            cooling: default_cooling(),
            steps_per_temp: None,
            min_temp_ratio: default_min_temp_ratio(),
            restarts: default_restarts(),
            dump_instance: false,
        }
    }
}

fn default_theta() -> f64 {
    0.5
}
fn default_max_rounds() -> usize {
    10
}
fn default_true() -> bool {
    true
}
fn default_candidate_cap() -> usize {
    50
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationSection {
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_max_rounds")]
    pub max_rounds: usize,
    #[serde(default = "default_true")]
    pub bidirectional_check: bool,
    #[serde(default = "default_candidate_cap")]
    pub candidate_cap: usize,
}

impl Default for PropagationSection {
    fn default() -> Self {
        Self {
            theta: default_theta(),
            max_rounds: default_max_rounds(),
            bidirectional_check: true,
            candidate_cap: default_candidate_cap(),
        }
    }
}

fn default_n_trees() -> usize {
    100
}
fn default_max_depth() -> usize {
    12
}
fn default_min_leaf() -> usize {
    5
}
fn default_train_rows() -> usize {
    500
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForestSection {
    #[serde(default = "default_n_trees")]
    pub n_trees: usize,
    #[serde(default = "default_max_depth")]
    pub max_depth: usize,
    #[serde(default = "default_min_leaf")]
    pub min_leaf: usize,
    /// 0 resolves to ⌈sqrt(feature count)⌉.
    #[serde(default)]
    pub features_per_split: usize,
    #[serde(default = "default_train_rows")]
    pub train_pos: usize,
    #[serde(default = "default_train_rows")]
    pub train_neg: usize,
}

impl Default for ForestSection {
    fn default() -> Self {
        Self {
            n_trees: default_n_trees(),
            max_depth: default_max_depth(),
            min_leaf: default_min_leaf(),
            features_per_split: 0,
            train_pos: default_train_rows(),
            train_neg: default_train_rows(),
        }
    }
}

fn default_p_edge() -> f64 {
    0.99
}
fn default_p_nonedge() -> f64 {
    0.01
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombineSection {
    #[serde(default = "default_p_edge")]
    pub p_edge: f64,
    #[serde(default = "default_p_nonedge")]
    pub p_nonedge: f64,
    #[serde(default = "default_true")]
    pub augment: bool,
}

impl Default for CombineSection {
    fn default() -> Self {
        Self {
            p_edge: default_p_edge(),
            p_nonedge: default_p_nonedge(),
            augment: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub master_seed: u64,
    #[serde(default)]
    pub workdir: Option<PathBuf>,
    #[serde(default)]
    pub generate: GenerateSection,
    #[serde(default)]
    pub crawl: CrawlSection,
    #[serde(default)]
    pub contest: ContestSection,
    #[serde(default)]
    pub seed: SeedSection,
    #[serde(default)]
    pub propagation: PropagationSection,
    #[serde(default)]
    pub forest: ForestSection,
    #[serde(default)]
    pub combine: CombineSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            master_seed: 0,
            workdir: None,
            generate: GenerateSection::default(),
            crawl: CrawlSection::default(),
            contest: ContestSection::default(),
            seed: SeedSection::default(),
            propagation: PropagationSection::default(),
            forest: ForestSection::default(),
            combine: CombineSection::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.crawl;
        for (name, v) in [
            ("coverage_attacker", c.coverage_attacker),
            ("coverage_contest", c.coverage_contest),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be in (0,1], got {v}"
                )));
            }
        }
        self.seed.mode.parse::<WeightMode>()?;
        if self.seed.k < 2 {
            return Err(Error::InvalidConfig(format!(
                "seed.k must be >= 2, got {}",
                self.seed.k
            )));
        }
        self.propagation_config().validate()?;
        self.combine_config().validate()?;
        Ok(())
    }

    pub fn propagation_config(&self) -> PropagationConfig {
        PropagationConfig {
            theta: self.propagation.theta,
            max_rounds: self.propagation.max_rounds,
            bidirectional_check: self.propagation.bidirectional_check,
            candidate_cap: self.propagation.candidate_cap,
        }
    }

    pub fn combine_config(&self) -> CombineConfig {
        CombineConfig {
            p_edge: self.combine.p_edge,
            p_nonedge: self.combine.p_nonedge,
            augment: self.combine.augment,
        }
    }

    pub fn forest_config(&self) -> ForestConfig {
        ForestConfig {
            n_trees: self.forest.n_trees,
            max_depth: self.forest.max_depth,
            min_leaf: self.forest.min_leaf,
            features_per_split: self.forest.features_per_split,
            seed: derive_seed(self.master_seed, "forest"),
        }
    }
}

// ---------------------------------------------------------------------------
// Workdir + stage functions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Workdir {
    dir: PathBuf,
}

impl Workdir {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Self { dir })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Path of an artifact a stage depends on; error if absent.
    pub fn require(&self, name: &str) -> Result<PathBuf> {
        let p = self.path(name);
        if p.is_file() {
            Ok(p)
        } else {
            Err(Error::MissingArtifact(p))
        }
    }
}

fn tag<T>(stage: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.in_stage(stage))
}

/// The training graph on disk is an edge list, which cannot carry isolated
/// nodes; re-adding the test-pair endpoints restores the contest node set
/// that featurization needs.
fn load_train_graph(wd: &Workdir) -> Result<(DirectedGraph, Vec<(NodeId, NodeId)>)> {
    let train_edges = load_edge_list(wd.require(TRAIN)?)?;
    let test_pairs = load_test_pairs(wd.require(TEST_PAIRS)?)?;
    let mut b = GraphBuilder::new();
    for &u in train_edges.nodes() {
        b.add_node(u);
    }
    for (u, v) in train_edges.edges() {
        b.add_edge(u, v)?;
    }
    for &(u, v) in &test_pairs {
        b.add_node(u);
        b.add_node(v);
    }
    Ok((b.freeze(), test_pairs))
}

pub fn stage_generate(cfg: &RunConfig, wd: &Workdir) -> Result<()> {
    tag("generate", (|| {
        let g = generate_scale_free(
            cfg.generate.n,
            cfg.generate.m,
            derive_seed(cfg.master_seed, "generate"),
        )?;
        save_edge_list(&g, wd.path(GROUND_TRUTH))
    })())
}

pub fn stage_crawl(cfg: &RunConfig, wd: &Workdir) -> Result<()> {
    tag("crawl", (|| {
        let g = load_edge_list(wd.require(GROUND_TRUTH)?)?;
        let a = partial_crawl(
            &g,
            cfg.crawl.coverage_attacker,
            derive_seed(cfg.master_seed, "crawl-attacker"),
        )?;
        save_edge_list(&a.subgraph, wd.path(CRAWL_A))?;
        save_mapping(&a.truth, wd.path(TRUTH_A))?;

        let b = partial_crawl(
            &g,
            cfg.crawl.coverage_contest,
            derive_seed(cfg.master_seed, "crawl-contest"),
        )?;
        let (obf, obf_back) = obfuscate(&b.subgraph, derive_seed(cfg.master_seed, "obfuscate"))?;
        // obfuscated id → crawl id → ground-truth id
        let truth_b = obf_back.compose(&b.truth)?;
        save_edge_list(&obf, wd.path(CRAWL_B))?;
        save_mapping(&truth_b, wd.path(TRUTH_B))
    })())
}

pub fn stage_contest(cfg: &RunConfig, wd: &Workdir) -> Result<()> {
    tag("contest", (|| {
        let g = load_edge_list(wd.require(CRAWL_B)?)?;
        let ds = build_contest(&g, cfg.contest.n_test, derive_seed(cfg.master_seed, "contest"))?;
        save_edge_list(&ds.train_graph, wd.path(TRAIN))?;
        save_test_pairs(&ds.test_pairs, wd.path(TEST_PAIRS))?;
        save_labels(&ds.hidden_labels, wd.path(HIDDEN_LABELS))
    })())
}

pub fn stage_deanon(cfg: &RunConfig, wd: &Workdir) -> Result<()> {
    tag("deanon", (|| {
        let (train_graph, test_pairs) = load_train_graph(wd)?;
        let attacker = load_edge_list(wd.require(CRAWL_A)?)?;

        let weight_graph = if cfg.seed.include_test_edges {
            let mut b = GraphBuilder::new();
            for &u in train_graph.nodes() {
                b.add_node(u);
            }
            for (u, v) in train_graph.edges() {
                b.add_edge(u, v)?;
            }
            for &(u, v) in &test_pairs {
                b.add_edge(u, v)?;
            }
            b.freeze()
        } else {
            train_graph.clone()
        };

        let mode: WeightMode = cfg.seed.mode.parse()?;
        let wa = build_seed_weights(&weight_graph, cfg.seed.k, mode)?;
        let wb = build_seed_weights(&attacker, cfg.seed.k, mode)?;
        if cfg.seed.dump_instance {
            dump_matching_instance(&wa, &wb, wd.path(SEED_INSTANCE))?;
        }

        let mut anneal_cfg =
            AnnealConfig::defaults(&wa, &wb, derive_seed(cfg.master_seed, "anneal"))?;
        if let Some(t0) = cfg.seed.initial_temp {
            anneal_cfg.initial_temp = t0;
        }
        if let Some(steps) = cfg.seed.steps_per_temp {
            anneal_cfg.steps_per_temp = steps;
        }
        anneal_cfg.cooling = cfg.seed.cooling;
        anneal_cfg.min_temp = cfg.seed.min_temp_ratio * anneal_cfg.initial_temp;
        anneal_cfg.restarts = cfg.seed.restarts;

        let state = anneal(&wa, &wb, &anneal_cfg)?;
        let seeds = seeds_to_mapping(&wa, &wb, &state)?;
        let mapping = propagate(&train_graph, &attacker, &seeds, &cfg.propagation_config())?;
        save_mapping(&mapping, wd.path(MAPPING))
    })())
}

pub fn stage_predict(cfg: &RunConfig, wd: &Workdir, augment_override: Option<bool>) -> Result<()> {
    tag("predict", (|| {
        let (train_graph, test_pairs) = load_train_graph(wd)?;
        let (mut x, mut y) = build_training_rows(
            &train_graph,
            cfg.forest.train_pos,
            cfg.forest.train_neg,
            derive_seed(cfg.master_seed, "train-rows"),
        )?;

        let augment = augment_override.unwrap_or(cfg.combine.augment);
        if augment {
            let mapping = load_mapping(wd.require(MAPPING)?)?;
            let attacker = load_edge_list(wd.require(CRAWL_A)?)?;
            (x, y) = augment_training(&x, &y, &test_pairs, &mapping, &attacker, &train_graph)?;
        }

        let model = train(&x, &y, &cfg.forest_config())?;
        let probs: Vec<f64> = test_pairs
            .par_iter()
            .map(|&(u, v)| {
                let f = extract_features(&train_graph, u, v)?;
                predict_proba(&model, &f.to_array())
            })
            .collect::<Result<_>>()?;
        write_predictions(&test_pairs, &probs, wd.path(CLF_PREDICTIONS))
    })())
}

pub fn stage_combine(cfg: &RunConfig, wd: &Workdir) -> Result<()> {
    tag("combine", (|| {
        let test_pairs = load_test_pairs(wd.require(TEST_PAIRS)?)?;
        let clf_probs = load_predictions(wd.require(CLF_PREDICTIONS)?)?;
        let mapping = load_mapping(wd.require(MAPPING)?)?;
        let attacker = load_edge_list(wd.require(CRAWL_A)?)?;
        let combined = combine_predictions(
            &test_pairs,
            &mapping,
            &attacker,
            &clf_probs,
            &cfg.combine_config(),
        )?;
        write_predictions(&test_pairs, &combined, wd.path(PREDICTIONS))
    })())
}

pub fn stage_evaluate(cfg: &RunConfig, wd: &Workdir) -> Result<EvalReport> {
    tag("evaluate", (|| {
        let (train_graph, test_pairs) = load_train_graph(wd)?;
        let hidden_labels = load_labels(wd.require(HIDDEN_LABELS)?)?;
        let probs = load_predictions(wd.require(PREDICTIONS)?)?;
        let mapping = load_mapping(wd.require(MAPPING)?)?;
        let truth_contest = load_mapping(wd.require(TRUTH_B)?)?;
        let truth_attacker = load_mapping(wd.require(TRUTH_A)?)?;
        let attacker = load_edge_list(wd.require(CRAWL_A)?)?;

        let dataset = ContestDataset {
            train_graph,
            test_pairs,
            hidden_labels,
        };
        let report = evaluate(
            &dataset,
            &mapping,
            &truth_contest,
            &truth_attacker,
            &attacker,
            &probs,
        )?;

        let clf_auc = match wd.require(CLF_PREDICTIONS) {
            Ok(p) => Some(auc(&dataset.hidden_labels, &load_predictions(p)?)?),
            Err(_) => None,
        };
        write_report(cfg, &report, clf_auc, wd.path(REPORT))?;
        Ok(report)
    })())
}

/// Flat `key=value` report, keys sorted: the four metrics, the classifier-only
/// AUC when available, and echoes of every config knob and derived stage seed.
fn write_report(
    cfg: &RunConfig,
    report: &EvalReport,
    clf_auc: Option<f64>,
    path: PathBuf,
) -> Result<()> {
    let mut kv: BTreeMap<String, String> = BTreeMap::new();
    kv.insert("auc".into(), report.auc.to_string());
    kv.insert("coverage".into(), report.coverage.to_string());
    kv.insert(
        "mapping_precision".into(),
        report.mapping_precision.to_string(),
    );
    kv.insert(
        "deanon_label_accuracy".into(),
        report.deanon_label_accuracy.to_string(),
    );
    if let Some(a) = clf_auc {
        kv.insert("clf_auc".into(), a.to_string());
    }

    kv.insert("config.master_seed".into(), cfg.master_seed.to_string());
    kv.insert("config.generate.n".into(), cfg.generate.n.to_string());
    kv.insert("config.generate.m".into(), cfg.generate.m.to_string());
    kv.insert(
        "config.crawl.coverage_attacker".into(),
        cfg.crawl.coverage_attacker.to_string(),
    );
    kv.insert(
        "config.crawl.coverage_contest".into(),
        cfg.crawl.coverage_contest.to_string(),
    );
    kv.insert("config.contest.n_test".into(), cfg.contest.n_test.to_string());
    kv.insert("config.seed.k".into(), cfg.seed.k.to_string());
    kv.insert("config.seed.mode".into(), cfg.seed.mode.clone());
    kv.insert(
        "config.seed.include_test_edges".into(),
        cfg.seed.include_test_edges.to_string(),
    );
    kv.insert(
        "config.seed.initial_temp".into(),
        cfg.seed
            .initial_temp
            .map_or("auto".into(), |t| t.to_string()),
    );
    kv.insert("config.seed.cooling".into(), cfg.seed.cooling.to_string());
    kv.insert(
        "config.seed.steps_per_temp".into(),
        cfg.seed
            .steps_per_temp
            .map_or("auto".into(), |s| s.to_string()),
    );
    kv.insert(
        "config.seed.min_temp_ratio".into(),
        cfg.seed.min_temp_ratio.to_string(),
    );
    kv.insert("config.seed.restarts".into(), cfg.seed.restarts.to_string());
    kv.insert(
        "config.propagation.theta".into(),
        cfg.propagation.theta.to_string(),
    );
    kv.insert(
        "config.propagation.max_rounds".into(),
        cfg.propagation.max_rounds.to_string(),
    );
    kv.insert(
        "config.propagation.bidirectional_check".into(),
        cfg.propagation.bidirectional_check.to_string(),
    );
    kv.insert(
        "config.propagation.candidate_cap".into(),
        cfg.propagation.candidate_cap.to_string(),
    );
    kv.insert("config.forest.n_trees".into(), cfg.forest.n_trees.to_string());
    kv.insert(
        "config.forest.max_depth".into(),
        cfg.forest.max_depth.to_string(),
    );
    kv.insert(
        "config.forest.min_leaf".into(),
        cfg.forest.min_leaf.to_string(),
    );
    kv.insert(
        "config.forest.features_per_split".into(),
        cfg.forest.features_per_split.to_string(),
    );
    kv.insert(
        "config.forest.train_pos".into(),
        cfg.forest.train_pos.to_string(),
    );
    kv.insert(
        "config.forest.train_neg".into(),
        cfg.forest.train_neg.to_string(),
    );
    kv.insert("config.combine.p_edge".into(), cfg.combine.p_edge.to_string());
    kv.insert(
        "config.combine.p_nonedge".into(),
        cfg.combine.p_nonedge.to_string(),
    );
    kv.insert(
        "config.combine.augment".into(),
        cfg.combine.augment.to_string(),
    );

    for stage in [
        "generate",
        "crawl-attacker",
        "crawl-contest",
        "obfuscate",
        "contest",
        "anneal",
        "train-rows",
        "forest",
    ] {
        kv.insert(
            format!("seed.{stage}"),
            derive_seed(cfg.master_seed, stage).to_string(),
        );
    }

    let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for (k, v) in &kv {
        writeln!(w, "{k}={v}").map_err(|e| Error::io(&path, e))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))
}

/// Runs the whole pipeline in order and returns the final report.
pub fn run_all(cfg: &RunConfig, wd: &Workdir) -> Result<EvalReport> {
    stage_generate(cfg, wd)?;
    stage_crawl(cfg, wd)?;
    stage_contest(cfg, wd)?;
    stage_deanon(cfg, wd)?;
    stage_predict(cfg, wd, None)?;
    stage_combine(cfg, wd)?;
    stage_evaluate(cfg, wd)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_overrides() {
        let cfg = RunConfig::from_toml_str("master_seed = 7").unwrap();
        assert_eq!(cfg.generate.n, 2000);
        assert_eq!(cfg.seed.k, 40);
        assert!(cfg.combine.augment);

        let cfg = RunConfig::from_toml_str(
            r#"
            master_seed = 1
            [generate]
            n = 300
            m = 3
            [seed]
            k = 10
            mode = "edge"
            [combine]
            augment = false
            "#,
        )
        .unwrap();
        assert_eq!(cfg.generate.n, 300);
        assert_eq!(cfg.seed.k, 10);
        assert_eq!(cfg.seed.mode, "edge");
        assert!(!cfg.combine.augment);
    }

    #[test]
    fn config_rejects_bad_values() {
        assert!(RunConfig::from_toml_str("master_seed = 1\n[crawl]\ncoverage_contest = 1.5")
            .is_err());
        assert!(RunConfig::from_toml_str("master_seed = 1\n[seed]\nmode = \"nope\"").is_err());
        assert!(RunConfig::from_toml_str("master_seed = 1\n[seed]\nk = 1").is_err());
        assert!(RunConfig::from_toml_str("master_seed = 1\nunknown_field = 2").is_err());
        assert!(RunConfig::from_toml_str("").is_err()); // master_seed required
    }

    #[test]
    fn missing_artifact_names_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let wd = Workdir::new(dir.path()).unwrap();
        let cfg = RunConfig::from_toml_str("master_seed = 3").unwrap();
        match stage_evaluate(&cfg, &wd) {
            Err(Error::Stage { stage, source }) => {
                assert_eq!(stage, "evaluate");
                match *source {
                    Error::MissingArtifact(p) => {
                        assert!(p.ends_with(TRAIN), "unexpected artifact {p:?}")
                    }
                    other => panic!("expected missing artifact, got {other:?}"),
                }
            }
            other => panic!("expected stage error, got {other:?}"),
        }
    }
}
