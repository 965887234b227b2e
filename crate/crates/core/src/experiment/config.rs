//! Experiment configuration: a TOML file, validated before any run.
//!
//! ```toml
//! kind = "tree-embed"
//! seeds = 100            # or seed_list = [1, 5, 9]
//! bias = "1:1"
//! first = "maker"
//! breakers = ["random", "max_degree"]
//!
//! [tree]
//! shape = "spider"
//! legs = 20
//! leg_len = 3
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::adversary::BREAKER_NAMES;
use crate::error::{Error, Result};
use crate::game::{Bias, Side};
use crate::subgames::{HamPathParams, HamconParams, Mode, ENUMERATION_CAP};
use crate::tree::ThresholdConfig;

pub const OUT_DIR_ENV: &str = "POSITIONAL_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameKind {
    TreeEmbed,
    Matching,
    Hamcon,
    Hampath,
    Box,
    Triangle,
    CustomHypergraph,
}

impl GameKind {
    pub fn label(self) -> &'static str {
        match self {
            GameKind::TreeEmbed => "tree-embed",
            GameKind::Matching => "matching",
            GameKind::Hamcon => "hamcon",
            GameKind::Hampath => "hampath",
            GameKind::Box => "box",
            GameKind::Triangle => "triangle",
            GameKind::CustomHypergraph => "custom-hypergraph",
        }
    }

    pub fn parse_label(s: &str) -> Option<GameKind> {
        [
            GameKind::TreeEmbed,
            GameKind::Matching,
            GameKind::Hamcon,
            GameKind::Hampath,
            GameKind::Box,
            GameKind::Triangle,
            GameKind::CustomHypergraph,
        ]
        .into_iter()
        .find(|k| k.label() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeShape {
    Path,
    Star,
    Spider,
    Caterpillar,
    Broom,
    DoubleStar,
    HTree,
    TwinBar,
    /// Uniform random tree via a Prüfer sequence.
    Random,
    /// Random recursive tree with bounded degree.
    RandomBounded,
    /// Edge list file: `n`, then `n - 1` lines `u v`.
    File,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeSection {
    pub shape: TreeShape,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub legs: Option<usize>,
    #[serde(default)]
    pub leg_len: Option<usize>,
    #[serde(default)]
    pub spine: Option<usize>,
    #[serde(default)]
    pub support: Option<usize>,
    #[serde(default)]
    pub leaves_each: Option<usize>,
    #[serde(default)]
    pub bar_len: Option<usize>,
    #[serde(default)]
    pub max_degree: Option<usize>,
    #[serde(default)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchingSection {
    pub r: usize,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "default_cap")]
    pub cap: u64,
    #[serde(default)]
    pub slack: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamconSection {
    pub k: usize,
    #[serde(default)]
    pub params: HamconParams,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HampathSection {
    pub k: usize,
    #[serde(default)]
    pub params: HamPathParams,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSection {
    pub m: usize,
    /// Integral bias; absent means the continuous game.
    #[serde(default)]
    pub q: Option<usize>,
    pub rounds: usize,
    #[serde(default = "default_box_adversaries")]
    pub adversaries: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangleSection {
    pub n: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypergraphSection {
    pub file: PathBuf,
    #[serde(default = "default_node_cap")]
    pub node_cap: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: GameKind,
    #[serde(default)]
    pub seeds: Option<u64>,
    #[serde(default)]
    pub seed_list: Option<Vec<u64>>,
    #[serde(default = "default_bias")]
    pub bias: String,
    #[serde(default = "default_first")]
    pub first: String,
    #[serde(default)]
    pub move_cap: Option<usize>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_breakers")]
    pub breakers: Vec<String>,
    /// Maker strategies for the triangle and custom-hypergraph kinds.
    #[serde(default)]
    pub makers: Vec<String>,
    #[serde(default)]
    pub tree: Option<TreeSection>,
    #[serde(default)]
    pub thresholds: Option<ThresholdConfig>,
    #[serde(default)]
    pub matching: Option<MatchingSection>,
    #[serde(default)]
    pub hamcon: Option<HamconSection>,
    #[serde(default)]
    pub hampath: Option<HampathSection>,
    #[serde(default, rename = "box")]
    pub boxes: Option<BoxSection>,
    #[serde(default)]
    pub triangle: Option<TriangleSection>,
    #[serde(default)]
    pub hypergraph: Option<HypergraphSection>,
    /// Directory relative paths resolve against (the config file's).
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_cap() -> u64 {
    ENUMERATION_CAP
}
fn default_node_cap() -> u64 {
    5_000_000
}
fn default_bias() -> String {
    "1:1".into()
}
fn default_first() -> String {
    "maker".into()
}
fn default_breakers() -> Vec<String> {
    vec!["random".into()]
}
pub const BOX_ADVERSARIES: &[&str] =
    &["uniform", "single_box", "least_recently_reset", "random", "potential_greedy", "non_max_spreader", "harmonic"];

fn default_box_adversaries() -> Vec<String> {
    BOX_ADVERSARIES.iter().map(|s| s.to_string()).collect()
}

pub const TRIANGLE_MAKERS: &[&str] = &["triangle_greedy", "random", "lowest_free"];
pub const HYPERGRAPH_MAKERS: &[&str] = &["random", "lowest_free", "minimax"];
pub const HYPERGRAPH_BREAKERS: &[&str] = &["random", "lowest_free", "null", "potential", "minimax"];

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<ExperimentConfig> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = ExperimentConfig::from_toml(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.check_files()?;
        Ok(cfg)
    }

    pub fn bias(&self) -> Result<Bias> {
        self.bias.parse().map_err(|e: Error| Error::Config(format!("bias: {e}")))
    }

    pub fn first(&self) -> Result<Side> {
        self.first.parse().map_err(|e: Error| Error::Config(format!("first: {e}")))
    }

    pub fn seed_values(&self) -> Vec<u64> {
        match (&self.seed_list, self.seeds) {
            (Some(list), _) => list.clone(),
            (None, Some(n)) => (0..n).collect(),
            (None, None) => vec![0],
        }
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Output directory: the config's `out_dir`, else the environment
    /// variable, else `positional-out`.
    pub fn output_dir(&self) -> PathBuf {
        match &self.out_dir {
            Some(d) => self.resolve(d),
            None => std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("positional-out")),
        }
    }

    pub fn thresholds(&self) -> ThresholdConfig {
        self.thresholds.clone().unwrap_or_default()
    }

    /// Maker labels for this kind, with defaults filled in.
    pub fn maker_names(&self) -> Vec<String> {
        if !self.makers.is_empty() {
            return self.makers.clone();
        }
        match self.kind {
            GameKind::Triangle => vec!["triangle_greedy".into()],
            GameKind::CustomHypergraph => vec!["minimax".into()],
            other => vec![other.label().into()],
        }
    }

    /// Schema checks beyond what the TOML shape enforces; all problems
    /// are reported together.
    pub fn validate(&self) -> Result<()> {
        let mut problems: Vec<String> = Vec::new();
        if let Err(e) = self.bias() {
            problems.push(e.to_string());
        }
        if let Err(e) = self.first() {
            problems.push(e.to_string());
        }
        if self.seeds.is_some() && self.seed_list.is_some() {
            problems.push("give either `seeds` or `seed_list`, not both".into());
        }
        if self.seeds == Some(0) || self.seed_list.as_ref().is_some_and(|l| l.is_empty()) {
            problems.push("no seeds".into());
        }
        let need = |present: bool, name: &str, problems: &mut Vec<String>| {
            if !present {
                problems.push(format!("kind `{}` needs a [{name}] section", self.kind.label()));
            }
        };
        match self.kind {
            GameKind::TreeEmbed => {
                need(self.tree.is_some(), "tree", &mut problems);
                if let Some(t) = &self.tree {
                    problems.extend(tree_problems(t));
                }
            }
            GameKind::Matching => {
                need(self.matching.is_some(), "matching", &mut problems);
                if self.matching.as_ref().is_some_and(|m| m.r == 0) {
                    problems.push("matching.r must be positive".into());
                }
            }
            GameKind::Hamcon => {
                need(self.hamcon.is_some(), "hamcon", &mut problems);
                if let Some(h) = &self.hamcon {
                    if h.k < h.params.floor {
                        problems.push(format!("hamcon.k = {} is below the floor {}", h.k, h.params.floor));
                    }
                }
            }
            GameKind::Hampath => {
                need(self.hampath.is_some(), "hampath", &mut problems);
                if self.hampath.as_ref().is_some_and(|h| h.k < 2) {
                    problems.push("hampath.k must be at least 2".into());
                }
            }
            GameKind::Box => {
                need(self.boxes.is_some(), "box", &mut problems);
                if let Some(b) = &self.boxes {
                    if b.m == 0 {
                        problems.push("box.m must be positive".into());
                    }
                    if b.q == Some(0) {
                        problems.push("box.q must be positive".into());
                    }
                    for a in &b.adversaries {
                        if crate::boxgame::adversary_by_name(a, 0).is_err() {
                            problems.push(format!("unknown box adversary `{a}`"));
                        }
                    }
                }
            }
            GameKind::Triangle => {
                need(self.triangle.is_some(), "triangle", &mut problems);
                if self.triangle.as_ref().is_some_and(|t| t.n < 3) {
                    problems.push("triangle.n must be at least 3".into());
                }
            }
            GameKind::CustomHypergraph => need(self.hypergraph.is_some(), "hypergraph", &mut problems),
        }
        if self.kind != GameKind::Box {
            let allowed: &[&str] = if self.kind == GameKind::CustomHypergraph { HYPERGRAPH_BREAKERS } else { BREAKER_NAMES };
            for b in &self.breakers {
                if !allowed.contains(&b.as_str()) && b != "max_free_degree" {
                    problems.push(format!("unknown breaker `{b}` (expected one of {allowed:?})"));
                }
            }
            if self.breakers.is_empty() {
                problems.push("no breakers".into());
            }
        }
        let maker_ok: &[&str] = match self.kind {
            GameKind::Triangle => TRIANGLE_MAKERS,
            GameKind::CustomHypergraph => HYPERGRAPH_MAKERS,
            _ => &[],
        };
        for m in &self.makers {
            if !maker_ok.contains(&m.as_str()) {
                problems.push(format!("maker `{m}` is not available for kind `{}`", self.kind.label()));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }

    fn check_files(&self) -> Result<()> {
        let mut files = Vec::new();
        if let Some(TreeSection { shape: TreeShape::File, file: Some(f), .. }) = &self.tree {
            files.push(f);
        }
        if let Some(h) = &self.hypergraph {
            files.push(&h.file);
        }
        for f in files {
            let p = self.resolve(f);
            if !p.is_file() {
                return Err(Error::Config(format!("file not found: {}", p.display())));
            }
        }
        Ok(())
    }
}

fn tree_problems(t: &TreeSection) -> Vec<String> {
    let mut p = Vec::new();
    let mut want = |ok: bool, what: &str| {
        if !ok {
            p.push(format!("tree shape {:?} needs {what}", t.shape));
        }
    };
    match t.shape {
        TreeShape::Path | TreeShape::Star | TreeShape::Random => want(t.n.is_some_and(|n| n >= 2), "n >= 2"),
        TreeShape::RandomBounded => {
            want(t.n.is_some_and(|n| n >= 2), "n >= 2");
            want(t.max_degree.is_some_and(|d| d >= 2), "max_degree >= 2");
        }
        TreeShape::Spider => want(t.legs.is_some() && t.leg_len.is_some(), "legs and leg_len"),
        TreeShape::Caterpillar => want(t.spine.is_some_and(|s| s >= 1), "spine"),
        TreeShape::Broom => want(t.support.is_some() && t.leaves_each.is_some(), "support and leaves_each"),
        TreeShape::DoubleStar => want(t.leaves_each.is_some(), "leaves_each"),
        TreeShape::HTree => want(t.leg_len.is_some(), "leg_len"),
        TreeShape::TwinBar => want(t.bar_len.is_some(), "bar_len"),
        TreeShape::File => want(t.file.is_some(), "file"),
    }
    p
}
