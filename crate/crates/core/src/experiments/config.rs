use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::understudy::{Strategy, TrainConfig};
use crate::{Error, Result};

/// Serialised by display name (`BN`, `NN+REG`, ...); parsing also accepts
/// the lowercase CLI spelling (`bn`, `nn-reg`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ModelKind {
    Bn,
    Nn,
    NnReg,
    NnCor,
}

impl From<ModelKind> for String {
    fn from(m: ModelKind) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for ModelKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Bn, ModelKind::Nn, ModelKind::NnReg, ModelKind::NnCor];

    /// Training strategy of the neural variants; `None` for the BN.
    pub fn strategy(self) -> Option<Strategy> {
        match self {
            ModelKind::Bn => None,
            ModelKind::Nn => Some(Strategy::Plain),
            ModelKind::NnReg => Some(Strategy::Reg),
            ModelKind::NnCor => Some(Strategy::Cor),
        }
    }

    pub fn strategy_label(self) -> &'static str {
        match self {
            ModelKind::Bn => "mle-k2",
            ModelKind::Nn => "plain",
            ModelKind::NnReg => "reg",
            ModelKind::NnCor => "cor",
        }
    }

    /// Whether the model consumes the (possibly misspecified) DAG.
    pub fn uses_dag(self) -> bool {
        self != ModelKind::Nn
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Bn => "BN",
            ModelKind::Nn => "NN",
            ModelKind::NnReg => "NN+REG",
            ModelKind::NnCor => "NN+COR",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bn" => Ok(ModelKind::Bn),
            "nn" => Ok(ModelKind::Nn),
            "nn-reg" | "nn+reg" => Ok(ModelKind::NnReg),
            "nn-cor" | "nn+cor" => Ok(ModelKind::NnCor),
            other => Err(Error::invalid(format!("unknown model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DagMode {
    Base,
    Remove,
    Add,
}

impl fmt::Display for DagMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DagMode::Base => "base",
            DagMode::Remove => "remove",
            DagMode::Add => "add",
        })
    }
}

impl FromStr for DagMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "base" => Ok(DagMode::Base),
            "remove" => Ok(DagMode::Remove),
            "add" => Ok(DagMode::Add),
            other => Err(Error::invalid(format!("unknown DAG mode `{other}`"))),
        }
    }
}

/// Misspecified DAGs for the robustness study: `count` distinct single-edge
/// perturbations per mode, drawn with `seed`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DagVariantSpec {
    pub modes: Vec<DagMode>,
    pub count: usize,
    pub seed: u64,
}

impl Default for DagVariantSpec {
    fn default() -> Self {
        DagVariantSpec {
            modes: vec![DagMode::Remove, DagMode::Add],
            count: 5,
            seed: 0,
        }
    }
}

/// Optional overrides of the neural training defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainOverrides {
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub learning_rate: Option<f64>,
    pub alpha: Option<f64>,
    pub reg_batch_size: Option<usize>,
    pub hidden: Option<usize>,
}

impl TrainOverrides {
    pub fn apply(&self, mut c: TrainConfig) -> TrainConfig {
        c.epochs = self.epochs.unwrap_or(c.epochs);
        c.batch_size = self.batch_size.unwrap_or(c.batch_size);
        c.learning_rate = self.learning_rate.unwrap_or(c.learning_rate);
        c.alpha = self.alpha.unwrap_or(c.alpha);
        c.reg_batch_size = self.reg_batch_size.unwrap_or(c.reg_batch_size);
        c.hidden = self.hidden.unwrap_or(c.hidden);
        c
    }
}

fn default_train_sizes() -> Vec<usize> {
    vec![50, 100, 250, 500, 1000, 2500, 5000, 10000]
}

fn default_seeds() -> Vec<u64> {
    (0..10).collect()
}

fn default_sample_queries() -> usize {
    1000
}

fn default_jobs() -> usize {
    1
}

/// Experiment description, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Ground-truth network file; relative paths resolve against the
    /// config file's directory.
    pub network: PathBuf,
    #[serde(default = "default_train_sizes")]
    pub train_sizes: Vec<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "ModelKind::all_vec")]
    pub models: Vec<ModelKind>,
    #[serde(default)]
    pub train: TrainOverrides,
    #[serde(default)]
    pub dag_variants: DagVariantSpec,
    /// Seed of the sample query set.
    #[serde(default)]
    pub query_seed: u64,
    #[serde(default = "default_sample_queries")]
    pub sample_queries: usize,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    /// Write wall-clock seconds into `runtime_s`; off by default so that
    /// reports are a pure function of the config.
    #[serde(default)]
    pub record_runtime: bool,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ModelKind {
    fn all_vec() -> Vec<ModelKind> {
        ModelKind::ALL.to_vec()
    }
}

impl ExperimentConfig {
    pub fn new(network: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            network: network.into(),
            train_sizes: default_train_sizes(),
            seeds: default_seeds(),
            models: ModelKind::all_vec(),
            train: TrainOverrides::default(),
            dag_variants: DagVariantSpec::default(),
            query_seed: 0,
            sample_queries: default_sample_queries(),
            jobs: default_jobs(),
            record_runtime: false,
            output_dir: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read a config file, resolving relative paths against its directory.
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if cfg.network.is_relative() {
            cfg.network = base.join(&cfg.network);
        }
        if let Some(out) = cfg.output_dir.as_mut().filter(|o| o.is_relative()) {
            *out = base.join(&*out);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.train_sizes.is_empty() || self.train_sizes.contains(&0) {
            return Err(Error::invalid("train sizes must be non-empty and at least 1"));
        }
        if self.seeds.is_empty() {
            return Err(Error::invalid("at least one seed is required"));
        }
        if self.models.is_empty() {
            return Err(Error::invalid("at least one model is required"));
        }
        if self.sample_queries == 0 {
            return Err(Error::invalid("sample_queries must be at least 1"));
        }
        if self.jobs == 0 {
            return Err(Error::invalid("jobs must be at least 1"));
        }
        Ok(())
    }

    pub fn train_config(&self) -> TrainConfig {
        self.train.apply(TrainConfig::default())
    }
}
