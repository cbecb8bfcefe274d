//! Run configuration: every knob of an experiment as `key = value` text.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use ltl_ground::agent::{LabelingMode, QConfig};
use ltl_ground::config::KeyValues;
use ltl_ground::env::{Bootcamp, FlatWorld, GridConfig, GridLayout, GridWorld, DEFAULT_TIMEOUT};
use ltl_ground::nrm::{BufferConfig, TrainerConfig};
use ltl_ground::tasks::{TaskClass, TaskConfig, TASK_CONFIG_KEYS};

use crate::env::AnyEnv;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvProfile {
    /// 7×7 gridworld with five propositions.
    Minecraft,
    /// 5×5 gridworld with three propositions.
    Small,
    Flatworld,
    Bootcamp,
}

impl fmt::Display for EnvProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnvProfile::Minecraft => "minecraft",
            EnvProfile::Small => "small",
            EnvProfile::Flatworld => "flatworld",
            EnvProfile::Bootcamp => "bootcamp",
        })
    }
}

impl FromStr for EnvProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "minecraft" => Ok(EnvProfile::Minecraft),
            "small" => Ok(EnvProfile::Small),
            "flatworld" => Ok(EnvProfile::Flatworld),
            "bootcamp" => Ok(EnvProfile::Bootcamp),
            other => Err(format!("unknown environment `{other}` (minecraft, small, flatworld, bootcamp)")),
        }
    }
}

/// Labeling mode as written in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mode(pub LabelingMode);

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            LabelingMode::Oracle => "oracle",
            LabelingMode::Grounder => "grounder",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oracle" => Ok(Mode(LabelingMode::Oracle)),
            "grounder" => Ok(Mode(LabelingMode::Grounder)),
            other => Err(format!("unknown labeling mode `{other}` (oracle or grounder)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub env: EnvProfile,
    /// Fixed gridworld map, rows separated by `/`. Random maps when absent.
    pub layout: Option<String>,
    pub task: TaskConfig,
    /// Number of training tasks sampled when no dataset is given.
    pub tasks: usize,
    pub dataset: Option<PathBuf>,
    pub mode: LabelingMode,
    pub trainer: TrainerConfig,
    pub buffers: BufferConfig,
    pub update_every: usize,
    pub rounds_per_update: usize,
    pub episodes: usize,
    pub q: QConfig,
    pub timeout: usize,
    pub eval_episodes: usize,
    /// Tasks sampled per evaluation distribution.
    pub eval_tasks: usize,
    pub eval_timeout: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
}

const OWN_KEYS: &[&str] = &[
    "env",
    "layout",
    "tasks",
    "dataset",
    "mode",
    "batch_size",
    "accumulation",
    "update_steps",
    "patience",
    "learning_rate",
    "max_rounds",
    "train_capacity",
    "validation_capacity",
    "validation_every",
    "update_every",
    "rounds_per_update",
    "episodes",
    "alpha",
    "gamma",
    "epsilon_start",
    "epsilon_end",
    "decay_fraction",
    "timeout",
    "eval_episodes",
    "eval_tasks",
    "eval_timeout",
    "seed",
    "out_dir",
];

impl ExperimentConfig {
    /// Every accepted key.
    pub fn keys() -> impl Iterator<Item = &'static str> {
        OWN_KEYS.iter().chain(TASK_CONFIG_KEYS).copied()
    }

    /// Reads a configuration. Missing keys take the defaults of the chosen
    /// environment: grounder hyperparameters follow its profile and the task
    /// alphabet is its proposition set.
    pub fn from_key_values(kv: &KeyValues) -> Result<Self, CliError> {
        let allowed: Vec<&str> = Self::keys().collect();
        kv.reject_unknown(&allowed)?;
        let env: EnvProfile = kv.get_or("env", EnvProfile::Minecraft)?;
        let (trainer, buffers) = match env {
            EnvProfile::Flatworld => (TrainerConfig::flatworld(), BufferConfig::flatworld()),
            _ => (TrainerConfig::default(), BufferConfig::default()),
        };
        // task keys left out fall back to the environment's grammar sizes
        let class: TaskClass = kv.get_or("class", TaskClass::PartiallyOrdered)?;
        let mut task_kv = match (env, class) {
            (EnvProfile::Flatworld, TaskClass::PartiallyOrdered) => TaskConfig::flatworld_po(),
            (EnvProfile::Flatworld, TaskClass::GlobalAvoidance) => TaskConfig::flatworld_ga(),
            (_, TaskClass::PartiallyOrdered) => TaskConfig::minecraft_po(),
            (_, TaskClass::GlobalAvoidance) => TaskConfig::minecraft_ga(),
        }
        .with_alphabet(Self::profile_alphabet(env))
        .to_key_values();
        task_kv.merge(kv);
        let q = QConfig::default();
        let config = Self {
            env,
            layout: kv.get_str("layout").map(str::to_string),
            task: TaskConfig::from_key_values(&task_kv)?,
            tasks: kv.get_or("tasks", 200)?,
            dataset: kv.get_str("dataset").map(PathBuf::from),
            mode: kv.get_or("mode", Mode(LabelingMode::Grounder))?.0,
            trainer: TrainerConfig {
                batch_size: kv.get_or("batch_size", trainer.batch_size)?,
                accumulation: kv.get_or("accumulation", trainer.accumulation)?,
                update_steps: kv.get_or("update_steps", trainer.update_steps)?,
                patience: kv.get_or("patience", trainer.patience)?,
                learning_rate: kv.get_or("learning_rate", trainer.learning_rate)?,
                max_rounds: kv.get_or("max_rounds", trainer.max_rounds)?,
            },
            buffers: BufferConfig {
                train_capacity: kv.get_or("train_capacity", buffers.train_capacity)?,
                validation_capacity: kv.get_or("validation_capacity", buffers.validation_capacity)?,
                validation_every: kv.get_or("validation_every", buffers.validation_every)?,
            },
            update_every: kv.get_or("update_every", 100)?,
            rounds_per_update: kv.get_or("rounds_per_update", 1)?,
            episodes: kv.get_or("episodes", 5000)?,
            q: QConfig {
                alpha: kv.get_or("alpha", q.alpha)?,
                gamma: kv.get_or("gamma", q.gamma)?,
                epsilon_start: kv.get_or("epsilon_start", q.epsilon_start)?,
                epsilon_end: kv.get_or("epsilon_end", q.epsilon_end)?,
                decay_fraction: kv.get_or("decay_fraction", q.decay_fraction)?,
            },
            timeout: kv.get_or("timeout", DEFAULT_TIMEOUT)?,
            eval_episodes: kv.get_or("eval_episodes", 200)?,
            eval_tasks: kv.get_or("eval_tasks", 200)?,
            eval_timeout: kv.get_or("eval_timeout", DEFAULT_TIMEOUT)?,
            seed: kv.get_or("seed", 0)?,
            out_dir: PathBuf::from(kv.get_str("out_dir").unwrap_or("runs")),
        };
        config.task.validate()?;
        if config.task.alphabet != Self::profile_alphabet(env) {
            return Err(CliError::Usage(format!("task alphabet does not match the {env} environment")));
        }
        Ok(config)
    }

    /// Every field, so the text alone reproduces the run.
    pub fn to_key_values(&self) -> KeyValues {
        let mut kv = self.task.to_key_values();
        kv.set("env", self.env);
        if let Some(layout) = &self.layout {
            kv.set("layout", layout);
        }
        kv.set("tasks", self.tasks);
        if let Some(d) = &self.dataset {
            kv.set("dataset", d.display());
        }
        kv.set("mode", Mode(self.mode));
        let t = &self.trainer;
        kv.set("batch_size", t.batch_size);
        kv.set("accumulation", t.accumulation);
        kv.set("update_steps", t.update_steps);
        kv.set("patience", t.patience);
        kv.set("learning_rate", t.learning_rate);
        kv.set("max_rounds", t.max_rounds);
        kv.set("train_capacity", self.buffers.train_capacity);
        kv.set("validation_capacity", self.buffers.validation_capacity);
        kv.set("validation_every", self.buffers.validation_every);
        kv.set("update_every", self.update_every);
        kv.set("rounds_per_update", self.rounds_per_update);
        kv.set("episodes", self.episodes);
        kv.set("alpha", self.q.alpha);
        kv.set("gamma", self.q.gamma);
        kv.set("epsilon_start", self.q.epsilon_start);
        kv.set("epsilon_end", self.q.epsilon_end);
        kv.set("decay_fraction", self.q.decay_fraction);
        kv.set("timeout", self.timeout);
        kv.set("eval_episodes", self.eval_episodes);
        kv.set("eval_tasks", self.eval_tasks);
        kv.set("eval_timeout", self.eval_timeout);
        kv.set("seed", self.seed);
        kv.set("out_dir", self.out_dir.display());
        kv
    }

    fn profile_alphabet(env: EnvProfile) -> ltl_ground::ltl::Alphabet {
        match env {
            EnvProfile::Minecraft | EnvProfile::Bootcamp => TaskConfig::minecraft_alphabet(),
            EnvProfile::Small => GridConfig::small().alphabet,
            EnvProfile::Flatworld => TaskConfig::flatworld_alphabet(),
        }
    }

    pub fn build_env(&self) -> Result<AnyEnv, CliError> {
        let grid = |config: GridConfig| -> Result<AnyEnv, CliError> {
            let config = match &self.layout {
                Some(text) => {
                    let layout = GridLayout::parse(text, &config.alphabet)?;
                    config.with_layout(layout)
                }
                None => config,
            };
            Ok(AnyEnv::Grid(GridWorld::new(config)?))
        };
        if self.layout.is_some() && matches!(self.env, EnvProfile::Flatworld | EnvProfile::Bootcamp) {
            return Err(CliError::Usage(format!("`layout` applies to gridworlds, not {}", self.env)));
        }
        match self.env {
            EnvProfile::Minecraft => grid(GridConfig::minecraft()),
            EnvProfile::Small => grid(GridConfig::small()),
            EnvProfile::Flatworld => Ok(AnyEnv::Flat(FlatWorld::standard())),
            EnvProfile::Bootcamp => Ok(AnyEnv::Bootcamp(Bootcamp::new(TaskConfig::minecraft_alphabet()))),
        }
    }
}
