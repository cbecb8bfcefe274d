//! Tabular multi-task Q-learning on product states.
//!
//! The table is keyed by the environment's observation key and the residual
//! task machine at the exposed automaton state, which makes the product state
//! Markov and lets unseen but structurally equal tasks reuse learned values.

mod collect;
mod eval;
mod qtable;
mod train;

pub use collect::{collect_random_walk, labeled_observations};
pub use eval::{discounted, evaluate, DistributionReport, EvalConfig, EvalReport, METRICS_HEADER};
pub use qtable::{q_update, QConfig, QTable, StateKey};
pub use train::{train_joint, AgentTask, EpisodeStats, JointConfig, JointResult, LabelingMode};

use thiserror::Error;

use crate::env::EnvError;
use crate::nrm::NrmError;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("no tasks to train or evaluate on")]
    NoTasks,
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Nrm(#[from] NrmError),
    #[error("bad Q-table file: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
