//! Neural reward machines: a probabilistic relaxation of a task's Moore
//! machine, driven by a learned symbol grounder.
//!
//! The machine parameters encode a known task and stay frozen. Only the
//! grounder is trained, by backpropagating the reward cross-entropy through
//! the probabilistic state recursion.

mod forward;
mod grounder;
mod params;
mod train;

pub use forward::{backward, forward, forward_symbols, loss, ForwardPass, LOG_FLOOR};
pub use grounder::{Grounder, GROUNDER_MAGIC};
pub use params::{Nrm, NrmParams, DEFAULT_MAGNITUDE, DEFAULT_TAU};
pub use train::{
    is_informative, mean_loss, train_grounder, training_log_csv, write_training_log, BufferConfig, Episode,
    GrounderTrainer, LabeledObservations, ReplayBuffers, RoundLog, Split, TrainReport, TrainerConfig,
    TRAINING_LOG_HEADER,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NrmError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("train buffer is empty")]
    EmptyTrainBuffer,
    #[error("episode refers to unknown task {0}")]
    UnknownTask(usize),
    #[error("bad grounder checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Numerically stable softmax.
pub(crate) fn softmax_in_place(v: &mut [f64]) {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for x in v.iter_mut() {
        *x = (*x - max).exp();
        sum += *x;
    }
    v.iter_mut().for_each(|x| *x /= sum);
}
