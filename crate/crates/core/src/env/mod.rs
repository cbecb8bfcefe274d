//! Seedable simulators and the product wrapper that attaches a task.
//!
//! Every environment exposes a feature observation for the grounder, a
//! compact state key for tabular agents and an oracle labeling. The oracle is
//! used for rewards and evaluation only; agents in grounder mode never see it.

mod bootcamp;
mod flat;
mod grid;
mod log;
mod product;

pub use bootcamp::Bootcamp;
pub use flat::{FlatWorld, Zone, KEY_LATTICE, MAX_SPEED, RADIUS_RANGE};
pub use grid::{GridAction, GridConfig, GridLayout, GridWorld, GRID_ACTIONS};
pub use log::{EpisodeLog, LogRow, EPISODE_LOG_COLUMNS};
pub use product::{Labeling, ProductEnv, StepInfo, StepResult, DEFAULT_TIMEOUT};

use rand::Rng;
use thiserror::Error;

use crate::ltl::{Alphabet, Symbol};

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("invalid environment config: {0}")]
    Config(String),
    #[error("step called after the episode ended")]
    StepAfterDone,
    #[error("action {0} out of range")]
    InvalidAction(usize),
    #[error("malformed episode log: {0}")]
    Log(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A single-agent simulator with discrete actions.
pub trait Environment: Clone + Send + Sync {
    fn name(&self) -> &'static str;
    fn alphabet(&self) -> &Alphabet;
    fn num_actions(&self) -> usize;
    fn observation_dim(&self) -> usize;
    /// Starts a new episode, resampling the map unless it is fixed.
    fn reset<R: Rng + ?Sized>(&mut self, rng: &mut R);
    fn step(&mut self, action: usize);
    fn observation(&self) -> Vec<f64>;
    /// The symbol that holds in the current state.
    fn oracle_label(&self) -> Symbol;
    /// Finite key of the current observation for tabular learners.
    fn state_key(&self) -> Vec<u8>;
}
