use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;

use super::forward::{backward, forward, loss};
use super::grounder::argmax;
use super::{Grounder, Nrm, NrmError};
use crate::automata::Verdict;

/// One reward-labeled episode as seen by the grounder trainer.
#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub id: u64,
    /// Index of the episode's task in the task list handed to the trainer.
    pub task: usize,
    /// Flattened observations `s⁽⁰⁾ … s⁽ᵗ⁾`.
    pub observations: Vec<f64>,
    /// True rewards `r⁽⁰⁾ … r⁽ᵗ⁾` from the oracle labeling.
    pub rewards: Vec<Verdict>,
    pub informative: bool,
}

impl Episode {
    /// `grounder_outputs` are the machine outputs along the grounder-argmax
    /// trace of the same episode.
    pub fn new(id: u64, task: usize, observations: Vec<f64>, rewards: Vec<Verdict>, grounder_outputs: &[Verdict]) -> Self {
        let informative = is_informative(&rewards, grounder_outputs);
        Self {
            id,
            task,
            observations,
            rewards,
            informative,
        }
    }

    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }
}

/// An episode teaches the grounder something if it carries a non-zero reward,
/// or if the grounder's own progression reached a verdict the environment
/// never confirmed.
pub fn is_informative(rewards: &[Verdict], grounder_outputs: &[Verdict]) -> bool {
    rewards.iter().any(|r| r.is_terminal()) || grounder_outputs.iter().any(|v| v.is_terminal())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BufferConfig {
    pub train_capacity: usize,
    pub validation_capacity: usize,
    /// Every `validation_every`-th informative episode goes to validation.
    pub validation_every: u64,
}

impl Default for BufferConfig {
    fn default() -> Self {
        Self {
            train_capacity: 2048,
            validation_capacity: 512,
            validation_every: 5,
        }
    }
}

impl BufferConfig {
    /// Larger buffers for the continuous environment.
    pub fn flatworld() -> Self {
        Self {
            train_capacity: 8192,
            validation_capacity: 2048,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Validation,
}

/// FIFO train and validation buffers holding informative episodes only.
#[derive(Debug, Clone)]
pub struct ReplayBuffers {
    config: BufferConfig,
    train: VecDeque<Episode>,
    validation: VecDeque<Episode>,
    accepted: u64,
    rejected: u64,
}

impl ReplayBuffers {
    pub fn new(config: BufferConfig) -> Self {
        Self {
            config,
            train: VecDeque::new(),
            validation: VecDeque::new(),
            accepted: 0,
            rejected: 0,
        }
    }

    /// Stores an informative episode, evicting the oldest one at capacity.
    /// Uninformative episodes are dropped and `None` is returned.
    pub fn push(&mut self, episode: Episode) -> Option<Split> {
        if !episode.informative {
            self.rejected += 1;
            return None;
        }
        let every = self.config.validation_every.max(1);
        let split = if every > 1 && self.accepted % every == every - 1 {
            Split::Validation
        } else {
            Split::Train
        };
        self.accepted += 1;
        let (buf, cap) = match split {
            Split::Train => (&mut self.train, self.config.train_capacity),
            Split::Validation => (&mut self.validation, self.config.validation_capacity),
        };
        if cap == 0 {
            return None;
        }
        if buf.len() == cap {
            buf.pop_front();
        }
        buf.push_back(episode);
        Some(split)
    }

    pub fn train(&self) -> &VecDeque<Episode> {
        &self.train
    }

    pub fn validation(&self) -> &VecDeque<Episode> {
        &self.validation
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    pub fn rejected(&self) -> u64 {
        self.rejected
    }
}

impl Default for ReplayBuffers {
    fn default() -> Self {
        Self::new(BufferConfig::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainerConfig {
    pub batch_size: usize,
    pub accumulation: usize,
    pub update_steps: usize,
    pub patience: usize,
    pub learning_rate: f64,
    /// Upper bound on rounds for [`train_grounder`].
    pub max_rounds: usize,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        Self {
            batch_size: 16,
            accumulation: 4,
            update_steps: 64,
            patience: 250,
            learning_rate: 1e-3,
            max_rounds: 1000,
        }
    }
}

impl TrainerConfig {
    /// Longer rounds and far more patience for the continuous environment.
    pub fn flatworld() -> Self {
        Self {
            accumulation: 8,
            update_steps: 128,
            patience: 4000,
            ..Self::default()
        }
    }
}

/// Observations with their true symbols, for measuring grounder accuracy.
/// Used for reporting only.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabeledObservations {
    pub dim: usize,
    pub features: Vec<f64>,
    pub labels: Vec<usize>,
}

impl LabeledObservations {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            ..Self::default()
        }
    }

    pub fn push(&mut self, x: &[f64], label: usize) {
        assert_eq!(x.len(), self.dim, "observation dimension");
        self.features.extend_from_slice(x);
        self.labels.push(label);
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Fraction of observations whose argmax symbol matches the label.
    pub fn accuracy(&self, grounder: &Grounder) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let hits = self
            .features
            .chunks(self.dim)
            .zip(&self.labels)
            .filter(|(x, &y)| argmax(&grounder.predict(x)) == y)
            .count();
        hits as f64 / self.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundLog {
    pub round: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub grounder_accuracy: Option<f64>,
}

pub const TRAINING_LOG_HEADER: &str = "round,train_loss,val_loss,grounder_accuracy";

pub fn training_log_csv(rows: &[RoundLog]) -> String {
    let mut out = format!("{TRAINING_LOG_HEADER}\n");
    for r in rows {
        let acc = r.grounder_accuracy.map(|a| a.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{},{}", r.round, r.train_loss, r.val_loss, acc).expect("write to string");
    }
    out
}

pub fn write_training_log(path: &Path, rows: &[RoundLog]) -> Result<(), NrmError> {
    fs::write(path, training_log_csv(rows))?;
    Ok(())
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(n: usize) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    fn step(&mut self, grounder: &mut Grounder, grad: &[f64], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - Self::BETA1.powi(self.t);
        let c2 = 1.0 - Self::BETA2.powi(self.t);
        for (((w, g), m), v) in grounder.params_mut().zip(grad).zip(&mut self.m).zip(&mut self.v) {
            *m = Self::BETA1 * *m + (1.0 - Self::BETA1) * g;
            *v = Self::BETA2 * *v + (1.0 - Self::BETA2) * g * g;
            *w -= lr * (*m / c1) / ((*v / c2).sqrt() + Self::EPS);
        }
    }
}

/// Grounder optimizer with validation-based early stopping. Rounds can be
/// interleaved with episode collection.
pub struct GrounderTrainer {
    config: TrainerConfig,
    grounder: Grounder,
    adam: Adam,
    best: Grounder,
    best_loss: f64,
    stale: usize,
    log: Vec<RoundLog>,
    trained_ids: BTreeSet<u64>,
    validated_ids: BTreeSet<u64>,
}

impl GrounderTrainer {
    pub fn new(grounder: Grounder, config: TrainerConfig) -> Self {
        Self {
            config,
            adam: Adam::new(grounder.num_params()),
            best: grounder.clone(),
            grounder,
            best_loss: f64::INFINITY,
            stale: 0,
            log: Vec::new(),
            trained_ids: BTreeSet::new(),
            validated_ids: BTreeSet::new(),
        }
    }

    /// Latest parameters.
    pub fn current(&self) -> &Grounder {
        &self.grounder
    }

    /// Parameters with the lowest validation loss so far.
    pub fn best(&self) -> &Grounder {
        &self.best
    }

    pub fn log(&self) -> &[RoundLog] {
        &self.log
    }

    pub fn stopped(&self) -> bool {
        self.stale >= self.config.patience
    }

    /// Ids of episodes that contributed gradients.
    pub fn trained_ids(&self) -> &BTreeSet<u64> {
        &self.trained_ids
    }

    /// Ids of episodes whose loss was evaluated for model selection.
    pub fn validated_ids(&self) -> &BTreeSet<u64> {
        &self.validated_ids
    }

    /// One round of `update_steps` Adam steps, each on `batch_size ×
    /// accumulation` episodes drawn uniformly from the train buffer, followed
    /// by a validation pass. With an empty validation buffer the round's train
    /// loss drives model selection.
    pub fn round<R: Rng + ?Sized>(
        &mut self,
        buffers: &ReplayBuffers,
        tasks: &[Nrm],
        rng: &mut R,
        accuracy_set: Option<&LabeledObservations>,
    ) -> Result<RoundLog, NrmError> {
        let train = buffers.train();
        if train.is_empty() {
            return Err(NrmError::EmptyTrainBuffer);
        }
        let per_step = (self.config.batch_size * self.config.accumulation).max(1);
        let mut train_loss = 0.0;
        for _ in 0..self.config.update_steps {
            let picks: Vec<usize> = (0..per_step).map(|_| rng.gen_range(0..train.len())).collect();
            let results = picks
                .par_iter()
                .map(|&i| episode_gradient(&train[i], tasks, &self.grounder))
                .collect::<Result<Vec<_>, _>>()?;
            let mut grad = vec![0.0; self.grounder.num_params()];
            let mut step_loss = 0.0;
            for (&i, (l, g)) in picks.iter().zip(&results) {
                self.trained_ids.insert(train[i].id);
                step_loss += l;
                for (a, b) in grad.iter_mut().zip(g) {
                    *a += b;
                }
            }
            let scale = 1.0 / per_step as f64;
            grad.iter_mut().for_each(|g| *g *= scale);
            self.adam.step(&mut self.grounder, &grad, self.config.learning_rate);
            train_loss += step_loss * scale;
        }
        train_loss /= self.config.update_steps.max(1) as f64;

        let val_loss = if buffers.validation().is_empty() {
            f64::NAN
        } else {
            self.validated_ids.extend(buffers.validation().iter().map(|e| e.id));
            mean_loss(buffers.validation(), tasks, &self.grounder)?
        };
        let selection = if val_loss.is_nan() { train_loss } else { val_loss };
        if selection < self.best_loss {
            self.best_loss = selection;
            self.best = self.grounder.clone();
            self.stale = 0;
        } else {
            self.stale += 1;
        }
        let row = RoundLog {
            round: self.log.len(),
            train_loss,
            val_loss,
            grounder_accuracy: accuracy_set.map(|s| s.accuracy(&self.grounder)),
        };
        self.log.push(row);
        Ok(row)
    }
}

fn episode_gradient(e: &Episode, tasks: &[Nrm], g: &Grounder) -> Result<(f64, Vec<f64>), NrmError> {
    let nrm = tasks.get(e.task).ok_or(NrmError::UnknownTask(e.task))?;
    backward(nrm, g, &e.observations, &e.rewards)
}

/// Mean per-episode loss.
pub fn mean_loss(episodes: &VecDeque<Episode>, tasks: &[Nrm], grounder: &Grounder) -> Result<f64, NrmError> {
    if episodes.is_empty() {
        return Ok(f64::NAN);
    }
    let losses = episodes
        .par_iter()
        .map(|e| {
            let nrm = tasks.get(e.task).ok_or(NrmError::UnknownTask(e.task))?;
            Ok(loss(&forward(nrm, grounder, &e.observations)?.rewards, &e.rewards))
        })
        .collect::<Result<Vec<f64>, NrmError>>()?;
    Ok(losses.iter().sum::<f64>() / losses.len() as f64)
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    /// Best-validation parameters.
    pub grounder: Grounder,
    pub log: Vec<RoundLog>,
    pub stopped_early: bool,
    pub trained_ids: BTreeSet<u64>,
    pub validated_ids: BTreeSet<u64>,
}

/// Trains `grounder` on fixed buffers until early stopping or `max_rounds`.
pub fn train_grounder<R: Rng + ?Sized>(
    buffers: &ReplayBuffers,
    tasks: &[Nrm],
    grounder: Grounder,
    config: TrainerConfig,
    rng: &mut R,
    accuracy_set: Option<&LabeledObservations>,
) -> Result<TrainReport, NrmError> {
    if buffers.train().is_empty() {
        return Err(NrmError::EmptyTrainBuffer);
    }
    let mut trainer = GrounderTrainer::new(grounder, config);
    while trainer.log().len() < config.max_rounds && !trainer.stopped() {
        trainer.round(buffers, tasks, rng, accuracy_set)?;
    }
    Ok(TrainReport {
        grounder: trainer.best().clone(),
        stopped_early: trainer.stopped(),
        log: trainer.log,
        trained_ids: trainer.trained_ids,
        validated_ids: trainer.validated_ids,
    })
}
