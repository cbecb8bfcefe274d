use std::sync::Arc;

use rand::Rng;

use super::qtable::{q_update, QConfig, QTable, StateKey};
use super::AgentError;
use crate::automata::{MachineId, MooreMachine, Verdict};
use crate::env::{Environment, Labeling, ProductEnv, DEFAULT_TIMEOUT};
use crate::ltl::Formula;
use crate::nrm::{
    BufferConfig, Episode, Grounder, GrounderTrainer, LabeledObservations, Nrm, ReplayBuffers, RoundLog, TrainerConfig,
};
use crate::rng;
use crate::tasks::TaskEntry;

/// A task with everything the agent and the grounder trainer need.
#[derive(Debug, Clone)]
pub struct AgentTask {
    pub formula: Formula,
    pub machine: Arc<MooreMachine>,
    /// Residual-machine id of every state.
    pub state_ids: Vec<MachineId>,
    pub nrm: Nrm,
}

impl AgentTask {
    pub fn new(formula: Formula, machine: MooreMachine) -> Self {
        Self {
            formula,
            state_ids: machine.state_ids(),
            nrm: Nrm::from_machine(&machine),
            machine: Arc::new(machine),
        }
    }

    pub fn from_entries(entries: &[TaskEntry]) -> Vec<Self> {
        entries.iter().map(|e| Self::new(e.formula.clone(), e.machine.clone())).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelingMode {
    /// Known labeling function: the upper-bound pipeline.
    Oracle,
    /// Automaton states follow the grounder, trained from the same episodes.
    Grounder,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointConfig {
    pub episodes: usize,
    pub mode: LabelingMode,
    pub timeout: usize,
    pub q: QConfig,
    pub trainer: TrainerConfig,
    pub buffers: BufferConfig,
    /// Episodes collected between grounder updates.
    pub update_every: usize,
    /// Trainer rounds per grounder update.
    pub rounds_per_update: usize,
    pub seed: u64,
}

impl Default for JointConfig {
    fn default() -> Self {
        Self {
            episodes: 5000,
            mode: LabelingMode::Grounder,
            timeout: DEFAULT_TIMEOUT,
            q: QConfig::default(),
            trainer: TrainerConfig::default(),
            buffers: BufferConfig::default(),
            update_every: 100,
            rounds_per_update: 1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeStats {
    pub episode: usize,
    pub task: usize,
    pub steps: usize,
    pub reward: i8,
}

#[derive(Debug, Clone)]
pub struct JointResult {
    pub table: QTable,
    /// Grounder used for acting at the end of training. In oracle mode this
    /// is the untouched initial grounder.
    pub grounder: Grounder,
    pub training_log: Vec<RoundLog>,
    pub episodes: Vec<EpisodeStats>,
    pub informative: u64,
}

pub(crate) fn state_key<E: Environment>(penv: &ProductEnv<E>, task: &AgentTask) -> StateKey {
    StateKey {
        observation: penv.env().state_key(),
        task_state: task.state_ids[penv.exposed_state() as usize],
    }
}

/// Trains a Q-table and (in grounder mode) the grounder from one stream of
/// episodes. Each episode draws a task, acts ε-greedily on the exposed
/// product state, updates the table online and offers the episode to the
/// grounder buffers. Every `update_every` episodes the grounder trainer runs
/// and the best-validation grounder becomes the labeling for later episodes.
pub fn train_joint<E: Environment>(
    env: E,
    tasks: &[AgentTask],
    grounder: Grounder,
    config: &JointConfig,
    accuracy_set: Option<&LabeledObservations>,
) -> Result<JointResult, AgentError> {
    if tasks.is_empty() {
        return Err(AgentError::NoTasks);
    }
    let labeling = |g: &Grounder| match config.mode {
        LabelingMode::Oracle => Labeling::Oracle,
        LabelingMode::Grounder => Labeling::Grounder(Arc::new(g.clone())),
    };
    let mut penv = ProductEnv::new(env, tasks[0].machine.clone(), labeling(&grounder), config.timeout)?;
    let mut table = QTable::new(penv.env().num_actions());
    let nrms: Vec<Nrm> = tasks.iter().map(|t| t.nrm.clone()).collect();
    let mut buffers = ReplayBuffers::new(config.buffers);
    let mut trainer = GrounderTrainer::new(grounder.clone(), config.trainer);
    let mut acting = grounder;
    let mut task_rng = rng::stream(config.seed, "task-choice");
    let mut action_rng = rng::stream(config.seed, "actions");
    let mut trainer_rng = rng::stream(config.seed, "grounder-updates");
    let mut stats = Vec::with_capacity(config.episodes);
    let (alpha, gamma) = (config.q.alpha, config.q.gamma);

    for i in 0..config.episodes {
        let k = task_rng.gen_range(0..tasks.len());
        let task = &tasks[k];
        penv.set_task(task.machine.clone());
        let mut env_rng = rng::substream(config.seed, "episode", i as u64);
        let start = penv.reset(&mut env_rng);
        let epsilon = config.q.epsilon(i, config.episodes);

        let mut observations = start.observation;
        let mut rewards = vec![start.reward];
        let mut exposed = vec![task.machine.output(penv.exposed_state())];
        let mut key = state_key(&penv, task);
        let mut done = start.done;
        while !done {
            let action = table.epsilon_greedy(&key, epsilon, &mut action_rng);
            let step = penv.step(action)?;
            let next = state_key(&penv, task);
            let terminal = step.reward.is_terminal();
            q_update(&mut table, &key, action, step.reward.reward(), (!terminal).then_some(&next), alpha, gamma);
            observations.extend_from_slice(&step.observation);
            rewards.push(step.reward);
            exposed.push(task.machine.output(step.info.exposed_state));
            key = next;
            done = step.done;
        }
        stats.push(EpisodeStats {
            episode: i,
            task: k,
            steps: penv.steps(),
            reward: rewards.last().copied().unwrap_or(Verdict::Undecided).value(),
        });

        if config.mode == LabelingMode::Grounder {
            buffers.push(Episode::new(i as u64, k, observations, rewards, &exposed));
            let due = config.update_every > 0 && (i + 1) % config.update_every == 0;
            if due && !buffers.train().is_empty() && !trainer.stopped() {
                for _ in 0..config.rounds_per_update {
                    trainer.round(&buffers, &nrms, &mut trainer_rng, accuracy_set)?;
                }
                acting = trainer.best().clone();
                penv.set_labeling(labeling(&acting));
            }
        }
    }
    Ok(JointResult {
        table,
        grounder: acting,
        training_log: trainer.log().to_vec(),
        episodes: stats,
        informative: buffers.accepted(),
    })
}
