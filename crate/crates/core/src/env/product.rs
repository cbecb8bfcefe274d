use std::sync::Arc;

use rand::Rng;

use super::{EnvError, Environment};
use crate::automata::{MooreMachine, StateId, Verdict};
use crate::ltl::Symbol;
use crate::nrm::Grounder;

pub const DEFAULT_TIMEOUT: usize = 75;

/// Which labeling drives the automaton state shown to the agent. Rewards
/// always come from the oracle labeling.
#[derive(Debug, Clone)]
pub enum Labeling {
    Oracle,
    Grounder(Arc<Grounder>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepInfo {
    pub oracle_symbol: Symbol,
    /// Argmax symbol of the grounder, in grounder mode.
    pub grounder_symbol: Option<Symbol>,
    /// Machine state under the oracle labeling.
    pub true_state: StateId,
    /// Machine state the agent sees.
    pub exposed_state: StateId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: Vec<f64>,
    pub reward: Verdict,
    pub done: bool,
    pub info: StepInfo,
}

/// A base environment with a task machine attached.
#[derive(Debug, Clone)]
pub struct ProductEnv<E> {
    env: E,
    machine: Arc<MooreMachine>,
    labeling: Labeling,
    true_state: StateId,
    exposed_state: StateId,
    steps: usize,
    timeout: usize,
    done: bool,
}

impl<E: Environment> ProductEnv<E> {
    pub fn new(env: E, machine: Arc<MooreMachine>, labeling: Labeling, timeout: usize) -> Result<Self, EnvError> {
        if machine.alphabet() != env.alphabet() {
            return Err(EnvError::Config("task alphabet differs from environment alphabet".into()));
        }
        if let Labeling::Grounder(g) = &labeling {
            if g.dim() != env.observation_dim() || g.num_symbols() != env.alphabet().len() {
                return Err(EnvError::Config(format!(
                    "grounder is {}x{}, environment needs {}x{}",
                    g.dim(),
                    g.num_symbols(),
                    env.observation_dim(),
                    env.alphabet().len()
                )));
            }
        }
        let q0 = machine.initial();
        Ok(Self {
            env,
            machine,
            labeling,
            true_state: q0,
            exposed_state: q0,
            steps: 0,
            timeout,
            done: true,
        })
    }

    pub fn env(&self) -> &E {
        &self.env
    }

    pub fn env_mut(&mut self) -> &mut E {
        &mut self.env
    }

    pub fn machine(&self) -> &Arc<MooreMachine> {
        &self.machine
    }

    pub fn labeling(&self) -> &Labeling {
        &self.labeling
    }

    pub fn set_task(&mut self, machine: Arc<MooreMachine>) {
        assert_eq!(machine.alphabet(), self.env.alphabet(), "task alphabet");
        self.machine = machine;
        self.done = true;
    }

    pub fn set_labeling(&mut self, labeling: Labeling) {
        self.labeling = labeling;
        self.done = true;
    }

    pub fn exposed_state(&self) -> StateId {
        self.exposed_state
    }

    pub fn true_state(&self) -> StateId {
        self.true_state
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Starts an episode. The initial observation's label is not consumed, so
    /// the first reward is the initial state's output.
    pub fn reset<R: Rng + ?Sized>(&mut self, rng: &mut R) -> StepResult {
        self.env.reset(rng);
        let q0 = self.machine.initial();
        self.true_state = q0;
        self.exposed_state = q0;
        self.steps = 0;
        let reward = self.machine.output(q0);
        self.done = reward.is_terminal() || self.timeout == 0;
        let observation = self.env.observation();
        let grounder_symbol = self.ground(&observation);
        StepResult {
            observation,
            reward,
            done: self.done,
            info: StepInfo {
                oracle_symbol: self.env.oracle_label(),
                grounder_symbol,
                true_state: q0,
                exposed_state: q0,
            },
        }
    }

    fn ground(&self, observation: &[f64]) -> Option<Symbol> {
        match &self.labeling {
            Labeling::Oracle => None,
            Labeling::Grounder(g) => Some(Symbol(g.classify(observation) as u16)),
        }
    }

    pub fn step(&mut self, action: usize) -> Result<StepResult, EnvError> {
        if self.done {
            return Err(EnvError::StepAfterDone);
        }
        if action >= self.env.num_actions() {
            return Err(EnvError::InvalidAction(action));
        }
        self.env.step(action);
        self.steps += 1;
        let observation = self.env.observation();
        let oracle_symbol = self.env.oracle_label();
        let grounder_symbol = self.ground(&observation);
        self.true_state = self.machine.next(self.true_state, oracle_symbol);
        self.exposed_state = self.machine.next(self.exposed_state, grounder_symbol.unwrap_or(oracle_symbol));
        let reward = self.machine.output(self.true_state);
        self.done = reward.is_terminal() || self.steps >= self.timeout;
        Ok(StepResult {
            observation,
            reward,
            done: self.done,
            info: StepInfo {
                oracle_symbol,
                grounder_symbol,
                true_state: self.true_state,
                exposed_state: self.exposed_state,
            },
        })
    }

    /// True when the episode ended on a reward rather than the step limit.
    pub fn terminated(&self) -> bool {
        self.machine.output(self.true_state).is_terminal()
    }
}
