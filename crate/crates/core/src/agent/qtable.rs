use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::AgentError;
use crate::automata::MachineId;

/// Product-state key: the environment's observation key and the structural
/// id of the residual task machine at the exposed automaton state. Residual
/// ids coincide exactly when two (task, state) pairs accept the same future,
/// so values transfer between isomorphic tasks.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StateKey {
    pub observation: Vec<u8>,
    pub task_state: MachineId,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    /// Fraction of training episodes over which ε decays linearly.
    pub decay_fraction: f64,
}

impl Default for QConfig {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            gamma: 0.94,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            decay_fraction: 0.5,
        }
    }
}

impl QConfig {
    /// Exploration rate for episode `episode` of `total`.
    pub fn epsilon(&self, episode: usize, total: usize) -> f64 {
        let horizon = self.decay_fraction * total as f64;
        if horizon <= 0.0 {
            return self.epsilon_end;
        }
        let frac = (episode as f64 / horizon).min(1.0);
        self.epsilon_start + (self.epsilon_end - self.epsilon_start) * frac
    }
}

/// Action values over product states. Unseen states read as zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    num_actions: usize,
    #[serde(with = "entries")]
    values: BTreeMap<StateKey, Vec<f64>>,
}

impl QTable {
    pub fn new(num_actions: usize) -> Self {
        Self {
            num_actions,
            values: BTreeMap::new(),
        }
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self, key: &StateKey) -> Vec<f64> {
        self.values.get(key).cloned().unwrap_or_else(|| vec![0.0; self.num_actions])
    }

    pub fn get(&self, key: &StateKey, action: usize) -> f64 {
        self.values.get(key).map_or(0.0, |v| v[action])
    }

    pub fn max_value(&self, key: &StateKey) -> f64 {
        self.values
            .get(key)
            .map_or(0.0, |v| v.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    }

    fn slot(&mut self, key: &StateKey) -> &mut Vec<f64> {
        let n = self.num_actions;
        self.values.entry(key.clone()).or_insert_with(|| vec![0.0; n])
    }

    /// Highest-valued action, ties broken uniformly at random.
    pub fn greedy<R: Rng + ?Sized>(&self, key: &StateKey, rng: &mut R) -> usize {
        let values = self.values(key);
        let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let ties: Vec<usize> = (0..self.num_actions).filter(|&a| values[a] == best).collect();
        ties[rng.gen_range(0..ties.len())]
    }

    pub fn epsilon_greedy<R: Rng + ?Sized>(&self, key: &StateKey, epsilon: f64, rng: &mut R) -> usize {
        if rng.gen::<f64>() < epsilon {
            rng.gen_range(0..self.num_actions)
        } else {
            self.greedy(key, rng)
        }
    }

    pub fn to_json(&self) -> Result<String, AgentError> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, AgentError> {
        let table: QTable = serde_json::from_str(text)?;
        if table.values.values().any(|v| v.len() != table.num_actions) {
            return Err(AgentError::Format("action-value row length differs from action count".into()));
        }
        Ok(table)
    }

    pub fn save(&self, path: &Path) -> Result<(), AgentError> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, AgentError> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

/// One-step Q-learning:
/// `Q(s,a) += α (r + γ max_a' Q(s',a') - Q(s,a))`, with no bootstrap when
/// `next` is `None` (terminal).
pub fn q_update(table: &mut QTable, key: &StateKey, action: usize, reward: f64, next: Option<&StateKey>, alpha: f64, gamma: f64) {
    let bootstrap = next.map_or(0.0, |k| table.max_value(k));
    let q = &mut table.slot(key)[action];
    *q += alpha * (reward + gamma * bootstrap - *q);
}

/// JSON maps need string keys, so entries are stored as a list.
mod entries {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::StateKey;

    #[derive(Serialize, Deserialize)]
    struct Entry {
        key: StateKey,
        values: Vec<f64>,
    }

    pub fn serialize<S: Serializer>(map: &BTreeMap<StateKey, Vec<f64>>, s: S) -> Result<S::Ok, S::Error> {
        let list: Vec<Entry> = map
            .iter()
            .map(|(k, v)| Entry {
                key: k.clone(),
                values: v.clone(),
            })
            .collect();
        list.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<StateKey, Vec<f64>>, D::Error> {
        let list = Vec::<Entry>::deserialize(d)?;
        Ok(list.into_iter().map(|e| (e.key, e.values)).collect())
    }
}
