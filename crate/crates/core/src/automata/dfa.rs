use std::collections::{BTreeSet, HashMap};

use super::machine::{live_states, StateId};
use super::AutomataError;
use crate::ltl::{progress_named, Alphabet, Formula};

/// Complete DFA with a set of final states and no outputs yet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    pub num_symbols: usize,
    pub initial: StateId,
    /// Row-major `transitions[q * num_symbols + p]`.
    pub transitions: Vec<StateId>,
    pub finals: Vec<bool>,
}

impl Dfa {
    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn next(&self, q: StateId, symbol: usize) -> StateId {
        self.transitions[q as usize * self.num_symbols + symbol]
    }
}

/// Non-final states from which no final state is reachable, found by backward
/// reachability from the finals.
pub fn dead_states(dfa: &Dfa) -> BTreeSet<StateId> {
    let live = live_states(&dfa.transitions, dfa.num_symbols, &dfa.finals);
    (0..dfa.num_states() as StateId)
        .filter(|&q| !live[q as usize])
        .collect()
}

/// Good-prefix DFA whose states are the distinct canonical formulae reachable
/// from `f` by progression. Final states are exactly the `true` formula.
/// `false`, when reachable, is kept as an explicit sink so the table is total.
///
/// `states[q]` is the formula of state `q`.
#[derive(Debug, Clone)]
pub struct ProgressionDfa {
    pub dfa: Dfa,
    pub states: Vec<Formula>,
}

pub fn expand(f: &Formula, alphabet: &Alphabet, state_cap: usize) -> Result<ProgressionDfa, AutomataError> {
    expand_bounded(f, alphabet, state_cap, usize::MAX)
}

/// [`expand`] with an additional budget on the summed size of all state
/// formulae. Syntactic canonicalization does not bound formula growth for
/// every co-safe formula (e.g. `(a U c) U F c`), so compilation also stops on
/// this budget.
pub fn expand_bounded(
    f: &Formula,
    alphabet: &Alphabet,
    state_cap: usize,
    node_cap: usize,
) -> Result<ProgressionDfa, AutomataError> {
    let root = f.canonicalize();
    let p = alphabet.len();
    let names: Vec<&str> = alphabet.names().collect();
    let mut index: HashMap<Formula, StateId> = HashMap::new();
    let mut nodes = root.size();
    let mut states = vec![root.clone()];
    index.insert(root, 0);
    let mut transitions: Vec<StateId> = Vec::new();
    let mut next = 0usize;
    while next < states.len() {
        let current = states[next].clone();
        for name in &names {
            let succ = progress_named(&current, name);
            let id = match index.get(&succ) {
                Some(&id) => id,
                None => {
                    if states.len() >= state_cap {
                        return Err(AutomataError::StateCapExceeded {
                            cap: state_cap,
                            formula: f.to_string(),
                        });
                    }
                    nodes = nodes.saturating_add(succ.size());
                    if nodes > node_cap {
                        return Err(AutomataError::NodeCapExceeded {
                            cap: node_cap,
                            formula: f.to_string(),
                        });
                    }
                    let id = states.len() as StateId;
                    index.insert(succ.clone(), id);
                    states.push(succ);
                    id
                }
            };
            transitions.push(id);
        }
        next += 1;
    }
    debug_assert_eq!(transitions.len(), states.len() * p);
    let finals = states.iter().map(Formula::is_true).collect();
    Ok(ProgressionDfa {
        dfa: Dfa {
            num_symbols: p,
            initial: 0,
            transitions,
            finals,
        },
        states,
    })
}
