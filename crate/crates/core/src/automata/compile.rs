use super::dfa::{dead_states, expand_bounded, Dfa};
use super::machine::{MooreMachine, StateId, Verdict};
use super::minimize::minimize;
use super::AutomataError;
use crate::ltl::{Alphabet, Formula};

pub const DEFAULT_STATE_CAP: usize = 10_000;
pub const DEFAULT_NODE_CAP: usize = 2_000_000;

#[derive(Debug, Clone, Copy)]
pub struct CompileOptions {
    /// Maximum number of progression states before minimization.
    pub state_cap: usize,
    /// Maximum summed size of all progression state formulae.
    pub node_cap: usize,
    pub minimize: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        Self {
            state_cap: DEFAULT_STATE_CAP,
            node_cap: DEFAULT_NODE_CAP,
            minimize: true,
        }
    }
}

/// Compiles a co-safe formula into its reward machine.
pub fn compile(f: &Formula, alphabet: &Alphabet) -> Result<MooreMachine, AutomataError> {
    compile_with(f, alphabet, CompileOptions::default())
}

pub fn compile_with(f: &Formula, alphabet: &Alphabet, opts: CompileOptions) -> Result<MooreMachine, AutomataError> {
    if !f.is_syntactically_cosafe() {
        return Err(AutomataError::NotCoSafe(f.to_string()));
    }
    if let Some(atom) = f.atoms().into_iter().find(|a| alphabet.lookup(a).is_none()) {
        return Err(AutomataError::UnknownAtom(atom.to_string()));
    }
    let expanded = expand_bounded(f, alphabet, opts.state_cap, opts.node_cap)?;
    let machine = from_dfa(alphabet, &expanded.dfa);
    Ok(if opts.minimize { minimize(&machine) } else { machine })
}

/// Attaches outputs to a good-prefix DFA: finals emit `+1`, dead states `-1`,
/// everything else `0`. Final and dead states are made absorbing.
pub fn from_dfa(alphabet: &Alphabet, dfa: &Dfa) -> MooreMachine {
    assert_eq!(alphabet.len(), dfa.num_symbols, "alphabet does not match DFA");
    let dead = dead_states(dfa);
    let p = dfa.num_symbols;
    let mut transitions = dfa.transitions.clone();
    let outputs: Vec<Verdict> = (0..dfa.num_states() as StateId)
        .map(|q| {
            if dfa.finals[q as usize] {
                Verdict::Satisfied
            } else if dead.contains(&q) {
                Verdict::Violated
            } else {
                Verdict::Undecided
            }
        })
        .collect();
    for (q, out) in outputs.iter().enumerate() {
        if out.is_terminal() {
            transitions[q * p..(q + 1) * p].fill(q as StateId);
        }
    }
    MooreMachine::new(alphabet.clone(), dfa.initial, transitions, outputs).expect("DFA table is total")
}
