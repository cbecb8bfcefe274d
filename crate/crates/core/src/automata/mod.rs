//! Reward machines compiled from co-safe formulae.
//!
//! States of the intermediate DFA are the canonical formulae reachable by
//! progression; `true` is the single final state. Dead states (non-final,
//! unable to reach a final state) recognize bad prefixes and emit `-1`. The
//! result is minimized with Hopcroft's algorithm.

mod compile;
mod dfa;
mod io;
mod machine;
mod minimize;
mod verify;

pub use compile::{compile, compile_with, from_dfa, CompileOptions, DEFAULT_NODE_CAP, DEFAULT_STATE_CAP};
pub use dfa::{dead_states, expand, expand_bounded, Dfa, ProgressionDfa};
pub use io::{deserialize, serialize, to_dot, MACHINE_MAGIC, MACHINE_VERSION};
pub use machine::{MachineId, MooreMachine, StateId, TraceRun, Verdict};
pub use minimize::minimize;
pub use verify::{verify_against_progression, Disagreement};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomataError {
    #[error("formula is not syntactically co-safe: {0}")]
    NotCoSafe(String),
    #[error("atom `{0}` is not in the alphabet")]
    UnknownAtom(String),
    #[error("more than {cap} progression states while compiling {formula}")]
    StateCapExceeded { cap: usize, formula: String },
    #[error("progression states exceed {cap} formula nodes while compiling {formula}")]
    NodeCapExceeded { cap: usize, formula: String },
    #[error("malformed machine file at byte {offset}: {message}")]
    Malformed { offset: usize, message: String },
    #[error("invalid machine: {0}")]
    Invalid(String),
}
