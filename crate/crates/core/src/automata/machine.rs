use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use sha2::{Digest, Sha256};

use super::AutomataError;
use crate::ltl::{Alphabet, Symbol};

pub type StateId = u32;

/// Three-valued monitor output, read as a reward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Violated,
    Undecided,
    Satisfied,
}

impl Verdict {
    /// Number of reward values.
    pub const COUNT: usize = 3;

    /// Reward indices in the fixed column order `(0, +1, -1)`.
    pub const ORDER: [Verdict; 3] = [Verdict::Undecided, Verdict::Satisfied, Verdict::Violated];

    pub fn value(self) -> i8 {
        match self {
            Verdict::Violated => -1,
            Verdict::Undecided => 0,
            Verdict::Satisfied => 1,
        }
    }

    pub fn reward(self) -> f64 {
        self.value() as f64
    }

    pub fn from_value(v: i8) -> Option<Verdict> {
        match v {
            -1 => Some(Verdict::Violated),
            0 => Some(Verdict::Undecided),
            1 => Some(Verdict::Satisfied),
            _ => None,
        }
    }

    /// Column of this reward in `(0, +1, -1)` order.
    pub fn index(self) -> usize {
        match self {
            Verdict::Undecided => 0,
            Verdict::Satisfied => 1,
            Verdict::Violated => 2,
        }
    }

    pub fn from_index(i: usize) -> Verdict {
        Verdict::ORDER[i]
    }

    pub fn is_terminal(self) -> bool {
        self != Verdict::Undecided
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Violated => write!(f, "-1"),
            Verdict::Undecided => write!(f, "0"),
            Verdict::Satisfied => write!(f, "+1"),
        }
    }
}

/// Structural identity of a machine (or of the residual machine rooted at one
/// of its states): a hash of the canonical BFS-numbered form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct MachineId(pub u64);

impl fmt::Display for MachineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

/// States visited and outputs emitted while reading a trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRun {
    pub states: Vec<StateId>,
    pub outputs: Vec<Verdict>,
    /// Index into `outputs` of the first non-zero output, if any.
    pub terminated_at: Option<usize>,
}

impl TraceRun {
    pub fn last_output(&self) -> Verdict {
        *self.outputs.last().expect("a run always holds the initial output")
    }
}

/// Deterministic Moore machine with outputs in `{+1, 0, -1}`.
///
/// Transitions are stored row-major, `transitions[q * |P| + p]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MooreMachine {
    alphabet: Alphabet,
    initial: StateId,
    transitions: Vec<StateId>,
    outputs: Vec<Verdict>,
}

impl MooreMachine {
    /// Builds a machine after checking that the table is total and in range.
    pub fn new(
        alphabet: Alphabet,
        initial: StateId,
        transitions: Vec<StateId>,
        outputs: Vec<Verdict>,
    ) -> Result<Self, AutomataError> {
        let n = outputs.len();
        if n == 0 {
            return Err(AutomataError::Invalid("machine has no states".into()));
        }
        if transitions.len() != n * alphabet.len() {
            return Err(AutomataError::Invalid(format!(
                "transition table has {} entries, expected {}",
                transitions.len(),
                n * alphabet.len()
            )));
        }
        if initial as usize >= n {
            return Err(AutomataError::Invalid(format!("initial state {initial} out of range")));
        }
        if let Some(t) = transitions.iter().find(|&&t| t as usize >= n) {
            return Err(AutomataError::Invalid(format!("transition target {t} out of range")));
        }
        Ok(Self {
            alphabet,
            initial,
            transitions,
            outputs,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.outputs.len()
    }

    pub fn num_symbols(&self) -> usize {
        self.alphabet.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn transitions(&self) -> &[StateId] {
        &self.transitions
    }

    pub fn outputs(&self) -> &[Verdict] {
        &self.outputs
    }

    #[inline]
    pub fn next(&self, state: StateId, symbol: Symbol) -> StateId {
        self.transitions[state as usize * self.alphabet.len() + symbol.index()]
    }

    #[inline]
    pub fn output(&self, state: StateId) -> Verdict {
        self.outputs[state as usize]
    }

    pub fn finals(&self) -> BTreeSet<StateId> {
        self.states_with(Verdict::Satisfied)
    }

    pub fn deads(&self) -> BTreeSet<StateId> {
        self.states_with(Verdict::Violated)
    }

    fn states_with(&self, v: Verdict) -> BTreeSet<StateId> {
        (0..self.num_states() as StateId)
            .filter(|&q| self.output(q) == v)
            .collect()
    }

    /// Reads `trace` from the initial state, stopping after the first
    /// non-zero output.
    pub fn run(&self, trace: &[Symbol]) -> TraceRun {
        self.run_from(self.initial, trace)
    }

    pub fn run_from(&self, start: StateId, trace: &[Symbol]) -> TraceRun {
        let mut q = start;
        let mut states = vec![q];
        let mut outputs = vec![self.output(q)];
        let mut terminated_at = self.output(q).is_terminal().then_some(0);
        if terminated_at.is_none() {
            for (i, &s) in trace.iter().enumerate() {
                q = self.next(q, s);
                states.push(q);
                outputs.push(self.output(q));
                if self.output(q).is_terminal() {
                    terminated_at = Some(i + 1);
                    break;
                }
            }
        }
        TraceRun {
            states,
            outputs,
            terminated_at,
        }
    }

    /// Reward of a finite trace: `+1` for a good prefix, `-1` for a bad one.
    pub fn reward(&self, trace: &[Symbol]) -> Verdict {
        self.run(trace).last_output()
    }

    /// Checks the structural invariants of a compiled machine: final and dead
    /// states are absorbing, and every undecided state can reach a final one.
    pub fn check_invariants(&self) -> Result<(), AutomataError> {
        let p = self.num_symbols();
        for q in 0..self.num_states() as StateId {
            if self.output(q).is_terminal() {
                for s in self.alphabet.symbols() {
                    if self.next(q, s) != q {
                        return Err(AutomataError::Invalid(format!(
                            "terminal state {q} is not absorbing"
                        )));
                    }
                }
            }
        }
        let finals: Vec<bool> = self.outputs.iter().map(|&o| o == Verdict::Satisfied).collect();
        let live = live_states(&self.transitions, p, &finals);
        for q in 0..self.num_states() {
            if self.outputs[q] == Verdict::Undecided && !live[q] {
                return Err(AutomataError::Invalid(format!(
                    "undecided state {q} cannot reach a final state"
                )));
            }
            if self.outputs[q] == Verdict::Violated && live[q] {
                return Err(AutomataError::Invalid(format!("dead state {q} is live")));
            }
        }
        Ok(())
    }

    /// Renumbers the states reachable from `root` in BFS order, visiting
    /// symbols in alphabet order. Isomorphic machines map to identical values.
    pub fn canonical_from(&self, root: StateId) -> MooreMachine {
        let p = self.num_symbols();
        let mut order = Vec::new();
        let mut index = vec![u32::MAX; self.num_states()];
        let mut queue = VecDeque::from([root]);
        index[root as usize] = 0;
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for s in 0..p {
                let t = self.transitions[q as usize * p + s];
                if index[t as usize] == u32::MAX {
                    index[t as usize] = (order.len() + queue.len()) as u32;
                    queue.push_back(t);
                }
            }
        }
        let mut transitions = Vec::with_capacity(order.len() * p);
        for &q in &order {
            for s in 0..p {
                transitions.push(index[self.transitions[q as usize * p + s] as usize]);
            }
        }
        let outputs = order.iter().map(|&q| self.outputs[q as usize]).collect();
        MooreMachine {
            alphabet: self.alphabet.clone(),
            initial: 0,
            transitions,
            outputs,
        }
    }

    pub fn canonical(&self) -> MooreMachine {
        self.canonical_from(self.initial)
    }

    /// Structural hash of the canonical form.
    pub fn id(&self) -> MachineId {
        self.canonical().digest()
    }

    /// Structural hash of the residual machine rooted at each state. On a
    /// minimal machine two states share an id iff they accept the same
    /// future, across machines as well as within one.
    pub fn state_ids(&self) -> Vec<MachineId> {
        (0..self.num_states() as StateId)
            .map(|q| self.canonical_from(q).digest())
            .collect()
    }

    fn digest(&self) -> MachineId {
        let bytes = super::io::serialize(self);
        let hash = Sha256::digest(&bytes);
        let mut head = [0u8; 8];
        head.copy_from_slice(&hash[..8]);
        MachineId(u64::from_le_bytes(head))
    }
}

impl fmt::Debug for MooreMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MooreMachine {{ alphabet: {:?}, initial: {}", self.alphabet, self.initial)?;
        for q in 0..self.num_states() as StateId {
            write!(f, "  q{q} [{}]:", self.output(q))?;
            for s in self.alphabet.symbols() {
                write!(f, " {}->q{}", self.alphabet.name(s), self.next(q, s))?;
            }
            writeln!(f)?;
        }
        write!(f, "}}")
    }
}

/// States from which some final state is reachable (finals included).
pub(crate) fn live_states(transitions: &[StateId], num_symbols: usize, finals: &[bool]) -> Vec<bool> {
    let n = finals.len();
    let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for q in 0..n {
        for s in 0..num_symbols {
            preds[transitions[q * num_symbols + s] as usize].push(q as StateId);
        }
    }
    let mut live = finals.to_vec();
    let mut stack: Vec<StateId> = (0..n as StateId).filter(|&q| finals[q as usize]).collect();
    while let Some(q) = stack.pop() {
        for &p in &preds[q as usize] {
            if !live[p as usize] {
                live[p as usize] = true;
                stack.push(p);
            }
        }
    }
    live
}
