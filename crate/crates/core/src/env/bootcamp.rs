use rand::Rng;

use super::Environment;
use crate::ltl::{Alphabet, Symbol};

/// Symbolic environment whose actions are the symbols themselves. The label
/// of the current state is the last chosen symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct Bootcamp {
    alphabet: Alphabet,
    last: Symbol,
}

impl Bootcamp {
    pub fn new(alphabet: Alphabet) -> Self {
        let last = alphabet.empty_symbol();
        Self { alphabet, last }
    }
}

impl Environment for Bootcamp {
    fn name(&self) -> &'static str {
        "bootcamp"
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn num_actions(&self) -> usize {
        self.alphabet.len()
    }

    fn observation_dim(&self) -> usize {
        0
    }

    fn reset<R: Rng + ?Sized>(&mut self, _rng: &mut R) {
        self.last = self.alphabet.empty_symbol();
    }

    fn step(&mut self, action: usize) {
        self.last = Symbol(action as u16);
    }

    fn observation(&self) -> Vec<f64> {
        Vec::new()
    }

    fn oracle_label(&self) -> Symbol {
        self.last
    }

    fn state_key(&self) -> Vec<u8> {
        Vec::new()
    }
}
