use ltl_ground::env::{Bootcamp, Environment, FlatWorld, GridWorld};
use ltl_ground::ltl::{Alphabet, Symbol};
use rand::Rng;

/// The environment selected by a run configuration.
#[derive(Debug, Clone)]
pub enum AnyEnv {
    Grid(GridWorld),
    Flat(FlatWorld),
    Bootcamp(Bootcamp),
}

macro_rules! each {
    ($self:expr, $e:ident => $body:expr) => {
        match $self {
            AnyEnv::Grid($e) => $body,
            AnyEnv::Flat($e) => $body,
            AnyEnv::Bootcamp($e) => $body,
        }
    };
}

impl Environment for AnyEnv {
    fn name(&self) -> &'static str {
        each!(self, e => e.name())
    }

    fn alphabet(&self) -> &Alphabet {
        each!(self, e => e.alphabet())
    }

    fn num_actions(&self) -> usize {
        each!(self, e => e.num_actions())
    }

    fn observation_dim(&self) -> usize {
        each!(self, e => e.observation_dim())
    }

    fn reset<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        each!(self, e => e.reset(rng))
    }

    fn step(&mut self, action: usize) {
        each!(self, e => e.step(action))
    }

    fn observation(&self) -> Vec<f64> {
        each!(self, e => e.observation())
    }

    fn oracle_label(&self) -> Symbol {
        each!(self, e => e.oracle_label())
    }

    fn state_key(&self) -> Vec<u8> {
        each!(self, e => e.state_key())
    }
}
