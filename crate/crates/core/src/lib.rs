//! Co-safe LTL tasks compiled to Moore machines, relaxed into neural reward
//! machines, and used to learn a symbol grounder and a multi-task agent from
//! reward alone.
//!
//! Start with [`ltl`] for formulae, [`automata`] for compilation, [`nrm`] for
//! grounder training and [`agent`] for Q-learning on product states. The
//! guide in `book/` walks through all of them.

pub mod agent;
pub mod automata;
pub mod config;
pub mod env;
pub mod ltl;
pub mod nrm;
pub mod rng;
pub mod tasks;

// Book chapters, compiled and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/formulas.md")]
    mod formulas {}
    #[doc = include_str!("../../../book/src/machines.md")]
    mod machines {}
    #[doc = include_str!("../../../book/src/tasks.md")]
    mod tasks {}
    #[doc = include_str!("../../../book/src/environments.md")]
    mod environments {}
    #[doc = include_str!("../../../book/src/nrm.md")]
    mod nrm {}
    #[doc = include_str!("../../../book/src/agent.md")]
    mod agent {}
    #[doc = include_str!("../../../book/src/reproducibility.md")]
    mod reproducibility {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
