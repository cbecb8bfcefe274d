//! LTL formulae over a finite alphabet of mutually exclusive symbols.

mod alphabet;
mod formula;
mod parser;
mod progress;

pub use alphabet::{Alphabet, Symbol, EMPTY_SYMBOL};
pub use formula::Formula;
pub use parser::{parse, parse_unchecked};
pub use progress::{progress, progress_named, verdict};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtlError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown identifier `{name}` at byte {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol id {id} out of range for alphabet of size {size}")]
    SymbolOutOfRange { id: u16, size: usize },
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("invalid symbol name `{0}`")]
    InvalidSymbolName(String),
    #[error("alphabet too large ({0} symbols)")]
    AlphabetTooLarge(usize),
}
