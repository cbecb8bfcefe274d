use std::fmt;
use std::sync::Arc;

use super::LtlError;

/// Name of the reserved symbol emitted when no proposition holds.
pub const EMPTY_SYMBOL: &str = "_empty";

/// Index of a symbol inside an [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub u16);

impl Symbol {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Ordered, fixed set of mutually exclusive symbols.
///
/// Exactly one symbol is observed per step, so every alphabet carries the
/// reserved [`EMPTY_SYMBOL`]. When it is not listed explicitly it is appended
/// after the propositions, which keeps proposition ids equal to their
/// position in the input list.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Arc<[Arc<str>]>,
    empty: Symbol,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self, LtlError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut out: Vec<Arc<str>> = Vec::new();
        for name in names {
            let name = name.as_ref().trim();
            if !is_identifier(name) && name != EMPTY_SYMBOL {
                return Err(LtlError::InvalidSymbolName(name.to_string()));
            }
            if name == "true" || name == "false" {
                return Err(LtlError::InvalidSymbolName(name.to_string()));
            }
            if out.iter().any(|n| &**n == name) {
                return Err(LtlError::DuplicateSymbol(name.to_string()));
            }
            out.push(Arc::from(name));
        }
        if !out.iter().any(|n| &**n == EMPTY_SYMBOL) {
            out.push(Arc::from(EMPTY_SYMBOL));
        }
        if out.len() > u16::MAX as usize {
            return Err(LtlError::AlphabetTooLarge(out.len()));
        }
        let empty = out.iter().position(|n| &**n == EMPTY_SYMBOL).unwrap();
        Ok(Self {
            names: out.into(),
            empty: Symbol(empty as u16),
        })
    }

    /// Parses a comma separated list such as `pick,lava,door`.
    pub fn parse_list(text: &str) -> Result<Self, LtlError> {
        Self::new(text.split(',').map(str::trim).filter(|s| !s.is_empty()))
    }

    /// Total number of symbols, including the empty one.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn empty_symbol(&self) -> Symbol {
        self.empty
    }

    pub fn name(&self, symbol: Symbol) -> &str {
        &self.names[symbol.index()]
    }

    pub(crate) fn shared_name(&self, symbol: Symbol) -> &Arc<str> {
        &self.names[symbol.index()]
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.names
            .iter()
            .position(|n| &**n == name)
            .map(|i| Symbol(i as u16))
    }

    pub fn symbol(&self, name: &str) -> Result<Symbol, LtlError> {
        self.lookup(name)
            .ok_or_else(|| LtlError::UnknownSymbol(name.to_string()))
    }

    pub fn contains(&self, symbol: Symbol) -> bool {
        symbol.index() < self.names.len()
    }

    pub fn symbols(&self) -> impl ExactSizeIterator<Item = Symbol> + '_ {
        (0..self.names.len()).map(|i| Symbol(i as u16))
    }

    /// Every symbol except the reserved empty one.
    pub fn propositions(&self) -> impl Iterator<Item = Symbol> + '_ {
        let empty = self.empty;
        self.symbols().filter(move |&s| s != empty)
    }

    pub fn names(&self) -> impl ExactSizeIterator<Item = &str> + '_ {
        self.names.iter().map(|n| &**n)
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.names().collect();
        write!(f, "{}", names.join(","))
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}
