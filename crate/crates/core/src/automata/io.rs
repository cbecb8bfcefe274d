//! Binary and DOT encodings of [`MooreMachine`].
//!
//! Binary layout, all integers little-endian:
//!
//! ```text
//! "NRMM"  version:u16
//! symbol_count:u32  { name_len:u32 name:utf8 } * symbol_count
//! state_count:u32  initial:u32
//! transitions:u32 * (state_count * symbol_count)   row-major
//! outputs:i8 * state_count                         +1 / 0 / -1
//! ```

use std::fmt::Write as _;

use super::machine::{MooreMachine, StateId, Verdict};
use super::AutomataError;
use crate::ltl::Alphabet;

pub const MACHINE_MAGIC: &[u8; 4] = b"NRMM";
pub const MACHINE_VERSION: u16 = 1;

pub fn serialize(m: &MooreMachine) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MACHINE_MAGIC);
    out.extend_from_slice(&MACHINE_VERSION.to_le_bytes());
    out.extend_from_slice(&(m.num_symbols() as u32).to_le_bytes());
    for name in m.alphabet().names() {
        out.extend_from_slice(&(name.len() as u32).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
    }
    out.extend_from_slice(&(m.num_states() as u32).to_le_bytes());
    out.extend_from_slice(&m.initial().to_le_bytes());
    for &t in m.transitions() {
        out.extend_from_slice(&t.to_le_bytes());
    }
    out.extend(m.outputs().iter().map(|v| v.value() as u8));
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    offset: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8], AutomataError> {
        if self.bytes.len() - self.offset < n {
            return Err(AutomataError::Malformed {
                offset: self.offset,
                message: format!("truncated while reading {what}"),
            });
        }
        let s = &self.bytes[self.offset..self.offset + n];
        self.offset += n;
        Ok(s)
    }

    fn u16(&mut self, what: &str) -> Result<u16, AutomataError> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32, AutomataError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn malformed(&self, at: usize, message: impl Into<String>) -> AutomataError {
        AutomataError::Malformed {
            offset: at,
            message: message.into(),
        }
    }
}

pub fn deserialize(bytes: &[u8]) -> Result<MooreMachine, AutomataError> {
    let mut r = Reader { bytes, offset: 0 };
    if r.take(4, "magic")? != MACHINE_MAGIC {
        return Err(r.malformed(0, "bad magic"));
    }
    let at = r.offset;
    let version = r.u16("version")?;
    if version != MACHINE_VERSION {
        return Err(r.malformed(at, format!("unsupported version {version}")));
    }
    let symbol_count = r.u32("symbol count")? as usize;
    let mut names = Vec::with_capacity(symbol_count.min(1 << 16));
    for _ in 0..symbol_count {
        let len = r.u32("symbol name length")? as usize;
        let at = r.offset;
        let raw = r.take(len, "symbol name")?;
        let name = std::str::from_utf8(raw).map_err(|_| r.malformed(at, "symbol name is not UTF-8"))?;
        names.push(name.to_string());
    }
    let at = r.offset;
    let alphabet = Alphabet::new(&names).map_err(|e| r.malformed(at, e.to_string()))?;
    if alphabet.len() != symbol_count {
        return Err(r.malformed(at, "alphabet is missing the empty symbol"));
    }
    let state_count = r.u32("state count")? as usize;
    let initial = r.u32("initial state")?;
    let cells = state_count
        .checked_mul(symbol_count)
        .ok_or_else(|| r.malformed(r.offset, "transition table size overflows"))?;
    let mut transitions = Vec::with_capacity(cells.min(1 << 24));
    for _ in 0..cells {
        transitions.push(r.u32("transition")? as StateId);
    }
    let mut outputs = Vec::with_capacity(state_count.min(1 << 24));
    for _ in 0..state_count {
        let at = r.offset;
        let b = r.take(1, "output")?[0] as i8;
        outputs.push(Verdict::from_value(b).ok_or_else(|| r.malformed(at, format!("bad output byte {b}")))?);
    }
    if r.offset != bytes.len() {
        return Err(r.malformed(r.offset, "trailing bytes"));
    }
    MooreMachine::new(alphabet, initial, transitions, outputs).map_err(|e| r.malformed(0, e.to_string()))
}

/// Graphviz rendering: one node per state labeled with its output, one edge
/// per (state, symbol) pair.
pub fn to_dot(m: &MooreMachine) -> String {
    let mut s = String::new();
    writeln!(s, "digraph moore {{").unwrap();
    writeln!(s, "  rankdir=LR;").unwrap();
    for q in 0..m.num_states() as StateId {
        let shape = match m.output(q) {
            Verdict::Satisfied => "doublecircle",
            Verdict::Violated => "octagon",
            Verdict::Undecided => "circle",
        };
        let extra = if q == m.initial() { ", penwidth=2" } else { "" };
        writeln!(s, "  q{q} [label=\"q{q} / {}\", shape={shape}{extra}];", m.output(q)).unwrap();
    }
    for q in 0..m.num_states() as StateId {
        for sym in m.alphabet().symbols() {
            writeln!(
                s,
                "  q{q} -> q{} [label=\"{}\"];",
                m.next(q, sym),
                m.alphabet().name(sym)
            )
            .unwrap();
        }
    }
    writeln!(s, "}}").unwrap();
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn machine() -> MooreMachine {
        let al = Alphabet::new(["a", "c"]).unwrap();
        MooreMachine::new(
            al,
            0,
            vec![0, 1, 2, 1, 1, 1, 2, 2, 2],
            vec![Verdict::Undecided, Verdict::Satisfied, Verdict::Violated],
        )
        .unwrap()
    }

    #[test]
    fn round_trip() {
        let m = machine();
        assert_eq!(deserialize(&serialize(&m)).unwrap(), m);
    }

    #[test]
    fn truncated_file_is_an_error() {
        let bytes = serialize(&machine());
        for cut in [0, 3, 5, 10, bytes.len() - 1] {
            assert!(matches!(
                deserialize(&bytes[..cut]),
                Err(AutomataError::Malformed { .. })
            ));
        }
    }

    #[test]
    fn bad_magic_and_output_bytes() {
        let mut bytes = serialize(&machine());
        bytes[0] = b'X';
        assert!(matches!(deserialize(&bytes), Err(AutomataError::Malformed { offset: 0, .. })));
        let mut bytes = serialize(&machine());
        let last = bytes.len() - 1;
        bytes[last] = 7;
        match deserialize(&bytes) {
            Err(AutomataError::Malformed { offset, .. }) => assert_eq!(offset, last),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dot_counts() {
        let m = machine();
        let dot = to_dot(&m);
        let nodes = dot.lines().filter(|l| l.contains("[label=\"q")).count();
        let edges = dot.lines().filter(|l| l.contains("->")).count();
        assert_eq!(nodes, m.num_states());
        assert_eq!(edges, m.num_states() * m.num_symbols());
    }
}
