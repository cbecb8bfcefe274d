//! Task grammars and precompiled task datasets.
//!
//! Partially-ordered tasks conjoin sequences `F(t1 & F(t2 & ...))` whose terms
//! are single propositions or, with some probability, a disjunction of two
//! distinct ones. Global-avoidance tasks conjoin chains
//! `!v U (p1 & (!v U ...))` that share one avoided proposition `v`.

mod dataset;
mod sampler;

pub use dataset::{build_dataset, TaskDataset, TaskEntry, MANIFEST_FILE};
pub use sampler::{
    ga_formula, po_formula, sample, sample_ga, sample_ga_structure, sample_po, sample_po_terms, AvoidanceTask, Term,
};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::automata::AutomataError;
use crate::config::{ConfigError, KeyValues};
use crate::ltl::{Alphabet, LtlError};

#[derive(Debug, Error)]
pub enum TaskError {
    #[error("alphabet has {have} propositions, {class} tasks need at least {need}")]
    AlphabetTooSmall { have: usize, need: usize, class: TaskClass },
    #[error("invalid task config: {0}")]
    InvalidConfig(String),
    #[error("compiling `{formula}`: {source}")]
    Compile {
        formula: String,
        #[source]
        source: AutomataError,
    },
    #[error("machine for `{formula}` disagrees with progression on trace {trace:?}")]
    Verification { formula: String, trace: Vec<String> },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ltl(#[from] LtlError),
    #[error("{path}: {message}")]
    Manifest { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TaskClass {
    PartiallyOrdered,
    GlobalAvoidance,
}

impl fmt::Display for TaskClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TaskClass::PartiallyOrdered => "po",
            TaskClass::GlobalAvoidance => "ga",
        })
    }
}

impl FromStr for TaskClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "po" | "partially_ordered" => Ok(TaskClass::PartiallyOrdered),
            "ga" | "global_avoidance" => Ok(TaskClass::GlobalAvoidance),
            other => Err(format!("unknown task class `{other}` (expected po or ga)")),
        }
    }
}

/// Parameters of a task grammar. Ranges are inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskConfig {
    pub class: TaskClass,
    pub sequences: (usize, usize),
    pub length: (usize, usize),
    /// Probability that a PO term is a two-way disjunction. Ignored for GA.
    pub disjunction_prob: f64,
    pub alphabet: Alphabet,
}

pub const TASK_CONFIG_KEYS: &[&str] = &[
    "class",
    "sequences_min",
    "sequences_max",
    "length_min",
    "length_max",
    "disjunction_prob",
    "alphabet",
];

impl TaskConfig {
    pub fn minecraft_alphabet() -> Alphabet {
        Alphabet::new(["pick", "lava", "door", "apple", "egg"]).expect("static alphabet")
    }

    pub fn flatworld_alphabet() -> Alphabet {
        Alphabet::new(["red", "green", "blue", "yellow"]).expect("static alphabet")
    }

    pub fn minecraft_po() -> Self {
        Self {
            class: TaskClass::PartiallyOrdered,
            sequences: (1, 4),
            length: (1, 5),
            disjunction_prob: 0.25,
            alphabet: Self::minecraft_alphabet(),
        }
    }

    pub fn minecraft_ga() -> Self {
        Self {
            class: TaskClass::GlobalAvoidance,
            sequences: (1, 2),
            length: (1, 3),
            disjunction_prob: 0.0,
            alphabet: Self::minecraft_alphabet(),
        }
    }

    pub fn flatworld_po() -> Self {
        Self {
            class: TaskClass::PartiallyOrdered,
            sequences: (1, 1),
            length: (1, 3),
            disjunction_prob: 0.25,
            alphabet: Self::flatworld_alphabet(),
        }
    }

    pub fn flatworld_ga() -> Self {
        Self {
            class: TaskClass::GlobalAvoidance,
            sequences: (1, 1),
            length: (1, 2),
            disjunction_prob: 0.0,
            alphabet: Self::flatworld_alphabet(),
        }
    }

    /// Generalization variant: every sequence has exactly `depth` terms.
    pub fn deeper(&self, depth: usize) -> Self {
        self.clone().with_length(depth, depth)
    }

    /// Generalization variant: exactly `count` conjoined sequences.
    pub fn wider(&self, count: usize) -> Self {
        self.clone().with_sequences(count, count)
    }

    /// The `+dep.` and `+conj.` evaluation distributions for this base
    /// distribution, using the fixed sizes of the Minecraft and FlatWorld
    /// set-ups.
    pub fn generalization(&self) -> (Self, Self) {
        let (depth, conj) = match (self.class, self.sequences.1, self.length.1) {
            (TaskClass::PartiallyOrdered, 4, 5) => (15, 12),
            (TaskClass::PartiallyOrdered, 1, 3) => (4, 2),
            (TaskClass::GlobalAvoidance, 2, 3) => (5, 3),
            (TaskClass::GlobalAvoidance, 1, 2) => (3, 2),
            // Other distributions: one step beyond the training maxima.
            (_, s, l) => (l + 1, s + 1),
        };
        (self.deeper(depth), self.wider(conj))
    }

    pub fn with_sequences(mut self, min: usize, max: usize) -> Self {
        self.sequences = (min, max);
        self
    }

    pub fn with_length(mut self, min: usize, max: usize) -> Self {
        self.length = (min, max);
        self
    }

    pub fn with_disjunction_prob(mut self, p: f64) -> Self {
        self.disjunction_prob = p;
        self
    }

    pub fn with_alphabet(mut self, alphabet: Alphabet) -> Self {
        self.alphabet = alphabet;
        self
    }

    pub fn validate(&self) -> Result<(), TaskError> {
        let (smin, smax) = self.sequences;
        let (lmin, lmax) = self.length;
        if smin == 0 || smin > smax {
            return Err(TaskError::InvalidConfig(format!("bad sequences range {smin}..={smax}")));
        }
        if lmin == 0 || lmin > lmax {
            return Err(TaskError::InvalidConfig(format!("bad length range {lmin}..={lmax}")));
        }
        if !(0.0..=1.0).contains(&self.disjunction_prob) {
            return Err(TaskError::InvalidConfig(format!(
                "disjunction probability {} outside [0, 1]",
                self.disjunction_prob
            )));
        }
        let have = self.alphabet.propositions().count();
        let need = match self.class {
            TaskClass::GlobalAvoidance => 2,
            TaskClass::PartiallyOrdered if self.disjunction_prob > 0.0 => 2,
            TaskClass::PartiallyOrdered => 1,
        };
        if have < need {
            return Err(TaskError::AlphabetTooSmall {
                have,
                need,
                class: self.class,
            });
        }
        Ok(())
    }

    pub fn to_key_values(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        kv.set("class", self.class);
        kv.set("sequences_min", self.sequences.0);
        kv.set("sequences_max", self.sequences.1);
        kv.set("length_min", self.length.0);
        kv.set("length_max", self.length.1);
        kv.set("disjunction_prob", self.disjunction_prob);
        let props: Vec<&str> = self
            .alphabet
            .propositions()
            .map(|s| self.alphabet.name(s))
            .collect();
        kv.set("alphabet", props.join(","));
        kv
    }

    /// Reads the task keys of `kv`; missing keys fall back to the Minecraft
    /// defaults of the selected class.
    pub fn from_key_values(kv: &KeyValues) -> Result<Self, TaskError> {
        let class: TaskClass = kv.get_or("class", TaskClass::PartiallyOrdered)?;
        let base = match class {
            TaskClass::PartiallyOrdered => Self::minecraft_po(),
            TaskClass::GlobalAvoidance => Self::minecraft_ga(),
        };
        let alphabet = match kv.get_str("alphabet") {
            Some(list) => Alphabet::parse_list(list)?,
            None => base.alphabet.clone(),
        };
        let cfg = Self {
            class,
            sequences: (
                kv.get_or("sequences_min", base.sequences.0)?,
                kv.get_or("sequences_max", base.sequences.1)?,
            ),
            length: (
                kv.get_or("length_min", base.length.0)?,
                kv.get_or("length_max", base.length.1)?,
            ),
            disjunction_prob: kv.get_or("disjunction_prob", base.disjunction_prob)?,
            alphabet,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
