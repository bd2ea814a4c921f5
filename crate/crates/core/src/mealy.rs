//! Finite invertible Mealy automata and their text format.
//!
//! An automaton is given by a transition table `state × letter → state` and an
//! output table `state × letter → letter`. Every output row must be a
//! permutation of the alphabet, so each state defines an automorphism of the
//! rooted tree of finite words.
//!
//! The text format is line oriented:
//!
//! ```text
//! # comments start with '#'
//! alphabet: 2
//! state a: 0 -> 1 / d ; 1 -> 0 / e
//! state b: 0 -> 0 / a ; 1 -> 1 / c
//! ```
//!
//! Each clause `x -> y / t` reads "on input `x` emit `y` and move to `t`".
//! The reserved name `e` is the identity state. It may be defined explicitly
//! (and must then be the identity) or referenced without a definition, in
//! which case it is appended as the last state.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

/// Index of a state inside an automaton.
pub type StateId = usize;

/// Reserved name of the identity state.
pub const IDENTITY_NAME: &str = "e";

/// Largest number of states an automaton may have. Group words pack a state
/// index and a sign into one byte.
pub const MAX_STATES: usize = 127;

const INVERSE_SUFFIX: &str = "_inv";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("alphabet size must be at least 2, got {0}")]
    AlphabetTooSmall(usize),
    #[error("state '{state}' is not invertible: its output row is not a permutation")]
    NotInvertible { state: String },
    #[error("line {line}: reference to undefined state '{state}'")]
    DanglingState { state: String, line: usize },
    #[error("state '{0}' is defined twice")]
    DuplicateState(String),
    #[error("state '{state}' has no transition for letter {letter}")]
    MissingLetter { state: String, letter: usize },
    #[error("state '{state}' defines letter {letter} more than once")]
    RepeatedLetter { state: String, letter: usize },
    #[error("the reserved state 'e' must fix every letter and loop to itself")]
    BadIdentity,
    #[error("at most {MAX_STATES} states are supported, got {0}")]
    TooManyStates(usize),
    #[error("table shape does not match {states} states over {letters} letters")]
    Shape { states: usize, letters: usize },
    #[error("unknown preset '{0}' (known: paper-Pi, adding-machine, grigorchuk, trivial)")]
    UnknownPreset(String),
}

/// Alphabet `{0, …, q-1}` with `q ≥ 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Alphabet(usize);

impl Alphabet {
    pub fn new(size: usize) -> Result<Self, AutomatonError> {
        if size < 2 {
            return Err(AutomatonError::AlphabetTooSmall(size));
        }
        Ok(Alphabet(size))
    }

    pub fn size(self) -> usize {
        self.0
    }

    pub fn letters(self) -> std::ops::Range<usize> {
        0..self.0
    }
}

/// A finite invertible Mealy automaton. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MealyAutomaton {
    alphabet: Alphabet,
    names: Vec<String>,
    identity: Option<StateId>,
    transition: Vec<Vec<StateId>>,
    output: Vec<Vec<usize>>,
}

/// One arc `source --input|output--> target` of a Moore diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Arc {
    pub source: StateId,
    pub target: StateId,
    pub input: usize,
    pub output: usize,
}

/// The labeled digraph of an automaton: one arc per `(state, letter)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MooreDiagram {
    pub vertices: Vec<String>,
    pub arcs: Vec<Arc>,
}

impl MealyAutomaton {
    /// Builds an automaton from explicit tables and validates it.
    pub fn from_tables(
        alphabet: Alphabet,
        names: Vec<String>,
        identity: Option<StateId>,
        transition: Vec<Vec<StateId>>,
        output: Vec<Vec<usize>>,
    ) -> Result<Self, AutomatonError> {
        let n = names.len();
        let q = alphabet.size();
        if n > MAX_STATES {
            return Err(AutomatonError::TooManyStates(n));
        }
        let shape_ok = transition.len() == n
            && output.len() == n
            && transition.iter().all(|row| row.len() == q && row.iter().all(|&t| t < n))
            && output.iter().all(|row| row.len() == q);
        if !shape_ok || identity.is_some_and(|id| id >= n) {
            return Err(AutomatonError::Shape {
                states: n,
                letters: q,
            });
        }
        let mut seen = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if seen.insert(name.as_str(), i).is_some() {
                return Err(AutomatonError::DuplicateState(name.clone()));
            }
        }
        for (s, row) in output.iter().enumerate() {
            let mut hit = vec![false; q];
            for &y in row {
                if y >= q || hit[y] {
                    return Err(AutomatonError::NotInvertible {
                        state: names[s].clone(),
                    });
                }
                hit[y] = true;
            }
        }
        if let Some(id) = identity {
            let fixes = (0..q).all(|x| output[id][x] == x && transition[id][x] == id);
            if !fixes {
                return Err(AutomatonError::BadIdentity);
            }
        }
        Ok(MealyAutomaton {
            alphabet,
            names,
            identity,
            transition,
            output,
        })
    }

    /// Parses the line-oriented definition format.
    pub fn parse(text: &str) -> Result<Self, AutomatonError> {
        parse_definition(text)
    }

    /// Looks up a built-in automaton by name.
    pub fn preset(name: &str) -> Result<Self, AutomatonError> {
        let text = match name {
            "paper-Pi" | "pi" => PI_AUTOMATON,
            "adding-machine" => ADDING_MACHINE,
            "grigorchuk" => GRIGORCHUK,
            "trivial" => TRIVIAL,
            other => return Err(AutomatonError::UnknownPreset(other.to_string())),
        };
        Self::parse(text)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.names[s]
    }

    pub fn state_names(&self) -> &[String] {
        &self.names
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn identity_state(&self) -> Option<StateId> {
        self.identity
    }

    pub fn is_identity_state(&self, s: StateId) -> bool {
        self.identity == Some(s)
    }

    /// Non-identity states, in definition order. These generate the group.
    pub fn generators(&self) -> Vec<StateId> {
        (0..self.num_states())
            .filter(|&s| !self.is_identity_state(s))
            .collect()
    }

    pub fn transition(&self, s: StateId, x: usize) -> StateId {
        self.transition[s][x]
    }

    pub fn output(&self, s: StateId, x: usize) -> usize {
        self.output[s][x]
    }

    /// Inverse of the output permutation of `s`.
    pub fn inverse_output(&self, s: StateId) -> Vec<usize> {
        let mut inv = vec![0; self.alphabet.size()];
        for (x, &y) in self.output[s].iter().enumerate() {
            inv[y] = x;
        }
        inv
    }

    /// The automaton whose states act as the inverses of the states of `self`.
    ///
    /// State `s` becomes `s_inv` (and `s_inv` becomes `s` again), so inverting
    /// twice gives back identical tables and names.
    pub fn invert(&self) -> MealyAutomaton {
        let q = self.alphabet.size();
        let names = self
            .names
            .iter()
            .enumerate()
            .map(|(s, name)| {
                if self.is_identity_state(s) {
                    name.clone()
                } else if let Some(base) = name.strip_suffix(INVERSE_SUFFIX) {
                    base.to_string()
                } else {
                    format!("{name}{INVERSE_SUFFIX}")
                }
            })
            .collect();
        let mut transition = vec![vec![0; q]; self.num_states()];
        let mut output = vec![vec![0; q]; self.num_states()];
        for s in 0..self.num_states() {
            for x in 0..q {
                let y = self.output[s][x];
                output[s][y] = x;
                transition[s][y] = self.transition[s][x];
            }
        }
        MealyAutomaton {
            alphabet: self.alphabet,
            names,
            identity: self.identity,
            transition,
            output,
        }
    }

    /// Arcs ordered by state, then by input letter.
    pub fn moore_diagram(&self) -> MooreDiagram {
        let mut arcs = Vec::with_capacity(self.num_states() * self.alphabet.size());
        for s in 0..self.num_states() {
            for x in self.alphabet.letters() {
                arcs.push(Arc {
                    source: s,
                    target: self.transition[s][x],
                    input: x,
                    output: self.output[s][x],
                });
            }
        }
        MooreDiagram {
            vertices: self.names.clone(),
            arcs,
        }
    }

    /// Renders the automaton in the definition format accepted by [`MealyAutomaton::parse`].
    pub fn render(&self) -> String {
        let mut out = format!("alphabet: {}\n", self.alphabet.size());
        for s in 0..self.num_states() {
            let clauses: Vec<String> = self
                .alphabet
                .letters()
                .map(|x| {
                    format!(
                        "{} -> {} / {}",
                        x,
                        self.output[s][x],
                        self.names[self.transition[s][x]]
                    )
                })
                .collect();
            out.push_str(&format!("state {}: {}\n", self.names[s], clauses.join(" ; ")));
        }
        out
    }
}

impl FromStr for MealyAutomaton {
    type Err = AutomatonError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl fmt::Display for MealyAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

pub const PI_AUTOMATON: &str = "\
# a = σ(d, 1), b = (a, c), c = (a, a), d = (1, b)
alphabet: 2
state e: 0 -> 0 / e ; 1 -> 1 / e
state a: 0 -> 1 / d ; 1 -> 0 / e
state b: 0 -> 0 / a ; 1 -> 1 / c
state c: 0 -> 0 / a ; 1 -> 1 / a
state d: 0 -> 0 / e ; 1 -> 1 / b
";

pub const ADDING_MACHINE: &str = "\
# a = σ(1, a)
alphabet: 2
state e: 0 -> 0 / e ; 1 -> 1 / e
state a: 0 -> 1 / e ; 1 -> 0 / a
";

pub const GRIGORCHUK: &str = "\
# a = σ, b = (a, c), c = (a, d), d = (1, b)
alphabet: 2
state e: 0 -> 0 / e ; 1 -> 1 / e
state a: 0 -> 1 / e ; 1 -> 0 / e
state b: 0 -> 0 / a ; 1 -> 1 / c
state c: 0 -> 0 / a ; 1 -> 1 / d
state d: 0 -> 0 / e ; 1 -> 1 / b
";

pub const TRIVIAL: &str = "\
alphabet: 2
state e: 0 -> 0 / e ; 1 -> 1 / e
";

struct RawState {
    name: String,
    line: usize,
    clauses: Vec<(usize, usize, String, usize)>,
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> AutomatonError {
    AutomatonError::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Column (1-based) of `needle` inside `line`, given that `needle` is a subslice of it.
fn column_of(line: &str, needle: &str) -> usize {
    needle.as_ptr() as usize - line.as_ptr() as usize + 1
}

fn parse_definition(text: &str) -> Result<MealyAutomaton, AutomatonError> {
    let mut alphabet: Option<Alphabet> = None;
    let mut raw: Vec<RawState> = Vec::new();

    for (idx, full_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match full_line.find('#') {
            Some(p) => &full_line[..p],
            None => full_line,
        };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("alphabet:") {
            if alphabet.is_some() {
                return Err(parse_error(line_no, 1, "alphabet declared twice"));
            }
            let value = rest.trim();
            let q: usize = value.parse().map_err(|_| {
                parse_error(
                    line_no,
                    column_of(full_line, value),
                    format!("expected alphabet size, found '{value}'"),
                )
            })?;
            alphabet = Some(Alphabet::new(q)?);
            continue;
        }
        let Some(rest) = trimmed.strip_prefix("state") else {
            return Err(parse_error(
                line_no,
                column_of(full_line, trimmed),
                "expected 'alphabet:' or 'state'",
            ));
        };
        let Some(q) = alphabet else {
            return Err(parse_error(line_no, 1, "'alphabet:' must come before states"));
        };
        let Some((name_part, body)) = rest.split_once(':') else {
            return Err(parse_error(
                line_no,
                column_of(full_line, rest),
                "expected ':' after state name",
            ));
        };
        let name = name_part.trim();
        if !is_identifier(name) {
            return Err(parse_error(
                line_no,
                column_of(full_line, name_part),
                format!("invalid state name '{name}'"),
            ));
        }
        let mut clauses = Vec::new();
        for clause in body.split(';') {
            let c = clause.trim();
            if c.is_empty() {
                continue;
            }
            let col = column_of(full_line, c);
            let Some((input, rhs)) = c.split_once("->") else {
                return Err(parse_error(line_no, col, "expected '<letter> -> <letter> / <state>'"));
            };
            let Some((out, target)) = rhs.split_once('/') else {
                return Err(parse_error(line_no, col, "expected '/' before target state"));
            };
            let letter = |s: &str| -> Result<usize, AutomatonError> {
                let t = s.trim();
                match t.parse::<usize>() {
                    Ok(v) if v < q.size() => Ok(v),
                    Ok(v) => Err(parse_error(
                        line_no,
                        column_of(full_line, t),
                        format!("letter {v} outside alphabet of size {}", q.size()),
                    )),
                    Err(_) => Err(parse_error(
                        line_no,
                        column_of(full_line, t),
                        format!("expected a letter, found '{t}'"),
                    )),
                }
            };
            let x = letter(input)?;
            let y = letter(out)?;
            let target = target.trim();
            if !is_identifier(target) {
                return Err(parse_error(
                    line_no,
                    column_of(full_line, target),
                    format!("invalid target state '{target}'"),
                ));
            }
            clauses.push((x, y, target.to_string(), col));
        }
        raw.push(RawState {
            name: name.to_string(),
            line: line_no,
            clauses,
        });
    }

    let Some(alphabet) = alphabet else {
        return Err(parse_error(1, 1, "missing 'alphabet:' declaration"));
    };
    let q = alphabet.size();

    let mut names: Vec<String> = Vec::new();
    for r in &raw {
        if names.contains(&r.name) {
            return Err(AutomatonError::DuplicateState(r.name.clone()));
        }
        names.push(r.name.clone());
    }
    let mentions_identity = raw
        .iter()
        .any(|r| r.clauses.iter().any(|c| c.2 == IDENTITY_NAME));
    let implicit_identity = mentions_identity && !names.iter().any(|n| n == IDENTITY_NAME);
    if implicit_identity {
        names.push(IDENTITY_NAME.to_string());
    }
    let index: HashMap<&str, StateId> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();

    let n = names.len();
    let mut transition = vec![vec![usize::MAX; q]; n];
    let mut output = vec![vec![usize::MAX; q]; n];
    for (s, r) in raw.iter().enumerate() {
        for (x, y, target, _) in &r.clauses {
            if transition[s][*x] != usize::MAX {
                return Err(AutomatonError::RepeatedLetter {
                    state: r.name.clone(),
                    letter: *x,
                });
            }
            let t = *index
                .get(target.as_str())
                .ok_or_else(|| AutomatonError::DanglingState {
                    state: target.clone(),
                    line: r.line,
                })?;
            transition[s][*x] = t;
            output[s][*x] = *y;
        }
        if let Some(x) = (0..q).find(|&x| transition[s][x] == usize::MAX) {
            return Err(AutomatonError::MissingLetter {
                state: r.name.clone(),
                letter: x,
            });
        }
    }
    if implicit_identity {
        let id = n - 1;
        transition[id] = vec![id; q];
        output[id] = (0..q).collect();
    }
    let identity = index.get(IDENTITY_NAME).copied();
    MealyAutomaton::from_tables(alphabet, names, identity, transition, output)
}
