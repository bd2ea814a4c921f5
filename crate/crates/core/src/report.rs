//! Machine-readable verdicts for structural checks.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    UndecidedAtCap,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::UndecidedAtCap => "undecided-at-cap",
        })
    }
}

/// One witness or counterexample line: a word, optionally a vertex, and what was found there.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evidence {
    pub word: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Evidence {
    pub fn word(word: impl Into<String>) -> Self {
        Evidence {
            word: word.into(),
            vertex: None,
            value: None,
            note: None,
        }
    }

    pub fn at(mut self, vertex: impl ToString) -> Self {
        self.vertex = Some(vertex.to_string());
        self
    }

    pub fn value(mut self, value: impl Into<String>) -> Self {
        self.value = Some(value.into());
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub property: String,
    pub verdict: Verdict,
    pub parameters: BTreeMap<String, Value>,
    pub witnesses: Vec<Evidence>,
    pub counterexamples: Vec<Evidence>,
}

impl PropertyReport {
    pub fn new(property: impl Into<String>) -> Self {
        PropertyReport {
            property: property.into(),
            verdict: Verdict::Holds,
            parameters: BTreeMap::new(),
            witnesses: Vec::new(),
            counterexamples: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
