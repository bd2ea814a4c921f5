//! Published reference data for the Π automaton (`paper-Pi` preset), written in
//! the word-expression grammar of [`crate::expr`]. Used by the fixture checks of
//! the CLI and by the test suites.

use crate::expr::{parse_word, ExprError};
use crate::group::{AutomatonGroup, GroupError};
use crate::mealy::MealyAutomaton;
use crate::report::{Evidence, PropertyReport, Verdict};
use crate::structure::check_portrait_row;
use crate::word::GroupWord;

/// One half of the nucleus; the nucleus is this list, its inverses and the identity.
pub const NUCLEUS_HALF: [&str; 33] = [
    "a", "b", "d", "c", "da", "bd", "cb", "ac", "a^-1b", "d^-1c", "a^-1c", "d^-1a", "b^-1d",
    "c^-1b", "a^2", "a^-1da", "d^-1bd", "b^-1cb", "c^-1ac", "a^-1bd", "d^-1cb", "b^-1ac",
    "c^-1da", "a^-1cb", "d^-1ac", "b^-1da", "c^-1bd", "a^-1d^-1bd", "d^-1b^-1cb",
    "b^-1c^-1ac", "c^-1a^-1da", "a^-1d^-1cb", "d^-1b^-1ac",
];

/// Vertices at which nucleus elements restrict to the identity.
pub const TRIVIAL_RESTRICTIONS: [(&str, &str); 17] = [
    ("a", "1"),
    ("d", "0"),
    ("b", "01"),
    ("c", "11"),
    ("c^-1a^-1bd", "000"),
    ("b^-1c^-1da", "110"),
    ("d^-1b^-1ac", "000"),
    ("a^-1d^-1cb", "111"),
    ("a^-1d^-1ac", "111"),
    ("c^-1a^-1cb", "010"),
    ("b^-1c^-1bd", "000"),
    ("d^-1b^-1da", "000"),
    ("c^-1a^-1da", "001"),
    ("b^-1c^-1ac", "110"),
    ("d^-1b^-1cb", "110"),
    ("a^-1d^-1bd", "000"),
    ("d^-1b^-1c", "000"),
];

/// Listed normal generators of the first three level stabilizers, signs expanded.
pub const LEVEL_STABILIZERS: [(usize, &[&str]); 3] = [
    (
        1,
        &["b", "c", "d", "a^2", "aca", "ac^-1a", "aba", "ab^-1a", "ada", "ad^-1a"],
    ),
    (
        2,
        &[
            "d", "a^2", "b^2", "c^2", "ada", "ad^-1a", "bdb", "bd^-1b", "cdc", "cd^-1c", "ab^2a",
            "ab^-2a", "cb^2c", "cb^-2c", "ba^2b", "ba^-2b", "ca^2c", "ca^-2c", "ad^2a", "ad^-2a",
            "cd^2c", "cd^-2c", "bc^2b", "bc^-2b", "bd^2b", "bd^-2b", "[a,c]", "[a,c^-1]", "[a,d]",
            "[a,d^-1]", "[b,c]", "[b,c^-1]", "[b,d]", "[b,d^-1]", "[c,d]", "[c,d^-1]",
        ],
    ),
    (
        3,
        &[
            "a^2", "b^2", "c^2", "d^2", "(ac)^2", "(ac^-1)^2", "(bc)^2", "(bc^-1)^2", "(bd)^2",
            "(bd^-1)^2", "[a,c]", "[a,c^-1]", "[b,c]", "[b,c^-1]", "[b,d]", "[b,d^-1]",
        ],
    ),
];

/// Listed normal generators of rigid vertex stabilizers, signs expanded.
pub const RIGID_STABILIZERS: [(&str, &[&str]); 6] = [
    ("0", &["d^a", "d^(a^-1)"]),
    (
        "1",
        &[
            "d", "c^-1b", "cb^-1", "bdc^-1", "bc^-1d", "dc^-1b", "c^-1db", "cb^-1d^-1",
            "bd^-1b^-1", "b^-1d^-1c", "cdb^-1", "c^-1d^-1b",
        ],
    ),
    ("00", &["[ac,ac^-1]", "[ac,c^2]", "[ac^-1,c^2]"]),
    (
        "01",
        &["[a,c^2]", "[a^2,da]", "[ad,a^-1d]", "[ca,c^2]", "[ca,a^-1c]"],
    ),
    (
        "10",
        &[
            "[b,c]", "[b,bc]", "[b,cb]", "[b,dc]", "[b,b^-1c]", "[c,b^2]", "[c,cb]", "[b^2,bc]",
            "[b^2,cb]", "[b^2,dc]", "[b^2,b^-1c]", "[c^2,a^-1c]",
        ],
    ),
    (
        "11",
        &[
            "[b,d]", "[b,bd]", "[b,bc^-1]", "[b,bd^-1]", "[b,db]", "[b,d^2]", "[b,b^-1d]",
            "[b,c^-1d]", "[c,bc]", "[c,bc^-1]", "[c,b^-1c]", "[d,a^2]", "[d,b^2]", "[d,bd]",
            "[d,bd^-1]", "[d,db]", "[d,b^-1d]", "[a^2,ad]", "[a^2,ad^-1]", "[a^2,d^2]",
            "[a^2,a^-1d]", "[ad^-1,da]", "[b^2,bd]", "[b^2,bc^-1]", "[b^2,bd^-1]", "[b^2,db]",
            "[b^2,d^2]", "[b^2,b^-1d]", "[b^2,c^-1d]", "[bc,b^-1c]", "[bd,bd^-1]", "[bd,db]",
            "[bd,d^2]", "[bd,b^-1d]", "[bc^-1,cb]", "[bd^-1,c^2]", "[bd^-1,db]", "[bd^-1,d^2]",
            "[bd^-1,b^-1d]", "[c^2,b^-1d]", "[db,d^2]", "[db,b^-1d]", "[d^2,b^-1d]",
        ],
    ),
];

/// Stated equalities between words.
pub const IDENTITIES: [(&str, &str); 2] = [
    ("[ac,ac^-1]", "[a,c^-1]^c [c,a]^(c^-1)"),
    ("[ac,c^2]", "[a,c^2]^c"),
];

const PORTRAITS: &str = include_str!("../data/portraits.txt");
const RELATORS: &str = include_str!("../data/relators.txt");
const DEPTH7_SECTIONS: &str = include_str!("../data/depth7_sections.txt");

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

/// A portrait row: the word and its section tuple; the level is log_q of the tuple length.
#[derive(Clone, Debug)]
pub struct PortraitRow {
    pub word: String,
    pub sections: Vec<String>,
}

impl PortraitRow {
    pub fn level(&self, q: usize) -> Option<usize> {
        let mut size = 1;
        for level in 0..32 {
            if size == self.sections.len() {
                return Some(level);
            }
            size *= q;
        }
        None
    }
}

pub fn portrait_rows() -> Vec<PortraitRow> {
    data_lines(PORTRAITS)
        .map(|line| {
            let (word, sections) = line.split_once('|').expect("row has a separator");
            PortraitRow {
                word: word.trim().to_string(),
                sections: split_top_level(sections),
            }
        })
        .collect()
}

/// Splits on commas that are not inside brackets or parentheses.
fn split_top_level(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut current = String::new();
    for c in text.chars() {
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            _ => {}
        }
        if c == ',' && depth == 0 {
            out.push(current.trim().to_string());
            current.clear();
        } else {
            current.push(c);
        }
    }
    if !current.trim().is_empty() {
        out.push(current.trim().to_string());
    }
    out
}

pub fn relators() -> Vec<&'static str> {
    data_lines(RELATORS).collect()
}

/// Row of the depth-7 section table: generator, nucleus element, listed sections.
#[derive(Clone, Debug)]
pub struct SectionRow {
    pub generator: String,
    pub element: String,
    pub sections: Vec<String>,
}

pub fn depth7_rows() -> Vec<SectionRow> {
    data_lines(DEPTH7_SECTIONS)
        .map(|line| {
            let (lhs, rhs) = line.split_once('=').expect("row has '='");
            let (s, x) = lhs.split_once('*').expect("row has '*'");
            SectionRow {
                generator: s.trim().to_string(),
                element: x.trim().to_string(),
                sections: split_top_level(rhs),
            }
        })
        .collect()
}

/// The nucleus as listed: identity, each half element and its inverse.
pub fn listed_nucleus(m: &MealyAutomaton) -> Result<Vec<GroupWord>, ExprError> {
    let mut out = vec![GroupWord::identity()];
    for text in NUCLEUS_HALF {
        let w = parse_word(text, m)?;
        out.push(w.inverse());
        out.push(w);
    }
    Ok(out)
}

/// Checks every row against the computed portrait: the element must fix the
/// row's level and its sections must match entrywise under `words_equal`.
pub fn verify_portrait_table(group: &AutomatonGroup, rows: &[PortraitRow]) -> Result<PropertyReport, GroupError> {
    let m = group.automaton();
    let q = group.alphabet_size();
    let mut report = PropertyReport::new("portrait-table").param("rows", rows.len());
    for row in rows {
        let parsed = parse_word(&row.word, m)
            .and_then(|w| Ok((w, row.sections.iter().map(|s| parse_word(s, m)).collect::<Result<Vec<_>, _>>()?)));
        let (word, sections) = match parsed {
            Ok(p) => p,
            Err(e) => {
                report.counterexamples.push(Evidence::word(&row.word).note(e.to_string()));
                continue;
            }
        };
        let Some(level) = row.level(q) else {
            report
                .counterexamples
                .push(Evidence::word(&row.word).note(format!("{} sections is not a power of {q}", row.sections.len())));
            continue;
        };
        let problems = check_portrait_row(group, &word, level, &sections, true)?;
        if problems.is_empty() {
            report.witnesses.push(Evidence::word(&row.word).note(format!("level {level}")));
        } else {
            report.counterexamples.extend(problems.into_iter().map(|mut e| {
                e.word = row.word.clone();
                e
            }));
        }
    }
    report.verdict = Verdict::from_bool(report.counterexamples.is_empty());
    Ok(report)
}
