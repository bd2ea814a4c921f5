//! Word expressions such as `[a,c^-2]`, `d^a` or `(ab)^3 c`.
//!
//! ```text
//! word   := term+
//! term   := atom suffix*
//! suffix := '^' integer | '^' atom        (x^y = y^-1 x y)
//! atom   := name | '1' | '(' word ')' | '[' word ',' word ']'
//! ```
//!
//! Generator names are matched longest-first, so multi-letter state names may
//! be written without separators. Whitespace is ignored between tokens.

use thiserror::Error;

use crate::mealy::MealyAutomaton;
use crate::word::{Generator, GroupWord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown generator at position {position}: '{found}'")]
    UnknownGenerator { position: usize, found: String },
    #[error("exponent at position {position} is out of range")]
    Exponent { position: usize },
}

/// Parses an expression into a freely reduced word over the automaton's states.
pub fn parse_word(text: &str, automaton: &MealyAutomaton) -> Result<GroupWord, ExprError> {
    let mut names: Vec<(usize, &str)> = automaton
        .state_names()
        .iter()
        .enumerate()
        .map(|(i, n)| (i, n.as_str()))
        .collect();
    names.sort_by_key(|(_, n)| std::cmp::Reverse(n.len()));
    let mut parser = Parser {
        text,
        bytes: text.as_bytes(),
        pos: 0,
        automaton,
        names,
    };
    if !text.is_ascii() {
        let position = text.char_indices().find(|(_, c)| !c.is_ascii()).map_or(0, |(i, _)| i);
        return Err(ExprError::Syntax {
            position,
            message: "only ASCII input is accepted".into(),
        });
    }
    let w = parser.word()?;
    parser.skip_ws();
    if parser.pos < parser.bytes.len() {
        return Err(parser.error(format!("unexpected '{}'", parser.bytes[parser.pos] as char)));
    }
    Ok(w)
}

struct Parser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
    automaton: &'a MealyAutomaton,
    names: Vec<(usize, &'a str)>,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> ExprError {
        ExprError::Syntax {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    fn starts_atom(&mut self) -> bool {
        matches!(self.peek(), Some(c) if c == b'(' || c == b'[' || c == b'1' || c.is_ascii_alphabetic() || c == b'_')
    }

    fn word(&mut self) -> Result<GroupWord, ExprError> {
        if !self.starts_atom() {
            return Err(self.error("expected a generator, '1', '(' or '['"));
        }
        let mut w = GroupWord::identity();
        while self.starts_atom() {
            w = w.mul(&self.term()?);
        }
        Ok(w)
    }

    fn term(&mut self) -> Result<GroupWord, ExprError> {
        let mut x = self.atom()?;
        while self.peek() == Some(b'^') {
            self.pos += 1;
            match self.peek() {
                Some(c) if c == b'-' || c == b'+' || c.is_ascii_digit() => {
                    let e = self.integer()?;
                    x = x.pow(e);
                }
                _ => {
                    let y = self.atom()?;
                    x = x.conjugate_by(&y);
                }
            }
        }
        Ok(x)
    }

    fn integer(&mut self) -> Result<i64, ExprError> {
        let start = self.pos;
        if matches!(self.bytes.get(self.pos), Some(b'-' | b'+')) {
            self.pos += 1;
        }
        let digits = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if digits == self.pos {
            return Err(self.error("expected digits after sign"));
        }
        let value: i64 = self.text[start..self.pos]
            .parse()
            .map_err(|_| ExprError::Exponent { position: start })?;
        if value.unsigned_abs() > 1 << 20 {
            return Err(ExprError::Exponent { position: start });
        }
        Ok(value)
    }

    fn atom(&mut self) -> Result<GroupWord, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let w = self.word()?;
                self.expect(b')')?;
                Ok(w)
            }
            Some(b'[') => {
                self.pos += 1;
                let x = self.word()?;
                self.expect(b',')?;
                let y = self.word()?;
                self.expect(b']')?;
                Ok(GroupWord::commutator(&x, &y))
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(GroupWord::identity())
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.name(),
            Some(c) => Err(self.error(format!("unexpected '{}'", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn name(&mut self) -> Result<GroupWord, ExprError> {
        let rest = &self.text[self.pos..];
        for &(state, name) in &self.names {
            if !name.is_empty() && rest.starts_with(name) {
                self.pos += name.len();
                if self.automaton.is_identity_state(state) {
                    return Ok(GroupWord::identity());
                }
                return Ok(GroupWord::generator(Generator::positive(state)));
            }
        }
        let found: String = rest
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
            .collect();
        Err(ExprError::UnknownGenerator {
            position: self.pos,
            found,
        })
    }
}
