//! Group words over automaton states and tree vertices.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::mealy::{MealyAutomaton, StateId};

/// A state or its formal inverse, packed as `state << 1 | inverse`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator(u8);

impl Generator {
    pub fn new(state: StateId, inverse: bool) -> Self {
        debug_assert!(state < 128);
        Generator(((state as u8) << 1) | inverse as u8)
    }

    pub fn positive(state: StateId) -> Self {
        Self::new(state, false)
    }

    pub fn state(self) -> StateId {
        (self.0 >> 1) as StateId
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Self {
        Generator(self.0 ^ 1)
    }

    /// Dense code in `0..2 * num_states`, handy for table lookups.
    pub fn code(self) -> usize {
        self.0 as usize
    }
}

/// A freely reduced word in the generators; the empty word is the identity.
///
/// Words multiply left to right as written and act on the tree with the
/// rightmost factor first: `(uv)(x) = u(v(x))`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupWord(Vec<Generator>);

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord(Vec::new())
    }

    pub fn generator(g: Generator) -> Self {
        GroupWord(vec![g])
    }

    /// Freely reduces `letters` (stack-based, linear time).
    pub fn from_letters<I: IntoIterator<Item = Generator>>(letters: I) -> Self {
        let mut w = GroupWord::identity();
        for g in letters {
            w.push(g);
        }
        w
    }

    fn push(&mut self, g: Generator) {
        if self.0.last() == Some(&g.inverse()) {
            self.0.pop();
        } else {
            self.0.push(g);
        }
    }

    pub fn letters(&self) -> &[Generator] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &GroupWord) -> GroupWord {
        let mut w = self.clone();
        for &g in &other.0 {
            w.push(g);
        }
        w
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord(self.0.iter().rev().map(|g| g.inverse()).collect())
    }

    pub fn pow(&self, exponent: i64) -> GroupWord {
        let base = if exponent < 0 { self.inverse() } else { self.clone() };
        let mut w = GroupWord::identity();
        for _ in 0..exponent.unsigned_abs() {
            w = w.mul(&base);
        }
        w
    }

    /// `y⁻¹ x y`.
    pub fn conjugate_by(&self, y: &GroupWord) -> GroupWord {
        y.inverse().mul(self).mul(y)
    }

    /// `[x, y] = x⁻¹ y⁻¹ x y`.
    pub fn commutator(x: &GroupWord, y: &GroupWord) -> GroupWord {
        x.inverse().mul(&y.inverse()).mul(x).mul(y)
    }

    /// Length first, then lexicographic on generator codes.
    pub fn shortlex_cmp(&self, other: &GroupWord) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }

    /// Removes matching letters from both ends (`x w x⁻¹ → w`).
    pub fn cyclically_reduced(&self) -> GroupWord {
        let mut lo = 0;
        let mut hi = self.0.len();
        while hi - lo >= 2 && self.0[lo] == self.0[hi - 1].inverse() {
            lo += 1;
            hi -= 1;
        }
        GroupWord(self.0[lo..hi].to_vec())
    }

    /// Cyclic rotation by `k` letters. Only meaningful for cyclically reduced words.
    pub fn rotate(&self, k: usize) -> GroupWord {
        let mut v = self.0.clone();
        if !v.is_empty() {
            let k = k % v.len();
            v.rotate_left(k);
        }
        GroupWord::from_letters(v)
    }

    /// Renders with the automaton's state names, e.g. `a^-1 d a` as `a^-1da`.
    pub fn display<'a>(&'a self, automaton: &'a MealyAutomaton) -> WordDisplay<'a> {
        WordDisplay {
            word: self,
            automaton,
        }
    }
}

/// Formats a word with state names; runs of equal letters are written as powers.
pub struct WordDisplay<'a> {
    word: &'a GroupWord,
    automaton: &'a MealyAutomaton,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters = self.word.letters();
        if letters.is_empty() {
            return f.write_str("1");
        }
        let spaced = self
            .automaton
            .state_names()
            .iter()
            .any(|n| n.len() > 1);
        let mut i = 0;
        let mut first = true;
        while i < letters.len() {
            let g = letters[i];
            let mut run = 1;
            while i + run < letters.len() && letters[i + run] == g {
                run += 1;
            }
            if spaced && !first {
                f.write_str(" ")?;
            }
            first = false;
            f.write_str(self.automaton.state_name(g.state()))?;
            let exponent = if g.is_inverse() { -(run as i64) } else { run as i64 };
            if exponent != 1 {
                write!(f, "^{exponent}")?;
            }
            i += run;
        }
        Ok(())
    }
}

/// A vertex of the rooted tree: a finite word over the alphabet.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex(Vec<u8>);

impl Vertex {
    pub fn root() -> Self {
        Vertex(Vec::new())
    }

    pub fn new(letters: Vec<u8>) -> Self {
        Vertex(letters)
    }

    /// Parses a digit string such as `0111`. Alphabets larger than 10 use
    /// dot-separated letters (`3.11.0`).
    pub fn parse(text: &str, q: usize) -> Option<Vertex> {
        let text = text.trim();
        let letters: Option<Vec<u8>> = if text.contains('.') {
            text.split('.').map(|p| p.parse::<u8>().ok()).collect()
        } else {
            text.chars()
                .map(|c| c.to_digit(10).map(|d| d as u8))
                .collect()
        };
        let letters = letters?;
        letters
            .iter()
            .all(|&x| (x as usize) < q)
            .then_some(Vertex(letters))
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    /// Position among level-n vertices in lexicographic order.
    pub fn index(&self, q: usize) -> usize {
        self.0.iter().fold(0, |acc, &x| acc * q + x as usize)
    }

    pub fn from_index(mut index: usize, level: usize, q: usize) -> Vertex {
        let mut letters = vec![0u8; level];
        for slot in letters.iter_mut().rev() {
            *slot = (index % q) as u8;
            index /= q;
        }
        Vertex(letters)
    }

    /// Drops the last letter.
    pub fn truncate(&self) -> Vertex {
        let mut v = self.0.clone();
        v.pop();
        Vertex(v)
    }

    pub fn prefix(&self, n: usize) -> Vertex {
        Vertex(self.0[..n.min(self.0.len())].to_vec())
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().any(|&x| x >= 10) {
            let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
            return f.write_str(&parts.join("."));
        }
        for &x in &self.0 {
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl Serialize for Vertex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: usize) -> Generator {
        Generator::positive(s)
    }

    #[test]
    fn multiplication_cancels() {
        let a = GroupWord::generator(g(1));
        let d = GroupWord::generator(g(4));
        assert!(a.mul(&a.inverse()).is_empty());
        assert_eq!(a.mul(&a).len(), 2);
        let da = d.inverse().mul(&a.inverse());
        assert!(da.mul(&a.mul(&d)).is_empty());
    }

    #[test]
    fn from_letters_reduces_nested_pairs() {
        let a = g(1);
        let b = g(2);
        let w = GroupWord::from_letters([a, b, b.inverse(), a.inverse(), a]);
        assert_eq!(w.letters(), &[a]);
    }

    #[test]
    fn commutator_and_conjugate() {
        let a = GroupWord::generator(g(1));
        let d = GroupWord::generator(g(4));
        let conj = d.conjugate_by(&a);
        assert_eq!(conj.letters(), &[g(1).inverse(), g(4), g(1)]);
        let c = GroupWord::commutator(&a, &d);
        assert_eq!(c.letters(), &[g(1).inverse(), g(4).inverse(), g(1), g(4)]);
        assert_eq!(a.pow(3).mul(&a.pow(-3)), GroupWord::identity());
    }

    #[test]
    fn cyclic_reduction() {
        let a = g(1);
        let b = g(2);
        let w = GroupWord::from_letters([a, b, b, a.inverse()]);
        assert_eq!(w.cyclically_reduced().letters(), &[b, b]);
    }

    #[test]
    fn vertex_indexing_is_lexicographic() {
        let v = Vertex::parse("0111", 2).unwrap();
        assert_eq!(v.index(2), 7);
        assert_eq!(Vertex::from_index(7, 4, 2), v);
        assert_eq!(v.to_string(), "0111");
        assert_eq!(v.truncate().to_string(), "011");
        assert!(Vertex::parse("012", 2).is_none());
    }
}
