//! The self-similar group generated by an automaton: tree action, sections,
//! portraits and the word problem.
//!
//! Words act with the rightmost factor first. Sections follow the matching
//! cocycle rule `(uv)|_x = u|_{v(x)} · v|_x`, so a section of a word is the
//! free reduction of the word of generator sections read along the path that
//! the input letter takes through the word from right to left.

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::{Hash, Hasher};

use serde::Serialize;
use thiserror::Error;

use crate::mealy::MealyAutomaton;
use crate::word::{Generator, GroupWord, Vertex};

/// Default bound on the number of distinct words the word-problem search may visit.
pub const DEFAULT_TRIVIALITY_CAP: usize = 1_000_000;

/// Largest number of vertices a portrait or level permutation may cover.
pub const MAX_LEVEL_VERTICES: usize = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("word problem undecided: section closure exceeded the cap of {cap} words")]
    Undecided { cap: usize },
    #[error("level {level} has too many vertices for a dense table")]
    LevelTooLarge { level: usize },
    #[error("closure exceeded the cap of {cap} elements")]
    CapExceeded { cap: usize },
}

/// Level-n permutation together with the tuple of level-n sections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Portrait {
    pub level: usize,
    /// `permutation[i]` is the index of the image of the i-th level-n vertex.
    pub permutation: Vec<usize>,
    /// Sections indexed by vertex in lexicographic order.
    pub sections: Vec<GroupWord>,
}

impl Portrait {
    pub fn is_trivial_permutation(&self) -> bool {
        self.permutation.iter().enumerate().all(|(i, &p)| i == p)
    }
}

/// Sections of a word at all depths up to a bound, deduplicated as group elements.
#[derive(Clone, Debug)]
pub struct SectionClosure {
    pub root: GroupWord,
    pub members: Vec<GroupWord>,
}

/// The group generated by the states of an invertible automaton.
#[derive(Clone, Debug)]
pub struct AutomatonGroup {
    automaton: MealyAutomaton,
    q: usize,
    /// `act[code][x]`: image of letter `x` under a generator.
    act: Vec<Vec<usize>>,
    /// `sec[code][x]`: section of a generator at `x` (`None` for the identity state).
    sec: Vec<Vec<Option<Generator>>>,
    triviality_cap: usize,
    fingerprint_level: usize,
    /// Level permutations of each generator at `fingerprint_level`.
    fingerprint_perms: Vec<Vec<u32>>,
}

impl AutomatonGroup {
    pub fn new(automaton: MealyAutomaton) -> Self {
        let q = automaton.alphabet().size();
        let n = automaton.num_states();
        let mut act = vec![Vec::new(); 2 * n];
        let mut sec = vec![Vec::new(); 2 * n];
        for s in 0..n {
            let pos = Generator::new(s, false);
            let neg = Generator::new(s, true);
            let inverse_out = automaton.inverse_output(s);
            let section_of = |t: usize, inverse: bool| {
                (!automaton.is_identity_state(t)).then(|| Generator::new(t, inverse))
            };
            act[pos.code()] = (0..q).map(|x| automaton.output(s, x)).collect();
            sec[pos.code()] = (0..q)
                .map(|x| section_of(automaton.transition(s, x), false))
                .collect();
            act[neg.code()] = inverse_out.clone();
            // s⁻¹|_x = (s|_{s⁻¹(x)})⁻¹
            sec[neg.code()] = (0..q)
                .map(|x| section_of(automaton.transition(s, inverse_out[x]), true))
                .collect();
        }
        let mut fingerprint_level = 1;
        while q.pow(fingerprint_level as u32 + 1) <= 1024 {
            fingerprint_level += 1;
        }
        let mut group = AutomatonGroup {
            automaton,
            q,
            act,
            sec,
            triviality_cap: DEFAULT_TRIVIALITY_CAP,
            fingerprint_level,
            fingerprint_perms: Vec::new(),
        };
        group.fingerprint_perms = (0..2 * n)
            .map(|code| {
                let w = GroupWord::generator(Generator::new(code >> 1, code & 1 == 1));
                group
                    .level_permutation(&w, fingerprint_level)
                    .expect("fingerprint level is small")
                    .into_iter()
                    .map(|p| p as u32)
                    .collect()
            })
            .collect();
        group
    }

    pub fn with_triviality_cap(mut self, cap: usize) -> Self {
        self.triviality_cap = cap.max(1);
        self
    }

    pub fn triviality_cap(&self) -> usize {
        self.triviality_cap
    }

    pub fn automaton(&self) -> &MealyAutomaton {
        &self.automaton
    }

    pub fn alphabet_size(&self) -> usize {
        self.q
    }

    /// The generating set S (non-identity states), positive letters.
    pub fn generators(&self) -> Vec<Generator> {
        self.automaton
            .generators()
            .into_iter()
            .map(Generator::positive)
            .collect()
    }

    /// S ∪ S⁻¹, ordered `s1, s1⁻¹, s2, s2⁻¹, …`.
    pub fn symmetric_generators(&self) -> Vec<Generator> {
        self.generators()
            .into_iter()
            .flat_map(|g| [g, g.inverse()])
            .collect()
    }

    pub fn generator_word(&self, name: &str) -> Option<GroupWord> {
        let s = self.automaton.state_index(name)?;
        if self.automaton.is_identity_state(s) {
            return Some(GroupWord::identity());
        }
        Some(GroupWord::generator(Generator::positive(s)))
    }

    pub fn display(&self, w: &GroupWord) -> String {
        w.display(&self.automaton).to_string()
    }

    pub fn generator_act(&self, g: Generator, x: usize) -> usize {
        self.act[g.code()][x]
    }

    pub fn generator_section(&self, g: Generator, x: usize) -> Option<Generator> {
        self.sec[g.code()][x]
    }

    /// Image of a single letter.
    pub fn act_letter(&self, w: &GroupWord, mut x: usize) -> usize {
        for g in w.letters().iter().rev() {
            x = self.act[g.code()][x];
        }
        x
    }

    /// Image of `x` together with the section `w|_x`.
    pub fn act_and_section(&self, w: &GroupWord, mut x: usize) -> (usize, GroupWord) {
        let mut parts = Vec::with_capacity(w.len());
        for g in w.letters().iter().rev() {
            if let Some(s) = self.sec[g.code()][x] {
                parts.push(s);
            }
            x = self.act[g.code()][x];
        }
        (x, GroupWord::from_letters(parts.into_iter().rev()))
    }

    pub fn section_letter(&self, w: &GroupWord, x: usize) -> GroupWord {
        self.act_and_section(w, x).1
    }

    /// Action on a vertex; preserves its level.
    pub fn apply(&self, w: &GroupWord, v: &Vertex) -> Vertex {
        let mut current = w.clone();
        let mut out = Vec::with_capacity(v.level());
        for &x in v.letters() {
            if current.is_empty() {
                out.push(x);
                continue;
            }
            let (y, next) = self.act_and_section(&current, x as usize);
            out.push(y as u8);
            current = next;
        }
        Vertex::new(out)
    }

    /// The section `w|_v`.
    pub fn section(&self, w: &GroupWord, v: &Vertex) -> GroupWord {
        let mut current = w.clone();
        for &x in v.letters() {
            if current.is_empty() {
                break;
            }
            current = self.section_letter(&current, x as usize);
        }
        current
    }

    /// Action on the first level as a permutation of the alphabet.
    pub fn root_permutation(&self, w: &GroupWord) -> Vec<usize> {
        (0..self.q).map(|x| self.act_letter(w, x)).collect()
    }

    fn acts_trivially_on_letters(&self, w: &GroupWord) -> bool {
        (0..self.q).all(|x| self.act_letter(w, x) == x)
    }

    /// Decides whether `w` is the identity element.
    ///
    /// Walks the set of all sections of `w`; since sections never get longer
    /// this set is finite. The word is trivial exactly when every member fixes
    /// the first level.
    pub fn is_trivial(&self, w: &GroupWord) -> Result<bool, GroupError> {
        if w.is_empty() {
            return Ok(true);
        }
        if !self.acts_trivially_on_letters(w) {
            return Ok(false);
        }
        let mut seen: HashSet<GroupWord> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(w.clone());
        queue.push_back(w.clone());
        while let Some(u) = queue.pop_front() {
            if !self.acts_trivially_on_letters(&u) {
                return Ok(false);
            }
            for x in 0..self.q {
                let s = self.section_letter(&u, x);
                if !s.is_empty() && !seen.contains(&s) {
                    if seen.len() >= self.triviality_cap {
                        return Err(GroupError::Undecided {
                            cap: self.triviality_cap,
                        });
                    }
                    seen.insert(s.clone());
                    queue.push_back(s);
                }
            }
        }
        Ok(true)
    }

    pub fn words_equal(&self, u: &GroupWord, v: &GroupWord) -> Result<bool, GroupError> {
        if u == v {
            return Ok(true);
        }
        self.is_trivial(&u.mul(&v.inverse()))
    }

    /// True iff `w` fixes every vertex of the given level.
    ///
    /// Checked level by level on the distinct sections, so deep levels are cheap.
    pub fn stabilizes_level(&self, w: &GroupWord, level: usize) -> bool {
        let mut frontier: HashSet<GroupWord> = HashSet::from([w.clone()]);
        for depth in 0..level {
            if frontier.iter().any(|u| !self.acts_trivially_on_letters(u)) {
                return false;
            }
            if depth + 1 == level {
                break;
            }
            frontier = frontier
                .iter()
                .flat_map(|u| (0..self.q).map(move |x| (u, x)))
                .map(|(u, x)| self.section_letter(u, x))
                .filter(|s| !s.is_empty())
                .collect();
        }
        true
    }

    /// Permutation of the level-n vertices (lexicographic indices).
    pub fn level_permutation(&self, w: &GroupWord, level: usize) -> Result<Vec<usize>, GroupError> {
        let size = self.level_size(level)?;
        let mut perm: Vec<usize> = (0..size).collect();
        if w.is_empty() {
            return Ok(perm);
        }
        for (i, slot) in perm.iter_mut().enumerate() {
            *slot = self.apply(w, &Vertex::from_index(i, level, self.q)).index(self.q);
        }
        Ok(perm)
    }

    /// Level-n permutations of every state (indexed by state), built by the
    /// recursion `s(xw) = s(x) s|_x(w)` one level at a time.
    pub fn state_level_permutations(&self, level: usize) -> Result<Vec<Vec<usize>>, GroupError> {
        let size = self.level_size(level)?;
        let m = &self.automaton;
        let n = m.num_states();
        let mut perms: Vec<Vec<usize>> = vec![vec![0]; n];
        let mut block = 1;
        for _ in 0..level {
            let next: Vec<Vec<usize>> = (0..n)
                .map(|s| {
                    let mut p = Vec::with_capacity(block * self.q);
                    for x in 0..self.q {
                        let y = m.output(s, x);
                        let inner = &perms[m.transition(s, x)];
                        p.extend(inner.iter().map(|&r| y * block + r));
                    }
                    p
                })
                .collect();
            perms = next;
            block *= self.q;
        }
        debug_assert!(perms.iter().all(|p| p.len() == size));
        Ok(perms)
    }

    fn level_size(&self, level: usize) -> Result<usize, GroupError> {
        self.q
            .checked_pow(level as u32)
            .filter(|&s| s <= MAX_LEVEL_VERTICES)
            .ok_or(GroupError::LevelTooLarge { level })
    }

    /// Hash of the action on a fixed level; equal elements have equal fingerprints.
    pub fn fingerprint(&self, w: &GroupWord) -> u64 {
        let size = self.fingerprint_perms.first().map_or(0, Vec::len);
        let mut perm: Vec<u32> = (0..size as u32).collect();
        for g in w.letters().iter().rev() {
            let table = &self.fingerprint_perms[g.code()];
            for p in perm.iter_mut() {
                *p = table[*p as usize];
            }
        }
        let mut h = DefaultHasher::new();
        perm.hash(&mut h);
        h.finish()
    }

    pub fn fingerprint_level(&self) -> usize {
        self.fingerprint_level
    }

    /// All sections at one level, as a level-ordered list (not deduplicated).
    pub fn level_sections(&self, w: &GroupWord, level: usize) -> Result<Vec<GroupWord>, GroupError> {
        self.level_size(level)?;
        let mut current = vec![w.clone()];
        for _ in 0..level {
            let mut next = Vec::with_capacity(current.len() * self.q);
            for u in &current {
                for x in 0..self.q {
                    next.push(if u.is_empty() {
                        GroupWord::identity()
                    } else {
                        self.section_letter(u, x)
                    });
                }
            }
            current = next;
        }
        Ok(current)
    }

    /// Portrait at level n: permutation plus the tuple of sections.
    pub fn portrait(&self, w: &GroupWord, level: usize) -> Result<Portrait, GroupError> {
        Ok(Portrait {
            level,
            permutation: self.level_permutation(w, level)?,
            sections: self.level_sections(w, level)?,
        })
    }

    /// Distinct group elements among the sections at exactly depth `depth`.
    ///
    /// Only distinct words are expanded at each step, so deep levels stay cheap
    /// for contracting groups.
    pub fn sections_at_depth(&self, w: &GroupWord, depth: usize) -> Result<Vec<GroupWord>, GroupError> {
        let mut frontier: Vec<GroupWord> = vec![w.clone()];
        for _ in 0..depth {
            let mut next = HashSet::new();
            for u in &frontier {
                for x in 0..self.q {
                    next.insert(self.section_letter(u, x));
                }
            }
            frontier = next.into_iter().collect();
            frontier.sort_by(|a, b| a.shortlex_cmp(b));
        }
        let mut set = ElementSet::new(self);
        for u in frontier {
            set.insert(&u)?;
        }
        Ok(set.into_members())
    }

    /// Sections over every vertex of length at most `max_depth` (all depths if `None`),
    /// deduplicated by group equality.
    pub fn section_closure(
        &self,
        w: &GroupWord,
        max_depth: Option<usize>,
    ) -> Result<SectionClosure, GroupError> {
        let mut set = ElementSet::new(self);
        let mut seen_words: HashSet<GroupWord> = HashSet::new();
        seen_words.insert(w.clone());
        set.insert(w)?;
        let mut frontier = vec![w.clone()];
        let mut depth = 0;
        while !frontier.is_empty() && max_depth.is_none_or(|m| depth < m) {
            let mut next = Vec::new();
            for u in &frontier {
                for x in 0..self.q {
                    let s = self.section_letter(u, x);
                    if seen_words.insert(s.clone()) {
                        if seen_words.len() > self.triviality_cap {
                            return Err(GroupError::CapExceeded {
                                cap: self.triviality_cap,
                            });
                        }
                        set.insert(&s)?;
                        next.push(s);
                    }
                }
            }
            frontier = next;
            depth += 1;
        }
        Ok(SectionClosure {
            root: w.clone(),
            members: set.into_members(),
        })
    }
}

/// A set of group elements keyed by action fingerprint and confirmed by the
/// exact word problem. Each element is represented by the shortlex-least word
/// inserted for it so far; indices never change.
#[derive(Clone, Debug)]
pub struct ElementSet<'g> {
    group: &'g AutomatonGroup,
    members: Vec<GroupWord>,
    buckets: HashMap<u64, Vec<usize>>,
    exact: HashMap<GroupWord, usize>,
}

impl<'g> ElementSet<'g> {
    pub fn new(group: &'g AutomatonGroup) -> Self {
        ElementSet {
            group,
            members: Vec::new(),
            buckets: HashMap::new(),
            exact: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[GroupWord] {
        &self.members
    }

    pub fn into_members(self) -> Vec<GroupWord> {
        self.members
    }

    pub fn get(&self, i: usize) -> &GroupWord {
        &self.members[i]
    }

    /// Index of the member equal to `w`, if any.
    pub fn find(&self, w: &GroupWord) -> Result<Option<usize>, GroupError> {
        if let Some(&i) = self.exact.get(w) {
            return Ok(Some(i));
        }
        let key = self.group.fingerprint(w);
        if let Some(candidates) = self.buckets.get(&key) {
            for &i in candidates {
                if self.group.words_equal(&self.members[i], w)? {
                    return Ok(Some(i));
                }
            }
        }
        Ok(None)
    }

    /// Inserts `w` unless an equal element is present. Returns its index and
    /// whether it was new.
    pub fn insert(&mut self, w: &GroupWord) -> Result<(usize, bool), GroupError> {
        if let Some(&i) = self.exact.get(w) {
            return Ok((i, false));
        }
        let key = self.group.fingerprint(w);
        if let Some(candidates) = self.buckets.get(&key) {
            for &i in candidates {
                if self.group.words_equal(&self.members[i], w)? {
                    self.exact.insert(w.clone(), i);
                    if w.shortlex_cmp(&self.members[i]).is_lt() {
                        self.members[i] = w.clone();
                    }
                    return Ok((i, false));
                }
            }
        }
        let i = self.members.len();
        self.members.push(w.clone());
        self.buckets.entry(key).or_default().push(i);
        self.exact.insert(w.clone(), i);
        Ok((i, true))
    }

    pub fn contains(&self, w: &GroupWord) -> Result<bool, GroupError> {
        Ok(self.find(w)?.is_some())
    }
}

/// Portrait permutations and sections serialize by vertex string.
#[derive(Serialize)]
pub struct PortraitRecord {
    pub level: usize,
    pub permutation: Vec<usize>,
    pub sections: Vec<String>,
}

impl PortraitRecord {
    pub fn new(group: &AutomatonGroup, p: &Portrait) -> Self {
        PortraitRecord {
            level: p.level,
            permutation: p.permutation.clone(),
            sections: p.sections.iter().map(|s| group.display(s)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_word;

    fn pi() -> AutomatonGroup {
        AutomatonGroup::new(MealyAutomaton::preset("paper-Pi").unwrap())
    }

    fn w(g: &AutomatonGroup, text: &str) -> GroupWord {
        parse_word(text, g.automaton()).unwrap()
    }

    fn v(text: &str) -> Vertex {
        Vertex::parse(text, 2).unwrap()
    }

    #[test]
    fn action_on_vertices() {
        let g = pi();
        assert_eq!(g.apply(&w(&g, "a"), &v("0110")).to_string(), "1110");
        assert_eq!(g.apply(&w(&g, "a"), &v("00")).to_string(), "10");
        assert_eq!(g.apply(&w(&g, "b"), &v("00")).to_string(), "01");
        assert_eq!(g.apply(&w(&g, "a"), &v("1011")).to_string(), "0011");
        assert_eq!(g.apply(&GroupWord::identity(), &v("0101")), v("0101"));
    }

    #[test]
    fn sections_follow_the_cocycle() {
        let g = pi();
        let show = |x: &GroupWord| g.display(x);
        assert_eq!(show(&g.section(&w(&g, "a"), &v("0"))), "d");
        assert_eq!(show(&g.section(&w(&g, "a"), &v("1"))), "1");
        assert_eq!(show(&g.section(&w(&g, "a^2"), &v("0"))), "d");
        assert_eq!(show(&g.section(&w(&g, "a^2"), &v("1"))), "d");
        assert!(g.section(&GroupWord::identity(), &v("0110")).is_empty());
        assert_eq!(g.root_permutation(&w(&g, "a")), vec![1, 0]);
        assert_eq!(g.root_permutation(&w(&g, "b")), vec![0, 1]);
        assert_eq!(g.root_permutation(&w(&g, "ab")), vec![1, 0]);
    }

    #[test]
    fn word_problem_examples() {
        let g = pi();
        assert!(g.is_trivial(&w(&g, "[d,a^-1da]")).unwrap());
        assert!(!g.is_trivial(&w(&g, "a")).unwrap());
        assert!(!g.is_trivial(&w(&g, "[a,c^-1]")).unwrap());
        let c0 = g.section(&w(&g, "c"), &v("0"));
        assert!(g.words_equal(&c0, &w(&g, "a")).unwrap());
        assert!(!g.words_equal(&w(&g, "a"), &w(&g, "b")).unwrap());
    }

    #[test]
    fn cap_reports_undecided() {
        let g = pi().with_triviality_cap(1);
        assert_eq!(
            g.is_trivial(&w(&g, "b^2")),
            Err(GroupError::Undecided { cap: 1 })
        );
    }

    #[test]
    fn portraits_of_powers() {
        let g = pi();
        let show = |p: &Portrait| p.sections.iter().map(|s| g.display(s)).collect::<Vec<_>>();
        let p = g.portrait(&w(&g, "d^2"), 2).unwrap();
        assert!(p.is_trivial_permutation());
        assert_eq!(show(&p), ["1", "1", "a^2", "c^2"]);
        let p = g.portrait(&w(&g, "a^2"), 3).unwrap();
        assert!(p.is_trivial_permutation());
        assert_eq!(show(&p), ["1", "1", "a", "c", "1", "1", "a", "c"]);
        let p = g.portrait(&GroupWord::identity(), 3).unwrap();
        assert!(p.is_trivial_permutation() && p.sections.iter().all(GroupWord::is_empty));
    }

    fn same_elements(g: &AutomatonGroup, got: &[GroupWord], want: &[&str]) -> bool {
        let mut set = ElementSet::new(g);
        for x in got {
            set.insert(x).unwrap();
        }
        want.len() == got.len()
            && want.iter().all(|t| set.contains(&w(g, t)).unwrap())
    }

    #[test]
    fn depth_seven_sections() {
        let g = pi();
        let ab = g.sections_at_depth(&w(&g, "ab"), 7).unwrap();
        assert!(same_elements(&g, &ab, &["1", "d", "a", "c", "cb", "b"]));
        let ad = g.sections_at_depth(&w(&g, "ad"), 7).unwrap();
        assert!(same_elements(&g, &ad, &["1", "d", "a", "c", "b"]));
    }

    #[test]
    fn closure_contains_every_depth() {
        let g = pi();
        let closure = g.section_closure(&w(&g, "ab"), Some(7)).unwrap();
        assert!(same_elements(
            &g,
            &closure.members,
            &["1", "a", "a^2", "ab", "ac", "b", "bd", "c", "cb", "d", "da"]
        ));
        let empty = g.section_closure(&GroupWord::identity(), Some(3)).unwrap();
        assert_eq!(empty.members, vec![GroupWord::identity()]);
    }

    #[test]
    fn fingerprints_agree_with_equality() {
        let g = pi();
        let x = w(&g, "[d,d^a]");
        assert_eq!(g.fingerprint(&x), g.fingerprint(&GroupWord::identity()));
        assert_ne!(g.fingerprint(&w(&g, "a")), g.fingerprint(&w(&g, "b")));
    }
}
