use proptest::prelude::*;
use selfsim_core::{parse_word, AutomatonGroup, Generator, GroupWord, MealyAutomaton, Vertex};

fn pi() -> AutomatonGroup {
    AutomatonGroup::new(MealyAutomaton::preset("paper-Pi").unwrap())
}

fn word(max_len: usize) -> impl Strategy<Value = GroupWord> {
    // States a..d are 0..4 in the Π preset after the identity is placed first.
    let g = pi();
    let letters = g.symmetric_generators();
    prop::collection::vec(prop::sample::select(letters), 0..=max_len).prop_map(GroupWord::from_letters)
}

fn vertex(max_level: usize) -> impl Strategy<Value = Vertex> {
    prop::collection::vec(0u8..2, 0..=max_level).prop_map(Vertex::new)
}

proptest! {
    #[test]
    fn action_is_a_homomorphism(u in word(6), w in word(6), v in vertex(9)) {
        let g = pi();
        prop_assert_eq!(g.apply(&u.mul(&w), &v), g.apply(&u, &g.apply(&w, &v)));
    }

    #[test]
    fn sections_satisfy_the_cocycle(u in word(6), w in word(6), v in vertex(6)) {
        let g = pi();
        let lhs = g.section(&u.mul(&w), &v);
        let rhs = g.section(&u, &g.apply(&w, &v)).mul(&g.section(&w, &v));
        prop_assert!(g.words_equal(&lhs, &rhs).unwrap());
    }

    #[test]
    fn sections_never_grow(w in word(10), v in vertex(8)) {
        let g = pi();
        prop_assert!(g.section(&w, &v).len() <= w.len());
    }

    #[test]
    fn action_respects_prefixes(w in word(8), v in vertex(10)) {
        let g = pi();
        let image = g.apply(&w, &v);
        prop_assert_eq!(image.level(), v.level());
        for n in 0..=v.level() {
            prop_assert_eq!(image.prefix(n), g.apply(&w, &v.prefix(n)));
        }
    }

    #[test]
    fn rendered_words_parse_back(w in word(10)) {
        let g = pi();
        let text = g.display(&w);
        let back = parse_word(&text, g.automaton()).unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn inverse_cancels(w in word(10), v in vertex(8)) {
        let g = pi();
        prop_assert!(g.is_trivial(&w.mul(&w.inverse())).unwrap());
        prop_assert_eq!(g.apply(&w.inverse(), &g.apply(&w, &v)), v);
    }
}

#[test]
fn word_problem_agrees_with_level_twelve_action_up_to_length_four() {
    let g = pi();
    let words = selfsim_core::structure::ball_words(&g, 4);
    assert_eq!(words.len(), 1 + 8 + 8 * 7 + 8 * 49 + 8 * 343);
    for w in &words {
        let fixes_level_twelve = (1..=12).all(|level| {
            g.level_permutation(w, level).unwrap().iter().enumerate().all(|(i, &j)| i == j)
        });
        assert_eq!(g.is_trivial(w).unwrap(), fixes_level_twelve, "{}", g.display(w));
    }
}

#[test]
fn expression_examples() {
    let g = pi();
    let m = g.automaton();
    let show = |t: &str| g.display(&parse_word(t, m).unwrap());
    assert_eq!(show("[a,c^-2]"), "a^-1c^2ac^-2");
    assert_eq!(show("a^3 a^-3"), "1");
    assert_eq!(show("d^a"), "a^-1da");
    assert!(parse_word("a^²", m).is_err());
    assert!(parse_word("x", m).is_err());
}

#[test]
fn commutator_of_d_with_its_conjugate_is_trivial() {
    let g = pi();
    let w = parse_word("[d,d^a]", g.automaton()).unwrap();
    assert!(g.is_trivial(&w).unwrap());
    assert!(!g.is_trivial(&parse_word("[a,d]", g.automaton()).unwrap()).unwrap());
}

#[test]
fn generators_have_expected_level_one_action() {
    let g = pi();
    let names: Vec<String> = g.generators().iter().map(|&s| g.display(&GroupWord::generator(s))).collect();
    assert_eq!(names, ["a", "b", "c", "d"]);
    let flips: Vec<bool> = g
        .generators()
        .iter()
        .map(|&s: &Generator| g.generator_act(s, 0) == 1)
        .collect();
    assert_eq!(flips, [true, false, false, false]);
}
