//! Reference fixtures for the Π automaton, run by `verify-paper`.

use rand::rngs::StdRng;
use rand::SeedableRng;
use selfsim_core::reference::{
    depth7_rows, listed_nucleus, portrait_rows, relators, verify_portrait_table, IDENTITIES, LEVEL_STABILIZERS,
    RIGID_STABILIZERS, TRIVIAL_RESTRICTIONS,
};
use selfsim_core::structure::{
    activity_class, canonical_relator, check_fractal, check_open_set_condition, compute_nucleus, element_set,
    enumerate_relations, rigid_stabilizer_member, stabilizer_member, verify_contraction, verify_weak_branch_witness,
    ActivityClass, NucleusCaps,
};
use selfsim_core::{parse_word, AutomatonGroup, GroupError, GroupWord, Vertex};
use serde::Serialize;

use crate::error::CliError;

/// Seed for the depth-7 reference-row sample, so repeated runs check the same rows.
const SAMPLE_SEED: u64 = 0x5e1f_5111;

#[derive(Debug, Serialize)]
pub struct Fixture {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn fixture(name: &'static str, failures: Vec<String>, checked: usize) -> Fixture {
    Fixture {
        name,
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{checked} checks passed")
        } else {
            format!("{} of {checked} failed: {}", failures.len(), failures.join("; "))
        },
    }
}

fn parse(group: &AutomatonGroup, text: &str) -> Result<GroupWord, CliError> {
    Ok(parse_word(text, group.automaton())?)
}

/// True if the two lists describe the same set of group elements.
fn same_elements(group: &AutomatonGroup, a: &[GroupWord], b: &[GroupWord]) -> Result<bool, GroupError> {
    let sa = element_set(group, a)?;
    let sb = element_set(group, b)?;
    if sa.len() != sb.len() {
        return Ok(false);
    }
    for w in sa.members() {
        if !sb.contains(w)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn run_all(group: &AutomatonGroup, sample: Option<usize>, relation_length: usize) -> Result<Vec<Fixture>, CliError> {
    let m = group.automaton();
    let mut out = Vec::new();

    let nucleus = compute_nucleus(group, NucleusCaps::default())?;
    let computed = nucleus.element_set(group)?;
    out.push(fixture(
        "nucleus-size",
        if nucleus.len() == 67 {
            vec![]
        } else {
            vec![format!("{} elements", nucleus.len())]
        },
        1,
    ));
    let listed = listed_nucleus(m)?;
    let mut missing = Vec::new();
    for w in &listed {
        if !computed.contains(w)? {
            missing.push(group.display(w));
        }
    }
    out.push(fixture("nucleus-listed-elements", missing, listed.len()));

    let report = verify_contraction(group, &nucleus.elements, 7)?;
    let mut failures: Vec<String> = report
        .counterexamples
        .iter()
        .take(5)
        .map(|e| format!("{} at {}", e.word, e.vertex.as_deref().unwrap_or("?")))
        .collect();
    if nucleus.contraction_depth != 7 {
        failures.push(format!("contraction depth {}", nucleus.contraction_depth));
    }
    out.push(fixture("contraction-depth-7", failures, 1 + report.witnesses.len()));

    let rows = depth7_rows();
    let picked: Vec<usize> = match sample {
        Some(k) if k < rows.len() => {
            let mut rng = StdRng::seed_from_u64(SAMPLE_SEED);
            let mut idx = rand::seq::index::sample(&mut rng, rows.len(), k).into_vec();
            idx.sort_unstable();
            idx
        }
        _ => (0..rows.len()).collect(),
    };
    let mut failures = Vec::new();
    for &i in &picked {
        let row = &rows[i];
        let product = parse(group, &row.generator)?.mul(&parse(group, &row.element)?);
        let sections = group.sections_at_depth(&product, 7)?;
        let listed: Vec<GroupWord> = row.sections.iter().map(|s| parse(group, s)).collect::<Result<_, _>>()?;
        if !same_elements(group, &sections, &listed)? {
            failures.push(format!("{} * {}", row.generator, row.element));
        }
    }
    out.push(fixture("depth-7-section-rows", failures, picked.len()));

    let report = check_open_set_condition(group, &nucleus.elements, 4)?;
    let mut failures: Vec<String> = report.counterexamples.iter().map(|e| e.word.clone()).collect();
    for (w, v) in TRIVIAL_RESTRICTIONS {
        let vertex = Vertex::parse(v, 2).expect("listed vertices are binary");
        if !group.is_trivial(&group.section(&parse(group, w)?, &vertex))? {
            failures.push(format!("{w} at {v}"));
        }
    }
    out.push(fixture(
        "open-set-witnesses",
        failures,
        nucleus.len() + TRIVIAL_RESTRICTIONS.len(),
    ));

    let class = activity_class(m);
    out.push(fixture(
        "activity-exponential",
        if class == ActivityClass::Exponential {
            vec![]
        } else {
            vec![class.to_string()]
        },
        1,
    ));

    let mut failures = Vec::new();
    for k in 1..=3 {
        let r = verify_weak_branch_witness(group, k)?;
        if !r.holds() {
            failures.push(format!("k = {k}"));
        }
    }
    out.push(fixture("weak-branch-witnesses", failures, 3));

    let report = check_fractal(group, 3)?;
    out.push(fixture(
        "fractal-radius-3",
        report.counterexamples.iter().map(|e| e.word.clone()).collect(),
        report.witnesses.len().max(1),
    ));

    let mut failures = Vec::new();
    let mut checked = 0;
    for n in 1..=3usize {
        for (name, offset) in [("a", 0), ("b", 1), ("c", 1), ("d", 2)] {
            let w = parse(group, name)?.pow(1 << n);
            let level = 3 * n + offset;
            checked += 1;
            if !(stabilizer_member(group, &w, level) && !stabilizer_member(group, &w, level + 1)) {
                failures.push(format!("{name}^{} not in St({level}) minus St({})", 1 << n, level + 1));
            }
        }
    }
    out.push(fixture("stabilizer-power-laws", failures, checked));

    let mut failures = Vec::new();
    let mut checked = 0;
    for (level, words) in LEVEL_STABILIZERS {
        for w in words {
            checked += 1;
            if !stabilizer_member(group, &parse(group, w)?, level) {
                failures.push(format!("{w} in St({level})"));
            }
        }
    }
    out.push(fixture("level-stabilizer-generators", failures, checked));

    let mut failures = Vec::new();
    let mut checked = 0;
    for (v, words) in RIGID_STABILIZERS {
        let vertex = Vertex::parse(v, 2).expect("listed vertices are binary");
        for w in words {
            checked += 1;
            if !rigid_stabilizer_member(group, &parse(group, w)?, &vertex)? {
                failures.push(format!("{w} in Rigid({v})"));
            }
        }
    }
    out.push(fixture("rigid-stabilizer-generators", failures, checked));

    let mut failures = Vec::new();
    for (lhs, rhs) in IDENTITIES {
        if !group.words_equal(&parse(group, lhs)?, &parse(group, rhs)?)? {
            failures.push(format!("{lhs} = {rhs}"));
        }
    }
    out.push(fixture("commutator-identities", failures, IDENTITIES.len()));

    let listed = relators();
    let mut failures = Vec::new();
    for r in &listed {
        if !group.is_trivial(&parse(group, r)?)? {
            failures.push(r.to_string());
        }
    }
    out.push(fixture("listed-relators", failures, listed.len()));

    let set = enumerate_relations(group, relation_length, 8)?;
    let mut failures = Vec::new();
    let target = canonical_relator(&parse(group, "[d,d^a]")?);
    if relation_length >= 8 && !set.relators.contains(&target) {
        failures.push("[d,d^a] not found".to_string());
    }
    if let Some(short) = set.raw.iter().find(|r| r.len() <= 3) {
        failures.push(format!("short relator {}", group.display(short)));
    }
    out.push(fixture("relation-enumeration", failures, 2));

    let report = verify_portrait_table(group, &portrait_rows())?;
    let mut bad: Vec<String> = report.counterexamples.iter().map(|e| e.word.clone()).collect();
    bad.dedup();
    out.push(fixture("portrait-table", bad, portrait_rows().len()));

    Ok(out)
}
