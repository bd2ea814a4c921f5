//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines appear in `cargo test` output.
//! The process fails when the set of failing criteria differs from `EXPECTED_FAILURES`.

#[path = "../../spectral/tests/common/oracle.rs"]
mod oracle;

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::SeedableRng;
use selfsim_core::reference::{
    depth7_rows, listed_nucleus, portrait_rows, relators, verify_portrait_table, LEVEL_STABILIZERS,
    RIGID_STABILIZERS, TRIVIAL_RESTRICTIONS,
};
use selfsim_core::schreier::{build_schreier, GraphMode, DEFAULT_MAX_LEVEL};
use selfsim_core::structure::{
    activity_class, canonical_relator, check_fractal, check_open_set_condition, element_set, enumerate_relations,
    rigid_stabilizer_member, simple_cycles, stabilizer_member, verify_contraction, verify_weak_branch_witness,
    ActivityClass,
};
use selfsim_core::{parse_word, AutomatonGroup, GroupWord, MealyAutomaton, Vertex};
use selfsim_spectral::diagnostics::{block_spectra, CONTAINMENT_TOLERANCE, FACTORIZATION_TOLERANCE};
use selfsim_spectral::{
    build_operator, eigen_decompose, eigenvalues, kesten_bound_check, schur_block_probe, spectral_convergence,
    OperatorKind, Selection,
};

/// Criteria whose reference data disagrees with the computed group, with the reason.
const EXPECTED_FAILURES: [(u32, &str); 3] = [
    (2, "the depth-<=7 section closure of ab contains ab itself, so it cannot equal {1,d,a,c,cb,b}"),
    (8, "the listed relator [d^(a^-1),bd^-1c] is a nontrivial element"),
    (9, "11 of the 30 expanded portrait rows disagree with the computed portraits"),
];

type Outcome = Result<(bool, String), String>;

struct Run {
    failed: BTreeSet<u32>,
}

impl Run {
    fn record(&mut self, id: u32, title: &str, outcome: Outcome) {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        println!("{} criterion {id:>2} {title}: {detail}", if passed { "PASS" } else { "FAIL" });
        if !passed {
            self.failed.insert(id);
        }
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn word(group: &AutomatonGroup, text: &str) -> Result<GroupWord, String> {
    parse_word(text, group.automaton()).map_err(err)
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

fn nucleus_via_cli(group: &AutomatonGroup, nucleus: &mut Vec<GroupWord>) -> Outcome {
    let start = Instant::now();
    let output = Command::new(env!("CARGO_BIN_EXE_selfsim"))
        .args(["nucleus", "--automaton", "paper-Pi"])
        .output()
        .map_err(err)?;
    let elapsed = start.elapsed();
    if !output.status.success() {
        return Err(format!("exit status {}", output.status));
    }
    let summary: serde_json::Value = serde_json::from_slice(&output.stdout).map_err(err)?;
    let names = summary["elements"].as_array().ok_or("no element list")?;
    *nucleus = names
        .iter()
        .map(|n| word(group, n.as_str().unwrap_or("")))
        .collect::<Result<_, _>>()?;
    let set = element_set(group, nucleus).map_err(err)?;
    let listed = listed_nucleus(group.automaton()).map_err(err)?;
    let mut missing = 0;
    for w in &listed {
        if !set.contains(w).map_err(err)? {
            missing += 1;
        }
    }
    let passed = elapsed < Duration::from_secs(300) && nucleus.len() == 67 && set.len() == 67 && missing == 0;
    Ok((
        passed,
        format!(
            "{} elements in {}, {} of {} listed elements missing",
            nucleus.len(),
            secs(elapsed),
            missing,
            listed.len()
        ),
    ))
}

fn contraction(group: &AutomatonGroup, nucleus: &[GroupWord]) -> Outcome {
    let report = verify_contraction(group, nucleus, 7).map_err(err)?;
    let set = element_set(group, nucleus).map_err(err)?;

    let rows = depth7_rows();
    let mut rng = StdRng::seed_from_u64(0xacce_9701);
    let picked = rand::seq::index::sample(&mut rng, rows.len(), 12).into_vec();
    let mut rows_ok = 0;
    for &i in &picked {
        let row = &rows[i];
        let product = word(group, &row.generator)?.mul(&word(group, &row.element)?);
        let mut ok = true;
        for s in group.sections_at_depth(&product, 7).map_err(err)? {
            ok &= set.contains(&s).map_err(err)?;
        }
        rows_ok += usize::from(ok);
    }

    let ab = word(group, "ab")?;
    let expected: Vec<GroupWord> = ["1", "d", "a", "c", "cb", "b"]
        .iter()
        .map(|s| word(group, s))
        .collect::<Result<_, _>>()?;
    let expected_set = element_set(group, &expected).map_err(err)?;
    let closure = group.section_closure(&ab, Some(7)).map_err(err)?;
    let closure_set = element_set(group, &closure.members).map_err(err)?;
    let mut extra = Vec::new();
    for m in closure_set.members() {
        if !expected_set.contains(m).map_err(err)? {
            extra.push(group.display(m));
        }
    }
    let mut absent = 0;
    for m in expected_set.members() {
        if !closure_set.contains(m).map_err(err)? {
            absent += 1;
        }
    }
    let exact: BTreeSet<String> = group
        .sections_at_depth(&ab, 7)
        .map_err(err)?
        .iter()
        .map(|w| group.display(w))
        .collect();
    let mut exact_in_expected = true;
    for s in group.sections_at_depth(&ab, 7).map_err(err)? {
        exact_in_expected &= expected_set.contains(&s).map_err(err)?;
    }
    let closure_equal = extra.is_empty() && absent == 0;
    let passed = report.holds() && rows_ok == picked.len() && closure_equal;
    Ok((
        passed,
        format!(
            "contraction {}, {rows_ok}/{} sampled rows inside the nucleus, closure of ab has {} elements \
             (extra {:?}, {absent} listed absent), exact depth-7 sections {:?} inside the listed set: {}",
            if report.holds() { "holds" } else { "fails" },
            picked.len(),
            closure_set.len(),
            extra,
            exact,
            exact_in_expected
        ),
    ))
}

fn fractal_and_transitive(group: &AutomatonGroup) -> Outcome {
    let start = Instant::now();
    let fractal = check_fractal(group, 3).map_err(err)?;
    let mut disconnected = Vec::new();
    for level in 1..=12 {
        let graph = build_schreier(group, level, GraphMode::Simplicial, DEFAULT_MAX_LEVEL).map_err(err)?;
        if !graph.is_connected() {
            disconnected.push(level);
        }
    }
    let elapsed = start.elapsed();
    Ok((
        fractal.holds() && disconnected.is_empty() && elapsed < Duration::from_secs(120),
        format!(
            "fractal at radius 3 {}, disconnected levels {:?}, {}",
            fractal.holds(),
            disconnected,
            secs(elapsed)
        ),
    ))
}

fn open_set(group: &AutomatonGroup, nucleus: &[GroupWord]) -> Outcome {
    let report = check_open_set_condition(group, nucleus, 4).map_err(err)?;
    let mut listed_ok = 0;
    for (w, v) in TRIVIAL_RESTRICTIONS {
        let vertex = Vertex::parse(v, 2).ok_or("bad vertex")?;
        if group.is_trivial(&group.section(&word(group, w)?, &vertex)).map_err(err)? {
            listed_ok += 1;
        }
    }
    Ok((
        report.holds() && listed_ok == TRIVIAL_RESTRICTIONS.len(),
        format!(
            "{} elements without a witness at depth <= 4, {listed_ok}/{} listed witnesses confirmed",
            report.counterexamples.len(),
            TRIVIAL_RESTRICTIONS.len()
        ),
    ))
}

fn activity(group: &AutomatonGroup) -> Outcome {
    let m = group.automaton();
    let cycles: Vec<String> = simple_cycles(m)
        .iter()
        .map(|c| {
            let mut names: Vec<&str> = c.iter().map(|&s| m.state_name(s)).collect();
            names.push(m.state_name(c[0]));
            names.join("->")
        })
        .collect();
    // Cycles are reported starting from their smallest state, so match rotations.
    let rotations = |cycle: &[&str]| -> Vec<String> {
        (0..cycle.len())
            .map(|k| {
                let mut r: Vec<&str> = cycle[k..].iter().chain(&cycle[..k]).copied().collect();
                r.push(r[0]);
                r.join("->")
            })
            .collect()
    };
    let has = |cycle: &[&str]| rotations(cycle).iter().any(|r| cycles.contains(r));
    let pi_class = activity_class(m);
    let adding = activity_class(&MealyAutomaton::preset("adding-machine").map_err(err)?);
    let passed = pi_class == ActivityClass::Exponential
        && has(&["b", "a", "d"])
        && has(&["b", "c", "a", "d"])
        && adding == ActivityClass::Bounded;
    Ok((passed, format!("paper-Pi {pi_class} with cycles {cycles:?}, adding-machine {adding}")))
}

fn weak_branch(group: &AutomatonGroup) -> Outcome {
    let mut failing = Vec::new();
    for k in 1..=3 {
        if !verify_weak_branch_witness(group, k).map_err(err)?.holds() {
            failing.push(k);
        }
    }
    Ok((failing.is_empty(), format!("failing k: {failing:?}")))
}

fn stabilizers(group: &AutomatonGroup) -> Outcome {
    let mut checked = 0;
    let mut failing = Vec::new();
    for n in 1..=3usize {
        for (name, offset) in [("a", 0), ("b", 1), ("c", 1), ("d", 2)] {
            let w = word(group, name)?.pow(1 << n);
            let level = 3 * n + offset;
            checked += 1;
            if !(stabilizer_member(group, &w, level) && !stabilizer_member(group, &w, level + 1)) {
                failing.push(format!("{name}^{}", 1 << n));
            }
        }
    }
    for (level, words) in LEVEL_STABILIZERS {
        for w in words {
            checked += 1;
            if !stabilizer_member(group, &word(group, w)?, level) {
                failing.push(format!("{w} in St({level})"));
            }
        }
    }
    for (v, words) in RIGID_STABILIZERS {
        let vertex = Vertex::parse(v, 2).ok_or("bad vertex")?;
        for w in words {
            checked += 1;
            if !rigid_stabilizer_member(group, &word(group, w)?, &vertex).map_err(err)? {
                failing.push(format!("{w} in Rigid({v})"));
            }
        }
    }
    Ok((failing.is_empty(), format!("{checked} memberships checked, failing {failing:?}")))
}

fn relations(group: &AutomatonGroup) -> Outcome {
    let start = Instant::now();
    let listed = relators();
    let mut nontrivial = Vec::new();
    for r in &listed {
        if !group.is_trivial(&word(group, r)?).map_err(err)? {
            nontrivial.push(r.to_string());
        }
    }
    let set = enumerate_relations(group, 8, 8).map_err(err)?;
    let found = set.relators.contains(&canonical_relator(&word(group, "[d,d^a]")?));
    let short = set.raw.iter().filter(|r| r.len() <= 3).count();
    let elapsed = start.elapsed();
    Ok((
        nontrivial.is_empty() && found && short == 0 && elapsed < Duration::from_secs(1800),
        format!(
            "{}/{} listed relators trivial (nontrivial {:?}), [d,d^a] found {found}, {short} relators of length <= 3, {}",
            listed.len() - nontrivial.len(),
            listed.len(),
            nontrivial,
            secs(elapsed)
        ),
    ))
}

fn portraits(group: &AutomatonGroup) -> Outcome {
    let rows = portrait_rows();
    let report = verify_portrait_table(group, &rows).map_err(err)?;
    let mut bad: Vec<String> = report.counterexamples.iter().map(|e| e.word.clone()).collect();
    bad.dedup();
    Ok((
        report.holds(),
        format!("{}/{} rows match, failing {:?}", rows.len() - bad.len(), rows.len(), bad),
    ))
}

fn count_near(values: &[f64], target: f64, tolerance: f64) -> usize {
    values.iter().filter(|x| (*x - target).abs() <= tolerance).count()
}

fn spectra(group: &AutomatonGroup) -> Outcome {
    let mut problems = Vec::new();
    let mut worst_trace = 0.0f64;
    let mut level12 = String::new();
    for level in 1..=12 {
        let markov = build_operator(group, level, OperatorKind::Markov, None).map_err(err)?.matrix;
        let laplacian = build_operator(group, level, OperatorKind::Laplacian, None).map_err(err)?.matrix;

        let mv = eigenvalues(&markov).map_err(err)?;
        let tol = 1e-8;
        if mv.iter().any(|&x| !(-1.0 - tol..=1.0 + tol).contains(&x)) {
            problems.push(format!("level {level}: Markov eigenvalue outside [-1,1]"));
        }
        if (mv[mv.len() - 1] - 1.0).abs() > tol || count_near(&mv, 1.0, tol) != 1 {
            problems.push(format!("level {level}: top Markov eigenvalue not simple 1"));
        }
        let ones = vec![1.0; markov.dim()];
        let image = markov.mul_vec(&ones);
        if image.iter().any(|x| (x - 1.0).abs() > 1e-12) {
            problems.push(format!("level {level}: constant vector not fixed"));
        }

        let lv = if level == 12 {
            let start = Instant::now();
            let full = eigen_decompose(&laplacian, Selection::All).map_err(err)?;
            let elapsed = start.elapsed();
            let bound = 1e-8 * full.norm;
            if full.max_residual() > bound || elapsed > Duration::from_secs(1800) {
                problems.push("level 12 decomposition out of bounds".into());
            }
            level12 = format!(
                "level-12 Laplacian decomposed in {} with max residual {:.2e} (bound {:.2e})",
                secs(elapsed),
                full.max_residual(),
                bound
            );
            full.eigenvalues
        } else {
            eigenvalues(&laplacian).map_err(err)?
        };
        if count_near(&lv, 0.0, 1e-8 * lv[lv.len() - 1]) != 1 {
            problems.push(format!("level {level}: Laplacian kernel not one-dimensional"));
        }
        for (matrix, values) in [(&markov, &mv), (&laplacian, &lv)] {
            let trace = matrix.trace();
            let sum: f64 = values.iter().sum();
            let relative = (sum - trace).abs() / trace.abs().max(1.0);
            worst_trace = worst_trace.max(relative);
        }
    }
    if worst_trace > 1e-6 {
        problems.push(format!("trace identity error {worst_trace:.2e}"));
    }
    Ok((
        problems.is_empty(),
        format!("{level12}; worst trace error {worst_trace:.2e}; problems {problems:?}"),
    ))
}

fn containment(group: &AutomatonGroup) -> Outcome {
    let report = spectral_convergence(group, OperatorKind::Markov, 1, 7, None, CONTAINMENT_TOLERANCE).map_err(err)?;
    let worst = report.levels.iter().map(|l| l.gap).fold(0.0, f64::max);
    Ok((
        report.holds && report.levels.len() == 6,
        format!("{} level pairs, largest one-sided gap {worst:.2e}", report.levels.len()),
    ))
}

fn oracle_equivalence(group: &AutomatonGroup) -> Outcome {
    let weights = [0.1, 0.2, 0.3, 0.4];
    let mut worst = 0.0f64;
    for level in 1..=3 {
        for kind in [
            OperatorKind::Markov,
            OperatorKind::Laplacian,
            OperatorKind::Hecke,
            OperatorKind::AdjacencySimplicial,
            OperatorKind::LaplacianSimplicial,
        ] {
            let w = (kind == OperatorKind::Hecke).then_some(&weights[..]);
            let op = build_operator(group, level, kind, w).map_err(err)?;
            let ours = eigenvalues(&op.matrix).map_err(err)?;
            let theirs = oracle::eigenvalues(&op.matrix.to_rows());
            for (x, y) in ours.iter().zip(&theirs) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    let l1 = eigenvalues(&build_operator(group, 1, OperatorKind::Laplacian, None).map_err(err)?.matrix).map_err(err)?;
    let exact = l1.len() == 2 && l1[0].abs() <= 1e-12 && (l1[1] - 4.0).abs() <= 1e-12;
    Ok((
        worst <= 1e-8 && exact,
        format!("largest deviation from the oracle {worst:.2e}, level-1 Laplacian {l1:?}"),
    ))
}

fn kesten(group: &AutomatonGroup) -> Outcome {
    let report = kesten_bound_check(group, 10).map_err(err)?;
    let reference = 2.0 * 7f64.sqrt() / 8.0;
    let seconds: Vec<String> = report
        .levels
        .iter()
        .map(|l| format!("{:.6}", l.second_eigenvalue))
        .collect();
    Ok((
        (report.bound - reference).abs() <= 1e-6 && report.levels.len() == 10,
        format!("bound {:.10}, second eigenvalues for n = 1..10: {}", report.bound, seconds.join(" ")),
    ))
}

fn schur(group: &AutomatonGroup) -> Outcome {
    let mut details = Vec::new();
    let mut passed = true;
    for level in 2..=4 {
        let (upper, lower) = block_spectra(group, level).map_err(err)?;
        let mut singular_at = None;
        for gamma in upper.iter().chain(&lower).filter(|g| (-1.0..=1.0).contains(*g)) {
            if schur_block_probe(group, level, *gamma).map_err(err)?.any_singular() {
                singular_at = Some(*gamma);
                break;
            }
        }
        let mut verified = 0;
        let mut tried = 0;
        let mut k = 0;
        while verified < 10 && k < 200 {
            let gamma = -0.95 + 0.0937 * k as f64;
            k += 1;
            if gamma > 1.0 {
                break;
            }
            let probe = schur_block_probe(group, level, gamma).map_err(err)?;
            if probe.any_singular() {
                continue;
            }
            tried += 1;
            if probe.factorization_verified() {
                verified += 1;
            }
        }
        passed &= singular_at.is_some() && verified == 10 && tried == 10;
        details.push(format!(
            "n = {level}: singular block at gamma {:?}, factorization {verified}/{tried} to {FACTORIZATION_TOLERANCE:e}",
            singular_at
        ));
    }
    Ok((passed, details.join("; ")))
}

fn main() {
    let group = AutomatonGroup::new(MealyAutomaton::preset("paper-Pi").expect("preset exists"));
    let mut run = Run { failed: BTreeSet::new() };
    let mut nucleus = Vec::new();

    run.record(1, "nucleus", nucleus_via_cli(&group, &mut nucleus));
    run.record(2, "contraction at depth 7", contraction(&group, &nucleus));
    run.record(3, "fractality and level transitivity", fractal_and_transitive(&group));
    run.record(4, "open set condition", open_set(&group, &nucleus));
    run.record(5, "activity", activity(&group));
    run.record(6, "weak-branch witnesses", weak_branch(&group));
    run.record(7, "stabilizer laws", stabilizers(&group));
    run.record(8, "relations", relations(&group));
    run.record(9, "portrait table", portraits(&group));
    run.record(10, "level spectra", spectra(&group));
    run.record(11, "covering containment", containment(&group));
    run.record(12, "oracle equivalence", oracle_equivalence(&group));
    run.record(13, "Kesten constant", kesten(&group));
    run.record(14, "Schur probe", schur(&group));

    let expected: BTreeSet<u32> = EXPECTED_FAILURES.iter().map(|(id, _)| *id).collect();
    for (id, reason) in EXPECTED_FAILURES {
        if run.failed.contains(&id) {
            println!("known failure {id:>2}: {reason}");
        }
    }
    let total = 14;
    println!("{} of {total} criteria pass", total - run.failed.len());
    if run.failed != expected {
        eprintln!("failing criteria {:?} differ from the expected {:?}", run.failed, expected);
        std::process::exit(1);
    }
}
