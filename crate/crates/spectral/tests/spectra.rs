mod common;

use common::oracle;
use proptest::prelude::*;
use selfsim_core::schreier::{build_schreier, GraphMode};
use selfsim_core::{AutomatonGroup, MealyAutomaton};
use selfsim_spectral::diagnostics::{block_spectra, one_sided_gap};
use selfsim_spectral::*;

fn group(name: &str) -> AutomatonGroup {
    AutomatonGroup::new(MealyAutomaton::preset(name).unwrap())
}

const KINDS: [OperatorKind; 4] = [
    OperatorKind::Markov,
    OperatorKind::Laplacian,
    OperatorKind::AdjacencySimplicial,
    OperatorKind::LaplacianSimplicial,
];

#[test]
fn small_levels_match_the_bisection_oracle() {
    let g = group("paper-Pi");
    for level in 1..=3 {
        for kind in KINDS {
            let op = build_operator(&g, level, kind, None).unwrap();
            let ours = eigenvalues(&op.matrix).unwrap();
            let theirs = oracle::eigenvalues(&op.matrix.to_rows());
            for (x, y) in ours.iter().zip(&theirs) {
                assert!((x - y).abs() <= 1e-8, "{kind} level {level}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn markov_and_laplacian_spectral_ranges() {
    let g = group("paper-Pi");
    for level in 1..=7 {
        let m = build_operator(&g, level, OperatorKind::Markov, None).unwrap();
        let r = eigen_decompose(&m.matrix, Selection::Largest(1)).unwrap();
        assert!(r.eigenvalues.iter().all(|&x| (-1.0 - 1e-12..=1.0 + 1e-12).contains(&x)));
        assert!((r.eigenvalues.last().unwrap() - 1.0).abs() < 1e-12);
        let top = &r.eigenvectors[0].1;
        assert!(top.iter().all(|x| (x.abs() - top[0].abs()).abs() < 1e-10));

        let l = build_operator(&g, level, OperatorKind::Laplacian, None).unwrap();
        let values = eigenvalues(&l.matrix).unwrap();
        assert!(values.iter().all(|&x| (-1e-12..=16.0 + 1e-12).contains(&x)));
        assert_eq!(values.iter().filter(|x| x.abs() < 1e-9).count(), 1);
        let trace = l.matrix.trace();
        assert!((values.iter().sum::<f64>() - trace).abs() <= 1e-10 * trace);
    }
}

#[test]
fn zero_multiplicity_counts_components() {
    let g = group("trivial");
    let graph = build_schreier(&g, 3, GraphMode::Simplicial, 14).unwrap();
    let op = operator_from_graph(&graph, OperatorKind::LaplacianSimplicial, None).unwrap();
    let values = eigenvalues(&op.matrix).unwrap();
    assert_eq!(values.iter().filter(|x| x.abs() < 1e-12).count(), graph.component_count());

    let adding = group("adding-machine");
    let l = build_operator(&adding, 5, OperatorKind::LaplacianSimplicial, None).unwrap();
    let values = eigenvalues(&l.matrix).unwrap();
    assert_eq!(values.iter().filter(|x| x.abs() < 1e-9).count(), 1);
}

#[test]
fn eigenvectors_are_orthonormal() {
    let g = group("paper-Pi");
    let op = build_operator(&g, 6, OperatorKind::LaplacianSimplicial, None).unwrap();
    let r = eigen_decompose(&op.matrix, Selection::All).unwrap();
    assert!(r.within_tolerance(1e-8));
    for (i, (_, u)) in r.eigenvectors.iter().enumerate() {
        for (_, v) in &r.eigenvectors[i..] {
            let d: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
            let expected = if std::ptr::eq(u, v) { 1.0 } else { 0.0 };
            assert!((d - expected).abs() < 1e-8);
        }
    }
}

#[test]
fn markov_spectra_are_nested_along_the_covering() {
    let g = group("paper-Pi");
    let r = spectral_convergence(&g, OperatorKind::Markov, 1, 6, None, 1e-6).unwrap();
    assert!(r.asserted && r.holds);
    assert_eq!(r.levels.len(), 5);
    let s = spectral_convergence(&g, OperatorKind::LaplacianSimplicial, 1, 6, None, 1e-6).unwrap();
    assert!(!s.asserted && s.holds);
    assert!(s.levels.iter().all(|l| l.gap >= 0.0));
}

#[test]
fn one_sided_gap_reports_missing_values() {
    let (gap, missing) = one_sided_gap(&[0.0, 1.0], &[0.0, 0.5], 1e-6);
    assert_eq!(gap, 0.5);
    assert_eq!(missing, vec![1.0]);
}

#[test]
fn level_seven_histogram_conserves_count() {
    let g = group("paper-Pi");
    let op = build_operator(&g, 7, OperatorKind::Laplacian, None).unwrap();
    let values = eigenvalues(&op.matrix).unwrap();
    let bins = spectrum_histogram(&values, 64).unwrap();
    assert_eq!(bins.iter().map(|b| b.count).sum::<usize>(), 128);
}

#[test]
fn schur_blocks_become_singular_at_block_eigenvalues() {
    let g = group("paper-Pi");
    for level in 2..=4 {
        let (_, lower) = block_spectra(&g, level).unwrap();
        let gamma = lower[lower.len() / 2];
        let probe = schur_block_probe(&g, level, gamma).unwrap();
        assert!(probe.blocks[1].singular, "level {level}, γ = {gamma}");
    }
}

fn symmetric_matrix() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..10).prop_flat_map(|n| {
        prop::collection::vec(-5.0f64..5.0, n * n).prop_map(move |raw| {
            (0..n)
                .map(|i| (0..n).map(|j| raw[i.min(j) * n + i.max(j)]).collect())
                .collect()
        })
    })
}

proptest! {
    #[test]
    fn random_symmetric_matrices(rows in symmetric_matrix()) {
        let a = DenseMatrix::from_rows(&rows);
        let r = eigen_decompose(&a, Selection::All).unwrap();
        let theirs = oracle::eigenvalues(&rows);
        for (x, y) in r.eigenvalues.iter().zip(&theirs) {
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + r.norm));
        }
        prop_assert!(r.max_residual() <= 1e-8 * r.norm.max(1e-300) || r.norm == 0.0);
        let sum: f64 = r.eigenvalues.iter().sum();
        prop_assert!((sum - a.trace()).abs() <= 1e-10 * (1.0 + a.norm_inf()));
    }
}
