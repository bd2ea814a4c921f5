use proptest::prelude::*;
use selfsim_core::schreier::*;
use selfsim_core::{AutomatonGroup, MealyAutomaton};

fn group(name: &str) -> AutomatonGroup {
    AutomatonGroup::new(MealyAutomaton::preset(name).unwrap())
}

#[test]
fn covering_holds_through_level_eleven() {
    let g = group("paper-Pi");
    for n in 1..=11 {
        assert!(verify_covering(&g, n).unwrap().holds, "level {n}");
    }
    assert!(verify_covering(&group("trivial"), 4).unwrap().holds);
}

#[test]
fn simplicial_graphs_are_connected() {
    let g = group("paper-Pi");
    for n in 1..=12 {
        assert!(build_schreier(&g, n, GraphMode::Simplicial, 14).unwrap().is_connected(), "level {n}");
    }
}

#[test]
fn multigraph_regularity() {
    let g = group("paper-Pi");
    for n in 1..=8 {
        let graph = build_schreier(&g, n, GraphMode::Multigraph, 14).unwrap();
        assert_eq!(graph.edges.len(), 4 << n);
        let mut out = vec![0; graph.vertex_count()];
        for e in &graph.edges {
            out[e.source] += 1;
        }
        assert!(out.iter().all(|&d| d == 4));
    }
}

#[test]
fn fibers_map_onto_the_lower_level() {
    let g = group("paper-Pi");
    for n in 1..=7 {
        let upper = build_schreier(&g, n + 1, GraphMode::Simplicial, 14).unwrap();
        let lower = build_schreier(&g, n, GraphMode::Simplicial, 14).unwrap();
        let mut projected: Vec<(usize, usize)> = upper
            .edges
            .iter()
            .map(|e| (e.source / 2, e.target / 2))
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        projected.sort_unstable();
        projected.dedup();
        let lower_edges: Vec<(usize, usize)> = lower.edges.iter().map(|e| (e.source, e.target)).collect();
        assert_eq!(projected, lower_edges, "level {n}");
    }
}

#[test]
fn neighbouring_levels_share_small_balls() {
    let g = group("paper-Pi");
    let g5 = build_schreier(&g, 5, GraphMode::Simplicial, 14).unwrap();
    let g6 = build_schreier(&g, 6, GraphMode::Simplicial, 14).unwrap();
    assert!(ball_isometry_radius(&g5, 0, &g6, 0, 8) >= 1);
}

#[test]
fn export_is_deterministic() {
    let g = group("paper-Pi");
    let a = build_schreier(&g, 6, GraphMode::Multigraph, 14).unwrap();
    let b = build_schreier(&g, 6, GraphMode::Multigraph, 14).unwrap();
    for f in [GraphFormat::Dot, GraphFormat::Csv] {
        assert_eq!(export_graph(&a, f).unwrap(), export_graph(&b, f).unwrap());
    }
    let dot = export_graph(&build_schreier(&g, 1, GraphMode::Multigraph, 14).unwrap(), GraphFormat::Dot).unwrap();
    assert_eq!(dot.matches(" -> ").count(), 8);
    assert!("svg".parse::<GraphFormat>().is_err());
}

proptest! {
    #[test]
    fn simplicial_adjacency_is_symmetric_and_loop_free(level in 1usize..9) {
        let g = group("paper-Pi");
        let graph = build_schreier(&g, level, GraphMode::Simplicial, 14).unwrap();
        let adj = graph.neighbours();
        for (u, list) in adj.iter().enumerate() {
            prop_assert!(!list.contains(&u));
            for &v in list {
                prop_assert!(adj[v].contains(&u));
            }
        }
        for pair in graph.edges.windows(2) {
            prop_assert!((pair[0].source, pair[0].target) < (pair[1].source, pair[1].target));
        }
    }
}
