//! Level-n operators on functions over the vertices of a Schreier graph.

use std::fmt;
use std::str::FromStr;

use selfsim_core::schreier::{build_schreier, GraphMode, SchreierError, SchreierGraph, DEFAULT_MAX_LEVEL};
use selfsim_core::AutomatonGroup;
use serde::Serialize;
use thiserror::Error;

use crate::matrix::DenseMatrix;

/// Largest level for dense operators (4096 × 4096 for a binary alphabet).
pub const DEFAULT_OPERATOR_LEVEL: usize = 12;

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error(transparent)]
    Schreier(#[from] SchreierError),
    #[error("expected {expected} weights, got {found}")]
    WeightArity { expected: usize, found: usize },
    #[error("operator kind {kind} needs a {needed} graph")]
    WrongMode { kind: OperatorKind, needed: &'static str },
    #[error("level {level} exceeds the operator cap of {cap}")]
    LevelCap { level: usize, cap: usize },
    #[error("unknown operator kind '{0}'")]
    UnknownKind(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    /// `(1/2|S|) Σ_{s∈S} (ρ(s) + ρ(s⁻¹))`.
    Markov,
    /// `2|S|·I − Σ_{s∈S} (ρ(s) + ρ(s⁻¹))`.
    Laplacian,
    /// `Σ_i Γ_i (ρ(s_i) + ρ(s_i⁻¹)) / 2`.
    Hecke,
    AdjacencySimplicial,
    LaplacianSimplicial,
}

impl OperatorKind {
    pub fn mode(self) -> GraphMode {
        match self {
            OperatorKind::Markov | OperatorKind::Laplacian | OperatorKind::Hecke => GraphMode::Multigraph,
            OperatorKind::AdjacencySimplicial | OperatorKind::LaplacianSimplicial => GraphMode::Simplicial,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Markov => "markov",
            OperatorKind::Laplacian => "laplacian",
            OperatorKind::Hecke => "hecke",
            OperatorKind::AdjacencySimplicial => "adjacency-simplicial",
            OperatorKind::LaplacianSimplicial => "laplacian-simplicial",
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperatorKind {
    type Err = OperatorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            OperatorKind::Markov,
            OperatorKind::Laplacian,
            OperatorKind::Hecke,
            OperatorKind::AdjacencySimplicial,
            OperatorKind::LaplacianSimplicial,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| OperatorError::UnknownKind(s.to_string()))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelOperator {
    pub level: usize,
    pub kind: OperatorKind,
    pub matrix: DenseMatrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

/// Generator labels in the order they appear around vertex 0 of a multigraph.
fn generator_labels(graph: &SchreierGraph) -> Vec<&str> {
    graph
        .edges
        .iter()
        .take_while(|e| e.source == 0)
        .map(|e| e.label.as_str())
        .collect()
}

/// Builds an operator from an already constructed Schreier graph of the matching mode.
pub fn operator_from_graph(
    graph: &SchreierGraph,
    kind: OperatorKind,
    weights: Option<&[f64]>,
) -> Result<LevelOperator, OperatorError> {
    if graph.mode != kind.mode() {
        let needed = match kind.mode() {
            GraphMode::Multigraph => "multigraph",
            GraphMode::Simplicial => "simplicial",
        };
        return Err(OperatorError::WrongMode { kind, needed });
    }
    let n = graph.vertex_count();
    let mut matrix = DenseMatrix::zeros(n);
    let mut kept_weights = None;
    match kind {
        OperatorKind::Markov | OperatorKind::Laplacian | OperatorKind::Hecke => {
            let labels = generator_labels(graph);
            let gens = labels.len();
            let coefficient: Vec<f64> = match kind {
                OperatorKind::Markov => vec![1.0 / (2 * gens) as f64; gens],
                OperatorKind::Laplacian => vec![-1.0; gens],
                _ => {
                    let w = weights.unwrap_or(&[]);
                    if w.len() != gens {
                        return Err(OperatorError::WeightArity {
                            expected: gens,
                            found: w.len(),
                        });
                    }
                    kept_weights = Some(w.to_vec());
                    w.iter().map(|x| x / 2.0).collect()
                }
            };
            for (i, e) in graph.edges.iter().enumerate() {
                let c = coefficient[i % gens.max(1)];
                // ρ(s) moves f(s·v) to v; ρ(s⁻¹) is its transpose.
                matrix.add(e.source, e.target, c);
                matrix.add(e.target, e.source, c);
            }
            if kind == OperatorKind::Laplacian {
                for v in 0..n {
                    matrix.add(v, v, (2 * gens) as f64);
                }
            }
        }
        OperatorKind::AdjacencySimplicial | OperatorKind::LaplacianSimplicial => {
            let sign = if kind == OperatorKind::AdjacencySimplicial { 1.0 } else { -1.0 };
            for e in &graph.edges {
                matrix.set(e.source, e.target, sign);
                matrix.set(e.target, e.source, sign);
            }
            if kind == OperatorKind::LaplacianSimplicial {
                for (v, adj) in graph.neighbours().iter().enumerate() {
                    matrix.set(v, v, adj.len() as f64);
                }
            }
        }
    }
    Ok(LevelOperator {
        level: graph.level,
        kind,
        matrix,
        weights: kept_weights,
    })
}

pub fn build_operator(
    group: &AutomatonGroup,
    level: usize,
    kind: OperatorKind,
    weights: Option<&[f64]>,
) -> Result<LevelOperator, OperatorError> {
    if level > DEFAULT_OPERATOR_LEVEL {
        return Err(OperatorError::LevelCap {
            level,
            cap: DEFAULT_OPERATOR_LEVEL,
        });
    }
    let graph = build_schreier(group, level, kind.mode(), DEFAULT_MAX_LEVEL)?;
    operator_from_graph(&graph, kind, weights)
}
