//! Schreier graphs of the action on a level of the tree, the covering tower
//! between consecutive levels, and DOT/CSV exchange formats.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use petgraph::graph::{NodeIndex, UnGraph};
use serde::Serialize;
use thiserror::Error;

use crate::group::{AutomatonGroup, GroupError};
use crate::word::Vertex;

/// Largest level built by default (2^14 vertices for a binary alphabet).
pub const DEFAULT_MAX_LEVEL: usize = 14;

#[derive(Debug, Error)]
pub enum SchreierError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("level {level} exceeds the cap of {cap}")]
    LevelCap { level: usize, cap: usize },
    #[error("malformed graph file, line {line}: {message}")]
    Import { line: usize, message: String },
    #[error("unsupported graph format '{0}'")]
    Format(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphMode {
    /// One arc `v -> s(v)` per generator and vertex, loops included.
    Multigraph,
    /// Undirected adjacency without loops or repeated edges; each edge is
    /// labeled by the generators joining its endpoints.
    Simplicial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SchreierGraph {
    pub level: usize,
    pub alphabet: usize,
    pub mode: GraphMode,
    /// Edges in deterministic order: by source vertex, then generator order
    /// (multigraph) or by endpoint pair (simplicial).
    pub edges: Vec<Edge>,
}

impl SchreierGraph {
    pub fn vertex_count(&self) -> usize {
        self.alphabet.pow(self.level as u32)
    }

    pub fn vertex(&self, index: usize) -> Vertex {
        Vertex::from_index(index, self.level, self.alphabet)
    }

    pub fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for e in &self.edges {
            adj[e.source].push(e.target);
            if e.source != e.target {
                adj[e.target].push(e.source);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Number of connected components of the underlying undirected graph.
    pub fn component_count(&self) -> usize {
        let adj = self.neighbours();
        let mut seen = vec![false; adj.len()];
        let mut count = 0;
        for start in 0..adj.len() {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    pub fn distances_from(&self, root: usize) -> Vec<Option<usize>> {
        let adj = self.neighbours();
        let mut dist = vec![None; adj.len()];
        dist[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].expect("queued vertices have a distance");
            for &v in &adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

/// Builds the level-n Schreier graph with respect to the generating set S.
pub fn build_schreier(
    group: &AutomatonGroup,
    level: usize,
    mode: GraphMode,
    max_level: usize,
) -> Result<SchreierGraph, SchreierError> {
    if level > max_level {
        return Err(SchreierError::LevelCap {
            level,
            cap: max_level,
        });
    }
    let perms = group.state_level_permutations(level)?;
    let m = group.automaton();
    let gens = m.generators();
    let size = group.alphabet_size().pow(level as u32);
    let edges = match mode {
        GraphMode::Multigraph => (0..size)
            .flat_map(|v| {
                gens.iter().map(move |&s| (v, s))
            })
            .map(|(v, s)| Edge {
                source: v,
                target: perms[s][v],
                label: m.state_name(s).to_string(),
            })
            .collect(),
        GraphMode::Simplicial => {
            let mut labels: BTreeMap<(usize, usize), BTreeSet<usize>> = BTreeMap::new();
            for &s in &gens {
                for (v, &w) in perms[s].iter().enumerate() {
                    if w != v {
                        labels.entry((v.min(w), v.max(w))).or_default().insert(s);
                    }
                }
            }
            labels
                .into_iter()
                .map(|((source, target), states)| Edge {
                    source,
                    target,
                    label: states
                        .iter()
                        .map(|&s| m.state_name(s))
                        .collect::<Vec<_>>()
                        .join(","),
                })
                .collect()
        }
    };
    Ok(SchreierGraph {
        level,
        alphabet: group.alphabet_size(),
        mode,
        edges,
    })
}

/// Outcome of checking that dropping the last letter maps level n+1 onto level n equivariantly.
#[derive(Clone, Debug, Serialize)]
pub struct CoveringCheck {
    pub level: usize,
    pub holds: bool,
    /// `(generator, level-(n+1) vertex)` pairs where truncation fails to commute.
    pub violations: Vec<(String, String)>,
}

/// Checks `truncate(s(v)) = s(truncate(v))` for every generator and level-(n+1) vertex.
pub fn verify_covering(group: &AutomatonGroup, level: usize) -> Result<CoveringCheck, SchreierError> {
    let upper = group.state_level_permutations(level + 1)?;
    let lower = group.state_level_permutations(level)?;
    let m = group.automaton();
    let names: Vec<String> = m.generators().iter().map(|&s| m.state_name(s).to_string()).collect();
    let upper: Vec<Vec<usize>> = m.generators().iter().map(|&s| upper[s].clone()).collect();
    let lower: Vec<Vec<usize>> = m.generators().iter().map(|&s| lower[s].clone()).collect();
    Ok(check_covering_tables(level, group.alphabet_size(), &names, &upper, &lower))
}

/// Covering check on explicit action tables, one permutation per generator and level.
pub fn check_covering_tables(
    level: usize,
    q: usize,
    names: &[String],
    upper: &[Vec<usize>],
    lower: &[Vec<usize>],
) -> CoveringCheck {
    let mut violations = Vec::new();
    for (g, name) in names.iter().enumerate() {
        for (v, &image) in upper[g].iter().enumerate() {
            if image / q != lower[g][v / q] {
                violations.push((name.clone(), Vertex::from_index(v, level + 1, q).to_string()));
            }
        }
    }
    CoveringCheck {
        level,
        holds: violations.is_empty(),
        violations,
    }
}

fn rooted_ball(graph: &SchreierGraph, root: usize, radius: usize) -> UnGraph<usize, String> {
    let dist = graph.distances_from(root);
    let mut ball = UnGraph::new_undirected();
    let mut index: BTreeMap<usize, NodeIndex> = BTreeMap::new();
    for (v, d) in dist.iter().enumerate() {
        if let Some(d) = d.filter(|&d| d <= radius) {
            index.insert(v, ball.add_node(d));
        }
    }
    for e in &graph.edges {
        if let (Some(&a), Some(&b)) = (index.get(&e.source), index.get(&e.target)) {
            ball.add_edge(a, b, e.label.clone());
        }
    }
    ball
}

/// Largest r ≤ `r_max` for which the labeled balls of radius r around the two
/// bases are isomorphic as rooted labeled graphs.
///
/// Nodes are matched on their distance to the base, which pins base to base.
pub fn ball_isometry_radius(
    graph_a: &SchreierGraph,
    base_a: usize,
    graph_b: &SchreierGraph,
    base_b: usize,
    r_max: usize,
) -> usize {
    for r in 1..=r_max {
        let a = rooted_ball(graph_a, base_a, r);
        let b = rooted_ball(graph_b, base_b, r);
        let same = a.node_count() == b.node_count()
            && a.edge_count() == b.edge_count()
            && petgraph::algo::is_isomorphic_matching(&a, &b, |x, y| x == y, |x, y| x == y);
        if !same {
            return r - 1;
        }
    }
    r_max
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    Csv,
}

impl std::str::FromStr for GraphFormat {
    type Err = SchreierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(GraphFormat::Dot),
            "csv" => Ok(GraphFormat::Csv),
            other => Err(SchreierError::Format(other.to_string())),
        }
    }
}

pub fn export_graph(graph: &SchreierGraph, format: GraphFormat) -> Result<String, SchreierError> {
    match format {
        GraphFormat::Dot => Ok(to_dot(graph)),
        GraphFormat::Csv => to_csv(graph),
    }
}

fn to_dot(graph: &SchreierGraph) -> String {
    let (keyword, arrow, mode) = match graph.mode {
        GraphMode::Multigraph => ("digraph", "->", "multigraph"),
        GraphMode::Simplicial => ("graph", "--", "simplicial"),
    };
    let mut out = String::new();
    writeln!(out, "{keyword} schreier {{").unwrap();
    if graph.mode == GraphMode::Simplicial {
        writeln!(out, "  // loops and repeated edges dropped; labels list every joining generator").unwrap();
    }
    writeln!(out, "  mode=\"{mode}\";").unwrap();
    writeln!(out, "  level=\"{}\";", graph.level).unwrap();
    writeln!(out, "  alphabet=\"{}\";", graph.alphabet).unwrap();
    for v in 0..graph.vertex_count() {
        writeln!(out, "  \"{}\";", graph.vertex(v)).unwrap();
    }
    for e in &graph.edges {
        writeln!(
            out,
            "  \"{}\" {arrow} \"{}\" [label=\"{}\"];",
            graph.vertex(e.source),
            graph.vertex(e.target),
            e.label
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

fn to_csv(graph: &SchreierGraph) -> Result<String, SchreierError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["source", "target", "label"])?;
    for e in &graph.edges {
        writer.write_record([
            graph.vertex(e.source).to_string(),
            graph.vertex(e.target).to_string(),
            e.label.clone(),
        ])?;
    }
    let bytes = writer.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn import_error(line: usize, message: impl Into<String>) -> SchreierError {
    SchreierError::Import {
        line,
        message: message.into(),
    }
}

fn quoted(text: &str) -> Vec<&str> {
    text.split('"').skip(1).step_by(2).collect()
}

/// Reads back the DOT produced by [`export_graph`].
pub fn import_dot(text: &str) -> Result<SchreierGraph, SchreierError> {
    let mut mode = None;
    let mut level = None;
    let mut alphabet = None;
    let mut edges = Vec::new();
    let mut pending: Vec<(usize, String, String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let number = i + 1;
        if line.starts_with("//") || line.is_empty() || line == "}" {
            continue;
        }
        if let Some(rest) = line.strip_prefix("mode=") {
            mode = match quoted(rest).first().copied() {
                Some("multigraph") => Some(GraphMode::Multigraph),
                Some("simplicial") => Some(GraphMode::Simplicial),
                _ => return Err(import_error(number, "unknown mode")),
            };
        } else if let Some(rest) = line.strip_prefix("level=") {
            level = quoted(rest).first().and_then(|s| s.parse().ok());
        } else if let Some(rest) = line.strip_prefix("alphabet=") {
            alphabet = quoted(rest).first().and_then(|s| s.parse().ok());
        } else if line.contains("->") || line.contains("--") {
            let parts = quoted(line);
            if parts.len() != 3 {
                return Err(import_error(number, "expected source, target and label"));
            }
            pending.push((number, parts[0].into(), parts[1].into(), parts[2].into()));
        }
    }
    let mode = mode.ok_or_else(|| import_error(0, "missing mode"))?;
    let level = level.ok_or_else(|| import_error(0, "missing level"))?;
    let alphabet = alphabet.ok_or_else(|| import_error(0, "missing alphabet"))?;
    for (number, s, t, label) in pending {
        let source = Vertex::parse(&s, alphabet).ok_or_else(|| import_error(number, "bad vertex"))?;
        let target = Vertex::parse(&t, alphabet).ok_or_else(|| import_error(number, "bad vertex"))?;
        edges.push(Edge {
            source: source.index(alphabet),
            target: target.index(alphabet),
            label,
        });
    }
    Ok(SchreierGraph {
        level,
        alphabet,
        mode,
        edges,
    })
}

/// Reads an edge-list CSV; the vertex set is all words of the given level.
pub fn import_csv(
    text: &str,
    level: usize,
    alphabet: usize,
    mode: GraphMode,
) -> Result<SchreierGraph, SchreierError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut edges = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let number = i + 2;
        if record.len() != 3 {
            return Err(import_error(number, "expected three columns"));
        }
        let parse = |s: &str| {
            Vertex::parse(s, alphabet)
                .filter(|v| v.level() == level)
                .ok_or_else(|| import_error(number, format!("bad vertex '{s}'")))
        };
        edges.push(Edge {
            source: parse(&record[0])?.index(alphabet),
            target: parse(&record[1])?.index(alphabet),
            label: record[2].to_string(),
        });
    }
    Ok(SchreierGraph {
        level,
        alphabet,
        mode,
        edges,
    })
}
