use std::path::Path;

use selfsim_core::schreier::{
    build_schreier, export_graph, verify_covering, GraphFormat, GraphMode, DEFAULT_MAX_LEVEL,
};
use selfsim_core::structure::{
    check_activity, check_fractal, check_open_set_condition, compute_nucleus, enumerate_relations,
    rigid_stabilizer_member, stabilizer_member, verify_contraction, verify_weak_branch_witness, NucleusCaps,
};
use selfsim_core::{group::PortraitRecord, parse_word, AutomatonGroup, GroupWord, MealyAutomaton, PropertyReport, Vertex};
use selfsim_spectral::diagnostics::CONTAINMENT_TOLERANCE;
use selfsim_spectral::eigen::RESIDUAL_TOLERANCE;
use selfsim_spectral::export::{eigenvector_csv, histogram_csv, spectrum_csv};
use selfsim_spectral::{
    build_operator, eigen_decompose, kesten_bound_check, schur_block_probe, spectral_convergence,
    spectrum_histogram, OperatorKind, Selection,
};
use serde_json::{json, Value};

use crate::args::{Command, Format, GlobalArgs, Mode, Property, WordOp};
use crate::error::CliError;
use crate::fixtures;

/// Result of one command: a JSON summary, an optional primary artifact, and
/// whether the checked property held.
pub struct Outcome {
    pub summary: Value,
    pub artifact: Option<String>,
    pub success: bool,
}

impl Outcome {
    fn summary(summary: Value, success: bool) -> Self {
        Outcome {
            summary,
            artifact: None,
            success,
        }
    }

    fn report(report: &PropertyReport) -> Self {
        Outcome::summary(serde_json::to_value(report).expect("report serializes"), report.holds())
    }
}

pub fn load_automaton(source: &str) -> Result<MealyAutomaton, CliError> {
    let path = Path::new(source);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|source_err| CliError::Io {
            path: source.to_string(),
            source: source_err,
        })?;
        Ok(MealyAutomaton::parse(&text)?)
    } else {
        Ok(MealyAutomaton::preset(source)?)
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn word(group: &AutomatonGroup, text: &str) -> Result<GroupWord, CliError> {
    Ok(parse_word(text, group.automaton())?)
}

fn vertex(group: &AutomatonGroup, text: &str) -> Result<Vertex, CliError> {
    Vertex::parse(text, group.alphabet_size())
        .ok_or_else(|| CliError::Usage(format!("'{text}' is not a vertex over {} letters", group.alphabet_size())))
}

fn kind(text: &str) -> Result<OperatorKind, CliError> {
    text.parse().map_err(|e: selfsim_spectral::OperatorError| CliError::Usage(e.to_string()))
}

fn selection(text: &str) -> Result<Selection, CliError> {
    let bad = || CliError::Usage(format!("bad eigenvector selection '{text}'"));
    match text.split_once(':') {
        None if text == "none" => Ok(Selection::None),
        None if text == "all" => Ok(Selection::All),
        Some(("smallest", k)) => Ok(Selection::Smallest(k.parse().map_err(|_| bad())?)),
        Some(("largest", k)) => Ok(Selection::Largest(k.parse().map_err(|_| bad())?)),
        _ => Err(bad()),
    }
}

pub fn run(global: &GlobalArgs, command: &Command) -> Result<Outcome, CliError> {
    let automaton = load_automaton(&global.automaton)?;
    let group = AutomatonGroup::new(automaton).with_triviality_cap(global.cap);
    match command {
        Command::Nucleus {
            max_depth,
            element_cap,
        } => {
            let caps = NucleusCaps {
                max_depth: *max_depth,
                element_cap: *element_cap,
            };
            let nucleus = compute_nucleus(&group, caps)?;
            let elements: Vec<String> = nucleus.elements.iter().map(|w| group.display(w)).collect();
            Ok(Outcome::summary(
                json!({
                    "automaton": global.automaton,
                    "size": nucleus.len(),
                    "contraction_depth": nucleus.contraction_depth,
                    "square_depth": nucleus.square_depth,
                    "closure_depth": nucleus.closure_depth,
                    "candidate_size": nucleus.candidate_size,
                    "elements": elements,
                }),
                true,
            ))
        }
        Command::Check { property } => check(&group, property),
        Command::Schreier {
            level,
            mode,
            verify_covering: covering,
        } => {
            let mode = match mode {
                Mode::Multigraph => GraphMode::Multigraph,
                Mode::Simplicial => GraphMode::Simplicial,
            };
            let graph = build_schreier(&group, *level, mode, DEFAULT_MAX_LEVEL)?;
            let artifact = match global.format.unwrap_or(Format::Dot) {
                Format::Dot => export_graph(&graph, GraphFormat::Dot)?,
                Format::Csv => export_graph(&graph, GraphFormat::Csv)?,
                Format::Json => serde_json::to_string_pretty(&graph).expect("graph serializes"),
            };
            let mut summary = json!({
                "level": graph.level,
                "mode": graph.mode,
                "vertices": graph.vertex_count(),
                "edges": graph.edges.len(),
                "components": graph.component_count(),
            });
            let mut success = true;
            if *covering {
                let check = verify_covering(&group, *level)?;
                success = check.holds;
                summary["covering"] = serde_json::to_value(&check).expect("check serializes");
            }
            Ok(Outcome {
                summary,
                artifact: Some(artifact),
                success,
            })
        }
        Command::Spectrum {
            level,
            kind: kind_name,
            weights,
            vectors,
            vectors_out,
            bins,
            histogram_out,
        } => {
            let op = build_operator(&group, *level, kind(kind_name)?, weights.as_deref())?;
            let result = eigen_decompose(&op.matrix, selection(vectors)?)?;
            let tolerance = global.tolerance.unwrap_or(RESIDUAL_TOLERANCE);
            let within = result.within_tolerance(tolerance);
            let trace = op.matrix.trace();
            let sum: f64 = result.eigenvalues.iter().sum();
            let mut summary = json!({
                "level": level,
                "kind": op.kind,
                "dimension": result.eigenvalues.len(),
                "norm": result.norm,
                "max_residual": result.max_residual(),
                "residual_tolerance": tolerance * result.norm,
                "within_tolerance": within,
                "trace": trace,
                "eigenvalue_sum": sum,
                "qr_sweeps": result.total_sweeps,
                "max_sweeps_per_eigenvalue": result.max_sweeps_per_eigenvalue,
            });
            if let Some(path) = vectors_out {
                write_file(path, &eigenvector_csv(&result))?;
                summary["vectors_out"] = json!(path.display().to_string());
            }
            if let Some(b) = bins {
                let histogram = spectrum_histogram(&result.eigenvalues, *b)?;
                match histogram_out {
                    Some(path) => {
                        write_file(path, &histogram_csv(&histogram))?;
                        summary["histogram_out"] = json!(path.display().to_string());
                    }
                    None => summary["histogram"] = serde_json::to_value(&histogram).expect("bins serialize"),
                }
            }
            let artifact = match global.format.unwrap_or(Format::Csv) {
                Format::Csv => spectrum_csv(&result),
                Format::Json => serde_json::to_string_pretty(&result).expect("result serializes"),
                Format::Dot => return Err(CliError::Usage("spectrum exports csv or json".into())),
            };
            Ok(Outcome {
                summary,
                artifact: Some(artifact),
                success: within,
            })
        }
        Command::Convergence {
            kind: kind_name,
            n_min,
            n_max,
            weights,
        } => {
            let tolerance = global.tolerance.unwrap_or(CONTAINMENT_TOLERANCE);
            let report = spectral_convergence(&group, kind(kind_name)?, *n_min, *n_max, weights.as_deref(), tolerance)?;
            Ok(Outcome::summary(
                serde_json::to_value(&report).expect("report serializes"),
                report.holds,
            ))
        }
        Command::Kesten { n_max } => {
            let report = kesten_bound_check(&group, *n_max)?;
            Ok(Outcome::summary(serde_json::to_value(&report).expect("report serializes"), true))
        }
        Command::SchurProbe { level, gamma } => {
            let probe = schur_block_probe(&group, *level, *gamma)?;
            let ok = probe.factorizations.iter().all(|f| f.holds);
            Ok(Outcome::summary(serde_json::to_value(&probe).expect("probe serializes"), ok))
        }
        Command::Relations {
            max_length,
            hash_level,
        } => {
            let set = enumerate_relations(&group, *max_length, *hash_level)?;
            Ok(Outcome::summary(
                json!({
                    "max_length": set.max_length,
                    "raw_count": set.raw.len(),
                    "relators": set.relators.iter().map(|r| group.display(r)).collect::<Vec<_>>(),
                }),
                true,
            ))
        }
        Command::Stabilizer { expr, level } => {
            let w = word(&group, expr)?;
            let member = stabilizer_member(&group, &w, *level);
            Ok(Outcome::summary(
                json!({ "word": group.display(&w), "level": level, "member": member }),
                member,
            ))
        }
        Command::Rigid { expr, vertex: v } => {
            let w = word(&group, expr)?;
            let v = vertex(&group, v)?;
            let member = rigid_stabilizer_member(&group, &w, &v)?;
            Ok(Outcome::summary(
                json!({ "word": group.display(&w), "vertex": v, "member": member }),
                member,
            ))
        }
        Command::Portrait { expr, level } => {
            let w = word(&group, expr)?;
            let portrait = group.portrait(&w, *level)?;
            let record = PortraitRecord::new(&group, &portrait);
            Ok(Outcome::summary(
                json!({ "word": group.display(&w), "portrait": record }),
                true,
            ))
        }
        Command::Word { op } => word_op(&group, op),
        Command::VerifyPaper {
            sample,
            relation_length,
        } => {
            if global.automaton != "paper-Pi" && global.automaton != "pi" {
                return Err(CliError::Usage("verify-paper runs on the paper-Pi preset".into()));
            }
            let results = fixtures::run_all(&group, *sample, *relation_length)?;
            let failed = results.iter().filter(|f| !f.passed).count();
            Ok(Outcome::summary(
                json!({ "fixtures": results, "passed": results.len() - failed, "failed": failed }),
                failed == 0,
            ))
        }
    }
}

fn check(group: &AutomatonGroup, property: &Property) -> Result<Outcome, CliError> {
    let report = match property {
        Property::Contracting { depth } => {
            let nucleus = compute_nucleus(group, NucleusCaps::default())?;
            let depth = depth.unwrap_or(nucleus.contraction_depth);
            verify_contraction(group, &nucleus.elements, depth)?
        }
        Property::Fractal { radius } => check_fractal(group, *radius)?,
        Property::OpenSet { max_depth } => {
            let nucleus = compute_nucleus(group, NucleusCaps::default())?;
            check_open_set_condition(group, &nucleus.elements, *max_depth)?
        }
        Property::Activity => check_activity(group.automaton()),
        Property::WeakBranch { k } => verify_weak_branch_witness(group, *k)?,
        Property::LevelTransitive { max_level } => {
            let mut report = PropertyReport::new("level-transitive").param("max_level", *max_level);
            for n in 1..=*max_level {
                let graph = build_schreier(group, n, GraphMode::Simplicial, DEFAULT_MAX_LEVEL)?;
                let components = graph.component_count();
                let evidence = selfsim_core::Evidence::word(format!("level {n}")).value(components.to_string());
                if components == 1 {
                    report.witnesses.push(evidence.note("connected"));
                } else {
                    report.counterexamples.push(evidence.note("components"));
                }
            }
            report.verdict = selfsim_core::Verdict::from_bool(report.counterexamples.is_empty());
            report
        }
    };
    Ok(Outcome::report(&report))
}

fn word_op(group: &AutomatonGroup, op: &WordOp) -> Result<Outcome, CliError> {
    match op {
        WordOp::IsTrivial { expr } => {
            let w = word(group, expr)?;
            let trivial = group.is_trivial(&w)?;
            Ok(Outcome::summary(
                json!({ "word": group.display(&w), "verdict": trivial }),
                trivial,
            ))
        }
        WordOp::Equal { expr, other } => {
            let (u, v) = (word(group, expr)?, word(group, other)?);
            let equal = group.words_equal(&u, &v)?;
            Ok(Outcome::summary(
                json!({ "word": group.display(&u), "other": group.display(&v), "verdict": equal }),
                equal,
            ))
        }
        WordOp::Apply { expr, vertex: v } => {
            let w = word(group, expr)?;
            let v = vertex(group, v)?;
            let image = group.apply(&w, &v);
            Ok(Outcome::summary(
                json!({ "word": group.display(&w), "vertex": v, "image": image }),
                true,
            ))
        }
        WordOp::Section { expr, vertex: v } => {
            let w = word(group, expr)?;
            let v = vertex(group, v)?;
            let section = group.section(&w, &v);
            Ok(Outcome::summary(
                json!({
                    "word": group.display(&w),
                    "vertex": v,
                    "section": group.display(&section),
                    "trivial": group.is_trivial(&section)?,
                }),
                true,
            ))
        }
    }
}
