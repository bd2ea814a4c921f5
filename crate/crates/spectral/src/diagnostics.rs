//! Cross-level spectral diagnostics: covering containment, the Kesten-type
//! lower bound, first-letter Schur blocks and spectrum histograms.

use selfsim_core::AutomatonGroup;
use serde::Serialize;
use thiserror::Error;

use crate::eigen::{eigenvalues, EigenError};
use crate::matrix::{log_determinant, solve, DenseMatrix};
use crate::operator::{build_operator, OperatorError, OperatorKind};

/// Default tolerance for matching eigenvalues across levels.
pub const CONTAINMENT_TOLERANCE: f64 = 1e-6;

/// A diagonal block whose condition number exceeds this is treated as singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

/// Relative tolerance for `det(M − γI) = det(block) · det(complement)`.
pub const FACTORIZATION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error("invalid argument: {0}")]
    Argument(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelGap {
    pub level: usize,
    /// `max_{λ ∈ spec(n)} min_{μ ∈ spec(n+1)} |λ − μ|`.
    pub gap: f64,
    /// Eigenvalues of level n with no level-(n+1) eigenvalue within tolerance.
    pub violations: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub kind: OperatorKind,
    pub tolerance: f64,
    /// Containment is asserted for multigraph operators only.
    pub asserted: bool,
    pub levels: Vec<LevelGap>,
    pub holds: bool,
}

/// Distance from `x` to the nearest element of the sorted slice `values`.
fn nearest_distance(values: &[f64], x: f64) -> f64 {
    let i = values.partition_point(|&v| v < x);
    [i.checked_sub(1), Some(i)]
        .into_iter()
        .flatten()
        .filter_map(|j| values.get(j))
        .map(|v| (v - x).abs())
        .fold(f64::INFINITY, f64::min)
}

pub fn one_sided_gap(lower: &[f64], upper: &[f64], tolerance: f64) -> (f64, Vec<f64>) {
    let mut gap: f64 = 0.0;
    let mut violations = Vec::new();
    for &x in lower {
        let d = nearest_distance(upper, x);
        gap = gap.max(d);
        if d > tolerance {
            violations.push(x);
        }
    }
    (gap, violations)
}

pub fn spectral_convergence(
    group: &AutomatonGroup,
    kind: OperatorKind,
    n_min: usize,
    n_max: usize,
    weights: Option<&[f64]>,
    tolerance: f64,
) -> Result<ConvergenceReport, SpectralError> {
    if n_min == 0 || n_min > n_max {
        return Err(SpectralError::Argument(format!("level range {n_min}..{n_max}")));
    }
    let asserted = kind.mode() == selfsim_core::GraphMode::Multigraph;
    let mut levels = Vec::new();
    let mut previous: Option<Vec<f64>> = None;
    for n in n_min..=n_max {
        let op = build_operator(group, n, kind, weights)?;
        let spectrum = eigenvalues(&op.matrix)?;
        if let Some(prev) = previous {
            let (gap, violations) = one_sided_gap(&prev, &spectrum, tolerance);
            levels.push(LevelGap {
                level: n - 1,
                gap,
                violations,
            });
        }
        previous = Some(spectrum);
    }
    let holds = !asserted || levels.iter().all(|l| l.violations.is_empty());
    Ok(ConvergenceReport {
        kind,
        tolerance,
        asserted,
        levels,
        holds,
    })
}

/// `2√(k−1)/k` for a symmetric generating set of size k.
pub fn kesten_bound(symmetric_generators: usize) -> f64 {
    let k = symmetric_generators as f64;
    2.0 * (k - 1.0).sqrt() / k
}

#[derive(Clone, Debug, Serialize)]
pub struct KestenLevel {
    pub level: usize,
    /// Second-largest eigenvalue of the Markov operator.
    pub second_eigenvalue: f64,
    /// Largest |λ| after removing one copy of the top eigenvalue.
    pub reduced_norm: f64,
    pub second_meets_bound: bool,
    pub norm_meets_bound: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KestenReport {
    pub symmetric_generators: usize,
    pub bound: f64,
    pub levels: Vec<KestenLevel>,
}

/// Both finite-level candidates for the spectral radius of a Markov matrix.
pub fn kesten_level(markov: &DenseMatrix, level: usize, bound: f64) -> Result<KestenLevel, SpectralError> {
    let values = eigenvalues(markov)?;
    if values.len() < 2 {
        return Err(SpectralError::Argument("need at least two vertices".into()));
    }
    let rest = &values[..values.len() - 1];
    let second = rest[rest.len() - 1];
    let norm = rest.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()));
    Ok(KestenLevel {
        level,
        second_eigenvalue: second,
        reduced_norm: norm,
        second_meets_bound: second >= bound,
        norm_meets_bound: norm >= bound,
    })
}

pub fn kesten_bound_check(group: &AutomatonGroup, n_max: usize) -> Result<KestenReport, SpectralError> {
    let symmetric_generators = 2 * group.generators().len();
    let bound = kesten_bound(symmetric_generators);
    let levels = (1..=n_max)
        .map(|n| {
            let op = build_operator(group, n, OperatorKind::Markov, None)?;
            kesten_level(&op.matrix, n, bound)
        })
        .collect::<Result<_, _>>()?;
    Ok(KestenReport {
        symmetric_generators,
        bound,
        levels,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockInfo {
    /// "upper" (first letter 0) or "lower" (first letter q−1 for q = 2).
    pub block: &'static str,
    pub condition: f64,
    pub singular: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Factorization {
    /// The diagonal block that is eliminated.
    pub pivot: &'static str,
    pub log_abs_det_full: f64,
    pub log_abs_det_block: f64,
    pub log_abs_det_complement: f64,
    pub relative_error: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SchurProbe {
    pub level: usize,
    pub gamma: f64,
    pub block_size: usize,
    pub blocks: Vec<BlockInfo>,
    pub factorizations: Vec<Factorization>,
    /// `[[A, B], [C, D]]` of `M_n − γI`, included for levels up to 3.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explicit_blocks: Option<[Vec<Vec<f64>>; 4]>,
}

impl SchurProbe {
    pub fn any_singular(&self) -> bool {
        self.blocks.iter().any(|b| b.singular)
    }

    pub fn factorization_verified(&self) -> bool {
        !self.factorizations.is_empty() && self.factorizations.iter().all(|f| f.holds)
    }
}

fn condition_number(block: &[Vec<f64>]) -> Result<f64, SpectralError> {
    let values = eigenvalues(&DenseMatrix::from_rows(block))?;
    let max = values.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()));
    let min = values.iter().fold(f64::INFINITY, |acc, x| acc.min(x.abs()));
    Ok(if min == 0.0 { f64::INFINITY } else { max / min })
}

fn schur_complement(pivot: &[Vec<f64>], across: &[Vec<f64>], back: &[Vec<f64>], other: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    // other − back · pivot⁻¹ · across
    let x = solve(pivot, across)?;
    Some(
        other
            .iter()
            .zip(back)
            .map(|(orow, brow)| {
                orow.iter()
                    .enumerate()
                    .map(|(j, &o)| o - brow.iter().zip(&x).map(|(b, xr)| b * xr[j]).sum::<f64>())
                    .collect()
            })
            .collect(),
    )
}

fn relative_gap(a: (f64, f64), b: (f64, f64)) -> f64 {
    if a.0 == 0.0 && b.0 == 0.0 {
        return 0.0;
    }
    if a.0 != b.0 {
        return 2.0;
    }
    let (hi, lo) = if a.1 >= b.1 { (a.1, b.1) } else { (b.1, a.1) };
    1.0 - (lo - hi).exp()
}

/// Splits `M_n − γI` by first letter and tests the diagonal blocks and Schur complements.
pub fn schur_block_probe(group: &AutomatonGroup, level: usize, gamma: f64) -> Result<SchurProbe, SpectralError> {
    if level < 2 {
        return Err(SpectralError::Argument("schur probe needs level ≥ 2".into()));
    }
    if group.alphabet_size() != 2 {
        return Err(SpectralError::Argument("schur probe is defined for a binary alphabet".into()));
    }
    let op = build_operator(group, level, OperatorKind::Markov, None)?;
    let shifted = op.matrix.shifted(gamma);
    let n = shifted.dim();
    let h = n / 2;
    let a = shifted.block(0..h, 0..h);
    let b = shifted.block(0..h, h..n);
    let c = shifted.block(h..n, 0..h);
    let d = shifted.block(h..n, h..n);
    let full = log_determinant(&shifted.to_rows());

    let mut blocks = Vec::new();
    let mut factorizations = Vec::new();
    for (name, pivot, across, back, other) in [("upper", &a, &b, &c, &d), ("lower", &d, &c, &b, &a)] {
        let condition = condition_number(pivot)?;
        let singular = condition > SINGULAR_CONDITION;
        blocks.push(BlockInfo {
            block: name,
            condition,
            singular,
        });
        if singular {
            continue;
        }
        if let Some(complement) = schur_complement(pivot, across, back, other) {
            let det_block = log_determinant(pivot);
            let det_complement = log_determinant(&complement);
            let product = (det_block.0 * det_complement.0, det_block.1 + det_complement.1);
            let relative_error = relative_gap(full, product);
            factorizations.push(Factorization {
                pivot: name,
                log_abs_det_full: full.1,
                log_abs_det_block: det_block.1,
                log_abs_det_complement: det_complement.1,
                relative_error,
                holds: relative_error <= FACTORIZATION_TOLERANCE,
            });
        }
    }
    Ok(SchurProbe {
        level,
        gamma,
        block_size: h,
        blocks,
        factorizations,
        explicit_blocks: (level <= 3).then_some([a, b, c, d]),
    })
}

/// Eigenvalues of the first-letter diagonal blocks of `M_n` (upper, lower); at these
/// shifts the corresponding block of `M_n − γI` is singular.
pub fn block_spectra(group: &AutomatonGroup, level: usize) -> Result<(Vec<f64>, Vec<f64>), SpectralError> {
    let op = build_operator(group, level, OperatorKind::Markov, None)?;
    let n = op.matrix.dim();
    let h = n / 2;
    let upper = eigenvalues(&DenseMatrix::from_rows(&op.matrix.block(0..h, 0..h)))?;
    let lower = eigenvalues(&DenseMatrix::from_rows(&op.matrix.block(h..n, h..n)))?;
    Ok((upper, lower))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Uniform bins over `[min λ, max λ]`; the last bin is closed on the right.
pub fn spectrum_histogram(values: &[f64], bins: usize) -> Result<Vec<HistogramBin>, SpectralError> {
    if bins == 0 {
        return Err(SpectralError::Argument("bins must be positive".into()));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.is_empty() {
        return Ok(Vec::new());
    }
    let width = (max - min) / bins as f64;
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|i| HistogramBin {
            lo: min + width * i as f64,
            hi: if i + 1 == bins { max } else { min + width * (i + 1) as f64 },
            count: 0,
        })
        .collect();
    for &x in values {
        let i = if width == 0.0 {
            0
        } else {
            (((x - min) / width) as usize).min(bins - 1)
        };
        out[i].count += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use selfsim_core::MealyAutomaton;

    fn pi() -> AutomatonGroup {
        AutomatonGroup::new(MealyAutomaton::preset("paper-Pi").unwrap())
    }

    #[test]
    fn kesten_constant() {
        assert!((kesten_bound(8) - 0.661_437_827_766_147_8).abs() < 1e-15);
    }

    #[test]
    fn complete_graph_on_two_vertices() {
        let k2 = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let level = kesten_level(&k2, 1, kesten_bound(8)).unwrap();
        assert!((level.second_eigenvalue + 1.0).abs() < 1e-15);
        assert!(!level.second_meets_bound);
        assert!(level.norm_meets_bound);
    }

    #[test]
    fn level_one_second_eigenvalue() {
        let report = kesten_bound_check(&pi(), 1).unwrap();
        assert!((report.levels[0].second_eigenvalue - 0.5).abs() < 1e-15);
    }

    #[test]
    fn equal_levels_give_empty_report() {
        let r = spectral_convergence(&pi(), OperatorKind::Markov, 3, 3, None, 1e-6).unwrap();
        assert!(r.levels.is_empty());
        assert!(r.holds);
    }

    #[test]
    fn schur_far_shift_and_small_level() {
        let far = schur_block_probe(&pi(), 3, 10.0).unwrap();
        assert!(!far.any_singular());
        assert!(far.factorization_verified());
        let zero = schur_block_probe(&pi(), 2, 0.0).unwrap();
        let blocks = zero.explicit_blocks.unwrap();
        assert_eq!(blocks[0].len(), 2);
    }

    #[test]
    fn histogram_cases() {
        let h = spectrum_histogram(&[0.0, 4.0], 2).unwrap();
        assert_eq!(h.iter().map(|b| b.count).collect::<Vec<_>>(), vec![1, 1]);
        let flat = spectrum_histogram(&[1.0; 5], 3).unwrap();
        assert_eq!(flat.iter().filter(|b| b.count > 0).count(), 1);
        assert!(spectrum_histogram(&[1.0], 0).is_err());
    }
}
