//! Dense symmetric eigensolver: Householder reduction to tridiagonal form
//! followed by the implicitly shifted QL iteration.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::matrix::DenseMatrix;

/// QL sweeps allowed per eigenvalue before giving up.
pub const MAX_SWEEPS: usize = 50;

/// Default acceptance bound on `‖Av − λv‖₂ / ‖A‖₂`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum EigenError {
    #[error("QL iteration did not converge for eigenvalue {index} after {sweeps} sweeps")]
    NoConvergence { index: usize, sweeps: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
}

/// Which eigenvectors to return. Residuals are reported for every eigenpair regardless.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selection {
    None,
    All,
    Smallest(usize),
    Largest(usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumResult {
    /// Ascending, with multiplicity.
    pub eigenvalues: Vec<f64>,
    /// `(index into eigenvalues, unit eigenvector)` for the selected pairs.
    pub eigenvectors: Vec<(usize, Vec<f64>)>,
    /// `‖Av − λv‖₂` per eigenvalue.
    pub residuals: Vec<f64>,
    /// `‖A‖₂ = max |λ|`.
    pub norm: f64,
    pub total_sweeps: usize,
    pub max_sweeps_per_eigenvalue: usize,
}

impl SpectrumResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn within_tolerance(&self, relative: f64) -> bool {
        self.max_residual() <= relative * self.norm
    }
}

#[derive(Clone, Debug)]
struct Tridiagonal {
    diagonal: Vec<f64>,
    /// `offdiagonal[i]` couples rows i and i+1; the last entry is zero.
    offdiagonal: Vec<f64>,
}

#[derive(Clone, Copy)]
struct Rotation {
    index: usize,
    c: f64,
    s: f64,
}

/// Householder reflector `I − τ v vᵀ` mapping `x` to `(α, 0, …, 0)`; `None` if `x` is already there.
fn reflector(x: &[f64]) -> Option<(Vec<f64>, f64, f64)> {
    let tail_norm2: f64 = x[1..].iter().map(|v| v * v).sum();
    if tail_norm2 == 0.0 {
        return None;
    }
    let norm = (x[0] * x[0] + tail_norm2).sqrt();
    let alpha = if x[0] > 0.0 { -norm } else { norm };
    let mut v = x.to_vec();
    v[0] -= alpha;
    let tau = 2.0 / (v[0] * v[0] + tail_norm2);
    Some((v, tau, alpha))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Householder reduction `A = Q T Qᵀ`. Returns T and, if requested, `Qᵀ`.
///
/// The rank-2 update of step k and the matrix-vector product of step k+1 share
/// one pass over the trailing block.
fn tridiagonalize(a: &DenseMatrix, want_q: bool) -> (Tridiagonal, Option<DenseMatrix>) {
    let n = a.dim();
    let mut work = a.clone();
    let mut diagonal = vec![0.0; n];
    let mut offdiagonal = vec![0.0; n];
    let mut reflectors: Vec<Option<(Vec<f64>, f64)>> = vec![None; n];
    let steps = n.saturating_sub(2);

    // Reflector of the current step with its product p = τ A₂₂ v.
    let mut current: Option<(Vec<f64>, f64, Vec<f64>)> = None;
    if steps > 0 {
        let x = work.row(0)[1..].to_vec();
        offdiagonal[0] = x[0];
        if let Some((v, tau, alpha)) = reflector(&x) {
            offdiagonal[0] = alpha;
            let p = (1..n).map(|i| tau * dot(&work.row(i)[1..], &v)).collect();
            current = Some((v, tau, p));
        }
    }
    for k in 0..steps {
        diagonal[k] = work.get(k, k);
        let start = k + 1;
        let data = work.data_mut();
        let Some((v, tau, p)) = current.take() else {
            // No reflection at this step; prepare the next one directly.
            if k + 1 < steps {
                let x = data[(k + 1) * n + k + 2..(k + 2) * n].to_vec();
                offdiagonal[k + 1] = x[0];
                if let Some((v, tau, alpha)) = reflector(&x) {
                    offdiagonal[k + 1] = alpha;
                    let p = (k + 2..n).map(|i| tau * dot(&data[i * n + k + 2..(i + 1) * n], &v)).collect();
                    current = Some((v, tau, p));
                }
            }
            continue;
        };
        let kappa = 0.5 * tau * dot(&p, &v);
        let w: Vec<f64> = p.iter().zip(&v).map(|(pi, vi)| pi - kappa * vi).collect();
        let update = |r: usize, row: &mut [f64]| {
            let (vr, wr) = (v[r], w[r]);
            for ((x, &vc), &wc) in row.iter_mut().zip(&v).zip(&w) {
                *x -= vr * wc + wr * vc;
            }
        };
        // Row k+1 first: it defines the next reflector.
        update(0, &mut data[start * n + start..(start + 1) * n]);
        let next = if k + 1 < steps {
            let x = data[start * n + start + 1..(start + 1) * n].to_vec();
            offdiagonal[k + 1] = x[0];
            reflector(&x).map(|(nv, ntau, alpha)| {
                offdiagonal[k + 1] = alpha;
                (nv, ntau)
            })
        } else {
            None
        };
        let next_p: Vec<f64> = data[(start + 1) * n..]
            .par_chunks_mut(n)
            .enumerate()
            .map(|(r, row)| {
                update(r + 1, &mut row[start..]);
                next.as_ref().map_or(0.0, |(nv, ntau)| ntau * dot(&row[start + 1..], nv))
            })
            .collect();
        reflectors[k] = Some((v, tau));
        if let Some((nv, ntau)) = next {
            current = Some((nv, ntau, next_p));
        }
    }
    if n >= 2 {
        diagonal[n - 2] = work.get(n - 2, n - 2);
        offdiagonal[n - 2] = work.get(n - 2, n - 1);
    }
    if n >= 1 {
        diagonal[n - 1] = work.get(n - 1, n - 1);
    }
    drop(work);

    // Qᵀ = H_{m}⋯H_1 H_0 is accumulated as rows: (Qᵀ)₂₂ ← (Qᵀ)₂₂ H_k, i.e.
    // each row x of the trailing columns becomes x − τ (x·v) v.
    let qt = want_q.then(|| {
        let mut qt = DenseMatrix::identity(n);
        for k in (0..steps).rev() {
            let Some((v, tau)) = &reflectors[k] else {
                continue;
            };
            let start = k + 1;
            qt.data_mut()[start * n..].par_chunks_mut(n).for_each(|row| {
                let s = tau * dot(&row[start..], v);
                if s != 0.0 {
                    for (x, &vi) in row[start..].iter_mut().zip(v) {
                        *x -= s * vi;
                    }
                }
            });
        }
        qt
    });
    (
        Tridiagonal {
            diagonal,
            offdiagonal,
        },
        qt,
    )
}

/// Columns per cache tile when applying a sweep of rotations to `Zᵀ`.
const ROTATION_TILE: usize = 256;

/// Applies rotations to pairs of rows of `zt` (columns of Z), tile by tile.
fn apply_rotations(zt: &mut DenseMatrix, rotations: &[Rotation], lo: usize, hi: usize) {
    let n = zt.dim();
    let rows = &mut zt.data_mut()[lo * n..(hi + 1) * n];
    let tiles = n.div_ceil(ROTATION_TILE);
    // Hand each tile a disjoint column range of every affected row.
    let mut per_tile: Vec<Vec<&mut [f64]>> = (0..tiles).map(|_| Vec::with_capacity(hi - lo + 1)).collect();
    for row in rows.chunks_mut(n) {
        for (t, chunk) in row.chunks_mut(ROTATION_TILE).enumerate() {
            per_tile[t].push(chunk);
        }
    }
    per_tile.into_par_iter().for_each(|mut tile| {
        for r in rotations {
            let (head, tail) = tile.split_at_mut(r.index + 1 - lo);
            let (a, b) = (&mut head[r.index - lo], &mut tail[0]);
            for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                let h = *y;
                *y = r.s * *x + r.c * h;
                *x = r.c * *x - r.s * h;
            }
        }
    });
}

/// Implicit QL with origin shifts on a symmetric tridiagonal matrix. Rotations of
/// each sweep are accumulated into the rows of `zt` (= columns of Z) when present.
fn tridiagonal_ql(
    t: &mut Tridiagonal,
    mut z: Option<&mut DenseMatrix>,
) -> Result<(usize, usize), EigenError> {
    let n = t.diagonal.len();
    let d = &mut t.diagonal;
    let e = &mut t.offdiagonal;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let mut total = 0;
    let mut worst = 0;
    let mut rotations = Vec::with_capacity(n);
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m + 1 < n && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_SWEEPS {
                    return Err(EigenError::NoConvergence {
                        index: l,
                        sweeps: MAX_SWEEPS,
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                rotations.clear();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    rotations.push(Rotation { index: i, c, s });
                }
                if let Some(z) = z.as_deref_mut() {
                    apply_rotations(z, &rotations, l, m);
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
            total += sweeps;
            worst = worst.max(sweeps);
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok((total, worst))
}

/// All eigenvalues, ascending, without eigenvectors or residuals.
pub fn eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>, EigenError> {
    if !a.is_symmetric() {
        return Err(EigenError::NotSymmetric);
    }
    let (mut t, _) = tridiagonalize(a, false);
    tridiagonal_ql(&mut t, None)?;
    let mut values = t.diagonal;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Full spectrum with residuals and the selected eigenvectors.
pub fn eigen_decompose(a: &DenseMatrix, selection: Selection) -> Result<SpectrumResult, EigenError> {
    if !a.is_symmetric() {
        return Err(EigenError::NotSymmetric);
    }
    let n = a.dim();
    let (mut t, q) = tridiagonalize(a, true);
    let mut zt = q.expect("requested");
    let (total_sweeps, max_sweeps_per_eigenvalue) = tridiagonal_ql(&mut t, Some(&mut zt))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| t.diagonal[i].total_cmp(&t.diagonal[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| t.diagonal[i]).collect();

    let sparse: Vec<Vec<(usize, f64)>> = a
        .rows()
        .map(|r| r.iter().copied().enumerate().filter(|&(_, x)| x != 0.0).collect())
        .collect();
    let residuals: Vec<f64> = order
        .par_iter()
        .map(|&i| {
            let (z, lambda) = (zt.row(i), t.diagonal[i]);
            sparse
                .iter()
                .zip(z)
                .map(|(row, &zj)| {
                    let diff = row.iter().map(|&(k, x)| x * z[k]).sum::<f64>() - lambda * zj;
                    diff * diff
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let norm = eigenvalues.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()));

    let picked: Vec<usize> = match selection {
        Selection::None => Vec::new(),
        Selection::All => (0..n).collect(),
        Selection::Smallest(k) => (0..k.min(n)).collect(),
        Selection::Largest(k) => (n - k.min(n)..n).collect(),
    };
    let eigenvectors = picked
        .into_iter()
        .map(|i| (i, zt.row(order[i]).to_vec()))
        .collect();
    Ok(SpectrumResult {
        eigenvalues,
        eigenvectors,
        residuals,
        norm,
        total_sweeps,
        max_sweeps_per_eigenvalue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_laplacian() {
        let a = DenseMatrix::from_rows(&[vec![2.0, -2.0], vec![-2.0, 2.0]]);
        let r = eigen_decompose(&a, Selection::All).unwrap();
        assert!(r.eigenvalues[0].abs() < 1e-15);
        assert!((r.eigenvalues[1] - 4.0).abs() < 1e-15);
        let v = &r.eigenvectors[0].1;
        assert!((v[0] - v[1]).abs() < 1e-15);
        assert!(r.within_tolerance(RESIDUAL_TOLERANCE));
    }

    #[test]
    fn diagonal_input() {
        let a = DenseMatrix::from_diagonal(&[3.0, -1.0, 2.0, 2.0]);
        let r = eigen_decompose(&a, Selection::None).unwrap();
        assert_eq!(r.eigenvalues, vec![-1.0, 2.0, 2.0, 3.0]);
        assert!(r.eigenvectors.is_empty());
    }

    #[test]
    fn trivial_sizes() {
        assert!(eigenvalues(&DenseMatrix::zeros(0)).unwrap().is_empty());
        assert_eq!(eigenvalues(&DenseMatrix::from_diagonal(&[5.0])).unwrap(), vec![5.0]);
    }

    #[test]
    fn rejects_asymmetric() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
        assert!(matches!(eigenvalues(&a), Err(EigenError::NotSymmetric)));
    }

    #[test]
    fn path_graph_closed_form() {
        // Path on n vertices: adjacency eigenvalues 2 cos(kπ/(n+1)).
        let n = 40;
        let mut a = DenseMatrix::zeros(n);
        for i in 0..n - 1 {
            a.set(i, i + 1, 1.0);
            a.set(i + 1, i, 1.0);
        }
        let values = eigenvalues(&a).unwrap();
        let mut expected: Vec<f64> = (1..=n)
            .map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        expected.sort_by(f64::total_cmp);
        for (x, y) in values.iter().zip(&expected) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
