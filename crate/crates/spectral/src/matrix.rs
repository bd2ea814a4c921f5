//! Dense row-major square matrices.

use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        DenseMatrix {
            n,
            data: rows.concat(),
        }
    }

    pub fn from_diagonal(diagonal: &[f64]) -> Self {
        let mut m = Self::zeros(diagonal.len());
        for (i, &x) in diagonal.iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.n + j] = x;
    }

    pub fn add(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.n + j] += x;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n.max(1))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.rows().map(|r| r.iter().sum()).collect()
    }

    /// Maximum absolute row sum; an upper bound for the spectral norm.
    pub fn norm_inf(&self) -> f64 {
        self.rows()
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        self.data
            .par_chunks(self.n.max(1))
            .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `self * other`, skipping zero entries of `self` (operators here are sparse in practice).
    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = DenseMatrix::zeros(n);
        out.data
            .par_chunks_mut(n.max(1))
            .zip(self.data.par_chunks(n.max(1)))
            .for_each(|(out_row, a_row)| {
                for (k, &a) in a_row.iter().enumerate() {
                    if a != 0.0 {
                        for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                            *o += a * b;
                        }
                    }
                }
            });
        out
    }

    /// Square submatrix on the index range `rows` × `cols`.
    pub fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Vec<Vec<f64>> {
        rows.map(|i| self.row(i)[cols.clone()].to_vec()).collect()
    }

    pub fn shifted(&self, gamma: f64) -> DenseMatrix {
        let mut m = self.clone();
        for i in 0..self.n {
            m.add(i, i, -gamma);
        }
        m
    }
}

/// Sign and log-magnitude of a determinant, from LU with partial pivoting.
/// A singular matrix gives sign 0 and log-magnitude −∞.
pub fn log_determinant(rows: &[Vec<f64>]) -> (f64, f64) {
    let n = rows.len();
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let mut sign = 1.0;
    let mut log_abs = 0.0;
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .expect("non-empty range");
        if a[pivot][k] == 0.0 {
            return (0.0, f64::NEG_INFINITY);
        }
        if pivot != k {
            a.swap(pivot, k);
            sign = -sign;
        }
        let p = a[k][k];
        sign *= p.signum();
        log_abs += p.abs().ln();
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in bottom.iter_mut() {
            let factor = row[k] / p;
            if factor != 0.0 {
                for (x, &y) in row[k..].iter_mut().zip(&pivot_row[k..]) {
                    *x -= factor * y;
                }
            }
        }
    }
    (sign, log_abs)
}

/// Solves `a x = b` for each column of `b` by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot vanishes.
pub fn solve(a: &[Vec<f64>], b: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let cols = b.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(ar, br)| ar.iter().chain(br).copied().collect())
        .collect();
    for k in 0..n {
        let pivot = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))?;
        if m[pivot][k] == 0.0 {
            return None;
        }
        m.swap(pivot, k);
        let (top, bottom) = m.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in bottom.iter_mut() {
            let factor = row[k] / pivot_row[k];
            if factor != 0.0 {
                for (x, &y) in row[k..].iter_mut().zip(&pivot_row[k..]) {
                    *x -= factor * y;
                }
            }
        }
    }
    let mut x = vec![vec![0.0; cols]; n];
    for i in (0..n).rev() {
        for c in 0..cols {
            let mut s = m[i][n + c];
            for j in i + 1..n {
                s -= m[i][j] * x[j][c];
            }
            x[i][c] = s / m[i][i];
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_of_small_matrices() {
        let (s, l) = log_determinant(&[vec![0.0, 2.0], vec![3.0, 1.0]]);
        assert_eq!(s, -1.0);
        assert!((l - 6f64.ln()).abs() < 1e-15);
        let (s, _) = log_determinant(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert_eq!(s, 0.0);
    }

    #[test]
    fn solve_recovers_known_solution() {
        let a = vec![vec![4.0, 1.0], vec![2.0, 3.0]];
        let x = solve(&a, &[vec![1.0], vec![2.0]]).unwrap();
        assert!((x[0][0] - 0.1).abs() < 1e-15);
        assert!((x[1][0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn sparse_product_matches_definition() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![2.0, 3.0]]);
        let b = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 1.0]]);
        assert_eq!(a.mul(&b).to_rows(), vec![vec![0.0, 1.0], vec![3.0, 5.0]]);
    }
}
