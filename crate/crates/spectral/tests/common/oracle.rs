//! Independent eigenvalue oracle: bisection on the inertia of `A − λI`.
//!
//! The number of negative pivots in Gaussian elimination without pivoting equals
//! the number of sign changes in the sequence of leading principal minors of
//! `A − λI`, which is the number of eigenvalues below λ.

pub fn count_below(a: &[Vec<f64>], lambda: f64) -> usize {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    let scale = a
        .iter()
        .flatten()
        .fold(1.0f64, |acc, x| acc.max(x.abs()));
    let mut negatives = 0;
    for k in 0..n {
        let mut pivot = m[k][k];
        if pivot == 0.0 {
            pivot = f64::EPSILON * scale;
            m[k][k] = pivot;
        }
        if pivot < 0.0 {
            negatives += 1;
        }
        for i in k + 1..n {
            let factor = m[i][k] / pivot;
            if factor != 0.0 {
                let (top, bottom) = m.split_at_mut(i);
                for (x, y) in bottom[0][k..].iter_mut().zip(&top[k][k..]) {
                    *x -= factor * y;
                }
            }
        }
    }
    negatives
}

/// All eigenvalues, ascending, by bisection on `count_below`.
pub fn eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let bound = a
        .iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1.0;
    (0..n)
        .map(|k| {
            // Offsets keep midpoints away from short dyadic values.
            let (mut lo, mut hi) = (-bound - 0.317_2, bound + 0.271_9);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if count_below(a, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}
