//! CSV artifacts. Floats carry 17 significant digits.

use std::fmt::Write as _;

use crate::diagnostics::HistogramBin;
use crate::eigen::SpectrumResult;

pub fn spectrum_csv(result: &SpectrumResult) -> String {
    let mut out = String::from("index,eigenvalue,residual\n");
    for (i, (l, r)) in result.eigenvalues.iter().zip(&result.residuals).enumerate() {
        writeln!(out, "{i},{l:.16e},{r:.16e}").unwrap();
    }
    out
}

/// One column per selected eigenvector, rows in lexicographic vertex order.
pub fn eigenvector_csv(result: &SpectrumResult) -> String {
    let mut out = result
        .eigenvectors
        .iter()
        .map(|(i, _)| format!("v{i}"))
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    let rows = result.eigenvectors.first().map_or(0, |(_, v)| v.len());
    for r in 0..rows {
        let line = result
            .eigenvectors
            .iter()
            .map(|(_, v)| format!("{:.16e}", v[r]))
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn histogram_csv(bins: &[HistogramBin]) -> String {
    let mut out = String::from("bin_lo,bin_hi,count\n");
    for b in bins {
        writeln!(out, "{:.16e},{:.16e},{}", b.lo, b.hi, b.count).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{eigen_decompose, Selection};
    use crate::matrix::DenseMatrix;

    #[test]
    fn spectrum_rows() {
        let a = DenseMatrix::from_rows(&[vec![2.0, -2.0], vec![-2.0, 2.0]]);
        let r = eigen_decompose(&a, Selection::Smallest(1)).unwrap();
        let csv = spectrum_csv(&r);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "index,eigenvalue,residual");
        assert!(lines[2].starts_with("1,4.0000000000000000e0,"));
        let vectors = eigenvector_csv(&r);
        assert_eq!(vectors.lines().count(), 3);
    }
}
