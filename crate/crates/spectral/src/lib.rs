//! Level operators of self-similar group actions (Markov, Laplacian, Hecke-type,
//! simplicial adjacency) and their spectra, computed with an in-crate dense
//! symmetric eigensolver.

pub mod diagnostics;
pub mod eigen;
pub mod export;
pub mod matrix;
pub mod operator;

pub use diagnostics::{
    kesten_bound, kesten_bound_check, schur_block_probe, spectral_convergence, spectrum_histogram,
    ConvergenceReport, KestenReport, SchurProbe, SpectralError,
};
pub use eigen::{eigen_decompose, eigenvalues, EigenError, Selection, SpectrumResult};
pub use matrix::DenseMatrix;
pub use operator::{build_operator, operator_from_graph, LevelOperator, OperatorError, OperatorKind};
