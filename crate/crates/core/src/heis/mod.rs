//! The Heisenberg group scheme over `O[x]/(x^n)`: commutator matrices,
//! principal-minor families and the p-adic integral whose value gives the
//! local representation zeta function.
//!
//! The commutator matrix is `R_n = [[0, Q_n], [-Q_n^t, 0]]` with the Hankel
//! block `Q_n[i][j] = Y_{i+j-1}` (zero below the antidiagonal). `F_j` is the
//! set of principal `2j x 2j` minors of `R_n`. Each one is the square of a
//! Pfaffian, so the integrand can be written either with the minors and the
//! exponent `-s/2` or with the Pfaffians and the exponent `-s`.

mod integral;
mod matrix;

pub use integral::{build_integral, letter_names, Domain, Factor, IntegrandForm, PadicIntegral, SExp, ZetaAssembly};
pub use matrix::{build_matrices, det_bareiss, minor_family, reduced_listing, y_vars, CommutatorMatrix, IntPoly, MinorFamily};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeisError {
    #[error("n = {n} exceeds the configured bound {bound}")]
    SizeLimit { n: usize, bound: usize },
    #[error("n must be positive")]
    ZeroRank,
}

/// Largest `n` for which [`minor_family`] enumerates all principal minors.
pub const MINOR_FAMILY_BOUND: usize = 6;
