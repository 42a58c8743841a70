//! Exact computation of the representation zeta function of the Heisenberg
//! group over `O[x]/(x^n)`.
//!
//! The crate is layered bottom-up: [`exactalg`] provides exact algebra,
//! [`conesum`] sums monomials over polyhedral index sets, [`heis`] builds the
//! commutator matrices and the defining p-adic integral, [`padic`] rewrites
//! that integral region by region, [`enum_oracle`] evaluates it by brute-force
//! enumeration, and [`catalog`] collects closed forms and derived quantities.

pub mod catalog;
pub mod conesum;
pub mod enum_oracle;
pub mod exactalg;
pub mod heis;
pub mod padic;
