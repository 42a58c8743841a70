//! Region-by-region evaluation of p-adic integrals.
//!
//! A derivation starts from an integral over `p x o^k` and applies scripted
//! steps: valuation splits, monomial substitutions, unit/ideal splits, residue
//! class splits and changes of variable. After every step the integrand is
//! normalized (unit factors dropped, dominated norm entries removed, common
//! monomials pulled out). Once every leaf is a product of monomial powers and
//! norms of monomial sets it becomes a cone sum and is evaluated exactly.
//!
//! Scripts are data; the built-in ones live in `fixtures/scripts`.

mod derivation;
mod monomial;
mod region;
mod steps;

pub use derivation::{Check, CheckOutcome, CheckStatus, Derivation, DerivationReport, IntegralSource, PartitionStats, RegionRow, Script};
pub use monomial::{monomialize, region_measure, MonomialSum};
pub use region::{padic_val, RegionIntegral, ValCmp};
pub use steps::Step;

use thiserror::Error;

use crate::conesum::ConeError;
use crate::exactalg::AlgError;
use crate::heis::HeisError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PadicError {
    #[error("step does not apply: {0}")]
    InapplicableStep(String),
    #[error("cannot certify a unit: {0}")]
    UnitCheckFailed(String),
    #[error("integrand is not monomial: {0}")]
    NotMonomial(String),
    #[error("non-integral exponent: {0}")]
    NonIntegralExponent(String),
    #[error("unknown region {0}")]
    UnknownRegion(String),
    #[error("children do not partition the parent: {0}")]
    PartitionFailure(String),
    #[error("measures do not add up: {0}")]
    MeasureMismatch(String),
    #[error("bad script: {0}")]
    Fixture(String),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error(transparent)]
    Heis(#[from] HeisError),
}

const SCRIPTS: [(&str, &str); 3] = [
    ("aux-xy", include_str!("../../fixtures/scripts/aux-xy.json")),
    ("n2", include_str!("../../fixtures/scripts/n2.json")),
    ("n3", include_str!("../../fixtures/scripts/n3.json")),
];

/// Names of the built-in derivation scripts.
pub fn script_names() -> Vec<&'static str> {
    SCRIPTS.iter().map(|(n, _)| *n).collect()
}

pub fn builtin_script(name: &str) -> Result<Script, PadicError> {
    parse_script(script_source(name).ok_or_else(|| PadicError::Fixture(format!("no script named {name}")))?)
}

/// Source text of a built-in script.
pub fn script_source(name: &str) -> Option<&'static str> {
    SCRIPTS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn parse_script(src: &str) -> Result<Script, PadicError> {
    serde_json::from_str(src).map_err(|e| PadicError::Fixture(e.to_string()))
}
