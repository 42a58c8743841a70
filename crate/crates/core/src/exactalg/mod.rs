//! Exact arithmetic: sparse polynomials, rational functions with factored
//! denominators, truncated series, cyclotomic-type products and the
//! `q -> 1` expansion used for topological limits.

mod cyclo;
mod mono;
mod parse;
mod poly;
mod ratfunc;
mod series;
mod var;

use thiserror::Error;

pub use cyclo::{eps_expand, eps_topological, q_var, s_var, t_var, CycloProduct, CycloUnit, EpsSeries};
pub use mono::{LaurentMono, Monomial};
pub use parse::{parse_poly, parse_rational, parse_rf};
pub use poly::{q_int, MultiPoly, Q};
pub use ratfunc::{rf_equal, RatFunc};
pub use series::{rf_series, TSeries};
pub use var::Var;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator is not a unit in the power series ring in {0}")]
    NonUnitDenominator(String),
    #[error("product has order {0} at q = t = 1; the topological limit needs order 0")]
    OrderMismatch(i64),
    #[error("expansion vanishes through order {0}")]
    InsufficientOrder(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Serializes as the parseable display string.
pub mod rf_string {
    use super::{parse_rf, RatFunc};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &RatFunc, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RatFunc, D::Error> {
        let s = String::deserialize(d)?;
        parse_rf(&s).map_err(serde::de::Error::custom)
    }
}

impl serde::Serialize for RatFunc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        rf_string::serialize(self, s)
    }
}

impl<'de> serde::Deserialize<'de> for RatFunc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        rf_string::deserialize(d)
    }
}

impl serde::Serialize for MultiPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for MultiPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = <String as serde::Deserialize>::deserialize(d)?;
        parse_poly(&s).map_err(serde::de::Error::custom)
    }
}

impl serde::Serialize for Monomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Monomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = <String as serde::Deserialize>::deserialize(d)?;
        let p = parse_poly(&s).map_err(serde::de::Error::custom)?;
        match p.as_term() {
            Some((m, c)) if num_traits::One::is_one(c) => Ok(m.clone()),
            _ => Err(serde::de::Error::custom(format!("not a monomial: {s:?}"))),
        }
    }
}
