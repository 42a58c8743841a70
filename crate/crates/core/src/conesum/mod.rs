//! Closed-form summation of monomials over integer points of polyhedral
//! index sets, with exponents that may involve minima of affine forms.
//!
//! A [`ConeSum`] is a list of [`ConeTerm`]s. Each term sums
//! `scalar * prod_b b^(e_b(X)) * prod_k base_k^(mult_k * min(args_k))` over
//! integer points `X` satisfying lower bounds and affine constraints `>= 0`.
//! [`resolve`] first splits every minimum into regions where one argument
//! wins, then eliminates index variables one at a time by geometric
//! summation. [`enumerate_series`] sums the same set directly, point by point,
//! inside a truncation box.

mod enumerate;
mod linform;
mod resolve;
mod spec;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::exactalg::{AlgError, LaurentMono, RatFunc, Var};

pub use enumerate::{enumerate_series, series_agrees, truncated_expansion, Truncation};
pub use linform::LinForm;
pub use resolve::resolve;
pub use spec::{derive_variant, ConeSpec, MinSpec, TermSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConeError {
    #[error("sum diverges: ratio {0} does not have positive degree")]
    Divergent(String),
    #[error("unsupported cone: {0}")]
    UnsupportedCone(String),
    #[error("invalid term: {0}")]
    InvalidTerm(String),
    #[error("enumeration box exceeds the point budget ({0} points)")]
    CapTooLarge(u128),
    #[error("negative exponent {exponent} for {var} at an enumerated point")]
    NegativeExponent { var: String, exponent: i64 },
    #[error("bad corpus: {0}")]
    Fixture(String),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

/// `base^(multiplier * min(args))`
#[derive(Clone, Debug, PartialEq)]
pub struct MinExponent {
    pub base: Var,
    pub multiplier: i64,
    pub args: Vec<LinForm>,
}

#[derive(Clone, Debug)]
pub struct ConeTerm {
    pub scalar: RatFunc,
    pub mono_exponents: BTreeMap<Var, LinForm>,
    pub min_exponents: Vec<MinExponent>,
    pub lower_bounds: BTreeMap<Var, i64>,
    pub constraints: Vec<LinForm>,
}

impl ConeTerm {
    pub fn new(lower_bounds: impl IntoIterator<Item = (Var, i64)>) -> ConeTerm {
        ConeTerm {
            scalar: RatFunc::one(),
            mono_exponents: BTreeMap::new(),
            min_exponents: Vec::new(),
            lower_bounds: lower_bounds.into_iter().collect(),
            constraints: Vec::new(),
        }
    }

    /// Multiplies the summand by `base^form`.
    pub fn with_power(mut self, base: Var, form: LinForm) -> ConeTerm {
        let e = self.mono_exponents.entry(base).or_default();
        *e = e.add(&form);
        self
    }

    pub fn with_min(mut self, base: Var, multiplier: i64, args: Vec<LinForm>) -> ConeTerm {
        self.min_exponents.push(MinExponent { base, multiplier, args });
        self
    }

    pub fn with_constraint(mut self, c: LinForm) -> ConeTerm {
        self.constraints.push(c);
        self
    }

    pub fn with_scalar(mut self, s: RatFunc) -> ConeTerm {
        self.scalar = s;
        self
    }

    /// Every index variable used must carry a lower bound.
    pub fn validate(&self) -> Result<(), ConeError> {
        let mut used = Vec::new();
        for f in self.mono_exponents.values() {
            used.extend(f.vars());
        }
        for m in &self.min_exponents {
            if m.args.is_empty() {
                return Err(ConeError::InvalidTerm(format!("min with no arguments on {}", m.base)));
            }
            for a in &m.args {
                used.extend(a.vars());
            }
        }
        for c in &self.constraints {
            used.extend(c.vars());
        }
        for v in used {
            if !self.lower_bounds.contains_key(&v) {
                return Err(ConeError::InvalidTerm(format!("index variable {v} has no lower bound")));
            }
        }
        for b in self.mono_exponents.keys() {
            if self.lower_bounds.contains_key(b) {
                return Err(ConeError::InvalidTerm(format!("{b} is used both as base and as index")));
            }
        }
        Ok(())
    }

    pub fn index_vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.lower_bounds.keys().copied()
    }

    pub fn base_vars(&self) -> Vec<Var> {
        let mut v: Vec<Var> = self.mono_exponents.keys().copied().chain(self.min_exponents.iter().map(|m| m.base)).collect();
        v.sort();
        v.dedup();
        v
    }
}

/// Lexicographic list of weight vectors deciding which monomials count as small.
/// A geometric ratio may be summed to infinity only when its degree is positive.
#[derive(Clone, Debug, PartialEq)]
pub struct Grading {
    pub levels: Vec<BTreeMap<Var, i64>>,
}

impl Grading {
    pub fn uniform(vars: impl IntoIterator<Item = Var>) -> Grading {
        Grading { levels: vec![vars.into_iter().map(|v| (v, 1)).collect()] }
    }

    /// For series in `t` with `q`-dependent coefficients: `t` first, then `q^-1`.
    pub fn qt() -> Grading {
        let (q, t) = (Var::new("q"), Var::new("t"));
        Grading { levels: vec![[(t, 1)].into_iter().collect(), [(q, -1)].into_iter().collect()] }
    }

    pub fn degree(&self, m: &LaurentMono) -> Vec<i64> {
        self.levels.iter().map(|w| m.iter().map(|(v, e)| w.get(&v).copied().unwrap_or(0) * e).sum()).collect()
    }

    pub fn is_positive(&self, m: &LaurentMono) -> bool {
        self.degree(m).into_iter().find(|&d| d != 0).is_some_and(|d| d > 0)
    }
}

#[derive(Clone, Debug)]
pub struct ConeSum {
    pub terms: Vec<ConeTerm>,
    pub grading: Option<Grading>,
}

impl ConeSum {
    pub fn new(terms: Vec<ConeTerm>) -> ConeSum {
        ConeSum { terms, grading: None }
    }

    pub fn with_grading(mut self, g: Grading) -> ConeSum {
        self.grading = Some(g);
        self
    }

    pub fn base_vars(&self) -> Vec<Var> {
        let mut v: Vec<Var> = self.terms.iter().flat_map(|t| t.base_vars()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn grading(&self) -> Grading {
        self.grading.clone().unwrap_or_else(|| Grading::uniform(self.base_vars()))
    }
}

const LEMMA_FIXTURE: &str = include_str!("../../fixtures/lemmas.json");

/// The built-in corpus: the four summation identities and the three variants.
pub fn lemma_corpus() -> Vec<ConeSpec> {
    parse_corpus(LEMMA_FIXTURE).expect("embedded lemma fixture is valid")
}

/// Source text of the built-in corpus.
pub fn lemma_fixture() -> &'static str {
    LEMMA_FIXTURE
}

pub fn parse_corpus(src: &str) -> Result<Vec<ConeSpec>, ConeError> {
    serde_json::from_str(src).map_err(|e| ConeError::Fixture(e.to_string()))
}
