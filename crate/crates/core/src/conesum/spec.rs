use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::exactalg::{parse_rf, RatFunc, Var};

use super::{resolve, ConeError, ConeSum, ConeTerm, Grading, LinForm};

/// `base^(mult * min(args))` in textual form.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinSpec {
    pub base: String,
    #[serde(default = "one")]
    pub mult: i64,
    pub args: Vec<String>,
}

fn one() -> i64 {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermSpec {
    #[serde(default)]
    pub scalar: Option<String>,
    /// Base variable to affine exponent.
    #[serde(default)]
    pub mono: BTreeMap<String, String>,
    #[serde(default)]
    pub mins: Vec<MinSpec>,
    /// Affine forms required to be nonnegative.
    #[serde(default)]
    pub constraints: Vec<String>,
    /// Overrides the sum-level lower bounds.
    #[serde(default)]
    pub lower_bounds: Option<BTreeMap<String, i64>>,
}

/// A cone sum in textual form, optionally with its expected closed form and a
/// specialization of the base variables.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConeSpec {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub lower_bounds: BTreeMap<String, i64>,
    pub terms: Vec<TermSpec>,
    #[serde(default)]
    pub scalar: Option<String>,
    #[serde(default)]
    pub grading: Option<Vec<BTreeMap<String, i64>>>,
    #[serde(default)]
    pub expected: Option<String>,
    /// The closed form exactly as printed in the source, when it differs from `expected`.
    #[serde(default)]
    pub printed: Option<String>,
    /// How `expected` was read off `printed`.
    #[serde(default)]
    pub reading: Option<String>,
    /// Substitution applied to the closed form, for example `a -> q^3*t^3`.
    #[serde(default)]
    pub specialize: BTreeMap<String, String>,
    #[serde(default)]
    pub specialized_expected: Option<String>,
    #[serde(default)]
    pub specialized_printed: Option<String>,
    #[serde(default)]
    pub specialized_reading: Option<String>,
}

impl ConeSpec {
    pub fn to_cone_sum(&self) -> Result<ConeSum, ConeError> {
        let scalar = match &self.scalar {
            Some(s) => parse_rf(s)?,
            None => RatFunc::one(),
        };
        let mut terms = Vec::new();
        for t in &self.terms {
            let lbs = t.lower_bounds.as_ref().unwrap_or(&self.lower_bounds);
            let mut term = ConeTerm::new(lbs.iter().map(|(v, &b)| (Var::new(v), b)));
            let ts = match &t.scalar {
                Some(s) => parse_rf(s)?,
                None => RatFunc::one(),
            };
            term.scalar = &ts * &scalar;
            for (b, e) in &t.mono {
                term = term.with_power(Var::new(b), LinForm::parse(e)?);
            }
            for m in &t.mins {
                let args = m.args.iter().map(|a| LinForm::parse(a)).collect::<Result<Vec<_>, _>>()?;
                term = term.with_min(Var::new(&m.base), m.mult, args);
            }
            for c in &t.constraints {
                term = term.with_constraint(LinForm::parse(c)?);
            }
            terms.push(term);
        }
        let mut sum = ConeSum::new(terms);
        if let Some(g) = &self.grading {
            sum.grading = Some(Grading { levels: g.iter().map(|w| w.iter().map(|(v, &k)| (Var::new(v), k)).collect()).collect() });
        }
        Ok(sum)
    }

    pub fn expected(&self) -> Result<Option<RatFunc>, ConeError> {
        Ok(self.expected.as_deref().map(parse_rf).transpose()?)
    }

    pub fn printed(&self) -> Result<Option<RatFunc>, ConeError> {
        Ok(self.printed.as_deref().map(parse_rf).transpose()?)
    }

    pub fn specialization(&self) -> Result<HashMap<Var, RatFunc>, ConeError> {
        let mut m = HashMap::new();
        for (v, e) in &self.specialize {
            m.insert(Var::new(v), parse_rf(e)?);
        }
        Ok(m)
    }

    pub fn specialized_expected(&self) -> Result<Option<RatFunc>, ConeError> {
        Ok(self.specialized_expected.as_deref().map(parse_rf).transpose()?)
    }

    pub fn specialized_printed(&self) -> Result<Option<RatFunc>, ConeError> {
        Ok(self.specialized_printed.as_deref().map(parse_rf).transpose()?)
    }

    /// Resolves the sum and applies the specialization.
    pub fn resolve_specialized(&self) -> Result<(RatFunc, Option<RatFunc>), ConeError> {
        let r = derive_variant(self)?;
        if self.specialize.is_empty() {
            return Ok((r, None));
        }
        let s = r.substitute_many(&self.specialization()?)?.reduce();
        Ok((r, Some(s)))
    }
}

/// Resolves a textual cone sum; the entry point for new summation variants.
pub fn derive_variant(spec: &ConeSpec) -> Result<RatFunc, ConeError> {
    resolve(&spec.to_cone_sum()?)
}
