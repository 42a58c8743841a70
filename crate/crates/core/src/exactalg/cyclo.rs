use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{q_int, AlgError, LaurentMono, MultiPoly, RatFunc, Var, Q};

pub fn q_var() -> Var {
    Var::new("q")
}

pub fn t_var() -> Var {
    Var::new("t")
}

pub fn s_var() -> Var {
    Var::new("s")
}

/// `coeff * q^q_exp * t^t_exp`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloUnit {
    pub coeff: Q,
    pub q_exp: i64,
    pub t_exp: i64,
}

impl CycloUnit {
    pub fn one() -> CycloUnit {
        CycloUnit { coeff: Q::one(), q_exp: 0, t_exp: 0 }
    }
}

/// `unit * prod (1 - q^a t^b)^e`, keyed by `(a, b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloProduct {
    pub unit: CycloUnit,
    pub factors: BTreeMap<(i64, u64), i64>,
}

impl CycloProduct {
    pub fn one() -> CycloProduct {
        CycloProduct { unit: CycloUnit::one(), factors: BTreeMap::new() }
    }

    pub fn from_factors(unit: CycloUnit, factors: impl IntoIterator<Item = (i64, u64, i64)>) -> Result<CycloProduct, AlgError> {
        let mut c = CycloProduct { unit, factors: BTreeMap::new() };
        for (a, b, e) in factors {
            c.push(a, b, e)?;
        }
        Ok(c)
    }

    /// Multiplies in `(1 - q^a t^b)^e`.
    pub fn push(&mut self, a: i64, b: u64, e: i64) -> Result<(), AlgError> {
        if a == 0 && b == 0 {
            return Err(AlgError::Parse("factor 1 - 1 vanishes identically".into()));
        }
        let entry = self.factors.entry((a, b)).or_insert(0);
        *entry += e;
        if *entry == 0 {
            self.factors.remove(&(a, b));
        }
        Ok(())
    }

    pub fn mul(&self, other: &CycloProduct) -> CycloProduct {
        let mut out = self.clone();
        out.unit.coeff *= &other.unit.coeff;
        out.unit.q_exp += other.unit.q_exp;
        out.unit.t_exp += other.unit.t_exp;
        for (&(a, b), &e) in &other.factors {
            out.push(a, b, e).expect("valid factor");
        }
        out
    }

    pub fn inv(&self) -> Result<CycloProduct, AlgError> {
        if self.unit.coeff.is_zero() {
            return Err(AlgError::DivisionByZero);
        }
        Ok(CycloProduct {
            unit: CycloUnit { coeff: self.unit.coeff.recip(), q_exp: -self.unit.q_exp, t_exp: -self.unit.t_exp },
            factors: self.factors.iter().map(|(&k, &e)| (k, -e)).collect(),
        })
    }

    /// Sum of exponents, the order of vanishing at `q = 1, t = 1`.
    pub fn order(&self) -> i64 {
        self.factors.values().sum()
    }

    pub fn expand(&self) -> RatFunc {
        let (q, t) = (q_var(), t_var());
        let mut out = RatFunc::laurent(self.unit.coeff.clone(), &LaurentMono::from_pairs([(q, self.unit.q_exp), (t, self.unit.t_exp)]));
        let mut den = RatFunc::one();
        for (&(a, b), &e) in &self.factors {
            let f = RatFunc::one_minus(&LaurentMono::from_pairs([(q, a), (t, b as i64)]));
            if e > 0 {
                out = &out * &f.pow(e).expect("nonnegative power");
            } else {
                den = &den * &f.pow(-e).expect("nonnegative power");
            }
        }
        &out / &den
    }

    pub fn numerator_factors(&self) -> impl Iterator<Item = (i64, u64, i64)> + '_ {
        self.factors.iter().filter(|(_, &e)| e > 0).map(|(&(a, b), &e)| (a, b, e))
    }

    pub fn denominator_factors(&self) -> impl Iterator<Item = (i64, u64, i64)> + '_ {
        self.factors.iter().filter(|(_, &e)| e < 0).map(|(&(a, b), &e)| (a, b, -e))
    }
}

fn fmt_qt(a: i64, b: u64) -> String {
    let mut parts = Vec::new();
    match a {
        0 => {}
        1 => parts.push("q".to_string()),
        _ => parts.push(format!("q^{a}")),
    }
    match b {
        0 => {}
        1 => parts.push("t".to_string()),
        _ => parts.push(format!("t^{b}")),
    }
    parts.join("*")
}

fn fmt_side(it: impl Iterator<Item = (i64, u64, i64)>) -> Vec<String> {
    it.map(|(a, b, e)| {
        let f = format!("(1 - {})", fmt_qt(a, b));
        if e == 1 {
            f
        } else {
            format!("{f}^{e}")
        }
    })
    .collect()
}

impl fmt::Display for CycloProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut num = Vec::new();
        if !self.unit.coeff.is_one() {
            num.push(format!("{}", self.unit.coeff));
        }
        let u = fmt_qt(self.unit.q_exp.max(0), self.unit.t_exp.max(0) as u64);
        if !u.is_empty() {
            num.push(u);
        }
        num.extend(fmt_side(self.numerator_factors()));
        let mut den = Vec::new();
        let du = fmt_qt((-self.unit.q_exp).max(0), (-self.unit.t_exp).max(0) as u64);
        if !du.is_empty() {
            den.push(du);
        }
        den.extend(fmt_side(self.denominator_factors()));
        let n = if num.is_empty() { "1".to_string() } else { num.join("*") };
        if den.is_empty() {
            f.write_str(&n)
        } else {
            write!(f, "{n} / ({})", den.join("*"))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CycloJson {
    unit: UnitJson,
    factors: Vec<(i64, u64, i64)>,
}

#[derive(Serialize, Deserialize)]
struct UnitJson {
    coeff: String,
    q: i64,
    t: i64,
}

impl Serialize for CycloProduct {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CycloJson {
            unit: UnitJson { coeff: self.unit.coeff.to_string(), q: self.unit.q_exp, t: self.unit.t_exp },
            factors: self.factors.iter().map(|(&(a, b), &e)| (a, b, e)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloProduct {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = CycloJson::deserialize(d)?;
        let coeff: Q = super::parse_rational(&j.unit.coeff).map_err(serde::de::Error::custom)?;
        CycloProduct::from_factors(CycloUnit { coeff, q_exp: j.unit.q, t_exp: j.unit.t }, j.factors).map_err(serde::de::Error::custom)
    }
}

/// Leading coefficient of the expansion at `q = 1 + eps`, `t = (1 + eps)^(-s)`.
///
/// Each factor `1 - q^a t^b` behaves like `(b*s - a) * eps`, so for a product of
/// total order zero the limit is `coeff * prod (b*s - a)^e`.
pub fn eps_topological(c: &CycloProduct) -> Result<RatFunc, AlgError> {
    let order = c.order();
    if order != 0 {
        return Err(AlgError::OrderMismatch(order));
    }
    let s = s_var();
    let mut out = RatFunc::constant(c.unit.coeff.clone());
    for (&(a, b), &e) in &c.factors {
        let lin = &MultiPoly::var(s).scale(&q_int(b as i64)) - &MultiPoly::int(a);
        out = &out * &RatFunc::from_poly(lin).pow(e)?;
    }
    Ok(out)
}

/// Laurent expansion in `eps` with coefficients in `s`.
#[derive(Clone, Debug)]
pub struct EpsSeries {
    pub valuation: i64,
    pub coeffs: Vec<RatFunc>,
}

fn binom_in_s(alpha: i64, beta: i64, k: usize) -> MultiPoly {
    // binom(alpha - beta*s, k) as a polynomial in s
    let s = s_var();
    let z = &MultiPoly::int(alpha) - &MultiPoly::var(s).scale(&q_int(beta));
    let mut out = MultiPoly::one();
    let mut fact = Q::one();
    for j in 0..k {
        out = &out * &(&z - &MultiPoly::int(j as i64));
        fact *= q_int(j as i64 + 1);
    }
    out.scale(&fact.recip())
}

fn poly_eps(p: &MultiPoly, order: usize) -> Result<Vec<MultiPoly>, AlgError> {
    let (q, t) = (q_var(), t_var());
    let mut out = vec![MultiPoly::zero(); order + 1];
    for (m, c) in p.terms() {
        if m.vars().any(|v| v != q && v != t) {
            return Err(AlgError::Parse(format!("unexpected variable in {m}")));
        }
        let (alpha, beta) = (m.degree(q) as i64, m.degree(t) as i64);
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = &*slot + &binom_in_s(alpha, beta, k).scale(c);
        }
    }
    Ok(out)
}

/// Expands `f(1 + eps, (1 + eps)^(-s))` through `eps^order` of the numerator and denominator.
pub fn eps_expand(f: &RatFunc, order: usize) -> Result<EpsSeries, AlgError> {
    let n = poly_eps(f.num(), order)?;
    let d = poly_eps(&f.den(), order)?;
    let vn = n.iter().position(|c| !c.is_zero()).ok_or(AlgError::InsufficientOrder(order))?;
    let vd = d.iter().position(|c| !c.is_zero()).ok_or(AlgError::InsufficientOrder(order))?;
    let len = (order + 1 - vn).min(order + 1 - vd);
    let d0 = RatFunc::from_poly(d[vd].clone());
    let mut coeffs: Vec<RatFunc> = Vec::with_capacity(len);
    for k in 0..len {
        let mut acc = RatFunc::from_poly(n[vn + k].clone());
        for j in 1..=k {
            if !d[vd + j].is_zero() {
                acc = &acc - &(&RatFunc::from_poly(d[vd + j].clone()) * &coeffs[k - j]);
            }
        }
        coeffs.push((&acc / &d0).reduce());
    }
    Ok(EpsSeries { valuation: vn as i64 - vd as i64, coeffs })
}
