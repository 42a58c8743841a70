//! Closed forms of the local zeta functions and quantities derived from them:
//! the subset expansion of the product formula, Dirichlet coefficients of
//! Euler products, abscissae of convergence and topological zeta functions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{eps_topological, parse_rf, q_var, rf_equal, rf_series, t_var, AlgError, CycloProduct, CycloUnit, LaurentMono, RatFunc, Q};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("no proved closed form for n = {0}")]
    OutOfRange(usize),
    #[error("n = {n} exceeds the bound {bound}")]
    SizeLimit { n: usize, bound: usize },
    #[error("no splitting data for the prime {0}")]
    InsufficientFieldData(u64),
    #[error("coefficient {0} is not a non-negative integer")]
    NonIntegral(String),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Proved,
    Conjectured,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalZeta {
    pub n: usize,
    pub form: CycloProduct,
    pub source: Source,
}

impl LocalZeta {
    pub fn expand(&self) -> RatFunc {
        self.form.expand()
    }

    /// Coefficients of `t^0..=t^cap` at a numeric `q`.
    pub fn series_at(&self, q: u64, cap: usize) -> Result<Vec<Q>, CatalogError> {
        numeric_series(&self.expand(), q, cap)
    }
}

/// Coefficients of `t^0..=t^cap` of `f(q, t)` at a numeric `q`.
pub fn numeric_series(f: &RatFunc, q: u64, cap: usize) -> Result<Vec<Q>, CatalogError> {
    let g = f.substitute(q_var(), &RatFunc::int(q as i64))?;
    let s = rf_series(&g, t_var(), cap)?;
    (0..=cap).map(|k| s.coeff(k).as_constant().ok_or_else(|| CatalogError::NonIntegral(format!("t^{k}: {}", s.coeff(k))))).collect()
}

fn product(factors: &[(i64, u64, i64)]) -> CycloProduct {
    CycloProduct::from_factors(CycloUnit::one(), factors.iter().copied()).expect("nonzero exponents")
}

/// The proved forms for `n <= 3`, as displayed in their derivations.
pub fn closed_local(n: usize) -> Result<LocalZeta, CatalogError> {
    let f: &[(i64, u64, i64)] = match n {
        1 => &[(0, 1, 1), (1, 1, -1)],
        2 => &[(0, 1, 1), (2, 2, 1), (1, 1, -1), (3, 2, -1)],
        3 => &[(0, 1, 1), (2, 2, 1), (4, 3, 1), (1, 1, -1), (3, 2, -1), (5, 3, -1)],
        _ => return Err(CatalogError::OutOfRange(n)),
    };
    Ok(LocalZeta { n, form: product(f), source: Source::Proved })
}

/// `prod_{i=1..n} (1 - q^(2i-2) t^i) / (1 - q^(2i-1) t^i)`.
pub fn conjectured_local(n: usize) -> LocalZeta {
    let f: Vec<(i64, u64, i64)> = (1..=n as i64).flat_map(|i| [(2 * i - 2, i as u64, 1), (2 * i - 1, i as u64, -1)]).collect();
    LocalZeta { n, form: product(&f), source: if n <= 3 { Source::Proved } else { Source::Conjectured } }
}

/// The proved form where there is one, the conjectured product otherwise.
pub fn local(n: usize) -> LocalZeta {
    closed_local(n).unwrap_or_else(|_| conjectured_local(n))
}

pub const EXPANSION_BOUND: usize = 12;

/// The subset sum `sum_I (1 - q^-1)^|I| prod_{i in I} x_i / (1 - x_i)` with
/// `x_i = q^(2n-2i-1) t^(n-i)`, `I` over subsets of `{0..n-1}`, written out
/// term by term.
pub fn subset_expansion(n: usize) -> Result<RatFunc, CatalogError> {
    if n > EXPANSION_BOUND {
        return Err(CatalogError::SizeLimit { n, bound: EXPANSION_BOUND });
    }
    let f = parse_rf("1 - q^-1").expect("literal");
    let ratios: Vec<RatFunc> = (0..n as i64)
        .map(|i| {
            let x = LaurentMono::from_pairs([(q_var(), 2 * n as i64 - 2 * i - 1), (t_var(), n as i64 - i)]);
            let g = RatFunc::geometric(&x)?;
            Ok((&(&f * &RatFunc::laurent(Q::one(), &x)) * &g).reduce())
        })
        .collect::<Result<_, AlgError>>()?;
    let terms: Vec<RatFunc> =
        (0u32..1 << n).into_par_iter().map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).fold(RatFunc::one(), |acc, i| &acc * &ratios[i])).collect();
    Ok(terms.iter().fold(RatFunc::zero(), |acc, x| (&acc + x).reduce()))
}

/// Whether the subset expansion equals the product formula.
pub fn expansion_identity(n: usize) -> Result<bool, CatalogError> {
    Ok(rf_equal(&subset_expansion(n)?, &conjectured_local(n).expand()))
}

/// How the number field is given: `Q`, or the residue cardinalities of the
/// primes above each rational prime, as `(q, multiplicity)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldSpec {
    Rational,
    Splitting(BTreeMap<u64, Vec<(u64, usize)>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalZeta {
    pub n: usize,
    pub field: FieldSpec,
}

impl GlobalZeta {
    pub fn rational(n: usize) -> GlobalZeta {
        GlobalZeta { n, field: FieldSpec::Rational }
    }

    fn residue_fields(&self, p: u64) -> Result<Vec<(u64, usize)>, CatalogError> {
        match &self.field {
            FieldSpec::Rational => Ok(vec![(p, 1)]),
            FieldSpec::Splitting(map) => {
                let v = map.get(&p).ok_or(CatalogError::InsufficientFieldData(p))?;
                if v.iter().any(|(q, _)| power_of(*q, p).is_none()) {
                    return Err(CatalogError::InsufficientFieldData(p));
                }
                Ok(v.clone())
            }
        }
    }
}

fn power_of(mut q: u64, p: u64) -> Option<u32> {
    let mut f = 0;
    while q > 1 && q.is_multiple_of(p) {
        q /= p;
        f += 1;
    }
    (q == 1 && f > 0).then_some(f)
}

fn primes_up_to(m: usize) -> Vec<u64> {
    let mut sieve = vec![true; m + 1];
    let mut out = Vec::new();
    for i in 2..=m {
        if sieve[i] {
            out.push(i as u64);
            (i * i..=m).step_by(i).for_each(|j| sieve[j] = false);
        }
    }
    out
}

/// Coefficients `r_1, ..., r_count` of the Euler product of the local
/// factors. A `t`-degree `d` at a prime with residue field size `q`
/// contributes to dimension `q^d`.
pub fn dirichlet_coeffs(g: &GlobalZeta, count: usize) -> Result<Vec<BigInt>, CatalogError> {
    let f = local(g.n).expand();
    // per prime p, coefficients indexed by the exponent of p
    let locals: Vec<(u64, Vec<BigInt>)> = primes_up_to(count)
        .into_par_iter()
        .map(|p| {
            let mut cap = 0usize;
            while (p as u128).pow(cap as u32 + 1) <= count as u128 {
                cap += 1;
            }
            let mut acc = vec![BigInt::zero(); cap + 1];
            acc[0] = BigInt::one();
            for (q, mult) in g.residue_fields(p)? {
                let fdeg = power_of(q, p).expect("checked") as usize;
                let s = numeric_series(&f, q, cap / fdeg)?;
                let mut spread = vec![BigInt::zero(); cap + 1];
                for (d, c) in s.iter().enumerate() {
                    if !c.is_integer() || c.is_negative() {
                        return Err(CatalogError::NonIntegral(format!("{c} at q = {q}, t^{d}")));
                    }
                    spread[d * fdeg] = c.to_integer();
                }
                for _ in 0..mult {
                    acc = truncated_product(&acc, &spread);
                }
            }
            Ok((p, acc))
        })
        .collect::<Result<_, CatalogError>>()?;
    let r = (1..=count as u64)
        .map(|m| {
            let mut r = BigInt::one();
            for (p, coeffs) in &locals {
                let (mut k, mut x) = (0, m);
                while x.is_multiple_of(*p) {
                    x /= p;
                    k += 1;
                }
                if k > 0 {
                    r *= &coeffs[k];
                }
            }
            r
        })
        .collect();
    Ok(r)
}

fn truncated_product(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len()];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate().take(a.len() - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Coprime pairs `(a, b)` with `ab <= r.len()` where `r_ab != r_a r_b`.
pub fn multiplicativity_failures(r: &[BigInt]) -> Vec<(usize, usize)> {
    let n = r.len();
    let mut out = Vec::new();
    for a in 2..=n {
        for b in a + 1..=n / a {
            if gcd(a, b) == 1 && r[a * b - 1] != &r[a - 1] * &r[b - 1] {
                out.push((a, b));
            }
        }
    }
    out
}

/// `max (a + 1) / b` over the denominator factors `(1 - q^a t^b)` of a
/// local form, with the factors attaining it. Each such factor gives the
/// pole line `Re(s) = (a + 1) / b` of the Euler product.
pub fn abscissa_of(form: &CycloProduct) -> Option<(Q, Vec<(i64, u64)>)> {
    let mut best: Option<(Q, Vec<(i64, u64)>)> = None;
    for (a, b, _) in form.denominator_factors() {
        if b == 0 {
            continue;
        }
        let x = Q::new(BigInt::from(a + 1), BigInt::from(b));
        match &mut best {
            Some((v, w)) if *v == x => w.push((a, b)),
            Some((v, _)) if *v > x => {}
            _ => best = Some((x, vec![(a, b)])),
        }
    }
    best
}

/// Order of the pole of the Euler product at real `s0`: each denominator
/// factor with `(a + 1) / b = s0` contributes a pole of `zeta(bs - a)`, each
/// such numerator factor a zero.
pub fn pole_order(form: &CycloProduct, s0: &Q) -> i64 {
    form.factors.iter().filter(|((a, b), _)| *b > 0 && Q::new(BigInt::from(a + 1), BigInt::from(*b)) == *s0).map(|(_, e)| -e).sum()
}

pub fn abscissa(n: usize) -> Q {
    abscissa_of(&local(n).form).map(|(a, _)| a).unwrap_or_else(Q::zero)
}

/// The topological zeta function, the `p -> 1` limit of the local form.
pub fn topological(n: usize) -> Result<RatFunc, CatalogError> {
    Ok(eps_topological(&local(n).form)?)
}

/// `prod_{i=1..n} (is - 2i + 2) / (is - 2i + 1)`.
pub fn conjectured_topological(n: usize) -> RatFunc {
    (1..=n as i64).fold(RatFunc::one(), |acc, i| {
        let f = parse_rf(&format!("({i}*s - {}) / ({i}*s - {})", 2 * i - 2, 2 * i - 1)).expect("literal");
        &acc * &f
    })
}
