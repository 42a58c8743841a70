use std::collections::{BTreeMap, HashMap};

use crate::exactalg::{rf_series, Monomial, MultiPoly, RatFunc, Var};

use super::{ConeError, ConeSum, ConeTerm};

#[derive(Clone, Debug)]
pub enum Truncation {
    /// Keep monomials of total degree at most the cap.
    TotalDegree(u64),
    /// Keep monomials whose degree in each listed variable is at most its cap.
    PerVariable(BTreeMap<Var, u64>),
}

impl Truncation {
    fn keeps(&self, m: &Monomial) -> bool {
        match self {
            Truncation::TotalDegree(d) => m.total_degree() <= *d,
            Truncation::PerVariable(caps) => caps.iter().all(|(&v, &c)| (m.degree(v) as u64) <= c),
        }
    }
}

fn term_box(term: &ConeTerm, trunc: &Truncation) -> Result<Vec<(Var, i64, i64)>, ConeError> {
    let min_bases: Vec<Var> = term.min_exponents.iter().map(|m| m.base).collect();
    let linear: Vec<(&Var, &super::LinForm)> =
        term.mono_exponents.iter().filter(|(b, f)| !min_bases.contains(b) && f.coeffs().all(|(_, c)| c >= 0)).collect();
    let at_lower = |f: &super::LinForm| f.constant + f.coeffs().map(|(v, c)| c * term.lower_bounds[&v]).sum::<i64>();
    let mut out = Vec::new();
    for (&x, &lb) in &term.lower_bounds {
        let mut best: Option<i64> = None;
        let mut consider = |cap: i64, base0: i64, coef: i64| {
            if coef > 0 {
                let ub = lb + (cap - base0).div_euclid(coef);
                best = Some(best.map_or(ub, |b| b.min(ub)));
            }
        };
        match trunc {
            Truncation::TotalDegree(d) => {
                let coef: i64 = linear.iter().map(|(_, f)| f.coeff(x)).sum();
                let base0: i64 = linear.iter().map(|(_, f)| at_lower(f)).sum();
                consider(*d as i64, base0, coef);
            }
            Truncation::PerVariable(caps) => {
                for (b, f) in &linear {
                    if let Some(&cap) = caps.get(b) {
                        consider(cap as i64, at_lower(f), f.coeff(x));
                    }
                }
            }
        }
        let ub = best.ok_or(ConeError::CapTooLarge(u128::MAX))?;
        out.push((x, lb, ub));
    }
    Ok(out)
}

/// Sums the cone directly over the integer points of a truncation box.
pub fn enumerate_series(sum: &ConeSum, trunc: &Truncation, budget: u128) -> Result<MultiPoly, ConeError> {
    let mut total = MultiPoly::zero();
    for term in &sum.terms {
        term.validate()?;
        let scalar = term.scalar.to_poly().ok_or_else(|| ConeError::InvalidTerm("enumeration needs a polynomial scalar".into()))?;
        let bx = term_box(term, trunc)?;
        let size: u128 = bx.iter().map(|&(_, l, u)| if u < l { 0 } else { (u - l + 1) as u128 }).product();
        if size > budget {
            return Err(ConeError::CapTooLarge(size));
        }
        if size == 0 {
            continue;
        }
        let mut point: HashMap<Var, i64> = bx.iter().map(|&(v, l, _)| (v, l)).collect();
        let mut acc = MultiPoly::zero();
        'points: loop {
            if term.constraints.iter().all(|c| c.eval(&point).expect("bounded var") >= 0) {
                let mut exps: BTreeMap<Var, i64> = BTreeMap::new();
                for (&b, f) in &term.mono_exponents {
                    *exps.entry(b).or_insert(0) += f.eval(&point).expect("bounded var");
                }
                for m in &term.min_exponents {
                    let v = m.args.iter().map(|a| a.eval(&point).expect("bounded var")).min().expect("nonempty min");
                    *exps.entry(m.base).or_insert(0) += m.multiplier * v;
                }
                let mut pairs = Vec::new();
                for (b, e) in exps {
                    if e < 0 {
                        return Err(ConeError::NegativeExponent { var: b.to_string(), exponent: e });
                    }
                    pairs.push((b, e as u32));
                }
                let m = Monomial::from_pairs(pairs);
                if trunc.keeps(&m) {
                    acc.add_term(m, num_traits::One::one());
                }
            }
            for &(v, l, u) in &bx {
                let x = point.get_mut(&v).expect("box var");
                if *x < u {
                    *x += 1;
                    continue 'points;
                }
                *x = l;
            }
            break;
        }
        for (m, c) in (&acc * &scalar).terms() {
            if trunc.keeps(m) {
                total.add_term(m.clone(), c.clone());
            }
        }
    }
    Ok(total)
}

/// Taylor expansion of a rational function, truncated like [`enumerate_series`].
pub fn truncated_expansion(f: &RatFunc, trunc: &Truncation) -> Result<MultiPoly, ConeError> {
    let tv = Var::new("__deg");
    let cap = match trunc {
        Truncation::TotalDegree(d) => *d,
        Truncation::PerVariable(caps) => caps.values().sum(),
    };
    let map: HashMap<Var, RatFunc> = f.vars().into_iter().map(|v| (v, &RatFunc::var(v) * &RatFunc::var(tv))).collect();
    let g = f.substitute_many(&map)?;
    let s = rf_series(&g, tv, cap as usize)?;
    let mut out = MultiPoly::zero();
    for c in &s.coeffs {
        let p = c.to_poly().ok_or_else(|| ConeError::InvalidTerm(format!("expansion coefficient {c} is not a polynomial")))?;
        for (m, x) in p.terms() {
            if trunc.keeps(m) {
                out.add_term(m.clone(), x.clone());
            }
        }
    }
    Ok(out)
}

/// Compares direct enumeration of `sum` with the expansion of `closed`.
pub fn series_agrees(sum: &ConeSum, closed: &RatFunc, trunc: &Truncation, budget: u128) -> Result<bool, ConeError> {
    Ok(enumerate_series(sum, trunc, budget)? == truncated_expansion(closed, trunc)?)
}
