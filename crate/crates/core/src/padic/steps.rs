use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::exactalg::{parse_rf, Monomial, MultiPoly, RatFunc, Var, Q};
use crate::heis::{Domain, Factor};

use super::region::{RegionIntegral, ValCmp};
use super::PadicError;

/// One rewriting step of a derivation script. Splits replace a region by two
/// children; the other steps rewrite a region in place.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Step {
    /// Children `le: v(a) <= v(b)` and `gt: v(a) > v(b)`.
    SplitValuation { region: String, a: Monomial, b: Monomial, le: String, gt: String },
    /// `var := by * new`, consuming the constraint `v(by) <= v(var)` (new in
    /// `o`) or `v(by) < v(var)` (new in `p`).
    Substitute { region: String, var: Var, by: Var, new: Var, domain: Domain },
    /// Children with `var` a unit and `var` in `p`.
    SplitUnit { region: String, var: Var, unit: String, ideal: String },
    /// Splits the residue classes of unit variables by whether
    /// `equation = ±M ± 1` vanishes mod `p`.
    CosetSplit { region: String, vars: Vec<Var>, equation: MultiPoly, off: String, on: String },
    /// Records `expr` as a unit after checking it.
    AssertUnit { region: String, expr: MultiPoly },
    /// Introduces `new := expr` in `p` in place of `replaces`, for `expr`
    /// known to lie in `p` and linear in `replaces` with unit coefficient.
    ChangeVariable { region: String, replaces: Var, new: Var, expr: MultiPoly },
}

impl Step {
    pub fn region(&self) -> &str {
        match self {
            Step::SplitValuation { region, .. }
            | Step::Substitute { region, .. }
            | Step::SplitUnit { region, .. }
            | Step::CosetSplit { region, .. }
            | Step::AssertUnit { region, .. }
            | Step::ChangeVariable { region, .. } => region,
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::SplitValuation { region, a, b, le, gt } => write!(f, "{region}: v({a}) <= v({b}) -> {le}, else {gt}"),
            Step::Substitute { region, var, by, new, domain } => write!(f, "{region}: {var} := {by}*{new}, {new} ∈ {domain}"),
            Step::SplitUnit { region, var, unit, ideal } => write!(f, "{region}: {var} unit -> {unit}, {var} ∈ p -> {ideal}"),
            Step::CosetSplit { region, equation, off, on, .. } => write!(f, "{region}: {equation} unit -> {off}, ∈ p -> {on}"),
            Step::AssertUnit { region, expr } => write!(f, "{region}: {expr} is a unit"),
            Step::ChangeVariable { region, replaces, new, expr } => write!(f, "{region}: {new} := {expr} replaces {replaces}"),
        }
    }
}

fn inapplicable(step: &Step, why: impl fmt::Display) -> PadicError {
    PadicError::InapplicableStep(format!("{step}: {why}"))
}

fn subst_monomial(m: &Monomial, var: Var, value: &Monomial) -> Monomial {
    let k = m.degree(var);
    m.without(var).mul(&value.pow(k))
}

/// Applies a step that produces children.
pub(crate) fn split(r: &RegionIntegral, step: &Step) -> Result<Vec<RegionIntegral>, PadicError> {
    let tag = step.to_string();
    let mut out = match step {
        Step::SplitValuation { a, b, le, gt, .. } => {
            for v in a.vars().chain(b.vars()) {
                if !matches!(r.domain(v), Some(Domain::Whole | Domain::Ideal)) {
                    return Err(inapplicable(step, format!("{v} has fixed valuation")));
                }
            }
            let mut c1 = r.child(le, tag.clone());
            c1.constraints.push(ValCmp { lhs: a.clone(), rhs: b.clone(), strict: false });
            let mut c2 = r.child(gt, tag);
            c2.constraints.push(ValCmp { lhs: b.clone(), rhs: a.clone(), strict: true });
            vec![c1, c2]
        }
        Step::SplitUnit { var, unit, ideal, .. } => {
            if r.domain(*var) != Some(Domain::Whole) {
                return Err(inapplicable(step, format!("{var} does not range over o")));
            }
            if r.constraints.iter().any(|c| c.lhs.degree(*var) > 0 || c.rhs.degree(*var) > 0) {
                return Err(inapplicable(step, format!("{var} occurs in a valuation constraint")));
            }
            let mut c1 = r.child(unit, tag.clone());
            c1.set_domain(*var, Domain::Unit);
            let mut c2 = r.child(ideal, tag);
            c2.set_domain(*var, Domain::Ideal);
            vec![c1, c2]
        }
        Step::CosetSplit { vars, equation, off, on, .. } => {
            for v in vars {
                if r.domain(*v) != Some(Domain::Unit) {
                    return Err(inapplicable(step, format!("{v} is not a unit variable")));
                }
            }
            if equation.vars().iter().any(|v| !vars.contains(v)) {
                return Err(inapplicable(step, "equation involves other variables"));
            }
            let (on_count, off_count) = coset_counts(equation, vars.len())
                .ok_or_else(|| inapplicable(step, "equation is not of the form ±M ± 1 with M linear in some variable"))?;
            let mut c1 = r.child(off, tag.clone());
            let mut c2 = r.child(on, tag);
            for c in [&mut c1, &mut c2] {
                for v in vars {
                    c.set_domain(*v, Domain::Coset);
                }
            }
            c1.units.push(equation.clone());
            c1.multiplicity = off_count;
            c2.in_ideal.push(equation.clone());
            c2.multiplicity = on_count;
            vec![c1, c2]
        }
        _ => return Err(inapplicable(step, "not a split")),
    };
    for c in out.iter_mut() {
        c.normalize()?;
    }
    Ok(out)
}

/// Number of residue classes in `(F_q^*)^k` on which `equation` vanishes, and
/// on which it does not.
fn coset_counts(equation: &MultiPoly, k: usize) -> Option<(RatFunc, RatFunc)> {
    let terms: Vec<_> = equation.terms().collect();
    if terms.len() != 2 || !terms.iter().all(|(_, c)| c.abs().is_one()) {
        return None;
    }
    let mono = terms.iter().find(|(m, _)| !m.is_one())?.0;
    if !terms.iter().any(|(m, _)| m.is_one()) || !mono.iter().any(|(_, e)| e == 1) || k == 0 {
        return None;
    }
    let qm1 = parse_rf("q - 1").expect("literal");
    let on = qm1.pow(k as i64 - 1).ok()?;
    let all = qm1.pow(k as i64).ok()?;
    let off = (&all - &on).reduce();
    Some((on, off))
}

/// Applies a step that rewrites a region in place.
pub(crate) fn rewrite(r: &RegionIntegral, step: &Step) -> Result<RegionIntegral, PadicError> {
    let mut out = r.clone();
    out.trail.push(step.to_string());
    match step {
        Step::Substitute { var, by, new, domain, .. } => {
            let vd = r.domain(*var).ok_or_else(|| inapplicable(step, format!("no variable {var}")))?;
            let bd = r.domain(*by).ok_or_else(|| inapplicable(step, format!("no variable {by}")))?;
            if r.domain(*new).is_some() {
                return Err(inapplicable(step, format!("{new} already exists")));
            }
            if !matches!(vd, Domain::Whole | Domain::Ideal) || !matches!(bd, Domain::Whole | Domain::Ideal) {
                return Err(inapplicable(step, "both variables must range over o or p"));
            }
            if r.integral.groups.iter().any(|g| g.contains(var)) {
                return Err(inapplicable(step, format!("{var} is in a unit group")));
            }
            let strict = match domain {
                Domain::Whole => false,
                Domain::Ideal => true,
                _ => return Err(inapplicable(step, "new variable must range over o or p")),
            };
            let want = ValCmp { lhs: Monomial::var(*by), rhs: Monomial::var(*var), strict };
            let pos = r
                .constraints
                .iter()
                .position(|c| *c == want)
                .ok_or_else(|| inapplicable(step, format!("region lacks v({by}) {} v({var})", if strict { "<" } else { "<=" })))?;
            if vd == Domain::Ideal && bd != Domain::Ideal && *domain != Domain::Ideal {
                return Err(inapplicable(step, format!("{var} ∈ p is not implied")));
            }
            out.constraints.remove(pos);
            let value_m = Monomial::var(*by).mul(&Monomial::var(*new));
            let value = MultiPoly::term(Q::one(), value_m.clone());
            let sub = |h: &MultiPoly| h.substitute(*var, &value);
            out.integral.factors = out.integral.factors.iter().map(|f| map_factor(f, sub)).collect();
            out.units = out.units.iter().map(sub).collect();
            out.in_ideal = out.in_ideal.iter().map(sub).collect();
            for c in out.constraints.iter_mut() {
                c.lhs = subst_monomial(&c.lhs, *var, &value_m);
                c.rhs = subst_monomial(&c.rhs, *var, &value_m);
            }
            out.integral.jacobian = subst_monomial(&out.integral.jacobian, *var, &value_m).mul(&Monomial::var(*by));
            for (v, d) in out.integral.variables.iter_mut() {
                if v == var {
                    *v = *new;
                    *d = *domain;
                }
            }
            let origin = out.origins.remove(var).expect("tracked variable");
            let o = origin.checked_div(&out.origins[by]).map_err(PadicError::Alg)?;
            out.origins.insert(*new, o);
        }
        Step::AssertUnit { expr, .. } => {
            if !r.is_unit(expr) {
                return Err(PadicError::UnitCheckFailed(format!("{expr} in {}", r.name)));
            }
            out.units.push(expr.clone());
        }
        Step::ChangeVariable { replaces, new, expr, .. } => {
            if r.domain(*replaces) != Some(Domain::Coset) {
                return Err(inapplicable(step, format!("{replaces} is not confined to a residue class")));
            }
            if r.domain(*new).is_some() {
                return Err(inapplicable(step, format!("{new} already exists")));
            }
            let pos = r
                .in_ideal
                .iter()
                .position(|e| e == expr || &-e == expr)
                .ok_or_else(|| inapplicable(step, format!("{expr} is not known to lie in p")))?;
            if expr.degree_in(*replaces) != 1 {
                return Err(inapplicable(step, format!("not linear in {replaces}")));
            }
            let c = expr.coeff_of(*replaces, 1);
            let rest = expr.coeff_of(*replaces, 0);
            let unit_coeff =
                c.as_term().is_some_and(|(m, k)| k.abs().is_one() && m.vars().all(|v| matches!(r.domain(v), Some(Domain::Unit | Domain::Coset))));
            if !unit_coeff {
                return Err(inapplicable(step, format!("coefficient {c} is not a unit monomial")));
            }
            if r.constraints.iter().any(|k| k.lhs.degree(*replaces) > 0 || k.rhs.degree(*replaces) > 0) {
                return Err(inapplicable(step, format!("{replaces} occurs in a valuation constraint")));
            }
            out.in_ideal.remove(pos);
            let shifted = &MultiPoly::var(*new) - &rest;
            // h(r) * c^deg with r = (new - rest) / c
            let sub = |h: &MultiPoly| {
                let parts = h.by_powers_of(*replaces);
                let d = parts.len().saturating_sub(1) as u32;
                let mut acc = MultiPoly::zero();
                for (k, hk) in parts.iter().enumerate() {
                    let k = k as u32;
                    acc = &acc + &(&(hk * &shifted.pow(k)) * &c.pow(d - k));
                }
                acc
            };
            out.integral.factors = out.integral.factors.iter().map(|f| map_factor(f, sub)).collect();
            out.units = out.units.iter().map(sub).collect();
            out.in_ideal = out.in_ideal.iter().map(sub).collect();
            for (v, d) in out.integral.variables.iter_mut() {
                if v == replaces {
                    *v = *new;
                    *d = Domain::Ideal;
                }
            }
            let map: HashMap<Var, RatFunc> = r.origins.iter().map(|(v, o)| (*v, o.clone())).collect();
            let o = RatFunc::from_poly(expr.clone()).substitute_many(&map).map_err(PadicError::Alg)?;
            out.origins.remove(replaces);
            out.origins.insert(*new, o);
        }
        _ => return Err(inapplicable(step, "not an in-place rewrite")),
    }
    out.normalize()?;
    Ok(out)
}

fn map_factor(f: &Factor, g: impl Fn(&MultiPoly) -> MultiPoly) -> Factor {
    match f {
        Factor::Abs { poly, exp } => Factor::Abs { poly: g(poly), exp: exp.clone() },
        Factor::Norm { polys, exp } => Factor::Norm { polys: polys.iter().map(g).collect(), exp: exp.clone() },
    }
}

pub(crate) fn is_split(step: &Step) -> bool {
    matches!(step, Step::SplitValuation { .. } | Step::SplitUnit { .. } | Step::CosetSplit { .. })
}
