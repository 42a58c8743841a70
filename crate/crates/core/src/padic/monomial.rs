use std::collections::{BTreeMap, HashMap};

use num_traits::{One, ToPrimitive};

use crate::conesum::{resolve, ConeSum, ConeTerm, Grading, LinForm};
use crate::exactalg::{parse_rf, q_var, t_var, LaurentMono, Monomial, MultiPoly, RatFunc, Var, Q};
use crate::heis::{Domain, Factor, SExp};

use super::region::RegionIntegral;
use super::PadicError;

/// A region integral rewritten as a sum of monomials over a polyhedral cone.
///
/// `sum` uses one abstract base per valuation variable and one per distinct
/// norm value; `specialization` maps those bases to monomials in `q, t`.
/// `qt_sum` is the same sum written directly in `q` and `t`.
#[derive(Clone, Debug)]
pub struct MonomialSum {
    pub sum: ConeSum,
    pub specialization: HashMap<Var, RatFunc>,
    pub qt_sum: ConeSum,
    pub scalar: RatFunc,
}

const BASE_NAMES: [&str; 12] = ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l"];

fn int(x: &Q, what: &str) -> Result<i64, PadicError> {
    if !x.is_integer() {
        return Err(PadicError::NonIntegralExponent(format!("{what}: {x}")));
    }
    x.to_integer().to_i64().ok_or_else(|| PadicError::NonIntegralExponent(format!("{what}: {x} out of range")))
}

fn index_var(v: Var) -> Var {
    Var::new(&format!("v_{v}"))
}

fn mono_form(m: &Monomial) -> LinForm {
    LinForm::from_parts(m.iter().map(|(v, e)| (index_var(v), e as i64)), 0)
}

fn qt_mono(a: i64, b: i64) -> RatFunc {
    RatFunc::laurent(Q::one(), &LaurentMono::from_pairs([(q_var(), a), (t_var(), b)]))
}

fn as_monomial(p: &MultiPoly) -> Option<Monomial> {
    match p.as_term() {
        Some((m, c)) if c.is_one() => Some(m.clone()),
        _ => None,
    }
}

/// Converts a region whose integrand is a product of powers of monomials and
/// norms of monomial sets into a cone sum.
pub fn monomialize(r: &RegionIntegral) -> Result<MonomialSum, PadicError> {
    monomialize_factors(r, &r.integral.factors)
}

fn monomialize_factors(r: &RegionIntegral, factors: &[Factor]) -> Result<MonomialSum, PadicError> {
    if !r.integral.groups.is_empty() {
        return Err(PadicError::NotMonomial(format!("{}: unresolved unit group", r.name)));
    }
    let mut abs: BTreeMap<Var, SExp> = BTreeMap::new();
    let mut norms: Vec<(SExp, Vec<Monomial>)> = Vec::new();
    for f in factors {
        match f {
            Factor::Abs { poly, exp } => {
                let m = as_monomial(poly).ok_or_else(|| PadicError::NotMonomial(format!("{}: {f}", r.name)))?;
                for (v, e) in m.iter() {
                    let cur = abs.entry(v).or_default();
                    *cur = cur.add(&exp.scale(&Q::from_integer(e.into())));
                }
            }
            Factor::Norm { polys, exp } => {
                let ms: Option<Vec<Monomial>> = polys.iter().map(as_monomial).collect();
                let ms = ms.ok_or_else(|| PadicError::NotMonomial(format!("{}: {f}", r.name)))?;
                norms.push((exp.clone(), ms));
            }
        }
    }
    let mut occurring: Vec<Var> = abs.keys().copied().collect();
    occurring.extend(norms.iter().flat_map(|(_, ms)| ms.iter().flat_map(|m| m.vars().collect::<Vec<_>>())));
    occurring.extend(r.integral.jacobian.vars());
    for c in &r.constraints {
        occurring.extend(c.lhs.vars().chain(c.rhs.vars()));
    }
    occurring.sort();
    occurring.dedup();

    let qm = parse_rf("1 - q^-1").expect("literal");
    let mut scalar = r.integral.scalar.clone();
    let mut bounds = Vec::new();
    for (v, d) in &r.integral.variables {
        if occurring.contains(v) {
            let lb = d.min_valuation().ok_or_else(|| PadicError::NotMonomial(format!("{}: unit variable {v} in the integrand", r.name)))?;
            bounds.push((*v, lb));
            scalar = &scalar * &qm;
        } else {
            scalar = &scalar * &d.measure();
        }
    }
    if let Some(v) = occurring.iter().find(|v| r.domain(**v).is_none()) {
        return Err(PadicError::NotMonomial(format!("{}: unknown variable {v}", r.name)));
    }

    let mut term = ConeTerm::new(bounds.iter().map(|(v, lb)| (index_var(*v), *lb)));
    let mut qt_term = ConeTerm::new(bounds.iter().map(|(v, lb)| (index_var(*v), *lb)));
    let mut spec = HashMap::new();
    let mut names = BASE_NAMES.iter().map(|s| Var::new(s));
    let (q, t) = (q_var(), t_var());
    for (v, _) in &bounds {
        let e = abs.get(v).cloned().unwrap_or_default();
        let alpha = -1 - r.integral.jacobian.degree(*v) as i64 - int(&e.c0, "exponent")?;
        let beta = int(&e.c1, "exponent")?;
        if !Grading::qt().is_positive(&LaurentMono::from_pairs([(q, alpha), (t, beta)])) {
            return Err(PadicError::Cone(crate::conesum::ConeError::Divergent(format!("q^{alpha}*t^{beta} for {v}"))));
        }
        let base = names.next().ok_or_else(|| PadicError::NotMonomial(format!("{}: too many variables", r.name)))?;
        spec.insert(base, qt_mono(alpha, beta));
        term = term.with_power(base, LinForm::var(index_var(*v)));
        qt_term = qt_term.with_power(q, LinForm::term(index_var(*v), alpha)).with_power(t, LinForm::term(index_var(*v), beta));
    }
    let mut norm_bases: Vec<(RatFunc, Var)> = Vec::new();
    for (exp, ms) in &norms {
        let (a, b) = (-int(&exp.c0, "norm exponent")?, int(&exp.c1, "norm exponent")?);
        let value = qt_mono(a, b);
        let base = match norm_bases.iter().find(|(val, _)| *val == value) {
            Some((_, b)) => *b,
            None => {
                let b = names.next().ok_or_else(|| PadicError::NotMonomial(format!("{}: too many bases", r.name)))?;
                norm_bases.push((value.clone(), b));
                spec.insert(b, value);
                b
            }
        };
        let args: Vec<LinForm> = ms.iter().map(mono_form).collect();
        term = term.with_min(base, 1, args.clone());
        if a != 0 {
            qt_term = qt_term.with_min(q, a, args.clone());
        }
        if b != 0 {
            qt_term = qt_term.with_min(t, b, args);
        }
    }
    for c in &r.constraints {
        let form = mono_form(&c.rhs).sub(&mono_form(&c.lhs)).shift(if c.strict { -1 } else { 0 });
        term = term.with_constraint(form.clone());
        qt_term = qt_term.with_constraint(form);
    }
    Ok(MonomialSum {
        sum: ConeSum::new(vec![term]),
        specialization: spec,
        qt_sum: ConeSum::new(vec![qt_term]).with_grading(Grading::qt()),
        scalar: scalar.reduce(),
    })
}

impl MonomialSum {
    /// Closed form in `q, t`: resolve the abstract sum and specialize, or
    /// resolve directly in `q, t` when the specialization is singular.
    pub fn evaluate(&self) -> Result<RatFunc, PadicError> {
        let abstract_route =
            resolve(&self.sum).map_err(PadicError::Cone).and_then(|f| f.substitute_many(&self.specialization).map_err(PadicError::Alg));
        let value = match abstract_route {
            Ok(v) => v,
            Err(_) => resolve(&self.qt_sum).map_err(PadicError::Cone)?,
        };
        Ok((&value * &self.scalar).reduce())
    }
}

/// Haar measure of a region, ignoring the integrand.
pub fn region_measure(r: &RegionIntegral) -> Result<RatFunc, PadicError> {
    let mut r = r.clone();
    let mut extra = RatFunc::one();
    let groups = std::mem::take(&mut r.integral.groups);
    let busy: Vec<Var> =
        r.integral.jacobian.vars().chain(r.constraints.iter().flat_map(|c| c.lhs.vars().chain(c.rhs.vars()).collect::<Vec<_>>())).collect();
    for g in groups {
        if g.iter().any(|v| r.domain(*v) != Some(Domain::Whole) || busy.contains(v)) {
            return Err(PadicError::NotMonomial(format!("{}: unit group with constrained members", r.name)));
        }
        let k = g.len() as i64;
        extra = &extra * &parse_rf(&format!("1 - q^-{k}")).expect("literal");
    }
    let ms = monomialize_factors(&r, &[])?;
    Ok((&ms.evaluate()? * &extra).reduce())
}
