use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::exactalg::{Monomial, MultiPoly, RatFunc, Var, Q};
use crate::heis::{Domain, Factor, PadicIntegral, SExp};

use super::PadicError;

/// `v(lhs) <= v(rhs)`, or `<` when strict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValCmp {
    pub lhs: Monomial,
    pub rhs: Monomial,
    pub strict: bool,
}

/// A region of integration reached by a sequence of script steps.
#[derive(Clone, Debug, Serialize)]
pub struct RegionIntegral {
    pub name: String,
    pub integral: PadicIntegral,
    /// Number of congruent copies of this region inside its parent.
    pub multiplicity: RatFunc,
    /// Expressions known to be units.
    pub units: Vec<MultiPoly>,
    /// Expressions known to lie in the maximal ideal.
    pub in_ideal: Vec<MultiPoly>,
    pub constraints: Vec<ValCmp>,
    /// Each current variable as a function of the original ones.
    #[serde(skip)]
    pub origins: BTreeMap<Var, RatFunc>,
    pub trail: Vec<String>,
}

impl RegionIntegral {
    pub fn root(name: &str, integral: PadicIntegral) -> Result<RegionIntegral, PadicError> {
        let origins = integral.variables.iter().map(|(v, _)| (*v, RatFunc::var(*v))).collect();
        let mut r = RegionIntegral {
            name: name.to_string(),
            integral,
            multiplicity: RatFunc::one(),
            units: Vec::new(),
            in_ideal: Vec::new(),
            constraints: Vec::new(),
            origins,
            trail: Vec::new(),
        };
        r.normalize()?;
        Ok(r)
    }

    pub fn domain(&self, v: Var) -> Option<Domain> {
        self.integral.domain(v)
    }

    pub(crate) fn set_domain(&mut self, v: Var, d: Domain) {
        for (w, dom) in self.integral.variables.iter_mut() {
            if *w == v {
                *dom = d;
            }
        }
    }

    pub(crate) fn child(&self, name: &str, step: String) -> RegionIntegral {
        let mut c = self.clone();
        c.name = name.to_string();
        c.multiplicity = RatFunc::one();
        c.trail.push(step);
        c
    }

    fn is_unit_var(&self, v: Var) -> bool {
        matches!(self.domain(v), Some(Domain::Unit | Domain::Coset))
    }

    /// Unit test on an expression: a declared unit (up to sign), or a
    /// polynomial whose reduction mod `p` is a single signed monomial in unit
    /// variables.
    pub fn is_unit(&self, c: &MultiPoly) -> bool {
        if self.units.iter().any(|u| u == c || &-u == c) {
            return true;
        }
        let mut survivors = Vec::new();
        for (m, coef) in c.terms() {
            if m.vars().any(|v| self.domain(v) == Some(Domain::Ideal)) {
                continue;
            }
            survivors.push((m, coef));
        }
        match survivors.as_slice() {
            [(m, coef)] => coef.abs().is_one() && m.vars().all(|v| self.is_unit_var(v)),
            _ => false,
        }
    }

    /// Splits `h = m * c` with `m` the content monomial stripped of unit
    /// variables; `c` is `None` when it is a unit.
    pub(crate) fn element(&self, h: &MultiPoly) -> Option<(Monomial, Option<MultiPoly>)> {
        if h.is_zero() {
            return None;
        }
        let m = h.content_monomial();
        let c = h.div_monomial(&m).expect("content divides");
        let stripped = Monomial::from_pairs(m.iter().filter(|(v, _)| !self.is_unit_var(*v)));
        if self.is_unit(&c) {
            Some((stripped, None))
        } else {
            Some((stripped, Some(c)))
        }
    }

    /// Rewrites the integrand: unit cofactors and unit variables are dropped,
    /// dominated norm elements removed, common monomials pulled out of norms,
    /// and single-variable absolute values merged.
    pub fn normalize(&mut self) -> Result<(), PadicError> {
        self.normalize_groups()?;
        let mut abs: BTreeMap<Var, SExp> = BTreeMap::new();
        let mut rest: Vec<Factor> = Vec::new();
        let push_abs = |m: &Monomial, e: &SExp, abs: &mut BTreeMap<Var, SExp>| {
            for (v, k) in m.iter() {
                let cur = abs.entry(v).or_default();
                *cur = cur.add(&e.scale(&Q::from_integer(k.into())));
            }
        };
        for f in &self.integral.factors {
            match f {
                Factor::Abs { poly, exp } => {
                    let (m, c) = self.element(poly).ok_or_else(|| PadicError::NotMonomial(format!("|0| in {}", self.name)))?;
                    push_abs(&m, exp, &mut abs);
                    if let Some(c) = c {
                        rest.push(Factor::Abs { poly: c, exp: exp.clone() });
                    }
                }
                Factor::Norm { polys, exp } => {
                    let mut elems: Vec<(Monomial, Option<MultiPoly>)> = polys.iter().filter_map(|h| self.element(h)).collect();
                    if elems.is_empty() {
                        return Err(PadicError::NotMonomial(format!("norm of zero set in {}", self.name)));
                    }
                    elems.sort();
                    elems.dedup();
                    let monos: Vec<Monomial> = elems.iter().filter(|(_, c)| c.is_none()).map(|(m, _)| m.clone()).collect();
                    elems.retain(|(m2, c2)| !monos.iter().any(|m1| m1.divides(m2) && (m1 != m2 || c2.is_some())));
                    let g = elems.iter().skip(1).fold(elems[0].0.clone(), |g, (m, _)| g.gcd(m));
                    if !g.is_one() {
                        push_abs(&g, exp, &mut abs);
                        for (m, _) in elems.iter_mut() {
                            *m = m.div(&g).expect("gcd divides");
                        }
                    }
                    if elems.iter().any(|(m, c)| m.is_one() && c.is_none()) {
                        continue;
                    }
                    if elems.len() == 1 {
                        let (m, c) = elems.pop().expect("one element");
                        push_abs(&m, exp, &mut abs);
                        if let Some(c) = c {
                            rest.push(Factor::Abs { poly: c, exp: exp.clone() });
                        }
                        continue;
                    }
                    let polys = elems
                        .into_iter()
                        .map(|(m, c)| match c {
                            Some(c) => c.mul_monomial(&m),
                            None => MultiPoly::term(Q::one(), m),
                        })
                        .collect();
                    rest.push(Factor::Norm { polys, exp: exp.clone() });
                }
            }
        }
        // merge norms over identical sets
        let mut merged: Vec<Factor> = Vec::new();
        for f in rest {
            if f.exp().is_zero() {
                continue;
            }
            let slot = merged.iter_mut().find(|g| match (g, &f) {
                (Factor::Norm { polys: a, .. }, Factor::Norm { polys: b, .. }) => a == b,
                (Factor::Abs { poly: a, .. }, Factor::Abs { poly: b, .. }) => a == b,
                _ => false,
            });
            match slot {
                Some(Factor::Norm { exp, .. } | Factor::Abs { exp, .. }) => *exp = exp.add(f.exp()),
                None => merged.push(f),
            }
        }
        merged.retain(|f| !f.exp().is_zero());
        let mut factors: Vec<Factor> =
            abs.into_iter().filter(|(_, e)| !e.is_zero()).map(|(v, exp)| Factor::Abs { poly: MultiPoly::var(v), exp }).collect();
        factors.extend(merged);
        self.integral.factors = factors;
        self.integral.jacobian = Monomial::from_pairs(self.integral.jacobian.iter().filter(|(v, _)| !self.is_unit_var(*v)));
        Ok(())
    }

    /// Resolves `W_k` groups: a unit member satisfies the group, ideal members
    /// leave it, and a lone remaining member becomes a unit.
    fn normalize_groups(&mut self) -> Result<(), PadicError> {
        loop {
            let mut changed = false;
            let mut groups = Vec::new();
            for g in std::mem::take(&mut self.integral.groups) {
                if g.iter().any(|&v| self.is_unit_var(v)) {
                    changed = true;
                    continue;
                }
                let g: Vec<Var> = g.into_iter().filter(|&v| self.domain(v) != Some(Domain::Ideal)).collect();
                match g.len() {
                    0 => return Err(PadicError::InapplicableStep(format!("empty unit group in {}", self.name))),
                    1 => {
                        if self.domain(g[0]) != Some(Domain::Whole) {
                            return Err(PadicError::InapplicableStep(format!("group member {} is not in o", g[0])));
                        }
                        self.set_domain(g[0], Domain::Unit);
                        changed = true;
                    }
                    _ => groups.push(g),
                }
            }
            self.integral.groups = groups;
            if !changed {
                return Ok(());
            }
        }
    }

    /// Variables appearing in the integrand, the Jacobian or a constraint.
    pub fn occurring(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = Vec::new();
        for f in &self.integral.factors {
            for p in f.polys() {
                vs.extend(p.vars());
            }
        }
        vs.extend(self.integral.jacobian.vars());
        for c in &self.constraints {
            vs.extend(c.lhs.vars());
            vs.extend(c.rhs.vars());
        }
        vs.sort();
        vs.dedup();
        vs
    }

    /// Whether a point, given in the original variables, lies in this region.
    /// Points where a coordinate change is undefined are reported as outside.
    pub fn contains(&self, point: &HashMap<Var, Q>, p: u64) -> bool {
        let mut cur: HashMap<Var, Q> = HashMap::new();
        for (v, o) in &self.origins {
            match o.eval(point) {
                Some(x) => cur.insert(*v, x),
                None => return false,
            };
        }
        let val = |x: &Q| padic_val(x, p);
        for (v, d) in &self.integral.variables {
            let Some(x) = cur.get(v) else { return false };
            let ok = match (d, val(x)) {
                (_, None) => *d == Domain::Whole || *d == Domain::Ideal,
                (Domain::Whole, Some(k)) => k >= 0,
                (Domain::Ideal, Some(k)) => k >= 1,
                (Domain::Unit | Domain::Coset, Some(k)) => k == 0,
            };
            if !ok {
                return false;
            }
        }
        for g in &self.integral.groups {
            if !g.iter().any(|v| cur.get(v).and_then(val) == Some(0)) {
                return false;
            }
        }
        let eval_val = |h: &MultiPoly| h.eval(&cur).map(|x| val(&x));
        for u in &self.units {
            if eval_val(u) != Some(Some(0)) {
                return false;
            }
        }
        for e in &self.in_ideal {
            match eval_val(e) {
                Some(Some(k)) if k >= 1 => {}
                Some(None) => {}
                _ => return false,
            }
        }
        for c in &self.constraints {
            let l = mono_val(&c.lhs, &cur, p);
            let r = mono_val(&c.rhs, &cur, p);
            let holds = match (l, r) {
                (Some(l), Some(r)) => {
                    if c.strict {
                        l < r
                    } else {
                        l <= r
                    }
                }
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => !c.strict,
            };
            if !holds {
                return false;
            }
        }
        true
    }
}

/// `p`-adic valuation of a rational; `None` for zero.
pub fn padic_val(x: &Q, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let pv = |n: &num_bigint::BigInt| {
        let mut n = n.abs();
        let pb = num_bigint::BigInt::from(p);
        let mut k = 0;
        while (&n % &pb).is_zero() {
            n /= &pb;
            k += 1;
        }
        k
    };
    Some(pv(x.numer()) - pv(x.denom()))
}

fn mono_val(m: &Monomial, cur: &HashMap<Var, Q>, p: u64) -> Option<i64> {
    let mut total = 0;
    for (v, e) in m.iter() {
        total += padic_val(cur.get(&v)?, p)? * e as i64;
    }
    Some(total)
}
