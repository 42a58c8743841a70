use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::exactalg::{LaurentMono, RatFunc, Var};

use super::{ConeError, ConeSum, ConeTerm, Grading, LinForm};

#[derive(Clone, Debug)]
struct Region {
    sign: i64,
    exps: BTreeMap<Var, LinForm>,
    mins: Vec<(BTreeMap<Var, i64>, Vec<LinForm>)>,
    constraints: Vec<LinForm>,
    denoms: Vec<LaurentMono>,
}

/// Leaves grouped by their multiset of geometric denominators.
type Leaves = BTreeMap<Vec<LaurentMono>, BTreeMap<LaurentMono, i64>>;

/// Sums a cone sum in closed form.
pub fn resolve(sum: &ConeSum) -> Result<RatFunc, ConeError> {
    let grading = sum.grading();
    let parts: Vec<Result<RatFunc, ConeError>> = sum.terms.par_iter().map(|t| resolve_term(t, &grading)).collect();
    let mut total = RatFunc::zero();
    for p in parts {
        total = &total + &p?;
    }
    Ok(total.reduce())
}

fn resolve_term(term: &ConeTerm, grading: &Grading) -> Result<RatFunc, ConeError> {
    term.validate()?;
    let mut constraints = term.constraints.clone();
    for (&v, &lb) in &term.lower_bounds {
        constraints.push(LinForm::var(v).shift(-lb));
    }
    let mut mins: Vec<(BTreeMap<Var, i64>, Vec<LinForm>)> = Vec::new();
    for m in &term.min_exponents {
        let mut args = m.args.clone();
        args.sort();
        args.dedup();
        match mins.iter_mut().find(|(_, a)| *a == args) {
            Some((bases, _)) => *bases.entry(m.base).or_insert(0) += m.multiplier,
            None => mins.push(([(m.base, m.multiplier)].into_iter().collect(), args)),
        }
    }
    let root = Region { sign: 1, exps: term.mono_exponents.clone(), mins, constraints, denoms: Vec::new() };
    let mut leaves = Leaves::new();
    let mut stack = vec![root];
    while let Some(r) = stack.pop() {
        let Some(r) = normalize(r) else { continue };
        if !r.mins.is_empty() {
            stack.extend(split_min(r));
            continue;
        }
        let vars = index_vars(&r);
        if vars.is_empty() {
            let mono = LaurentMono::from_pairs(r.exps.iter().map(|(&b, f)| (b, f.constant)));
            let mut key = r.denoms;
            key.sort();
            *leaves.entry(key).or_default().entry(mono).or_insert(0) += r.sign;
            continue;
        }
        stack.extend(eliminate(r, &vars, grading)?);
    }
    let mut total = RatFunc::zero();
    for (denoms, numer) in leaves {
        let mut num = RatFunc::zero();
        for (m, c) in numer {
            if c != 0 {
                num = &num + &RatFunc::laurent(crate::exactalg::q_int(c), &m);
            }
        }
        if num.is_zero() {
            continue;
        }
        for r in &denoms {
            num = &num * &RatFunc::geometric(r)?;
        }
        total = &total + &num;
    }
    Ok(&total * &term.scalar)
}

fn index_vars(r: &Region) -> BTreeSet<Var> {
    let mut s = BTreeSet::new();
    for f in r.exps.values() {
        s.extend(f.vars());
    }
    for c in &r.constraints {
        s.extend(c.vars());
    }
    for (_, args) in &r.mins {
        for a in args {
            s.extend(a.vars());
        }
    }
    s
}

fn substitute(r: &mut Region, v: Var, value: &LinForm) {
    for f in r.exps.values_mut() {
        *f = f.substitute(v, value);
    }
    for c in r.constraints.iter_mut() {
        *c = c.substitute(v, value);
    }
    for (_, args) in r.mins.iter_mut() {
        for a in args.iter_mut() {
            *a = a.substitute(v, value);
        }
    }
}

/// Simplifies constraints; `None` when the region has no integer points.
fn normalize(mut r: Region) -> Option<Region> {
    loop {
        let mut cons: Vec<LinForm> = Vec::with_capacity(r.constraints.len());
        for c in &r.constraints {
            let c = c.normalized_constraint();
            if c.is_constant() {
                if c.constant < 0 {
                    return None;
                }
                continue;
            }
            cons.push(c);
        }
        cons.sort();
        cons.dedup();
        let mut lb: BTreeMap<Var, i64> = BTreeMap::new();
        let mut ub: BTreeMap<Var, i64> = BTreeMap::new();
        for c in &cons {
            let cs: Vec<(Var, i64)> = c.coeffs().collect();
            if cs.len() == 1 {
                let (v, a) = cs[0];
                if a == 1 {
                    let b = -c.constant;
                    lb.entry(v).and_modify(|x| *x = (*x).max(b)).or_insert(b);
                } else {
                    let b = c.constant;
                    ub.entry(v).and_modify(|x| *x = (*x).min(b)).or_insert(b);
                }
            }
        }
        for (v, u) in &ub {
            if lb.get(v).is_some_and(|l| l > u) {
                return None;
            }
        }
        if let Some((&v, &val)) = lb.iter().find(|(v, l)| ub.get(v) == Some(l)) {
            r.constraints = cons;
            substitute(&mut r, v, &LinForm::constant(val));
            continue;
        }
        let mut out = Vec::with_capacity(cons.len());
        for c in cons {
            let cs: Vec<(Var, i64)> = c.coeffs().collect();
            if cs.len() == 1 {
                let (v, a) = cs[0];
                // keep only the tightest single-variable bound
                let keep = if a == 1 { -c.constant == lb[&v] } else { c.constant == ub[&v] };
                if keep {
                    out.push(c);
                }
                continue;
            }
            let (mut hi, mut lo) = (Some(c.constant), Some(c.constant));
            for (v, a) in cs {
                let (l, u) = (lb.get(&v).copied(), ub.get(&v).copied());
                if a > 0 {
                    hi = hi.and_then(|h| u.map(|u| h + a * u));
                    lo = lo.and_then(|x| l.map(|l| x + a * l));
                } else {
                    hi = hi.and_then(|h| l.map(|l| h + a * l));
                    lo = lo.and_then(|x| u.map(|u| x + a * u));
                }
            }
            if hi.is_some_and(|h| h < 0) {
                return None;
            }
            if lo.is_some_and(|x| x >= 0) {
                continue;
            }
            out.push(c);
        }
        let mut seen = BTreeSet::new();
        out.retain(|c| seen.insert(c.clone()));
        r.constraints = out;
        return Some(r);
    }
}

/// Splits the first minimum. Ties go to the earliest argument.
fn split_min(mut r: Region) -> Vec<Region> {
    let (bases, args) = r.mins.remove(0);
    let mut out = Vec::with_capacity(args.len());
    for (i, win) in args.iter().enumerate() {
        let mut child = r.clone();
        for (j, other) in args.iter().enumerate() {
            if j == i {
                continue;
            }
            let slack = if j < i { -1 } else { 0 };
            child.constraints.push(other.sub(win).shift(slack));
        }
        for (&b, &m) in &bases {
            let e = child.exps.entry(b).or_default();
            *e = e.add(&win.scale(m));
        }
        out.push(child);
    }
    out
}

struct Bounds {
    lowers: Vec<LinForm>,
    uppers: Vec<LinForm>,
    rest: Vec<LinForm>,
}

fn bounds_for(r: &Region, v: Var) -> Option<Bounds> {
    let mut b = Bounds { lowers: Vec::new(), uppers: Vec::new(), rest: Vec::new() };
    for c in &r.constraints {
        match c.coeff(v) {
            0 => b.rest.push(c.clone()),
            1 => b.lowers.push(c.substitute(v, &LinForm::constant(0)).scale(-1)),
            -1 => b.uppers.push(c.substitute(v, &LinForm::constant(0))),
            _ => return None,
        }
    }
    b.lowers.sort();
    b.lowers.dedup();
    b.uppers.sort();
    b.uppers.dedup();
    Some(b)
}

fn ratio(r: &Region, v: Var) -> LaurentMono {
    LaurentMono::from_pairs(r.exps.iter().map(|(&b, f)| (b, f.coeff(v))))
}

/// Constraints making `forms[i]` the extreme element; ties go to the earliest.
fn winner_constraints(forms: &[LinForm], i: usize, want_max: bool) -> Vec<LinForm> {
    let mut out = Vec::new();
    for (j, other) in forms.iter().enumerate() {
        if j == i {
            continue;
        }
        let slack = if j < i { -1 } else { 0 };
        let diff = if want_max { forms[i].sub(other) } else { other.sub(&forms[i]) };
        out.push(diff.shift(slack));
    }
    out
}

fn eliminate(r: Region, vars: &BTreeSet<Var>, grading: &Grading) -> Result<Vec<Region>, ConeError> {
    let mut best: Option<(usize, Var, Bounds)> = None;
    let mut saw_flat = false;
    for &v in vars {
        let Some(b) = bounds_for(&r, v) else { continue };
        if b.lowers.is_empty() {
            continue;
        }
        if ratio(&r, v).is_one() {
            saw_flat = true;
            continue;
        }
        let cost = b.lowers.len() * b.uppers.len().max(1);
        if best.as_ref().is_none_or(|(c, _, _)| cost < *c) {
            best = Some((cost, v, b));
        }
    }
    let Some((_, v, b)) = best else {
        let why = if saw_flat {
            "finite sum with ratio 1 would need a polynomial factor"
        } else {
            "no index variable has unit coefficients in every constraint"
        };
        return Err(ConeError::UnsupportedCone(format!("{why}; constraints {:?}", r.constraints)));
    };
    let rho = ratio(&r, v);
    if b.uppers.is_empty() && !grading.is_positive(&rho) {
        return Err(ConeError::Divergent(rho.to_string()));
    }
    let mut out = Vec::new();
    for li in 0..b.lowers.len() {
        let lower = &b.lowers[li];
        let lower_cons = winner_constraints(&b.lowers, li, true);
        if b.uppers.is_empty() {
            let mut child = r.clone();
            child.constraints = b.rest.iter().cloned().chain(lower_cons.iter().cloned()).collect();
            substitute(&mut child, v, lower);
            child.denoms.push(rho.clone());
            out.push(child);
            continue;
        }
        for ui in 0..b.uppers.len() {
            let upper = &b.uppers[ui];
            let mut cons: Vec<LinForm> = b.rest.iter().cloned().chain(lower_cons.iter().cloned()).collect();
            cons.extend(winner_constraints(&b.uppers, ui, false));
            cons.push(upper.sub(lower));
            let mut start = r.clone();
            start.constraints = cons.clone();
            substitute(&mut start, v, lower);
            start.denoms.push(rho.clone());
            let mut stop = r.clone();
            stop.constraints = cons;
            stop.sign = -stop.sign;
            substitute(&mut stop, v, &upper.shift(1));
            stop.denoms.push(rho.clone());
            out.push(start);
            out.push(stop);
        }
    }
    Ok(out)
}
