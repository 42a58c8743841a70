use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{AlgError, LaurentMono, Monomial, MultiPoly, Var, Q};

/// A rational function kept as numerator over a factored denominator.
///
/// The denominator is a monomial times a product of normalized non-monomial
/// factors with multiplicities. Factors carry no monomial content and their
/// lowest graded term has coefficient one, so equal factors compare equal.
#[derive(Clone)]
pub struct RatFunc {
    num: MultiPoly,
    mono: Monomial,
    factors: Vec<(MultiPoly, u32)>,
}

fn graded_min(p: &MultiPoly) -> (&Monomial, &Q) {
    p.terms().min_by(|a, b| a.0.total_degree().cmp(&b.0.total_degree()).then_with(|| a.0.cmp(b.0))).expect("nonzero polynomial")
}

/// Writes a nonzero polynomial as `scale * m * f`, with `f` normalized or absent when constant.
fn normalize_factor(p: &MultiPoly) -> (Q, Monomial, Option<MultiPoly>) {
    let m = p.content_monomial();
    let rest = if m.is_one() { p.clone() } else { p.div_monomial(&m).expect("content divides") };
    if let Some(c) = rest.as_constant() {
        return (c, m, None);
    }
    let c = graded_min(&rest).1.clone();
    let f = rest.scale(&c.recip());
    (c, m, Some(f))
}

fn merge_factors(a: &[(MultiPoly, u32)], b: &[(MultiPoly, u32)], f: impl Fn(u32, u32) -> u32) -> Vec<(MultiPoly, u32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let (p, e) = match (a.get(i), b.get(j)) {
            (Some((pa, ea)), Some((pb, eb))) => match pa.cmp(pb) {
                Ordering::Less => {
                    i += 1;
                    (pa, f(*ea, 0))
                }
                Ordering::Greater => {
                    j += 1;
                    (pb, f(0, *eb))
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (pa, f(*ea, *eb))
                }
            },
            (Some((pa, ea)), None) => {
                i += 1;
                (pa, f(*ea, 0))
            }
            (None, Some((pb, eb))) => {
                j += 1;
                (pb, f(0, *eb))
            }
            (None, None) => unreachable!(),
        };
        if e > 0 {
            out.push((p.clone(), e));
        }
    }
    out
}

impl RatFunc {
    pub fn zero() -> RatFunc {
        RatFunc::from_poly(MultiPoly::zero())
    }

    pub fn one() -> RatFunc {
        RatFunc::from_poly(MultiPoly::one())
    }

    pub fn int(n: i64) -> RatFunc {
        RatFunc::from_poly(MultiPoly::int(n))
    }

    pub fn constant(c: Q) -> RatFunc {
        RatFunc::from_poly(MultiPoly::constant(c))
    }

    pub fn var(v: Var) -> RatFunc {
        RatFunc::from_poly(MultiPoly::var(v))
    }

    pub fn from_poly(p: MultiPoly) -> RatFunc {
        RatFunc { num: p, mono: Monomial::one(), factors: Vec::new() }
    }

    pub fn new(num: MultiPoly, den: &MultiPoly) -> Result<RatFunc, AlgError> {
        if den.is_zero() {
            return Err(AlgError::DivisionByZero);
        }
        let (c, m, f) = normalize_factor(den);
        let r = RatFunc { num: num.scale(&c.recip()), mono: m, factors: f.map(|f| vec![(f, 1)]).unwrap_or_default() };
        Ok(r.cancel_monomial())
    }

    pub fn laurent(c: Q, m: &LaurentMono) -> RatFunc {
        let (pos, neg) = m.split();
        RatFunc { num: MultiPoly::term(c, pos), mono: neg, factors: Vec::new() }.cancel_monomial()
    }

    /// `1 - r` for a Laurent monomial `r`.
    pub fn one_minus(r: &LaurentMono) -> RatFunc {
        let (pos, neg) = r.split();
        let num = &MultiPoly::term(Q::one(), neg.clone()) - &MultiPoly::term(Q::one(), pos);
        RatFunc { num, mono: neg, factors: Vec::new() }.cancel_monomial()
    }

    /// `1 / (1 - r)` with the denominator kept as a single factor.
    pub fn geometric(r: &LaurentMono) -> Result<RatFunc, AlgError> {
        let (pos, neg) = r.split();
        let n = MultiPoly::term(Q::one(), neg);
        let d = &n - &MultiPoly::term(Q::one(), pos);
        RatFunc::new(n, &d)
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den_monomial(&self) -> &Monomial {
        &self.mono
    }

    pub fn den_factors(&self) -> &[(MultiPoly, u32)] {
        &self.factors
    }

    pub fn den(&self) -> MultiPoly {
        let mut d = MultiPoly::term(Q::one(), self.mono.clone());
        for (f, e) in &self.factors {
            d = &d * &f.pow(*e);
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.mono.is_one() && self.factors.is_empty()
    }

    /// The polynomial value, after cancelling the denominator if possible.
    pub fn to_poly(&self) -> Option<MultiPoly> {
        if self.is_polynomial() {
            return Some(self.num.clone());
        }
        self.num.div_exact(&self.den())
    }

    pub fn as_constant(&self) -> Option<Q> {
        self.to_poly().and_then(|p| p.as_constant())
    }

    pub fn vars(&self) -> std::collections::BTreeSet<Var> {
        let mut v = self.num.vars();
        v.extend(self.mono.vars());
        for (f, _) in &self.factors {
            v.extend(f.vars());
        }
        v
    }

    fn cancel_monomial(mut self) -> RatFunc {
        if self.num.is_zero() {
            return RatFunc::from_poly(MultiPoly::zero());
        }
        if self.mono.is_one() {
            return self;
        }
        let g = self.num.content_monomial().gcd(&self.mono);
        if !g.is_one() {
            self.num = self.num.div_monomial(&g).expect("gcd divides");
            self.mono = self.mono.div(&g).expect("gcd divides");
        }
        self
    }

    /// Cancels denominator factors that divide the numerator.
    pub fn reduce(&self) -> RatFunc {
        let mut num = self.num.clone();
        let mut factors = Vec::with_capacity(self.factors.len());
        for (f, e) in &self.factors {
            let mut left = *e;
            while left > 0 {
                match num.div_exact(f) {
                    Some(q) => {
                        num = q;
                        left -= 1;
                    }
                    None => break,
                }
            }
            if left > 0 {
                factors.push((f.clone(), left));
            }
        }
        RatFunc { num, mono: self.mono.clone(), factors }.cancel_monomial()
    }

    fn cofactor(&self, mono: &Monomial, factors: &[(MultiPoly, u32)]) -> MultiPoly {
        let m = mono.div(&self.mono).expect("lcm multiple");
        let mut out = MultiPoly::term(Q::one(), m);
        for (f, e) in factors {
            let have = self.factors.binary_search_by(|(g, _)| g.cmp(f)).map(|i| self.factors[i].1).unwrap_or(0);
            if *e > have {
                out = &out * &f.pow(e - have);
            }
        }
        out
    }

    fn same_den(&self, other: &RatFunc) -> bool {
        self.mono == other.mono && self.factors == other.factors
    }

    pub fn inv(&self) -> Result<RatFunc, AlgError> {
        if self.num.is_zero() {
            return Err(AlgError::DivisionByZero);
        }
        Ok(RatFunc::new(self.den(), &self.num).expect("nonzero"))
    }

    pub fn pow(&self, k: i64) -> Result<RatFunc, AlgError> {
        if k < 0 {
            return self.inv()?.pow(-k);
        }
        let k = k as u32;
        Ok(RatFunc {
            num: self.num.pow(k),
            mono: self.mono.pow(k),
            factors: if k == 0 { Vec::new() } else { self.factors.iter().map(|(f, e)| (f.clone(), e * k)).collect() },
        })
    }

    pub fn scale(&self, c: &Q) -> RatFunc {
        RatFunc { num: self.num.scale(c), ..self.clone() }.cancel_monomial()
    }

    pub fn checked_div(&self, other: &RatFunc) -> Result<RatFunc, AlgError> {
        if other.num.is_zero() {
            return Err(AlgError::DivisionByZero);
        }
        // multiply by the other's factored denominator and push its numerator down as a new factor
        let (c, m, f) = normalize_factor(&other.num);
        let num = &self.num * &other.den();
        let mut factors = self.factors.clone();
        if let Some(f) = f {
            factors = merge_factors(&factors, &[(f, 1)], |a, b| a + b);
        }
        Ok(RatFunc { num: num.scale(&c.recip()), mono: self.mono.mul(&m), factors }.cancel_monomial())
    }

    /// Substitutes a rational function for a variable, preserving factored denominators.
    pub fn substitute(&self, v: Var, value: &RatFunc) -> Result<RatFunc, AlgError> {
        let mut map = HashMap::new();
        map.insert(v, value.clone());
        self.substitute_many(&map)
    }

    pub fn substitute_many(&self, map: &HashMap<Var, RatFunc>) -> Result<RatFunc, AlgError> {
        let num = poly_subst(&self.num, map)?;
        let mut den = RatFunc::one();
        for (v, e) in self.mono.iter() {
            let base = match map.get(&v) {
                Some(r) => r.clone(),
                None => RatFunc::var(v),
            };
            den = &den * &base.pow(e as i64)?;
        }
        for (f, e) in &self.factors {
            den = &den * &poly_subst(f, map)?.pow(*e as i64)?;
        }
        num.checked_div(&den)
    }

    pub fn eval(&self, point: &HashMap<Var, Q>) -> Option<Q> {
        let n = self.num.eval(point)?;
        let d = self.den().eval(point)?;
        if d.is_zero() {
            None
        } else {
            Some(n / d)
        }
    }

    /// Substitutes numeric values for some variables.
    pub fn eval_partial(&self, point: &HashMap<Var, Q>) -> Result<RatFunc, AlgError> {
        let map: HashMap<Var, RatFunc> = point.iter().map(|(v, c)| (*v, RatFunc::constant(c.clone()))).collect();
        self.substitute_many(&map)
    }
}

fn poly_subst(p: &MultiPoly, map: &HashMap<Var, RatFunc>) -> Result<RatFunc, AlgError> {
    if !p.vars().iter().any(|v| map.contains_key(v)) {
        return Ok(RatFunc::from_poly(p.clone()));
    }
    // group terms by their exponents on substituted variables so each power is built once
    let mut groups: BTreeMap<Vec<(Var, u32)>, MultiPoly> = BTreeMap::new();
    for (m, c) in p.terms() {
        let mut key = Vec::new();
        let mut rest = Vec::new();
        for (v, e) in m.iter() {
            if map.contains_key(&v) {
                key.push((v, e));
            } else {
                rest.push((v, e));
            }
        }
        groups.entry(key).or_default().add_term(Monomial::from_pairs(rest), c.clone());
    }
    let mut cache: HashMap<(Var, u32), RatFunc> = HashMap::new();
    let mut total = RatFunc::zero();
    for (key, coeff) in groups {
        let mut t = RatFunc::from_poly(coeff);
        for (v, e) in key {
            let pw = match cache.get(&(v, e)) {
                Some(r) => r.clone(),
                None => {
                    let r = map[&v].pow(e as i64)?;
                    cache.insert((v, e), r.clone());
                    r
                }
            };
            t = &t * &pw;
        }
        total = &total + &t;
    }
    Ok(total)
}

/// Exact equality by cross-multiplication over the common denominator.
pub fn rf_equal(a: &RatFunc, b: &RatFunc) -> bool {
    (a - b).num.is_zero()
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &RatFunc) -> bool {
        rf_equal(self, other)
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.num.is_zero() {
            return rhs.clone();
        }
        if rhs.num.is_zero() {
            return self.clone();
        }
        if self.same_den(rhs) {
            return RatFunc { num: &self.num + &rhs.num, ..self.clone() }.cancel_monomial();
        }
        let mono = self.mono.lcm(&rhs.mono);
        let factors = merge_factors(&self.factors, &rhs.factors, |a, b| a.max(b));
        let num = &(&self.num * &self.cofactor(&mono, &factors)) + &(&rhs.num * &rhs.cofactor(&mono, &factors));
        RatFunc { num, mono, factors }.cancel_monomial()
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, ..self.clone() }
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.num.is_zero() || rhs.num.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { num: &self.num * &rhs.num, mono: self.mono.mul(&rhs.mono), factors: merge_factors(&self.factors, &rhs.factors, |a, b| a + b) }
            .cancel_monomial()
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: &RatFunc) -> RatFunc {
        self.checked_div(rhs).expect("division by zero rational function")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for RatFunc {
            type Output = RatFunc;
            fn $f(self, rhs: RatFunc) -> RatFunc {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl From<MultiPoly> for RatFunc {
    fn from(p: MultiPoly) -> RatFunc {
        RatFunc::from_poly(p)
    }
}

impl std::iter::Sum for RatFunc {
    fn sum<I: Iterator<Item = RatFunc>>(iter: I) -> RatFunc {
        iter.fold(RatFunc::zero(), |a, b| &a + &b)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bracket = |p: &MultiPoly| if p.num_terms() > 1 { format!("({p})") } else { p.to_string() };
        if self.is_polynomial() {
            return write!(f, "{}", self.num);
        }
        write!(f, "{}/", bracket(&self.num))?;
        let mut parts = Vec::new();
        if !self.mono.is_one() {
            parts.push(self.mono.to_string());
        }
        for (p, e) in &self.factors {
            if *e == 1 {
                parts.push(format!("({p})"));
            } else {
                parts.push(format!("({p})^{e}"));
            }
        }
        if parts.len() == 1 && self.factors.is_empty() && self.mono.iter().count() == 1 {
            f.write_str(&parts[0])
        } else {
            write!(f, "({})", parts.join("*"))
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Default for RatFunc {
    fn default() -> RatFunc {
        RatFunc::zero()
    }
}
