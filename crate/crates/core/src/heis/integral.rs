use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exactalg::{parse_poly, parse_rf, q_int, Monomial, MultiPoly, RatFunc, Var, Q};

use super::{minor_family, y_vars, HeisError};

/// Where a variable of integration ranges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// `o`
    Whole,
    /// `p`
    Ideal,
    /// `o \ p`
    Unit,
    /// A single residue class `a + p` with `a` a unit.
    Coset,
}

impl Domain {
    /// Haar measure of the domain, with `mu(o) = 1`.
    pub fn measure(self) -> RatFunc {
        match self {
            Domain::Whole => RatFunc::one(),
            Domain::Ideal | Domain::Coset => parse_rf("q^-1").expect("literal"),
            Domain::Unit => parse_rf("1 - q^-1").expect("literal"),
        }
    }

    /// Lower bound on the valuation; `None` when the valuation is fixed at 0.
    pub fn min_valuation(self) -> Option<i64> {
        match self {
            Domain::Whole => Some(0),
            Domain::Ideal => Some(1),
            Domain::Unit | Domain::Coset => None,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Whole => "o",
            Domain::Ideal => "p",
            Domain::Unit => "W_1(o)",
            Domain::Coset => "a+p",
        })
    }
}

/// An exponent `c0 + c1*s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SExp {
    pub c0: Q,
    pub c1: Q,
}

impl SExp {
    pub fn new(c0: Q, c1: Q) -> SExp {
        SExp { c0, c1 }
    }

    pub fn ints(c0: i64, c1: i64) -> SExp {
        SExp::new(q_int(c0), q_int(c1))
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.c1.is_zero()
    }

    pub fn add(&self, o: &SExp) -> SExp {
        SExp::new(&self.c0 + &o.c0, &self.c1 + &o.c1)
    }

    pub fn scale(&self, k: &Q) -> SExp {
        SExp::new(&self.c0 * k, &self.c1 * k)
    }

    pub fn neg(&self) -> SExp {
        SExp::new(-&self.c0, -&self.c1)
    }

    /// `|x|^self` at `v(x) = v` is `q^a t^b`; returns `(a, b)`.
    pub fn qt_exponents(&self, v: &Q) -> (Q, Q) {
        (-(&self.c0 * v), &self.c1 * v)
    }

    pub fn parse(src: &str) -> Result<SExp, crate::exactalg::AlgError> {
        let p = parse_poly(src)?;
        let s = Var::new("s");
        if p.vars().iter().any(|&v| v != s) || p.degree_in(s) > 1 {
            return Err(crate::exactalg::AlgError::Parse(format!("not affine in s: {src:?}")));
        }
        Ok(SExp::new(p.coeff(&Monomial::one()), p.coeff(&Monomial::var(s))))
    }

    fn as_poly(&self) -> MultiPoly {
        let mut p = MultiPoly::constant(self.c0.clone());
        p.add_term(Monomial::var(Var::new("s")), self.c1.clone());
        p
    }
}

impl fmt::Display for SExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_poly())
    }
}

impl Serialize for SExp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SExp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<SExp, D::Error> {
        let s = String::deserialize(d)?;
        SExp::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    /// `|poly|^exp`
    Abs { poly: MultiPoly, exp: SExp },
    /// `||polys||^exp = max |h|^exp` over the set.
    Norm { polys: Vec<MultiPoly>, exp: SExp },
}

impl Factor {
    pub fn exp(&self) -> &SExp {
        match self {
            Factor::Abs { exp, .. } | Factor::Norm { exp, .. } => exp,
        }
    }

    pub fn polys(&self) -> Vec<&MultiPoly> {
        match self {
            Factor::Abs { poly, .. } => vec![poly],
            Factor::Norm { polys, .. } => polys.iter().collect(),
        }
    }

    fn map_polys(&self, f: impl Fn(&MultiPoly) -> MultiPoly) -> Factor {
        match self {
            Factor::Abs { poly, exp } => Factor::Abs { poly: f(poly), exp: exp.clone() },
            Factor::Norm { polys, exp } => Factor::Norm { polys: polys.iter().map(f).collect(), exp: exp.clone() },
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (open, close, polys, exp) = match self {
            Factor::Abs { poly, exp } => ("|", "|", vec![poly], exp),
            Factor::Norm { polys, exp } => ("‖", "‖", polys.iter().collect(), exp),
        };
        let body: Vec<String> = polys.iter().map(|p| p.to_string()).collect();
        write!(f, "{open}{}{close}^({exp})", body.join(", "))
    }
}

/// `zeta = 1 + prefactor * Z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaAssembly {
    pub prefactor: RatFunc,
}

impl ZetaAssembly {
    pub fn standard() -> ZetaAssembly {
        ZetaAssembly { prefactor: parse_rf("1/(1 - q^-1)").expect("literal") }
    }

    pub fn apply(&self, z: &RatFunc) -> RatFunc {
        (&RatFunc::one() + &(&self.prefactor * z)).reduce()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PadicIntegral {
    pub variables: Vec<(Var, Domain)>,
    /// Each group of variables is constrained to have at least one unit.
    #[serde(default)]
    pub groups: Vec<Vec<Var>>,
    pub factors: Vec<Factor>,
    /// Measure density accumulated by substitutions.
    #[serde(default = "Monomial::one")]
    pub jacobian: Monomial,
    #[serde(default = "RatFunc::one")]
    pub scalar: RatFunc,
    #[serde(default)]
    pub assembly: Option<ZetaAssembly>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntegrandForm {
    /// Minor sets `F_j` with exponent `-s/2`.
    Squared,
    /// Pfaffian sets with exponent `-s`.
    Root,
}

/// The integral over `u` in `p`, `y` in `W_n(o)` of
/// `|u|^(ns-n-1) prod_j (||F_j ∪ F_{j-1} u^2|| / ||F_{j-1}||)^(-s/2)`.
pub fn build_integral(n: usize, form: IntegrandForm) -> Result<PadicIntegral, HeisError> {
    let fam = minor_family(n)?;
    let u = Var::new("u");
    let uu = MultiPoly::var(u);
    let (sets, scale_u, exp) = match form {
        IntegrandForm::Squared => (&fam.f, uu.pow(2), SExp::new(q_int(0), Q::new((-1).into(), 2.into()))),
        IntegrandForm::Root => (&fam.pfaffians, uu.clone(), SExp::ints(0, -1)),
    };
    let mut factors = vec![Factor::Abs { poly: uu, exp: SExp::ints(-(n as i64) - 1, n as i64) }];
    for j in 1..=n {
        let mut num: Vec<MultiPoly> = sets[j].clone();
        num.extend(sets[j - 1].iter().map(|g| g * &scale_u));
        factors.push(Factor::Norm { polys: num, exp: exp.clone() });
        if sets[j - 1].iter().any(|g| !g.is_one()) {
            factors.push(Factor::Norm { polys: sets[j - 1].clone(), exp: exp.neg() });
        }
    }
    let ys = y_vars(n);
    let mut variables = vec![(u, Domain::Ideal)];
    variables.extend(ys.iter().map(|&y| (y, Domain::Whole)));
    Ok(PadicIntegral {
        variables,
        groups: vec![ys],
        factors,
        jacobian: Monomial::one(),
        scalar: RatFunc::one(),
        assembly: Some(ZetaAssembly::standard()),
    })
}

/// Letter names used in hand computations: `x, y` for `n = 2`, `x, y, z` for `n = 3`.
pub fn letter_names(n: usize) -> HashMap<Var, Var> {
    let letters: &[&str] = match n {
        1 => &["x"],
        2 => &["x", "y"],
        3 => &["x", "y", "z"],
        _ => &[],
    };
    y_vars(n).into_iter().zip(letters.iter().map(|l| Var::new(l))).collect()
}

impl PadicIntegral {
    pub fn domain(&self, v: Var) -> Option<Domain> {
        self.variables.iter().find(|(w, _)| *w == v).map(|(_, d)| *d)
    }

    pub fn rename(&self, map: &HashMap<Var, Var>) -> PadicIntegral {
        let subst = |p: &MultiPoly| {
            let mut out = p.clone();
            let tmp: Vec<(Var, Var)> = map.iter().map(|(&a, _)| (a, Var::new(&format!("__rn_{a}")))).collect();
            for &(a, t) in &tmp {
                out = out.substitute(a, &MultiPoly::var(t));
            }
            for &(a, t) in &tmp {
                out = out.substitute(t, &MultiPoly::var(map[&a]));
            }
            out
        };
        let rv = |v: &Var| *map.get(v).unwrap_or(v);
        PadicIntegral {
            variables: self.variables.iter().map(|(v, d)| (rv(v), *d)).collect(),
            groups: self.groups.iter().map(|g| g.iter().map(rv).collect()).collect(),
            factors: self.factors.iter().map(|f| f.map_polys(subst)).collect(),
            jacobian: Monomial::from_pairs(self.jacobian.iter().map(|(v, e)| (rv(&v), e))),
            scalar: self.scalar.clone(),
            assembly: self.assembly.clone(),
        }
    }

    /// `(q, t)` exponents of the integrand at a point, given the valuation of
    /// every factor (the minimum over the set for norms).
    pub fn qt_exponents(&self, valuations: &[Q]) -> (Q, Q) {
        let mut a = q_int(0);
        let mut b = q_int(0);
        for (f, v) in self.factors.iter().zip(valuations) {
            let (x, y) = f.exp().qt_exponents(v);
            a += x;
            b += y;
        }
        (a, b)
    }

    /// Labels the factors of the `n = 3` root-form integrand in the `A, B, C`
    /// notation: `A = ||F_2||^s`, `B` and `C` the numerators for `j = 2, 3`.
    pub fn abc_notation(&self) -> Option<String> {
        let names = letter_names(3);
        if self.variables.len() != 4 || !names.keys().all(|v| self.domain(*v).is_some()) {
            return None;
        }
        let r = self.rename(&names);
        // u, N1, N2, D1, N3, D2
        if r.factors.len() != 6 {
            return None;
        }
        let mut out = String::new();
        out.push_str(&format!("A := {}\n", r.factors[5]));
        out.push_str(&format!("B := {}\n", r.factors[2]));
        out.push_str(&format!("C := {}\n", r.factors[4]));
        out.push_str(&format!("1 = {} = {} on W_3(o)\n", r.factors[1], r.factors[3]));
        out.push_str(&format!("Z = ∫ {} A B C dμ", r.factors[0]));
        Some(out)
    }
}

impl fmt::Display for PadicIntegral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.scalar.as_constant().is_some_and(|c| c.is_one()) {
            write!(f, "({}) * ", self.scalar)?;
        }
        let doms: Vec<String> = self.variables.iter().map(|(v, d)| format!("{v} ∈ {d}")).collect();
        write!(f, "∫[{}", doms.join(", "))?;
        for g in &self.groups {
            let names: Vec<String> = g.iter().map(|v| v.to_string()).collect();
            write!(f, "; ({}) ∈ W_{}(o)", names.join(","), g.len())?;
        }
        f.write_str("]")?;
        if !self.jacobian.is_one() {
            write!(f, " |{}|", self.jacobian)?;
        }
        for fac in &self.factors {
            write!(f, " {fac}")?;
        }
        f.write_str(" dμ")
    }
}
