use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::exactalg::{parse_poly, Var};

use super::ConeError;

/// An integer affine form `sum c_i X_i + constant` in index variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LinForm {
    coeffs: BTreeMap<Var, i64>,
    pub constant: i64,
}

impl LinForm {
    pub fn constant(c: i64) -> LinForm {
        LinForm { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn var(v: Var) -> LinForm {
        LinForm::term(v, 1)
    }

    pub fn term(v: Var, c: i64) -> LinForm {
        let mut coeffs = BTreeMap::new();
        if c != 0 {
            coeffs.insert(v, c);
        }
        LinForm { coeffs, constant: 0 }
    }

    pub fn from_parts(coeffs: impl IntoIterator<Item = (Var, i64)>, constant: i64) -> LinForm {
        let mut f = LinForm::constant(constant);
        for (v, c) in coeffs {
            f.add_coeff(v, c);
        }
        f
    }

    fn add_coeff(&mut self, v: Var, c: i64) {
        let e = self.coeffs.entry(v).or_insert(0);
        *e += c;
        if *e == 0 {
            self.coeffs.remove(&v);
        }
    }

    pub fn coeff(&self, v: Var) -> i64 {
        self.coeffs.get(&v).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (Var, i64)> + '_ {
        self.coeffs.iter().map(|(&v, &c)| (v, c))
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &LinForm) -> LinForm {
        let mut out = self.clone();
        out.constant += other.constant;
        for (&v, &c) in &other.coeffs {
            out.add_coeff(v, c);
        }
        out
    }

    pub fn sub(&self, other: &LinForm) -> LinForm {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> LinForm {
        if k == 0 {
            return LinForm::constant(0);
        }
        LinForm { coeffs: self.coeffs.iter().map(|(&v, &c)| (v, c * k)).collect(), constant: self.constant * k }
    }

    pub fn shift(&self, k: i64) -> LinForm {
        LinForm { coeffs: self.coeffs.clone(), constant: self.constant + k }
    }

    /// Replaces `v` by the form `value`.
    pub fn substitute(&self, v: Var, value: &LinForm) -> LinForm {
        let c = self.coeff(v);
        if c == 0 {
            return self.clone();
        }
        let mut out = self.clone();
        out.coeffs.remove(&v);
        out.add(&value.scale(c))
    }

    pub fn eval(&self, point: &HashMap<Var, i64>) -> Option<i64> {
        let mut total = self.constant;
        for (v, c) in &self.coeffs {
            total += c * point.get(v)?;
        }
        Some(total)
    }

    /// Divides coefficients by their gcd, rounding the constant down, which
    /// preserves the integer solutions of `self >= 0`.
    pub fn normalized_constraint(&self) -> LinForm {
        let g = self.coeffs.values().fold(0i64, |g, &c| g.gcd(&c));
        if g <= 1 {
            return self.clone();
        }
        LinForm { coeffs: self.coeffs.iter().map(|(&v, &c)| (v, c / g)).collect(), constant: Integer::div_floor(&self.constant, &g) }
    }

    /// Parses an integer affine expression such as `2*X - Y + 3`.
    pub fn parse(src: &str) -> Result<LinForm, ConeError> {
        let p = parse_poly(src).map_err(|e| ConeError::InvalidTerm(e.to_string()))?;
        let mut out = LinForm::constant(0);
        for (m, c) in p.terms() {
            if !c.denom().is_one() {
                return Err(ConeError::InvalidTerm(format!("non-integer coefficient in {src:?}")));
            }
            let c = c.numer().to_i64().ok_or_else(|| ConeError::InvalidTerm(format!("coefficient overflow in {src:?}")))?;
            if m.is_one() {
                out.constant += c;
            } else {
                let pairs: Vec<_> = m.iter().collect();
                if pairs.len() != 1 || pairs[0].1 != 1 {
                    return Err(ConeError::InvalidTerm(format!("not affine: {src:?}")));
                }
                out.add_coeff(pairs[0].0, c);
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.constant.is_zero()
    }
}

impl fmt::Display for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, &c) in &self.coeffs {
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if c.abs() == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{}*{v}", c.abs())?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant > 0 {
            write!(f, " + {}", self.constant)
        } else if self.constant < 0 {
            write!(f, " - {}", -self.constant)
        } else {
            Ok(())
        }
    }
}

impl fmt::Debug for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
