use std::fmt;

use super::{AlgError, MultiPoly, RatFunc, Var};

/// A power series in one distinguished variable, truncated after `cap`.
/// Coefficients are rational functions in the remaining variables.
#[derive(Clone, Debug)]
pub struct TSeries {
    pub var: Var,
    pub cap: usize,
    pub coeffs: Vec<RatFunc>,
}

impl TSeries {
    pub fn zero(var: Var, cap: usize) -> TSeries {
        TSeries { var, cap, coeffs: vec![RatFunc::zero(); cap + 1] }
    }

    pub fn one(var: Var, cap: usize) -> TSeries {
        let mut s = TSeries::zero(var, cap);
        s.coeffs[0] = RatFunc::one();
        s
    }

    pub fn from_poly(p: &MultiPoly, var: Var, cap: usize) -> TSeries {
        let mut s = TSeries::zero(var, cap);
        for (k, part) in p.by_powers_of(var).into_iter().enumerate() {
            if k <= cap {
                s.coeffs[k] = RatFunc::from_poly(part);
            }
        }
        s
    }

    pub fn coeff(&self, k: usize) -> &RatFunc {
        &self.coeffs[k]
    }

    pub fn add(&self, other: &TSeries) -> TSeries {
        let cap = self.cap.min(other.cap);
        TSeries { var: self.var, cap, coeffs: (0..=cap).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect() }
    }

    pub fn sub(&self, other: &TSeries) -> TSeries {
        let cap = self.cap.min(other.cap);
        TSeries { var: self.var, cap, coeffs: (0..=cap).map(|k| &self.coeffs[k] - &other.coeffs[k]).collect() }
    }

    pub fn mul(&self, other: &TSeries) -> TSeries {
        let cap = self.cap.min(other.cap);
        let mut out = TSeries::zero(self.var, cap);
        for i in 0..=cap {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=cap - i {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                out.coeffs[i + j] = &out.coeffs[i + j] + &(&self.coeffs[i] * &other.coeffs[j]);
            }
        }
        out
    }

    pub fn scale(&self, c: &RatFunc) -> TSeries {
        TSeries { var: self.var, cap: self.cap, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn inverse(&self) -> Result<TSeries, AlgError> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(AlgError::NonUnitDenominator(self.var.name().to_owned()));
        }
        let inv0 = c0.inv()?;
        let mut out = TSeries::zero(self.var, self.cap);
        out.coeffs[0] = inv0.clone();
        for k in 1..=self.cap {
            let mut acc = RatFunc::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() && !out.coeffs[k - j].is_zero() {
                    acc = &acc + &(&self.coeffs[j] * &out.coeffs[k - j]);
                }
            }
            out.coeffs[k] = (-&(&acc * &inv0)).reduce();
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> TSeries {
        let mut out = TSeries::one(self.var, self.cap);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn reduce(&self) -> TSeries {
        TSeries { var: self.var, cap: self.cap, coeffs: self.coeffs.iter().map(RatFunc::reduce).collect() }
    }

    /// Coefficientwise equality up to the smaller cap.
    pub fn agrees_with(&self, other: &TSeries) -> bool {
        let cap = self.cap.min(other.cap);
        (0..=cap).all(|k| self.coeffs[k] == other.coeffs[k])
    }
}

/// Expands a rational function as a power series in `var` up to and including `var^cap`.
pub fn rf_series(f: &RatFunc, var: Var, cap: usize) -> Result<TSeries, AlgError> {
    if f.den_monomial().degree(var) > 0 {
        return Err(AlgError::NonUnitDenominator(var.name().to_owned()));
    }
    let mut s = TSeries::from_poly(f.num(), var, cap);
    for (fac, e) in f.den_factors() {
        let inv = TSeries::from_poly(fac, var, cap).inverse()?;
        s = s.mul(&inv.pow(*e));
    }
    let m = f.den_monomial();
    if !m.is_one() {
        let c = RatFunc::new(MultiPoly::one(), &MultiPoly::term(super::Q::from_integer(1.into()), m.clone()))?;
        s = s.scale(&c);
    }
    Ok(s.reduce())
}

impl fmt::Display for TSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*{}", self.var)?,
                _ => write!(f, "({c})*{}^{k}", self.var)?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O({}^{})", self.var, self.cap + 1)
    }
}
