use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use super::Var;

/// A monomial with nonnegative exponents, stored sorted by variable with no zero exponents.
///
/// The ordering is lexicographic with variables ranked by name, so the largest
/// monomial of a polynomial is the last key of its term map.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Monomial {
        Monomial(vec![(v, 1)])
    }

    pub fn var_pow(v: Var, e: u32) -> Monomial {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, u32)>) -> Monomial {
        let mut map: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_insert(0) += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, u32)> + '_ {
        self.0.iter().copied()
    }

    pub fn degree(&self, v: Var) -> u32 {
        self.0.binary_search_by(|(w, _)| w.cmp(&v)).map(|i| self.0[i].1).unwrap_or(0)
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&(_, e)| e as u64).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        merge(&self.0, &other.0, |a, b| a + b)
    }

    pub fn pow(&self, k: u32) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|&(v, e)| (v, e * k)).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().all(|&(v, e)| other.degree(v) >= e)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        let mut out = Vec::with_capacity(self.0.len());
        for &(v, e) in &self.0 {
            let d = e - other.degree(v);
            if d > 0 {
                out.push((v, d));
            }
        }
        Some(Monomial(out))
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .filter_map(|&(v, e)| {
                    let m = e.min(other.degree(v));
                    (m > 0).then_some((v, m))
                })
                .collect(),
        )
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        merge(&self.0, &other.0, |a, b| a.max(b))
    }

    pub fn without(&self, v: Var) -> Monomial {
        Monomial(self.0.iter().copied().filter(|&(w, _)| w != v).collect())
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().map(|&(v, _)| v)
    }
}

fn merge(a: &[(Var, u32)], b: &[(Var, u32)], f: impl Fn(u32, u32) -> u32) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                Ordering::Less => {
                    i += 1;
                    (va, f(ea, 0))
                }
                Ordering::Greater => {
                    j += 1;
                    (vb, f(0, eb))
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (va, f(ea, eb))
                }
            },
            (Some(&(va, ea)), None) => {
                i += 1;
                (va, f(ea, 0))
            }
            (None, Some(&(vb, eb))) => {
                j += 1;
                (vb, f(0, eb))
            }
            (None, None) => unreachable!(),
        };
        if next.1 > 0 {
            out.push(next);
        }
    }
    Monomial(out)
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, &(v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A monomial with signed exponents.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct LaurentMono(Vec<(Var, i64)>);

impl LaurentMono {
    pub fn one() -> LaurentMono {
        LaurentMono(Vec::new())
    }

    pub fn var_pow(v: Var, e: i64) -> LaurentMono {
        LaurentMono::from_pairs([(v, e)])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, i64)>) -> LaurentMono {
        let mut map: BTreeMap<Var, i64> = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_insert(0) += e;
        }
        LaurentMono(map.into_iter().filter(|&(_, e)| e != 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, i64)> + '_ {
        self.0.iter().copied()
    }

    pub fn exponent(&self, v: Var) -> i64 {
        self.0.binary_search_by(|(w, _)| w.cmp(&v)).map(|i| self.0[i].1).unwrap_or(0)
    }

    pub fn mul(&self, other: &LaurentMono) -> LaurentMono {
        LaurentMono::from_pairs(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn pow(&self, k: i64) -> LaurentMono {
        LaurentMono::from_pairs(self.0.iter().map(|&(v, e)| (v, e * k)))
    }

    pub fn inv(&self) -> LaurentMono {
        self.pow(-1)
    }

    /// Splits into numerator and denominator monomials.
    pub fn split(&self) -> (Monomial, Monomial) {
        let pos = Monomial::from_pairs(self.0.iter().filter(|p| p.1 > 0).map(|&(v, e)| (v, e as u32)));
        let neg = Monomial::from_pairs(self.0.iter().filter(|p| p.1 < 0).map(|&(v, e)| (v, (-e) as u32)));
        (pos, neg)
    }

    pub fn from_monomial(m: &Monomial) -> LaurentMono {
        LaurentMono(m.iter().map(|(v, e)| (v, e as i64)).collect())
    }
}

impl fmt::Debug for LaurentMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LaurentMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, &(v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}
