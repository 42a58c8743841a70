use std::collections::HashMap;

use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::exactalg::{parse_poly, MultiPoly, Var};

use super::{HeisError, MINOR_FAMILY_BOUND};

/// `Y_1, ..., Y_n`.
pub fn y_vars(n: usize) -> Vec<Var> {
    (1..=n).map(|i| Var::new(&format!("Y{i}"))).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutatorMatrix {
    pub n: usize,
    pub q: Vec<Vec<MultiPoly>>,
    pub r: Vec<Vec<MultiPoly>>,
}

pub fn build_matrices(n: usize) -> Result<CommutatorMatrix, HeisError> {
    if n == 0 {
        return Err(HeisError::ZeroRank);
    }
    let ys = y_vars(n);
    let q: Vec<Vec<MultiPoly>> =
        (0..n).map(|i| (0..n).map(|j| if i + j < n { MultiPoly::var(ys[i + j]) } else { MultiPoly::zero() }).collect()).collect();
    let mut r = vec![vec![MultiPoly::zero(); 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            r[i][n + j] = q[i][j].clone();
            r[n + j][i] = -&q[i][j];
        }
    }
    Ok(CommutatorMatrix { n, q, r })
}

impl CommutatorMatrix {
    pub fn is_antisymmetric(&self) -> bool {
        let m = 2 * self.n;
        (0..m).all(|i| (0..m).all(|j| (&self.r[i][j] + &self.r[j][i]).is_zero()))
    }

    /// Pfaffian of the principal submatrix on the index set `mask`, memoized.
    fn pfaffian(&self, mask: u32, memo: &mut HashMap<u32, MultiPoly>) -> MultiPoly {
        if mask == 0 {
            return MultiPoly::one();
        }
        if mask.count_ones() % 2 == 1 {
            return MultiPoly::zero();
        }
        if let Some(p) = memo.get(&mask) {
            return p.clone();
        }
        let first = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << first);
        let mut total = MultiPoly::zero();
        let mut pos = 0;
        for j in 0..2 * self.n {
            if rest & (1 << j) == 0 {
                continue;
            }
            pos += 1;
            let a = &self.r[first][j];
            if a.is_zero() {
                continue;
            }
            let sub = self.pfaffian(rest & !(1 << j), memo);
            if sub.is_zero() {
                continue;
            }
            let term = a * &sub;
            total = if pos % 2 == 1 { &total + &term } else { &total - &term };
        }
        memo.insert(mask, total.clone());
        total
    }

    /// Principal submatrix of `R` on the indices in `mask`.
    pub fn principal(&self, mask: u32) -> Vec<Vec<MultiPoly>> {
        let idx: Vec<usize> = (0..2 * self.n).filter(|i| mask & (1 << i) != 0).collect();
        idx.iter().map(|&i| idx.iter().map(|&j| self.r[i][j].clone()).collect()).collect()
    }
}

/// Fraction-free Gaussian elimination; the last pivot is the determinant.
pub fn det_bareiss(m: &[Vec<MultiPoly>]) -> MultiPoly {
    let n = m.len();
    if n == 0 {
        return MultiPoly::one();
    }
    let mut a: Vec<Vec<MultiPoly>> = m.to_vec();
    let mut sign = false;
    let mut prev = MultiPoly::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return MultiPoly::zero();
            };
            a.swap(k, r);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// `F_j` for `j = 0..=n`, with the Pfaffians they are squares of.
#[derive(Clone, Debug, Serialize)]
pub struct MinorFamily {
    pub n: usize,
    /// Distinct nonzero Pfaffians of principal `2j x 2j` submatrices, up to sign.
    pub pfaffians: Vec<Vec<MultiPoly>>,
    /// Distinct nonzero principal `2j x 2j` minors.
    pub f: Vec<Vec<MultiPoly>>,
}

pub fn minor_family(n: usize) -> Result<MinorFamily, HeisError> {
    if n > MINOR_FAMILY_BOUND {
        return Err(HeisError::SizeLimit { n, bound: MINOR_FAMILY_BOUND });
    }
    let cm = build_matrices(n)?;
    let mut memo = HashMap::new();
    let mut pfaffians = vec![Vec::new(); n + 1];
    for mask in 0u32..(1 << (2 * n)) {
        let k = mask.count_ones() as usize;
        if k % 2 == 1 {
            continue;
        }
        let pf = cm.pfaffian(mask, &mut memo);
        if pf.is_zero() {
            continue;
        }
        let pf = if pf.has_positive_leading() { pf } else { -pf };
        pfaffians[k / 2].push(pf);
    }
    for list in pfaffians.iter_mut() {
        list.sort();
        list.dedup();
    }
    let mut f: Vec<Vec<MultiPoly>> = pfaffians.iter().map(|l| l.iter().map(|g| g.pow(2)).collect()).collect();
    for list in f.iter_mut() {
        list.sort();
        list.dedup();
    }
    Ok(MinorFamily { n, pfaffians, f })
}

/// The minor sets as listed by hand for `n <= 3`, in the variables `Y_i`.
pub fn reduced_listing(n: usize) -> Option<Vec<Vec<MultiPoly>>> {
    let rows: &[&[&str]] = match n {
        1 => &[&["1"], &["Y1^2"]],
        2 => &[&["1"], &["Y1^2", "Y2^2"], &["Y2^4"]],
        3 => &[&["1"], &["Y1^2", "Y2^2", "Y3^2"], &["Y3^4", "Y2^2*Y3^2", "(Y1*Y3 - Y2^2)^2"], &["Y3^6"]],
        _ => return None,
    };
    Some(rows.iter().map(|r| r.iter().map(|s| parse_poly(s).expect("valid listing")).collect()).collect())
}

/// A polynomial with integer coefficients compiled for fast modular evaluation.
#[derive(Clone, Debug)]
pub struct IntPoly {
    terms: Vec<(i64, Vec<u32>)>,
}

impl IntPoly {
    /// Compiles `p` over the variable order `vars`; `None` if a coefficient is
    /// not an integer or a variable is missing from `vars`.
    pub fn compile(p: &MultiPoly, vars: &[Var]) -> Option<IntPoly> {
        let mut terms = Vec::new();
        for (m, c) in p.terms() {
            if !c.denom().is_one() {
                return None;
            }
            let c = c.numer().to_i64()?;
            let mut exps = vec![0u32; vars.len()];
            for (v, e) in m.iter() {
                exps[vars.iter().position(|&w| w == v)?] = e;
            }
            terms.push((c, exps));
        }
        Some(IntPoly { terms })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Value modulo `m` at a point whose coordinates are already reduced.
    pub fn eval_mod(&self, point: &[u64], m: u64) -> u64 {
        let mm = m as u128;
        let mut total: u128 = 0;
        for (c, exps) in &self.terms {
            let mut acc: u128 = (c.rem_euclid(m as i64)) as u128;
            for (x, &e) in point.iter().zip(exps) {
                for _ in 0..e {
                    acc = acc * (*x as u128) % mm;
                }
            }
            total = (total + acc) % mm;
        }
        total as u64
    }
}

impl MinorFamily {
    pub fn compiled(&self) -> Vec<Vec<IntPoly>> {
        let vars = y_vars(self.n);
        self.f.iter().map(|l| l.iter().map(|p| IntPoly::compile(p, &vars).expect("integer minors")).collect()).collect()
    }

    pub fn compiled_pfaffians(&self) -> Vec<Vec<IntPoly>> {
        let vars = y_vars(self.n);
        self.pfaffians.iter().map(|l| l.iter().map(|p| IntPoly::compile(p, &vars).expect("integer Pfaffians")).collect()).collect()
    }

    /// True when every element of every `F_j` is the square of the matching Pfaffian.
    pub fn squares_check(&self) -> bool {
        self.f.iter().zip(&self.pfaffians).all(|(f, g)| {
            let mut sq: Vec<MultiPoly> = g.iter().map(|p| p.pow(2)).collect();
            sq.sort();
            sq.dedup();
            &sq == f
        })
    }
}
