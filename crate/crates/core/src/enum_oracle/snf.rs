/// Arithmetic in `Z/p^N` for the small moduli used by the oracle.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Modulus {
    pub p: u64,
    pub level: u32,
    pub m: u64,
}

impl Modulus {
    pub fn new(p: u64, level: u32) -> Modulus {
        Modulus { p, level, m: p.pow(level) }
    }

    /// `min(v_p(x), N)` for `x` reduced mod `p^N`.
    pub fn val(&self, x: u64) -> u32 {
        if x == 0 {
            return self.level;
        }
        let mut x = x;
        let mut v = 0;
        while x.is_multiple_of(self.p) {
            x /= self.p;
            v += 1;
        }
        v
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.m as u128) as u64
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.m - b) % self.m
    }

    fn inv(&self, a: u64) -> u64 {
        let (mut r0, mut r1) = (self.m as i128, a as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1, "not a unit");
        s0.rem_euclid(self.m as i128) as u64
    }

    fn unit_part(&self, x: u64, v: u32) -> u64 {
        x / self.p.pow(v)
    }
}

/// Elementary divisor valuations of a square matrix over `Z/p^N`, each capped
/// at `N`, in ascending order. The matrix is consumed.
pub(crate) fn elementary_divisors(mut a: Vec<Vec<u64>>, md: &Modulus) -> Vec<u32> {
    let n = a.len();
    let mut out = Vec::with_capacity(n);
    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..n).collect();
    while !rows.is_empty() {
        let mut best = (md.level + 1, 0, 0);
        for (ri, &r) in rows.iter().enumerate() {
            for (ci, &c) in cols.iter().enumerate() {
                let v = md.val(a[r][c]);
                if v < best.0 {
                    best = (v, ri, ci);
                    if v == 0 {
                        break;
                    }
                }
            }
            if best.0 == 0 {
                break;
            }
        }
        let (v, ri, ci) = best;
        if v >= md.level {
            out.extend(std::iter::repeat_n(md.level, rows.len()));
            break;
        }
        let (pr, pc) = (rows[ri], cols[ci]);
        let winv = md.inv(md.unit_part(a[pr][pc], v));
        let pv = md.p.pow(v);
        // clear the pivot column
        for &r in &rows {
            if r == pr || a[r][pc] == 0 {
                continue;
            }
            let f = md.mul(a[r][pc] / pv, winv);
            for &c in &cols {
                let x = md.mul(f, a[pr][c]);
                a[r][c] = md.sub(a[r][c], x);
            }
        }
        // after the column is clear, the pivot row only matters through the pivot
        out.push(v);
        rows.remove(ri);
        cols.remove(ci);
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_mixed() {
        let md = Modulus::new(2, 5);
        assert_eq!(elementary_divisors(vec![vec![4, 0], vec![0, 2]], &md), vec![1, 2]);
        assert_eq!(elementary_divisors(vec![vec![2, 4], vec![4, 8]], &md), vec![1, 5]);
        assert_eq!(elementary_divisors(vec![vec![0, 0], vec![0, 0]], &md), vec![5, 5]);
        let md3 = Modulus::new(3, 3);
        assert_eq!(elementary_divisors(vec![vec![1, 3], vec![3, 0]], &md3), vec![0, 2]);
        assert_eq!(md3.inv(2), 14);
    }
}
