//! Exact arithmetic in Z_{p^n} and linear algebra over it with unit pivots.
//!
//! Z_{p^n} is local: an element is a unit exactly when p does not divide it,
//! and elimination stays exact as long as every pivot is a unit. There is no
//! rounding anywhere in this crate; equality of canonical representatives is
//! the only comparison.

use crate::error::{Error, Result};

/// A prime power p^n kept below 2^32 so that products of representatives fit
/// comfortably in u64/u128 arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimePower {
    p: u64,
    n: u32,
    pn: u64,
}

impl PrimePower {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::ParamOverflow(format!("p={p} is not prime")));
        }
        if n == 0 {
            return Err(Error::ParamOverflow("n must be >= 1".into()));
        }
        let pn = checked_pow(p, n)
            .filter(|&v| v < (1 << 32))
            .ok_or_else(|| Error::ParamOverflow(format!("p^n = {p}^{n} >= 2^32")))?;
        Ok(Self { p, n, pn })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// The modulus p^n itself.
    pub fn value(&self) -> u64 {
        self.pn
    }

    pub fn reduce(&self, v: u64) -> u64 {
        v % self.pn
    }

    pub fn scalar(&self, v: u64) -> ZpnScalar {
        ZpnScalar {
            value: v % self.pn,
            modulus: *self,
        }
    }
}

/// A canonical residue in [0, p^n).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ZpnScalar {
    value: u64,
    modulus: PrimePower,
}

impl ZpnScalar {
    pub fn new(value: u64, modulus: PrimePower) -> Self {
        modulus.scalar(value)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> PrimePower {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn is_unit(&self) -> bool {
        !self.value.is_multiple_of(self.modulus.p)
    }

    fn check(&self, other: &Self) {
        assert_eq!(
            self.modulus, other.modulus,
            "scalars from different Z_(p^n) moduli"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        self.modulus.scalar(self.value + other.value)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        self.modulus
            .scalar(self.value + self.modulus.pn - other.value)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let prod = (self.value as u128 * other.value as u128) % self.modulus.pn as u128;
        self.modulus.scalar(prod as u64)
    }

    pub fn neg(&self) -> Self {
        self.modulus.scalar(self.modulus.pn - self.value)
    }

    /// Multiplicative inverse by extended Euclid on (value, p^n).
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotAUnit(self.value));
        }
        Ok(self
            .modulus
            .scalar(mod_inverse(self.value, self.modulus.pn)))
    }
}

/// Extended Euclid; `a` must be coprime to `m`.
pub(crate) fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1, "inputs not coprime");
    (old_s.rem_euclid(m as i128)) as u64
}

pub(crate) fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn factorize(mut x: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= x {
        if x.is_multiple_of(d) {
            let mut e = 0;
            while x.is_multiple_of(d) {
                x /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if x > 1 {
        out.push((x, 1));
    }
    out
}

/// A dense matrix over one Z_{p^n}.
///
/// Storing the modulus once on the matrix is the representation of the
/// invariant that all entries share it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZpnMatrix {
    modulus: PrimePower,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl ZpnMatrix {
    pub fn zero(modulus: PrimePower, rows: usize, cols: usize) -> Self {
        Self {
            modulus,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(modulus: PrimePower, dim: usize) -> Self {
        let mut m = Self::zero(modulus, dim, dim);
        for i in 0..dim {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(modulus: PrimePower, rows: &[Vec<u64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zero(modulus, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> PrimePower {
        self.modulus
    }

    pub fn get(&self, r: usize, c: usize) -> ZpnScalar {
        self.modulus.scalar(self.data[r * self.cols + c])
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = self.modulus.reduce(v);
    }

    #[cfg(test)]
    fn raw(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    /// Solves A x = b exactly, pivoting only on unit entries; the first unit
    /// entry in column order is chosen so elimination traces are
    /// reproducible. Requires cols <= rows; extra rows must be consistent.
    pub fn solve_unit_pivot(&self, b: &[u64]) -> Result<Vec<ZpnScalar>> {
        assert_eq!(b.len(), self.rows, "rhs length must match row count");
        assert!(
            self.cols <= self.rows,
            "system must be square or overdetermined"
        );
        let pn = self.modulus.pn;
        let p = self.modulus.p;
        let mut a = self.data.clone();
        let mut rhs: Vec<u64> = b.iter().map(|&v| v % pn).collect();
        let cols = self.cols;
        let rows = self.rows;

        for col in 0..cols {
            let pivot = (col..rows)
                .find(|&r| !a[r * cols + col].is_multiple_of(p))
                .ok_or(Error::NoUnitPivot(col))?;
            if pivot != col {
                for c in 0..cols {
                    a.swap(pivot * cols + c, col * cols + c);
                }
                rhs.swap(pivot, col);
            }
            let inv = mod_inverse(a[col * cols + col], pn);
            for c in 0..cols {
                a[col * cols + c] = mulmod(a[col * cols + c], inv, pn);
            }
            rhs[col] = mulmod(rhs[col], inv, pn);
            for r in 0..rows {
                if r == col {
                    continue;
                }
                let factor = a[r * cols + col];
                if factor == 0 {
                    continue;
                }
                for c in 0..cols {
                    let t = mulmod(factor, a[col * cols + c], pn);
                    a[r * cols + c] = (a[r * cols + c] + pn - t) % pn;
                }
                let t = mulmod(factor, rhs[col], pn);
                rhs[r] = (rhs[r] + pn - t) % pn;
            }
        }
        // Leftover rows reduced to 0 = rhs; any nonzero rhs is a conflict.
        if rhs[cols..].iter().any(|&v| v != 0) {
            return Err(Error::Inconsistent);
        }
        Ok(rhs[..cols]
            .iter()
            .map(|&v| self.modulus.scalar(v))
            .collect())
    }

    /// Rank of the reduction mod p over the prime field.
    pub fn residue_rank(&self) -> usize {
        let p = self.modulus.p;
        let mut a: Vec<u64> = self.data.iter().map(|&v| v % p).collect();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for col in 0..cols {
            let Some(pivot) = (rank..rows).find(|&r| a[r * cols + col] != 0) else {
                continue;
            };
            for c in 0..cols {
                a.swap(pivot * cols + c, rank * cols + c);
            }
            let inv = if p == 2 {
                1
            } else {
                mod_inverse(a[rank * cols + col], p)
            };
            for c in 0..cols {
                a[rank * cols + c] = a[rank * cols + c] * inv % p;
            }
            for r in 0..rows {
                if r == rank {
                    continue;
                }
                let factor = a[r * cols + col];
                if factor == 0 {
                    continue;
                }
                for c in 0..cols {
                    let t = factor * a[rank * cols + c] % p;
                    a[r * cols + c] = (a[r * cols + c] + p - t) % p;
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }
}

pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z4() -> PrimePower {
        PrimePower::new(2, 2).unwrap()
    }

    #[test]
    fn scalar_inverse_examples() {
        let m = z4();
        assert_eq!(m.scalar(1).inverse().unwrap().value(), 1);
        assert_eq!(m.scalar(3).inverse().unwrap().value(), 3); // 3*3 = 9 = 1 mod 4
        assert!(matches!(m.scalar(2).inverse(), Err(Error::NotAUnit(2))));
    }

    #[test]
    fn prime_power_rejects_bad_params() {
        assert!(PrimePower::new(4, 2).is_err());
        assert!(PrimePower::new(2, 0).is_err());
        assert!(PrimePower::new(2, 32).is_err()); // 2^32 not < 2^32
        assert!(PrimePower::new(2, 31).is_ok());
    }

    #[test]
    fn solve_identity_system() {
        let m = ZpnMatrix::identity(z4(), 2);
        let x = m.solve_unit_pivot(&[3, 1]).unwrap();
        assert_eq!(
            x.iter().map(ZpnScalar::value).collect::<Vec<_>>(),
            vec![3, 1]
        );
    }

    #[test]
    fn solve_with_row_swap() {
        // [[2,1],[1,0]] x = (3,1) over Z4 has x = (1,1): 2*1 + 1*1 = 3, 1*1 = 1.
        let m = ZpnMatrix::from_rows(z4(), &[vec![2, 1], vec![1, 0]]);
        let x = m.solve_unit_pivot(&[3, 1]).unwrap();
        let xv: Vec<u64> = x.iter().map(ZpnScalar::value).collect();
        assert_eq!(xv, vec![1, 1]);
        // Exact residual check.
        for r in 0..2 {
            let acc: u64 = (0..2).map(|c| m.raw(r, c) * xv[c]).sum::<u64>() % 4;
            assert_eq!(acc, [3, 1][r]);
        }
    }

    #[test]
    fn solve_all_non_unit_fails() {
        let m = ZpnMatrix::from_rows(z4(), &[vec![2, 2], vec![2, 2]]);
        assert!(matches!(
            m.solve_unit_pivot(&[1, 0]),
            Err(Error::NoUnitPivot(0))
        ));
    }

    #[test]
    fn overdetermined_consistency() {
        let m = ZpnMatrix::from_rows(z4(), &[vec![1, 0], vec![0, 1], vec![1, 1]]);
        let x = m.solve_unit_pivot(&[2, 3, 1]).unwrap();
        assert_eq!(
            x.iter().map(ZpnScalar::value).collect::<Vec<_>>(),
            vec![2, 3]
        );
        assert!(matches!(
            m.solve_unit_pivot(&[2, 3, 0]),
            Err(Error::Inconsistent)
        ));
    }

    #[test]
    fn residue_rank_examples() {
        assert_eq!(ZpnMatrix::identity(z4(), 3).residue_rank(), 3);
        let zero_mod2 = ZpnMatrix::from_rows(z4(), &[vec![2, 0], vec![0, 2]]);
        assert_eq!(zero_mod2.residue_rank(), 0);
        let rank1 = ZpnMatrix::from_rows(z4(), &[vec![1, 1], vec![1, 3]]);
        assert_eq!(rank1.residue_rank(), 1);
    }

    /// Plain row reduction over F_p, written independently of ZpnMatrix.
    fn rank_bruteforce(p: u64, rows: &[Vec<u64>]) -> usize {
        let mut m: Vec<Vec<u64>> = rows
            .iter()
            .map(|r| r.iter().map(|v| v % p).collect())
            .collect();
        let mut rank = 0;
        let cols = m.first().map_or(0, Vec::len);
        for c in 0..cols {
            if let Some(r) = (rank..m.len()).find(|&r| m[r][c] != 0) {
                m.swap(r, rank);
                let inv = mod_inverse(m[rank][c], p);
                for v in m[rank].iter_mut() {
                    *v = *v * inv % p;
                }
                let pivot_row = m[rank].clone();
                for (r2, row) in m.iter_mut().enumerate() {
                    if r2 != rank && row[c] != 0 {
                        let f = row[c];
                        for (v, pv) in row.iter_mut().zip(&pivot_row) {
                            *v = (*v + p - f * pv % p) % p;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    proptest! {
        #[test]
        fn inverse_is_involutive(v in 0u64..1000) {
            let m = PrimePower::new(3, 4).unwrap();
            let s = m.scalar(v);
            if s.is_unit() {
                let inv = s.inverse().unwrap();
                prop_assert_eq!(inv.inverse().unwrap(), s);
                prop_assert_eq!(s.mul(&inv).value(), 1);
            }
        }

        #[test]
        fn residue_rank_matches_bruteforce(
            entries in proptest::collection::vec(0u64..27, 12)
        ) {
            let m = PrimePower::new(3, 3).unwrap();
            let rows: Vec<Vec<u64>> = entries.chunks(4).map(<[u64]>::to_vec).collect();
            let mat = ZpnMatrix::from_rows(m, &rows);
            prop_assert_eq!(mat.residue_rank(), rank_bruteforce(3, &rows));
        }

        #[test]
        fn solve_recovers_planted_solution(
            x in proptest::collection::vec(0u64..8, 3),
            noise in proptest::collection::vec(0u64..8, 9)
        ) {
            // Build A = I + strictly-upper noise (unit diagonal), b = A x.
            let m = PrimePower::new(2, 3).unwrap();
            let mut rows = vec![vec![0u64; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    rows[i][j] = if i == j { 1 } else if j > i { noise[i * 3 + j] % 8 } else { 0 };
                }
            }
            let a = ZpnMatrix::from_rows(m, &rows);
            let b: Vec<u64> = (0..3)
                .map(|r| (0..3).map(|c| rows[r][c] * x[c]).sum::<u64>() % 8)
                .collect();
            let got = a.solve_unit_pivot(&b).unwrap();
            prop_assert_eq!(got.iter().map(ZpnScalar::value).collect::<Vec<_>>(), x);
        }
    }
}
