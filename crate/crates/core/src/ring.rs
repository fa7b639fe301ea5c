//! Galois rings GR(p^n, m) = Z_{p^n}[x]/<f(x)> for a monic basic irreducible
//! f, with Teichmuller representatives, p-adic digits, the generalized
//! Frobenius, and the absolute trace down to Z_{p^n}.
//!
//! Elements are coefficient vectors of length m with canonical entries in
//! [0, p^n). The context caches the Teichmuller set 0, 1, gamma, gamma^2,
//! ..., gamma^(p^m - 2) together with a residue-indexed lookup table, which
//! makes digit extraction a table hit.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fppoly;
use crate::zpn::{checked_pow, factorize, mulmod, PrimePower, ZpnScalar};

#[derive(Debug)]
struct RingInner {
    pp: PrimePower,
    m: u32,
    /// p^m, the size of the Teichmuller set and of the residue field.
    teich_len: u64,
    /// p^(nm), the number of ring elements.
    size: u64,
    /// Monic, length m+1, canonical mod p^n.
    modulus: Vec<u64>,
    gamma: Vec<u64>,
    /// Index 0 is the ring zero; index i >= 1 holds gamma^(i-1).
    teich: Vec<Vec<u64>>,
    /// Maps a residue encoding (base-p digit string of an element mod p) to
    /// its Teichmuller index.
    teich_by_residue: Vec<u32>,
}

/// A constructed Galois ring; cheap to clone and safe to share.
#[derive(Clone)]
pub struct RingContext {
    inner: Arc<RingInner>,
}

impl fmt::Debug for RingContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GR({}^{}, {})",
            self.inner.pp.p(),
            self.inner.pp.n(),
            self.inner.m
        )
    }
}

impl PartialEq for RingContext {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.pp == other.inner.pp
                && self.inner.m == other.inner.m
                && self.inner.modulus == other.inner.modulus)
    }
}
impl Eq for RingContext {}

impl RingContext {
    /// Builds GR(p^n, m) with the default modulus: the lexicographically
    /// smallest monic irreducible of degree m over F_p, lifted verbatim.
    pub fn new(p: u64, n: u32, m: u32) -> Result<Self> {
        Self::build(p, n, m, None)
    }

    /// Builds GR(p^n, m) with a caller-supplied monic basic irreducible
    /// modulus, coefficients little-endian of length m+1.
    pub fn with_modulus(p: u64, n: u32, m: u32, modulus: &[u64]) -> Result<Self> {
        Self::build(p, n, m, Some(modulus))
    }

    fn build(p: u64, n: u32, m: u32, modulus: Option<&[u64]>) -> Result<Self> {
        let pp = PrimePower::new(p, n)?;
        if m == 0 {
            return Err(Error::ParamOverflow("degree m must be >= 1".into()));
        }
        let size = checked_pow(pp.value(), m)
            .filter(|&v| v <= (1 << 32))
            .ok_or_else(|| Error::ParamOverflow(format!("p^(nm) = {p}^({n}*{m}) > 2^32")))?;
        let teich_len = checked_pow(p, m).expect("bounded by p^(nm)");

        let modulus = match modulus {
            Some(coeffs) => {
                if coeffs.len() != m as usize + 1 {
                    return Err(Error::BadModulus(format!(
                        "expected {} coefficients, got {}",
                        m + 1,
                        coeffs.len()
                    )));
                }
                let canon: Vec<u64> = coeffs.iter().map(|&c| pp.reduce(c)).collect();
                if *canon.last().unwrap() != 1 {
                    return Err(Error::BadModulus("modulus is not monic".into()));
                }
                let reduced: Vec<u64> = canon.iter().map(|&c| c % p).collect();
                if !fppoly::is_irreducible(&reduced, p) {
                    return Err(Error::BadModulus(
                        "reduction mod p is not irreducible".into(),
                    ));
                }
                canon
            }
            None => fppoly::smallest_irreducible(p, m),
        };

        let mut inner = RingInner {
            pp,
            m,
            teich_len,
            size,
            modulus,
            gamma: Vec::new(),
            teich: Vec::new(),
            teich_by_residue: Vec::new(),
        };
        inner.gamma = inner.find_gamma()?;
        inner.build_teich()?;
        Ok(Self {
            inner: Arc::new(inner),
        })
    }

    pub fn p(&self) -> u64 {
        self.inner.pp.p()
    }

    pub fn n(&self) -> u32 {
        self.inner.pp.n()
    }

    pub fn degree(&self) -> u32 {
        self.inner.m
    }

    pub fn prime_power(&self) -> PrimePower {
        self.inner.pp
    }

    /// Number of elements, p^(nm).
    pub fn size(&self) -> u64 {
        self.inner.size
    }

    /// Size of the Teichmuller set, p^m.
    pub fn teich_len(&self) -> u64 {
        self.inner.teich_len
    }

    pub fn modulus(&self) -> &[u64] {
        &self.inner.modulus
    }

    pub fn zero(&self) -> GRElement {
        GRElement {
            ring: self.clone(),
            coeffs: vec![0; self.inner.m as usize],
        }
    }

    pub fn one(&self) -> GRElement {
        self.from_scalar(1)
    }

    pub fn from_scalar(&self, v: u64) -> GRElement {
        let mut coeffs = vec![0; self.inner.m as usize];
        coeffs[0] = self.inner.pp.reduce(v);
        GRElement {
            ring: self.clone(),
            coeffs,
        }
    }

    /// Element from little-endian coefficients; shorter vectors are padded.
    pub fn element(&self, coeffs: &[u64]) -> GRElement {
        assert!(
            coeffs.len() <= self.inner.m as usize,
            "too many coefficients for degree {}",
            self.inner.m
        );
        let mut c = vec![0; self.inner.m as usize];
        for (i, &v) in coeffs.iter().enumerate() {
            c[i] = self.inner.pp.reduce(v);
        }
        GRElement {
            ring: self.clone(),
            coeffs: c,
        }
    }

    /// The idx-th element in coefficient-digit order, idx < p^(nm).
    pub fn element_from_index(&self, idx: u64) -> GRElement {
        debug_assert!(idx < self.inner.size);
        let pn = self.inner.pp.value();
        let mut v = idx;
        let coeffs = (0..self.inner.m)
            .map(|_| {
                let c = v % pn;
                v /= pn;
                c
            })
            .collect();
        GRElement {
            ring: self.clone(),
            coeffs,
        }
    }

    /// A Teichmuller generator: order exactly p^m - 1 with primitive residue.
    pub fn gamma(&self) -> GRElement {
        GRElement {
            ring: self.clone(),
            coeffs: self.inner.gamma.clone(),
        }
    }

    /// Teichmuller element by index: 0 is the ring zero, i >= 1 is gamma^(i-1).
    pub fn teich(&self, idx: u64) -> GRElement {
        GRElement {
            ring: self.clone(),
            coeffs: self.inner.teich[idx as usize].clone(),
        }
    }

    pub fn teich_elements(&self) -> Vec<GRElement> {
        (0..self.inner.teich_len).map(|i| self.teich(i)).collect()
    }

    /// Index into the Teichmuller set if the element lies in it.
    pub fn teich_index_of(&self, e: &GRElement) -> Option<u64> {
        let enc = e.residue_encode();
        if enc == 0 {
            return e.is_zero().then_some(0);
        }
        let idx = self.inner.teich_by_residue[enc as usize];
        (self.inner.teich[idx as usize] == e.coeffs).then_some(idx as u64)
    }

    /// Sum of the m Frobenius conjugates; lands in Z_{p^n}.
    pub fn absolute_trace(&self, e: &GRElement) -> ZpnScalar {
        let mut acc = self.zero();
        for i in 0..self.inner.m {
            acc = acc.add(&e.frobenius(i));
        }
        assert!(
            acc.coeffs[1..].iter().all(|&c| c == 0),
            "absolute trace landed outside the characteristic ring"
        );
        self.inner.pp.scalar(acc.coeffs[0])
    }

    pub fn same_ring(&self, other: &RingContext) -> bool {
        self == other
    }

    /// True when e^d = 1 and e^(d/q) != 1 for every prime q | d.
    pub fn verify_order(&self, e: &GRElement, d: u64) -> bool {
        if !e.pow(d).is_one() {
            return false;
        }
        factorize(d).iter().all(|&(q, _)| !e.pow(d / q).is_one())
    }
}

impl RingInner {
    fn reduce_poly(&self, mut a: Vec<u64>) -> Vec<u64> {
        let m = self.m as usize;
        let pn = self.pp.value();
        while a.len() > m {
            let lead = *a.last().unwrap();
            let shift = a.len() - 1 - m;
            if lead != 0 {
                for i in 0..m {
                    let t = mulmod(lead, self.modulus[i], pn);
                    a[shift + i] = (a[shift + i] + pn - t) % pn;
                }
            }
            a.pop();
        }
        a.resize(m, 0);
        a
    }

    fn mul_coeffs(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let pn = self.pp.value();
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                // ai*bj < 2^64 and the running value stays < pn + 2^64 - 2^33,
                // so plain u64 arithmetic cannot overflow here.
                prod[i + j] = (prod[i + j] + ai * bj % pn) % pn;
            }
        }
        self.reduce_poly(prod)
    }

    /// gamma = u^(p^(m(n-1))) for the first unit u, in deterministic
    /// coefficient order starting from the class of x, whose residue is
    /// primitive. Raising to p^(m(n-1)) kills the 1 + <p> component, so the
    /// result lies in the Teichmuller set; its order is verified explicitly.
    fn find_gamma(&self) -> Result<Vec<u64>> {
        let ord = self.teich_len - 1;
        let prime_factors: Vec<u64> = factorize(ord).iter().map(|&(q, _)| q).collect();
        let class_of_x = self.reduce_poly(vec![0, 1]);

        let candidates = std::iter::once(class_of_x).chain((1..self.teich_len).map(|idx| {
            let mut v = idx;
            (0..self.m)
                .map(|_| {
                    let c = v % self.pp.p();
                    v /= self.pp.p();
                    c
                })
                .collect()
        }));

        for cand in candidates {
            if !self.coeffs_is_unit(&cand) {
                continue;
            }
            if !self.residue_has_order(&cand, ord, &prime_factors) {
                continue;
            }
            let exp =
                checked_pow(self.pp.p(), self.m * (self.pp.n() - 1)).expect("bounded by p^(nm)");
            let gamma = self.pow_coeffs(&cand, exp);
            if self.element_has_order(&gamma, ord, &prime_factors) {
                return Ok(gamma);
            }
        }
        Err(Error::BadModulus(
            "no Teichmuller generator found; modulus reduction is not irreducible".into(),
        ))
    }

    fn coeffs_is_unit(&self, a: &[u64]) -> bool {
        a.iter().any(|&c| c % self.pp.p() != 0)
    }

    fn pow_coeffs(&self, a: &[u64], mut e: u64) -> Vec<u64> {
        let mut result = {
            let mut one = vec![0; self.m as usize];
            one[0] = 1;
            one
        };
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul_coeffs(&result, &base);
            }
            base = self.mul_coeffs(&base, &base);
            e >>= 1;
        }
        result
    }

    fn residue_is_one(&self, a: &[u64]) -> bool {
        let p = self.pp.p();
        a[0] % p == 1 && a[1..].iter().all(|&c| c % p == 0)
    }

    fn residue_has_order(&self, a: &[u64], ord: u64, primes: &[u64]) -> bool {
        if !self.residue_is_one(&self.pow_coeffs(a, ord)) {
            return false;
        }
        primes
            .iter()
            .all(|&q| !self.residue_is_one(&self.pow_coeffs(a, ord / q)))
    }

    fn element_has_order(&self, a: &[u64], ord: u64, primes: &[u64]) -> bool {
        let is_one = |c: &[u64]| c[0] == 1 && c[1..].iter().all(|&v| v == 0);
        if !is_one(&self.pow_coeffs(a, ord)) {
            return false;
        }
        primes
            .iter()
            .all(|&q| !is_one(&self.pow_coeffs(a, ord / q)))
    }

    fn residue_encode(&self, a: &[u64]) -> u64 {
        let p = self.pp.p();
        let mut enc = 0;
        for &c in a.iter().rev() {
            enc = enc * p + c % p;
        }
        enc
    }

    fn build_teich(&mut self) -> Result<()> {
        let count = self.teich_len as usize;
        let mut teich = Vec::with_capacity(count);
        let mut by_residue = vec![u32::MAX; count];
        teich.push(vec![0; self.m as usize]);
        by_residue[0] = 0;

        let mut cur = {
            let mut one = vec![0; self.m as usize];
            one[0] = 1;
            one
        };
        for i in 1..count {
            let enc = self.residue_encode(&cur) as usize;
            if by_residue[enc] != u32::MAX {
                return Err(Error::BadModulus(
                    "Teichmuller residues collide; generator order is wrong".into(),
                ));
            }
            by_residue[enc] = i as u32;
            teich.push(cur.clone());
            cur = self.mul_coeffs(&cur, &self.gamma);
        }
        // Closing the cycle: gamma^(p^m - 1) = 1.
        assert!(
            cur[0] == 1 && cur[1..].iter().all(|&v| v == 0),
            "Teichmuller cycle did not close"
        );
        if by_residue.contains(&u32::MAX) {
            return Err(Error::BadModulus(
                "Teichmuller set does not cover the residue field".into(),
            ));
        }
        self.teich = teich;
        self.teich_by_residue = by_residue;
        Ok(())
    }
}

/// An element of a Galois ring: m canonical coefficients of 1, x, ..., x^(m-1).
#[derive(Clone)]
pub struct GRElement {
    ring: RingContext,
    coeffs: Vec<u64>,
}

impl GRElement {
    pub fn ring(&self) -> &RingContext {
        &self.ring
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> ZpnScalar {
        self.ring.inner.pp.scalar(self.coeffs[i])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Units are exactly the elements with nonzero reduction mod p.
    pub fn is_unit(&self) -> bool {
        self.ring.inner.coeffs_is_unit(&self.coeffs)
    }

    fn assert_same_ring(&self, other: &Self) {
        assert!(
            self.ring == other.ring,
            "elements from different ring contexts"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_ring(other);
        let pn = self.ring.inner.pp.value();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a + b) % pn)
            .collect();
        Self {
            ring: self.ring.clone(),
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_same_ring(other);
        let pn = self.ring.inner.pp.value();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a + pn - b) % pn)
            .collect();
        Self {
            ring: self.ring.clone(),
            coeffs,
        }
    }

    pub fn neg(&self) -> Self {
        let pn = self.ring.inner.pp.value();
        let coeffs = self.coeffs.iter().map(|&a| (pn - a) % pn).collect();
        Self {
            ring: self.ring.clone(),
            coeffs,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_ring(other);
        Self {
            ring: self.ring.clone(),
            coeffs: self.ring.inner.mul_coeffs(&self.coeffs, &other.coeffs),
        }
    }

    pub fn mul_scalar(&self, s: u64) -> Self {
        let pn = self.ring.inner.pp.value();
        let s = s % pn;
        let coeffs = self.coeffs.iter().map(|&a| mulmod(a, s, pn)).collect();
        Self {
            ring: self.ring.clone(),
            coeffs,
        }
    }

    pub fn pow(&self, e: u64) -> Self {
        Self {
            ring: self.ring.clone(),
            coeffs: self.ring.inner.pow_coeffs(&self.coeffs, e),
        }
    }

    /// Inverse of a unit: start from the residue-field inverse a^(p^m - 2)
    /// and lift with Newton iterations, each doubling p-adic precision.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotAUnit(self.residue_encode()));
        }
        let mut b = self.pow(self.ring.inner.teich_len - 2);
        let two = self.ring.from_scalar(2);
        for _ in 0..=self.ring.inner.pp.n() {
            let prod = self.mul(&b);
            if prod.is_one() {
                return Ok(b);
            }
            b = b.mul(&two.sub(&prod));
        }
        unreachable!("Newton lift converges within n iterations for a unit");
    }

    /// Base-p encoding of the reduction mod p; 0 exactly for non-units... of
    /// elements of <p>.
    pub(crate) fn residue_encode(&self) -> u64 {
        self.ring.inner.residue_encode(&self.coeffs)
    }

    /// The unique digits a_0, ..., a_{n-1} in the Teichmuller set with
    /// a = sum a_i p^i. Each step looks the digit up by residue and divides
    /// the exact difference by p.
    pub fn p_adic_digits(&self) -> Vec<GRElement> {
        let n = self.ring.inner.pp.n();
        let p = self.ring.inner.pp.p();
        let mut digits = Vec::with_capacity(n as usize);
        let mut cur = self.coeffs.clone();
        for step in 0..n {
            let enc = self.ring.inner.residue_encode(&cur);
            let digit = if enc == 0 {
                vec![0; self.ring.inner.m as usize]
            } else {
                self.ring.inner.teich[self.ring.inner.teich_by_residue[enc as usize] as usize]
                    .clone()
            };
            if step + 1 < n {
                let pn = self.ring.inner.pp.value();
                for (c, d) in cur.iter_mut().zip(&digit) {
                    let diff = (*c + pn - d) % pn;
                    debug_assert_eq!(diff % p, 0, "digit extraction left a non-divisible residue");
                    *c = diff / p;
                }
            } else {
                cur.fill(0);
            }
            digits.push(GRElement {
                ring: self.ring.clone(),
                coeffs: digit,
            });
        }
        digits
    }

    /// The generalized Frobenius sigma^k, acting digit-wise as t -> t^(p^k)
    /// on Teichmuller digits. This is the ring automorphism; the raw power
    /// map fails additivity once n >= 2.
    pub fn frobenius(&self, k: u32) -> Self {
        let ord = self.ring.inner.teich_len - 1;
        let digits = self.p_adic_digits();
        let p = self.ring.inner.pp.p();
        // p^k mod ord, safe for any k.
        let pk = if ord <= 1 {
            0
        } else {
            let mut acc = 1u64;
            for _ in 0..k {
                acc = mulmod(acc, p, ord);
            }
            acc
        };
        let mut out = self.ring.zero();
        let mut scale = 1u64;
        for digit in digits {
            let mapped = match self.ring.teich_index_of(&digit) {
                Some(0) | None => self.ring.zero(),
                Some(i) => {
                    let j = (i - 1) % ord.max(1);
                    self.ring.teich(1 + mulmod(j, pk, ord.max(1)))
                }
            };
            out = out.add(&mapped.mul_scalar(scale));
            // scale <= p^(n-1) < 2^32, so this cannot overflow.
            scale *= p;
        }
        out
    }

    pub fn absolute_trace(&self) -> ZpnScalar {
        self.ring.absolute_trace(self)
    }
}

impl PartialEq for GRElement {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.coeffs == other.coeffs
    }
}
impl Eq for GRElement {}

impl Hash for GRElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

fn fmt_poly(coeffs: &[u64], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut wrote = false;
    for (i, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        if wrote {
            write!(f, " + ")?;
        }
        match (i, c) {
            (0, _) => write!(f, "{c}")?,
            (1, 1) => write!(f, "x")?,
            (1, _) => write!(f, "{c}x")?,
            (_, 1) => write!(f, "x^{i}")?,
            _ => write!(f, "{c}x^{i}")?,
        }
        wrote = true;
    }
    if !wrote {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Debug for GRElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_poly(&self.coeffs, f)
    }
}

impl fmt::Display for GRElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_poly(&self.coeffs, f)
    }
}

impl Add for &GRElement {
    type Output = GRElement;
    fn add(self, rhs: &GRElement) -> GRElement {
        GRElement::add(self, rhs)
    }
}

impl Sub for &GRElement {
    type Output = GRElement;
    fn sub(self, rhs: &GRElement) -> GRElement {
        GRElement::sub(self, rhs)
    }
}

impl Mul for &GRElement {
    type Output = GRElement;
    fn mul(self, rhs: &GRElement) -> GRElement {
        GRElement::mul(self, rhs)
    }
}

impl Neg for &GRElement {
    type Output = GRElement;
    fn neg(self) -> GRElement {
        GRElement::neg(self)
    }
}
