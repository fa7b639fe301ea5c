//! Minimal dense polynomial arithmetic over the prime field F_p.
//!
//! Only what modulus selection needs: irreducibility of a monic polynomial
//! and the search for the smallest irreducible of a given degree.

use crate::zpn::{checked_pow, mod_inverse};

/// Coefficients little-endian, trailing zeros trimmed, entries in [0, p).
fn trim(mut c: Vec<u64>) -> Vec<u64> {
    while c.len() > 1 && *c.last().unwrap() == 0 {
        c.pop();
    }
    c
}

fn mul_mod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    rem(prod, modulus, p)
}

fn rem(mut a: Vec<u64>, modulus: &[u64], p: u64) -> Vec<u64> {
    let d = modulus.len() - 1;
    while a.len() > d {
        let lead = *a.last().unwrap();
        let shift = a.len() - 1 - d;
        if lead != 0 {
            // modulus is monic, so no inverse is needed for the leading term
            for (i, &mc) in modulus.iter().enumerate() {
                let idx = shift + i;
                a[idx] = (a[idx] + p - lead * mc % p) % p;
            }
        }
        a.pop();
    }
    trim(a)
}

fn pow_x_mod(exp: u64, modulus: &[u64], p: u64) -> Vec<u64> {
    // x^exp mod modulus by square-and-multiply.
    let mut result = vec![1u64];
    let mut base = rem(vec![0, 1], modulus, p);
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod(&result, &base, modulus, p);
        }
        base = mul_mod(&base, &base, modulus, p);
        e >>= 1;
    }
    result
}

fn is_zero(a: &[u64]) -> bool {
    a.iter().all(|&c| c == 0)
}

fn gcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    while !is_zero(&b) {
        let r = rem_general(&a, &b, p);
        a = b;
        b = r;
    }
    a = trim(a);
    let lead = *a.last().unwrap();
    if lead > 1 {
        let inv = mod_inverse(lead, p);
        for c in a.iter_mut() {
            *c = *c * inv % p;
        }
    }
    a
}

/// Remainder of a by b for arbitrary nonzero b; zero comes back as [0].
fn rem_general(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let b = trim(b.to_vec());
    debug_assert!(!is_zero(&b), "division by the zero polynomial");
    let lead_inv = mod_inverse(*b.last().unwrap(), p);
    while a.len() >= b.len() && !is_zero(&a) {
        let shift = a.len() - b.len();
        let factor = *a.last().unwrap() * lead_inv % p;
        if factor != 0 {
            for (i, &bc) in b.iter().enumerate() {
                a[shift + i] = (a[shift + i] + p - factor * bc % p) % p;
            }
        }
        a.pop();
        if a.is_empty() {
            a.push(0);
        }
        a = trim(a);
    }
    a
}

fn is_one(a: &[u64]) -> bool {
    a.len() == 1 && a[0] == 1
}

/// Standard criterion: monic f of degree m is irreducible over F_p iff
/// x^(p^m) = x mod f and gcd(x^(p^(m/q)) - x, f) = 1 for every prime q | m.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let f = trim(f.to_vec());
    let m = f.len() - 1;
    if m == 0 {
        return false;
    }
    if m == 1 {
        return true;
    }
    let pm = match checked_pow(p, m as u32) {
        Some(v) => v,
        None => return false,
    };
    let xq = pow_x_mod(pm, &f, p);
    // x^(p^m) - x must be 0 mod f
    let mut diff = xq;
    if diff.len() < 2 {
        diff.resize(2, 0);
    }
    diff[1] = (diff[1] + p - 1) % p;
    if !trim(diff.clone()).iter().all(|&c| c == 0) {
        return false;
    }
    for (q, _) in crate::zpn::factorize(m as u64) {
        let e = m as u64 / q;
        let pe = checked_pow(p, e as u32).unwrap();
        let mut d = pow_x_mod(pe, &f, p);
        if d.len() < 2 {
            d.resize(2, 0);
        }
        d[1] = (d[1] + p - 1) % p;
        let d = trim(d);
        if d.iter().all(|&c| c == 0) {
            return false;
        }
        if !is_one(&gcd(f.clone(), d, p)) {
            return false;
        }
    }
    true
}

/// The lexicographically smallest monic irreducible of degree m over F_p,
/// enumerating constant-first digit strings (c_0, ..., c_{m-1}) in counting
/// order. Returned little-endian with the leading 1 included.
pub(crate) fn smallest_irreducible(p: u64, m: u32) -> Vec<u64> {
    let count = checked_pow(p, m).expect("width checked by caller");
    for idx in 0..count {
        let mut f = Vec::with_capacity(m as usize + 1);
        let mut v = idx;
        for _ in 0..m {
            f.push(v % p);
            v /= p;
        }
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over F_p")
}
