//! Generalized Reed-Solomon codes over a Galois ring: evaluation encoding on
//! a subtractive point set, Lagrange erasure decoding, dual-code
//! construction with verified multipliers, and a brute-force minimum
//! distance for small instances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{GRElement, RingContext};
use crate::tower::{is_subtractive, TowerContext};
use crate::zpn::checked_pow;

/// Horner evaluation; message[i] is the coefficient of x^i.
pub(crate) fn poly_eval(coeffs: &[GRElement], at: &GRElement, ring: &RingContext) -> GRElement {
    let mut acc = ring.zero();
    for c in coeffs.iter().rev() {
        acc = acc.mul(at).add(c);
    }
    acc
}

/// Synthetic division of a polynomial by (x - root); the division is exact
/// whenever root is a root of the polynomial, and the remainder is returned
/// alongside the quotient either way.
pub(crate) fn poly_div_linear(
    coeffs: &[GRElement],
    root: &GRElement,
    ring: &RingContext,
) -> (Vec<GRElement>, GRElement) {
    if coeffs.is_empty() {
        return (Vec::new(), ring.zero());
    }
    let mut quotient = vec![ring.zero(); coeffs.len() - 1];
    let mut carry = ring.zero();
    for i in (0..coeffs.len()).rev() {
        let value = coeffs[i].add(&carry);
        if i == 0 {
            return (quotient, value);
        }
        quotient[i - 1] = value.clone();
        carry = value.mul(root);
    }
    unreachable!()
}

pub(crate) fn poly_degree(coeffs: &[GRElement]) -> Option<usize> {
    coeffs.iter().rposition(|c| !c.is_zero())
}

/// Lagrange interpolation through subtractive points; returns the unique
/// polynomial of degree < pairs.len() hitting every pair.
pub(crate) fn interpolate(
    pairs: &[(GRElement, GRElement)],
    ring: &RingContext,
) -> Result<Vec<GRElement>> {
    let n = pairs.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    // master = prod (x - x_j), degree n
    let mut master = vec![ring.one()];
    for (x, _) in pairs {
        let mut next = vec![ring.zero(); master.len() + 1];
        for (i, c) in master.iter().enumerate() {
            next[i + 1] = next[i + 1].add(c);
            next[i] = next[i].sub(&c.mul(x));
        }
        master = next;
    }
    let mut acc = vec![ring.zero(); n];
    for (x, y) in pairs {
        let (basis, rem) = poly_div_linear(&master, x, ring);
        debug_assert!(rem.is_zero());
        let denom = poly_eval(&basis, x, ring);
        let scale = y.mul(&denom.inverse()?);
        for (i, c) in basis.iter().enumerate() {
            acc[i] = acc[i].add(&c.mul(&scale));
        }
    }
    Ok(acc)
}

/// Serialized form of a tower: everything else is recomputed and re-verified
/// deterministically on load.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerDescriptor {
    pub p: u64,
    pub n: u32,
    pub m: u32,
    pub l: u32,
    pub modulus: Vec<u64>,
}

impl TowerDescriptor {
    pub fn build(&self) -> Result<TowerContext> {
        TowerContext::with_modulus(self.p, self.n, self.m, self.l, &self.modulus)
    }
}

/// Serialized form of a code: eval points as Teichmuller indices (0 is the
/// ring zero, i >= 1 is gamma^(i-1)), multipliers as coefficient vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeDescriptor {
    pub tower: TowerDescriptor,
    pub k: usize,
    pub multipliers: Vec<Vec<u64>>,
    pub eval_point_indices: Vec<u64>,
}

impl CodeDescriptor {
    pub fn build(&self) -> Result<GrsCode> {
        let tower = self.tower.build()?;
        let ring = tower.ring().clone();
        let points: Vec<GRElement> = self
            .eval_point_indices
            .iter()
            .map(|&i| {
                if i < ring.teich_len() {
                    Ok(ring.teich(i))
                } else {
                    Err(Error::Manifest(format!(
                        "eval point index {i} out of range"
                    )))
                }
            })
            .collect::<Result<_>>()?;
        let multipliers: Vec<GRElement> =
            self.multipliers.iter().map(|c| ring.element(c)).collect();
        GrsCode::new(tower, points, multipliers, self.k)
    }
}

/// A generalized Reed-Solomon code over the Galois ring of a tower.
#[derive(Debug, Clone)]
pub struct GrsCode {
    tower: TowerContext,
    eval_points: Vec<GRElement>,
    multipliers: Vec<GRElement>,
    k: usize,
}

impl GrsCode {
    /// General constructor. k = 0 is permitted so that duals of full-rate
    /// codes are representable; encoding then only produces the zero word.
    pub fn new(
        tower: TowerContext,
        eval_points: Vec<GRElement>,
        multipliers: Vec<GRElement>,
        k: usize,
    ) -> Result<Self> {
        if eval_points.is_empty() || eval_points.len() != multipliers.len() {
            return Err(Error::LengthMismatch {
                expected: eval_points.len(),
                got: multipliers.len(),
            });
        }
        if k > eval_points.len() {
            return Err(Error::BadK {
                k,
                len: eval_points.len(),
            });
        }
        if !is_subtractive(&eval_points) {
            return Err(Error::BadModulus(
                "evaluation points are not subtractive".into(),
            ));
        }
        if let Some(bad) = multipliers.iter().find(|v| !v.is_unit()) {
            return Err(Error::NotAUnit(bad.coeffs().first().copied().unwrap_or(0)));
        }
        Ok(Self {
            tower,
            eval_points,
            multipliers,
            k,
        })
    }

    /// Full-length Reed-Solomon code: evaluation at the whole Teichmuller
    /// set in the fixed order 0, 1, gamma, ..., gamma^(|T|-2), multipliers 1.
    pub fn full_length(tower: TowerContext, k: usize) -> Result<Self> {
        let len = tower.ring().teich_len() as usize;
        if k == 0 || k > len {
            return Err(Error::BadK { k, len });
        }
        let points = tower.ring().teich_elements();
        let ones = vec![tower.ring().one(); len];
        Self::new(tower, points, ones, k)
    }

    pub fn tower(&self) -> &TowerContext {
        &self.tower
    }

    pub fn ring(&self) -> &RingContext {
        self.tower.ring()
    }

    pub fn length(&self) -> usize {
        self.eval_points.len()
    }

    pub fn pseudo_dimension(&self) -> usize {
        self.k
    }

    pub fn eval_points(&self) -> &[GRElement] {
        &self.eval_points
    }

    pub fn multipliers(&self) -> &[GRElement] {
        &self.multipliers
    }

    pub fn is_full_length(&self) -> bool {
        self.length() == self.ring().teich_len() as usize
            && self.eval_points == self.ring().teich_elements()
            && self.multipliers.iter().all(GRElement::is_one)
    }

    /// codeword_j = v_j * f(alpha_j) with f the message polynomial.
    pub fn encode(&self, message: &[GRElement]) -> Result<Vec<GRElement>> {
        if message.len() != self.k {
            return Err(Error::LengthMismatch {
                expected: self.k,
                got: message.len(),
            });
        }
        let ring = self.ring();
        Ok(self
            .eval_points
            .iter()
            .zip(&self.multipliers)
            .map(|(alpha, v)| v.mul(&poly_eval(message, alpha, ring)))
            .collect())
    }

    /// Recovers the message from any k known coordinates; the first k
    /// distinct positions are interpolated and every further supplied shard
    /// must agree with the result.
    pub fn erasure_decode(&self, known: &[(usize, GRElement)]) -> Result<Vec<GRElement>> {
        let ring = self.ring().clone();
        for &(pos, _) in known {
            if pos >= self.length() {
                return Err(Error::BadHelperIndex(pos));
            }
        }
        let mut chosen: Vec<(usize, GRElement)> = Vec::with_capacity(self.k);
        for (pos, sym) in known {
            if chosen.len() == self.k {
                break;
            }
            if !chosen.iter().any(|(p, _)| p == pos) {
                chosen.push((*pos, sym.clone()));
            }
        }
        if chosen.len() < self.k {
            return Err(Error::NotEnoughShards {
                needed: self.k,
                got: chosen.len(),
            });
        }
        let pairs: Vec<(GRElement, GRElement)> = chosen
            .iter()
            .map(|(pos, sym)| {
                let y = sym.mul(&self.multipliers[*pos].inverse()?);
                Ok((self.eval_points[*pos].clone(), y))
            })
            .collect::<Result<_>>()?;
        let mut message = interpolate(&pairs, &ring)?;
        message.resize(self.k, ring.zero());

        for (pos, sym) in known {
            let expect =
                self.multipliers[*pos].mul(&poly_eval(&message, &self.eval_points[*pos], &ring));
            if expect != *sym {
                return Err(Error::Inconsistent);
            }
        }
        Ok(message)
    }

    /// Rows v_j * alpha_j^s for s < k: a generating set of the code.
    pub fn generator_rows(&self) -> Vec<Vec<GRElement>> {
        (0..self.k)
            .map(|s| {
                self.eval_points
                    .iter()
                    .zip(&self.multipliers)
                    .map(|(alpha, v)| v.mul(&alpha.pow(s as u64)))
                    .collect()
            })
            .collect()
    }

    /// The dual code: same evaluation points, pseudo-dimension n-k, and
    /// multipliers v'_j = (v_j * prod_{i != j} (alpha_j - alpha_i))^(-1).
    /// The multiplier formula is certified at construction by checking every
    /// generator pair for orthogonality.
    pub fn dual(&self) -> Result<GrsCode> {
        let n = self.length();
        let mut dual_mults = Vec::with_capacity(n);
        for j in 0..n {
            let mut prod = self.multipliers[j].clone();
            for i in 0..n {
                if i != j {
                    prod = prod.mul(&self.eval_points[j].sub(&self.eval_points[i]));
                }
            }
            dual_mults.push(prod.inverse()?);
        }
        let dual = GrsCode::new(
            self.tower.clone(),
            self.eval_points.clone(),
            dual_mults,
            n - self.k,
        )?;
        let primal_rows = self.generator_rows();
        let dual_rows = dual.generator_rows();
        let ring = self.ring();
        for (s, row) in primal_rows.iter().enumerate() {
            for (t, drow) in dual_rows.iter().enumerate() {
                let mut acc = ring.zero();
                for (a, b) in row.iter().zip(drow) {
                    acc = acc.add(&a.mul(b));
                }
                if !acc.is_zero() {
                    return Err(Error::DualVerificationFailed(s, t));
                }
            }
        }
        Ok(dual)
    }

    /// Minimum Hamming weight over all nonzero messages, by enumeration.
    pub fn min_distance_bruteforce(&self) -> Result<usize> {
        let size = self.ring().size() as u128;
        let count = size
            .checked_pow(self.k as u32)
            .ok_or(Error::TooLarge(u128::MAX))?;
        if count > 1 << 20 {
            return Err(Error::TooLarge(count));
        }
        let mut best = self.length();
        for idx in 1..count {
            let mut v = idx;
            let message: Vec<GRElement> = (0..self.k)
                .map(|_| {
                    let d = (v % size) as u64;
                    v /= size;
                    self.ring().element_from_index(d)
                })
                .collect();
            let weight = self
                .encode(&message)?
                .iter()
                .filter(|c| !c.is_zero())
                .count();
            best = best.min(weight);
            if best == 1 {
                break;
            }
        }
        Ok(best)
    }

    pub fn descriptor(&self) -> CodeDescriptor {
        let ring = self.ring();
        CodeDescriptor {
            tower: TowerDescriptor {
                p: ring.p(),
                n: ring.n(),
                m: self.tower.subring_degree(),
                l: self.tower.extension_degree(),
                modulus: ring.modulus().to_vec(),
            },
            k: self.k,
            multipliers: self
                .multipliers
                .iter()
                .map(|v| v.coeffs().to_vec())
                .collect(),
            eval_point_indices: self
                .eval_points
                .iter()
                .map(|e| {
                    ring.teich_index_of(e)
                        .expect("evaluation points of stored codes lie in the Teichmuller set")
                })
                .collect(),
        }
    }
}

/// Sufficient residue-field size for the MDS property of an [n, k] code over
/// the ring: |residue field| > C(n-1, n-k-1).
pub fn mds_capacity_ok(tower: &TowerContext, n_len: usize, k: usize) -> bool {
    let residue = checked_pow(tower.p(), tower.subring_degree() * tower.extension_degree())
        .map(u128::from)
        .unwrap_or(u128::MAX);
    if k >= n_len {
        return true; // binomial with negative lower index is 0
    }
    residue > binomial_capped(n_len - 1, n_len - k - 1, residue)
}

/// C(n, k), capped just above `cap` so oversized values cannot overflow.
fn binomial_capped(n: usize, k: usize, cap: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if acc > cap {
            return cap + 1;
        }
    }
    acc
}
