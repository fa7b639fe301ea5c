//! The extension S = GR(p^n, ml) over R = GR(p^n, m), realized inside the
//! single absolute ring S. R is never constructed as a separate quotient:
//! it is the fixed ring of the m-step Frobenius, generated by
//! alpha = gamma^((p^(ml)-1)/(p^m-1)), and membership is a fixed-point test.
//!
//! The free basis of S over R is 1, gamma, ..., gamma^(l-1); its basis
//! property is certified at build time by a residue-rank computation rather
//! than assumed, and the trace-dual basis is solved for exactly.

use crate::error::{Error, Result};
use crate::ring::{GRElement, RingContext};
use crate::zpn::{checked_pow, ZpnMatrix, ZpnScalar};

#[derive(Debug, Clone)]
pub struct TowerContext {
    s: RingContext,
    m: u32,
    l: u32,
    alpha: GRElement,
    basis: Vec<GRElement>,
    dual_basis: Vec<GRElement>,
    r_basis: Vec<GRElement>,
    r_coord_matrix: ZpnMatrix,
    /// Unit-pivot rows of `r_coord_matrix` and the inverse of that square
    /// submatrix: coordinate extraction for known subring elements becomes a
    /// single m x m multiply instead of an elimination per call.
    coord_pivot_rows: Vec<usize>,
    coord_inverse: Vec<Vec<u64>>,
}

impl TowerContext {
    pub fn new(p: u64, n: u32, m: u32, l: u32) -> Result<Self> {
        let s = RingContext::new(p, n, m.checked_mul(l).ok_or_else(overflow)?)?;
        Self::from_ring(s, m, l)
    }

    pub fn with_modulus(p: u64, n: u32, m: u32, l: u32, modulus: &[u64]) -> Result<Self> {
        let s = RingContext::with_modulus(p, n, m.checked_mul(l).ok_or_else(overflow)?, modulus)?;
        Self::from_ring(s, m, l)
    }

    /// Builds the tower structure inside an already-constructed absolute ring
    /// of degree m*l.
    pub fn from_ring(s: RingContext, m: u32, l: u32) -> Result<Self> {
        if m == 0 || l == 0 {
            return Err(Error::ParamOverflow("m and l must be >= 1".into()));
        }
        if s.degree() != m * l {
            return Err(Error::ParamOverflow(format!(
                "ring degree {} != m*l = {}",
                s.degree(),
                m * l
            )));
        }
        let q = checked_pow(s.p(), m).ok_or_else(overflow)?;
        let exponent = (s.teich_len() - 1) / (q - 1).max(1);
        let alpha = s.gamma().pow(exponent);
        assert!(
            s.verify_order(&alpha, (q - 1).max(1)),
            "subring generator has wrong order"
        );
        assert_eq!(
            alpha.frobenius(m),
            alpha,
            "subring generator must be Frobenius-fixed"
        );

        let basis: Vec<GRElement> = (0..l).map(|j| s.gamma().pow(j as u64)).collect();
        let r_basis: Vec<GRElement> = (0..m).map(|i| alpha.pow(i as u64)).collect();

        let ml = (m * l) as usize;
        let mut product_rows = Vec::with_capacity(ml);
        for a in &r_basis {
            for b in &basis {
                product_rows.push(a.mul(b).coeffs().to_vec());
            }
        }
        let cert = ZpnMatrix::from_rows(s.prime_power(), &product_rows);
        let rank = cert.residue_rank();
        if rank != ml {
            return Err(Error::BasisCertificateFailed {
                got: rank,
                want: ml,
            });
        }

        let mut cols = vec![vec![0u64; m as usize]; ml];
        for (j, a) in r_basis.iter().enumerate() {
            for (row, &c) in a.coeffs().iter().enumerate() {
                cols[row][j] = c;
            }
        }
        let r_coord_matrix = ZpnMatrix::from_rows(s.prime_power(), &cols);
        let (coord_pivot_rows, coord_inverse) = coordinate_extractor(&r_coord_matrix)?;

        let mut tower = Self {
            s,
            m,
            l,
            alpha,
            basis,
            dual_basis: Vec::new(),
            r_basis,
            r_coord_matrix,
            coord_pivot_rows,
            coord_inverse,
        };
        tower.dual_basis = tower.compute_dual_basis(&tower.basis)?;
        Ok(tower)
    }

    pub fn ring(&self) -> &RingContext {
        &self.s
    }

    pub fn p(&self) -> u64 {
        self.s.p()
    }

    pub fn n(&self) -> u32 {
        self.s.n()
    }

    pub fn subring_degree(&self) -> u32 {
        self.m
    }

    pub fn extension_degree(&self) -> u32 {
        self.l
    }

    /// |R| = p^(nm).
    pub fn subring_size(&self) -> u64 {
        checked_pow(self.s.prime_power().value(), self.m).expect("within ring bounds")
    }

    /// Size of the residue field of the subring, p^m.
    pub fn subring_residue_size(&self) -> u64 {
        checked_pow(self.p(), self.m).expect("within ring bounds")
    }

    pub fn alpha(&self) -> &GRElement {
        &self.alpha
    }

    pub fn basis(&self) -> &[GRElement] {
        &self.basis
    }

    pub fn dual_basis(&self) -> &[GRElement] {
        &self.dual_basis
    }

    pub fn r_basis(&self) -> &[GRElement] {
        &self.r_basis
    }

    /// Trace of S over R: the sum of the l automorphisms fixing R.
    pub fn relative_trace(&self, x: &GRElement) -> GRElement {
        let mut acc = x.clone();
        for i in 1..self.l {
            acc = acc.add(&x.frobenius(self.m * i));
        }
        acc
    }

    /// R is exactly the fixed ring of the m-step Frobenius.
    pub fn in_subring(&self, x: &GRElement) -> bool {
        x.frobenius(self.m) == *x
    }

    /// Coordinates of an R-element over 1, alpha, ..., alpha^(m-1).
    pub fn r_coordinates(&self, x: &GRElement) -> Result<Vec<ZpnScalar>> {
        if !self.in_subring(x) {
            return Err(Error::NotInSubring);
        }
        self.r_coord_matrix.solve_unit_pivot(x.coeffs())
    }

    /// Coordinate extraction for elements known to lie in R (for example
    /// trace values); skips both the Frobenius membership test and the
    /// elimination of the checked path.
    pub(crate) fn r_coordinates_unchecked(&self, x: &GRElement) -> Vec<u64> {
        let pn = self.s.prime_power().value();
        let coeffs = x.coeffs();
        self.coord_inverse
            .iter()
            .map(|row| {
                let mut acc = 0u64;
                for (c, &r) in self.coord_pivot_rows.iter().zip(row) {
                    acc = (acc + coeffs[*c] * r % pn) % pn;
                }
                acc
            })
            .collect()
    }

    /// Rebuilds an R-element from its alpha-power coordinates.
    pub fn from_r_coordinates(&self, coords: &[u64]) -> GRElement {
        assert_eq!(coords.len(), self.m as usize);
        let mut acc = self.s.zero();
        for (c, b) in coords.iter().zip(&self.r_basis) {
            acc = acc.add(&b.mul_scalar(*c));
        }
        acc
    }

    /// The unique dual basis with Tr(basis[i] * dual[j]) = delta_ij, solved
    /// from the Gram system over S with unit pivots.
    pub fn compute_dual_basis(&self, basis: &[GRElement]) -> Result<Vec<GRElement>> {
        let l = basis.len();
        let mut gram = Vec::with_capacity(l);
        for bi in basis {
            let row: Vec<GRElement> = basis
                .iter()
                .map(|bk| self.relative_trace(&bi.mul(bk)))
                .collect();
            gram.push(row);
        }
        let mut identity = Vec::with_capacity(l);
        for i in 0..l {
            let mut row = vec![self.s.zero(); l];
            row[i] = self.s.one();
            identity.push(row);
        }
        let x = solve_ring(gram, identity).map_err(|_| Error::GramNotInvertible)?;
        let dual: Vec<GRElement> = (0..l)
            .map(|j| {
                let mut acc = self.s.zero();
                for (k, b) in basis.iter().enumerate() {
                    acc = acc.add(&x[k][j].mul(b));
                }
                acc
            })
            .collect();
        for (i, bi) in basis.iter().enumerate() {
            for (j, dj) in dual.iter().enumerate() {
                let t = self.relative_trace(&bi.mul(dj));
                let want = if i == j { self.s.one() } else { self.s.zero() };
                assert_eq!(t, want, "Gram identity failed after solve");
            }
        }
        Ok(dual)
    }

    /// Expansion coefficients over the cached basis: c_i = Tr(dual[i] * a),
    /// with a = sum c_i basis[i].
    pub fn expand_dual(&self, a: &GRElement) -> Vec<GRElement> {
        self.dual_basis
            .iter()
            .map(|d| self.relative_trace(&d.mul(a)))
            .collect()
    }

    /// Rank over the residue field F_(p^m) of the reductions of the given
    /// elements, written in coordinates over the reduced basis.
    pub fn r_rank(&self, elements: &[GRElement]) -> usize {
        let rows: Vec<Vec<GRElement>> = elements.iter().map(|e| self.expand_dual(e)).collect();
        residue_rank_ring(rows)
    }

    /// Certifies that l given elements form a free R-basis of S: the
    /// Z_{p^n}-coordinate matrix of their products with the alpha-power
    /// basis of R must have full residue rank ml.
    pub fn free_basis_certificate(&self, elements: &[GRElement]) -> Result<()> {
        let ml = (self.m * self.l) as usize;
        if elements.len() != self.l as usize {
            return Err(Error::LengthMismatch {
                expected: self.l as usize,
                got: elements.len(),
            });
        }
        let mut rows = Vec::with_capacity(ml);
        for a in &self.r_basis {
            for e in elements {
                rows.push(a.mul(e).coeffs().to_vec());
            }
        }
        let rank = ZpnMatrix::from_rows(self.s.prime_power(), &rows).residue_rank();
        if rank != ml {
            return Err(Error::BasisCertificateFailed {
                got: rank,
                want: ml,
            });
        }
        Ok(())
    }

    /// Trace of the subring R down to Z_{p^n}, for elements of R.
    pub fn subring_trace(&self, x: &GRElement) -> Result<ZpnScalar> {
        if !self.in_subring(x) {
            return Err(Error::NotInSubring);
        }
        let mut acc = x.clone();
        for i in 1..self.m {
            acc = acc.add(&x.frobenius(i));
        }
        assert!(
            acc.coeffs()[1..].iter().all(|&c| c == 0),
            "subring trace landed outside Z_(p^n)"
        );
        Ok(self.s.prime_power().scalar(acc.coeffs()[0]))
    }
}

fn overflow() -> Error {
    Error::ParamOverflow("tower parameters overflow".into())
}

/// Picks m rows of the (ml x m) coordinate matrix whose square submatrix is
/// invertible, and inverts it. Full residue column rank guarantees such rows
/// exist.
fn coordinate_extractor(matrix: &ZpnMatrix) -> Result<(Vec<usize>, Vec<Vec<u64>>)> {
    let m = matrix.cols();
    let mut pivot_rows: Vec<usize> = Vec::with_capacity(m);
    let mut selected: Vec<Vec<u64>> = Vec::with_capacity(m);
    for r in 0..matrix.rows() {
        if pivot_rows.len() == m {
            break;
        }
        let row: Vec<u64> = (0..m).map(|c| matrix.get(r, c).value()).collect();
        selected.push(row);
        let rank = ZpnMatrix::from_rows(matrix.modulus(), &selected).residue_rank();
        if rank == selected.len() {
            pivot_rows.push(r);
        } else {
            selected.pop();
        }
    }
    if pivot_rows.len() != m {
        return Err(Error::BasisCertificateFailed {
            got: pivot_rows.len(),
            want: m,
        });
    }
    let square = ZpnMatrix::from_rows(matrix.modulus(), &selected);
    let mut inverse = vec![vec![0u64; m]; m];
    for i in 0..m {
        let mut unit = vec![0u64; m];
        unit[i] = 1;
        let column = square.solve_unit_pivot(&unit)?;
        for (j, v) in column.iter().enumerate() {
            inverse[j][i] = v.value();
        }
    }
    Ok((pivot_rows, inverse))
}

/// True when every difference of distinct listed elements is a unit.
pub fn is_subtractive(points: &[GRElement]) -> bool {
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            if !a.sub(b).is_unit() {
                return false;
            }
        }
    }
    true
}

/// Gauss-Jordan over ring elements, pivoting only on units; solves A X = B.
pub(crate) fn solve_ring(
    mut a: Vec<Vec<GRElement>>,
    mut b: Vec<Vec<GRElement>>,
) -> Result<Vec<Vec<GRElement>>> {
    let dim = a.len();
    for col in 0..dim {
        let pivot = (col..dim)
            .find(|&r| a[r][col].is_unit())
            .ok_or(Error::NoUnitPivot(col))?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].inverse().expect("pivot is a unit");
        for v in a[col].iter_mut() {
            *v = v.mul(&inv);
        }
        for v in b[col].iter_mut() {
            *v = v.mul(&inv);
        }
        let pivot_a = a[col].clone();
        let pivot_b = b[col].clone();
        for r in 0..dim {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for (v, pv) in a[r].iter_mut().zip(&pivot_a) {
                *v = v.sub(&factor.mul(pv));
            }
            for (v, pv) in b[r].iter_mut().zip(&pivot_b) {
                *v = v.sub(&factor.mul(pv));
            }
        }
    }
    Ok(b)
}

/// Number of unit pivots found by elimination: the rank of the reduction of
/// the row matrix over the residue field.
pub(crate) fn residue_rank_ring(mut rows: Vec<Vec<GRElement>>) -> usize {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..nrows).find(|&r| rows[r][col].is_unit()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].inverse().expect("pivot is a unit");
        for v in rows[rank].iter_mut() {
            *v = v.mul(&inv);
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v = v.sub(&factor.mul(pv));
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}
