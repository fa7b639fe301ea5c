//! Single-node repair for codes over Galois rings.
//!
//! Three routes are provided:
//!  * the trace scheme for full-length Reed-Solomon codes, downloading one
//!    subring symbol from each of the n-1 surviving nodes;
//!  * a generic scheme driven by any family of dual codewords whose
//!    lost-coordinate entries form a free basis;
//!  * the naive baseline that decodes from k full symbols and re-encodes.
//!
//! The trace scheme evaluates the repair family only through closed forms:
//! kappa_h = (alpha_h - alpha_i)^(-1) and the table Tr(beta_j (alpha_h -
//! alpha_i)). At the lost coordinate the evaluation is
//!
//! ```text
//! sum_a q^a * beta_j^(q^a) * alpha_i^(q^a - 1),      q = p^m,
//! ```
//!
//! which collapses to beta_j whenever q^a vanishes in Z_{p^n} for a >= 1
//! (fields, towers with m >= n) or alpha_i = 0, but carries a correction in
//! <p^m> otherwise. Reconstruction therefore combines the helper sums with
//! the trace-dual of these lost-coordinate values; dual membership of every
//! repair vector is verified at construction, so a configuration the scheme
//! cannot serve fails loudly instead of repairing incorrectly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grs::{interpolate, poly_degree, GrsCode};
use crate::ring::GRElement;

/// Wire form of one helper's contribution for one stored record: the
/// subring coordinates of the transmitted value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HelperMessage {
    pub record_index: u64,
    pub helper_index: u32,
    pub coords: Vec<u64>,
}

/// Exact bandwidth accounting in subring symbols. One R-symbol carries
/// m coordinates mod p^n, i.e. m * n * log2(p) bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandwidthReport {
    pub scheme: String,
    /// (node index, R-symbols downloaded from it)
    pub per_helper: Vec<(usize, u64)>,
    pub total_r_symbols: u64,
    pub r_symbol_bits: f64,
    pub total_bits: f64,
    /// The k*l baseline a decode-and-reencode repair would download.
    pub naive_r_symbols: u64,
    /// True when this scheme downloads strictly fewer R-symbols than naive.
    pub beats_naive: bool,
}

impl BandwidthReport {
    pub(crate) fn assemble(scheme: &str, code: &GrsCode, per_helper: Vec<(usize, u64)>) -> Self {
        let tower = code.tower();
        let total: u64 = per_helper.iter().map(|&(_, c)| c).sum();
        let r_symbol_bits =
            tower.subring_degree() as f64 * tower.n() as f64 * (tower.p() as f64).log2();
        let naive = code.pseudo_dimension() as u64 * tower.extension_degree() as u64;
        BandwidthReport {
            scheme: scheme.to_string(),
            per_helper,
            total_r_symbols: total,
            r_symbol_bits,
            total_bits: total as f64 * r_symbol_bits,
            naive_r_symbols: naive,
            beats_naive: total < naive,
        }
    }

    /// The same report aggregated over `records` independent repairs.
    pub fn scaled(&self, records: u64) -> Self {
        let per_helper: Vec<(usize, u64)> = self
            .per_helper
            .iter()
            .map(|&(n, c)| (n, c * records))
            .collect();
        let total = self.total_r_symbols * records;
        BandwidthReport {
            scheme: self.scheme.clone(),
            per_helper,
            total_r_symbols: total,
            r_symbol_bits: self.r_symbol_bits,
            total_bits: total as f64 * self.r_symbol_bits,
            naive_r_symbols: self.naive_r_symbols * records,
            beats_naive: self.beats_naive,
        }
    }
}

/// Precomputed trace repair of one coordinate of a full-length RS code.
#[derive(Debug, Clone)]
pub struct TraceRepairScheme {
    code: GrsCode,
    lost: usize,
    helpers: Vec<usize>,
    kappa: Vec<GRElement>,
    /// trace_table[j][h] = Tr(beta_j * (alpha_{helpers[h]} - alpha_lost)).
    trace_table: Vec<Vec<GRElement>>,
    /// Evaluations of the repair family at the lost point.
    repair_basis: Vec<GRElement>,
    /// Trace-dual of `repair_basis`; reconstruction coefficients.
    repair_dual: Vec<GRElement>,
}

impl TraceRepairScheme {
    pub fn new(code: GrsCode, lost: usize) -> Result<Self> {
        let n = code.length();
        if lost >= n {
            return Err(Error::BadHelperIndex(lost));
        }
        if !code.is_full_length() {
            return Err(Error::NotFullLength);
        }
        let tower = code.tower().clone();
        let q = tower.subring_residue_size();
        let l = tower.extension_degree();
        let bound = (code.ring().teich_len() - code.ring().teich_len() / q) as usize;
        if code.pseudo_dimension() > bound {
            return Err(Error::KTooLarge {
                k: code.pseudo_dimension(),
                max: bound,
            });
        }

        let alpha_i = code.eval_points()[lost].clone();
        let helpers: Vec<usize> = (0..n).filter(|&t| t != lost).collect();
        let kappa: Vec<GRElement> = helpers
            .iter()
            .map(|&h| code.eval_points()[h].sub(&alpha_i).inverse())
            .collect::<Result<_>>()?;

        let trace_table: Vec<Vec<GRElement>> = tower
            .basis()
            .iter()
            .map(|beta| {
                helpers
                    .iter()
                    .map(|&h| tower.relative_trace(&beta.mul(&code.eval_points()[h].sub(&alpha_i))))
                    .collect()
            })
            .collect();

        // Lost-coordinate evaluations of the repair polynomials.
        let pn = code.ring().prime_power().value();
        let repair_basis: Vec<GRElement> = tower
            .basis()
            .iter()
            .map(|beta| {
                let mut acc = code.ring().zero();
                let mut qa = 1u64; // q^a
                for _ in 0..l {
                    let term = beta.pow(qa).mul(&alpha_i.pow(qa - 1)).mul_scalar(qa % pn);
                    acc = acc.add(&term);
                    qa *= q;
                }
                acc
            })
            .collect();

        // Every repair vector must be a dual codeword; verified, not assumed.
        let generators = code.generator_rows();
        for (j, basis_value) in repair_basis.iter().enumerate() {
            for row in &generators {
                let mut acc = basis_value.mul(&row[lost]);
                for (h, &t) in helpers.iter().enumerate() {
                    let w = kappa[h].mul(&trace_table[j][h]);
                    acc = acc.add(&w.mul(&row[t]));
                }
                if !acc.is_zero() {
                    return Err(Error::DualMembershipFailed(j));
                }
            }
        }

        tower.free_basis_certificate(&repair_basis)?;
        let repair_dual = tower.compute_dual_basis(&repair_basis)?;

        Ok(Self {
            code,
            lost,
            helpers,
            kappa,
            trace_table,
            repair_basis,
            repair_dual,
        })
    }

    pub fn code(&self) -> &GrsCode {
        &self.code
    }

    pub fn lost(&self) -> usize {
        self.lost
    }

    pub fn helpers(&self) -> &[usize] {
        &self.helpers
    }

    pub fn trace_table(&self) -> &[Vec<GRElement>] {
        &self.trace_table
    }

    pub fn repair_basis(&self) -> &[GRElement] {
        &self.repair_basis
    }

    /// What helper `node` sends for its stored symbol: one R-symbol,
    /// Tr(symbol / (alpha_node - alpha_lost)).
    pub fn helper_message(&self, node: usize, symbol: &GRElement) -> Result<GRElement> {
        let h = self
            .helpers
            .iter()
            .position(|&t| t == node)
            .ok_or(Error::BadHelperIndex(node))?;
        Ok(self
            .code
            .tower()
            .relative_trace(&symbol.mul(&self.kappa[h])))
    }

    /// The helper message in wire form: m subring coordinates mod p^n.
    pub fn wire_message(
        &self,
        record_index: u64,
        node: usize,
        symbol: &GRElement,
    ) -> Result<HelperMessage> {
        let value = self.helper_message(node, symbol)?;
        // Trace values lie in R by construction; the unchecked extraction
        // avoids an elimination per message.
        let coords = self.code.tower().r_coordinates_unchecked(&value);
        Ok(HelperMessage {
            record_index,
            helper_index: node as u32,
            coords,
        })
    }

    pub fn message_from_wire(&self, wire: &HelperMessage) -> Result<GRElement> {
        let m = self.code.tower().subring_degree() as usize;
        if wire.coords.len() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                got: wire.coords.len(),
            });
        }
        Ok(self.code.tower().from_r_coordinates(&wire.coords))
    }

    /// Rebuilds the erased symbol from the n-1 helper messages, given in
    /// helper order (ascending node index, lost node skipped).
    pub fn reconstruct(&self, messages: &[GRElement]) -> Result<GRElement> {
        if messages.len() != self.helpers.len() {
            return Err(Error::LengthMismatch {
                expected: self.helpers.len(),
                got: messages.len(),
            });
        }
        let ring = self.code.ring();
        let mut result = ring.zero();
        for (j, dual) in self.repair_dual.iter().enumerate() {
            let mut acc = ring.zero();
            for (h, msg) in messages.iter().enumerate() {
                acc = acc.add(&msg.mul(&self.trace_table[j][h]));
            }
            result = result.add(&acc.neg().mul(dual));
        }
        Ok(result)
    }

    pub fn bandwidth_report(&self) -> BandwidthReport {
        let per_helper = self.helpers.iter().map(|&h| (h, 1)).collect();
        BandwidthReport::assemble("trace", &self.code, per_helper)
    }

    /// Materializes the j-th repair polynomial by interpolation through all
    /// n evaluations and returns its degree; used to assert the degree
    /// bookkeeping q^(l-1) - 1 <= n - k - 1.
    pub fn repair_polynomial_degree(&self, j: usize) -> Result<usize> {
        let ring = self.code.ring().clone();
        let mut pairs = Vec::with_capacity(self.code.length());
        pairs.push((
            self.code.eval_points()[self.lost].clone(),
            self.repair_basis[j].clone(),
        ));
        for (h, &t) in self.helpers.iter().enumerate() {
            let value = self.kappa[h].mul(&self.trace_table[j][h]);
            pairs.push((self.code.eval_points()[t].clone(), value));
        }
        let coeffs = interpolate(&pairs, &ring)?;
        Ok(poly_degree(&coeffs).unwrap_or(0))
    }
}

/// Repair of one coordinate of any free MDS code from an explicit family of
/// dual codewords whose lost-coordinate entries form a free basis.
#[derive(Debug, Clone)]
pub struct GenericRepairScheme {
    code: GrsCode,
    lost: usize,
    helpers: Vec<usize>,
    dual_words: Vec<Vec<GRElement>>,
    lost_dual: Vec<GRElement>,
    per_helper_rank: Vec<u64>,
}

impl GenericRepairScheme {
    pub fn new(code: GrsCode, lost: usize, dual_words: Vec<Vec<GRElement>>) -> Result<Self> {
        let n = code.length();
        if lost >= n {
            return Err(Error::BadHelperIndex(lost));
        }
        let tower = code.tower().clone();
        let l = tower.extension_degree() as usize;
        if dual_words.len() != l {
            return Err(Error::LengthMismatch {
                expected: l,
                got: dual_words.len(),
            });
        }
        let generators = code.generator_rows();
        for (j, word) in dual_words.iter().enumerate() {
            if word.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: word.len(),
                });
            }
            for row in &generators {
                let mut acc = code.ring().zero();
                for (a, b) in word.iter().zip(row) {
                    acc = acc.add(&a.mul(b));
                }
                if !acc.is_zero() {
                    return Err(Error::NotADualCodeword(j));
                }
            }
        }
        let lost_entries: Vec<GRElement> = dual_words.iter().map(|w| w[lost].clone()).collect();
        tower
            .free_basis_certificate(&lost_entries)
            .map_err(|_| Error::NotABasisAtLostCoordinate)?;
        let lost_dual = tower.compute_dual_basis(&lost_entries)?;

        let helpers: Vec<usize> = (0..n).filter(|&t| t != lost).collect();
        let per_helper_rank: Vec<u64> = helpers
            .iter()
            .map(|&t| {
                let column: Vec<GRElement> = dual_words.iter().map(|w| w[t].clone()).collect();
                tower.r_rank(&column) as u64
            })
            .collect();

        Ok(Self {
            code,
            lost,
            helpers,
            dual_words,
            lost_dual,
            per_helper_rank,
        })
    }

    /// The existence-proof construction: scale one dual codeword with a unit
    /// lost coordinate so its lost entries run through the tower basis.
    pub fn from_dual_codeword(code: GrsCode, lost: usize) -> Result<Self> {
        let n = code.length();
        if lost >= n {
            return Err(Error::BadHelperIndex(lost));
        }
        if code.pseudo_dimension() == n {
            return Err(Error::SchemeUnavailable(
                "dual of a full-rate code is the zero code".into(),
            ));
        }
        let dual = code.dual()?;
        // Message polynomial 1 evaluates to the dual multipliers, all units.
        let mut msg = vec![code.ring().zero(); dual.pseudo_dimension()];
        msg[0] = code.ring().one();
        let word = dual.encode(&msg)?;
        let scale = word[lost].inverse()?;
        let tower = code.tower().clone();
        let words: Vec<Vec<GRElement>> = tower
            .basis()
            .iter()
            .map(|beta| {
                let factor = beta.mul(&scale);
                word.iter().map(|w| w.mul(&factor)).collect()
            })
            .collect();
        Self::new(code, lost, words)
    }

    pub fn lost(&self) -> usize {
        self.lost
    }

    pub fn helpers(&self) -> &[usize] {
        &self.helpers
    }

    pub fn dual_words(&self) -> &[Vec<GRElement>] {
        &self.dual_words
    }

    /// One trace per dual word: l R-symbols computed, of which only the
    /// reported rank is information.
    pub fn helper_message(&self, node: usize, symbol: &GRElement) -> Result<Vec<GRElement>> {
        let tower = self.code.tower();
        if !self.helpers.contains(&node) {
            return Err(Error::BadHelperIndex(node));
        }
        Ok(self
            .dual_words
            .iter()
            .map(|w| tower.relative_trace(&w[node].mul(symbol)))
            .collect())
    }

    pub fn reconstruct(&self, messages: &[Vec<GRElement>]) -> Result<GRElement> {
        if messages.len() != self.helpers.len() {
            return Err(Error::LengthMismatch {
                expected: self.helpers.len(),
                got: messages.len(),
            });
        }
        let ring = self.code.ring();
        let l = self.dual_words.len();
        let mut result = ring.zero();
        for (j, dual) in self.lost_dual.iter().enumerate() {
            let mut acc = ring.zero();
            for msg in messages {
                if msg.len() != l {
                    return Err(Error::LengthMismatch {
                        expected: l,
                        got: msg.len(),
                    });
                }
                acc = acc.add(&msg[j]);
            }
            result = result.add(&acc.neg().mul(dual));
        }
        Ok(result)
    }

    pub fn bandwidth_report(&self) -> BandwidthReport {
        let per_helper = self
            .helpers
            .iter()
            .zip(&self.per_helper_rank)
            .map(|(&h, &r)| (h, r))
            .collect();
        BandwidthReport::assemble("generic", &self.code, per_helper)
    }
}

/// Decode-and-reencode baseline: k full symbols from surviving nodes.
pub fn naive_repair(
    code: &GrsCode,
    lost: usize,
    shards: &[(usize, GRElement)],
) -> Result<(GRElement, BandwidthReport)> {
    if lost >= code.length() {
        return Err(Error::BadHelperIndex(lost));
    }
    let k = code.pseudo_dimension();
    let mut usable: Vec<(usize, GRElement)> = Vec::with_capacity(k);
    for (pos, sym) in shards {
        if *pos != lost && !usable.iter().any(|(p, _)| p == pos) {
            usable.push((*pos, sym.clone()));
        }
        if usable.len() == k {
            break;
        }
    }
    if usable.len() < k {
        return Err(Error::NotEnoughShards {
            needed: k,
            got: usable.len(),
        });
    }
    let message = code.erasure_decode(&usable)?;
    let word = code.encode(&message)?;
    let l = code.tower().extension_degree() as u64;
    let per_helper: Vec<(usize, u64)> = usable.iter().map(|&(p, _)| (p, l)).collect();
    let report = BandwidthReport::assemble("naive", code, per_helper);
    Ok((word[lost].clone(), report))
}
