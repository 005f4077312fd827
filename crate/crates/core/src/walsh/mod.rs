//! Character-sum (Walsh) analysis of digital blocks.
//!
//! For a block of `b^m` points the counting error of a truncated box is a
//! finite character sum. The machinery lives in four parts:
//!
//! * this module — the relabeled digit vectors `u~` with their extra time
//!   coordinate, frequency vectors `k` from the group `G_m`, and the block
//!   character sum `sigma(k)`;
//! * [`coeff`] — the closed-form Walsh coefficients of box indicators, the
//!   `B`/`A` boundary functionals, the digit-tuple search, and the witness
//!   construction built from them;
//! * [`dual`] — the dual space `D_m` (where `sigma` is nonzero) by exact
//!   nullspace computation, and the constrained dual-vector solver;
//! * [`decomp`] — the full decomposition identity for the counting error
//!   and the averaged (variance) identity over block offsets.
//!
//! Frequency vectors carry `s` spatial blocks of length `tau` — the digit
//! resolution, normally the admissibility depth of the block — and one time
//! block of length `m`. All field data is exact; only the final complex
//! sums live in floating point, with tolerances fixed a priori by term
//! counts.

pub mod coeff;
pub mod decomp;
pub mod dual;

pub use coeff::{
    a_func, b_func, construct_witness_gamma, lemma6_search, walsh_coeff_space,
    walsh_coeff_time, walsh_product, WitnessGamma,
};
pub use decomp::{
    delta_direct_truncated, delta_via_walsh, find_g_w, variance_sigma1, VarianceReport,
    WalshDelta,
};
pub use dual::{dual_set, lemma7_solve, DualBasis};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{BijectionFamily, Felt, FieldSpec};
use crate::generate::GeneratingMatrix;
use crate::points::digits_of;

// ======================================================================
// Frequency and digit vectors
// ======================================================================

/// Frequency vector: s spatial blocks of length tau over F_b plus one time
/// block of length m. The set of all such vectors is the group `G_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexVector {
    pub spatial: Vec<Vec<Felt>>,
    pub time: Vec<Felt>,
}

impl IndexVector {
    pub fn zero(s: usize, tau: usize, m: usize) -> IndexVector {
        IndexVector { spatial: vec![vec![Felt::ZERO; tau]; s], time: vec![Felt::ZERO; m] }
    }

    pub fn s(&self) -> usize {
        self.spatial.len()
    }

    pub fn tau(&self) -> usize {
        self.spatial.first().map_or(0, Vec::len)
    }

    pub fn m(&self) -> usize {
        self.time.len()
    }

    pub fn is_zero(&self) -> bool {
        self.spatial.iter().all(|b| b.iter().all(Felt::is_zero))
            && self.time.iter().all(Felt::is_zero)
    }

    /// Flat layout: spatial blocks in coordinate order, then the time block —
    /// the column order of the dual linear system.
    pub fn from_flat(flat: &[Felt], s: usize, tau: usize, m: usize) -> IndexVector {
        debug_assert_eq!(flat.len(), s * tau + m);
        IndexVector {
            spatial: (0..s).map(|i| flat[i * tau..(i + 1) * tau].to_vec()).collect(),
            time: flat[s * tau..].to_vec(),
        }
    }

    pub fn to_flat(&self) -> Vec<Felt> {
        let mut flat = Vec::with_capacity(self.s() * self.tau() + self.m());
        for b in &self.spatial {
            flat.extend_from_slice(b);
        }
        flat.extend_from_slice(&self.time);
        flat
    }

    /// The `ordinal`-th vector of `G_m` in the fixed enumeration order
    /// (mixed-radix digits of the ordinal across the flat layout).
    pub fn from_ordinal(
        ordinal: u128,
        field: &FieldSpec,
        s: usize,
        tau: usize,
        m: usize,
    ) -> IndexVector {
        let b = field.order() as u128;
        let len = s * tau + m;
        let mut flat = Vec::with_capacity(len);
        let mut rest = ordinal;
        for _ in 0..len {
            flat.push(Felt((rest % b) as u8));
            rest /= b;
        }
        debug_assert_eq!(rest, 0);
        IndexVector::from_flat(&flat, s, tau, m)
    }

    /// Scalar multiple mu * k.
    pub fn scale(&self, mu: Felt, field: &FieldSpec) -> IndexVector {
        IndexVector {
            spatial: self
                .spatial
                .iter()
                .map(|b| b.iter().map(|&v| field.mul(mu, v)).collect())
                .collect(),
            time: self.time.iter().map(|&v| field.mul(mu, v)).collect(),
        }
    }

    /// Pairing k . u~ in F_b.
    pub fn dot(&self, u: &ExtendedDigitVector, field: &FieldSpec) -> Felt {
        debug_assert_eq!(self.s(), u.s());
        debug_assert_eq!(self.m(), u.m());
        let mut acc = Felt::ZERO;
        for (kb, ub) in self.spatial.iter().zip(&u.spatial) {
            debug_assert_eq!(kb.len(), ub.len());
            for (&k, &x) in kb.iter().zip(ub) {
                if !k.is_zero() && !x.is_zero() {
                    acc = field.add(acc, field.mul(k, x));
                }
            }
        }
        for (&k, &x) in self.time.iter().zip(&u.time) {
            if !k.is_zero() && !x.is_zero() {
                acc = field.add(acc, field.mul(k, x));
            }
        }
        acc
    }
}

/// Number of vectors in G_m.
pub fn g_size(base: u64, s: usize, tau: usize, m: usize) -> u128 {
    (base as u128).pow((s * tau + m) as u32)
}

/// Index of the last nonzero entry (1-based); 0 for the zero block.
pub fn v_of(block: &[Felt]) -> usize {
    block.iter().rposition(|e| !e.is_zero()).map_or(0, |p| p + 1)
}

/// Digit vector of an index in the extended geometry: s spatial blocks of
/// length tau from the generating-matrix action, and the time block of
/// length m read off the reversed low digits of n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedDigitVector {
    pub spatial: Vec<Vec<Felt>>,
    pub time: Vec<Felt>,
}

impl ExtendedDigitVector {
    pub fn s(&self) -> usize {
        self.spatial.len()
    }

    pub fn m(&self) -> usize {
        self.time.len()
    }

    /// Blockwise sum (the group law the linearity identity refers to).
    pub fn add(&self, other: &ExtendedDigitVector, field: &FieldSpec) -> ExtendedDigitVector {
        ExtendedDigitVector {
            spatial: self
                .spatial
                .iter()
                .zip(&other.spatial)
                .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| field.add(x, y)).collect())
                .collect(),
            time: self
                .time
                .iter()
                .zip(&other.time)
                .map(|(&x, &y)| field.add(x, y))
                .collect(),
        }
    }
}

/// The extended digit vector of index n: spatial block i holds
/// `sum_r psi_r(a_r(n)) c^{(i)}_{j,r}` for digit rows `j = 1..=tau`; the
/// time block holds `psi_{m-j}(a_{m-j}(n))` for `j = 1..=m`, so it depends
/// only on `n mod b^m` and vanishes on multiples of `b^m`.
pub fn extended_u(
    n: u64,
    matrices: &[GeneratingMatrix],
    field: &FieldSpec,
    bij: &BijectionFamily,
    m: usize,
    tau: usize,
) -> Result<ExtendedDigitVector> {
    let n_digits = digits_of(n, field.order());
    let lifted: Vec<Felt> = n_digits
        .iter()
        .enumerate()
        .map(|(r, &d)| bij.psi(field, r, d))
        .collect::<Result<_>>()?;
    let mut spatial = Vec::with_capacity(matrices.len());
    for (i, c) in matrices.iter().enumerate() {
        if c.rows() < tau || c.cols() < lifted.len() {
            return Err(Error::dimension(format!(
                "matrix {} is {}x{}, need rows >= {tau} and cols >= {} for n = {n}",
                i + 1,
                c.rows(),
                c.cols(),
                lifted.len()
            )));
        }
        let mut block = Vec::with_capacity(tau);
        for j in 1..=tau {
            let mut y = Felt::ZERO;
            for (r, &a) in lifted.iter().enumerate() {
                if !a.is_zero() {
                    y = field.add(y, field.mul(a, c.entry(j, r)));
                }
            }
            block.push(y);
        }
        spatial.push(block);
    }
    let mut time = Vec::with_capacity(m);
    for j in 1..=m {
        let r = m - j;
        let digit = n_digits.get(r).copied().unwrap_or(0);
        time.push(bij.psi(field, r, digit)?);
    }
    Ok(ExtendedDigitVector { spatial, time })
}

/// The digit relabeling `n~ = sum_r omega(psi_r(a_r(n))) b^r`, a bijection
/// of `[0, b^m)` onto itself for any digit maps psi (it composes bijections
/// positionwise).
pub fn n_tilde(n: u64, field: &FieldSpec, bij: &BijectionFamily) -> Result<u64> {
    let b = field.order();
    let mut out = 0u64;
    let mut place = 1u64;
    for (r, &d) in digits_of(n, b).iter().enumerate() {
        out += field.omega(bij.psi(field, r, d)?) * place;
        place *= b;
    }
    Ok(out)
}

/// Block character sum `sigma(k) = sum_{n < b^m} E(k . u~_n)`. The
/// dual-space dichotomy says this is either 0 or exactly `b^m`.
pub fn char_sum_sigma(
    k: &IndexVector,
    matrices: &[GeneratingMatrix],
    field: &FieldSpec,
    bij: &BijectionFamily,
    m: usize,
) -> Result<Complex64> {
    let count = field
        .order()
        .checked_pow(m as u32)
        .ok_or_else(|| Error::domain("b^m overflows"))?;
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..count {
        let u = extended_u(n, matrices, field, bij, m, k.tau())?;
        acc += field.char_e(k.dot(&u, field));
    }
    Ok(acc)
}

// ======================================================================
// Tests
// ======================================================================
