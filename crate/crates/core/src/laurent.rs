//! Polynomials over `F_b` and truncated formal Laurent series in `F_b((z^-1))`.
//!
//! A series is written `L = sum_{k >= w} u_k z^{-k}` with `u_w != 0`; `w` may
//! be negative (polynomial part) and grows toward the fractional tail as `k`
//! increases. The fractional part keeps the terms with `k >= max(1, w)`, and
//! the valuation follows the sign convention `nu(L) = -w` (so fractional
//! series have negative valuation), with `nu(0)` treated as negative
//! infinity.
//!
//! Truncation is the one place an implementation can silently diverge from
//! the algebra, so every series carries its exactly-known coefficient window:
//! either the whole index line (series built from finitely many terms) or
//! `k < known_below`. Asking for a coefficient outside the window is a
//! [`Error::Precision`], never a tacit zero.

use crate::error::{Error, Result};
use crate::field::{BijectionFamily, Felt, FieldSpec};

// ======================================================================
// Polynomials
// ======================================================================

/// Polynomial in `z` over `F_b`, coefficients low degree first, normalized
/// so the leading coefficient is nonzero (zero polynomial = empty vector).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Felt>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn from_coeffs(coeffs: Vec<Felt>) -> Poly {
        let mut p = Poly { coeffs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `z^r` (zero beyond the stored range).
    pub fn coeff(&self, r: usize) -> Felt {
        self.coeffs.get(r).copied().unwrap_or(Felt::ZERO)
    }

    pub fn coeffs(&self) -> &[Felt] {
        &self.coeffs
    }

    pub fn add(&self, other: &Poly, field: &FieldSpec) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|r| field.add(self.coeff(r), other.coeff(r)))
            .collect();
        Poly::from_coeffs(coeffs)
    }

    pub fn mul(&self, other: &Poly, field: &FieldSpec) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Felt::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &c) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = field.add(coeffs[i + j], field.mul(a, c));
            }
        }
        Poly::from_coeffs(coeffs)
    }

    /// The monomial `z^r`.
    pub fn monomial(field: &FieldSpec, r: usize) -> Poly {
        let mut coeffs = vec![Felt::ZERO; r + 1];
        coeffs[r] = field.one();
        Poly { coeffs }
    }
}

/// Lifts an index to its digit polynomial: coefficient of `z^r` is
/// `psi_r(a_r(n))` for the base-b digits `a_r(n)` of `n`.
pub fn poly_from_index(
    field: &FieldSpec,
    bij: &BijectionFamily,
    n: u64,
) -> Result<Poly> {
    let b = field.order();
    let mut coeffs = Vec::new();
    let mut rest = n;
    let mut r = 0usize;
    while rest > 0 {
        coeffs.push(bij.psi(field, r, rest % b)?);
        rest /= b;
        r += 1;
    }
    Ok(Poly::from_coeffs(coeffs))
}

// ======================================================================
// Laurent series
// ======================================================================

/// Valuation under the literal sign convention: `-w` for a series with
/// leading index `w`, negative infinity for (known-)zero series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    NegInfinity,
    Finite(i64),
}

/// Truncated formal Laurent series `sum_{k >= w} u_k z^{-k}`.
///
/// `coeffs[0]` is `u_w` and is nonzero whenever any stored coefficient is;
/// indices below `w` are zero by normalization. `known_below = None` means
/// the series is exactly the stored finite sum; `Some(e)` means coefficients
/// are exact for every index `k < e` and unknown from `e` on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    w: i64,
    coeffs: Vec<Felt>,
    known_below: Option<i64>,
}

impl LaurentSeries {
    /// The exact zero series.
    pub fn zero() -> LaurentSeries {
        LaurentSeries { w: 0, coeffs: Vec::new(), known_below: None }
    }

    /// An exact series from finitely many terms: `coeffs[t]` is the
    /// coefficient of `z^{-(w + t)}`. Everything outside is exactly zero.
    pub fn from_terms(w: i64, coeffs: Vec<Felt>) -> LaurentSeries {
        let mut l = LaurentSeries { w, coeffs, known_below: None };
        l.normalize();
        l
    }

    /// A truncated series: coefficients valid for indices `k < w + coeffs.len()`
    /// and unknown beyond.
    pub fn from_window(w: i64, coeffs: Vec<Felt>) -> LaurentSeries {
        let end = w + coeffs.len() as i64;
        let mut l = LaurentSeries { w, coeffs, known_below: Some(end) };
        l.normalize();
        l
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(0) => {}
            Some(k) => {
                self.coeffs.drain(..k);
                self.w += k as i64;
            }
            None => {
                self.coeffs.clear();
                self.w = 0;
            }
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        if let Some(e) = self.known_below {
            // Stored support must sit inside the known window.
            debug_assert!(self.coeffs.is_empty() || self.w + self.coeffs.len() as i64 <= e);
        }
    }

    /// True when every known coefficient is zero. For a windowed series this
    /// certifies vanishing only up to the window.
    pub fn is_zero_to_known(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Leading index `w` for nonzero series.
    pub fn leading_index(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.w)
        }
    }

    /// End of the exactly-known index window (`None` = known everywhere).
    pub fn known_below(&self) -> Option<i64> {
        self.known_below
    }

    pub fn valuation(&self) -> Valuation {
        match self.leading_index() {
            Some(w) => Valuation::Finite(-w),
            None => Valuation::NegInfinity,
        }
    }

    /// Coefficient `u_k`; zero below the leading index and in trimmed known
    /// positions, [`Error::Precision`] outside the known window.
    pub fn coeff(&self, k: i64) -> Result<Felt> {
        if let Some(e) = self.known_below {
            if k >= e {
                return Err(Error::precision(format!(
                    "coefficient at index {k} requested, series known only below {e}"
                )));
            }
        }
        if k < self.w {
            return Ok(Felt::ZERO);
        }
        let offset = (k - self.w) as usize;
        Ok(self.coeffs.get(offset).copied().unwrap_or(Felt::ZERO))
    }

    /// Fractional part: terms with index `k >= max(1, w)`.
    pub fn frac(&self) -> LaurentSeries {
        if self.coeffs.is_empty() || self.w >= 1 {
            return self.clone();
        }
        let skip = ((1 - self.w) as usize).min(self.coeffs.len());
        let mut l = LaurentSeries {
            w: self.w + skip as i64,
            coeffs: self.coeffs[skip..].to_vec(),
            known_below: self.known_below,
        };
        l.normalize();
        l
    }

    pub fn add(&self, other: &LaurentSeries, field: &FieldSpec) -> LaurentSeries {
        let known_below = match (self.known_below, other.known_below) {
            (None, None) => None,
            (Some(e), None) | (None, Some(e)) => Some(e),
            (Some(a), Some(b)) => Some(a.min(b)),
        };
        if self.coeffs.is_empty() && other.coeffs.is_empty() {
            let mut l = LaurentSeries::zero();
            l.known_below = known_below;
            return l;
        }
        let w = match (self.leading_index(), other.leading_index()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => unreachable!(),
        };
        let end = match known_below {
            Some(e) => e,
            None => {
                let ea = self.w + self.coeffs.len() as i64;
                let eb = other.w + other.coeffs.len() as i64;
                ea.max(eb)
            }
        };
        let mut coeffs = Vec::with_capacity((end - w).max(0) as usize);
        for k in w..end {
            // Both coefficients are known: k < known_below of each side.
            coeffs.push(field.add(self.coeff(k).unwrap(), other.coeff(k).unwrap()));
        }
        let mut l = LaurentSeries { w, coeffs, known_below };
        l.normalize();
        l
    }

    /// Product by a polynomial. The output window shrinks by `degree(q)`:
    /// coefficient `k` of `q L` needs `u_{k + deg q}`.
    pub fn mul_poly(&self, q: &Poly, field: &FieldSpec) -> Result<LaurentSeries> {
        if q.is_zero() {
            return Ok(LaurentSeries::zero());
        }
        let deg = q.degree().unwrap() as i64;
        let known_below = self.known_below.map(|e| e - deg);
        if self.coeffs.is_empty() {
            let mut l = LaurentSeries::zero();
            l.known_below = known_below;
            if let Some(e) = known_below {
                if e <= self.w - deg {
                    return Err(Error::precision(
                        "polynomial product leaves an empty known window".to_string(),
                    ));
                }
            }
            return Ok(l);
        }
        let w_out = self.w - deg;
        let end = match known_below {
            Some(e) => e,
            None => self.w + self.coeffs.len() as i64, // largest index with a term
        };
        if end <= w_out {
            return Err(Error::precision(format!(
                "product by degree-{deg} polynomial needs coefficients beyond the known window"
            )));
        }
        let mut coeffs = Vec::with_capacity((end - w_out) as usize);
        for k in w_out..end {
            let mut acc = Felt::ZERO;
            for r in 0..=deg {
                let qr = q.coeff(r as usize);
                if qr.is_zero() {
                    continue;
                }
                // Index k + r is within the window: k < end <= known - deg + r... r <= deg.
                acc = field.add(acc, field.mul(qr, self.coeff(k + r)?));
            }
            coeffs.push(acc);
        }
        let mut l = LaurentSeries { w: w_out, coeffs, known_below };
        l.normalize();
        Ok(l)
    }

    /// Full series product, for self-consistency checks. The output is known
    /// below `min(e_A + w_B, e_B + w_A)` (each unknown tail first pollutes
    /// the index where it meets the other factor's leading term).
    pub fn mul(&self, other: &LaurentSeries, field: &FieldSpec) -> LaurentSeries {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            // A factor that is zero on its window contributes only through
            // its unknown tail (index >= e); the product is certainly zero
            // before that tail meets the other factor's leading term.
            let cert_a = self
                .known_below
                .map(|e| e + other.leading_index().unwrap_or(0));
            let cert_b = other
                .known_below
                .map(|e| e + self.leading_index().unwrap_or(0));
            let known_below = match (cert_a, cert_b) {
                (None, None) => None,
                (Some(e), None) | (None, Some(e)) => Some(e),
                (Some(a), Some(b)) => Some(a.min(b)),
            };
            let mut l = LaurentSeries::zero();
            l.known_below = known_below;
            return l;
        }
        let (wa, wb) = (self.w, other.w);
        let ea = self.known_below.unwrap_or(self.w + self.coeffs.len() as i64);
        let eb = other.known_below.unwrap_or(other.w + other.coeffs.len() as i64);
        let known_below = match (self.known_below, other.known_below) {
            (None, None) => None,
            _ => Some((ea + wb).min(eb + wa)),
        };
        let w_out = wa + wb;
        let end = known_below.unwrap_or(ea + eb - 1);
        let mut coeffs = vec![Felt::ZERO; (end - w_out).max(0) as usize];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let ka = self.w + i as i64;
            for (j, &c) in other.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let k = ka + other.w + j as i64;
                if k < end {
                    let idx = (k - w_out) as usize;
                    coeffs[idx] = field.add(coeffs[idx], field.mul(a, c));
                }
            }
        }
        let mut l = LaurentSeries { w: w_out, coeffs, known_below };
        l.normalize();
        l
    }

    /// First `prec` coefficients of `num/den` by long division: divides
    /// `num z^M` by `den` for `M = deg(den) - deg(num) + prec - 1`, so the
    /// window starts at the true leading index `w = deg(den) - deg(num)`.
    pub fn from_rational(
        num: &Poly,
        den: &Poly,
        prec: usize,
        field: &FieldSpec,
    ) -> Result<LaurentSeries> {
        if den.is_zero() {
            return Err(Error::domain("division by the zero polynomial"));
        }
        if prec == 0 {
            return Err(Error::domain("precision must be >= 1"));
        }
        if num.is_zero() {
            return Ok(LaurentSeries::zero());
        }
        let dn = num.degree().unwrap() as i64;
        let dd = den.degree().unwrap() as i64;
        let w = dd - dn;
        // Divide num * z^up by den. The division yields num*z^up = Q*den + R
        // with deg R < deg den, so num/den = Q*z^{-up} + R/(den*z^up); the
        // remainder term only touches indices k > up, making the quotient's
        // coefficients exact for k <= up. up = w + prec - 1 covers the window.
        let up = (w + prec as i64 - 1).max(0) as usize;
        let mut rem = vec![Felt::ZERO; num.coeffs().len() + up];
        for (r, &c) in num.coeffs().iter().enumerate() {
            rem[r + up] = c;
        }
        let lead_inv = field.inv(den.coeff(dd as usize))?;
        let mut quot = vec![Felt::ZERO; rem.len()];
        for d in (dd as usize..rem.len()).rev() {
            let c = rem[d];
            if c.is_zero() {
                continue;
            }
            let q = field.mul(c, lead_inv);
            let t = d - dd as usize;
            quot[t] = q;
            for (j, &dj) in den.coeffs().iter().enumerate() {
                rem[t + j] = field.sub(rem[t + j], field.mul(q, dj));
            }
        }
        // num/den = sum_t quot[t] z^{t - up}, hence u_k = quot[up - k].
        let coeffs = (w..w + prec as i64)
            .map(|k| {
                let t = up as i64 - k;
                if t >= 0 {
                    quot.get(t as usize).copied().unwrap_or(Felt::ZERO)
                } else {
                    Felt::ZERO
                }
            })
            .collect();
        Ok(LaurentSeries::from_window(w, coeffs))
    }

    /// The base-2 quadratic fixture: the unique `L` in `F_2((z^-1))` with
    /// leading index 1 satisfying `L^2 + zL + 1 = 0`, to `prec` coefficients.
    /// The defining equation is re-verified over the constructed window.
    pub fn quadratic_fixture(field: &FieldSpec, prec: usize) -> Result<LaurentSeries> {
        if field.order() != 2 {
            return Err(Error::domain(format!(
                "quadratic fixture requires base 2, got {}",
                field.order()
            )));
        }
        if prec == 0 {
            return Err(Error::domain("precision must be >= 1"));
        }
        // Matching coefficients of z^{-j}: u_1 = 1; u_{j+1} = u_{j/2} for even
        // j >= 2, else 0. Nonzero exactly at indices 2^t - 1.
        let mut u = vec![Felt::ZERO; prec + 1]; // u[k] for k = 1..=prec
        u[1] = field.one();
        for k in 2..=prec {
            let j = k - 1;
            u[k] = if j % 2 == 0 { u[j / 2] } else { Felt::ZERO };
        }
        let l = LaurentSeries::from_window(1, u[1..].to_vec());
        // Self-check: L^2 + zL + 1 vanishes on the whole computable window.
        let l2 = l.mul(&l, field);
        let zl = l.mul_poly(&Poly::monomial(field, 1), field)?;
        let one = LaurentSeries::from_terms(0, vec![field.one()]);
        let residue = l2.add(&zl, field).add(&one, field);
        if !residue.is_zero_to_known() {
            return Err(Error::domain(
                "quadratic fixture failed its defining-equation self-check".to_string(),
            ));
        }
        Ok(l)
    }

    /// Digits of the real embedding: position `k` carries
    /// `eta_{i,k}(u_k)`, where `u_k` is an exact zero before the series
    /// starts (eta need not fix 0, so those positions still pass through
    /// it). Requires the window to cover indices `1..=prec`.
    pub fn embed_real(
        &self,
        field: &FieldSpec,
        bij: &BijectionFamily,
        coord: usize,
        prec: usize,
    ) -> Result<Vec<u64>> {
        let start = self.leading_index().map_or(i64::MAX, |w| w.max(1));
        let mut digits = Vec::with_capacity(prec);
        for k in 1..=prec as i64 {
            let e = if k < start { Felt::ZERO } else { self.coeff(k)? };
            digits.push(bij.eta(field, coord, k as usize, e));
        }
        Ok(digits)
    }
}

// ======================================================================
// Tests
// ======================================================================
