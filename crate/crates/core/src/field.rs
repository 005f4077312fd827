//! Finite fields `F_b`, `b = p^kappa <= 16`, with the digit-side maps.
//!
//! Elements are stored as packed indices: the element with power-basis
//! coordinates `(c_0, ..., c_{kappa-1})` (low degree first, modulo the
//! configured irreducible polynomial) has index `sum c_j p^j`. All arithmetic
//! is table-driven, so a [`FieldSpec`] is built once and then every operation
//! is a lookup.
//!
//! Beyond the ring structure the module provides the three maps the digit
//! machinery needs:
//! - the absolute trace `Tr: F_b -> F_p`,
//! - the additive character `E(alpha) = exp(2 pi i Tr(alpha) / p)`,
//! - the integer labeling `omega(alpha) = sum_j p^{j-1} Tr(alpha beta_j)`
//!   for the configured basis `(beta_1, ..., beta_kappa)`, validated to be a
//!   bijection onto `{0, ..., b-1}` with `omega(0) = 0`.
//!
//! [`BijectionFamily`] carries the per-position digit<->field bijections
//! `psi_r: Z_b -> F_b` (required to fix 0) and `eta_{i,j}: F_b -> Z_b`
//! (unconstrained at 0); the identity family routes both through `omega`.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Largest supported field order. Keeps every table and enumeration tiny.
pub const MAX_BASE: u64 = 16;

/// A field element, stored as its packed index in `[0, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Felt(pub u8);

impl Felt {
    pub const ZERO: Felt = Felt(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

// ======================================================================
// FieldSpec
// ======================================================================

/// Serialized form: characteristic, extension degree, modulus and basis.
///
/// `modulus` lists polynomial coefficients low degree first (length
/// `kappa + 1`, monic); `basis` lists `kappa` elements, each as power-basis
/// coordinates (length `kappa`, entries in `[0, p)`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldSpecConfig {
    pub p: u64,
    pub kappa: usize,
    pub modulus: Vec<u64>,
    pub basis: Vec<Vec<u64>>,
}

/// A fully validated finite field with precomputed operation tables.
#[derive(Debug, Clone)]
pub struct FieldSpec {
    p: u64,
    kappa: usize,
    b: u64,
    modulus: Vec<u64>,
    basis: Vec<Vec<u64>>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>, // inv[0] unused
    trace: Vec<u8>,
    omega: Vec<u8>,
    omega_inv: Vec<u8>,
    chars: Vec<Complex64>,
}

impl FieldSpec {
    /// Builds and validates a field from its serialized description.
    pub fn new(cfg: &FieldSpecConfig) -> Result<FieldSpec> {
        let p = cfg.p;
        let kappa = cfg.kappa;
        if !is_prime(p) {
            return Err(Error::validation(format!("p = {p} is not prime")));
        }
        if kappa == 0 {
            return Err(Error::validation("kappa must be >= 1"));
        }
        let b = p.checked_pow(kappa as u32).unwrap_or(u64::MAX);
        if b > MAX_BASE {
            return Err(Error::validation(format!(
                "field order p^kappa = {b} exceeds supported maximum {MAX_BASE}"
            )));
        }
        if cfg.modulus.len() != kappa + 1 {
            return Err(Error::validation(format!(
                "modulus must have kappa + 1 = {} coefficients, got {}",
                kappa + 1,
                cfg.modulus.len()
            )));
        }
        if cfg.modulus.iter().any(|&c| c >= p) {
            return Err(Error::validation("modulus coefficients must lie in [0, p)"));
        }
        if cfg.modulus[kappa] != 1 {
            return Err(Error::validation("modulus must be monic"));
        }
        if !poly_is_irreducible(&cfg.modulus, p) {
            return Err(Error::validation(
                "modulus is reducible over F_p (a monic divisor of degree <= kappa/2 exists)",
            ));
        }
        if cfg.basis.len() != kappa || cfg.basis.iter().any(|v| v.len() != kappa) {
            return Err(Error::validation(format!(
                "basis must consist of kappa = {kappa} elements with {kappa} coordinates each"
            )));
        }
        if cfg
            .basis
            .iter()
            .any(|v| v.iter().any(|&c| c >= p))
        {
            return Err(Error::validation("basis coordinates must lie in [0, p)"));
        }
        if rank_mod_p(&cfg.basis, p) != kappa {
            return Err(Error::validation("basis elements are linearly dependent over F_p"));
        }

        let bu = b as usize;
        let mut field = FieldSpec {
            p,
            kappa,
            b,
            modulus: cfg.modulus.clone(),
            basis: cfg.basis.clone(),
            add: vec![0; bu * bu],
            mul: vec![0; bu * bu],
            neg: vec![0; bu],
            inv: vec![0; bu],
            trace: vec![0; bu],
            omega: vec![0; bu],
            omega_inv: vec![0; bu],
            chars: vec![Complex64::new(0.0, 0.0); bu],
        };
        field.build_tables()?;
        Ok(field)
    }

    /// The canonical field of order `b` (identity-friendly defaults).
    ///
    /// Prime `b`: `F_p` with modulus `x` and basis `(1)`, so `omega` is the
    /// identity on `{0, ..., p-1}`. Prime powers use the smallest standard
    /// irreducible and the power basis `(1, x, ..., x^{kappa-1})`.
    pub fn for_base(b: u64) -> Result<FieldSpec> {
        let cfg = match b {
            2 | 3 | 5 | 7 | 11 | 13 => FieldSpecConfig {
                p: b,
                kappa: 1,
                modulus: vec![0, 1],
                basis: vec![vec![1]],
            },
            4 => FieldSpecConfig {
                p: 2,
                kappa: 2,
                modulus: vec![1, 1, 1],
                basis: vec![vec![1, 0], vec![0, 1]],
            },
            8 => FieldSpecConfig {
                p: 2,
                kappa: 3,
                modulus: vec![1, 1, 0, 1],
                basis: vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
            },
            9 => FieldSpecConfig {
                p: 3,
                kappa: 2,
                modulus: vec![1, 0, 1],
                basis: vec![vec![1, 0], vec![0, 1]],
            },
            16 => FieldSpecConfig {
                p: 2,
                kappa: 4,
                modulus: vec![1, 1, 0, 0, 1],
                basis: vec![
                    vec![1, 0, 0, 0],
                    vec![0, 1, 0, 0],
                    vec![0, 0, 1, 0],
                    vec![0, 0, 0, 1],
                ],
            },
            _ => {
                return Err(Error::validation(format!(
                    "no field of order {b} (need a prime power <= {MAX_BASE})"
                )))
            }
        };
        FieldSpec::new(&cfg)
    }

    fn build_tables(&mut self) -> Result<()> {
        let b = self.b as usize;
        for a in 0..b {
            for c in 0..b {
                let (av, cv) = (self.coords_of_index(a), self.coords_of_index(c));
                let sum: Vec<u64> = av.iter().zip(&cv).map(|(x, y)| (x + y) % self.p).collect();
                self.add[a * b + c] = self.index_of_coords(&sum) as u8;
                let prod = self.poly_mul_mod(&av, &cv);
                self.mul[a * b + c] = self.index_of_coords(&prod) as u8;
            }
        }
        for a in 0..b {
            let av = self.coords_of_index(a);
            let negv: Vec<u64> = av.iter().map(|&x| (self.p - x) % self.p).collect();
            self.neg[a] = self.index_of_coords(&negv) as u8;
        }
        // Inverses by scanning: b <= 16 makes this instant.
        for a in 1..b {
            let mut found = false;
            for c in 1..b {
                if self.mul[a * b + c] == self.index_of_coords(&self.coords_of_one()) as u8 {
                    self.inv[a] = c as u8;
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(Error::validation(format!(
                    "element {a} has no inverse; modulus is not irreducible"
                )));
            }
        }
        // Trace through repeated Frobenius; the result must be a constant.
        for a in 0..b {
            let mut acc = a as u8;
            let mut frob = a as u8;
            for _ in 1..self.kappa {
                frob = self.pow_index(frob, self.p);
                acc = self.add[acc as usize * b + frob as usize];
            }
            let coords = self.coords_of_index(acc as usize);
            if coords[1..].iter().any(|&c| c != 0) {
                return Err(Error::validation(
                    "trace landed outside the prime subfield (internal inconsistency)",
                ));
            }
            self.trace[a] = coords[0] as u8;
        }
        // omega(alpha) = sum_j p^{j-1} Tr(alpha beta_j); must be bijective.
        let mut seen = vec![false; b];
        for a in 0..b {
            let mut w = 0u64;
            let mut pw = 1u64;
            for j in 0..self.kappa {
                let beta = self.index_of_coords(&self.basis[j]);
                let prod = self.mul[a * b + beta] as usize;
                w += pw * self.trace[prod] as u64;
                pw *= self.p;
            }
            self.omega[a] = w as u8;
            if seen[w as usize] {
                return Err(Error::validation(
                    "omega is not injective for this basis (duplicate labels)",
                ));
            }
            seen[w as usize] = true;
            self.omega_inv[w as usize] = a as u8;
        }
        debug_assert_eq!(self.omega[0], 0);
        // Additive character values exp(2 pi i t / p) by trace.
        for a in 0..b {
            let t = self.trace[a] as f64;
            let theta = 2.0 * std::f64::consts::PI * t / self.p as f64;
            self.chars[a] = Complex64::new(theta.cos(), theta.sin());
        }
        Ok(())
    }

    fn coords_of_one(&self) -> Vec<u64> {
        let mut v = vec![0; self.kappa];
        v[0] = 1;
        v
    }

    fn pow_index(&self, base: u8, exp: u64) -> u8 {
        let b = self.b as usize;
        let mut result = self.index_of_coords(&self.coords_of_one()) as u8;
        let mut acc = base;
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul[result as usize * b + acc as usize];
            }
            acc = self.mul[acc as usize * b + acc as usize];
            e >>= 1;
        }
        result
    }

    fn poly_mul_mod(&self, a: &[u64], c: &[u64]) -> Vec<u64> {
        let k = self.kappa;
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &cj) in c.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ai * cj) % self.p;
            }
        }
        // Reduce by the monic modulus from the top.
        for d in (k..prod.len()).rev() {
            let coef = prod[d];
            if coef == 0 {
                continue;
            }
            prod[d] = 0;
            for (j, &mj) in self.modulus[..k].iter().enumerate() {
                let idx = d - k + j;
                prod[idx] = (prod[idx] + coef * (self.p - mj)) % self.p;
            }
        }
        prod.truncate(k);
        prod
    }

    fn coords_of_index(&self, mut idx: usize) -> Vec<u64> {
        let mut v = vec![0u64; self.kappa];
        for c in v.iter_mut() {
            *c = (idx as u64) % self.p;
            idx /= self.p as usize;
        }
        v
    }

    fn index_of_coords(&self, coords: &[u64]) -> usize {
        let mut idx = 0u64;
        let mut pw = 1u64;
        for &c in coords {
            idx += c * pw;
            pw *= self.p;
        }
        idx as usize
    }

    // ------------------------------------------------------------------
    // Public accessors and arithmetic
    // ------------------------------------------------------------------

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn kappa(&self) -> usize {
        self.kappa
    }

    /// Field order `b = p^kappa`.
    #[inline]
    pub fn order(&self) -> u64 {
        self.b
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    /// Element from packed index; errors outside `[0, b)`.
    pub fn element(&self, index: u64) -> Result<Felt> {
        if index < self.b {
            Ok(Felt(index as u8))
        } else {
            Err(Error::domain(format!(
                "element index {index} outside field of order {}",
                self.b
            )))
        }
    }

    /// Element from power-basis coordinates (low degree first).
    pub fn element_from_coords(&self, coords: &[u64]) -> Result<Felt> {
        if coords.len() != self.kappa || coords.iter().any(|&c| c >= self.p) {
            return Err(Error::domain(format!(
                "coordinates must be {} entries in [0, {})",
                self.kappa, self.p
            )));
        }
        Ok(Felt(self.index_of_coords(coords) as u8))
    }

    pub fn coords(&self, a: Felt) -> Vec<u64> {
        self.coords_of_index(a.index())
    }

    #[inline]
    pub fn zero(&self) -> Felt {
        Felt(0)
    }

    #[inline]
    pub fn one(&self) -> Felt {
        Felt(1) // coords (1, 0, ..., 0) pack to 1 for every p
    }

    #[inline]
    pub fn add(&self, a: Felt, c: Felt) -> Felt {
        Felt(self.add[a.index() * self.b as usize + c.index()])
    }

    #[inline]
    pub fn sub(&self, a: Felt, c: Felt) -> Felt {
        self.add(a, self.neg(c))
    }

    #[inline]
    pub fn neg(&self, a: Felt) -> Felt {
        Felt(self.neg[a.index()])
    }

    #[inline]
    pub fn mul(&self, a: Felt, c: Felt) -> Felt {
        Felt(self.mul[a.index() * self.b as usize + c.index()])
    }

    /// Multiplicative inverse; zero is a domain error.
    pub fn inv(&self, a: Felt) -> Result<Felt> {
        if a.is_zero() {
            Err(Error::domain("inverse of zero"))
        } else {
            Ok(Felt(self.inv[a.index()]))
        }
    }

    /// Absolute trace into the prime field, as an integer in `[0, p)`.
    #[inline]
    pub fn trace(&self, a: Felt) -> u64 {
        self.trace[a.index()] as u64
    }

    /// Additive character `E(alpha) = exp(2 pi i Tr(alpha) / p)`.
    #[inline]
    pub fn char_e(&self, a: Felt) -> Complex64 {
        self.chars[a.index()]
    }

    /// Integer labeling `omega(alpha)`, a bijection onto `[0, b)` fixing 0.
    #[inline]
    pub fn omega(&self, a: Felt) -> u64 {
        self.omega[a.index()] as u64
    }

    /// Inverse of [`FieldSpec::omega`].
    pub fn omega_inv(&self, label: u64) -> Result<Felt> {
        if label < self.b {
            Ok(Felt(self.omega_inv[label as usize]))
        } else {
            Err(Error::domain(format!(
                "label {label} outside [0, {})",
                self.b
            )))
        }
    }

    /// All field elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = Felt> {
        (0..self.b).map(|i| Felt(i as u8))
    }

    pub fn config(&self) -> FieldSpecConfig {
        FieldSpecConfig {
            p: self.p,
            kappa: self.kappa,
            modulus: self.modulus.clone(),
            basis: self.basis.clone(),
        }
    }
}

// ======================================================================
// Bijection families
// ======================================================================

/// One direction of a digit<->field bijection with its inverse cached.
#[derive(Debug, Clone, PartialEq)]
struct Perm {
    fwd: Vec<u8>,
    inv: Vec<u8>,
}

impl Perm {
    fn new(table: &[u64], b: u64) -> Result<Perm> {
        if table.len() != b as usize {
            return Err(Error::validation(format!(
                "bijection table must have {b} entries, got {}",
                table.len()
            )));
        }
        let mut inv = vec![u8::MAX; b as usize];
        for (src, &dst) in table.iter().enumerate() {
            if dst >= b {
                return Err(Error::validation(format!("table value {dst} outside [0, {b})")));
            }
            if inv[dst as usize] != u8::MAX {
                return Err(Error::validation(format!("table value {dst} repeated; not a bijection")));
            }
            inv[dst as usize] = src as u8;
        }
        Ok(Perm {
            fwd: table.iter().map(|&v| v as u8).collect(),
            inv,
        })
    }
}

/// The per-position digit maps of a digital construction.
///
/// `psi_r: Z_b -> F_b` feeds index digits into the generating algebra
/// (position `r` counts generating powers, from the units digit up) and must
/// fix 0 so that finitely many digits stay finitely many terms.
/// `eta_{i,j}: F_b -> Z_b` turns the `j`-th produced coefficient of
/// coordinate `i` into an output digit; it is unconstrained at 0.
///
/// Positions beyond the configured tables fall back to the identity maps
/// through `omega`, so the empty family is the canonical identity family.
#[derive(Debug, Clone, Default)]
pub struct BijectionFamily {
    psi: Vec<Perm>,      // psi[r]: digit -> element index
    eta: Vec<Vec<Perm>>, // eta[i][j-1]: element index -> digit
}

impl BijectionFamily {
    /// The identity family: `psi_r = omega^{-1}`, `eta_{i,j} = omega`.
    pub fn identity() -> BijectionFamily {
        BijectionFamily::default()
    }

    /// Builds a family from explicit tables.
    ///
    /// `psi_tables[r][digit]` is the packed index of `psi_r(digit)`;
    /// `eta_tables[i][j-1][index]` is the digit `eta_{i,j}(element)`.
    /// Every `psi_r` must map digit 0 to the zero element.
    pub fn from_tables(
        field: &FieldSpec,
        psi_tables: &[Vec<u64>],
        eta_tables: &[Vec<Vec<u64>>],
    ) -> Result<BijectionFamily> {
        let b = field.order();
        let mut psi = Vec::with_capacity(psi_tables.len());
        for (r, table) in psi_tables.iter().enumerate() {
            let perm = Perm::new(table, b)?;
            if perm.fwd[0] != 0 {
                return Err(Error::validation(format!(
                    "psi_{r} must map digit 0 to the zero element"
                )));
            }
            psi.push(perm);
        }
        let mut eta = Vec::with_capacity(eta_tables.len());
        for tables in eta_tables {
            let mut per_coord = Vec::with_capacity(tables.len());
            for table in tables {
                per_coord.push(Perm::new(table, b)?);
            }
            eta.push(per_coord);
        }
        Ok(BijectionFamily { psi, eta })
    }

    /// `psi_r(digit)`: digit into the field.
    #[inline]
    pub fn psi(&self, field: &FieldSpec, r: usize, digit: u64) -> Result<Felt> {
        match self.psi.get(r) {
            Some(perm) => {
                if digit < field.order() {
                    Ok(Felt(perm.fwd[digit as usize]))
                } else {
                    Err(Error::domain(format!("digit {digit} outside base {}", field.order())))
                }
            }
            None => field.omega_inv(digit),
        }
    }

    /// Inverse of `psi_r`.
    #[inline]
    pub fn psi_inv(&self, field: &FieldSpec, r: usize, e: Felt) -> u64 {
        match self.psi.get(r) {
            Some(perm) => perm.inv[e.index()] as u64,
            None => field.omega(e),
        }
    }

    /// `eta_{i,j}(element)`: produced coefficient into an output digit.
    /// `i` is the 0-based coordinate, `j >= 1` the digit position.
    #[inline]
    pub fn eta(&self, field: &FieldSpec, i: usize, j: usize, e: Felt) -> u64 {
        match self.eta.get(i).and_then(|per| per.get(j - 1)) {
            Some(perm) => perm.fwd[e.index()] as u64,
            None => field.omega(e),
        }
    }

    /// Inverse of `eta_{i,j}`.
    #[inline]
    pub fn eta_inv(&self, field: &FieldSpec, i: usize, j: usize, digit: u64) -> Result<Felt> {
        match self.eta.get(i).and_then(|per| per.get(j - 1)) {
            Some(perm) => {
                if digit < field.order() {
                    Ok(Felt(perm.inv[digit as usize]))
                } else {
                    Err(Error::domain(format!("digit {digit} outside base {}", field.order())))
                }
            }
            None => field.omega_inv(digit),
        }
    }

    /// True when every configured table coincides with the omega defaults.
    /// Enables linear-algebra fast paths that rely on digit additivity.
    pub fn is_identity_like(&self, field: &FieldSpec) -> bool {
        let b = field.order();
        self.psi.iter().all(|perm| {
            (0..b).all(|d| Felt(perm.fwd[d as usize]) == field.omega_inv(d).unwrap())
        }) && self.eta.iter().all(|per| {
            per.iter().all(|perm| {
                field.elements().all(|e| perm.fwd[e.index()] as u64 == field.omega(e))
            })
        })
    }
}

// ======================================================================
// Prime-field polynomial helpers (validation only)
// ======================================================================

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Rank of a set of coordinate vectors over F_p.
fn rank_mod_p(rows: &[Vec<u64>], p: u64) -> usize {
    let mut m: Vec<Vec<u64>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_multiple_of(p)) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = mod_inverse(m[rank][col], p);
        for v in m[rank][col..].iter_mut() {
            *v = *v * inv % p;
        }
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && !row[col].is_multiple_of(p) {
                let factor = row[col] % p;
                for (v, &pv) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *v = (*v + (p - factor) * pv) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // p <= 13: scan.
    (1..p).find(|&x| a * x % p == 1).expect("nonzero element mod prime")
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
fn poly_is_irreducible(poly: &[u64], p: u64) -> bool {
    let deg = poly.len() - 1;
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for enc in 0..count {
            let mut divisor = vec![0u64; d + 1];
            let mut e = enc;
            for c in divisor.iter_mut().take(d) {
                *c = e % p;
                e /= p;
            }
            divisor[d] = 1;
            if poly_rem_is_zero(poly, &divisor, p) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_is_zero(poly: &[u64], divisor: &[u64], p: u64) -> bool {
    let mut rem: Vec<u64> = poly.to_vec();
    let dd = divisor.len() - 1;
    while rem.len() > dd {
        let lead = *rem.last().unwrap() % p;
        if lead != 0 {
            let offset = rem.len() - 1 - dd;
            for (j, &dj) in divisor.iter().enumerate() {
                rem[offset + j] = (rem[offset + j] + (p - dj % p) * lead) % p;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c % p == 0)
}

// ======================================================================
// Tests
// ======================================================================
