//! Net-quality and admissibility analysis: elementary-interval counting,
//! the rank criterion for block quality T(m), a finite uniform-distribution
//! profile, and the pairwise-norm admissibility constant kappa_m.
//!
//! Counting and rank give two independent routes to the same net quality;
//! the test suite and the acceptance suite hold them equal. Likewise
//! kappa_m can be computed by scanning stored point digits or exactly from
//! the defining series; both are provided and cross-checked.
//!
//! On the truncation depth: kappa_m is always a power of the base,
//! `kappa_m = b^{-e}`. The report carries both the resolution depth `e`
//! (the digit depth at which block points separate, used by the truncation
//! and character analysis downstream, which needs a value >= 1) and the
//! literal shifted value `m - e`. For digital sequences the shifted value
//! is never positive — pairwise separation cannot beat `b^{-m}` — so the
//! depth reading is the one the analysis machinery consumes.

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::generate::{digital_point, GeneratingMatrix, KroneckerSystem};
use crate::laurent::{poly_from_index, Poly};
use crate::linalg::FMatrix;
use crate::points::{power_norm, Point};

// ======================================================================
// Elementary-interval counting
// ======================================================================

/// A failed elementary-interval check: the interval (as per-coordinate
/// cell indices at per-coordinate depths) and its observed point count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetWitness {
    /// Digit depths d_1..d_s, sum = m - t.
    pub shape: Vec<usize>,
    /// Cell indices a_i in [0, b^{d_i}): the interval is
    /// prod_i [a_i b^{-d_i}, (a_i+1) b^{-d_i}).
    pub cell: Vec<u64>,
    pub count: u64,
    pub expected: u64,
}

impl NetWitness {
    /// Human-readable interval like "[1/4, 1/2) x [0, 1)".
    pub fn interval_string(&self, base: u64) -> String {
        self.shape
            .iter()
            .zip(&self.cell)
            .map(|(&d, &a)| {
                let den = base.pow(d as u32);
                format!("[{a}/{den}, {}/{den})", a + 1)
            })
            .collect::<Vec<_>>()
            .join(" x ")
    }
}

/// All s-tuples of non-negative integers summing to `total`, in
/// lexicographic order (deterministic).
fn compositions(total: usize, s: usize) -> Vec<Vec<usize>> {
    fn rec(total: usize, s: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if s == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for d in 0..=total {
            prefix.push(d);
            rec(total - d, s - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, s, &mut Vec::new(), &mut out);
    out
}

/// Checks the net property at quality `t` for a block of exactly `b^m`
/// points: every elementary interval of volume `b^{t-m}` must contain
/// exactly `b^t` points. Returns `None` on success and the first offending
/// interval otherwise.
pub fn net_check(points: &[Point], t: usize, m: usize) -> Result<Option<NetWitness>> {
    if points.is_empty() {
        return Err(Error::dimension("empty point set"));
    }
    let base = points[0].base();
    let s = points[0].dim();
    let expected_points = (base as u128).pow(m as u32);
    if points.len() as u128 != expected_points {
        return Err(Error::dimension(format!(
            "net check at m = {m} needs exactly {expected_points} points, got {}",
            points.len()
        )));
    }
    if t > m {
        return Err(Error::domain(format!("t = {t} exceeds m = {m}")));
    }
    for p in points {
        if p.precision() < m || p.dim() != s || p.base() != base {
            return Err(Error::precision(format!(
                "every point needs >= {m} digits and matching shape"
            )));
        }
    }
    let depth = m - t;
    let cells = (base as usize).pow(depth as u32);
    let expected = base.pow(t as u32);
    for shape in compositions(depth, s) {
        let mut counts = vec![0u64; cells];
        for p in points {
            let mut key = 0usize;
            for (i, &d) in shape.iter().enumerate() {
                for &digit in &p.digits(i)[..d] {
                    key = key * base as usize + digit as usize;
                }
            }
            counts[key] += 1;
        }
        for (key, &count) in counts.iter().enumerate() {
            if count != expected {
                // Decode the flat key back into per-coordinate cells.
                let mut cell = vec![0u64; s];
                let mut rest = key;
                for (i, &d) in shape.iter().enumerate().rev() {
                    let span = (base as usize).pow(d as u32);
                    cell[i] = (rest % span) as u64;
                    rest /= span;
                }
                return Ok(Some(NetWitness { shape, cell, count, expected }));
            }
        }
    }
    Ok(None)
}

/// Smallest `t` accepted by [`net_check`]; the check is monotone in `t`.
pub fn minimal_net_t(points: &[Point], m: usize) -> Result<usize> {
    for t in 0..=m {
        if net_check(points, t, m)?.is_none() {
            return Ok(t);
        }
    }
    unreachable!("t = m always passes: the single interval [0,1)^s holds all points");
}

// ======================================================================
// Rank criterion
// ======================================================================

/// Block quality by rank: the smallest `t` such that for every shape
/// `(d_1..d_s)` with sum `m - t`, the stacked rows `1..=d_i` of the
/// generating matrices (columns `0..m`) are linearly independent.
pub fn compute_t(
    matrices: &[GeneratingMatrix],
    field: &FieldSpec,
    m: usize,
) -> Result<usize> {
    if matrices.is_empty() {
        return Err(Error::dimension("no generating matrices"));
    }
    for (i, c) in matrices.iter().enumerate() {
        if c.rows() < m || c.cols() < m {
            return Err(Error::dimension(format!(
                "matrix {} is {}x{}, need at least {m}x{m}",
                i + 1,
                c.rows(),
                c.cols()
            )));
        }
    }
    let s = matrices.len();
    't_scan: for t in 0..=m {
        let depth = m - t;
        for shape in compositions(depth, s) {
            let mut rows = Vec::with_capacity(depth);
            for (i, &d) in shape.iter().enumerate() {
                for j in 1..=d {
                    rows.push(matrices[i].row(j)[..m].to_vec());
                }
            }
            if FMatrix::from_rows(rows).rank(field) != depth {
                continue 't_scan;
            }
        }
        return Ok(t);
    }
    unreachable!("t = m has only the empty shape, which is trivially independent")
}

/// One row of the uniform-distribution profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UdRow {
    pub m: usize,
    pub t: usize,
    /// m - T(m); unbounded growth of this gap is the u.d. criterion.
    pub gap: usize,
}

/// Finite-depth surrogate for the (asymptotic) uniform-distribution
/// criterion. `consistent` is a heuristic verdict — the gap at the deepest
/// computed level strictly exceeds every earlier gap — and is labeled as
/// such wherever it is printed; no finite table can decide the limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UdProfile {
    pub rows: Vec<UdRow>,
    pub consistent: bool,
}

pub fn ud_criterion(
    matrices: &[GeneratingMatrix],
    field: &FieldSpec,
    m_max: usize,
) -> Result<UdProfile> {
    if m_max == 0 {
        return Err(Error::domain("m_max must be >= 1"));
    }
    let mut rows = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let t = compute_t(matrices, field, m)?;
        rows.push(UdRow { m, t, gap: m - t });
    }
    let last = rows.last().expect("m_max >= 1").gap;
    let prior_max = rows[..rows.len() - 1].iter().map(|r| r.gap).max().unwrap_or(0);
    Ok(UdProfile { rows, consistent: last > prior_max })
}

// ======================================================================
// Weak admissibility
// ======================================================================

/// The admissibility constant at block depth m, with its exact power-of-b
/// structure exposed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibilityReport {
    pub m: u32,
    pub base: u64,
    /// kappa_m = b^{-e}; `None` encodes kappa_m = 0.
    pub kappa_exponent: Option<u32>,
    /// Pair (k, n) witnessing kappa_m = 0, when it is.
    pub collision: Option<(u64, u64)>,
}

impl AdmissibilityReport {
    /// Exact value of kappa_m.
    pub fn kappa(&self) -> BigRational {
        match self.kappa_exponent {
            Some(e) => power_norm(self.base, e),
            None => BigRational::zero(),
        }
    }

    pub fn is_admissible(&self) -> bool {
        self.kappa_exponent.is_some()
    }

    /// The digit depth e with kappa_m = b^{-e}. This is the truncation
    /// depth the downstream analysis consumes (always >= m for digital
    /// blocks). Errors when the sequence is not weakly admissible at m.
    pub fn truncation_depth(&self) -> Result<u32> {
        self.kappa_exponent.ok_or_else(|| {
            let detail = match self.collision {
                Some((k, n)) => format!(" (points {k} and {n} collide)"),
                None => String::new(),
            };
            Error::admissibility(format!(
                "kappa_{} = 0: sequence not weakly admissible at this depth{detail}",
                self.m
            ))
        })
    }

    /// The literal shifted index `floor(log_b kappa_m) + m = m - e`.
    /// Non-positive for every digital sequence; kept for reference and
    /// flagged degenerate rather than used downstream.
    pub fn tau_literal(&self) -> Option<i64> {
        self.kappa_exponent.map(|e| self.m as i64 - e as i64)
    }

    /// True when the literal shifted index falls below 1 (it always does
    /// for digital blocks; see module docs).
    pub fn literal_tau_degenerate(&self) -> bool {
        match self.tau_literal() {
            Some(t) => t < 1,
            None => true,
        }
    }
}

/// kappa_m by direct pairwise scan over stored points: the minimum over
/// pairs of the product of coordinate norms of the digitwise difference.
/// A pair whose difference vanishes at the stored precision is reported as
/// a collision (kappa_m = 0); callers must supply enough digits that this
/// cannot be a truncation artifact.
pub fn kappa_points(points: &[Point], m: u32) -> Result<AdmissibilityReport> {
    if points.is_empty() {
        return Err(Error::dimension("empty point set"));
    }
    let base = points[0].base();
    let expected = (base as u128).pow(m);
    if points.len() as u128 != expected {
        return Err(Error::dimension(format!(
            "kappa at m = {m} needs exactly {expected} points, got {}",
            points.len()
        )));
    }
    let mut worst: Option<u32> = None;
    for k in 0..points.len() {
        for n in (k + 1)..points.len() {
            let diff = points[n].dsub(&points[k])?;
            let mut exponent = 0u32;
            let mut collided = false;
            for i in 0..diff.dim() {
                match diff.digits(i).iter().position(|&d| d != 0) {
                    Some(lead) => exponent += lead as u32 + 1,
                    None => {
                        collided = true;
                        break;
                    }
                }
            }
            if collided {
                return Ok(AdmissibilityReport {
                    m,
                    base,
                    kappa_exponent: None,
                    collision: Some((k as u64, n as u64)),
                });
            }
            worst = Some(worst.map_or(exponent, |w| w.max(exponent)));
        }
    }
    Ok(AdmissibilityReport { m, base, kappa_exponent: worst, collision: None })
}

/// Depth of one coordinate of the pair difference, decided exactly from
/// the series: the leading index of `frac(delta(z) * L_i)`. `Ok(None)`
/// means the coordinate is exactly zero (true collision).
fn coordinate_depth(
    sys: &KroneckerSystem,
    i: usize,
    delta: &Poly,
) -> Result<Option<u32>> {
    let prod = sys
        .series(i)
        .mul_poly(delta, sys.field())
        .map_err(|e| {
            Error::admissibility(format!(
                "series precision too small to separate a pair in coordinate {}: {e}",
                i + 1
            ))
        })?
        .frac();
    if let Some(w) = prod.leading_index() {
        return Ok(Some(w as u32));
    }
    if prod.known_below().is_none() {
        return Ok(None); // exactly zero
    }
    Err(Error::admissibility(format!(
        "coordinate {} of a pair difference vanishes through the whole known \
         window; increase series precision to decide admissibility",
        i + 1
    )))
}

/// kappa_m computed exactly from the defining series. The difference of two
/// points separates in coordinate `i` at the leading index of
/// `frac((psi(n)(z) - psi(k)(z)) * L_i)`, because the per-position digit maps
/// are bijections; no digit truncation is involved, so a zero here is a true
/// collision and an undecidable window is an explicit error.
pub fn kappa_system(sys: &KroneckerSystem, m: u32) -> Result<AdmissibilityReport> {
    let field = sys.field();
    let base = field.order();
    let count = base
        .checked_pow(m)
        .ok_or_else(|| Error::domain(format!("b^m overflows: b = {base}, m = {m}")))?;
    let fast = field.kappa() == 1 && sys.bijections().is_identity_like(field);
    let mut worst: Option<u32> = None;
    let mut scan_pair = |k: u64, n: u64, delta: &Poly| -> Result<Option<(u64, u64)>> {
        let mut exponent = 0u32;
        for i in 0..sys.dim() {
            match coordinate_depth(sys, i, delta)? {
                Some(w) => exponent += w,
                None => return Ok(Some((k, n))),
            }
        }
        worst = Some(worst.map_or(exponent, |w| w.max(exponent)));
        Ok(None)
    };
    if fast {
        // Prime base, identity-routed bijections: psi is additive digitwise,
        // so the pair difference depends only on d = n (-) k and one scan
        // over d = 1..b^m covers all pairs.
        for d in 1..count {
            let delta = poly_from_index(field, sys.bijections(), d)?;
            if let Some((k, n)) = scan_pair(0, d, &delta)? {
                return Ok(AdmissibilityReport {
                    m,
                    base,
                    kappa_exponent: None,
                    collision: Some((k, n)),
                });
            }
        }
    } else {
        for k in 0..count {
            let pk = poly_from_index(field, sys.bijections(), k)?;
            for n in (k + 1)..count {
                let pn = poly_from_index(field, sys.bijections(), n)?;
                // delta_r = psi_r(a_r(n)) - psi_r(a_r(k)) in the field.
                let max_len = pk.coeffs().len().max(pn.coeffs().len());
                let delta = Poly::from_coeffs(
                    (0..max_len)
                        .map(|r| field.sub(pn.coeff(r), pk.coeff(r)))
                        .collect(),
                );
                if delta.is_zero() {
                    return Ok(AdmissibilityReport {
                        m,
                        base,
                        kappa_exponent: None,
                        collision: Some((k, n)),
                    });
                }
                if let Some(pair) = scan_pair(k, n, &delta)? {
                    return Ok(AdmissibilityReport {
                        m,
                        base,
                        kappa_exponent: None,
                        collision: Some(pair),
                    });
                }
            }
        }
    }
    Ok(AdmissibilityReport { m, base, kappa_exponent: worst, collision: None })
}

/// Convenience: the first `b^m` points of a system at a given precision.
pub fn block_points(sys: &KroneckerSystem, m: u32, prec: usize) -> Result<Vec<Point>> {
    let count = sys
        .field()
        .order()
        .checked_pow(m)
        .ok_or_else(|| Error::domain("b^m overflows"))?;
    (0..count).map(|n| sys.point(n, prec)).collect()
}

/// Convenience: `b^m` points from generating matrices.
pub fn block_points_digital(
    matrices: &[GeneratingMatrix],
    field: &FieldSpec,
    bij: &crate::field::BijectionFamily,
    m: u32,
    prec: usize,
) -> Result<Vec<Point>> {
    let count = field
        .order()
        .checked_pow(m)
        .ok_or_else(|| Error::domain("b^m overflows"))?;
    (0..count)
        .map(|n| digital_point(n, matrices, field, bij, prec))
        .collect()
}

// ======================================================================
// Tests
// ======================================================================
