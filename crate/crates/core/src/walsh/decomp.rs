//! The counting-error decomposition of a digital block, and its averaged
//! (variance) form over block offsets.
//!
//! For the block `n in [b^m A, b^m (A+1))` and a truncated box, the signed
//! counting error splits as a finite character sum: inverting the box
//! indicator through its Walsh coefficients turns the count into
//! `sum_n sum_k E(k . u~_n) c^(k)`, and since every index in the block is
//! `b^m A + n'` with `n' < b^m` — disjoint digit support, so the digit
//! vectors add — the inner sum regroups through the block character sum
//! `sigma` into a sum over nonzero dual vectors only. Averaging the squared
//! error over one block per spatial class balances the cross terms exactly
//! and yields the quadratic identity checked by `variance_sigma1`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::field::{BijectionFamily, FieldSpec};
use crate::generate::{digital_point, GeneratingMatrix};
use crate::points::Point;
use crate::walsh::coeff::{truncated_numerator, truncated_value, walsh_product};
use crate::walsh::dual::{DualBasis, DUAL_ENUM_CAP};
use crate::walsh::{extended_u, g_size, IndexVector};

/// Cap on full frequency-group enumeration (b^{s tau + m}).
pub const G_ENUM_CAP: u128 = 1 << 20;

/// Cap on spatial-class enumeration (b^{s tau}).
pub const CLASS_ENUM_CAP: u128 = 1 << 16;

// ======================================================================
// Direct counting
// ======================================================================

/// Exact signed counting error of the first `n_count` points against the
/// box with edges `[gamma^{(i)}]_depth`: membership is decided on digits
/// `1..=depth` (exact for a box whose edge has at most `depth` digits) and
/// the subtracted volume is `n_count * prod_i [gamma^{(i)}]_depth`.
pub fn delta_direct_truncated(
    points: &[Point],
    gammas: &[Vec<u64>],
    n_count: u64,
    depth: usize,
) -> Result<BigRational> {
    if points.len() < n_count as usize {
        return Err(Error::domain(format!(
            "need {n_count} points, got {}",
            points.len()
        )));
    }
    if n_count == 0 {
        return Err(Error::domain("empty count range"));
    }
    let base = points[0].base();
    (base as u128)
        .checked_pow(depth as u32)
        .ok_or_else(|| Error::domain("depth too large for exact comparison"))?;
    let mut edges = Vec::with_capacity(gammas.len());
    for g in gammas {
        if g.len() < depth {
            return Err(Error::dimension(format!(
                "box edge has {} digits, need {depth}",
                g.len()
            )));
        }
        if let Some(&d) = g.iter().take(depth).find(|&&d| d >= base) {
            return Err(Error::domain(format!("edge digit {d} out of range")));
        }
        edges.push(truncated_numerator(g, base, depth));
    }
    let mut count = 0u64;
    for p in points.iter().take(n_count as usize) {
        if p.dim() != gammas.len() {
            return Err(Error::dimension(format!(
                "point has {} coordinates, box has {}",
                p.dim(),
                gammas.len()
            )));
        }
        if p.precision() < depth {
            return Err(Error::precision(format!(
                "point carries {} digits, membership needs {depth}",
                p.precision()
            )));
        }
        let inside = (0..p.dim()).all(|i| {
            let mut num = 0u128;
            for &d in &p.digits(i)[..depth] {
                num = num * base as u128 + d as u128;
            }
            num < edges[i]
        });
        if inside {
            count += 1;
        }
    }
    // Delta = count - N * prod edges / b^{s * depth}, all exact.
    let mut vol_num = BigInt::from(n_count);
    let mut vol_den = BigInt::from(1u32);
    let scale = BigInt::from(base).pow(depth as u32);
    for &e in &edges {
        vol_num *= BigInt::from(e);
        vol_den *= scale.clone();
    }
    Ok(BigRational::from_integer(BigInt::from(count)) - BigRational::new(vol_num, vol_den))
}

// ======================================================================
// Character-sum form
// ======================================================================

/// The two character-sum evaluations of the same block error.
#[derive(Debug, Clone, Copy)]
pub struct WalshDelta {
    /// Full inversion: sum over all of G_m and every index of the block,
    /// minus the volume term.
    pub full: f64,
    /// Regrouped form: `b^m sum over nonzero dual vectors of
    /// coeff(k) E(k . u~_{b^m A})`.
    pub regrouped: f64,
}

/// Evaluates the block counting error through Walsh coefficients, both as
/// the full double sum and in the regrouped dual-space form.
#[allow(clippy::too_many_arguments)]
pub fn delta_via_walsh(
    field: &FieldSpec,
    bij: &BijectionFamily,
    matrices: &[GeneratingMatrix],
    dual: &DualBasis,
    gammas: &[Vec<u64>],
    block_a: u64,
    n_count: u64,
    m: usize,
    tau: usize,
) -> Result<WalshDelta> {
    let s = matrices.len();
    if dual.s() != s || dual.tau() != tau || dual.m() != m {
        return Err(Error::dimension(format!(
            "dual space has shape ({}, {}, {}), expected ({s}, {tau}, {m})",
            dual.s(),
            dual.tau(),
            dual.m()
        )));
    }
    let b = field.order();
    let total = g_size(b, s, tau, m);
    if total > G_ENUM_CAP {
        return Err(Error::EnumerationTooLarge { size: total, cap: G_ENUM_CAP });
    }
    if dual.member_count() > DUAL_ENUM_CAP {
        return Err(Error::EnumerationTooLarge {
            size: dual.member_count(),
            cap: DUAL_ENUM_CAP,
        });
    }
    let bm = b
        .checked_pow(m as u32)
        .ok_or_else(|| Error::domain("b^m overflows"))?;
    let block_lo = bm
        .checked_mul(block_a)
        .ok_or_else(|| Error::domain("block start overflows"))?;
    block_lo
        .checked_add(bm)
        .ok_or_else(|| Error::domain("block end overflows"))?;
    if n_count == 0 || n_count > bm {
        return Err(Error::domain(format!("count N = {n_count} outside [1, {bm}]")));
    }
    // Precompute the product coefficient at every frequency vector.
    let mut table: Vec<(IndexVector, Complex64)> = Vec::new();
    for ord in 0..total {
        let k = IndexVector::from_ordinal(ord, field, s, tau, m);
        let c = walsh_product(field, bij, &k, gammas, n_count, m, tau)?;
        if c.norm() > 0.0 {
            table.push((k, c));
        }
    }
    let volume: f64 = n_count as f64
        * gammas
            .iter()
            .map(|g| truncated_value(g, b, tau))
            .product::<f64>();
    let mut full = Complex64::new(0.0, 0.0);
    for n in block_lo..block_lo + bm {
        let u = extended_u(n, matrices, field, bij, m, tau)?;
        for (k, c) in &table {
            full += field.char_e(k.dot(&u, field)) * c;
        }
    }
    full -= volume;
    // Regrouped: only nonzero dual vectors survive the inner block sum.
    let u_offset = extended_u(block_lo, matrices, field, bij, m, tau)?;
    let mut regrouped = Complex64::new(0.0, 0.0);
    for ord in 1..dual.member_count() {
        let k = dual.member(ord, field)?;
        let c = walsh_product(field, bij, &k, gammas, n_count, m, tau)?;
        if c.norm() > 0.0 {
            regrouped += field.char_e(k.dot(&u_offset, field)) * c * bm as f64;
        }
    }
    debug_assert!(full.im.abs() < 1e-6, "nonreal block error: {full}");
    debug_assert!(regrouped.im.abs() < 1e-6, "nonreal regrouped error: {regrouped}");
    Ok(WalshDelta { full: full.re, regrouped: regrouped.re })
}

// ======================================================================
// Class representatives and the variance identity
// ======================================================================

fn class_ordinal(u_spatial: &[Vec<crate::field::Felt>], base: u64) -> u128 {
    let mut ord = 0u128;
    let mut place = 1u128;
    for block in u_spatial {
        for e in block {
            ord += e.index() as u128 * place;
            place *= base as u128;
        }
    }
    ord
}

fn class_label(ordinal: u128, base: u64, s: usize, tau: usize) -> String {
    let mut rest = ordinal;
    let mut blocks = Vec::with_capacity(s);
    for _ in 0..s {
        let digits: Vec<String> = (0..tau)
            .map(|_| {
                let d = rest % base as u128;
                rest /= base as u128;
                d.to_string()
            })
            .collect();
        blocks.push(digits.join(","));
    }
    format!("({})", blocks.join(" | "))
}

/// For every spatial class `w in (F_b^tau)^s` finds the least block offset
/// `A in [1, a_max]` whose digit vector at `b^m A` lies in that class; the
/// time block there is always zero, so the class determines `u~_{b^m A}`
/// completely. Returns the offsets indexed by class ordinal; fails with the
/// list of unreached classes if `a_max` is too small.
pub fn find_g_w(
    matrices: &[GeneratingMatrix],
    field: &FieldSpec,
    bij: &BijectionFamily,
    m: usize,
    tau: usize,
    a_max: u64,
) -> Result<Vec<u64>> {
    let s = matrices.len();
    let b = field.order();
    let total = (b as u128)
        .checked_pow((s * tau) as u32)
        .unwrap_or(u128::MAX);
    if total > CLASS_ENUM_CAP {
        return Err(Error::EnumerationTooLarge { size: total, cap: CLASS_ENUM_CAP });
    }
    let bm = b
        .checked_pow(m as u32)
        .ok_or_else(|| Error::domain("b^m overflows"))?;
    let mut reps: Vec<Option<u64>> = vec![None; total as usize];
    let mut found = 0u128;
    for a in 1..=a_max {
        let n = bm
            .checked_mul(a)
            .ok_or_else(|| Error::domain("block start overflows"))?;
        let u = extended_u(n, matrices, field, bij, m, tau)?;
        let ord = class_ordinal(&u.spatial, b) as usize;
        if reps[ord].is_none() {
            reps[ord] = Some(a);
            found += 1;
            if found == total {
                break;
            }
        }
    }
    if found < total {
        let mut unmatched: Vec<String> = reps
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_none())
            .map(|(ord, _)| class_label(ord as u128, b, s, tau))
            .collect();
        let missing = unmatched.len();
        if missing > 8 {
            unmatched.truncate(8);
            unmatched.push(format!("... ({} more)", missing - 8));
        }
        return Err(Error::EndConditionFailed { unmatched });
    }
    Ok(reps.into_iter().map(|r| r.expect("all classes matched")).collect())
}

/// Both sides of the averaged quadratic identity.
#[derive(Debug, Clone)]
pub struct VarianceReport {
    /// `(1/b^{s tau}) sum over class representatives of |Delta_A|^2`,
    /// with each error computed by exact counting.
    pub lhs: f64,
    /// `sum over nonzero dual vectors of b^{2m} |coeff(k)|^2`.
    pub rhs: f64,
    /// The representative offsets, indexed by class ordinal.
    pub reps: Vec<u64>,
    /// Dimension of the dual space.
    pub dual_dim: usize,
}

/// Checks the averaged identity: the squared block error, averaged over
/// one block per spatial class, equals the squared coefficient mass on the
/// nonzero dual vectors.
#[allow(clippy::too_many_arguments)]
pub fn variance_sigma1(
    field: &FieldSpec,
    bij: &BijectionFamily,
    matrices: &[GeneratingMatrix],
    dual: &DualBasis,
    gammas: &[Vec<u64>],
    n_count: u64,
    m: usize,
    tau: usize,
    a_max: u64,
) -> Result<VarianceReport> {
    let s = matrices.len();
    if dual.s() != s || dual.tau() != tau || dual.m() != m {
        return Err(Error::dimension(format!(
            "dual space has shape ({}, {}, {}), expected ({s}, {tau}, {m})",
            dual.s(),
            dual.tau(),
            dual.m()
        )));
    }
    if dual.member_count() > DUAL_ENUM_CAP {
        return Err(Error::EnumerationTooLarge {
            size: dual.member_count(),
            cap: DUAL_ENUM_CAP,
        });
    }
    let b = field.order();
    let bm = b
        .checked_pow(m as u32)
        .ok_or_else(|| Error::domain("b^m overflows"))?;
    if n_count == 0 || n_count > bm {
        return Err(Error::domain(format!("count N = {n_count} outside [1, {bm}]")));
    }
    let reps = find_g_w(matrices, field, bij, m, tau, a_max)?;
    let mut lhs = 0.0f64;
    for &a in &reps {
        let lo = bm * a;
        let points: Vec<Point> = (lo..lo + n_count)
            .map(|n| digital_point(n, matrices, field, bij, tau))
            .collect::<Result<_>>()?;
        let delta = delta_direct_truncated(&points, gammas, n_count, tau)?;
        let d = delta.to_f64().ok_or_else(|| {
            Error::precision("block error does not fit in a float")
        })?;
        lhs += d * d;
    }
    lhs /= reps.len() as f64;
    let mut rhs = 0.0f64;
    let scale = (bm as f64) * (bm as f64);
    for ord in 1..dual.member_count() {
        let k = dual.member(ord, field)?;
        let c = walsh_product(field, bij, &k, gammas, n_count, m, tau)?;
        rhs += scale * c.norm_sqr();
    }
    Ok(VarianceReport { lhs, rhs, reps, dual_dim: dual.dim() })
}

// ======================================================================
// Tests
// ======================================================================
