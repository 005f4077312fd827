//! Bounded-remainder experiments: exact discrepancy counting against
//! b-adic boxes, star discrepancy of small point sets, growth profiling of
//! the counting error over base-b ranges, and the digit scaffolding
//! (carry-free positions, spaced positions) used by the lower-bound
//! construction.
//!
//! Box edges are exact rationals given by their digit expansions, either
//! finite or eventually periodic, so every membership test and every
//! volume is exact; a membership question that the stored point digits
//! cannot settle surfaces as a precision error instead of a guess. The
//! only floats in this module are none at all.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::generate::KroneckerSystem;
use crate::net::kappa_system;
use crate::points::Point;

/// Cap on profile scan length.
pub const PROFILE_NMAX_CAP: u64 = 1 << 20;

/// Caps for the exhaustive star-discrepancy search.
pub const STAR_DISC_N_CAP: usize = 1 << 12;
pub const STAR_DISC_S_CAP: usize = 2;

// ======================================================================
// Box edges
// ======================================================================

/// One box edge in (0, 1] given by its base-b digit expansion: a finite
/// prefix of digits, optionally followed by a repeating block. The value
/// is an exact rational; the all-(b-1) repeating tail represents 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactGamma {
    base: u64,
    pre: Vec<u64>,
    period: Vec<u64>,
}

impl ExactGamma {
    /// An edge with a finite expansion `0.d_1 d_2 ... d_k`.
    pub fn finite(base: u64, digits: Vec<u64>) -> Result<ExactGamma> {
        ExactGamma::periodic(base, digits, Vec::new())
    }

    /// An edge `0.d_1 ... d_k (p_1 ... p_l)` with a repeating tail. An
    /// all-zero period is normalized away (it is a finite expansion).
    pub fn periodic(base: u64, pre: Vec<u64>, period: Vec<u64>) -> Result<ExactGamma> {
        if base < 2 {
            return Err(Error::domain("base must be at least 2"));
        }
        for &d in pre.iter().chain(&period) {
            if d >= base {
                return Err(Error::domain(format!("digit {d} out of range for base {base}")));
            }
        }
        let period = if period.iter().all(|&d| d == 0) { Vec::new() } else { period };
        if pre.iter().all(|&d| d == 0) && period.is_empty() {
            return Err(Error::domain("box edge must be positive"));
        }
        Ok(ExactGamma { base, pre, period })
    }

    /// Parses digit strings as accepted by the point formatter: contiguous
    /// digits for bases up to 10, dash-separated above. An optional "0."
    /// prefix on the finite part is allowed.
    pub fn parse(base: u64, digits: &str, periodic: Option<&str>) -> Result<ExactGamma> {
        let digits = digits.strip_prefix("0.").unwrap_or(digits);
        let pre = if digits.is_empty() {
            Vec::new()
        } else {
            Point::parse_digit_string(base, digits)?
        };
        let period = match periodic {
            Some(p) if !p.is_empty() => Point::parse_digit_string(base, p)?,
            _ => Vec::new(),
        };
        ExactGamma::periodic(base, pre, period)
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    /// True when all digits beyond some index are zero.
    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    /// Digit at 1-based position j (periodic continuation, zeros beyond a
    /// finite expansion).
    pub fn digit(&self, j: usize) -> u64 {
        debug_assert!(j >= 1);
        if j <= self.pre.len() {
            self.pre[j - 1]
        } else if self.period.is_empty() {
            0
        } else {
            self.period[(j - self.pre.len() - 1) % self.period.len()]
        }
    }

    /// True when some digit strictly beyond position j is nonzero.
    fn nonzero_beyond(&self, j: usize) -> bool {
        if !self.period.is_empty() {
            // A normalized period has a nonzero digit repeating forever.
            return true;
        }
        self.pre.iter().skip(j).any(|&d| d != 0)
    }

    /// True when every digit strictly beyond position j equals b-1, so the
    /// value from position j on is exactly b^{-j}.
    fn top_beyond(&self, j: usize) -> bool {
        let top = self.base - 1;
        !self.period.is_empty()
            && self.pre.iter().skip(j).all(|&d| d == top)
            && self.period.iter().all(|&d| d == top)
    }

    /// The exact value.
    pub fn value(&self) -> BigRational {
        let b = BigInt::from(self.base);
        let mut pre_num = BigInt::zero();
        for &d in &self.pre {
            pre_num = pre_num * &b + BigInt::from(d);
        }
        let pre_den = b.pow(self.pre.len() as u32);
        if self.period.is_empty() {
            return BigRational::new(pre_num, pre_den);
        }
        let mut per_num = BigInt::zero();
        for &d in &self.period {
            per_num = per_num * &b + BigInt::from(d);
        }
        let per_den = b.pow(self.period.len() as u32) - BigInt::one();
        BigRational::new(pre_num * &per_den + per_num, pre_den * per_den)
    }

    /// First `depth` digits as a vector.
    pub fn truncated(&self, depth: usize) -> Vec<u64> {
        (1..=depth).map(|j| self.digit(j)).collect()
    }

    /// Digit-string form, with the repeating block in parentheses.
    pub fn digit_string(&self) -> String {
        let fmt = |ds: &[u64]| -> String {
            if self.base <= 10 {
                ds.iter().map(u64::to_string).collect()
            } else {
                ds.iter().map(u64::to_string).collect::<Vec<_>>().join("-")
            }
        };
        if self.period.is_empty() {
            format!("0.{}", fmt(&self.pre))
        } else {
            format!("0.{}({})", fmt(&self.pre), fmt(&self.period))
        }
    }
}

/// An anchored box `[0, gamma_1) x ... x [0, gamma_s)` with exact edges.
#[derive(Debug, Clone)]
pub struct BoxSpec {
    gammas: Vec<ExactGamma>,
}

impl BoxSpec {
    pub fn new(gammas: Vec<ExactGamma>) -> Result<BoxSpec> {
        if gammas.is_empty() {
            return Err(Error::dimension("box needs at least one edge"));
        }
        let base = gammas[0].base();
        if gammas.iter().any(|g| g.base() != base) {
            return Err(Error::domain("box edges must share one base"));
        }
        Ok(BoxSpec { gammas })
    }

    pub fn dim(&self) -> usize {
        self.gammas.len()
    }

    pub fn base(&self) -> u64 {
        self.gammas[0].base()
    }

    pub fn edges(&self) -> &[ExactGamma] {
        &self.gammas
    }

    /// True when every edge has a finite expansion.
    pub fn is_finite(&self) -> bool {
        self.gammas.iter().all(ExactGamma::is_finite)
    }

    /// Exact volume.
    pub fn volume(&self) -> BigRational {
        self.gammas.iter().map(ExactGamma::value).product()
    }
}

// ======================================================================
// Exact counting
// ======================================================================

/// Decides `x < gamma` for one coordinate, treating the stored digits as a
/// truncation: the underlying value lies in `[v, v + b^{-P})` where `v` is
/// the stored truncation. The first position where the point and edge
/// digits differ settles the question for every value in that interval.
/// On full agreement to depth P, the edge's tail decides: all zeros means
/// the edge equals `v` (outside), an all-(b-1) tail means the edge equals
/// `v + b^{-P}` (inside), and anything in between is genuinely undecidable
/// at this precision.
fn coord_inside(digits: &[u64], gamma: &ExactGamma) -> Result<bool> {
    for (pos, &d) in digits.iter().enumerate() {
        let g = gamma.digit(pos + 1);
        if d != g {
            return Ok(d < g);
        }
    }
    if !gamma.nonzero_beyond(digits.len()) {
        return Ok(false);
    }
    if gamma.top_beyond(digits.len()) {
        return Ok(true);
    }
    Err(Error::precision(format!(
        "point matches the box edge {} through all {} stored digits",
        gamma.digit_string(),
        digits.len()
    )))
}

fn point_inside(p: &Point, box_spec: &BoxSpec) -> Result<bool> {
    if p.dim() != box_spec.dim() {
        return Err(Error::dimension(format!(
            "point has {} coordinates, box has {}",
            p.dim(),
            box_spec.dim()
        )));
    }
    if p.base() != box_spec.base() {
        return Err(Error::domain("point and box bases differ"));
    }
    for i in 0..p.dim() {
        if !coord_inside(p.digits(i), &box_spec.gammas[i])? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact counting error of the first `n_count` points against the box:
/// `#inside - n_count * volume`.
pub fn delta_count(
    box_spec: &BoxSpec,
    points: &[Point],
    n_count: u64,
) -> Result<BigRational> {
    if n_count == 0 {
        return Ok(BigRational::zero());
    }
    if points.len() < n_count as usize {
        return Err(Error::domain(format!(
            "need {n_count} points, got {}",
            points.len()
        )));
    }
    let mut count = 0u64;
    for p in points.iter().take(n_count as usize) {
        if point_inside(p, box_spec)? {
            count += 1;
        }
    }
    Ok(BigRational::from_integer(BigInt::from(count))
        - BigRational::from_integer(BigInt::from(n_count)) * box_spec.volume())
}

// ======================================================================
// Star discrepancy
// ======================================================================

/// Exact star discrepancy of the stored digit truncations by enumerating
/// critical corners: per coordinate the point values plus 1, scoring each
/// corner with both closed counting (boundary points in) and open counting
/// (boundary points out). Cost grows like N^{s+1}, hence the hard caps.
pub fn star_discrepancy_exhaustive(points: &[Point]) -> Result<BigRational> {
    let n = points.len();
    if n == 0 {
        return Err(Error::domain("empty point set has no discrepancy"));
    }
    if n > STAR_DISC_N_CAP {
        return Err(Error::EnumerationTooLarge {
            size: n as u128,
            cap: STAR_DISC_N_CAP as u128,
        });
    }
    let s = points[0].dim();
    if s > STAR_DISC_S_CAP {
        return Err(Error::EnumerationTooLarge {
            size: s as u128,
            cap: STAR_DISC_S_CAP as u128,
        });
    }
    let base = points[0].base();
    let prec = points[0].precision();
    for p in points {
        if p.dim() != s || p.base() != base || p.precision() != prec {
            return Err(Error::dimension(
                "points must share dimension, base, and precision".to_string(),
            ));
        }
    }
    let scale = (base as i128)
        .checked_pow(prec as u32)
        .ok_or_else(|| Error::precision("precision too large for exact corner scores"))?;
    // Coordinate values as integer numerators over base^prec.
    let coord_num = |p: &Point, i: usize| -> i128 {
        let mut v = 0i128;
        for &d in p.digits(i) {
            v = v * base as i128 + d as i128;
        }
        v
    };
    let best = match s {
        1 => {
            let mut xs: Vec<i128> = points.iter().map(|p| coord_num(p, 0)).collect();
            xs.sort_unstable();
            let mut cands: Vec<i128> = xs.clone();
            cands.push(scale);
            cands.dedup();
            let mut best = 0i128;
            for &t in &cands {
                let c_le = xs.partition_point(|&x| x <= t) as i128;
                let c_lt = xs.partition_point(|&x| x < t) as i128;
                // Scores over the common denominator n * scale.
                best = best.max(c_le * scale - n as i128 * t);
                best = best.max(n as i128 * t - c_lt * scale);
            }
            BigRational::new(BigInt::from(best), BigInt::from(n as i128) * BigInt::from(scale))
        }
        _ => {
            let scale2 = scale
                .checked_mul(scale)
                .ok_or_else(|| Error::precision("precision too large for exact corner scores"))?;
            let mut pts: Vec<(i128, i128)> = points
                .iter()
                .map(|p| (coord_num(p, 0), coord_num(p, 1)))
                .collect();
            pts.sort_unstable();
            let mut cands1: Vec<i128> = pts.iter().map(|&(x, _)| x).collect();
            cands1.push(scale);
            cands1.dedup();
            let mut cands2: Vec<i128> = pts.iter().map(|&(_, y)| y).collect();
            cands2.sort_unstable();
            cands2.push(scale);
            cands2.dedup();
            let mut best = 0i128;
            // Sweep the first coordinate, maintaining the second coordinates
            // of the points below the corner (closed and open separately).
            let mut closed_ys: Vec<i128> = Vec::with_capacity(n);
            let mut open_ys: Vec<i128> = Vec::with_capacity(n);
            let mut idx_closed = 0usize;
            let mut idx_open = 0usize;
            for &t1 in &cands1 {
                while idx_closed < n && pts[idx_closed].0 <= t1 {
                    let y = pts[idx_closed].1;
                    let at = closed_ys.partition_point(|&v| v <= y);
                    closed_ys.insert(at, y);
                    idx_closed += 1;
                }
                while idx_open < n && pts[idx_open].0 < t1 {
                    let y = pts[idx_open].1;
                    let at = open_ys.partition_point(|&v| v <= y);
                    open_ys.insert(at, y);
                    idx_open += 1;
                }
                for &t2 in &cands2 {
                    let lam = t1
                        .checked_mul(t2)
                        .ok_or_else(|| Error::precision("corner volume overflows"))?;
                    let c_le = closed_ys.partition_point(|&y| y <= t2) as i128;
                    let c_lt = open_ys.partition_point(|&y| y < t2) as i128;
                    best = best.max(c_le * scale2 - n as i128 * lam);
                    best = best.max(n as i128 * lam - c_lt * scale2);
                }
            }
            BigRational::new(
                BigInt::from(best),
                BigInt::from(n as i128) * BigInt::from(scale2),
            )
        }
    };
    Ok(best)
}

// ======================================================================
// Growth profile
// ======================================================================

/// Heuristic reading of a growth profile; labeled as such everywhere it is
/// printed. With fewer than two complete ranges no stabilization evidence
/// exists and the verdict defaults to growth-consistent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileVerdict {
    BoundedConsistent,
    GrowthConsistent,
}

/// Largest |counting error| over one base-b range of prefix lengths.
#[derive(Debug, Clone)]
pub struct RangeSup {
    /// Range of N: `lo..hi`.
    pub lo: u64,
    pub hi: u64,
    /// False when the scan limit cut the range short.
    pub complete: bool,
    /// sup of |Delta| over the range, exact.
    pub sup: BigRational,
    /// Smallest N in the range attaining the sup.
    pub argmax: u64,
    /// sup of |Delta| over all N < hi, exact; nondecreasing down the rows.
    pub cumulative: BigRational,
}

/// Per-range counting-error sups for one box along the sequence.
#[derive(Debug, Clone)]
pub struct GrowthProfile {
    pub rows: Vec<RangeSup>,
    pub verdict: ProfileVerdict,
}

impl GrowthProfile {
    /// Rows whose range was fully scanned.
    pub fn complete_rows(&self) -> impl Iterator<Item = &RangeSup> {
        self.rows.iter().filter(|r| r.complete)
    }
}

fn verdict_from_rows(rows: &[RangeSup]) -> ProfileVerdict {
    let complete: Vec<&RangeSup> = rows.iter().filter(|r| r.complete).collect();
    if complete.len() >= 2 && complete[complete.len() - 1].sup == complete[complete.len() - 2].sup
    {
        ProfileVerdict::BoundedConsistent
    } else {
        ProfileVerdict::GrowthConsistent
    }
}

/// Computes membership flags for indices `lo..hi` (parallel-friendly unit
/// of work).
fn membership_chunk(
    sys: &KroneckerSystem,
    box_spec: &BoxSpec,
    lo: u64,
    hi: u64,
    prec: usize,
) -> Result<Vec<bool>> {
    (lo..hi)
        .map(|n| point_inside(&sys.point(n, prec)?, box_spec))
        .collect()
}

/// Scans prefix lengths `N = 1..=n_max` of the sequence and records the
/// sup of the exact counting error over each base-b range
/// `[b^j, b^{j+1})`, plus the running (cumulative) sup. Points are
/// generated in chunks of `b^block_m` indices; with `threads > 1` the
/// chunks are evaluated concurrently and merged in index order, so the
/// result is independent of the thread count.
pub fn brs_profile(
    sys: &KroneckerSystem,
    box_spec: &BoxSpec,
    n_max: u64,
    block_m: usize,
    prec: usize,
    threads: usize,
) -> Result<GrowthProfile> {
    if n_max > PROFILE_NMAX_CAP {
        return Err(Error::EnumerationTooLarge {
            size: n_max as u128,
            cap: PROFILE_NMAX_CAP as u128,
        });
    }
    if n_max == 0 {
        return Ok(GrowthProfile { rows: Vec::new(), verdict: ProfileVerdict::GrowthConsistent });
    }
    let base = sys.field().order();
    if base != box_spec.base() {
        return Err(Error::domain("system and box bases differ"));
    }
    let threads = threads.max(1);
    let chunk = base
        .checked_pow(block_m as u32)
        .ok_or_else(|| Error::domain("block size overflows"))?
        .max(1);
    let n_chunks = n_max.div_ceil(chunk) as usize;
    let mut inside: Vec<Option<Vec<bool>>> = vec![None; n_chunks];
    if threads == 1 || n_chunks == 1 {
        for (c, slot) in inside.iter_mut().enumerate() {
            let lo = c as u64 * chunk;
            *slot = Some(membership_chunk(sys, box_spec, lo, (lo + chunk).min(n_max), prec)?);
        }
    } else {
        let next = std::sync::atomic::AtomicUsize::new(0);
        let results = std::sync::Mutex::new(vec![None; n_chunks]);
        std::thread::scope(|scope| {
            for _ in 0..threads.min(n_chunks) {
                scope.spawn(|| loop {
                    let c = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if c >= n_chunks {
                        break;
                    }
                    let lo = c as u64 * chunk;
                    let r = membership_chunk(sys, box_spec, lo, (lo + chunk).min(n_max), prec);
                    results.lock().expect("poisoned")[c] = Some(r);
                });
            }
        });
        let collected = results.into_inner().expect("poisoned");
        for (c, r) in collected.into_iter().enumerate() {
            inside[c] = Some(r.expect("all chunks scheduled")?);
        }
    }
    // Sequential scan with exact integer numerators over the volume
    // denominator: Delta_N = (count * vd - N * vn) / vd.
    let vol = box_spec.volume();
    let (vn, vd) = (vol.numer().clone(), vol.denom().clone());
    let mut rows: Vec<RangeSup> = Vec::new();
    let mut lo = 1u64;
    let mut count = BigInt::zero();
    let mut cum_max = BigInt::zero();
    let mut n = 1u64;
    'ranges: loop {
        let hi_full = match lo.checked_mul(base) {
            Some(h) => h,
            None => break 'ranges,
        };
        let hi = hi_full.min(n_max + 1);
        if lo > n_max {
            break;
        }
        let mut range_max = BigInt::from(-1i32);
        let mut argmax = lo;
        while n < hi {
            let c = n - 1;
            if inside[(c / chunk) as usize].as_ref().expect("filled")[(c % chunk) as usize] {
                count += 1;
            }
            let num = (&count * &vd - BigInt::from(n) * &vn).abs();
            if num > range_max {
                range_max = num.clone();
                argmax = n;
            }
            if num > cum_max {
                cum_max = num;
            }
            n += 1;
        }
        rows.push(RangeSup {
            lo,
            hi,
            complete: hi == hi_full,
            sup: BigRational::new(range_max, vd.clone()),
            argmax,
            cumulative: BigRational::new(cum_max.clone(), vd.clone()),
        });
        if hi > n_max {
            break;
        }
        lo = hi_full;
    }
    let verdict = verdict_from_rows(&rows);
    Ok(GrowthProfile { rows, verdict })
}

// ======================================================================
// Digit scaffolding for the lower-bound construction
// ======================================================================

/// Positions `j` in `1..=depth` whose digit is a middle digit (1..=b-2),
/// or is b-1 followed by a zero digit.
pub fn carry_free_positions(gamma: &ExactGamma, depth: usize) -> Vec<u64> {
    let b = gamma.base();
    (1..=depth)
        .filter(|&j| {
            let d = gamma.digit(j);
            (1..b - 1).contains(&d) || (d == b - 1 && gamma.digit(j + 1) == 0)
        })
        .map(|j| j as u64)
        .collect()
}

/// Greedy selection from an ascending position list with a minimum gap:
/// the first position, then repeatedly the least position at distance at
/// least `gap` from the previous pick. Stops when the list is exhausted or
/// `max_count` positions are chosen.
pub fn spaced_positions(w: &[u64], gap: u64, max_count: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut cursor: Option<u64> = None;
    for &pos in w {
        if out.len() == max_count {
            break;
        }
        if cursor.is_none_or(|c| pos >= c + gap) {
            out.push(pos);
            cursor = Some(pos);
        }
    }
    out
}

// ======================================================================
// Dichotomy experiment
// ======================================================================

/// Outcome of profiling a finite-expansion box against an
/// infinite-expansion box along the same sequence.
#[derive(Debug, Clone)]
pub struct DichotomyReport {
    pub finite: GrowthProfile,
    pub infinite: GrowthProfile,
    /// Block exponent at which weak admissibility was verified.
    pub check_m: u32,
    /// kappa at that depth, as the exponent e with kappa = b^{-e}.
    pub kappa_exponent: u32,
    /// Heuristic verdict: finite profile stabilized and infinite profile
    /// grew by at least 1.
    pub passed: bool,
}

/// Runs the two-sided experiment: the finite-edge box should show a
/// stabilizing counting error (last two complete range sups equal), the
/// infinite-edge box a growing one (last complete range sup at least the
/// first plus 1). Requires enough complete ranges for the comparison to
/// mean anything, and weak admissibility of the system at a sample depth.
pub fn dichotomy_report(
    sys: &KroneckerSystem,
    finite_box: &BoxSpec,
    infinite_box: &BoxSpec,
    n_max: u64,
    block_m: usize,
    prec: usize,
    threads: usize,
) -> Result<DichotomyReport> {
    if !finite_box.is_finite() {
        return Err(Error::validation(
            "the first box must have finite-expansion edges".to_string(),
        ));
    }
    if infinite_box.is_finite() {
        return Err(Error::validation(
            "the second box must have an infinite-expansion edge".to_string(),
        ));
    }
    let base = sys.field().order();
    // Complete ranges available below n_max: [b^j, b^{j+1}) needs
    // b^{j+1} <= n_max + 1.
    let mut complete_ranges = 0u32;
    let mut edge = 1u64;
    while let Some(next) = edge.checked_mul(base) {
        if next > n_max + 1 {
            break;
        }
        complete_ranges += 1;
        edge = next;
    }
    if complete_ranges < 8 {
        return Err(Error::Inconclusive(format!(
            "{complete_ranges} complete ranges below N = {n_max}; need at least 8 \
             to compare first and last"
        )));
    }
    let check_m = complete_ranges.min(8);
    let adm = kappa_system(sys, check_m)?;
    let kappa_exponent = adm.truncation_depth()?;
    let finite = brs_profile(sys, finite_box, n_max, block_m, prec, threads)?;
    let infinite = brs_profile(sys, infinite_box, n_max, block_m, prec, threads)?;
    let stabilized = finite.verdict == ProfileVerdict::BoundedConsistent;
    let grew = {
        let complete: Vec<&RangeSup> = infinite.complete_rows().collect();
        let one = BigRational::from_integer(BigInt::one());
        complete.first().zip(complete.last()).is_some_and(|(first, last)| {
            last.sup >= first.sup.clone() + one
        })
    };
    Ok(DichotomyReport {
        finite,
        infinite,
        check_m,
        kappa_exponent,
        passed: stabilized && grew,
    })
}

// ======================================================================
// Tests
// ======================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{BijectionFamily, FieldSpec};
    use crate::generate::{digital_point, GeneratingMatrix};
    use crate::laurent::LaurentSeries;

    fn f2() -> FieldSpec {
        FieldSpec::for_base(2).unwrap()
    }

    fn quadratic_system(prec: usize) -> KroneckerSystem {
        let f = f2();
        let l = LaurentSeries::quadratic_fixture(&f, prec).unwrap();
        KroneckerSystem::new(f, BijectionFamily::identity(), vec![l]).unwrap()
    }

    /// First `count` points of the base-b radical-inverse sequence at the
    /// given precision (digital construction with the identity matrix).
    fn radical_inverse_points(base: u64, count: u64, prec: usize) -> Vec<Point> {
        let f = FieldSpec::for_base(base).unwrap();
        let bij = BijectionFamily::identity();
        let digits = (64 - count.leading_zeros()).max(1) as usize;
        let id = GeneratingMatrix::identity(&f, prec.max(digits));
        (0..count)
            .map(|n| digital_point(n, std::slice::from_ref(&id), &f, &bij, prec).unwrap())
            .collect()
    }

    fn one_half() -> BigRational {
        BigRational::new(BigInt::from(1), BigInt::from(2))
    }

    #[test]
    fn gamma_values_exact() {
        // 0.11 in base 2 is 3/4.
        let g = ExactGamma::finite(2, vec![1, 1]).unwrap();
        assert_eq!(g.value(), BigRational::new(BigInt::from(3), BigInt::from(4)));
        assert!(g.is_finite());
        // 0.(01) in base 2 is 1/3.
        let third = ExactGamma::periodic(2, vec![], vec![0, 1]).unwrap();
        assert_eq!(third.value(), BigRational::new(BigInt::from(1), BigInt::from(3)));
        assert!(!third.is_finite());
        let d: Vec<u64> = (1..=6).map(|j| third.digit(j)).collect();
        assert_eq!(d, vec![0, 1, 0, 1, 0, 1]);
        // All-ones tail is exactly 1 (the full box edge).
        let full = ExactGamma::periodic(2, vec![], vec![1]).unwrap();
        assert_eq!(full.value(), BigRational::from_integer(BigInt::one()));
        // 0.1(10) in base 3: 1/3 + (3/8)·(1/3) = 11/24.
        let g = ExactGamma::periodic(3, vec![1], vec![1, 0]).unwrap();
        assert_eq!(g.value(), BigRational::new(BigInt::from(11), BigInt::from(24)));
    }

    #[test]
    fn gamma_validation_and_parsing() {
        assert!(ExactGamma::finite(2, vec![0, 0]).is_err());
        assert!(ExactGamma::finite(2, vec![2]).is_err());
        assert!(ExactGamma::periodic(2, vec![], vec![0]).is_err()); // zero value
        // All-zero period normalizes to a finite expansion.
        let g = ExactGamma::periodic(2, vec![1], vec![0, 0]).unwrap();
        assert!(g.is_finite());
        let g = ExactGamma::parse(2, "0.11", None).unwrap();
        assert_eq!(g.value(), BigRational::new(BigInt::from(3), BigInt::from(4)));
        let g = ExactGamma::parse(2, "", Some("01")).unwrap();
        assert_eq!(g.value(), BigRational::new(BigInt::from(1), BigInt::from(3)));
        assert_eq!(g.digit_string(), "0.(01)");
    }

    #[test]
    fn delta_count_radical_inverse_half() {
        // First 4 base-2 radical-inverse points {0, 1/2, 1/4, 3/4} against
        // [0, 1/2): two inside, so Delta = 2 - 4*(1/2) = 0.
        let points = radical_inverse_points(2, 4, 8);
        let box_spec =
            BoxSpec::new(vec![ExactGamma::finite(2, vec![1]).unwrap()]).unwrap();
        assert_eq!(delta_count(&box_spec, &points, 4).unwrap(), BigRational::zero());
        // Intermediate prefixes: N = 1 gives 1 - 1/2 = 1/2.
        assert_eq!(delta_count(&box_spec, &points, 1).unwrap(), one_half());
        // Empty prefix is 0 without touching the points.
        assert_eq!(delta_count(&box_spec, &[], 0).unwrap(), BigRational::zero());
    }

    #[test]
    fn delta_count_full_box_is_zero() {
        let points = radical_inverse_points(2, 16, 8);
        let full =
            BoxSpec::new(vec![ExactGamma::periodic(2, vec![], vec![1]).unwrap()]).unwrap();
        for n in [1u64, 5, 16] {
            assert_eq!(delta_count(&full, &points, n).unwrap(), BigRational::zero());
        }
    }

    #[test]
    fn delta_count_telescopes() {
        let sys = quadratic_system(32);
        let points: Vec<Point> = (0..48).map(|n| sys.point(n, 16).unwrap()).collect();
        let box_spec =
            BoxSpec::new(vec![ExactGamma::finite(2, vec![1, 0, 1]).unwrap()]).unwrap();
        for n1 in [1u64, 7, 16] {
            for n2 in [1u64, 9, 32] {
                let whole = delta_count(&box_spec, &points, n1 + n2).unwrap();
                let first = delta_count(&box_spec, &points, n1).unwrap();
                let second =
                    delta_count(&box_spec, &points[n1 as usize..], n2).unwrap();
                assert_eq!(whole, first + second);
            }
        }
    }

    #[test]
    fn delta_count_net_block_elementary_interval() {
        // A (0,m,1)-net block puts exactly one point in each elementary
        // interval of length b^-m, so the error vanishes at N = b^m.
        let m = 4usize;
        let points = radical_inverse_points(2, 16, m);
        let mut digits = vec![0u64; m];
        digits[m - 1] = 1;
        let box_spec = BoxSpec::new(vec![ExactGamma::finite(2, digits).unwrap()]).unwrap();
        assert_eq!(delta_count(&box_spec, &points, 16).unwrap(), BigRational::zero());
    }

    #[test]
    fn membership_is_a_precision_question_at_the_edge() {
        // Point digits [1, 0] match gamma = 0.101 through depth 2, and the
        // edge continues: undecidable.
        let p = Point::new(2, vec![vec![1, 0]]).unwrap();
        let g = ExactGamma::finite(2, vec![1, 0, 1]).unwrap();
        let box_spec = BoxSpec::new(vec![g]).unwrap();
        assert!(matches!(
            delta_count(&box_spec, std::slice::from_ref(&p), 1),
            Err(Error::Precision(_))
        ));
        // Same digits against gamma = 0.10 exactly: decidable (outside).
        let g = ExactGamma::finite(2, vec![1, 0]).unwrap();
        let box_spec = BoxSpec::new(vec![g]).unwrap();
        assert_eq!(
            delta_count(&box_spec, std::slice::from_ref(&p), 1).unwrap(),
            BigRational::zero() - one_half()
        );
    }

    #[test]
    fn membership_matches_rational_oracle() {
        // Digitwise decision agrees with exact interval comparison:
        // inside iff (num+1)/b^P <= gamma, outside iff num/b^P >= gamma.
        let bases = [2u64, 3];
        for base in bases {
            let edges = [
                ExactGamma::finite(base, vec![1]).unwrap(),
                ExactGamma::periodic(base, vec![0], vec![0, 1]).unwrap(),
                ExactGamma::periodic(base, vec![], vec![base - 1]).unwrap(),
            ];
            let prec = 5usize;
            let total = base.pow(prec as u32);
            for g in &edges {
                let gv = g.value();
                let box_spec = BoxSpec::new(vec![g.clone()]).unwrap();
                for num in 0..total {
                    let digits = {
                        let mut ds = vec![0u64; prec];
                        let mut rest = num;
                        for j in (0..prec).rev() {
                            ds[j] = rest % base;
                            rest /= base;
                        }
                        ds
                    };
                    let p = Point::new(base, vec![digits]).unwrap();
                    let lowv = BigRational::new(
                        BigInt::from(num),
                        BigInt::from(total),
                    );
                    let highv = BigRational::new(
                        BigInt::from(num + 1),
                        BigInt::from(total),
                    );
                    match point_inside(&p, &box_spec) {
                        Ok(true) => assert!(highv <= gv, "base {base} num {num}"),
                        Ok(false) => assert!(lowv >= gv, "base {base} num {num}"),
                        Err(_) => assert!(lowv < gv && gv < highv, "base {base} num {num}"),
                    }
                }
            }
        }
    }

    #[test]
    fn star_discrepancy_hand_cases() {
        // Single point at 0.
        let p = Point::new(2, vec![vec![0, 0]]).unwrap();
        assert_eq!(
            star_discrepancy_exhaustive(&[p]).unwrap(),
            BigRational::from_integer(BigInt::one())
        );
        // {0, 1/2}.
        let pts = vec![
            Point::new(2, vec![vec![0, 0]]).unwrap(),
            Point::new(2, vec![vec![1, 0]]).unwrap(),
        ];
        assert_eq!(star_discrepancy_exhaustive(&pts).unwrap(), one_half());
        // Two-coordinate case {(0,0), (1/2,1/2)}: worst corner just above
        // (1/2, 1/2) closed gives 2/2 - 1/4 = 3/4.
        let pts = vec![
            Point::new(2, vec![vec![0], vec![0]]).unwrap(),
            Point::new(2, vec![vec![1], vec![1]]).unwrap(),
        ];
        assert_eq!(
            star_discrepancy_exhaustive(&pts).unwrap(),
            BigRational::new(BigInt::from(3), BigInt::from(4))
        );
    }

    #[test]
    fn star_discrepancy_radical_inverse_envelope() {
        // Classical envelope for the base-2 radical-inverse sequence:
        // D*(2^k points) <= (k+2) / 2^{k+1}.
        for k in 1..=6u32 {
            let points = radical_inverse_points(2, 1 << k, 16);
            let d = star_discrepancy_exhaustive(&points).unwrap();
            let envelope = BigRational::new(BigInt::from(k + 2), BigInt::from(1u64 << (k + 1)));
            assert!(d <= envelope, "k = {k}: {d} > {envelope}");
            assert!(d > BigRational::zero());
        }
    }

    #[test]
    fn star_discrepancy_caps() {
        let points = radical_inverse_points(2, (STAR_DISC_N_CAP + 1) as u64, 4);
        assert!(matches!(
            star_discrepancy_exhaustive(&points),
            Err(Error::EnumerationTooLarge { .. })
        ));
        let p = Point::new(2, vec![vec![0], vec![0], vec![0]]).unwrap();
        assert!(matches!(
            star_discrepancy_exhaustive(&[p]),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn carry_free_positions_examples() {
        // 1/3 in base 2: ones at even positions, each followed by zero.
        let third = ExactGamma::periodic(2, vec![], vec![0, 1]).unwrap();
        assert_eq!(carry_free_positions(&third, 9), vec![2, 4, 6, 8]);
        // 0.11: position 1 has successor 1, position 2 has successor 0.
        let g = ExactGamma::finite(2, vec![1, 1]).unwrap();
        assert_eq!(carry_free_positions(&g, 6), vec![2]);
        // Base 5: middle digits qualify regardless of the successor; the
        // top digit 4 needs a zero after it.
        let g = ExactGamma::finite(5, vec![1, 3, 4, 4]).unwrap();
        assert_eq!(carry_free_positions(&g, 4), vec![1, 2, 4]);
    }

    #[test]
    fn spaced_positions_examples() {
        let w: Vec<u64> = (1..=10).map(|k| 2 * k).collect();
        assert_eq!(spaced_positions(&w, 4, 4), vec![2, 6, 10, 14]);
        assert_eq!(spaced_positions(&w, 1, usize::MAX), w);
        assert_eq!(spaced_positions(&w[..3], 4, 10), vec![2, 6]);
        assert_eq!(spaced_positions(&[], 4, 10), Vec::<u64>::new());
    }

    #[test]
    fn profile_empty_and_caps() {
        let sys = quadratic_system(40);
        let box_spec =
            BoxSpec::new(vec![ExactGamma::finite(2, vec![1, 1]).unwrap()]).unwrap();
        let p = brs_profile(&sys, &box_spec, 0, 4, 16, 1).unwrap();
        assert!(p.rows.is_empty());
        assert!(matches!(
            brs_profile(&sys, &box_spec, PROFILE_NMAX_CAP + 1, 4, 16, 1),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn profile_rows_and_cumulative_monotonicity() {
        let sys = quadratic_system(48);
        let box_spec =
            BoxSpec::new(vec![ExactGamma::finite(2, vec![1, 1]).unwrap()]).unwrap();
        let p = brs_profile(&sys, &box_spec, 1 << 10, 4, 24, 1).unwrap();
        // Ranges [1,2), [2,4), ..., [512,1024), then the single N = 1024.
        assert_eq!(p.rows.len(), 11);
        assert!(p.rows[..10].iter().all(|r| r.complete));
        assert!(!p.rows[10].complete);
        for w in p.rows.windows(2) {
            assert!(w[1].cumulative >= w[0].cumulative);
            assert_eq!(w[1].lo, w[0].hi);
        }
        for r in &p.rows {
            assert!(r.sup <= r.cumulative);
            assert!((r.lo..r.hi).contains(&r.argmax));
        }
    }

    #[test]
    fn profile_thread_count_invariance() {
        let sys = quadratic_system(48);
        let box_spec =
            BoxSpec::new(vec![ExactGamma::periodic(2, vec![], vec![0, 1]).unwrap()])
                .unwrap();
        let p1 = brs_profile(&sys, &box_spec, 700, 4, 24, 1).unwrap();
        let p4 = brs_profile(&sys, &box_spec, 700, 4, 24, 4).unwrap();
        assert_eq!(p1.rows.len(), p4.rows.len());
        for (a, b) in p1.rows.iter().zip(&p4.rows) {
            assert_eq!((a.lo, a.hi, a.complete, &a.sup, a.argmax), (b.lo, b.hi, b.complete, &b.sup, b.argmax));
        }
        assert_eq!(p1.verdict, p4.verdict);
    }

    #[test]
    fn dichotomy_guards() {
        let sys = quadratic_system(48);
        let finite =
            BoxSpec::new(vec![ExactGamma::finite(2, vec![1, 1]).unwrap()]).unwrap();
        let infinite =
            BoxSpec::new(vec![ExactGamma::periodic(2, vec![], vec![0, 1]).unwrap()])
                .unwrap();
        // Swapped kinds are input misuse.
        assert!(matches!(
            dichotomy_report(&sys, &infinite, &finite, 1 << 12, 4, 24, 1),
            Err(Error::Validation(_))
        ));
        // Too few ranges to say anything.
        assert!(matches!(
            dichotomy_report(&sys, &finite, &infinite, 16, 4, 24, 1),
            Err(Error::Inconclusive(_))
        ));
    }

    #[test]
    fn dichotomy_fixture_passes_at_moderate_length() {
        let sys = quadratic_system(64);
        let finite =
            BoxSpec::new(vec![ExactGamma::finite(2, vec![1, 1]).unwrap()]).unwrap();
        let infinite =
            BoxSpec::new(vec![ExactGamma::periodic(2, vec![], vec![0, 1]).unwrap()])
                .unwrap();
        let report =
            dichotomy_report(&sys, &finite, &infinite, 1 << 12, 6, 32, 2).unwrap();
        assert_eq!(report.check_m, 8);
        assert!(report.kappa_exponent >= 8);
        assert_eq!(report.finite.verdict, ProfileVerdict::BoundedConsistent);
        assert_eq!(report.infinite.verdict, ProfileVerdict::GrowthConsistent);
        assert!(report.passed, "finite sup rows: {:?}", report.finite.rows.last());
    }
}
