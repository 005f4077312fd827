//! The dual space of a digital block: the frequency vectors whose block
//! character sum is `b^m` rather than 0.
//!
//! A frequency vector `k` pairs to zero with every extended digit vector of
//! the block exactly when it solves the linear system
//!
//! ```text
//! sum_i sum_{j=1..tau} k^{(i)}_j c^{(i)}_{j,r}  +  k^{(s+1)}_{m-r} = 0
//!                                             for r = 0, ..., m-1,
//! ```
//!
//! one equation per index digit the block exercises. The time unknowns
//! occupy distinct positions across equations, so the system always has
//! full rank m and the dual space has dimension exactly `s * tau`. The
//! solver at the end of the file finds dual vectors of constrained support:
//! last spatial block limited to low positions, time block limited to low
//! positions, which is what the witness construction needs.

use crate::error::{Error, Result};
use crate::field::{Felt, FieldSpec};
use crate::generate::GeneratingMatrix;
use crate::linalg::FMatrix;
use crate::walsh::{v_of, IndexVector};

/// Cap on enumerable dual members (b^{s tau}).
pub const DUAL_ENUM_CAP: u128 = 1 << 16;

// ======================================================================
// Dual basis
// ======================================================================

/// Basis of the dual space at digit resolution tau, together with the
/// defining system for exact membership checks.
#[derive(Debug, Clone)]
pub struct DualBasis {
    s: usize,
    tau: usize,
    m: usize,
    base: u64,
    basis: Vec<IndexVector>,
    system: FMatrix,
}

impl DualBasis {
    pub fn s(&self) -> usize {
        self.s
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Dimension over F_b; always `s * tau`.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[IndexVector] {
        &self.basis
    }

    /// Number of members, `b^dim`.
    pub fn member_count(&self) -> u128 {
        (self.base as u128).pow(self.dim() as u32)
    }

    /// The `ordinal`-th member: the linear combination of basis vectors
    /// whose coefficients are the base-b digits of the ordinal. Ordinal 0
    /// is the zero vector.
    pub fn member(&self, ordinal: u128, field: &FieldSpec) -> Result<IndexVector> {
        if ordinal >= self.member_count() {
            return Err(Error::domain(format!(
                "ordinal {ordinal} out of range for {} members",
                self.member_count()
            )));
        }
        let mut flat = vec![Felt::ZERO; self.s * self.tau + self.m];
        let mut rest = ordinal;
        for bv in &self.basis {
            let c = Felt((rest % self.base as u128) as u8);
            rest /= self.base as u128;
            if !c.is_zero() {
                for (acc, &x) in flat.iter_mut().zip(bv.to_flat().iter()) {
                    *acc = field.add(*acc, field.mul(c, x));
                }
            }
        }
        Ok(IndexVector::from_flat(&flat, self.s, self.tau, self.m))
    }

    /// Exact membership via the defining system.
    pub fn is_member(&self, k: &IndexVector, field: &FieldSpec) -> Result<bool> {
        if k.s() != self.s || k.tau() != self.tau || k.m() != self.m {
            return Err(Error::dimension(format!(
                "vector shape ({}, {}, {}) does not match dual shape ({}, {}, {})",
                k.s(),
                k.tau(),
                k.m(),
                self.s,
                self.tau,
                self.m
            )));
        }
        Ok(self
            .system
            .apply(&k.to_flat(), field)
            .iter()
            .all(Felt::is_zero))
    }
}

/// Builds the m x (s tau + m) defining system in the flat column order of
/// [`IndexVector::to_flat`]: spatial blocks by coordinate, then time.
fn dual_system(
    matrices: &[GeneratingMatrix],
    m: usize,
    tau: usize,
) -> Result<FMatrix> {
    let s = matrices.len();
    if s == 0 || m == 0 || tau == 0 {
        return Err(Error::domain("need s >= 1, m >= 1, tau >= 1"));
    }
    for (i, c) in matrices.iter().enumerate() {
        if c.rows() < tau || c.cols() < m {
            return Err(Error::dimension(format!(
                "matrix {} is {}x{}, need at least {tau}x{m}",
                i + 1,
                c.rows(),
                c.cols()
            )));
        }
    }
    let mut sys = FMatrix::zero(m, s * tau + m);
    for r in 0..m {
        for (i, c) in matrices.iter().enumerate() {
            for j in 1..=tau {
                sys.set(r, i * tau + (j - 1), c.entry(j, r));
            }
        }
        // Time unknown j = m - r sits at flat position s*tau + (m - r - 1).
        sys.set(r, s * tau + (m - r - 1), Felt(1));
    }
    Ok(sys)
}

/// Computes a basis of the dual space at resolution tau from the first m
/// columns of the generating matrices.
pub fn dual_set(
    matrices: &[GeneratingMatrix],
    field: &FieldSpec,
    m: usize,
    tau: usize,
) -> Result<DualBasis> {
    let sys = dual_system(matrices, m, tau)?;
    let s = matrices.len();
    let basis: Vec<IndexVector> = sys
        .nullspace(field)
        .into_iter()
        .map(|flat| IndexVector::from_flat(&flat, s, tau, m))
        .collect();
    // The time columns form a permutation identity, so rank is always m
    // and the nullity is exactly s * tau.
    debug_assert_eq!(basis.len(), s * tau);
    Ok(DualBasis {
        s,
        tau,
        m,
        base: field.order(),
        basis,
        system: sys,
    })
}

// ======================================================================
// Constrained dual vectors
// ======================================================================

/// Finds a nonzero dual vector whose last spatial block is supported on
/// positions `1..=rho-1` (all other spatial blocks zero) and whose time
/// block is supported on positions `1..=m-rho+2`.
///
/// Counting unknowns: `rho - 1` spatial plus `m - rho + 2` time makes
/// `m + 1` against m equations, so a nonzero solution always exists; the
/// time-only solutions are killed by the triangular equations with no time
/// unknown, hence the spatial part is nonzero and can be normalized to 1 at
/// its top position.
pub fn lemma7_solve(
    matrices: &[GeneratingMatrix],
    field: &FieldSpec,
    rho: usize,
    m: usize,
    tau: usize,
) -> Result<IndexVector> {
    let s = matrices.len();
    if s == 0 {
        return Err(Error::domain("need at least one generating matrix"));
    }
    if !(2..=m.saturating_sub(2)).contains(&rho) {
        return Err(Error::domain(format!(
            "rho = {rho} outside [2, m-2] for m = {m}"
        )));
    }
    if rho - 1 > tau {
        return Err(Error::Infeasible(format!(
            "spatial support 1..={} exceeds digit resolution tau = {tau}",
            rho - 1
        )));
    }
    let c = &matrices[s - 1];
    if c.rows() < rho - 1 || c.cols() < m {
        return Err(Error::dimension(format!(
            "last matrix is {}x{}, need at least {}x{m}",
            c.rows(),
            c.cols(),
            rho - 1
        )));
    }
    let n_space = rho - 1;
    let n_time = m - rho + 2;
    let mut sys = FMatrix::zero(m, n_space + n_time);
    for r in 0..m {
        for j in 1..=n_space {
            sys.set(r, j - 1, c.entry(j, r));
        }
        // Equation r carries time unknown m - r only if m - r <= n_time.
        if m - r <= n_time {
            sys.set(r, n_space + (m - r - 1), Felt(1));
        }
    }
    let null = sys.nullspace(field);
    let sol = null
        .first()
        .ok_or_else(|| Error::SearchFailed("restricted dual system has full rank".to_string()))?;
    let v = v_of(&sol[..n_space]);
    if v == 0 {
        // Impossible by the triangular-elimination argument; a zero spatial
        // part would force the whole vector to zero.
        return Err(Error::SearchFailed(
            "restricted dual solution has zero spatial part".to_string(),
        ));
    }
    let scale = field.inv(sol[v - 1])?;
    let mut k = IndexVector::zero(s, tau, m);
    for j in 1..=n_space {
        k.spatial[s - 1][j - 1] = field.mul(scale, sol[j - 1]);
    }
    for j in 1..=n_time {
        k.time[j - 1] = field.mul(scale, sol[n_space + j - 1]);
    }
    // Confirm against the unrestricted system before handing it out.
    let full = dual_system(matrices, m, tau)?;
    if !full.apply(&k.to_flat(), field).iter().all(Felt::is_zero) {
        return Err(Error::SearchFailed(
            "restricted solution fails the full dual system".to_string(),
        ));
    }
    Ok(k)
}

// ======================================================================
// Tests
// ======================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::BijectionFamily;
    use crate::generate::hankel_matrix;
    use crate::laurent::LaurentSeries;
    use crate::walsh::{char_sum_sigma, g_size, IndexVector};

    fn f2() -> FieldSpec {
        FieldSpec::for_base(2).unwrap()
    }

    fn quadratic_matrices(rows: usize, cols: usize) -> Vec<GeneratingMatrix> {
        let f = f2();
        let l = LaurentSeries::quadratic_fixture(&f, rows + cols + 2).unwrap();
        vec![hankel_matrix(&l, rows, cols).unwrap()]
    }

    #[test]
    fn dual_dimension_and_membership() {
        let f = f2();
        let (m, tau) = (3usize, 3usize);
        let mats = quadratic_matrices(tau, m);
        let dual = dual_set(&mats, &f, m, tau).unwrap();
        assert_eq!(dual.dim(), 3);
        assert_eq!(dual.member_count(), 8);
        // Ordinal 0 is the zero vector; every member passes the system.
        assert!(dual.member(0, &f).unwrap().is_zero());
        let mut seen = std::collections::HashSet::new();
        for ord in 0..dual.member_count() {
            let k = dual.member(ord, &f).unwrap();
            assert!(dual.is_member(&k, &f).unwrap());
            assert!(seen.insert(
                k.to_flat().iter().map(|e| e.index()).collect::<Vec<_>>()
            ));
        }
        assert_eq!(seen.len(), 8);
        assert!(dual.member(8, &f).is_err());
    }

    #[test]
    fn membership_equals_sigma_dichotomy() {
        // sigma(k) = b^m exactly on dual members, 0 elsewhere — checked
        // exhaustively over G_m for a small block.
        let f = f2();
        let (m, tau) = (2usize, 2usize);
        let mats = quadratic_matrices(tau, m);
        let bij = BijectionFamily::identity();
        let dual = dual_set(&mats, &f, m, tau).unwrap();
        let mut members_seen = 0u32;
        for ord in 0..g_size(2, 1, tau, m) {
            let k = IndexVector::from_ordinal(ord, &f, 1, tau, m);
            let sigma = char_sum_sigma(&k, &mats, &f, &bij, m).unwrap();
            let member = dual.is_member(&k, &f).unwrap();
            if member {
                members_seen += 1;
                assert!((sigma.re - 4.0).abs() < 1e-9 && sigma.im.abs() < 1e-9);
            } else {
                assert!(sigma.norm() < 1e-9);
            }
        }
        assert_eq!(members_seen as u128, dual.member_count());
    }

    #[test]
    fn dual_two_coordinates() {
        let f = f2();
        let (m, tau) = (2usize, 2usize);
        let l1 = LaurentSeries::quadratic_fixture(&f, 12).unwrap();
        let num = crate::laurent::Poly::from_coeffs(vec![f.one()]);
        let den = crate::laurent::Poly::from_coeffs(vec![f.one(), Felt::ZERO, f.one()]);
        let l2 = LaurentSeries::from_rational(&num, &den, 12, &f).unwrap();
        let mats = vec![
            hankel_matrix(&l1, tau, m).unwrap(),
            hankel_matrix(&l2, tau, m).unwrap(),
        ];
        let dual = dual_set(&mats, &f, m, tau).unwrap();
        assert_eq!(dual.dim(), 4);
        let bij = BijectionFamily::identity();
        for bv in dual.basis() {
            assert!(!bv.is_zero());
            let sigma = char_sum_sigma(bv, &mats, &f, &bij, m).unwrap();
            assert!((sigma.re - 4.0).abs() < 1e-9 && sigma.im.abs() < 1e-9);
        }
    }

    #[test]
    fn dual_shape_validation() {
        let f = f2();
        let mats = quadratic_matrices(3, 3);
        // Matrix too small for the requested resolution or block size.
        assert!(dual_set(&mats, &f, 4, 3).is_err());
        assert!(dual_set(&mats, &f, 3, 4).is_err());
        let dual = dual_set(&mats, &f, 3, 3).unwrap();
        let wrong = IndexVector::zero(1, 2, 3);
        assert!(dual.is_member(&wrong, &f).is_err());
    }

    #[test]
    fn constrained_solver_support_and_membership() {
        let f = f2();
        let (m, tau) = (6usize, 3usize);
        let mats = quadratic_matrices(tau, m);
        let rho = 3usize;
        let k = lemma7_solve(&mats, &f, rho, m, tau).unwrap();
        // Spatial support within 1..=rho-1, other positions zero.
        for j in rho..=tau {
            assert!(k.spatial[0][j - 1].is_zero());
        }
        // Time support within 1..=m-rho+2.
        for j in (m - rho + 3)..=m {
            assert!(k.time[j - 1].is_zero());
        }
        // Normalized at the top spatial position.
        let v = v_of(&k.spatial[0]);
        assert!(v >= 1 && v < rho);
        assert_eq!(k.spatial[0][v - 1], f.one());
        // Member of the unrestricted dual space.
        let dual = dual_set(&mats, &f, m, tau).unwrap();
        assert!(dual.is_member(&k, &f).unwrap());
    }

    #[test]
    fn constrained_solver_validation() {
        let f = f2();
        let mats = quadratic_matrices(4, 8);
        assert!(matches!(
            lemma7_solve(&mats, &f, 1, 8, 4),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            lemma7_solve(&mats, &f, 7, 8, 4),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            lemma7_solve(&mats, &f, 6, 8, 4),
            Err(Error::Infeasible(_))
        ));
    }
}
