//! Dense linear algebra over a finite field: rank and right-nullspace bases
//! by Gaussian elimination.
//!
//! Everything downstream that claims exactness — net quality `T(m)` by rank
//! of row selections, dual-space bases, constrained dual-vector solves —
//! funnels through this module, so elimination works purely on field table
//! operations and never normalizes through integers.

use crate::field::{Felt, FieldSpec};

/// Row-major matrix over `F_b` with 0-based indexing (a raw math object, in
/// contrast to the 1-based digit-position rows of generating matrices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Felt>,
}

impl FMatrix {
    pub fn zero(rows: usize, cols: usize) -> FMatrix {
        FMatrix { rows, cols, data: vec![Felt::ZERO; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<Felt>>) -> FMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        debug_assert!(rows.iter().all(|row| row.len() == c));
        FMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> Felt {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Felt) {
        self.data[i * self.cols + j] = v;
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    fn rref(&mut self, field: &FieldSpec) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&i| !self.entry(i, col).is_zero()) else {
                continue;
            };
            if p != row {
                for j in 0..self.cols {
                    let (a, b) = (self.entry(row, j), self.entry(p, j));
                    self.set(row, j, b);
                    self.set(p, j, a);
                }
            }
            // Scale the pivot row to a leading 1. Pivot is nonzero, inv is total here.
            let inv = field.inv(self.entry(row, col)).expect("nonzero pivot");
            for j in 0..self.cols {
                let v = field.mul(self.entry(row, j), inv);
                self.set(row, j, v);
            }
            for i in 0..self.rows {
                if i == row {
                    continue;
                }
                let factor = self.entry(i, col);
                if factor.is_zero() {
                    continue;
                }
                for j in 0..self.cols {
                    let v = field.sub(self.entry(i, j), field.mul(factor, self.entry(row, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self, field: &FieldSpec) -> usize {
        let mut work = self.clone();
        work.rref(field).len()
    }

    /// Basis of `{ x : M x = 0 }`, one vector per free column, in ascending
    /// free-column order (deterministic).
    pub fn nullspace(&self, field: &FieldSpec) -> Vec<Vec<Felt>> {
        let mut work = self.clone();
        let pivots = work.rref(field);
        let pivot_of_col: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = Some(r);
            }
            v
        };
        let mut basis = Vec::with_capacity(self.cols - pivots.len());
        for free in 0..self.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut x = vec![Felt::ZERO; self.cols];
            x[free] = field.one();
            for (r, &c) in pivots.iter().enumerate() {
                // Row r reads x_c + sum_{j free} w_{r,j} x_j = 0.
                x[c] = field.neg(work.entry(r, free));
            }
            basis.push(x);
        }
        basis
    }

    /// M x for a column vector x.
    pub fn apply(&self, x: &[Felt], field: &FieldSpec) -> Vec<Felt> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = Felt::ZERO;
                for (j, &xj) in x.iter().enumerate() {
                    let a = self.entry(i, j);
                    if !a.is_zero() && !xj.is_zero() {
                        acc = field.add(acc, field.mul(a, xj));
                    }
                }
                acc
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(field: &FieldSpec, rows: &[&[u64]]) -> FMatrix {
        FMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| field.element(v).unwrap()).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_basics() {
        let f = FieldSpec::for_base(2).unwrap();
        assert_eq!(mat(&f, &[&[1, 0], &[0, 1]]).rank(&f), 2);
        assert_eq!(mat(&f, &[&[1, 1], &[1, 1]]).rank(&f), 1);
        assert_eq!(FMatrix::zero(3, 2).rank(&f), 0);
        let f3 = FieldSpec::for_base(3).unwrap();
        // [[1,2],[2,1]] over F_3 has determinant 1 - 4 = 0 mod 3.
        assert_eq!(mat(&f3, &[&[1, 2], &[2, 1]]).rank(&f3), 1);
    }

    #[test]
    fn nullspace_annihilates_and_has_complementary_dimension() {
        let f = FieldSpec::for_base(2).unwrap();
        let m = mat(&f, &[&[1, 0, 1], &[0, 1, 1]]);
        let ns = m.nullspace(&f);
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0], vec![f.one(), f.one(), f.one()]);
        assert!(m.apply(&ns[0], &f).iter().all(|v| v.is_zero()));
    }

    #[test]
    fn nullspace_nonprime_field() {
        let f = FieldSpec::for_base(4).unwrap();
        let x = f.element(2).unwrap(); // the generator
        let m = FMatrix::from_rows(vec![vec![x, f.one()]]);
        let ns = m.nullspace(&f);
        assert_eq!(ns.len(), 1);
        for v in &ns {
            assert!(m.apply(v, &f).iter().all(|e| e.is_zero()));
        }
    }

    proptest! {
        #[test]
        fn rank_nullity_and_annihilation(
            base_pick in 0usize..4,
            rows in 1usize..5,
            cols in 1usize..6,
            seed in proptest::collection::vec(0u64..16, 30),
        ) {
            let base = [2u64, 3, 4, 5][base_pick];
            let f = FieldSpec::for_base(base).unwrap();
            let mut m = FMatrix::zero(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    m.set(i, j, f.element(seed[i * cols + j] % base).unwrap());
                }
            }
            let rank = m.rank(&f);
            let ns = m.nullspace(&f);
            prop_assert_eq!(rank + ns.len(), cols);
            for v in &ns {
                prop_assert!(m.apply(v, &f).iter().all(|e| e.is_zero()));
            }
        }
    }
}
