//! Dense matrices of exact rationals with arbitrary-precision entries:
//! rank, nullspace, determinant and linear solves by Gaussian elimination.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Renders a rational as "num/den", or just "num" when the denominator is 1.
pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses the "num/den" form produced by [`rational_to_string`].
pub fn rational_from_string(s: &str) -> Option<BigRational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = num.trim().parse().ok()?;
    let d: BigInt = den.trim().parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

/// A rows × cols matrix of exact rationals, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> RationalMatrix {
        RationalMatrix { rows, cols, entries: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> RationalMatrix {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut entries = Vec::with_capacity(nrows * ncols);
        for row in rows {
            assert_eq!(row.len(), ncols, "ragged rows");
            entries.extend(row);
        }
        RationalMatrix { rows: nrows, cols: ncols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRational) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigRational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> RationalMatrix {
        let mut out = RationalMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn mul(&self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = RationalMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).clone();
                    out.set(i, j, cur + a * b);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                let mut acc = BigRational::zero();
                for (c, x) in v.iter().enumerate() {
                    if !x.is_zero() && !self.get(r, c).is_zero() {
                        acc += self.get(r, c) * x;
                    }
                }
                acc
            })
            .collect()
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            let Some(pr) = (row..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            if pr != row {
                for c in 0..self.cols {
                    self.entries.swap(row * self.cols + c, pr * self.cols + c);
                }
            }
            let inv = self.get(row, col).recip();
            for c in col..self.cols {
                let v = self.get(row, c) * &inv;
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let f = self.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for c in col..self.cols {
                    let v = self.get(r, c) - &f * self.get(row, c);
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
            if row == self.rows {
                break;
            }
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref_in_place().len()
    }

    /// A basis of the right nullspace {x : M x = 0}, one vector per row.
    pub fn nullspace(&self) -> RationalMatrix {
        let mut work = self.clone();
        let pivots = work.rref_in_place();
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = Some(r);
            }
            v
        };
        let free: Vec<usize> = (0..self.cols).filter(|c| pivot_set[*c].is_none()).collect();
        let mut basis = RationalMatrix::zeros(free.len(), self.cols);
        for (b, &fc) in free.iter().enumerate() {
            basis.set(b, fc, BigRational::one());
            for (r, &pc) in pivots.iter().enumerate() {
                let v = -work.get(r, fc).clone();
                basis.set(b, pc, v);
            }
        }
        basis
    }

    /// Solves M x = b for square nonsingular M.
    pub fn solve(&self, b: &[BigRational]) -> Option<Vec<BigRational>> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(b.len(), self.rows);
        let n = self.rows;
        let mut aug = RationalMatrix::zeros(n, n + 1);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, n, b[r].clone());
        }
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots.iter().any(|&c| c >= n) {
            return None;
        }
        Some((0..n).map(|r| aug.get(r, n).clone()).collect())
    }

    /// Exact determinant by fraction-preserving elimination.
    pub fn determinant(&self) -> BigRational {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut work = self.clone();
        let mut det = BigRational::one();
        for col in 0..n {
            let Some(pr) = (col..n).find(|&r| !work.get(r, col).is_zero()) else {
                return BigRational::zero();
            };
            if pr != col {
                for c in 0..n {
                    work.entries.swap(col * n + c, pr * n + c);
                }
                det = -det;
            }
            let pivot = work.get(col, col).clone();
            det *= &pivot;
            let inv = pivot.recip();
            for r in (col + 1)..n {
                let f = work.get(r, col) * &inv;
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = work.get(r, c) - &f * work.get(col, c);
                    work.set(r, c, v);
                }
            }
        }
        det
    }

    /// True when every row of `self` lies in the row space of `basis`.
    pub fn rows_contained_in(&self, basis: &RationalMatrix) -> bool {
        assert_eq!(self.cols, basis.cols);
        let base_rank = basis.rank();
        let mut stacked = RationalMatrix::zeros(basis.rows + self.rows, self.cols);
        for r in 0..basis.rows {
            for c in 0..self.cols {
                stacked.set(r, c, basis.get(r, c).clone());
            }
        }
        for r in 0..self.rows {
            for c in 0..self.cols {
                stacked.set(basis.rows + r, c, self.get(r, c).clone());
            }
        }
        stacked.rank() == base_rank
    }
}

pub fn big_rational_from_i64(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// |a − b| as an exact rational.
pub fn abs_diff(a: &BigRational, b: &BigRational) -> BigRational {
    (a - b).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn string_roundtrip() {
        assert_eq!(rational_to_string(&rat(-1, 2)), "-1/2");
        assert_eq!(rational_to_string(&rat(3, 1)), "3");
        assert_eq!(rational_from_string("-1/2").unwrap(), rat(-1, 2));
        assert_eq!(rational_from_string("3").unwrap(), rat(3, 1));
        assert!(rational_from_string("1/0").is_none());
    }

    #[test]
    fn rank_and_nullspace() {
        // rows: (1, 1, 0), (0, 0, 1) — rank 2, nullspace spanned by (-1, 1, 0)
        let m = RationalMatrix::from_rows(vec![
            vec![rat(1, 1), rat(1, 1), rat(0, 1)],
            vec![rat(0, 1), rat(0, 1), rat(1, 1)],
        ]);
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.rows(), 1);
        for r in 0..ns.rows() {
            let prod = m.mul_vec(ns.row(r));
            assert!(prod.iter().all(|v| v.is_zero()));
        }
    }

    #[test]
    fn nullspace_of_empty_constraint_is_everything() {
        let m = RationalMatrix::zeros(0, 3);
        assert_eq!(m.nullspace().rows(), 3);
    }

    #[test]
    fn solve_small_system() {
        let m = RationalMatrix::from_rows(vec![
            vec![rat(2, 1), rat(1, 1)],
            vec![rat(1, 1), rat(3, 1)],
        ]);
        let x = m.solve(&[rat(5, 1), rat(10, 1)]).unwrap();
        assert_eq!(x, vec![rat(1, 1), rat(3, 1)]);
        let singular = RationalMatrix::from_rows(vec![
            vec![rat(1, 1), rat(1, 1)],
            vec![rat(2, 1), rat(2, 1)],
        ]);
        assert!(singular.solve(&[rat(1, 1), rat(1, 1)]).is_none());
    }

    #[test]
    fn determinant_values() {
        let m = RationalMatrix::from_rows(vec![
            vec![rat(1, 1), rat(-1, 2)],
            vec![rat(-1, 2), rat(1, 1)],
        ]);
        assert_eq!(m.determinant(), rat(3, 4));
        assert_eq!(RationalMatrix::identity(3).determinant(), rat(1, 1));
        let singular = RationalMatrix::from_rows(vec![
            vec![rat(1, 1), rat(2, 1)],
            vec![rat(2, 1), rat(4, 1)],
        ]);
        assert_eq!(singular.determinant(), rat(0, 1));
    }

    #[test]
    fn row_membership() {
        let basis = RationalMatrix::from_rows(vec![
            vec![rat(1, 1), rat(0, 1), rat(1, 1)],
            vec![rat(0, 1), rat(1, 1), rat(1, 1)],
        ]);
        let inside = RationalMatrix::from_rows(vec![vec![rat(1, 1), rat(1, 1), rat(2, 1)]]);
        let outside = RationalMatrix::from_rows(vec![vec![rat(1, 1), rat(1, 1), rat(0, 1)]]);
        assert!(inside.rows_contained_in(&basis));
        assert!(!outside.rows_contained_in(&basis));
    }
}
