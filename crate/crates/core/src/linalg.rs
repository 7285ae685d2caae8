//! Exact linear algebra over F_q: matrices, canonical subspaces, row actions.
//!
//! Subspaces are kept in reduced row echelon form, which is the unique
//! canonical representative of a row space; equality and hashing of
//! subspaces reduce to equality of the basis grid.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gfq::{FieldElement, FieldSpec};

/// A dense rows × cols matrix over F_q, row-major.
#[derive(Clone)]
pub struct MatrixGF {
    spec: Arc<FieldSpec>,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl PartialEq for MatrixGF {
    fn eq(&self, other: &Self) -> bool {
        self.spec.q() == other.spec.q()
            && self.rows == other.rows
            && self.cols == other.cols
            && self.data == other.data
    }
}

impl Eq for MatrixGF {}

impl Hash for MatrixGF {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.spec.q().hash(state);
        self.rows.hash(state);
        self.cols.hash(state);
        for e in &self.data {
            e.value().hash(state);
        }
    }
}

impl fmt::Debug for MatrixGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatrixGF {}x{} over GF({})", self.rows, self.cols, self.spec.q())?;
        for r in 0..self.rows {
            let vals: Vec<u16> = self.row(r).iter().map(|e| e.value()).collect();
            writeln!(f, "  {:?}", vals)?;
        }
        Ok(())
    }
}

impl MatrixGF {
    pub fn zeros(spec: &Arc<FieldSpec>, rows: usize, cols: usize) -> MatrixGF {
        MatrixGF {
            spec: Arc::clone(spec),
            rows,
            cols,
            data: vec![spec.zero(); rows * cols],
        }
    }

    pub fn identity(spec: &Arc<FieldSpec>, n: usize) -> MatrixGF {
        let mut m = MatrixGF::zeros(spec, n, n);
        for i in 0..n {
            m.set(i, i, spec.one());
        }
        m
    }

    /// Builds a matrix from whole rows; all rows must share the width and the
    /// field of `spec`.
    pub fn from_rows(spec: &Arc<FieldSpec>, rows: Vec<Vec<FieldElement>>) -> Result<MatrixGF> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in &rows {
            if row.len() != ncols {
                return Err(Error::AmbientMismatch(row.len(), ncols));
            }
            for &e in row {
                if e.q() != spec.q() {
                    return Err(Error::SpecMismatch);
                }
                data.push(e);
            }
        }
        Ok(MatrixGF { spec: Arc::clone(spec), rows: nrows, cols: ncols, data })
    }

    /// Builds a matrix of integer values, each taken as a canonical element index.
    pub fn from_values(spec: &Arc<FieldSpec>, rows: usize, cols: usize, values: &[u64]) -> MatrixGF {
        assert_eq!(values.len(), rows * cols);
        MatrixGF {
            spec: Arc::clone(spec),
            rows,
            cols,
            data: values.iter().map(|&v| spec.elem(v)).collect(),
        }
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul(&self, rhs: &MatrixGF) -> Result<MatrixGF> {
        if self.spec.q() != rhs.spec.q() {
            return Err(Error::SpecMismatch);
        }
        if self.cols != rhs.rows {
            return Err(Error::AmbientMismatch(self.cols, rhs.rows));
        }
        let spec = &self.spec;
        let mut out = MatrixGF::zeros(spec, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = spec.mul_raw(a, rhs.get(k, j));
                    let cur = out.get(i, j);
                    out.set(i, j, spec.add_raw(cur, prod));
                }
            }
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        let mut red = RowReducer::new(&self.spec, self.cols);
        for r in 0..self.rows {
            red.add_row(self.row(r));
        }
        red.rank()
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    pub fn is_lower_triangular(&self) -> bool {
        for r in 0..self.rows {
            for c in (r + 1)..self.cols {
                if !self.get(r, c).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn random<R: Rng>(spec: &Arc<FieldSpec>, rows: usize, cols: usize, rng: &mut R) -> MatrixGF {
        let q = spec.q() as u64;
        let data = (0..rows * cols).map(|_| spec.elem(rng.random_range(0..q))).collect();
        MatrixGF { spec: Arc::clone(spec), rows, cols, data }
    }

    /// Uniform invertible matrix by rejection sampling.
    pub fn random_invertible<R: Rng>(spec: &Arc<FieldSpec>, n: usize, rng: &mut R) -> MatrixGF {
        loop {
            let m = MatrixGF::random(spec, n, n, rng);
            if m.is_invertible() {
                return m;
            }
        }
    }

    /// Random invertible lower-triangular matrix (an element of B(n)).
    pub fn random_lower_triangular<R: Rng>(spec: &Arc<FieldSpec>, n: usize, rng: &mut R) -> MatrixGF {
        let q = spec.q() as u64;
        let mut m = MatrixGF::zeros(spec, n, n);
        for r in 0..n {
            for c in 0..r {
                m.set(r, c, spec.elem(rng.random_range(0..q)));
            }
            m.set(r, r, spec.elem(rng.random_range(1..q)));
        }
        m
    }

    pub fn inverse(&self) -> Result<MatrixGF> {
        if self.rows != self.cols {
            return Err(Error::AmbientMismatch(self.rows, self.cols));
        }
        let n = self.rows;
        let spec = &self.spec;
        // eliminate on [self | I]
        let mut aug = MatrixGF::zeros(spec, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, spec.one());
        }
        let pivots = rref_in_place(&mut aug);
        if pivots.len() < n || pivots.iter().any(|&c| c >= n) {
            return Err(Error::SingularMatrix);
        }
        let mut out = MatrixGF::zeros(spec, n, n);
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, aug.get(r, n + c));
            }
        }
        Ok(out)
    }
}

/// In-place reduced row echelon form; returns the pivot columns.
fn rref_in_place(m: &mut MatrixGF) -> Vec<usize> {
    let spec = Arc::clone(&m.spec);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        let Some(pr) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
            continue;
        };
        if pr != row {
            for c in 0..m.cols {
                let a = m.get(row, c);
                let b = m.get(pr, c);
                m.set(row, c, b);
                m.set(pr, c, a);
            }
        }
        let inv = spec.inv_raw(m.get(row, col));
        for c in col..m.cols {
            m.set(row, c, spec.mul_raw(m.get(row, c), inv));
        }
        for r in 0..m.rows {
            if r == row {
                continue;
            }
            let f = m.get(r, col);
            if f.is_zero() {
                continue;
            }
            for c in col..m.cols {
                let sub = spec.mul_raw(f, m.get(row, c));
                m.set(r, c, spec.sub_raw(m.get(r, c), sub));
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.rows {
            break;
        }
    }
    pivots
}

/// Incremental Gaussian elimination used for rank and membership queries.
pub struct RowReducer {
    spec: Arc<FieldSpec>,
    width: usize,
    // (pivot column, reduced row) sorted by pivot column
    pivots: Vec<(usize, Vec<FieldElement>)>,
}

impl RowReducer {
    pub fn new(spec: &Arc<FieldSpec>, width: usize) -> RowReducer {
        RowReducer { spec: Arc::clone(spec), width, pivots: Vec::new() }
    }

    /// Seeds the reducer with the rows of an echelon-form basis.
    pub fn seed_subspace(&mut self, s: &Subspace) {
        debug_assert_eq!(s.ambient(), self.width);
        for r in 0..s.dim() {
            let grew = self.add_row(s.basis().row(r));
            debug_assert!(grew);
        }
    }

    /// Reduces `row` against the pivots; if a nonzero remainder survives it
    /// becomes a new pivot and the rank grows.
    pub fn add_row(&mut self, row: &[FieldElement]) -> bool {
        debug_assert_eq!(row.len(), self.width);
        let spec = &self.spec;
        let mut work = row.to_vec();
        for (col, prow) in &self.pivots {
            let f = work[*col];
            if f.is_zero() {
                continue;
            }
            for c in *col..self.width {
                let sub = spec.mul_raw(f, prow[c]);
                work[c] = spec.sub_raw(work[c], sub);
            }
        }
        let Some(lead) = work.iter().position(|e| !e.is_zero()) else {
            return false;
        };
        let inv = spec.inv_raw(work[lead]);
        for c in lead..self.width {
            work[c] = spec.mul_raw(work[c], inv);
        }
        let pos = self.pivots.partition_point(|(c, _)| *c < lead);
        self.pivots.insert(pos, (lead, work));
        true
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// A subspace of F_q^n held as its unique reduced-row-echelon basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    basis: MatrixGF,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} of GF({})^{}) {:?}", self.dim(), self.basis.spec.q(), self.ambient(), self.basis)
    }
}

/// Canonicalizes the row space of `m` as a `Subspace`; idempotent.
pub fn rref_canonicalize(m: &MatrixGF) -> Subspace {
    let mut work = m.clone();
    let pivots = rref_in_place(&mut work);
    let dim = pivots.len();
    let mut data = Vec::with_capacity(dim * work.cols);
    for r in 0..dim {
        data.extend_from_slice(work.row(r));
    }
    Subspace {
        basis: MatrixGF { spec: Arc::clone(&work.spec), rows: dim, cols: work.cols, data },
    }
}

impl Subspace {
    pub fn zero(spec: &Arc<FieldSpec>, ambient: usize) -> Subspace {
        Subspace { basis: MatrixGF::zeros(spec, 0, ambient) }
    }

    pub fn full(spec: &Arc<FieldSpec>, ambient: usize) -> Subspace {
        Subspace { basis: MatrixGF::identity(spec, ambient) }
    }

    /// Span of the given rows.
    pub fn from_rows(spec: &Arc<FieldSpec>, rows: Vec<Vec<FieldElement>>) -> Result<Subspace> {
        Ok(rref_canonicalize(&MatrixGF::from_rows(spec, rows)?))
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        self.basis.spec()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols
    }

    pub fn basis(&self) -> &MatrixGF {
        &self.basis
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        if self.spec().q() != other.spec().q() {
            return Err(Error::SpecMismatch);
        }
        if self.ambient() != other.ambient() {
            return Err(Error::AmbientMismatch(self.ambient(), other.ambient()));
        }
        Ok(())
    }

    /// dim(self ∩ other) = dim self + dim other − rank of the stacked bases.
    pub fn intersect_dim(&self, other: &Subspace) -> Result<usize> {
        self.check_compatible(other)?;
        let mut red = RowReducer::new(self.spec(), self.ambient());
        red.seed_subspace(self);
        for r in 0..other.dim() {
            red.add_row(other.basis.row(r));
        }
        Ok(self.dim() + other.dim() - red.rank())
    }

    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        Ok(self.intersect_dim(other)? == other.dim())
    }

    pub fn contains_vector(&self, v: &[FieldElement]) -> Result<bool> {
        if v.len() != self.ambient() {
            return Err(Error::AmbientMismatch(v.len(), self.ambient()));
        }
        let mut red = RowReducer::new(self.spec(), self.ambient());
        red.seed_subspace(self);
        Ok(!red.add_row(v))
    }

    /// Image under the row action x ↦ xg for invertible g; dimension is preserved.
    pub fn transform(&self, g: &MatrixGF) -> Result<Subspace> {
        check_action(self.spec(), self.ambient(), g)?;
        Ok(rref_canonicalize(&self.basis.mul(g)?))
    }
}

fn check_action(spec: &Arc<FieldSpec>, width: usize, g: &MatrixGF) -> Result<()> {
    if spec.q() != g.spec().q() {
        return Err(Error::SpecMismatch);
    }
    if g.rows() != width || g.cols() != width {
        return Err(Error::AmbientMismatch(width, g.rows()));
    }
    if !g.is_invertible() {
        return Err(Error::SingularMatrix);
    }
    Ok(())
}

/// Row action x ↦ xg on a single row vector.
pub fn row_action(x: &[FieldElement], g: &MatrixGF) -> Result<Vec<FieldElement>> {
    let spec = g.spec();
    check_action(spec, x.len(), g)?;
    let mut out = vec![spec.zero(); g.cols()];
    for (k, &a) in x.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, o) in out.iter_mut().enumerate() {
            let prod = spec.mul_raw(a, g.get(k, j));
            *o = spec.add_raw(*o, prod);
        }
    }
    Ok(out)
}
