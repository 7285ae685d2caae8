//! The two-sided infinite flag space Fl(2∞): windowed flags in normal form,
//! the inductive-limit embeddings, the infinite kernel, and the action of
//! window-supported group elements.
//!
//! A flag of Fl(2∞) agrees with the standard flag E outside a finite window
//! (M, N) and is stored as a finite flag in the quotient E_N/E_M. The normal
//! form trims the window until the interior differs from the standard flag at
//! both ends, so equal flags have identical representations.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::flag::Flag;
use crate::gfq::{FieldElement, FieldSpec};
use crate::kernel::{k_pairs, KernelValue};
use crate::linalg::{MatrixGF, Subspace};

/// A flag of Fl(2∞) in windowed normal form. The empty window (lo = hi)
/// represents the standard flag E itself.
#[derive(Clone)]
pub struct BiFlag {
    spec: Arc<FieldSpec>,
    lo: i64,
    hi: i64,
    interior: Flag,
}

impl PartialEq for BiFlag {
    fn eq(&self, other: &Self) -> bool {
        self.spec.q() == other.spec.q()
            && self.lo == other.lo
            && self.hi == other.hi
            && self.interior == other.interior
    }
}

impl Eq for BiFlag {}

impl std::hash::Hash for BiFlag {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.spec.q().hash(state);
        self.lo.hash(state);
        self.hi.hash(state);
        self.interior.hash(state);
    }
}

impl fmt::Debug for BiFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiFlag(q={}, window=({}, {}))", self.spec.q(), self.lo, self.hi)
    }
}

/// The standard flag E of Fl(2∞).
pub fn biflag_standard(spec: &Arc<FieldSpec>) -> BiFlag {
    BiFlag {
        spec: Arc::clone(spec),
        lo: 0,
        hi: 0,
        interior: Flag::standard(0, spec),
    }
}

/// Builds the windowed flag with V_{lo+α} = preimage of the interior's F_α,
/// then trims to normal form.
pub fn biflag_from_window(lo: i64, hi: i64, interior: Flag) -> Result<BiFlag> {
    if hi < lo || interior.n() as i64 != hi - lo {
        return Err(Error::DimensionMismatch);
    }
    let spec = Arc::clone(interior.spec());
    Ok(normalize(BiFlag { spec, lo, hi, interior }))
}

impl BiFlag {
    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    /// The normal-form window (lo, hi); equal endpoints mean the standard flag.
    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn is_standard(&self) -> bool {
        self.lo == self.hi
    }

    pub fn interior(&self) -> &Flag {
        &self.interior
    }

    /// Re-expresses the flag on an enclosing window as a finite flag in the
    /// quotient E_hi/E_lo.
    pub fn expand(&self, lo: i64, hi: i64) -> Flag {
        if self.is_standard() {
            assert!(lo <= hi);
            return Flag::standard((hi - lo) as usize, &self.spec);
        }
        assert!(lo <= self.lo && hi >= self.hi, "window must enclose ({}, {})", self.lo, self.hi);
        let spec = &self.spec;
        let d = (hi - lo) as usize;
        let offset = (self.lo - lo) as usize;
        let inner = (self.hi - self.lo) as usize;
        let mut subspaces = Vec::with_capacity(d.saturating_sub(1));
        for beta in 1..d {
            if beta <= offset || beta >= offset + inner {
                subspaces.push(standard_step(spec, d, beta));
            } else {
                let alpha = beta - offset;
                let basis = self.interior.subspace(alpha);
                let mut rows: Vec<Vec<FieldElement>> = Vec::with_capacity(beta);
                for i in 0..offset {
                    let mut row = vec![spec.zero(); d];
                    row[i] = spec.one();
                    rows.push(row);
                }
                for r in 0..basis.dim() {
                    let mut row = vec![spec.zero(); d];
                    for (c, &e) in basis.basis().row(r).iter().enumerate() {
                        row[offset + c] = e;
                    }
                    rows.push(row);
                }
                subspaces.push(Subspace::from_rows(spec, rows).expect("rows share the spec"));
            }
        }
        Flag::new(spec, d, subspaces).expect("expansion preserves the flag conditions")
    }
}

fn standard_step(spec: &Arc<FieldSpec>, ambient: usize, dim: usize) -> Subspace {
    let rows: Vec<Vec<FieldElement>> = (0..dim)
        .map(|i| {
            let mut row = vec![spec.zero(); ambient];
            row[i] = spec.one();
            row
        })
        .collect();
    Subspace::from_rows(spec, rows).expect("unit rows share the spec")
}

/// Trims the window wherever the interior agrees with the standard flag of
/// the quotient at its first or last step.
fn normalize(mut b: BiFlag) -> BiFlag {
    loop {
        let d = (b.hi - b.lo) as usize;
        if d <= 1 {
            return biflag_standard(&b.spec);
        }
        let spec = Arc::clone(&b.spec);
        if b.interior.subspace(1) == standard_step(&spec, d, 1) {
            // V_{lo+1} = E_{lo+1}: drop the first quotient coordinate
            let subspaces: Vec<Subspace> = (2..d)
                .map(|alpha| {
                    let s = b.interior.subspace(alpha);
                    let rows: Vec<Vec<FieldElement>> = (0..s.dim())
                        .map(|r| s.basis().row(r)[1..].to_vec())
                        .collect();
                    Subspace::from_rows(&spec, rows).expect("rows share the spec")
                })
                .collect();
            b = BiFlag {
                spec: Arc::clone(&spec),
                lo: b.lo + 1,
                hi: b.hi,
                interior: Flag::new(&spec, d - 1, subspaces).expect("quotient of a flag is a flag"),
            };
            continue;
        }
        if b.interior.subspace(d - 1) == standard_step(&spec, d, d - 1) {
            // V_{hi−1} = E_{hi−1}: every earlier step has last coordinate zero
            let subspaces: Vec<Subspace> = (1..d - 1)
                .map(|alpha| {
                    let s = b.interior.subspace(alpha);
                    let rows: Vec<Vec<FieldElement>> = (0..s.dim())
                        .map(|r| {
                            let row = s.basis().row(r);
                            debug_assert!(row[d - 1].is_zero());
                            row[..d - 1].to_vec()
                        })
                        .collect();
                    Subspace::from_rows(&spec, rows).expect("rows share the spec")
                })
                .collect();
            b = BiFlag {
                spec: Arc::clone(&spec),
                lo: b.lo,
                hi: b.hi - 1,
                interior: Flag::new(&spec, d - 1, subspaces).expect("restriction of a flag is a flag"),
            };
            continue;
        }
        return b;
    }
}

fn common_window(v: &BiFlag, w: &BiFlag) -> (i64, i64) {
    let lo = v.lo.min(w.lo);
    let hi = v.hi.max(w.hi);
    if lo == hi {
        (0, 1)
    } else {
        (lo, hi)
    }
}

/// The number of pairs (i, j) ∈ Z × Z with V_{i+1} ∩ W_{j+1} = V_i ∩ W_j.
///
/// Outside a common enclosing window both flags coincide with E and the
/// intersections grow strictly along every diagonal shift, so the count
/// reduces to `k_pairs` of the two interiors. The reduction is additionally
/// re-evaluated on a one-step-larger window and the two counts are required
/// to agree.
pub fn k_infinite(v: &BiFlag, w: &BiFlag) -> Result<usize> {
    if v.spec.q() != w.spec.q() {
        return Err(Error::SpecMismatch);
    }
    let (lo, hi) = common_window(v, w);
    let k = k_pairs(&v.expand(lo, hi), &w.expand(lo, hi))?;
    let k_margin = k_pairs(&v.expand(lo - 1, hi + 1), &w.expand(lo - 1, hi + 1))?;
    assert_eq!(k, k_margin, "no qualifying pairs may appear outside the window");
    Ok(k)
}

/// K(V, W) = (−q)^{−k(V, W)} on Fl(2∞).
pub fn kernel_infinite(v: &BiFlag, w: &BiFlag) -> Result<KernelValue> {
    Ok(KernelValue::new(k_infinite(v, w)?, v.spec.q() as u64))
}

/// Gram matrix of a finite set of windowed flags, assembled on a common
/// enclosing window; entries agree with [`kernel_infinite`] by restriction
/// compatibility.
pub fn gram_matrix_biflags(flags: &[BiFlag]) -> Result<crate::kernel::GramMatrix> {
    let mut lo = 0i64;
    let mut hi = 0i64;
    for f in flags {
        lo = lo.min(f.lo);
        hi = hi.max(f.hi);
    }
    if lo == hi {
        hi = lo + 1;
    }
    let expanded: Vec<Flag> = flags.iter().map(|f| f.expand(lo, hi)).collect();
    crate::kernel::gram_matrix(&expanded)
}

/// How a windowed operator extends outside its block: as the identity.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OperatorKind {
    /// An element of GL(2∞): differs from the identity in finitely many entries.
    Finitary,
    /// The quotient block of an element of B(2∞); must be lower triangular.
    LowerTriangularBlock,
}

/// An invertible block acting on the quotient E_hi/E_lo, extended by the
/// identity outside the window.
#[derive(Clone, Debug)]
pub struct WindowedOperator {
    lo: i64,
    hi: i64,
    block: MatrixGF,
    kind: OperatorKind,
}

impl WindowedOperator {
    pub fn new(lo: i64, hi: i64, block: MatrixGF, kind: OperatorKind) -> Result<WindowedOperator> {
        if hi < lo || block.rows() != (hi - lo) as usize || block.cols() != (hi - lo) as usize {
            return Err(Error::InvalidOperator(format!(
                "block of shape {}x{} does not fit window ({}, {})",
                block.rows(),
                block.cols(),
                lo,
                hi
            )));
        }
        if !block.is_invertible() {
            return Err(Error::SingularMatrix);
        }
        if kind == OperatorKind::LowerTriangularBlock && !block.is_lower_triangular() {
            return Err(Error::InvalidOperator("block is not lower triangular".into()));
        }
        Ok(WindowedOperator { lo, hi, block, kind })
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn block(&self) -> &MatrixGF {
        &self.block
    }

    /// The block re-embedded in a larger window, identity outside.
    fn embed(&self, lo: i64, hi: i64) -> MatrixGF {
        assert!(lo <= self.lo && hi >= self.hi);
        let spec = self.block.spec();
        let d = (hi - lo) as usize;
        let offset = (self.lo - lo) as usize;
        let inner = (self.hi - self.lo) as usize;
        let mut out = MatrixGF::identity(spec, d);
        for r in 0..inner {
            for c in 0..inner {
                out.set(offset + r, offset + c, self.block.get(r, c));
            }
        }
        out
    }
}

/// Applies a windowed operator to a windowed flag: enlarge the flag's window
/// to enclose the operator, act on the quotient, renormalize.
pub fn act_window(g: &WindowedOperator, v: &BiFlag) -> Result<BiFlag> {
    if g.block.spec().q() != v.spec.q() {
        return Err(Error::SpecMismatch);
    }
    let lo = g.lo.min(v.lo);
    let mut hi = g.hi.max(v.hi);
    if lo == hi {
        hi = lo + 1;
    }
    let interior = v.expand(lo, hi);
    let block = g.embed(lo, hi);
    let moved = interior.transform(&block)?;
    biflag_from_window(lo, hi, moved)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flag::{enumerate_flags, DEFAULT_BUDGET};
    use num_rational::BigRational;
    use num_traits::One;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn spec2() -> Arc<FieldSpec> {
        FieldSpec::shared(2).unwrap()
    }

    /// Random windowed flag with a window of span ≤ 4 around zero.
    fn random_biflag<R: Rng>(spec: &Arc<FieldSpec>, rng: &mut R) -> BiFlag {
        let lo = rng.random_range(-3..=1);
        let d = rng.random_range(0..=4usize);
        let g = MatrixGF::random_invertible(spec, d, rng);
        let interior = Flag::standard(d, spec).transform(&g).unwrap();
        biflag_from_window(lo, lo + d as i64, interior).unwrap()
    }

    fn nonstandard_line_flag(spec: &Arc<FieldSpec>) -> BiFlag {
        // window (−1, 1): interior line span(e_0 + e_1) in the quotient
        let line = Subspace::from_rows(spec, vec![vec![spec.one(), spec.one()]]).unwrap();
        let interior = Flag::new(spec, 2, vec![line]).unwrap();
        biflag_from_window(-1, 1, interior).unwrap()
    }

    #[test]
    fn standard_flag_is_the_empty_window() {
        let spec = spec2();
        let e = biflag_standard(&spec);
        assert!(e.is_standard());
        assert_eq!(e.window(), (0, 0));
        assert_eq!(k_infinite(&e, &e).unwrap(), 0);
        assert!(kernel_infinite(&e, &e).unwrap().to_rational().is_one());
    }

    #[test]
    fn standard_interior_normalizes_to_empty_window() {
        let spec = spec2();
        let interior = Flag::standard(6, &spec);
        let b = biflag_from_window(-3, 3, interior).unwrap();
        assert_eq!(b, biflag_standard(&spec));
        // and the trivial window as well
        let b0 = biflag_from_window(0, 0, Flag::standard(0, &spec)).unwrap();
        assert_eq!(b0, biflag_standard(&spec));
    }

    #[test]
    fn nonstandard_line_keeps_its_window() {
        let spec = spec2();
        let b = nonstandard_line_flag(&spec);
        assert_eq!(b.window(), (-1, 1));
    }

    #[test]
    fn window_mismatch_rejected() {
        let spec = spec2();
        assert!(biflag_from_window(-1, 2, Flag::standard(2, &spec)).is_err());
    }

    #[test]
    fn padding_roundtrip_preserves_normal_form() {
        let spec3 = FieldSpec::shared(3).unwrap();
        let mut rng = StdRng::seed_from_u64(31);
        for spec in [spec2(), spec3] {
            for _ in 0..40 {
                let b = random_biflag(&spec, &mut rng);
                let pad_lo = rng.random_range(1..=3);
                let pad_hi = rng.random_range(1..=3);
                let (lo, hi) = b.window();
                let padded = b.expand(lo - pad_lo, hi + pad_hi);
                let back = biflag_from_window(lo - pad_lo, hi + pad_hi, padded).unwrap();
                assert_eq!(back, b);
            }
        }
    }

    #[test]
    fn kernel_against_the_standard_flag() {
        let spec = spec2();
        let e = biflag_standard(&spec);
        let b = nonstandard_line_flag(&spec);
        assert_eq!(k_infinite(&e, &b).unwrap(), 1);
        assert_eq!(
            kernel_infinite(&e, &b).unwrap().to_rational(),
            BigRational::new((-1).into(), 2.into())
        );
    }

    #[test]
    fn window_stability() {
        let spec = spec2();
        let e = biflag_standard(&spec);
        let b = nonstandard_line_flag(&spec);
        let k_small = k_pairs(&e.expand(-1, 1), &b.expand(-1, 1)).unwrap();
        let k_large = k_pairs(&e.expand(-5, 5), &b.expand(-5, 5)).unwrap();
        assert_eq!(k_small, k_large);
        assert_eq!(k_infinite(&e, &b).unwrap(), k_small);
    }

    #[test]
    fn restriction_compatibility_with_finite_flags() {
        // flags supported in a fixed window have the finite pair count
        let spec = spec2();
        for d in 2..=3usize {
            let flags = enumerate_flags(d, &spec, DEFAULT_BUDGET).unwrap();
            for v in &flags {
                for w in &flags {
                    let bv = biflag_from_window(-1, d as i64 - 1, v.clone()).unwrap();
                    let bw = biflag_from_window(-1, d as i64 - 1, w.clone()).unwrap();
                    assert_eq!(k_infinite(&bv, &bw).unwrap(), k_pairs(v, w).unwrap());
                }
            }
        }
    }

    #[test]
    fn diagonal_kernel_is_one() {
        let mut rng = StdRng::seed_from_u64(77);
        let spec = spec2();
        for _ in 0..30 {
            let b = random_biflag(&spec, &mut rng);
            assert!(kernel_infinite(&b, &b).unwrap().to_rational().is_one());
        }
    }

    #[test]
    fn identity_operator_fixes_flags() {
        let spec = spec2();
        let g = WindowedOperator::new(-1, 1, MatrixGF::identity(&spec, 2), OperatorKind::Finitary).unwrap();
        let b = nonstandard_line_flag(&spec);
        assert_eq!(act_window(&g, &b).unwrap(), b);
        assert_eq!(act_window(&g, &biflag_standard(&spec)).unwrap(), biflag_standard(&spec));
    }

    #[test]
    fn swap_block_moves_the_standard_flag() {
        let spec = spec2();
        let swap = MatrixGF::from_values(&spec, 2, 2, &[0, 1, 1, 0]);
        let g = WindowedOperator::new(-1, 1, swap, OperatorKind::Finitary).unwrap();
        let moved = act_window(&g, &biflag_standard(&spec)).unwrap();
        assert_eq!(moved.window(), (-1, 1));
        // interior line is span(e_1) in quotient coordinates
        let line = Subspace::from_rows(&spec, vec![vec![spec.zero(), spec.one()]]).unwrap();
        assert_eq!(moved.interior().subspace(1), line);
    }

    #[test]
    fn lower_triangular_blocks_are_validated() {
        let spec = spec2();
        let upper = MatrixGF::from_values(&spec, 2, 2, &[1, 1, 0, 1]);
        assert!(WindowedOperator::new(-1, 1, upper.clone(), OperatorKind::LowerTriangularBlock).is_err());
        assert!(WindowedOperator::new(-1, 1, upper, OperatorKind::Finitary).is_ok());
        let singular = MatrixGF::from_values(&spec, 2, 2, &[1, 1, 1, 1]);
        assert!(matches!(
            WindowedOperator::new(-1, 1, singular, OperatorKind::Finitary),
            Err(Error::SingularMatrix)
        ));
        let misshapen = MatrixGF::identity(&spec, 3);
        assert!(WindowedOperator::new(-1, 1, misshapen, OperatorKind::Finitary).is_err());
    }

    #[test]
    fn lower_triangular_action_fixes_the_standard_flag() {
        let spec = spec2();
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..20 {
            let block = MatrixGF::random_lower_triangular(&spec, 3, &mut rng);
            let g = WindowedOperator::new(-1, 2, block, OperatorKind::LowerTriangularBlock).unwrap();
            let moved = act_window(&g, &biflag_standard(&spec)).unwrap();
            assert_eq!(moved, biflag_standard(&spec));
        }
    }

    #[test]
    fn finitary_action_preserves_the_kernel() {
        let mut rng = StdRng::seed_from_u64(55);
        let spec = spec2();
        for _ in 0..50 {
            let v = random_biflag(&spec, &mut rng);
            let w = random_biflag(&spec, &mut rng);
            let lo = rng.random_range(-2..=0);
            let d = rng.random_range(1..=3usize);
            let block = MatrixGF::random_invertible(&spec, d, &mut rng);
            let g = WindowedOperator::new(lo, lo + d as i64, block, OperatorKind::Finitary).unwrap();
            let kv = kernel_infinite(&v, &w).unwrap();
            let moved = kernel_infinite(&act_window(&g, &v).unwrap(), &act_window(&g, &w).unwrap()).unwrap();
            assert_eq!(kv, moved);
        }
    }
}
