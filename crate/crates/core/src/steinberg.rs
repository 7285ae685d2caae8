//! The averaging operators Π_j, the Steinberg subspace as their joint kernel,
//! the B-invariant function η, exact PSD/rank certification, and the
//! identification of the projected delta function with a multiple of η.
//!
//! Everything here runs over exact rationals. Positive semidefiniteness with
//! rank deficiency is precisely where floating point cannot be trusted, so no
//! floating point appears on any verification path.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::flag::{Flag, FlagSpace, IncompleteFlag};
use crate::kernel::{kappa, kernel_value, GramMatrix, KernelValue};
use crate::linalg::MatrixGF;
use crate::rational::RationalMatrix;

/// A rational-valued function on an enumerated Fl(n, q).
#[derive(Clone)]
pub struct FlFunction {
    space: Arc<FlagSpace>,
    values: Vec<BigRational>,
}

impl FlFunction {
    pub fn new(space: &Arc<FlagSpace>, values: Vec<BigRational>) -> FlFunction {
        assert_eq!(values.len(), space.len());
        FlFunction { space: Arc::clone(space), values }
    }

    /// The indicator of a single flag.
    pub fn delta(space: &Arc<FlagSpace>, flag: &Flag) -> FlFunction {
        let mut values = vec![BigRational::zero(); space.len()];
        let idx = space.index_of(flag).expect("flag belongs to the space");
        values[idx] = BigRational::one();
        FlFunction { space: Arc::clone(space), values }
    }

    pub fn constant(space: &Arc<FlagSpace>, value: BigRational) -> FlFunction {
        FlFunction { space: Arc::clone(space), values: vec![value; space.len()] }
    }

    pub fn space(&self) -> &Arc<FlagSpace> {
        &self.space
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn value_at(&self, flag: &Flag) -> Option<&BigRational> {
        self.space.index_of(flag).map(|i| &self.values[i])
    }
}

/// A rational-valued function on Fl_j(n), indexed by incomplete flags.
pub struct FljFunction {
    pub omitted: usize,
    pub flags: Vec<IncompleteFlag>,
    pub values: Vec<BigRational>,
}

/// Π_j f (W) = 1/(q+1) · Σ over the fiber of W of f(V).
pub fn pi_j_apply(f: &FlFunction, j: usize) -> Result<FljFunction> {
    let space = f.space();
    let fibers = space.fibers(j)?;
    let scale = BigRational::new(BigInt::one(), BigInt::from(space.q() + 1));
    let mut flags = Vec::with_capacity(fibers.len());
    let mut values = Vec::with_capacity(fibers.len());
    for (w, members) in fibers {
        let mut acc = BigRational::zero();
        for i in members {
            acc += &f.values[i];
        }
        flags.push(w);
        values.push(acc * &scale);
    }
    Ok(FljFunction { omitted: j, flags, values })
}

/// The B-invariant function η(W) = (−q)^{−κ(W)}.
pub fn eta(space: &Arc<FlagSpace>) -> FlFunction {
    let q = space.q();
    let values = space
        .flags()
        .iter()
        .map(|w| KernelValue::new(kappa(w), q).to_rational())
        .collect();
    FlFunction { space: Arc::clone(space), values }
}

/// Stacks the (unscaled) fiber-sum constraints of every Π_j into one integer
/// matrix with a 1 in each fiber member's column.
fn stacked_pi_matrix(space: &FlagSpace) -> RationalMatrix {
    let m = space.len();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for j in 1..space.n() {
        for (_, members) in space.fibers(j).expect("j in range") {
            let mut row = vec![BigRational::zero(); m];
            for i in members {
                row[i] = BigRational::one();
            }
            rows.push(row);
        }
    }
    if rows.is_empty() {
        RationalMatrix::zeros(0, m)
    } else {
        RationalMatrix::from_rows(rows)
    }
}

/// A basis (one function per row) of ∩_j ker Π_j, the Steinberg subspace.
///
/// The 1/(q+1) scale of Π_j is dropped; kernels do not see it.
pub fn steinberg_basis(space: &FlagSpace) -> RationalMatrix {
    stacked_pi_matrix(space).nullspace()
}

/// Dimension of the space of functions that are constant on every Schubert
/// cell and killed by every Π_j. The unknowns are one value per cell; each
/// fiber contributes the constraint Σ_{V in fiber} c_{cell(V)} = 0.
pub fn b_invariant_dim_in_steinberg(space: &FlagSpace) -> usize {
    let cells = space.cells();
    let n_cells = cells.len();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for j in 1..space.n() {
        for (_, members) in space.fibers(j).expect("j in range") {
            let mut row = vec![BigRational::zero(); n_cells];
            for i in members {
                let cell_pos = cells.partition_point(|(_, range)| range.end <= i);
                row[cell_pos] += BigRational::one();
            }
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return n_cells;
    }
    let m = RationalMatrix::from_rows(rows);
    n_cells - m.rank()
}

/// Exact PSD certificate from symmetric congruence elimination.
#[derive(Clone, Debug)]
pub struct PsdCertificate {
    pub is_psd: bool,
    /// Number of positive pivots; equals the matrix rank when PSD.
    pub rank: usize,
    /// The positive pivots in elimination order.
    pub pivots: Vec<BigRational>,
    /// When not PSD: indices of a principal submatrix with negative
    /// determinant.
    pub negative_minor: Option<Vec<usize>>,
}

/// Symmetric (congruence) elimination over the rationals.
///
/// Walks the diagonal in order. A positive pivot is eliminated; a zero pivot
/// must have an all-zero residual row (otherwise a 2×2 principal submatrix of
/// the Schur complement is indefinite); a negative pivot refutes PSD outright.
pub fn psd_rank(g: &GramMatrix) -> Result<PsdCertificate> {
    if !g.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let m = g.size();
    let mut a: Vec<BigRational> = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            a.push(g.get(i, j).clone());
        }
    }
    let mut eliminated: Vec<usize> = Vec::new();
    let mut pivots: Vec<BigRational> = Vec::new();
    for t in 0..m {
        let d = a[t * m + t].clone();
        if d.is_zero() {
            for j in (t + 1)..m {
                if !a[t * m + j].is_zero() {
                    let mut minor = eliminated.clone();
                    minor.push(t);
                    minor.push(j);
                    return Ok(PsdCertificate {
                        is_psd: false,
                        rank: pivots.len(),
                        pivots,
                        negative_minor: Some(minor),
                    });
                }
            }
            continue;
        }
        if d.is_negative() {
            let mut minor = eliminated.clone();
            minor.push(t);
            return Ok(PsdCertificate {
                is_psd: false,
                rank: pivots.len(),
                pivots,
                negative_minor: Some(minor),
            });
        }
        // positive pivot: Schur-complement update of the residual block
        for i in (t + 1)..m {
            let f = &a[t * m + i] / &d;
            if f.is_zero() {
                continue;
            }
            for j in (t + 1)..m {
                let sub = &f * &a[t * m + j];
                a[i * m + j] -= sub;
            }
        }
        eliminated.push(t);
        pivots.push(d);
    }
    Ok(PsdCertificate { is_psd: true, rank: pivots.len(), pivots, negative_minor: None })
}

/// Result of projecting δ_E orthogonally onto the Steinberg subspace.
#[derive(Clone, Debug)]
pub struct ProjectionReport {
    /// The scalar s with P δ_E = s · η.
    pub scale: BigRational,
    /// max |P δ_E − s·η|; exactly zero when the identification holds.
    pub residual: BigRational,
    pub steinberg_dim: usize,
    pub flag_count: usize,
}

impl ProjectionReport {
    /// The homogeneity prediction s = dim(Steinberg) / |Fl(n)|.
    pub fn expected_scale(&self) -> BigRational {
        BigRational::new(BigInt::from(self.steinberg_dim), BigInt::from(self.flag_count))
    }

    pub fn scale_matches_dimension_ratio(&self) -> bool {
        self.scale == self.expected_scale()
    }
}

/// Projects the delta function at the standard flag onto ∩_j ker Π_j and
/// identifies the image as a multiple of η.
pub fn project_delta(space: &Arc<FlagSpace>) -> ProjectionReport {
    let basis = steinberg_basis(space);
    let dim = basis.rows();
    let m = space.len();
    let e_idx = space.standard_index();

    // P δ_E = Bᵀ (B Bᵀ)⁻¹ B δ_E ; B δ_E is the e-th column of B.
    let gram = basis.mul(&basis.transpose());
    let b_delta: Vec<BigRational> = (0..dim).map(|r| basis.get(r, e_idx).clone()).collect();
    let x = gram.solve(&b_delta).expect("basis rows are independent");
    let projected = basis.transpose().mul_vec(&x);

    let eta_fn = eta(space);
    // η(E) = 1, so the scalar is the value of the projection at E
    let scale = projected[e_idx].clone();
    let mut residual = BigRational::zero();
    for i in 0..m {
        let diff = (&projected[i] - &scale * &eta_fn.values[i]).abs();
        if diff > residual {
            residual = diff;
        }
    }
    ProjectionReport { scale, residual, steinberg_dim: dim, flag_count: m }
}

/// Outcome of the randomized GL- and B-invariance checks; failures are
/// counted, not thrown.
#[derive(Clone, Debug)]
pub struct InvarianceReport {
    pub samples: usize,
    pub kernel_mismatches: usize,
    pub eta_mismatches: usize,
}

impl InvarianceReport {
    pub fn all_pass(&self) -> bool {
        self.kernel_mismatches == 0 && self.eta_mismatches == 0
    }
}

/// For `samples` random invertible g and flag pairs, checks
/// K(Vg, Wg) = K(V, W); for random lower-triangular g checks η∘g = η.
pub fn invariance_suite(space: &FlagSpace, samples: usize, seed: u64) -> InvarianceReport {
    let mut rng = StdRng::seed_from_u64(seed);
    let spec = space.spec();
    let n = space.n();
    let flags = space.flags();
    let mut kernel_mismatches = 0;
    let mut eta_mismatches = 0;

    for _ in 0..samples {
        let g = MatrixGF::random_invertible(spec, n, &mut rng);
        let v = &flags[rng.random_range(0..flags.len())];
        let w = &flags[rng.random_range(0..flags.len())];
        let lhs = kernel_value(&v.transform(&g).unwrap(), &w.transform(&g).unwrap()).unwrap();
        let rhs = kernel_value(v, w).unwrap();
        if lhs != rhs {
            kernel_mismatches += 1;
        }
    }

    for _ in 0..samples {
        let g = MatrixGF::random_lower_triangular(spec, n, &mut rng);
        for w in flags {
            if kappa(&w.transform(&g).unwrap()) != kappa(w) {
                eta_mismatches += 1;
            }
        }
    }

    InvarianceReport { samples, kernel_mismatches, eta_mismatches }
}
