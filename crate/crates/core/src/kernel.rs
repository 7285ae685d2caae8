//! The pair-counting function k(V, W), the reproducing kernel
//! K(V, W) = (−q)^{−k(V, W)}, the cell function κ, and exact Gram matrices.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::flag::Flag;
use crate::gfq::FieldElement;
use crate::linalg::RowReducer;

/// A kernel value carried as its exponent: K = (−q)^{−k}.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct KernelValue {
    k: usize,
    q: u64,
}

impl KernelValue {
    pub fn new(k: usize, q: u64) -> KernelValue {
        KernelValue { k, q }
    }

    pub fn exponent(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// −1 for odd exponents, +1 for even ones.
    pub fn sign(&self) -> i8 {
        if self.k % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// The exact rational (−q)^{−k}.
    pub fn to_rational(&self) -> BigRational {
        let num = BigInt::from(self.sign());
        let den = BigInt::from(self.q).pow(self.k as u32);
        BigRational::new(num, den)
    }
}

fn check_instance(v: &Flag, w: &Flag) -> Result<()> {
    if v.n() != w.n() || v.spec().q() != w.spec().q() {
        return Err(Error::DimensionMismatch);
    }
    Ok(())
}

/// dim(V_i ∩ W_j) for 0 ≤ i, j ≤ n, as a flat (n+1)² table.
///
/// Works on flag-adapted bases: for each i the reducer is seeded with
/// v_1 … v_i and the rows of W are fed in one at a time, so the whole table
/// costs O(n²) row reductions.
fn intersection_table(v_rows: &[Vec<FieldElement>], w_rows: &[Vec<FieldElement>], flag: &Flag) -> Vec<usize> {
    let n = flag.n();
    let spec = flag.spec();
    let mut table = vec![0usize; (n + 1) * (n + 1)];
    for i in 0..=n {
        let mut red = RowReducer::new(spec, n);
        for row in &v_rows[..i] {
            red.add_row(row);
        }
        for (j, w_row) in w_rows.iter().enumerate() {
            red.add_row(w_row);
            // dim(V_i ∩ W_{j+1}) = i + (j + 1) − rank(V_i + W_{j+1})
            table[i * (n + 1) + (j + 1)] = i + (j + 1) - red.rank();
        }
    }
    table
}

fn count_pairs(table: &[usize], n: usize) -> usize {
    let w = n + 1;
    let mut count = 0;
    for i in 0..n {
        for j in 0..n {
            if table[i * w + j] == table[(i + 1) * w + (j + 1)] {
                count += 1;
            }
        }
    }
    count
}

/// The number of pairs (i, j), 0 ≤ i, j < n, with
/// dim(V_i ∩ W_j) = dim(V_{i+1} ∩ W_{j+1}).
pub fn k_pairs(v: &Flag, w: &Flag) -> Result<usize> {
    check_instance(v, w)?;
    let v_rows = v.adapted_basis();
    let w_rows = w.adapted_basis();
    Ok(count_pairs(&intersection_table(&v_rows, &w_rows, v), v.n()))
}

/// K(V, W) = (−q)^{−k(V, W)}.
pub fn kernel_value(v: &Flag, w: &Flag) -> Result<KernelValue> {
    Ok(KernelValue::new(k_pairs(v, w)?, v.spec().q() as u64))
}

/// κ(W) = k(E, W); constant on Schubert cells, equal to the inversion count.
pub fn kappa(w: &Flag) -> usize {
    let e = Flag::standard(w.n(), w.spec());
    k_pairs(&e, w).expect("standard flag shares the instance")
}

/// Exact symmetric Gram matrix of kernel values.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    size: usize,
    entries: Vec<BigRational>,
    labels: Vec<Flag>,
}

impl GramMatrix {
    /// Assembles only the upper triangle and mirrors it; symmetry of the
    /// kernel itself is checked separately through [`GramMatrix::new_full`].
    pub fn new(flags: &[Flag]) -> Result<GramMatrix> {
        Self::assemble(flags, false)
    }

    /// Computes every entry independently, for use by symmetry tests.
    pub fn new_full(flags: &[Flag]) -> Result<GramMatrix> {
        Self::assemble(flags, true)
    }

    fn assemble(flags: &[Flag], full: bool) -> Result<GramMatrix> {
        let m = flags.len();
        for w in flags.iter().skip(1) {
            check_instance(&flags[0], w)?;
        }
        let adapted: Vec<Vec<Vec<FieldElement>>> = flags.iter().map(|f| f.adapted_basis()).collect();
        let q = flags.first().map_or(2, |f| f.spec().q() as u64);
        let mut entries = vec![BigRational::from_integer(BigInt::from(0)); m * m];
        for a in 0..m {
            let start = if full { 0 } else { a };
            for b in start..m {
                let n = flags[a].n();
                let table = intersection_table(&adapted[a], &adapted[b], &flags[a]);
                let k = count_pairs(&table, n);
                let val = KernelValue::new(k, q).to_rational();
                entries[a * m + b] = val.clone();
                if !full {
                    entries[b * m + a] = val;
                }
            }
        }
        Ok(GramMatrix { size: m, entries, labels: flags.to_vec() })
    }

    /// Builds a Gram matrix from raw entries (used by fault-injection tests).
    pub fn from_entries(size: usize, entries: Vec<BigRational>, labels: Vec<Flag>) -> Result<GramMatrix> {
        if entries.len() != size * size {
            return Err(Error::AmbientMismatch(entries.len(), size * size));
        }
        Ok(GramMatrix { size, entries, labels })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.entries[i * self.size + j] = v;
    }

    pub fn labels(&self) -> &[Flag] {
        &self.labels
    }

    pub fn is_symmetric(&self) -> bool {
        for i in 0..self.size {
            for j in (i + 1)..self.size {
                if self.get(i, j) != self.get(j, i) {
                    return false;
                }
            }
        }
        true
    }
}

/// Assembles the Gram matrix of a flag list (upper triangle + mirror).
pub fn gram_matrix(flags: &[Flag]) -> Result<GramMatrix> {
    GramMatrix::new(flags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flag::{cell_points, enumerate_flags, DEFAULT_BUDGET};
    use crate::gfq::FieldSpec;
    use crate::linalg::{MatrixGF, Subspace};
    use crate::perm::enumerate_sn;
    use num_traits::One;
    use rand::rngs::StdRng;
    use rand::SeedableRng;
    use std::collections::HashSet;
    use std::sync::Arc;

    fn flag_of_line(spec: &Arc<FieldSpec>, vals: &[u64]) -> Flag {
        let line = Subspace::from_rows(spec, vec![vals.iter().map(|&v| spec.elem(v)).collect()]).unwrap();
        Flag::new(spec, 2, vec![line]).unwrap()
    }

    #[test]
    fn diagonal_vanishes() {
        for (n, q) in [(2usize, 2u64), (3, 2), (3, 3)] {
            let spec = FieldSpec::shared(q).unwrap();
            for f in enumerate_flags(n, &spec, DEFAULT_BUDGET).unwrap() {
                assert_eq!(k_pairs(&f, &f).unwrap(), 0);
            }
        }
    }

    #[test]
    fn two_distinct_lines_in_the_plane() {
        let spec = FieldSpec::shared(2).unwrap();
        let v = flag_of_line(&spec, &[1, 0]);
        let w = flag_of_line(&spec, &[0, 1]);
        assert_eq!(k_pairs(&v, &w).unwrap(), 1);
        let kv = kernel_value(&v, &w).unwrap();
        assert_eq!(kv.to_rational(), BigRational::new(BigInt::from(-1), BigInt::from(2)));
        assert_eq!(kernel_value(&v, &v).unwrap().to_rational(), BigRational::one());
    }

    #[test]
    fn kappa_matches_inversions_on_marked_flags() {
        for q in [2u64, 3] {
            let spec = FieldSpec::shared(q).unwrap();
            for sigma in enumerate_sn(4).unwrap() {
                let e_sigma = Flag::from_perm(&sigma, &spec);
                assert_eq!(kappa(&e_sigma), sigma.inversions());
            }
        }
    }

    #[test]
    fn kappa_constant_on_cells() {
        for (n, q) in [(2usize, 2u64), (3, 2), (4, 2)] {
            let spec = FieldSpec::shared(q).unwrap();
            for sigma in enumerate_sn(n).unwrap() {
                let expected = sigma.inversions();
                for f in cell_points(&sigma, &spec, DEFAULT_BUDGET).unwrap() {
                    assert_eq!(kappa(&f), expected);
                }
            }
        }
    }

    #[test]
    fn kappa_of_off_axis_line() {
        let spec = FieldSpec::shared(2).unwrap();
        assert_eq!(kappa(&flag_of_line(&spec, &[1, 1])), 1);
        assert_eq!(kappa(&Flag::standard(2, &spec)), 0);
    }

    #[test]
    fn symmetry_exhaustive_small() {
        for (n, q) in [(2usize, 2u64), (2, 3), (3, 2)] {
            let spec = FieldSpec::shared(q).unwrap();
            let flags = enumerate_flags(n, &spec, DEFAULT_BUDGET).unwrap();
            for v in &flags {
                for w in &flags {
                    assert_eq!(k_pairs(v, w).unwrap(), k_pairs(w, v).unwrap());
                }
            }
        }
    }

    #[test]
    fn symmetry_sampled_n4() {
        let spec = FieldSpec::shared(2).unwrap();
        let flags = enumerate_flags(4, &spec, DEFAULT_BUDGET).unwrap();
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..200 {
            use rand::Rng;
            let a = &flags[rng.random_range(0..flags.len())];
            let b = &flags[rng.random_range(0..flags.len())];
            assert_eq!(k_pairs(a, b).unwrap(), k_pairs(b, a).unwrap());
        }
    }

    #[test]
    fn gl_invariance_sampled() {
        let mut rng = StdRng::seed_from_u64(17);
        for (n, q) in [(2usize, 3u64), (3, 2)] {
            let spec = FieldSpec::shared(q).unwrap();
            let flags = enumerate_flags(n, &spec, DEFAULT_BUDGET).unwrap();
            for _ in 0..100 {
                use rand::Rng;
                let g = MatrixGF::random_invertible(&spec, n, &mut rng);
                let v = &flags[rng.random_range(0..flags.len())];
                let w = &flags[rng.random_range(0..flags.len())];
                assert_eq!(
                    k_pairs(&v.transform(&g).unwrap(), &w.transform(&g).unwrap()).unwrap(),
                    k_pairs(v, w).unwrap()
                );
            }
        }
    }

    #[test]
    fn dimension_condition_equals_subspace_condition() {
        // oracle: compare the dimension test against literal vector sets
        let spec = FieldSpec::shared(2).unwrap();
        let flags = enumerate_flags(3, &spec, DEFAULT_BUDGET).unwrap();
        let vectors = |s: &Subspace| -> HashSet<Vec<u16>> {
            let n = s.ambient();
            let mut out = HashSet::new();
            let total = crate::perm::q_pow(2, n);
            for code in 0..total {
                let mut c = code;
                let v: Vec<_> = (0..n)
                    .map(|_| {
                        let e = spec.elem((c % 2) as u64);
                        c /= 2;
                        e
                    })
                    .collect();
                if s.contains_vector(&v).unwrap() {
                    out.insert(v.iter().map(|e| e.value()).collect());
                }
            }
            out
        };
        for v in flags.iter().take(6) {
            for w in flags.iter().take(6) {
                for i in 0..3 {
                    for j in 0..3 {
                        let lo_v = v.subspace(i);
                        let lo_w = w.subspace(j);
                        let hi_v = v.subspace(i + 1);
                        let hi_w = w.subspace(j + 1);
                        let dim_eq = lo_v.intersect_dim(&lo_w).unwrap() == hi_v.intersect_dim(&hi_w).unwrap();
                        let lo_set: HashSet<_> =
                            vectors(&lo_v).intersection(&vectors(&lo_w)).cloned().collect();
                        let hi_set: HashSet<_> =
                            vectors(&hi_v).intersection(&vectors(&hi_w)).cloned().collect();
                        assert_eq!(dim_eq, lo_set == hi_set);
                    }
                }
            }
        }
    }

    #[test]
    fn gram_of_single_flag() {
        let spec = FieldSpec::shared(2).unwrap();
        let g = gram_matrix(&[Flag::standard(2, &spec)]).unwrap();
        assert_eq!(g.size(), 1);
        assert!(g.get(0, 0).is_one());
    }

    #[test]
    fn gram_of_projective_line() {
        let spec = FieldSpec::shared(2).unwrap();
        let flags = enumerate_flags(2, &spec, DEFAULT_BUDGET).unwrap();
        let g = gram_matrix(&flags).unwrap();
        let minus_half = BigRational::new(BigInt::from(-1), BigInt::from(2));
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    assert!(g.get(i, j).is_one());
                } else {
                    assert_eq!(g.get(i, j), &minus_half);
                }
            }
        }
    }

    #[test]
    fn full_assembly_is_symmetric() {
        let spec = FieldSpec::shared(2).unwrap();
        let flags = enumerate_flags(3, &spec, DEFAULT_BUDGET).unwrap();
        let full = GramMatrix::new_full(&flags).unwrap();
        assert!(full.is_symmetric());
        let mirrored = gram_matrix(&flags).unwrap();
        for i in 0..flags.len() {
            for j in 0..flags.len() {
                assert_eq!(full.get(i, j), mirrored.get(i, j));
            }
        }
    }

    #[test]
    fn mismatched_instances_rejected() {
        let spec2 = FieldSpec::shared(2).unwrap();
        let spec3 = FieldSpec::shared(3).unwrap();
        let v = Flag::standard(2, &spec2);
        let w = Flag::standard(2, &spec3);
        assert_eq!(k_pairs(&v, &w).unwrap_err(), Error::DimensionMismatch);
        let u = Flag::standard(3, &spec2);
        assert_eq!(k_pairs(&v, &u).unwrap_err(), Error::DimensionMismatch);
    }
}
