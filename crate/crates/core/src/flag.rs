//! Complete and incomplete flags in F_q^n, Schubert cells, and the fibers of
//! the forgetting maps.
//!
//! The variety Fl(n) is materialized as the disjoint union of Schubert cells
//! X^σ over σ ∈ S_n. Each cell is swept out by a star pattern: row j of a
//! generating collection is e_{σ(j)} plus a free coefficient in every column
//! c < σ(j) whose unit sits in a later row — one free position per inversion
//! of σ, so |X^σ| = q^{I(σ)} by construction.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Range;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gfq::{FieldElement, FieldSpec};
use crate::linalg::{RowReducer, Subspace};
use crate::perm::{enumerate_sn, q_factorial, q_pow, Permutation};

/// Default cap on the number of flags an enumeration may materialize.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// A complete flag V_0 ⊂ V_1 ⊂ … ⊂ V_n; only V_1 … V_{n−1} are stored.
#[derive(Clone)]
pub struct Flag {
    spec: Arc<FieldSpec>,
    n: usize,
    subspaces: Vec<Subspace>,
}

impl PartialEq for Flag {
    fn eq(&self, other: &Self) -> bool {
        self.spec.q() == other.spec.q() && self.n == other.n && self.subspaces == other.subspaces
    }
}

impl Eq for Flag {}

impl Hash for Flag {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.spec.q().hash(state);
        self.n.hash(state);
        self.subspaces.hash(state);
    }
}

impl fmt::Debug for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Flag(n={}, q={})", self.n, self.spec.q())
    }
}

impl Flag {
    /// The standard flag E with E_j = span(e_1, …, e_j).
    pub fn standard(n: usize, spec: &Arc<FieldSpec>) -> Flag {
        Flag::from_perm(&Permutation::identity(n), spec)
    }

    /// The flag E^σ with E^σ_j = span(e_{σ(1)}, …, e_{σ(j)}).
    pub fn from_perm(sigma: &Permutation, spec: &Arc<FieldSpec>) -> Flag {
        let n = sigma.n();
        let mut subspaces = Vec::with_capacity(n.saturating_sub(1));
        for j in 1..n {
            let rows: Vec<Vec<FieldElement>> = (1..=j).map(|i| unit_row(spec, n, sigma.image(i))).collect();
            subspaces.push(Subspace::from_rows(spec, rows).expect("unit rows share the spec"));
        }
        Flag { spec: Arc::clone(spec), n, subspaces }
    }

    /// Validating constructor for externally supplied data.
    pub fn new(spec: &Arc<FieldSpec>, n: usize, subspaces: Vec<Subspace>) -> Result<Flag> {
        if subspaces.len() + 1 != n.max(1) {
            return Err(Error::InvalidFlag(format!(
                "expected {} intermediate subspaces for n = {}, got {}",
                n.max(1) - 1,
                n,
                subspaces.len()
            )));
        }
        for (idx, s) in subspaces.iter().enumerate() {
            let j = idx + 1;
            if s.spec().q() != spec.q() {
                return Err(Error::SpecMismatch);
            }
            if s.ambient() != n {
                return Err(Error::AmbientMismatch(s.ambient(), n));
            }
            if s.dim() != j {
                return Err(Error::InvalidFlag(format!("subspace {} has dimension {}", j, s.dim())));
            }
            if idx > 0 && subspaces[idx - 1].intersect_dim(s)? != j - 1 {
                return Err(Error::InvalidFlag(format!("subspace {} does not contain its predecessor", j)));
            }
        }
        Ok(Flag { spec: Arc::clone(spec), n, subspaces })
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// V_j for 0 ≤ j ≤ n; the ends are synthesized.
    pub fn subspace(&self, j: usize) -> Subspace {
        if j == 0 {
            Subspace::zero(&self.spec, self.n)
        } else if j == self.n {
            Subspace::full(&self.spec, self.n)
        } else {
            self.subspaces[j - 1].clone()
        }
    }

    pub fn subspaces(&self) -> &[Subspace] {
        &self.subspaces
    }

    /// Image flag under the row action of an invertible matrix.
    pub fn transform(&self, g: &crate::linalg::MatrixGF) -> Result<Flag> {
        let subspaces = self
            .subspaces
            .iter()
            .map(|s| s.transform(g))
            .collect::<Result<Vec<_>>>()?;
        Ok(Flag { spec: Arc::clone(&self.spec), n: self.n, subspaces })
    }

    /// Forgets V_j, producing a point of Fl_j(n).
    pub fn forget(&self, j: usize) -> Result<IncompleteFlag> {
        if j == 0 || j >= self.n {
            return Err(Error::IndexOutOfRange { index: j, max: self.n.saturating_sub(1) });
        }
        let mut subspaces = self.subspaces.clone();
        subspaces.remove(j - 1);
        Ok(IncompleteFlag { spec: Arc::clone(&self.spec), n: self.n, omitted: j, subspaces })
    }

    /// The table dim(E_i ∩ V_j) against the standard flag.
    pub fn rank_matrix(&self) -> RankMatrix {
        RankMatrix::new(self)
    }

    /// The permutation σ with V ∈ X^σ, recovered from the rank matrix: σ(j)
    /// is the unique i where the i × j corner gains a unit over its three
    /// neighbors.
    pub fn cell(&self) -> Permutation {
        let rm = self.rank_matrix();
        let n = self.n;
        let mut word = vec![0usize; n];
        for j in 1..=n {
            for i in 1..=n {
                let gain = rm.get(i, j) + rm.get(i - 1, j - 1);
                let rest = rm.get(i - 1, j) + rm.get(i, j - 1);
                if gain == rest + 1 {
                    word[j - 1] = i;
                    break;
                }
            }
        }
        Permutation::from_word(word).expect("rank matrix determines a permutation")
    }

    /// A basis v_1, …, v_n with V_j = span(v_1, …, v_j).
    pub(crate) fn adapted_basis(&self) -> Vec<Vec<FieldElement>> {
        let mut red = RowReducer::new(&self.spec, self.n);
        let mut out = Vec::with_capacity(self.n);
        for j in 1..=self.n {
            let s = self.subspace(j);
            for r in 0..s.dim() {
                if red.add_row(s.basis().row(r)) {
                    out.push(s.basis().row(r).to_vec());
                    break;
                }
            }
            debug_assert_eq!(out.len(), j);
        }
        out
    }
}

fn unit_row(spec: &Arc<FieldSpec>, n: usize, col: usize) -> Vec<FieldElement> {
    let mut row = vec![spec.zero(); n];
    row[col - 1] = spec.one();
    row
}

/// A flag with the dimension-j subspace forgotten.
#[derive(Clone)]
pub struct IncompleteFlag {
    spec: Arc<FieldSpec>,
    n: usize,
    omitted: usize,
    subspaces: Vec<Subspace>,
}

impl PartialEq for IncompleteFlag {
    fn eq(&self, other: &Self) -> bool {
        self.spec.q() == other.spec.q()
            && self.n == other.n
            && self.omitted == other.omitted
            && self.subspaces == other.subspaces
    }
}

impl Eq for IncompleteFlag {}

impl Hash for IncompleteFlag {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.spec.q().hash(state);
        self.n.hash(state);
        self.omitted.hash(state);
        self.subspaces.hash(state);
    }
}

impl fmt::Debug for IncompleteFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IncompleteFlag(n={}, q={}, omitted={})", self.n, self.spec.q(), self.omitted)
    }
}

impl IncompleteFlag {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn omitted(&self) -> usize {
        self.omitted
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    /// W_i for i ≠ omitted; the ends are synthesized.
    pub fn subspace(&self, i: usize) -> Subspace {
        assert_ne!(i, self.omitted, "subspace {} was forgotten", i);
        if i == 0 {
            Subspace::zero(&self.spec, self.n)
        } else if i == self.n {
            Subspace::full(&self.spec, self.n)
        } else if i < self.omitted {
            self.subspaces[i - 1].clone()
        } else {
            self.subspaces[i - 2].clone()
        }
    }

    /// The q + 1 completions, one per line in the 2-dimensional quotient
    /// W_{j+1} / W_{j−1}.
    pub fn fiber(&self) -> Vec<Flag> {
        let spec = &self.spec;
        let j = self.omitted;
        let below = self.subspace(j - 1);
        let above = self.subspace(j + 1);
        let mut red = RowReducer::new(spec, self.n);
        red.seed_subspace(&below);
        let mut ext: Vec<Vec<FieldElement>> = Vec::new();
        for r in 0..above.dim() {
            let row = above.basis().row(r);
            if red.add_row(row) {
                ext.push(row.to_vec());
            }
        }
        debug_assert_eq!(ext.len(), 2, "quotient W_{{j+1}}/W_{{j-1}} is 2-dimensional");
        let u = &ext[0];
        let v = &ext[1];
        let mut out = Vec::with_capacity(spec.q() as usize + 1);
        for t in spec.elements() {
            let w: Vec<FieldElement> = u
                .iter()
                .zip(v)
                .map(|(&a, &b)| spec.add_raw(a, spec.mul_raw(t, b)))
                .collect();
            out.push(self.complete_with(&below, w));
        }
        out.push(self.complete_with(&below, v.clone()));
        out
    }

    fn complete_with(&self, below: &Subspace, extra: Vec<FieldElement>) -> Flag {
        let mut rows: Vec<Vec<FieldElement>> = (0..below.dim()).map(|r| below.basis().row(r).to_vec()).collect();
        rows.push(extra);
        let y = Subspace::from_rows(&self.spec, rows).expect("rows share the spec");
        debug_assert_eq!(y.dim(), self.omitted);
        let mut subspaces = self.subspaces.clone();
        subspaces.insert(self.omitted - 1, y);
        Flag { spec: Arc::clone(&self.spec), n: self.n, subspaces }
    }
}

/// The table r[i][j] = dim(E_i ∩ V_j), 0 ≤ i, j ≤ n.
pub struct RankMatrix {
    n: usize,
    table: Vec<usize>,
}

impl RankMatrix {
    pub fn new(flag: &Flag) -> RankMatrix {
        let n = flag.n;
        let standard = Flag::standard(n, &flag.spec);
        let mut table = vec![0usize; (n + 1) * (n + 1)];
        for i in 0..=n {
            let ei = standard.subspace(i);
            for j in 0..=n {
                let d = ei.intersect_dim(&flag.subspace(j)).expect("same instance");
                table[i * (n + 1) + j] = d;
            }
        }
        let rm = RankMatrix { n, table };
        rm.assert_invariants();
        rm
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.table[i * (self.n + 1) + j]
    }

    fn assert_invariants(&self) {
        let n = self.n;
        for j in 0..=n {
            assert_eq!(self.get(n, j), j);
            assert_eq!(self.get(j, n), j);
            for i in 1..=n {
                let (prev, cur) = (self.get(i - 1, j), self.get(i, j));
                assert!(cur >= prev && cur - prev <= 1);
            }
        }
        for i in 0..=n {
            for j in 1..=n {
                let (prev, cur) = (self.get(i, j - 1), self.get(i, j));
                assert!(cur >= prev && cur - prev <= 1);
            }
        }
    }
}

/// Free-coefficient positions of the Schubert pattern for σ: (row j, column c)
/// with c < σ(j) and the unit of column c in a later row; one per inversion.
fn star_positions(sigma: &Permutation) -> Vec<(usize, usize)> {
    let n = sigma.n();
    let mut row_of_col = vec![0usize; n + 1];
    for j in 1..=n {
        row_of_col[sigma.image(j)] = j;
    }
    let mut out = Vec::new();
    for j in 1..=n {
        for c in 1..sigma.image(j) {
            if row_of_col[c] > j {
                out.push((j, c));
            }
        }
    }
    out
}

/// Materializes the Schubert cell X^σ; returns exactly q^{I(σ)} distinct
/// flags, in lexicographic order of the star assignment.
pub fn cell_points(sigma: &Permutation, spec: &Arc<FieldSpec>, budget: u64) -> Result<Vec<Flag>> {
    let n = sigma.n();
    let stars = star_positions(sigma);
    debug_assert_eq!(stars.len(), sigma.inversions());
    let count = q_pow(spec.q() as u64, stars.len());
    if count > budget as u128 {
        return Err(Error::BudgetExceeded { required: count, budget });
    }
    let elems = spec.elements();
    let mut assignment = vec![0usize; stars.len()];
    let mut out = Vec::with_capacity(count as usize);
    loop {
        let mut rows: Vec<Vec<FieldElement>> = (1..=n).map(|j| unit_row(spec, n, sigma.image(j))).collect();
        for (idx, &(j, c)) in stars.iter().enumerate() {
            rows[j - 1][c - 1] = elems[assignment[idx]];
        }
        let mut subspaces = Vec::with_capacity(n.saturating_sub(1));
        for k in 1..n {
            subspaces.push(Subspace::from_rows(spec, rows[..k].to_vec())?);
        }
        out.push(Flag { spec: Arc::clone(spec), n, subspaces });

        // odometer over star values, first position most significant
        let mut pos = stars.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            assignment[pos] += 1;
            if assignment[pos] < elems.len() {
                break;
            }
            assignment[pos] = 0;
        }
    }
}

/// Enumerates Fl(n) as the disjoint union of Schubert cells, σ in
/// lexicographic order. The Poincaré sum Σ_σ q^{I(σ)} is checked against the
/// budget before anything is materialized.
pub fn enumerate_flags(n: usize, spec: &Arc<FieldSpec>, budget: u64) -> Result<Vec<Flag>> {
    let required = q_factorial(n, spec.q() as u64);
    if required > budget as u128 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let mut out = Vec::with_capacity(required as usize);
    for sigma in enumerate_sn(n)? {
        out.extend(cell_points(&sigma, spec, budget)?);
    }
    Ok(out)
}

/// Fl(n, q) with an index, the cell decomposition, and fiber partitions.
pub struct FlagSpace {
    spec: Arc<FieldSpec>,
    n: usize,
    flags: Vec<Flag>,
    index: HashMap<Flag, usize>,
    cells: Vec<(Permutation, Range<usize>)>,
}

impl FlagSpace {
    pub fn new(n: usize, spec: &Arc<FieldSpec>, budget: u64) -> Result<FlagSpace> {
        let required = q_factorial(n, spec.q() as u64);
        if required > budget as u128 {
            return Err(Error::BudgetExceeded { required, budget });
        }
        let mut flags = Vec::with_capacity(required as usize);
        let mut cells = Vec::new();
        for sigma in enumerate_sn(n)? {
            let start = flags.len();
            flags.extend(cell_points(&sigma, spec, budget)?);
            cells.push((sigma, start..flags.len()));
        }
        let mut index = HashMap::with_capacity(flags.len());
        for (i, f) in flags.iter().enumerate() {
            let previous = index.insert(f.clone(), i);
            assert!(previous.is_none(), "Schubert cells must be disjoint");
        }
        Ok(FlagSpace { spec: Arc::clone(spec), n, flags, index, cells })
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.spec.q() as u64
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn flags(&self) -> &[Flag] {
        &self.flags
    }

    pub fn index_of(&self, flag: &Flag) -> Option<usize> {
        self.index.get(flag).copied()
    }

    /// Index of the standard flag: the identity cell is enumerated first and
    /// is a single point.
    pub fn standard_index(&self) -> usize {
        0
    }

    /// Cells in enumeration order with their index ranges.
    pub fn cells(&self) -> &[(Permutation, Range<usize>)] {
        &self.cells
    }

    /// The cell a given flag index belongs to.
    pub fn cell_of_index(&self, idx: usize) -> &Permutation {
        let pos = self
            .cells
            .partition_point(|(_, range)| range.end <= idx);
        &self.cells[pos].0
    }

    /// Partition of the flag indices into fibers over Fl_j(n), in first-seen
    /// order; every fiber has exactly q + 1 members.
    pub fn fibers(&self, j: usize) -> Result<Vec<(IncompleteFlag, Vec<usize>)>> {
        let mut order: Vec<(IncompleteFlag, Vec<usize>)> = Vec::new();
        let mut seen: HashMap<IncompleteFlag, usize> = HashMap::new();
        for (i, f) in self.flags.iter().enumerate() {
            let w = f.forget(j)?;
            if let Some(&pos) = seen.get(&w) {
                order[pos].1.push(i);
            } else {
                seen.insert(w.clone(), order.len());
                order.push((w, vec![i]));
            }
        }
        for (_, members) in &order {
            debug_assert_eq!(members.len(), self.spec.q() as usize + 1);
        }
        Ok(order)
    }
}
