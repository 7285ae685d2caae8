//! The symmetric group S_n in one-line notation: inversions, the simple
//! transpositions τ_j = (j, j+1), and lexicographic enumeration.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gfq::FieldSpec;
use crate::linalg::MatrixGF;

/// Largest degree for which S_n is enumerated (8! = 40320).
pub const MAX_ENUM_N: usize = 8;

/// A permutation of {1, …, n} in one-line notation with 1-based values.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    word: Vec<usize>,
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.one_line())
    }
}

impl Permutation {
    pub fn identity(n: usize) -> Permutation {
        Permutation { word: (1..=n).collect() }
    }

    /// The longest element n, n−1, …, 1.
    pub fn longest(n: usize) -> Permutation {
        Permutation { word: (1..=n).rev().collect() }
    }

    pub fn from_word(word: Vec<usize>) -> Result<Permutation> {
        let n = word.len();
        let mut seen = vec![false; n + 1];
        for &v in &word {
            if v == 0 || v > n || seen[v] {
                return Err(Error::InvalidPermutation(format!("{:?}", word)));
            }
            seen[v] = true;
        }
        Ok(Permutation { word })
    }

    pub fn n(&self) -> usize {
        self.word.len()
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    /// σ(i) for 1-based i.
    pub fn image(&self, i: usize) -> usize {
        self.word[i - 1]
    }

    /// Comma-joined one-line notation, e.g. "2,1,3".
    pub fn one_line(&self) -> String {
        self.word.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
    }

    /// The inversion count I(σ) = #{(i, j) : i < j, σ(i) > σ(j)}.
    pub fn inversions(&self) -> usize {
        let mut count = 0;
        for i in 0..self.word.len() {
            for j in (i + 1)..self.word.len() {
                if self.word[i] > self.word[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// Left multiplication τ_j · σ; swaps the values j and j+1 in the word and
    /// changes the inversion count by exactly one.
    pub fn left_mul_tau(&self, j: usize) -> Result<Permutation> {
        let n = self.n();
        if j == 0 || j + 1 > n {
            return Err(Error::IndexOutOfRange { index: j, max: n.saturating_sub(1) });
        }
        let word = self
            .word
            .iter()
            .map(|&v| {
                if v == j {
                    j + 1
                } else if v == j + 1 {
                    j
                } else {
                    v
                }
            })
            .collect();
        Ok(Permutation { word })
    }

    /// Composition (self ∘ other)(i) = self(other(i)).
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch);
        }
        let word = (1..=self.n()).map(|i| self.image(other.image(i))).collect();
        Ok(Permutation { word })
    }

    /// The permutation matrix whose j-th row is e_{σ(j)}.
    pub fn matrix(&self, spec: &Arc<FieldSpec>) -> MatrixGF {
        let n = self.n();
        let mut m = MatrixGF::zeros(spec, n, n);
        for j in 1..=n {
            m.set(j - 1, self.image(j) - 1, spec.one());
        }
        m
    }
}

/// All n! permutations in lexicographic order of the one-line word.
pub fn enumerate_sn(n: usize) -> Result<Vec<Permutation>> {
    if n > MAX_ENUM_N {
        return Err(Error::TooLarge(n));
    }
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(n);
    let mut used = vec![false; n + 1];
    build(n, &mut word, &mut used, &mut out);
    Ok(out)
}

fn build(n: usize, word: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Permutation>) {
    if word.len() == n {
        out.push(Permutation { word: word.clone() });
        return;
    }
    for v in 1..=n {
        if !used[v] {
            used[v] = true;
            word.push(v);
            build(n, word, used, out);
            word.pop();
            used[v] = false;
        }
    }
}

/// The q-factorial ∏_{i=1}^{n} (1 + q + … + q^{i−1}), i.e. Σ_σ q^{I(σ)},
/// saturating at u128::MAX.
pub fn q_factorial(n: usize, q: u64) -> u128 {
    let mut total: u128 = 1;
    for i in 1..=n {
        let mut term: u128 = 0;
        let mut power: u128 = 1;
        for _ in 0..i {
            term = term.saturating_add(power);
            power = power.saturating_mul(q as u128);
        }
        total = total.saturating_mul(term);
    }
    total
}

/// q^e saturating at u128::MAX.
pub fn q_pow(q: u64, e: usize) -> u128 {
    let mut out: u128 = 1;
    for _ in 0..e {
        out = out.saturating_mul(q as u128);
    }
    out
}
