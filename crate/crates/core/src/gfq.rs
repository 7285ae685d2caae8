//! Exact arithmetic in the finite field F_q for prime powers q ≤ 256.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported field size.
pub const MAX_Q: u64 = 256;

/// An element of F_q, stored as its canonical index in `0..q`.
///
/// For a prime field the index is the residue itself. For an extension field
/// F_{p^k} the base-p digits of the index, lowest digit first, are the
/// coefficients of the residue polynomial. Elements carry the field size so
/// that mixing fields is detected.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    q: u16,
    val: u16,
}

impl FieldElement {
    pub fn q(self) -> u16 {
        self.q
    }

    /// Canonical index in `0..q`.
    pub fn value(self) -> u16 {
        self.val
    }

    pub fn is_zero(self) -> bool {
        self.val == 0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.val)
    }
}

/// The finite field F_q, q = p^k, with all arithmetic precomputed in tables.
///
/// For k ≥ 2 the field is F_p[x] modulo a fixed irreducible polynomial. The
/// modulus is deterministic: the monic irreducible of degree k whose
/// coefficient vector, read as a base-p integer, is smallest. Two specs with
/// the same q therefore describe identical arithmetic, and `q` alone
/// identifies the spec.
pub struct FieldSpec {
    p: u16,
    k: u32,
    q: u16,
    modulus: Vec<u16>,
    add_t: Vec<u16>,
    mul_t: Vec<u16>,
    neg_t: Vec<u16>,
    inv_t: Vec<u16>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl FieldSpec {
    /// Constructs F_q, factoring q into p^k and picking the canonical modulus.
    pub fn new(q: u64) -> Result<FieldSpec> {
        if q > MAX_Q {
            return Err(Error::Unsupported(q));
        }
        let (p, k) = factor_prime_power(q)?;
        let q = q as u16;
        let modulus = if k == 1 {
            Vec::new()
        } else {
            smallest_irreducible(p, k)
        };

        let mut spec = FieldSpec {
            p,
            k,
            q,
            modulus,
            add_t: Vec::new(),
            mul_t: Vec::new(),
            neg_t: Vec::new(),
            inv_t: Vec::new(),
        };
        spec.build_tables();
        Ok(spec)
    }

    /// Convenience constructor returning a shared handle.
    pub fn shared(q: u64) -> Result<Arc<FieldSpec>> {
        Ok(Arc::new(FieldSpec::new(q)?))
    }

    pub fn p(&self) -> u16 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u16 {
        self.q
    }

    /// Modulus coefficients, constant term first; empty for prime fields.
    pub fn modulus(&self) -> &[u16] {
        &self.modulus
    }

    /// The element with canonical index `v`. Panics if `v ≥ q`.
    pub fn elem(&self, v: u64) -> FieldElement {
        assert!(v < self.q as u64, "element index {} out of range for GF({})", v, self.q);
        FieldElement { q: self.q, val: v as u16 }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { q: self.q, val: 0 }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { q: self.q, val: 1 }
    }

    /// Element from coefficients (constant term first); entries are reduced
    /// mod p and trailing coefficients may be omitted.
    pub fn from_coeffs(&self, coeffs: &[u16]) -> Result<FieldElement> {
        if coeffs.len() > self.k as usize {
            return Err(Error::InvalidFlag(format!(
                "coefficient vector of length {} for GF({}) with k = {}",
                coeffs.len(),
                self.q,
                self.k
            )));
        }
        let mut val = 0u32;
        for (i, &c) in coeffs.iter().enumerate() {
            val += (c % self.p) as u32 * (self.p as u32).pow(i as u32);
        }
        Ok(FieldElement { q: self.q, val: val as u16 })
    }

    /// Coefficient vector of length k, constant term first.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u16> {
        digits(a.val, self.p, self.k as usize)
    }

    /// All q elements, zero first, in canonical index order.
    pub fn elements(&self) -> Vec<FieldElement> {
        (0..self.q).map(|v| FieldElement { q: self.q, val: v }).collect()
    }

    fn check(&self, a: FieldElement) -> Result<()> {
        if a.q == self.q {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_raw(a, b))
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.sub_raw(a, b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_raw(a, b))
    }

    pub fn neg(&self, a: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        Ok(self.neg_raw(a))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.inv_raw(a))
    }

    #[inline]
    pub(crate) fn add_raw(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(a.q == self.q && b.q == self.q);
        FieldElement { q: self.q, val: self.add_t[a.val as usize * self.q as usize + b.val as usize] }
    }

    #[inline]
    pub(crate) fn sub_raw(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add_raw(a, self.neg_raw(b))
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(a.q == self.q && b.q == self.q);
        FieldElement { q: self.q, val: self.mul_t[a.val as usize * self.q as usize + b.val as usize] }
    }

    #[inline]
    pub(crate) fn neg_raw(&self, a: FieldElement) -> FieldElement {
        debug_assert!(a.q == self.q);
        FieldElement { q: self.q, val: self.neg_t[a.val as usize] }
    }

    #[inline]
    pub(crate) fn inv_raw(&self, a: FieldElement) -> FieldElement {
        debug_assert!(a.q == self.q && a.val != 0);
        FieldElement { q: self.q, val: self.inv_t[a.val as usize] }
    }

    fn build_tables(&mut self) {
        let q = self.q as usize;
        let p = self.p;
        let k = self.k as usize;
        self.add_t = vec![0; q * q];
        self.mul_t = vec![0; q * q];
        self.neg_t = vec![0; q];
        self.inv_t = vec![0; q];

        for a in 0..q {
            let da = digits(a as u16, p, k);
            let neg: Vec<u16> = da.iter().map(|&c| (p - c) % p).collect();
            self.neg_t[a] = undigits(&neg, p);
            for b in 0..q {
                let db = digits(b as u16, p, k);
                let sum: Vec<u16> = da.iter().zip(&db).map(|(&x, &y)| (x + y) % p).collect();
                self.add_t[a * q + b] = undigits(&sum, p);
                let prod = if k == 1 {
                    vec![((a as u32 * b as u32) % p as u32) as u16]
                } else {
                    poly_rem(poly_mul(&da, &db, p), &self.modulus, p)
                };
                self.mul_t[a * q + b] = undigits(&prod, p);
            }
        }
        for a in 1..q {
            for b in 1..q {
                if self.mul_t[a * q + b] == 1 {
                    self.inv_t[a] = b as u16;
                    break;
                }
            }
            debug_assert!(self.inv_t[a] != 0, "no inverse found; modulus not irreducible?");
        }
    }
}

fn factor_prime_power(q: u64) -> Result<(u16, u32)> {
    if q < 2 {
        return Err(Error::NotPrimePower(q));
    }
    let mut p = 2u64;
    while p * p <= q {
        if q % p == 0 {
            break;
        }
        p += 1;
    }
    if p * p > q {
        // q itself is prime
        return Ok((q as u16, 1));
    }
    let mut rest = q;
    let mut k = 0u32;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    if rest != 1 {
        return Err(Error::NotPrimePower(q));
    }
    Ok((p as u16, k))
}

fn digits(mut v: u16, p: u16, k: usize) -> Vec<u16> {
    let mut out = vec![0; k];
    for d in out.iter_mut() {
        *d = v % p;
        v /= p;
    }
    out
}

fn undigits(coeffs: &[u16], p: u16) -> u16 {
    let mut val = 0u32;
    for &c in coeffs.iter().rev() {
        val = val * p as u32 + c as u32;
    }
    val as u16
}

fn poly_trim(v: &mut Vec<u16>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_mul(a: &[u16], b: &[u16], p: u16) -> Vec<u16> {
    let mut out = vec![0u16; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u32 + x as u32 * y as u32) % p as u32) as u16;
        }
    }
    poly_trim(&mut out);
    out
}

/// Remainder of `a` modulo the monic polynomial `m`, coefficients mod p.
fn poly_rem(mut a: Vec<u16>, m: &[u16], p: u16) -> Vec<u16> {
    let deg_m = m.len() - 1;
    while a.len() > deg_m {
        let lead = a[a.len() - 1];
        if lead != 0 {
            let shift = a.len() - 1 - deg_m;
            for (i, &c) in m.iter().enumerate() {
                let sub = ((lead as u32 * c as u32) % p as u32) as u16;
                let idx = shift + i;
                a[idx] = (a[idx] + p - sub) % p;
            }
        }
        a.pop();
        poly_trim(&mut a);
        if a.is_empty() {
            break;
        }
    }
    a
}

fn is_irreducible(m: &[u16], p: u16) -> bool {
    let k = m.len() - 1;
    // trial division by every monic polynomial of lower positive degree
    for d in 1..k {
        let count = (p as u64).pow(d as u32);
        for t in 0..count {
            let mut g = digits_u64(t, p, d);
            g.push(1);
            let r = poly_rem(m.to_vec(), &g, p);
            if r.is_empty() {
                return false;
            }
        }
    }
    true
}

fn digits_u64(mut v: u64, p: u16, len: usize) -> Vec<u16> {
    let mut out = vec![0; len];
    for d in out.iter_mut() {
        *d = (v % p as u64) as u16;
        v /= p as u64;
    }
    out
}

/// Lexicographically smallest monic irreducible of degree k over F_p, where
/// candidates are ordered by their coefficient vector read as a base-p value.
fn smallest_irreducible(p: u16, k: u32) -> Vec<u16> {
    let count = (p as u64).pow(k);
    for t in 0..count {
        let mut m = digits_u64(t, p, k as usize);
        m.push(1);
        if is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_construction() {
        let f = FieldSpec::new(2).unwrap();
        assert_eq!((f.p(), f.k(), f.q()), (2, 1, 2));
        assert!(f.modulus().is_empty());
    }

    #[test]
    fn gf4_modulus_is_x2_x_1() {
        // the unique irreducible monic quadratic over F_2
        let f = FieldSpec::new(4).unwrap();
        assert_eq!((f.p(), f.k()), (2, 2));
        assert_eq!(f.modulus(), &[1, 1, 1]);
    }

    #[test]
    fn non_prime_power_rejected() {
        assert_eq!(FieldSpec::new(6).unwrap_err(), Error::NotPrimePower(6));
        assert_eq!(FieldSpec::new(12).unwrap_err(), Error::NotPrimePower(12));
        assert_eq!(FieldSpec::new(0).unwrap_err(), Error::NotPrimePower(0));
        assert_eq!(FieldSpec::new(1).unwrap_err(), Error::NotPrimePower(1));
        assert_eq!(FieldSpec::new(512).unwrap_err(), Error::Unsupported(512));
    }

    #[test]
    fn char_two_addition() {
        let f = FieldSpec::new(2).unwrap();
        assert_eq!(f.add(f.one(), f.one()).unwrap(), f.zero());
    }

    #[test]
    fn gf3_inverse_of_two() {
        let f = FieldSpec::new(3).unwrap();
        assert_eq!(f.inv(f.elem(2)).unwrap(), f.elem(2));
    }

    #[test]
    fn gf4_x_times_x() {
        // x * x reduces to x + 1 modulo x^2 + x + 1
        let f = FieldSpec::new(4).unwrap();
        let x = f.from_coeffs(&[0, 1]).unwrap();
        let x_plus_1 = f.from_coeffs(&[1, 1]).unwrap();
        assert_eq!(f.mul(x, x).unwrap(), x_plus_1);
    }

    #[test]
    fn inv_zero_fails() {
        let f = FieldSpec::new(5).unwrap();
        assert_eq!(f.inv(f.zero()).unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn spec_mismatch_detected() {
        let f2 = FieldSpec::new(2).unwrap();
        let f3 = FieldSpec::new(3).unwrap();
        assert_eq!(f2.add(f2.one(), f3.one()).unwrap_err(), Error::SpecMismatch);
    }

    #[test]
    fn elements_are_all_distinct() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27, 49, 64, 81, 121, 125, 128, 169, 243, 256] {
            let f = FieldSpec::new(q).unwrap();
            let elems = f.elements();
            assert_eq!(elems.len(), q as usize);
            assert_eq!(elems[0], f.zero());
            for (i, e) in elems.iter().enumerate() {
                assert_eq!(e.value() as usize, i);
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small_q() {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let f = FieldSpec::new(q).unwrap();
            let elems = f.elements();
            for &a in &elems {
                assert_eq!(f.add(a, f.zero()).unwrap(), a);
                assert_eq!(f.mul(a, f.one()).unwrap(), a);
                assert_eq!(f.add(a, f.neg(a).unwrap()).unwrap(), f.zero());
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()).unwrap(), f.one());
                }
                for &b in &elems {
                    assert_eq!(f.add(a, b).unwrap(), f.add(b, a).unwrap());
                    assert_eq!(f.mul(a, b).unwrap(), f.mul(b, a).unwrap());
                    assert_eq!(f.sub(a, b).unwrap(), f.add(a, f.neg(b).unwrap()).unwrap());
                    for &c in &elems {
                        let ab_c = f.add(f.add(a, b).unwrap(), c).unwrap();
                        let a_bc = f.add(a, f.add(b, c).unwrap()).unwrap();
                        assert_eq!(ab_c, a_bc);
                        let m_ab_c = f.mul(f.mul(a, b).unwrap(), c).unwrap();
                        let m_a_bc = f.mul(a, f.mul(b, c).unwrap()).unwrap();
                        assert_eq!(m_ab_c, m_a_bc);
                        let dist_l = f.mul(a, f.add(b, c).unwrap()).unwrap();
                        let dist_r = f.add(f.mul(a, b).unwrap(), f.mul(a, c).unwrap()).unwrap();
                        assert_eq!(dist_l, dist_r);
                    }
                }
            }
        }
    }

    #[test]
    fn coeff_roundtrip() {
        let f = FieldSpec::new(9).unwrap();
        for e in f.elements() {
            let c = f.coeffs(e);
            assert_eq!(c.len(), 2);
            assert_eq!(f.from_coeffs(&c).unwrap(), e);
        }
    }

    #[test]
    fn gf8_modulus_is_smallest() {
        // candidates of degree 3 over F_2 in base-2 order: x^3 + x + 1 (value 11)
        // precedes x^3 + x^2 + 1 (value 13)
        let f = FieldSpec::new(8).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 0, 1]);
    }
}
