//! JSON wire formats for flags and windowed flags.
//!
//! Rows are lists of integers for prime fields and lists of coefficient
//! vectors (constant term first) for extension fields. Subspaces are lists of
//! basis rows; arbitrary spanning rows are accepted and canonicalized on
//! load.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::biflag::{biflag_from_window, BiFlag};
use crate::error::{Error, Result};
use crate::flag::Flag;
use crate::gfq::{FieldElement, FieldSpec};
use crate::linalg::Subspace;

/// One field element on the wire: a canonical index for k = 1, a coefficient
/// vector for k ≥ 2.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElemJson {
    Scalar(u64),
    Coeffs(Vec<u16>),
}

/// A complete flag: {q, n, subspaces: [[row…]…]} with one row list per
/// intermediate subspace V_1 … V_{n−1}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlagJson {
    pub q: u64,
    pub n: usize,
    pub subspaces: Vec<Vec<Vec<ElemJson>>>,
}

/// A windowed flag of Fl(2∞): {q, M, N, interior: [[row…]…]}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BiFlagJson {
    pub q: u64,
    #[serde(rename = "M")]
    pub m: i64,
    #[serde(rename = "N")]
    pub n: i64,
    pub interior: Vec<Vec<Vec<ElemJson>>>,
}

fn elem_to_json(spec: &FieldSpec, e: FieldElement) -> ElemJson {
    if spec.k() == 1 {
        ElemJson::Scalar(e.value() as u64)
    } else {
        ElemJson::Coeffs(spec.coeffs(e))
    }
}

fn elem_from_json(spec: &Arc<FieldSpec>, e: &ElemJson) -> Result<FieldElement> {
    match e {
        ElemJson::Scalar(v) => {
            if *v >= spec.q() as u64 {
                return Err(Error::InvalidFlag(format!("element {} out of range for GF({})", v, spec.q())));
            }
            Ok(spec.elem(*v))
        }
        ElemJson::Coeffs(c) => spec.from_coeffs(c),
    }
}

fn subspaces_to_json(spec: &FieldSpec, subspaces: &[Subspace]) -> Vec<Vec<Vec<ElemJson>>> {
    subspaces
        .iter()
        .map(|s| {
            (0..s.dim())
                .map(|r| s.basis().row(r).iter().map(|&e| elem_to_json(spec, e)).collect())
                .collect()
        })
        .collect()
}

fn subspaces_from_json(
    spec: &Arc<FieldSpec>,
    ambient: usize,
    data: &[Vec<Vec<ElemJson>>],
) -> Result<Vec<Subspace>> {
    data.iter()
        .map(|rows| {
            let parsed: Result<Vec<Vec<FieldElement>>> = rows
                .iter()
                .map(|row| {
                    if row.len() != ambient {
                        return Err(Error::AmbientMismatch(row.len(), ambient));
                    }
                    row.iter().map(|e| elem_from_json(spec, e)).collect()
                })
                .collect();
            Subspace::from_rows(spec, parsed?)
        })
        .collect()
}

pub fn flag_to_json(flag: &Flag) -> FlagJson {
    FlagJson {
        q: flag.spec().q() as u64,
        n: flag.n(),
        subspaces: subspaces_to_json(flag.spec(), flag.subspaces()),
    }
}

pub fn flag_from_json(data: &FlagJson) -> Result<Flag> {
    let spec = FieldSpec::shared(data.q)?;
    let subspaces = subspaces_from_json(&spec, data.n, &data.subspaces)?;
    Flag::new(&spec, data.n, subspaces)
}

pub fn biflag_to_json(b: &BiFlag) -> BiFlagJson {
    let (m, n) = b.window();
    BiFlagJson {
        q: b.spec().q() as u64,
        m,
        n,
        interior: subspaces_to_json(b.spec(), b.interior().subspaces()),
    }
}

pub fn biflag_from_json(data: &BiFlagJson) -> Result<BiFlag> {
    let spec = FieldSpec::shared(data.q)?;
    if data.n < data.m {
        return Err(Error::InvalidFlag(format!("window ({}, {}) is inverted", data.m, data.n)));
    }
    let d = (data.n - data.m) as usize;
    let subspaces = subspaces_from_json(&spec, d, &data.interior)?;
    let interior = Flag::new(&spec, d, subspaces)?;
    biflag_from_window(data.m, data.n, interior)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biflag::biflag_standard;
    use crate::flag::enumerate_flags;
    use crate::linalg::MatrixGF;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn flag_json_roundtrip_prime_field() {
        let spec = FieldSpec::shared(2).unwrap();
        for f in enumerate_flags(3, &spec, 1_000).unwrap() {
            let json = serde_json::to_string(&flag_to_json(&f)).unwrap();
            let parsed: FlagJson = serde_json::from_str(&json).unwrap();
            assert_eq!(flag_from_json(&parsed).unwrap(), f);
        }
    }

    #[test]
    fn flag_json_roundtrip_extension_field() {
        let spec = FieldSpec::shared(4).unwrap();
        for f in enumerate_flags(2, &spec, 1_000).unwrap() {
            let json = serde_json::to_string(&flag_to_json(&f)).unwrap();
            assert!(json.contains('['));
            let parsed: FlagJson = serde_json::from_str(&json).unwrap();
            assert_eq!(flag_from_json(&parsed).unwrap(), f);
        }
    }

    #[test]
    fn biflag_json_roundtrip() {
        let spec = FieldSpec::shared(3).unwrap();
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..20 {
            let d = 3;
            let g = MatrixGF::random_invertible(&spec, d, &mut rng);
            let interior = Flag::standard(d, &spec).transform(&g).unwrap();
            let b = biflag_from_window(-1, 2, interior).unwrap();
            let json = serde_json::to_string(&biflag_to_json(&b)).unwrap();
            let parsed: BiFlagJson = serde_json::from_str(&json).unwrap();
            assert_eq!(biflag_from_json(&parsed).unwrap(), b);
        }
        let e = biflag_standard(&spec);
        let json = serde_json::to_string(&biflag_to_json(&e)).unwrap();
        let parsed: BiFlagJson = serde_json::from_str(&json).unwrap();
        assert_eq!(biflag_from_json(&parsed).unwrap(), e);
    }

    #[test]
    fn invalid_payloads_are_rejected() {
        // non-nested subspaces
        let bad = r#"{"q": 2, "n": 3, "subspaces": [[[0,0,1]], [[1,0,0],[0,1,0]]]}"#;
        let parsed: FlagJson = serde_json::from_str(bad).unwrap();
        assert!(flag_from_json(&parsed).is_err());
        // element out of range
        let bad = r#"{"q": 2, "n": 2, "subspaces": [[[2,0]]]}"#;
        let parsed: FlagJson = serde_json::from_str(bad).unwrap();
        assert!(flag_from_json(&parsed).is_err());
        // bad field size
        let bad = r#"{"q": 6, "n": 2, "subspaces": [[[1,0]]]}"#;
        let parsed: FlagJson = serde_json::from_str(bad).unwrap();
        assert!(matches!(flag_from_json(&parsed), Err(Error::NotPrimePower(6))));
    }
}
