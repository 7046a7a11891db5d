//! JSON documents for shapes, elements, and homomorphism witnesses.
//!
//! A shape file looks like
//!
//! ```json
//! {"ring": {"kind": "int", "p_or_q": 2}, "multiplicities": {"1": 1, "2": 1}}
//! ```
//!
//! with `kind` either `"int"` (integers localised at the prime `p_or_q`) or
//! `"poly"` (`F_q[t]` localised at `t`, residue field of order `p_or_q`).
//! Elements are coordinate lists `{"coords": [[alpha, index, scalar], ...]}`
//! keyed by the exponent of the cyclic factor and the position among factors
//! of that exponent; scalars are plain integers over the integer backend and
//! lowest-degree-first coefficient arrays over the polynomial backend.
//! Missing coordinates are zero.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::module::{Element, ModuleShape};
use crate::orbits::HomTable;
use crate::ring::{Backend, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RingKind {
    Int,
    Poly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingDoc {
    pub kind: RingKind,
    pub p_or_q: u64,
}

/// On-disk form of a [`ModuleShape`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeDocument {
    pub ring: RingDoc,
    pub multiplicities: BTreeMap<u32, u32>,
}

impl ShapeDocument {
    pub fn from_shape(shape: &ModuleShape) -> ShapeDocument {
        let kind = match shape.ring().backend() {
            Backend::IntegerLocal => RingKind::Int,
            Backend::PolynomialLocal => RingKind::Poly,
        };
        ShapeDocument {
            ring: RingDoc { kind, p_or_q: shape.ring().residue_field_order() },
            multiplicities: shape.multiplicities().clone(),
        }
    }

    pub fn to_shape(&self) -> Result<ModuleShape> {
        let pairs: Vec<(u32, u32)> =
            self.multiplicities.iter().map(|(&a, &m)| (a, m)).collect();
        match self.ring.kind {
            RingKind::Int => ModuleShape::integer_local(self.ring.p_or_q, &pairs),
            RingKind::Poly => ModuleShape::polynomial_local(self.ring.p_or_q, &pairs),
        }
    }

    pub fn from_json(text: &str) -> Result<ShapeDocument> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("shape document: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("shape documents always serialise")
    }
}

/// A scalar as written in JSON: an integer code over the integer backend, a
/// lowest-degree-first coefficient array over the polynomial backend.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarDoc {
    Int(u64),
    Coeffs(Vec<u64>),
}

/// On-disk form of an [`Element`]: one `[alpha, index, scalar]` entry per
/// coordinate, zero coordinates omitted on output and optional on input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementDoc {
    pub coords: Vec<(u32, u32, ScalarDoc)>,
}

impl ElementDoc {
    pub fn from_element(shape: &ModuleShape, a: &Element) -> ElementDoc {
        let ring = shape.ring();
        let mut seen: BTreeMap<u32, u32> = BTreeMap::new();
        let mut coords = Vec::new();
        for (&alpha, &x) in shape.factor_exponents().iter().zip(a.coords()) {
            let index = seen.entry(alpha).or_insert(0);
            if x != Scalar::ZERO {
                let scalar = match ring.backend() {
                    Backend::IntegerLocal => ScalarDoc::Int(x.code()),
                    Backend::PolynomialLocal => {
                        let mut cs = ring.scalar_coefficients(x);
                        cs.resize(alpha as usize, 0);
                        ScalarDoc::Coeffs(cs)
                    }
                };
                coords.push((alpha, *index, scalar));
            }
            *index += 1;
        }
        ElementDoc { coords }
    }

    pub fn to_element(&self, shape: &ModuleShape) -> Result<Element> {
        let ring = shape.ring();
        let exponents = shape.factor_exponents();
        let mut codes = vec![0u64; exponents.len()];
        let mut seen: BTreeSet<(u32, u32)> = BTreeSet::new();
        for (alpha, index, scalar) in &self.coords {
            if !seen.insert((*alpha, *index)) {
                return Err(Error::Parse(format!(
                    "coordinate ({alpha}, {index}) appears twice"
                )));
            }
            let before = exponents.iter().filter(|&&e| e < *alpha).count();
            let within = exponents.iter().filter(|&&e| e == *alpha).count() as u32;
            if within == 0 || *index >= within {
                return Err(Error::Parse(format!(
                    "no cyclic factor ({alpha}, {index}) in {shape}"
                )));
            }
            let code = match (ring.backend(), scalar) {
                (Backend::IntegerLocal, ScalarDoc::Int(v)) => *v,
                (Backend::PolynomialLocal, ScalarDoc::Coeffs(cs)) => {
                    if cs.len() > *alpha as usize {
                        return Err(Error::Parse(format!(
                            "coefficient array of length {} for a factor of exponent {alpha}",
                            cs.len()
                        )));
                    }
                    ring.scalar_from_coefficients(cs)?.code()
                }
                (Backend::IntegerLocal, ScalarDoc::Coeffs(_)) => {
                    return Err(Error::Parse(
                        "integer backend takes integer scalars, not coefficient arrays".into(),
                    ))
                }
                (Backend::PolynomialLocal, ScalarDoc::Int(_)) => {
                    return Err(Error::Parse(
                        "polynomial backend takes coefficient arrays, not bare integers".into(),
                    ))
                }
            };
            codes[before + *index as usize] = code;
        }
        shape.element_from_codes(&codes)
    }
}

/// On-disk form of a [`HomTable`] witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomTableDoc {
    pub images: Vec<ElementDoc>,
    pub automorphism: bool,
}

impl HomTableDoc {
    /// Encodes a witness mapping out of `domain`, with images read in
    /// `codomain` (the two coincide for automorphisms).
    pub fn from_hom_table(codomain: &ModuleShape, table: &HomTable) -> HomTableDoc {
        HomTableDoc {
            images: table
                .images()
                .iter()
                .map(|a| ElementDoc::from_element(codomain, a))
                .collect(),
            automorphism: table.is_automorphism(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("witness documents always serialise")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape_2_4() -> ModuleShape {
        ModuleShape::integer_local(2, &[(1, 1), (2, 1)]).unwrap()
    }

    #[test]
    fn shape_documents_round_trip() {
        let doc = ShapeDocument::from_json(
            r#"{"ring": {"kind": "int", "p_or_q": 2}, "multiplicities": {"1": 1, "2": 1}}"#,
        )
        .unwrap();
        let shape = doc.to_shape().unwrap();
        assert_eq!(shape, shape_2_4());
        assert_eq!(ShapeDocument::from_shape(&shape), doc);
        assert_eq!(
            doc.to_json(),
            r#"{"ring":{"kind":"int","p_or_q":2},"multiplicities":{"1":1,"2":1}}"#
        );
    }

    #[test]
    fn invalid_shape_documents_are_rejected() {
        assert!(ShapeDocument::from_json("{").is_err());
        assert!(ShapeDocument::from_json(r#"{"ring": {"kind": "frac", "p_or_q": 2}}"#).is_err());
        let four = ShapeDocument::from_json(
            r#"{"ring": {"kind": "int", "p_or_q": 4}, "multiplicities": {"1": 1}}"#,
        )
        .unwrap();
        // 4 is not prime, so the integer backend refuses it at shape level.
        assert!(four.to_shape().is_err());
        let poly4 = ShapeDocument {
            ring: RingDoc { kind: RingKind::Poly, p_or_q: 4 },
            multiplicities: BTreeMap::from([(1, 1)]),
        };
        // ... while 4 is a legitimate residue-field order for F_q[t].
        assert!(poly4.to_shape().is_ok());
    }

    #[test]
    fn integer_elements_round_trip() {
        let shape = shape_2_4();
        for a in shape.enumerate_elements(1 << 20).unwrap() {
            let doc = ElementDoc::from_element(&shape, &a);
            assert_eq!(doc.to_element(&shape).unwrap(), a);
        }
        let doc = ElementDoc::from_element(
            &shape,
            &shape.element_from_codes(&[1, 2]).unwrap(),
        );
        assert_eq!(
            serde_json::to_string(&doc).unwrap(),
            r#"{"coords":[[1,0,1],[2,0,2]]}"#
        );
    }

    #[test]
    fn polynomial_elements_round_trip() {
        let shape = ModuleShape::polynomial_local(4, &[(1, 1), (2, 1)]).unwrap();
        for a in shape.enumerate_elements(1 << 20).unwrap() {
            let doc = ElementDoc::from_element(&shape, &a);
            assert_eq!(doc.to_element(&shape).unwrap(), a, "doc {doc:?}");
        }
        // 3 + 2t over F_4, in the exponent-2 factor.
        let doc: ElementDoc =
            serde_json::from_str(r#"{"coords":[[2,0,[3,2]]]}"#).unwrap();
        let a = doc.to_element(&shape).unwrap();
        assert_eq!(a.coords()[1].code(), 3 + 2 * 4);
    }

    #[test]
    fn element_documents_validate_coordinates() {
        let shape = shape_2_4();
        let missing: ElementDoc = serde_json::from_str(r#"{"coords":[[3,0,1]]}"#).unwrap();
        assert!(missing.to_element(&shape).is_err());
        let out_of_range: ElementDoc =
            serde_json::from_str(r#"{"coords":[[1,1,1]]}"#).unwrap();
        assert!(out_of_range.to_element(&shape).is_err());
        let duplicate: ElementDoc =
            serde_json::from_str(r#"{"coords":[[1,0,1],[1,0,1]]}"#).unwrap();
        assert!(duplicate.to_element(&shape).is_err());
        let wrong_scalar: ElementDoc =
            serde_json::from_str(r#"{"coords":[[1,0,[1]]]}"#).unwrap();
        assert!(wrong_scalar.to_element(&shape).is_err());
        let too_big: ElementDoc = serde_json::from_str(r#"{"coords":[[1,0,2]]}"#).unwrap();
        assert!(too_big.to_element(&shape).is_err());
        let empty: ElementDoc = serde_json::from_str(r#"{"coords":[]}"#).unwrap();
        assert_eq!(empty.to_element(&shape).unwrap(), shape.zero_element());
    }

    #[test]
    fn witness_documents_serialise() {
        let shape = shape_2_4();
        let table = HomTable::identity(&shape);
        let doc = HomTableDoc::from_hom_table(&shape, &table);
        assert!(doc.automorphism);
        assert_eq!(
            doc.to_json(),
            r#"{"images":[{"coords":[[1,0,1]]},{"coords":[[2,0,1]]}],"automorphism":true}"#
        );
    }
}
