//! JSON tower specs.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::make_field;
use crate::tower::{validate, TowerSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffEntry {
    pub i: u32,
    pub j: u64,
    pub a_ij: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub p: u64,
    pub a: usize,
    pub field_modulus: Vec<u64>,
    pub coeffs: Vec<CoeffEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extension_moduli: BTreeMap<String, Vec<u64>>,
}

impl SpecFile {
    pub fn build(&self) -> Result<TowerSpec> {
        let mut field = make_field(self.p, self.a, &self.field_modulus)?;
        for (k, m) in &self.extension_moduli {
            let k: usize = k
                .parse()
                .map_err(|_| Error::Parse(format!("extension degree {k:?} is not an integer")))?;
            field = field.with_extension_modulus(k, m)?;
        }
        let mut coeffs = BTreeMap::new();
        for c in &self.coeffs {
            if coeffs.insert((c.i, c.j), c.a_ij.clone()).is_some() {
                return Err(Error::BadCoefficient {
                    i: c.i,
                    j: c.j,
                    msg: "listed twice".into(),
                });
            }
        }
        validate(Arc::new(field), coeffs)
    }

    pub fn from_tower(spec: &TowerSpec) -> SpecFile {
        let field = spec.field();
        SpecFile {
            p: field.p(),
            a: field.a(),
            field_modulus: field.modulus().to_vec(),
            coeffs: spec
                .coeffs()
                .iter()
                .map(|(&(i, j), v)| CoeffEntry { i, j, a_ij: v.clone() })
                .collect(),
            extension_moduli: field
                .overrides()
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
        }
    }
}

pub fn parse_spec_str(text: &str) -> Result<TowerSpec> {
    let file: SpecFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.build()
}

pub fn parse_spec(path: &Path) -> Result<TowerSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_spec_str(&text)
}

/// Canonical form: coefficients sorted by `(i, j)`, no whitespace.
pub fn serialize_spec(spec: &TowerSpec) -> String {
    serde_json::to_string(&SpecFile::from_tower(spec)).expect("spec serializes")
}

/// SHA-256 of the canonical form, hex.
pub fn spec_hash(spec: &TowerSpec) -> String {
    let digest = Sha256::digest(serialize_spec(spec).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_cubed_parses() {
        let s = parse_spec_str(r#"{"p":2,"a":1,"field_modulus":[1,1],"coeffs":[{"i":0,"j":3,"a_ij":[1]}]}"#).unwrap();
        assert_eq!(s.invariants().d_m, 3);
        assert_eq!(parse_spec_str(&serialize_spec(&s)).unwrap(), s);
        assert_eq!(spec_hash(&s).len(), 64);
    }

    #[test]
    fn parse_errors() {
        let e = parse_spec_str(r#"{"p":2,"a":1,"field_modulus":[1,1]}"#).unwrap_err();
        assert_eq!(e.kind(), "ParseError");
        let e = parse_spec_str(r#"{"p":2,"a":1,"field_modulus":[1,1],"coeffs":[{"i":0,"j":3,"a_ij":[1]},{"i":0,"j":4,"a_ij":[1]}]}"#)
            .unwrap_err();
        assert_eq!(e, Error::ForbiddenExponent { i: 0, j: 4 });
        assert_eq!(e.location(), Some((0, 4)));
    }
}
