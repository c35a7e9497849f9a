//! Field configuration files.
//!
//! A configuration is one compact JSON object with keys in the fixed order
//! `metadata`, `lattice`, `A`, `Phi`. `A` holds one array of `n` matrices
//! per site and `Phi` one matrix per site, sites in row-major order over
//! `(k_1, ..., k_n)` with the last index fastest. Floats are written in the
//! shortest form that round-trips, so `write ∘ read` reproduces a file
//! byte for byte.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{Connection, HiggsField, SU2_TOLERANCE};
use crate::lattice::{Lattice, LatticeDescriptor};
use crate::matrix::{su2_defect, Matrix2C};
use crate::random::GENERATOR_NAME;

pub const SITE_ORDERING: &str = "row-major, last index fastest; A[site][axis], Phi[site]";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub ordering: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Metadata {
    pub fn new(seed: Option<u64>) -> Self {
        Self { ordering: SITE_ORDERING.into(), generator: seed.map(|_| GENERATOR_NAME.into()), seed }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
    pub lattice: LatticeDescriptor,
    #[serde(rename = "A")]
    pub connection: Vec<Vec<Matrix2C>>,
    #[serde(rename = "Phi")]
    pub higgs: Vec<Matrix2C>,
}

fn config_error(path: impl Into<String>, message: impl ToString) -> Error {
    Error::Config { path: path.into(), message: message.to_string() }
}

impl FieldConfigFile {
    /// Components on edges that leave a free lattice are written as zero.
    pub fn from_fields(a: &Connection, phi: &HiggsField, metadata: Option<Metadata>) -> Result<Self> {
        let lattice = a.lattice();
        if lattice != phi.lattice() {
            return Err(Error::LatticeMismatch);
        }
        let connection = lattice
            .sites()
            .map(|site| (0..lattice.dim()).map(|axis| a.component(site, axis).unwrap_or_default()).collect())
            .collect();
        let higgs = lattice.sites().map(|site| phi.value(site).expect("Higgs field is complete")).collect();
        Ok(Self { metadata, lattice: lattice.descriptor(), connection, higgs })
    }

    /// Parses and validates a configuration. Errors carry the JSON path of
    /// the offending element.
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_error(path, e.into_inner())
        })?;
        file.validate()?;
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Canonical compact JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("configs always serialize");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        Ok(fs::write(path, self.to_json())?)
    }

    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::from_descriptor(&self.lattice).map_err(|e| config_error("lattice", e))
    }

    fn validate(&self) -> Result<()> {
        let lattice = self.lattice()?;
        let sites = lattice.num_sites();
        if self.connection.len() != sites {
            return Err(config_error("A", format!("{} sites given, lattice {lattice} has {sites}", self.connection.len())));
        }
        if self.higgs.len() != sites {
            return Err(config_error("Phi", format!("{} sites given, lattice {lattice} has {sites}", self.higgs.len())));
        }
        for (site, row) in self.connection.iter().enumerate() {
            if row.len() != lattice.dim() {
                return Err(config_error(
                    format!("A[{site}]"),
                    format!("{} axes given, lattice has {}", row.len(), lattice.dim()),
                ));
            }
            for (axis, m) in row.iter().enumerate() {
                check_su2(m, || format!("A[{site}][{axis}]"))?;
            }
        }
        for (site, m) in self.higgs.iter().enumerate() {
            check_su2(m, || format!("Phi[{site}]"))?;
        }
        Ok(())
    }

    pub fn to_fields(&self) -> Result<(Connection, HiggsField)> {
        let lattice = self.lattice()?;
        let a = crate::cochain::Cochain::from_fn(&lattice, 1, false, |site, set| {
            self.connection[site][set.axes().next().expect("one edge")]
        })?;
        let phi = crate::cochain::Cochain::from_fn(&lattice, 0, false, |site, _| self.higgs[site])?;
        Ok((Connection::from_cochain(a)?, HiggsField::from_cochain(phi)?))
    }
}

fn check_su2(m: &Matrix2C, path: impl FnOnce() -> String) -> Result<()> {
    let defect = su2_defect(m);
    if defect > SU2_TOLERANCE {
        return Err(config_error(path(), format!("matrix is not in su(2) (defect {defect:e})")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{FieldRng, Sampling};

    fn sample(seed: u64) -> FieldConfigFile {
        let l = Lattice::periodic(&[2, 3, 2]).unwrap();
        let mut rng = FieldRng::new(seed);
        let a = Connection::random(&l, &mut rng, Sampling::Uniform(1.0)).unwrap();
        let phi = HiggsField::random(&l, &mut rng, Sampling::Uniform(1.0)).unwrap();
        FieldConfigFile::from_fields(&a, &phi, Some(Metadata::new(Some(seed)))).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let file = sample(9);
        let text = file.to_json();
        let back = FieldConfigFile::parse(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_json(), text);
        let (a, phi) = back.to_fields().unwrap();
        assert_eq!(FieldConfigFile::from_fields(&a, &phi, back.metadata.clone()).unwrap(), file);
        assert!(text.starts_with(r#"{"metadata":{"ordering":"#));
        assert!(text.ends_with("]]]]}\n"));
    }

    #[test]
    fn errors_report_json_paths() {
        let text = sample(1).to_json();
        let mut not_su2 = sample(1);
        not_su2.higgs[4] = Matrix2C::identity();
        let cases = [
            (text.replacen(r#""A":[[[[["#, r#""A":[[[[""#, 1), "A[0][0][0][0]"),
            (text.replacen(r#""n":3"#, r#""n":3,"x":1"#, 1), "lattice"),
            (not_su2.to_json(), "Phi[4]"),
            (text.replacen(r#""extents":[2,3,2]"#, r#""extents":[2,3,3]"#, 1), "A"),
            (text[..text.len() / 2].to_string(), ""),
        ];
        for (bad, expected) in cases {
            match FieldConfigFile::parse(&bad) {
                Err(Error::Config { path, .. }) => assert!(path.starts_with(expected), "{path} vs {expected}"),
                other => panic!("expected a config error, got {other:?}"),
            }
        }
    }
}
