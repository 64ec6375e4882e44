use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pd::SpdMatrix;

/// The inputs of one law trial, sufficient to re-evaluate it exactly.
///
/// Floats are serialized losslessly, so evaluating a parsed witness reproduces the
/// original margin bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub law: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub matrices: BTreeMap<String, Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub vectors: BTreeMap<String, Vec<f64>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub scalars: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub seeds: BTreeMap<String, u64>,
}

fn missing(kind: &str, name: &str) -> Error {
    Error::Parse {
        locus: format!("{kind}.{name}"),
        message: "missing from witness".into(),
    }
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl Witness {
    pub fn new(law: &str, n: usize) -> Self {
        Witness {
            law: law.to_string(),
            n,
            matrices: BTreeMap::new(),
            vectors: BTreeMap::new(),
            scalars: BTreeMap::new(),
            seeds: BTreeMap::new(),
        }
    }

    pub fn put_spd(&mut self, name: &str, m: &SpdMatrix) -> &mut Self {
        self.matrices.insert(name.to_string(), m.to_rows());
        self
    }

    pub fn put_matrix(&mut self, name: &str, m: &DMatrix<f64>) -> &mut Self {
        self.matrices.insert(name.to_string(), rows_of(m));
        self
    }

    pub fn put_vector(&mut self, name: &str, v: Vec<f64>) -> &mut Self {
        self.vectors.insert(name.to_string(), v);
        self
    }

    pub fn put_scalar(&mut self, name: &str, v: f64) -> &mut Self {
        self.scalars.insert(name.to_string(), v);
        self
    }

    pub fn put_seed(&mut self, name: &str, v: u64) -> &mut Self {
        self.seeds.insert(name.to_string(), v);
        self
    }

    pub fn matrix(&self, name: &str) -> Result<DMatrix<f64>> {
        let rows = self.matrices.get(name).ok_or_else(|| missing("matrices", name))?;
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Parse {
                locus: format!("matrices.{name}"),
                message: "ragged rows".into(),
            });
        }
        Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
    }

    pub fn spd(&self, name: &str) -> Result<SpdMatrix> {
        SpdMatrix::new(self.matrix(name)?)
    }

    pub fn vector(&self, name: &str) -> Result<&[f64]> {
        self.vectors
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| missing("vectors", name))
    }

    pub fn scalar(&self, name: &str) -> Result<f64> {
        self.scalars.get(name).copied().ok_or_else(|| missing("scalars", name))
    }

    pub fn seed(&self, name: &str) -> Result<u64> {
        self.seeds.get(name).copied().ok_or_else(|| missing("seeds", name))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            locus: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })
    }
}
