//! Labeled collections of same-dimension SPD matrices and their text format.
//!
//! A bundle document is a JSON object:
//!
//! ```text
//! {"n": 2,
//!  "items": [{"label": "X1", "rows": [[0.1406, 0.0347], [0.0347, 0.1779]]}, ...],
//!  "weights": [0.5, 0.5]}
//! ```
//!
//! `weights` is optional. Numbers are written with 17 significant digits so that a
//! write/parse round trip reproduces every entry bit for bit.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::pd::SpdMatrix;

/// Allowed deviation of the weight sum from one.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixBundle {
    n: usize,
    items: Vec<(String, SpdMatrix)>,
    weights: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBundle {
    n: usize,
    items: Vec<RawItem>,
    #[serde(default)]
    weights: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawItem {
    label: String,
    rows: Vec<Vec<f64>>,
}

impl MatrixBundle {
    /// Builds a bundle, checking labels, dimensions and weights.
    pub fn new(items: Vec<(String, SpdMatrix)>, weights: Option<Vec<f64>>) -> Result<Self> {
        let n = match items.first() {
            Some((_, m)) => m.dim(),
            None => return Err(Error::InvalidParameter("bundle has no items".into())),
        };
        let mut seen = HashSet::new();
        for (label, m) in &items {
            if !seen.insert(label.as_str()) {
                return Err(Error::InvalidParameter(format!("duplicate label `{label}`")));
            }
            if m.dim() != n {
                return Err(Error::Validation {
                    label: label.clone(),
                    reason: Box::new(Error::DimensionMismatch {
                        expected: n,
                        found: m.dim(),
                    }),
                });
            }
        }
        if let Some(w) = &weights {
            validate_weights(w, items.len())?;
        }
        Ok(MatrixBundle { n, items, weights })
    }

    /// Bundle with labels `A1, A2, …`.
    pub fn from_matrices(matrices: Vec<SpdMatrix>) -> Result<Self> {
        let items = matrices
            .into_iter()
            .enumerate()
            .map(|(i, m)| (format!("A{}", i + 1), m))
            .collect();
        Self::new(items, None)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[(String, SpdMatrix)] {
        &self.items
    }

    pub fn matrices(&self) -> impl Iterator<Item = &SpdMatrix> {
        self.items.iter().map(|(_, m)| m)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(|(l, _)| l.as_str())
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Stored weights, or uniform weights when none are stored.
    pub fn weights_or_uniform(&self) -> Vec<f64> {
        match &self.weights {
            Some(w) => w.clone(),
            None => vec![1.0 / self.len() as f64; self.len()],
        }
    }

    /// Parses a bundle document.
    pub fn parse_str(text: &str) -> Result<Self> {
        let raw: RawBundle = serde_json::from_str(text).map_err(|e| Error::Parse {
            locus: format!("line {}, column {}", e.line(), e.column()),
            message: strip_position(&e.to_string()),
        })?;
        if raw.items.is_empty() {
            return Err(Error::Parse {
                locus: "items".into(),
                message: "bundle must contain at least one item".into(),
            });
        }
        let mut items = Vec::with_capacity(raw.items.len());
        for (i, item) in raw.items.into_iter().enumerate() {
            let locus = format!("items[{i}].rows");
            if item.rows.len() != raw.n {
                return Err(Error::Parse {
                    locus,
                    message: format!("expected {} rows, found {}", raw.n, item.rows.len()),
                });
            }
            if let Some((r, row)) = item.rows.iter().enumerate().find(|(_, r)| r.len() != raw.n) {
                return Err(Error::Parse {
                    locus: format!("{locus}[{r}]"),
                    message: format!("expected {} entries, found {}", raw.n, row.len()),
                });
            }
            let m = SpdMatrix::from_rows(&item.rows).map_err(|e| Error::Validation {
                label: item.label.clone(),
                reason: Box::new(e),
            })?;
            items.push((item.label, m));
        }
        if let Some(w) = &raw.weights {
            validate_weights(w, items.len()).map_err(|e| Error::Parse {
                locus: "weights".into(),
                message: e.to_string(),
            })?;
        }
        Self::new(items, raw.weights).map_err(|e| match e {
            Error::InvalidParameter(message) => Error::Parse {
                locus: "items".into(),
                message,
            },
            other => other,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    /// Serializes with 17 significant digits per entry.
    pub fn to_json_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{{\n  \"n\": {},\n  \"items\": [", self.n);
        for (k, (label, m)) in self.items.iter().enumerate() {
            let label = serde_json::to_string(label).expect("strings serialize");
            let _ = writeln!(out, "    {{\"label\": {label}, \"rows\": [");
            let rows = m.to_rows();
            for (r, row) in rows.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(|&v| fmt_exact(v)).collect();
                let sep = if r + 1 < rows.len() { "," } else { "" };
                let _ = writeln!(out, "      [{}]{sep}", cells.join(", "));
            }
            let sep = if k + 1 < self.items.len() { "," } else { "" };
            let _ = writeln!(out, "    ]}}{sep}");
        }
        out.push_str("  ]");
        if let Some(w) = &self.weights {
            let cells: Vec<String> = w.iter().map(|&v| fmt_exact(v)).collect();
            let _ = write!(out, ",\n  \"weights\": [{}]", cells.join(", "));
        }
        out.push_str("\n}\n");
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json_string())
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

fn validate_weights(w: &[f64], m: usize) -> Result<()> {
    if w.len() != m {
        return Err(Error::InvalidParameter(format!(
            "{} weights for {m} items",
            w.len()
        )));
    }
    if let Some(bad) = w.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("weight {bad} is negative or not finite")));
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::InvalidParameter(format!("weights sum to {sum}, not 1")));
    }
    Ok(())
}

fn fmt_exact(v: f64) -> String {
    format!("{v:.16e}")
}

/// serde_json appends " at line L column C"; the locus carries that already.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}
