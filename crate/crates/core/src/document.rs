//! Versioned JSON document for a trained model.
//!
//! ```json
//! {"version": 1, "d": 2, "N": 2, "C": 1e10, "eps": 1e-10,
//!  "tau": [1.0, 0.0], "tau0": 0.0,
//!  "extremes": [{"index": 0, "label": 1, "psi": 0.5, "x": [1.0, 0.0]}, ...]}
//! ```
//!
//! Floats carry 17 significant digits so a save/load cycle is bit exact.
//! `τ` and `τ₀` are stored, not recomputed, so an edited document still loads
//! and can be audited.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::Label;
use crate::model::{EigenlocusModel, ExtremePoint, SolverSummary};
use crate::scalar::Scalar;

pub const MODEL_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremeRecord {
    pub index: usize,
    pub label: i8,
    pub psi: f64,
    pub x: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverRecord {
    pub iterations: usize,
    pub duality_gap: f64,
    pub objective: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub version: u32,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "C")]
    pub c: f64,
    pub eps: f64,
    pub tau: Vec<f64>,
    pub tau0: f64,
    pub extremes: Vec<ExtremeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverRecord>,
}

const REQUIRED: [&str; 8] = ["version", "d", "N", "C", "eps", "tau", "tau0", "extremes"];
const EXTREME_REQUIRED: [&str; 4] = ["index", "label", "psi", "x"];

impl ModelDocument {
    pub fn from_model<T: Scalar>(m: &EigenlocusModel<T>) -> Self {
        let f = |v: &[T]| v.iter().map(|x| x.to_f64_lossy()).collect::<Vec<_>>();
        Self {
            version: MODEL_VERSION,
            d: m.dim(),
            n: m.n_train(),
            c: m.c().to_f64_lossy(),
            eps: m.eps().to_f64_lossy(),
            tau: f(m.tau()),
            tau0: m.tau0().to_f64_lossy(),
            extremes: m
                .extremes()
                .iter()
                .map(|e| ExtremeRecord {
                    index: e.index,
                    label: e.label.as_i8(),
                    psi: e.psi.to_f64_lossy(),
                    x: f(&e.x),
                })
                .collect(),
            solver: m.solver().map(|s| SolverRecord {
                iterations: s.iterations,
                duality_gap: s.duality_gap.to_f64_lossy(),
                objective: s.objective.to_f64_lossy(),
                converged: s.converged,
            }),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        crate::json::to_string(self)
    }

    /// Parses and validates; a missing field is reported by name.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("malformed model document: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Parse("model document must be a JSON object".into()))?;
        for key in REQUIRED {
            if !obj.contains_key(key) {
                return Err(Error::MissingField(key.to_string()));
            }
        }
        if let Some(found) = obj["version"].as_u64() {
            if found != u64::from(MODEL_VERSION) {
                return Err(Error::Version {
                    found,
                    expected: u64::from(MODEL_VERSION),
                });
            }
        }
        if let Some(list) = obj["extremes"].as_array() {
            for (k, e) in list.iter().enumerate() {
                for key in EXTREME_REQUIRED {
                    if e.get(key).is_none() {
                        return Err(Error::MissingField(format!("extremes[{k}].{key}")));
                    }
                }
            }
        }
        let doc: Self = serde_json::from_value(value)
            .map_err(|e| Error::Parse(format!("model document: {e}")))?;
        doc.validate()?;
        Ok(doc)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.d == 0 {
            return bad("d must be positive".into());
        }
        if !(self.c > 0.0) || !self.c.is_finite() {
            return bad(format!("C must be positive and finite, found {}", self.c));
        }
        if self.tau.len() != self.d {
            return bad(format!("tau has {} entries, d = {}", self.tau.len(), self.d));
        }
        if self.extremes.is_empty() {
            return Err(Error::NoExtremePoints);
        }
        let mut prev = None;
        for e in &self.extremes {
            if e.psi < 0.0 {
                return bad(format!("extreme {}: psi = {} < 0", e.index, e.psi));
            }
            if Label::from_i64(i64::from(e.label)).is_none() {
                return bad(format!("extreme {}: label must be +1 or -1", e.index));
            }
            if e.x.len() != self.d {
                return bad(format!("extreme {}: x has {} entries", e.index, e.x.len()));
            }
            if e.index >= self.n {
                return bad(format!("extreme index {} >= N = {}", e.index, self.n));
            }
            if prev.is_some_and(|p| p >= e.index) {
                return bad("extreme indices must be strictly increasing".into());
            }
            prev = Some(e.index);
        }
        let finite = self.tau.iter().chain(self.extremes.iter().flat_map(|e| &e.x));
        if !self.tau0.is_finite() || finite.into_iter().any(|v| !v.is_finite()) {
            return bad("non-finite value in model document".into());
        }
        Ok(())
    }

    pub fn into_model<T: Scalar>(self) -> Result<EigenlocusModel<T>> {
        let lit = |v: &[f64]| v.iter().map(|&x| T::lit(x)).collect::<Vec<T>>();
        let mut psi = vec![T::zero(); self.n];
        let mut extremes = Vec::with_capacity(self.extremes.len());
        for e in &self.extremes {
            psi[e.index] = T::lit(e.psi);
            extremes.push(ExtremePoint {
                index: e.index,
                label: Label::from_i64(i64::from(e.label)).expect("validated label"),
                psi: T::lit(e.psi),
                x: lit(&e.x),
            });
        }
        let solver = self.solver.map(|s| SolverSummary {
            iterations: s.iterations,
            duality_gap: T::lit(s.duality_gap),
            objective: T::lit(s.objective),
            converged: s.converged,
        });
        EigenlocusModel::from_document_parts(
            self.n,
            self.d,
            T::lit(self.c),
            psi,
            extremes,
            lit(&self.tau),
            T::lit(self.tau0),
            solver,
        )
    }
}

impl<T: Scalar> EigenlocusModel<T> {
    pub fn to_json(&self) -> Result<String> {
        ModelDocument::from_model(self).to_json()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        ModelDocument::from_json(text)?.into_model()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
