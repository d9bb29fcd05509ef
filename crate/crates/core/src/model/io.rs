//! JSON form of an [`Instance`].
//!
//! ```json
//! {"points": [...], "probs": [...], "hypotheses": 3, "prior": [...], "loss_table": [[...], ...]}
//! ```
//!
//! `loss_table` has one row per hypothesis and one column per point. Floats are
//! written in shortest round-trip form and parsed with exact rounding, so a
//! write/read cycle reproduces every `f64` bit for bit.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{FiniteDataDomain, FiniteHypothesisSpace, Instance};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDocument<X> {
    pub points: Vec<X>,
    pub probs: Vec<f64>,
    pub hypotheses: usize,
    pub prior: Vec<f64>,
    pub loss_table: Vec<Vec<f64>>,
}

impl<X: Clone, H> Instance<X, H> {
    pub fn to_document(&self) -> InstanceDocument<X> {
        InstanceDocument {
            points: self.domain.points().to_vec(),
            probs: self.domain.probs().to_vec(),
            hypotheses: self.space.len(),
            prior: self.space.prior().to_vec(),
            loss_table: self.space.rows().map(<[f64]>::to_vec).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String>
    where
        X: Serialize,
    {
        Ok(serde_json::to_string(&self.to_document())?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()>
    where
        X: Serialize,
    {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

impl<X> Instance<X, usize> {
    pub fn from_document(doc: InstanceDocument<X>) -> Result<Self> {
        if doc.hypotheses != doc.loss_table.len() {
            return Err(Error::Format(format!(
                "\"hypotheses\" is {} but loss_table has {} rows",
                doc.hypotheses,
                doc.loss_table.len()
            )));
        }
        let domain = FiniteDataDomain::new(doc.points, doc.probs)?;
        let space = FiniteHypothesisSpace::from_table(doc.prior, doc.loss_table)?;
        Instance::new(domain, space)
    }

    pub fn from_json(s: &str) -> Result<Self>
    where
        X: DeserializeOwned,
    {
        Self::from_document(serde_json::from_str(s)?)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self>
    where
        X: DeserializeOwned,
    {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
