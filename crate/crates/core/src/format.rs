//! JSON input formats. Indices in files are 1-based.
//!
//! Tensor:
//! ```json
//! {"order": 3, "dims": [2, 2, 2], "symmetrize": true,
//!  "entries": [{"idx": [1, 1, 2], "value": 0.577}]}
//! ```
//! With `symmetrize`, each entry is one representative of its permutation
//! orbit and the value is copied to every permutation.
//!
//! State:
//! ```json
//! {"dims": [2, 2, 2], "label": "w",
//!  "amplitudes": [{"idx": [1, 1, 2], "value": 0.577}]}
//! ```

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::PureState;
use crate::tensor::{AnyTensor, GenTensor, IndexIter, SymTensor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub idx: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorFile {
    pub order: usize,
    pub dims: Vec<usize>,
    pub entries: Vec<Entry>,
    #[serde(default)]
    pub symmetrize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub amplitudes: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// True when a parsed JSON document looks like a state rather than a tensor.
pub fn is_state_document(v: &serde_json::Value) -> bool {
    v.get("amplitudes").is_some()
}

fn zero_based(entries: &[Entry], dims: &[usize]) -> Result<Vec<(Vec<usize>, f64)>> {
    let mut seen = HashSet::new();
    entries
        .iter()
        .map(|e| {
            if e.idx.len() != dims.len() {
                return Err(Error::Format(format!(
                    "index {:?} has {} components, expected {}",
                    e.idx,
                    e.idx.len(),
                    dims.len()
                )));
            }
            if let Some((k, _)) = e.idx.iter().zip(dims).enumerate().find(|(_, (&i, &d))| i == 0 || i > d) {
                return Err(Error::Format(format!(
                    "index {:?} out of range in mode {} (indices are 1-based, dimension {})",
                    e.idx,
                    k + 1,
                    dims[k]
                )));
            }
            if !seen.insert(e.idx.clone()) {
                return Err(Error::Format(format!("duplicate index {:?}", e.idx)));
            }
            Ok((e.idx.iter().map(|i| i - 1).collect(), e.value))
        })
        .collect()
}

impl TensorFile {
    pub fn into_tensor(self) -> Result<AnyTensor> {
        if self.order != self.dims.len() {
            return Err(Error::Format(format!(
                "order {} does not match {} dims",
                self.order,
                self.dims.len()
            )));
        }
        let entries = zero_based(&self.entries, &self.dims)?;
        if self.symmetrize {
            let n = self.dims[0];
            if self.dims.iter().any(|&d| d != n) {
                return Err(Error::Format("symmetrize requires equal dimensions".into()));
            }
            return SymTensor::from_orbits(self.order, n, entries).map(AnyTensor::Symmetric);
        }
        GenTensor::from_entries(self.dims, entries).map(AnyTensor::classify)
    }

    /// Lists the nonzero entries of `t` without symmetrization.
    pub fn from_tensor(t: &AnyTensor) -> TensorFile {
        let g = t.general();
        let entries = IndexIter::new(g.dims())
            .zip(g.data())
            .filter(|(_, &v)| v != 0.0)
            .map(|(idx, &value)| Entry {
                idx: idx.iter().map(|i| i + 1).collect(),
                value,
            })
            .collect();
        TensorFile {
            order: g.order(),
            dims: g.dims().to_vec(),
            entries,
            symmetrize: false,
        }
    }
}

impl StateFile {
    pub fn into_state(self) -> Result<PureState> {
        let entries = zero_based(&self.amplitudes, &self.dims)?;
        PureState::from_entries(self.dims, entries, self.label)
    }

    pub fn from_state(s: &PureState) -> StateFile {
        let amplitudes = IndexIter::new(s.dims())
            .zip(s.amplitudes())
            .filter(|(_, &v)| v != 0.0)
            .map(|(idx, &value)| Entry {
                idx: idx.iter().map(|i| i + 1).collect(),
                value,
            })
            .collect();
        StateFile {
            dims: s.dims().to_vec(),
            amplitudes,
            label: s.label().map(str::to_owned),
        }
    }
}

fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

pub fn parse_tensor(text: &str) -> Result<AnyTensor> {
    from_json::<TensorFile>(text)?.into_tensor()
}

pub fn parse_state(text: &str) -> Result<PureState> {
    from_json::<StateFile>(text)?.into_state()
}
