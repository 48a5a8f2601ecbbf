// Copyright 2026 The lqrlr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


//! JSON model files.
//!
//! ```json
//! {
//!   "n": 2, "m": 1, "l": 1,
//!   "A": [[0.0, 1.0], [0.0, 0.0]],
//!   "B1": [[0.0], [1.0]],
//!   "B2": [[0.0], [1.0]],
//!   "Q": [[1.0, 0.0], [0.0, 1.0]],
//!   "R": [[1.0]],
//!   "structure": { "input_groups": [0], "state_groups": [0, 0] },
//!   "layout": { "extent": 10.0, "positions": [[1.0, 2.0]], "seed": 7, "coupling_sign": -1 }
//! }
//! ```
//!
//! Matrices are lists of rows. `layout` is optional and only informative.

use std::fs;
use std::path::Path;

use lqrlr_core::admm::BlockStructure;
use lqrlr_core::network::AgentLayout;
use lqrlr_core::{Matrix, StateSpaceModel};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::format::{matrix_rows, to_json};

/// A parse or validation failure, located by field path (`A[2][1]`).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{field}: {message}")]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

/// Where the agents of a generated model sit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutInfo {
    pub extent: f64,
    pub positions: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub coupling_sign: i32,
}

impl LayoutInfo {
    pub fn new(layout: &AgentLayout, seed: Option<u64>, coupling_sign: i32) -> Self {
        Self {
            extent: layout.extent,
            positions: layout.positions.iter().map(|&(x, y)| [x, y]).collect(),
            seed,
            coupling_sign,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub model: StateSpaceModel,
    pub structure: BlockStructure,
    pub layout: Option<LayoutInfo>,
}

#[derive(Serialize)]
struct StructureDoc<'a> {
    input_groups: &'a [usize],
    state_groups: &'a [usize],
}

#[derive(Serialize)]
struct Doc<'a> {
    n: usize,
    m: usize,
    l: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(rename = "B1")]
    b1: Vec<Vec<f64>>,
    #[serde(rename = "B2")]
    b2: Vec<Vec<f64>>,
    #[serde(rename = "Q")]
    q: Vec<Vec<f64>>,
    #[serde(rename = "R")]
    r: Vec<Vec<f64>>,
    structure: StructureDoc<'a>,
    #[serde(skip_serializing_if = "Option::is_none")]
    layout: Option<&'a LayoutInfo>,
}

const FIELDS: [&str; 10] = ["n", "m", "l", "A", "B1", "B2", "Q", "R", "structure", "layout"];

impl ModelFile {
    pub fn to_json(&self) -> String {
        let m = &self.model;
        to_json(&Doc {
            n: m.n(),
            m: m.m(),
            l: m.l(),
            a: matrix_rows(m.a()),
            b1: matrix_rows(m.b1()),
            b2: matrix_rows(m.b2()),
            q: matrix_rows(m.q()),
            r: matrix_rows(m.r()),
            structure: StructureDoc {
                input_groups: self.structure.input_groups(),
                state_groups: self.structure.state_groups(),
            },
            layout: self.layout.as_ref(),
        })
    }

    pub fn parse(text: &str) -> Result<Self, FieldError> {
        let root: Value = serde_json::from_str(text).map_err(|e| FieldError::new("document", e.to_string()))?;
        let obj = root
            .as_object()
            .ok_or_else(|| FieldError::new("document", "expected a JSON object"))?;
        if let Some(key) = obj.keys().find(|k| !FIELDS.contains(&k.as_str())) {
            return Err(FieldError::new(key.as_str(), "unknown field"));
        }
        let n = dimension(obj, "n")?;
        let m = dimension(obj, "m")?;
        let l = dimension(obj, "l")?;
        let a = matrix(obj, "A", n, n)?;
        let b1 = matrix(obj, "B1", n, m)?;
        let b2 = matrix(obj, "B2", n, l)?;
        let q = matrix(obj, "Q", n, n)?;
        let r = matrix(obj, "R", m, m)?;
        let structure = structure(obj, m, n)?;
        let layout = match obj.get("layout") {
            None | Some(Value::Null) => None,
            Some(v) => Some(LayoutInfo::deserialize(v).map_err(|e| FieldError::new("layout", e.to_string()))?),
        };
        let model = StateSpaceModel::new(a, b1, b2, q, r).map_err(|e| {
            let message = e.to_string();
            let field = ["A", "B1", "B2", "Q", "R"]
                .into_iter()
                .find(|f| message.split_whitespace().any(|w| w == *f))
                .unwrap_or("model");
            FieldError::new(field, message)
        })?;
        Ok(Self {
            model,
            structure,
            layout,
        })
    }

    pub fn load(path: &Path) -> Result<Self, FieldError> {
        let text = fs::read_to_string(path).map_err(|e| FieldError::new("file", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

fn dimension(obj: &Map<String, Value>, key: &str) -> Result<usize, FieldError> {
    let v = obj.get(key).ok_or_else(|| FieldError::new(key, "missing"))?;
    match v.as_u64() {
        Some(d) if d > 0 => Ok(d as usize),
        _ => Err(FieldError::new(key, format!("expected a positive integer, found {v}"))),
    }
}

fn matrix(obj: &Map<String, Value>, key: &str, rows: usize, cols: usize) -> Result<Matrix, FieldError> {
    let v = obj.get(key).ok_or_else(|| FieldError::new(key, "missing"))?;
    let list = v
        .as_array()
        .ok_or_else(|| FieldError::new(key, "expected a list of rows"))?;
    if list.len() != rows {
        return Err(FieldError::new(key, format!("expected {rows} rows, found {}", list.len())));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for (i, row) in list.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| FieldError::new(format!("{key}[{i}]"), "expected a list of numbers"))?;
        if row.len() != cols {
            return Err(FieldError::new(
                format!("{key}[{i}]"),
                format!("expected {cols} columns, found {}", row.len()),
            ));
        }
        for (j, x) in row.iter().enumerate() {
            match x.as_f64() {
                Some(x) if x.is_finite() => data.push(x),
                _ => return Err(FieldError::new(format!("{key}[{i}][{j}]"), format!("expected a finite number, found {x}"))),
            }
        }
    }
    Ok(Matrix::from_vec(rows, cols, data).expect("length checked"))
}

fn groups(obj: &Map<String, Value>, key: &str, len: usize) -> Result<Vec<usize>, FieldError> {
    let path = format!("structure.{key}");
    let list = obj
        .get(key)
        .ok_or_else(|| FieldError::new(&path, "missing"))?
        .as_array()
        .ok_or_else(|| FieldError::new(&path, "expected a list of agent indices"))?;
    if list.len() != len {
        return Err(FieldError::new(&path, format!("expected {len} entries, found {}", list.len())));
    }
    list.iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_u64()
                .map(|g| g as usize)
                .ok_or_else(|| FieldError::new(format!("{path}[{i}]"), format!("expected an agent index, found {v}")))
        })
        .collect()
}

fn structure(obj: &Map<String, Value>, m: usize, n: usize) -> Result<BlockStructure, FieldError> {
    let s = obj
        .get("structure")
        .ok_or_else(|| FieldError::new("structure", "missing"))?
        .as_object()
        .ok_or_else(|| FieldError::new("structure", "expected an object"))?;
    let inputs = groups(s, "input_groups", m)?;
    let states = groups(s, "state_groups", n)?;
    let agents = inputs.iter().chain(&states).max().map_or(0, |g| g + 1);
    BlockStructure::new(inputs, states, agents).map_err(|e| FieldError::new("structure", e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCALAR: &str = r#"{"n": 1, "m": 1, "l": 1, "A": [[1]], "B1": [[1]], "B2": [[1]], "Q": [[1]], "R": [[1]],
        "structure": {"input_groups": [0], "state_groups": [0]}}"#;

    #[test]
    fn scalar_round_trip() {
        let f = ModelFile::parse(SCALAR).unwrap();
        assert_eq!(f.model.a(), &Matrix::from_rows(&[[1.0]]));
        assert_eq!(ModelFile::parse(&f.to_json()).unwrap(), f);
    }

    #[test]
    fn errors_name_the_field() {
        let bad = SCALAR.replace(r#""A": [[1]]"#, r#""A": [[1, 2]]"#);
        assert_eq!(ModelFile::parse(&bad).unwrap_err().field, "A[0]");
        let bad = SCALAR.replace(r#""Q": [[1]]"#, r#""Q": [["x"]]"#);
        assert_eq!(ModelFile::parse(&bad).unwrap_err().field, "Q[0][0]");
        let bad = SCALAR.replace(r#""R": [[1]]"#, r#""R": [[-1]]"#);
        assert_eq!(ModelFile::parse(&bad).unwrap_err().field, "R");
        let bad = SCALAR.replace(r#""n": 1"#, r#""n": 0"#);
        assert_eq!(ModelFile::parse(&bad).unwrap_err().field, "n");
        let bad = SCALAR.replace(r#""state_groups": [0]"#, r#""state_groups": [0, 1]"#);
        assert_eq!(ModelFile::parse(&bad).unwrap_err().field, "structure.state_groups");
        let bad = SCALAR.replace(r#""l": 1"#, r#""l": 1, "C": 3"#);
        assert_eq!(ModelFile::parse(&bad).unwrap_err().field, "C");
    }
}
