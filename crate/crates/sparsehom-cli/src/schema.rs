//! The JSON input format: one polynomial system per file.
//!
//! ```json
//! {
//!   "variables": ["x", "y"],
//!   "polys": [{"terms": [{"exponent": [1, 0], "coeff": [3.0, 0.0]}]}]
//! }
//! ```
//!
//! With `"supports_only": true` the coefficients may be omitted; only the
//! supports are used (mixed volumes, subdivisions).

use serde::{Deserialize, Serialize};
use sparsehom::poly::{c, Term};
use sparsehom::{SparsePoly, SparseSystem};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SchemaError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("the system has no polynomials")]
    Empty,
    #[error("no variables declared")]
    NoVariables,
    #[error("variable {0:?} is declared twice")]
    DuplicateVariable(String),
    #[error("polynomial {poly}, term {term}: exponent has length {got}, expected {expected}")]
    ExponentLength { poly: usize, term: usize, got: usize, expected: usize },
    #[error("polynomial {poly}, term {term}: missing coefficient")]
    MissingCoeff { poly: usize, term: usize },
    #[error("polynomial {poly}, term {term}: coefficient is not finite")]
    NonFinite { poly: usize, term: usize },
    #[error("polynomial {0} is zero")]
    ZeroPoly(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputTerm {
    pub exponent: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeff: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputPoly {
    pub terms: Vec<InputTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputFile {
    pub variables: Vec<String>,
    pub polys: Vec<InputPoly>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub supports_only: bool,
}

/// A validated input: the system plus its variable names.
#[derive(Clone, Debug)]
pub struct Input {
    pub variables: Vec<String>,
    pub system: SparseSystem,
    pub supports_only: bool,
}

impl Input {
    pub fn parse(text: &str) -> Result<Input, SchemaError> {
        let file: InputFile = serde_json::from_str(text).map_err(|e| SchemaError::Json(e.to_string()))?;
        Input::from_file(file)
    }

    pub fn from_file(file: InputFile) -> Result<Input, SchemaError> {
        let n = file.variables.len();
        if n == 0 {
            return Err(SchemaError::NoVariables);
        }
        if file.polys.is_empty() {
            return Err(SchemaError::Empty);
        }
        for (i, v) in file.variables.iter().enumerate() {
            if file.variables[..i].contains(v) {
                return Err(SchemaError::DuplicateVariable(v.clone()));
            }
        }
        let mut polys = Vec::with_capacity(file.polys.len());
        for (pi, p) in file.polys.iter().enumerate() {
            let mut terms = Vec::with_capacity(p.terms.len());
            for (ti, t) in p.terms.iter().enumerate() {
                if t.exponent.len() != n {
                    return Err(SchemaError::ExponentLength { poly: pi, term: ti, got: t.exponent.len(), expected: n });
                }
                let coeff = match (t.coeff, file.supports_only) {
                    (Some([re, im]), _) if re.is_finite() && im.is_finite() => c(re, im),
                    (Some(_), _) => return Err(SchemaError::NonFinite { poly: pi, term: ti }),
                    (None, true) => c(1.0, 0.0),
                    (None, false) => return Err(SchemaError::MissingCoeff { poly: pi, term: ti }),
                };
                terms.push(Term { exponent: t.exponent.clone(), coeff });
            }
            let poly = SparsePoly::new(n, terms).expect("exponent lengths checked");
            if poly.is_zero() {
                return Err(SchemaError::ZeroPoly(pi));
            }
            polys.push(poly);
        }
        let system = SparseSystem::new(polys).expect("variable counts agree");
        Ok(Input { variables: file.variables, system, supports_only: file.supports_only })
    }

    pub fn to_file(&self) -> InputFile {
        let polys = self
            .system
            .polys
            .iter()
            .map(|p| InputPoly {
                terms: p
                    .terms()
                    .iter()
                    .map(|t| InputTerm { exponent: t.exponent.clone(), coeff: (!self.supports_only).then_some([t.coeff.re, t.coeff.im]) })
                    .collect(),
            })
            .collect();
        InputFile { variables: self.variables.clone(), polys, supports_only: self.supports_only }
    }

    /// Canonical text: terms in canonical order, duplicates merged, zero
    /// coefficients dropped, pretty-printed with a trailing newline.
    pub fn canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("serializable");
        s.push('\n');
        s
    }
}
