//! Group files:
//!
//! ```json
//! { "rank": 2,
//!   "generators": [[[a_re, a_im], [b_re, b_im], [c_re, c_im], [d_re, d_im]], ...],
//!   "circles": [{"center": [x, y], "radius": r}, ...],
//!   "name": "optional", "provenance": "optional" }
//! ```

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::moebius::{Complex, Moebius};
use crate::schottky::{Circle, CirclePairing, SchottkyGroup};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DocumentError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

fn field_error(field: impl Into<String>, message: impl Into<String>) -> DocumentError {
    DocumentError::Field {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupDocument {
    pub rank: usize,
    pub generators: Vec<Moebius>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circles: Option<Vec<Circle>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

fn number(v: &Value, field: &str) -> Result<f64, DocumentError> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| field_error(field, format!("expected a finite number, found {v}")))
}

fn complex(v: &Value, field: &str) -> Result<Complex, DocumentError> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => Ok(Complex::new(
            number(re, &format!("{field}[0]"))?,
            number(im, &format!("{field}[1]"))?,
        )),
        _ => Err(field_error(field, "expected [re, im]")),
    }
}

fn matrix(v: &Value, field: &str) -> Result<Moebius, DocumentError> {
    let rows = v
        .as_array()
        .filter(|a| a.len() == 4)
        .ok_or_else(|| field_error(field, "expected four [re, im] entries a, b, c, d"))?;
    let e: Vec<Complex> = rows
        .iter()
        .enumerate()
        .map(|(k, z)| complex(z, &format!("{field}[{k}]")))
        .collect::<Result<_, _>>()?;
    Moebius::new(e[0], e[1], e[2], e[3]).map_err(|err| field_error(field, err.to_string()))
}

fn circle(v: &Value, field: &str) -> Result<Circle, DocumentError> {
    let obj = v
        .as_object()
        .ok_or_else(|| field_error(field, "expected {\"center\": [x, y], \"radius\": r}"))?;
    let center = complex(
        obj.get("center")
            .ok_or_else(|| field_error(format!("{field}.center"), "missing"))?,
        &format!("{field}.center"),
    )?;
    let radius = number(
        obj.get("radius")
            .ok_or_else(|| field_error(format!("{field}.radius"), "missing"))?,
        &format!("{field}.radius"),
    )?;
    Circle::new(center, radius).map_err(|err| field_error(format!("{field}.radius"), err.to_string()))
}

fn optional_string(obj: &serde_json::Map<String, Value>, key: &str) -> Result<Option<String>, DocumentError> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(other) => Err(field_error(key, format!("expected a string, found {other}"))),
    }
}

impl GroupDocument {
    pub fn parse(text: &str) -> Result<GroupDocument, DocumentError> {
        let value: Value = serde_json::from_str(text).map_err(|e| DocumentError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let obj = value
            .as_object()
            .ok_or_else(|| field_error("<root>", "expected a JSON object"))?;
        let rank = obj
            .get("rank")
            .ok_or_else(|| field_error("rank", "missing"))?
            .as_u64()
            .filter(|&r| r >= 1)
            .ok_or_else(|| field_error("rank", "expected a positive integer"))? as usize;
        let gens = obj
            .get("generators")
            .ok_or_else(|| field_error("generators", "missing"))?
            .as_array()
            .ok_or_else(|| field_error("generators", "expected an array of matrices"))?;
        if gens.len() != rank {
            return Err(field_error(
                "generators",
                format!("rank is {rank} but {} generators are given", gens.len()),
            ));
        }
        let generators = gens
            .iter()
            .enumerate()
            .map(|(i, m)| matrix(m, &format!("generators[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let circles = match obj.get("circles") {
            None | Some(Value::Null) => None,
            Some(v) => {
                let list = v
                    .as_array()
                    .ok_or_else(|| field_error("circles", "expected an array of circles"))?;
                if list.len() != 2 * rank {
                    return Err(field_error(
                        "circles",
                        format!("expected {} circles, found {}", 2 * rank, list.len()),
                    ));
                }
                Some(
                    list.iter()
                        .enumerate()
                        .map(|(i, c)| circle(c, &format!("circles[{i}]")))
                        .collect::<Result<Vec<_>, _>>()?,
                )
            }
        };
        Ok(GroupDocument {
            rank,
            generators,
            circles,
            name: optional_string(obj, "name")?,
            provenance: optional_string(obj, "provenance")?,
        })
    }

    /// Builds the group; a given pairing must verify.
    pub fn to_group(&self) -> Result<SchottkyGroup, DocumentError> {
        let group = match &self.circles {
            None => SchottkyGroup::new(self.generators.clone()),
            Some(c) => CirclePairing::new(c.clone())
                .and_then(|p| SchottkyGroup::with_pairing(self.generators.clone(), p)),
        };
        group.map_err(|err| {
            let field = if self.circles.is_some() { "circles" } else { "generators" };
            field_error(field, err.to_string())
        })
    }

    pub fn from_group(group: &SchottkyGroup, name: Option<&str>) -> GroupDocument {
        GroupDocument {
            rank: group.rank(),
            generators: group.generators().to_vec(),
            circles: group.pairing().map(|p| p.circles.clone()),
            name: name.map(str::to_string),
            provenance: None,
        }
    }
}
