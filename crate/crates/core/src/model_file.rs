//! JSON model files.
//!
//! A file is an object with a `kind` tag, either `"piecewise"`:
//!
//! ```json
//! {"kind": "piecewise", "order": 2, "cells": [
//!   {"value": "1", "blocks": [
//!     {"axis": "x", "positions": [1, 2], "lo": "0", "hi": "1", "kind": "chain"},
//!     {"axis": "y", "positions": [1, 2], "lo": "1", "hi": "2", "kind": "chain"}]}]}
//! ```
//!
//! or `"discrete"`:
//!
//! ```json
//! {"kind": "discrete", "order": 1, "atoms": [
//!   {"point": ["1", "3"], "prob": "0.5"}, {"point": ["2", "2"], "prob": "0.5"}]}
//! ```
//!
//! Reals are written as decimal strings in shortest round-trip form, so
//! writing and re-reading a model is lossless. Plain JSON numbers are
//! accepted on input. Unknown fields are rejected.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::concordance::OrthantProbability;
use crate::density::{Axis, Block, Cell, OrderKind, PiecewiseUniformDensity};
use crate::discrete::{Atom, DiscreteJoint};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

struct RealVisitor;

impl Visitor<'_> for RealVisitor {
    type Value = Real;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a decimal string or a number")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
        v.trim()
            .parse::<f64>()
            .map(Real)
            .map_err(|_| E::invalid_value(de::Unexpected::Str(v), &self))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
        Ok(Real(v))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
        Ok(Real(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
        Ok(Real(v as f64))
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Real, D::Error> {
        d.deserialize_any(RealVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    pub axis: Axis,
    pub positions: Vec<usize>,
    pub lo: Real,
    pub hi: Real,
    pub kind: OrderKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    pub value: Real,
    pub blocks: Vec<BlockSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub point: Vec<Real>,
    pub prob: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelFile {
    Piecewise { order: usize, cells: Vec<CellSpec> },
    Discrete { order: usize, atoms: Vec<AtomSpec> },
}

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("malformed model file: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("invalid model: {0}")]
    Invalid(#[from] crate::Error),
}

/// A loaded model of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Piecewise(PiecewiseUniformDensity),
    Discrete(DiscreteJoint),
}

impl Model {
    pub fn order(&self) -> usize {
        match self {
            Model::Piecewise(m) => m.order(),
            Model::Discrete(m) => m.order(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Model::Piecewise(_) => "piecewise",
            Model::Discrete(_) => "discrete",
        }
    }

    /// Full validation: mass and disjointness for densities; discrete laws
    /// are validated on construction.
    pub fn validate(&self) -> crate::Result<()> {
        match self {
            Model::Piecewise(m) => m.validate(),
            Model::Discrete(_) => Ok(()),
        }
    }

    pub fn exact_terms(&self) -> crate::Result<crate::DependenceTerms> {
        match self {
            Model::Piecewise(m) => crate::density::exact_terms(m),
            Model::Discrete(m) => m.exact_terms(),
        }
    }

    pub fn to_json(&self) -> String {
        ModelFile::from(self).to_json()
    }

    pub fn from_json(text: &str) -> Result<Model, ModelFileError> {
        Ok(ModelFile::from_json(text)?.build()?)
    }
}

impl OrthantProbability for Model {
    fn dim(&self) -> usize {
        2 * self.order()
    }

    fn cdf(&self, point: &[f64]) -> crate::Result<f64> {
        match self {
            Model::Piecewise(m) => m.cdf(point),
            Model::Discrete(m) => m.cdf(point),
        }
    }

    fn survival(&self, point: &[f64]) -> crate::Result<f64> {
        match self {
            Model::Piecewise(m) => m.survival(point),
            Model::Discrete(m) => m.survival(point),
        }
    }

    fn bounding_box(&self) -> Vec<(f64, f64)> {
        match self {
            Model::Piecewise(m) => m.bounding_box(),
            Model::Discrete(m) => m.bounding_box(),
        }
    }
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model files always serialize")
    }

    /// Builds the model, checking structure but not total mass.
    pub fn build(&self) -> crate::Result<Model> {
        match self {
            ModelFile::Piecewise { order, cells } => {
                let cells = cells
                    .iter()
                    .map(|c| {
                        let blocks = c
                            .blocks
                            .iter()
                            .map(|b| Block::new(b.axis, b.positions.clone(), b.lo.0, b.hi.0, b.kind))
                            .collect::<crate::Result<Vec<_>>>()?;
                        Cell::new(blocks, c.value.0)
                    })
                    .collect::<crate::Result<Vec<_>>>()?;
                Ok(Model::Piecewise(PiecewiseUniformDensity::new(*order, cells)?))
            }
            ModelFile::Discrete { order, atoms } => {
                let atoms = atoms
                    .iter()
                    .map(|a| Atom::new(a.point.iter().map(|r| r.0).collect(), a.prob.0))
                    .collect();
                Ok(Model::Discrete(DiscreteJoint::new(*order, atoms)?))
            }
        }
    }
}

impl From<&PiecewiseUniformDensity> for ModelFile {
    fn from(m: &PiecewiseUniformDensity) -> Self {
        let cells = m
            .cells()
            .iter()
            .map(|c| CellSpec {
                value: Real(c.value()),
                blocks: c
                    .blocks()
                    .iter()
                    .map(|b| BlockSpec {
                        axis: b.axis(),
                        positions: b.positions().to_vec(),
                        lo: Real(b.lo()),
                        hi: Real(b.hi()),
                        kind: b.kind(),
                    })
                    .collect(),
            })
            .collect();
        ModelFile::Piecewise {
            order: m.order(),
            cells,
        }
    }
}

impl From<&DiscreteJoint> for ModelFile {
    fn from(m: &DiscreteJoint) -> Self {
        let atoms = m
            .atoms()
            .iter()
            .map(|a| AtomSpec {
                point: a.point.iter().map(|&v| Real(v)).collect(),
                prob: Real(a.prob),
            })
            .collect();
        ModelFile::Discrete {
            order: m.order(),
            atoms,
        }
    }
}

impl From<&Model> for ModelFile {
    fn from(m: &Model) -> Self {
        match m {
            Model::Piecewise(p) => p.into(),
            Model::Discrete(d) => d.into(),
        }
    }
}
