use std::f64::consts::TAU;
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::rotation::{RotationMatrix, ROTATION_TOLERANCE};
use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryKind {
    Discrete,
    /// Continuous rotational symmetry about a body-frame axis; only that axis is encoded.
    RevolutionAxis(Vector3<f64>),
}

/// The rotations mapping an object onto itself.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrySet {
    rotations: Vec<RotationMatrix>,
    kind: SymmetryKind,
}

fn same(a: &RotationMatrix, b: &RotationMatrix) -> bool {
    (a.matrix() - b.matrix()).abs().max() <= ROTATION_TOLERANCE
}

impl SymmetrySet {
    /// Asymmetric object.
    pub fn identity() -> Self {
        Self { rotations: vec![RotationMatrix::identity()], kind: SymmetryKind::Discrete }
    }

    /// A finite group given by all of its elements. It must contain the identity and be
    /// closed under products.
    pub fn discrete(rotations: Vec<RotationMatrix>) -> Result<Self> {
        if !rotations.iter().any(|r| same(r, &RotationMatrix::identity())) {
            return Err(domain("symmetry set must contain the identity"));
        }
        for (i, a) in rotations.iter().enumerate() {
            if rotations[..i].iter().any(|b| same(a, b)) {
                return Err(domain(format!("symmetry element {i} is listed twice")));
            }
        }
        for a in &rotations {
            for b in &rotations {
                let p = a * b;
                if !rotations.iter().any(|r| same(r, &p)) {
                    return Err(domain("symmetry set is not closed under composition"));
                }
            }
        }
        Ok(Self { rotations, kind: SymmetryKind::Discrete })
    }

    /// `order` rotations by multiples of `2 pi / order` about `axis`.
    pub fn cyclic(axis: &Vector3<f64>, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(domain("cyclic symmetry order must be at least 1"));
        }
        let rotations = (0..order)
            .map(|k| RotationMatrix::about(axis, TAU * k as f64 / order as f64))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rotations, kind: SymmetryKind::Discrete })
    }

    pub fn revolution(axis: &Vector3<f64>) -> Result<Self> {
        let n = axis.norm();
        if !(n > 1e-12) || !n.is_finite() {
            return Err(domain("revolution axis must be a non-zero finite vector"));
        }
        Ok(Self { rotations: vec![RotationMatrix::identity()], kind: SymmetryKind::RevolutionAxis(axis / n) })
    }

    pub fn rotations(&self) -> &[RotationMatrix] {
        &self.rotations
    }

    pub fn kind(&self) -> SymmetryKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.rotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rotations.is_empty()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<SymmetryDocument>(text)?.try_into()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_document(&self) -> SymmetryDocument {
        match self.kind {
            SymmetryKind::Discrete => SymmetryDocument::Tagged(SymmetrySpec::Explicit {
                rotations: self.rotations.iter().map(RotationMatrix::to_row_major).collect(),
            }),
            SymmetryKind::RevolutionAxis(axis) => {
                SymmetryDocument::Tagged(SymmetrySpec::Revolution { axis: [axis.x, axis.y, axis.z] })
            }
        }
    }
}

/// On-disk symmetry description: a bare list of row-major matrices, or a tagged object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymmetryDocument {
    Matrices(Vec<[f64; 9]>),
    Tagged(SymmetrySpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymmetrySpec {
    Identity,
    Explicit { rotations: Vec<[f64; 9]> },
    Cyclic { axis: [f64; 3], order: usize },
    Revolution { axis: [f64; 3] },
}

impl TryFrom<SymmetryDocument> for SymmetrySet {
    type Error = crate::Error;

    fn try_from(doc: SymmetryDocument) -> Result<Self> {
        let explicit = |rows: Vec<[f64; 9]>| {
            let rotations = rows.into_iter().map(RotationMatrix::try_from).collect::<Result<Vec<_>>>()?;
            SymmetrySet::discrete(rotations)
        };
        match doc {
            SymmetryDocument::Matrices(rows) => explicit(rows),
            SymmetryDocument::Tagged(SymmetrySpec::Identity) => Ok(SymmetrySet::identity()),
            SymmetryDocument::Tagged(SymmetrySpec::Explicit { rotations }) => explicit(rotations),
            SymmetryDocument::Tagged(SymmetrySpec::Cyclic { axis, order }) => {
                SymmetrySet::cyclic(&Vector3::from(axis), order)
            }
            SymmetryDocument::Tagged(SymmetrySpec::Revolution { axis }) => {
                SymmetrySet::revolution(&Vector3::from(axis))
            }
        }
    }
}
