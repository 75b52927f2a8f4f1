use std::f64::consts::TAU;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::lattice::FibonacciLattice;
use super::rotation::{angle_between, circular_distance, rotation_to_axis_angle, AxisAngle, RotationMatrix};
use super::symmetry::{SymmetryKind, SymmetrySet};
use crate::error::{domain, Result};
use crate::tuning::{argmax, CodeVector};

pub const DEFAULT_N_AXES: usize = 2562;
pub const DEFAULT_N_ANGLES: usize = 36;
pub const DEFAULT_SIGMA_DEG: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum So3Mode {
    /// One neuron per (axis, angle) pair; code length `n_axes * n_angles`.
    AxisAngle,
    /// One neuron per axis, for objects with a revolution axis.
    AxisOnly,
}

impl std::fmt::Display for So3Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            So3Mode::AxisAngle => "axis_angle",
            So3Mode::AxisOnly => "axis_only",
        })
    }
}

impl std::str::FromStr for So3Mode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "axis_angle" => Ok(So3Mode::AxisAngle),
            "axis_only" => Ok(So3Mode::AxisOnly),
            other => Err(domain(format!("unknown SO(3) code mode '{other}'"))),
        }
    }
}

/// Gaussian population code over a Fibonacci lattice of axes times a circle of angles.
///
/// Neuron `axis * n_angles + m` prefers the lattice axis `axis` and the angle
/// `2 pi m / n_angles`.
#[derive(Debug, Clone, PartialEq)]
pub struct So3CodeSpec {
    lattice: FibonacciLattice,
    n_angles: usize,
    sigma_rad: f64,
    mode: So3Mode,
}

impl So3CodeSpec {
    pub fn new(n_axes: usize, n_angles: usize, sigma_rad: f64, mode: So3Mode) -> Result<Self> {
        if n_angles == 0 {
            return Err(domain("n_angles must be at least 1"));
        }
        if !(sigma_rad > 0.0) || !sigma_rad.is_finite() {
            return Err(domain(format!("sigma must be positive and finite, got {sigma_rad}")));
        }
        Ok(Self { lattice: FibonacciLattice::new(n_axes)?, n_angles, sigma_rad, mode })
    }

    /// 2562 axes, 36 angles, 20 degree tuning width.
    pub fn with_defaults(mode: So3Mode) -> Self {
        Self::new(DEFAULT_N_AXES, DEFAULT_N_ANGLES, DEFAULT_SIGMA_DEG.to_radians(), mode).expect("valid defaults")
    }

    pub fn lattice(&self) -> &FibonacciLattice {
        &self.lattice
    }

    pub fn n_axes(&self) -> usize {
        self.lattice.len()
    }

    pub fn n_angles(&self) -> usize {
        self.n_angles
    }

    pub fn sigma_rad(&self) -> f64 {
        self.sigma_rad
    }

    pub fn mode(&self) -> So3Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        match self.mode {
            So3Mode::AxisAngle => self.n_axes() * self.n_angles,
            So3Mode::AxisOnly => self.n_axes(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn angle_step(&self) -> f64 {
        TAU / self.n_angles as f64
    }

    pub fn preferred_angle(&self, m: usize) -> f64 {
        m as f64 * self.angle_step()
    }

    /// Preferred axis and (in axis-angle mode) angle of a neuron.
    pub fn preferred(&self, index: usize) -> Result<(Vector3<f64>, Option<f64>)> {
        if index >= self.len() {
            return Err(domain(format!("neuron {index} out of range for a code of length {}", self.len())));
        }
        Ok(match self.mode {
            So3Mode::AxisAngle => (
                *self.lattice.point(index / self.n_angles),
                Some(self.preferred_angle(index % self.n_angles)),
            ),
            So3Mode::AxisOnly => (*self.lattice.point(index), None),
        })
    }

    fn gaussian(&self, d: f64) -> f64 {
        (-d * d / (2.0 * self.sigma_rad * self.sigma_rad)).exp()
    }

    /// Adds `exp(-(dtheta^2 + dphi^2) / (2 sigma^2))` for one axis-angle pair.
    fn add_peak(&self, code: &mut [f64], aa: &AxisAngle, angle_gain: &mut [f64]) {
        for (m, g) in angle_gain.iter_mut().enumerate() {
            *g = self.gaussian(circular_distance(aa.angle, self.preferred_angle(m)));
        }
        for (p, row) in self.lattice.points().iter().zip(code.chunks_exact_mut(self.n_angles)) {
            let ga = self.gaussian(angle_between(&aa.axis, p));
            for (c, g) in row.iter_mut().zip(angle_gain.iter()) {
                *c += ga * g;
            }
        }
    }

    /// Target code of a pose: the unclipped sum of tuning responses to both axis-angle
    /// representations of every `R_o S`, `S` in `symmetry`.
    pub fn encode_pose(&self, rotation: &RotationMatrix, symmetry: &SymmetrySet) -> Result<CodeVector> {
        if self.mode != So3Mode::AxisAngle {
            return Err(domain("encode_pose needs an axis_angle code; use encode_axis_only"));
        }
        if let SymmetryKind::RevolutionAxis(_) = symmetry.kind() {
            return Err(domain("objects with a revolution axis are encoded with encode_axis_only"));
        }
        let mut code = vec![0.0; self.len()];
        let mut angle_gain = vec![0.0; self.n_angles];
        for s in symmetry.rotations() {
            let aa = rotation_to_axis_angle(&(rotation * s));
            self.add_peak(&mut code, &aa, &mut angle_gain);
            self.add_peak(&mut code, &aa.dual(), &mut angle_gain);
        }
        Ok(CodeVector::new(code))
    }

    /// Axis-only code `exp(-dtheta^2 / (2 sigma^2))` of a direction.
    pub fn encode_axis_only(&self, axis: &Vector3<f64>) -> Result<CodeVector> {
        if self.mode != So3Mode::AxisOnly {
            return Err(domain("encode_axis_only needs an axis_only code"));
        }
        let norm = axis.norm();
        if !(norm > 1e-12) || !norm.is_finite() {
            return Err(domain("axis must be a non-zero finite vector"));
        }
        let axis = axis / norm;
        Ok(CodeVector::new(
            self.lattice.points().iter().map(|p| self.gaussian(angle_between(&axis, p))).collect(),
        ))
    }

    /// Encodes according to the symmetry kind: revolution objects encode their rotated
    /// symmetry axis `R_o a`, everything else the full pose.
    pub fn encode(&self, rotation: &RotationMatrix, symmetry: &SymmetrySet) -> Result<CodeVector> {
        match symmetry.kind() {
            SymmetryKind::RevolutionAxis(a) => self.encode_axis_only(&rotation.apply(&a)),
            SymmetryKind::Discrete => self.encode_pose(rotation, symmetry),
        }
    }

    fn check_len(&self, code: &[f64]) -> Result<()> {
        if code.len() != self.len() {
            return Err(domain(format!("code has length {}, expected {}", code.len(), self.len())));
        }
        Ok(())
    }

    /// Preferred axis and angle of the most active neuron (lowest index on ties).
    pub fn decode_pose(&self, code: &[f64]) -> Result<AxisAngle> {
        if self.mode != So3Mode::AxisAngle {
            return Err(domain("decode_pose needs an axis_angle code; use decode_axis"));
        }
        self.check_len(code)?;
        let i = argmax(code).ok_or_else(|| domain("empty code"))?;
        let (axis, angle) = self.preferred(i)?;
        Ok(AxisAngle { axis, angle: angle.expect("axis_angle mode") })
    }

    pub fn decode_rotation(&self, code: &[f64]) -> Result<RotationMatrix> {
        Ok(self.decode_pose(code)?.to_rotation())
    }

    /// Preferred axis of the most active neuron.
    pub fn decode_axis(&self, code: &[f64]) -> Result<Vector3<f64>> {
        self.check_len(code)?;
        let i = argmax(code).ok_or_else(|| domain("empty code"))?;
        Ok(self.preferred(i)?.0)
    }

    /// Strict local maxima of `code` at or above `floor_fraction` of its maximum.
    ///
    /// Neighbouring axes are the `k_axes` nearest lattice points (symmetrised); neighbouring
    /// angles are adjacent on the circle. Diagonal (axis, angle) steps count as neighbours.
    pub fn local_maxima(&self, code: &[f64], k_axes: usize, floor_fraction: f64) -> Result<Vec<usize>> {
        self.check_len(code)?;
        if k_axes == 0 || !(0.0..=1.0).contains(&floor_fraction) {
            return Err(domain("need k_axes >= 1 and floor_fraction in [0, 1]"));
        }
        let knn = self.lattice.neighbors(k_axes);
        let mut adj: Vec<Vec<usize>> = knn.clone();
        for (i, nb) in knn.iter().enumerate() {
            for &j in nb {
                if !adj[j].contains(&i) {
                    adj[j].push(i);
                }
            }
        }
        let max = code.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let floor = floor_fraction * max;
        let angles = match self.mode {
            So3Mode::AxisAngle => self.n_angles,
            So3Mode::AxisOnly => 1,
        };
        let angle_steps: &[isize] = if angles == 1 { &[0] } else { &[-1, 0, 1] };
        let mut peaks = Vec::new();
        for (idx, &v) in code.iter().enumerate() {
            if v < floor {
                continue;
            }
            let (axis, m) = (idx / angles, idx % angles);
            let is_peak = std::iter::once(axis).chain(adj[axis].iter().copied()).all(|j| {
                angle_steps.iter().all(|&dm| {
                    let mm = (m as isize + dm).rem_euclid(angles as isize) as usize;
                    let other = j * angles + mm;
                    other == idx || v > code[other]
                })
            });
            if is_peak {
                peaks.push(idx);
            }
        }
        Ok(peaks)
    }

    pub fn document(&self, code: &[f64]) -> Result<So3CodeDocument> {
        self.check_len(code)?;
        Ok(So3CodeDocument {
            n_axes: self.n_axes(),
            n_angles: self.n_angles,
            sigma_rad: self.sigma_rad,
            mode: self.mode,
            activations: code.to_vec(),
        })
    }
}

/// A code vector with the parameters needed to interpret it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct So3CodeDocument {
    pub n_axes: usize,
    pub n_angles: usize,
    pub sigma_rad: f64,
    pub mode: So3Mode,
    pub activations: Vec<f64>,
}

impl So3CodeDocument {
    pub fn spec(&self) -> Result<So3CodeSpec> {
        let spec = So3CodeSpec::new(self.n_axes, self.n_angles, self.sigma_rad, self.mode)?;
        spec.check_len(&self.activations)?;
        Ok(spec)
    }
}
