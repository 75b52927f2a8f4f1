//! Population codes for 3D orientation.
//!
//! A rotation is written as an axis and an angle. Axes are covered by a spherical
//! Fibonacci lattice and angles by an evenly spaced circle; each neuron prefers one
//! (axis, angle) pair and responds with a Gaussian of the angular distances. Objects with
//! discrete symmetries get one peak per equivalent pose, and both axis-angle
//! representations `{r, phi}` and `{-r, 2 pi - phi}` of every pose are encoded.

mod codec;
mod lattice;
mod rotation;
mod symmetry;

pub use codec::{So3CodeDocument, So3CodeSpec, So3Mode, DEFAULT_N_ANGLES, DEFAULT_N_AXES, DEFAULT_SIGMA_DEG};
pub use lattice::FibonacciLattice;
pub use rotation::{
    angle_between, circular_distance, geodesic_distance, rotation_to_axis_angle, symmetric_geodesic_distance,
    AxisAngle, RotationMatrix, ROTATION_TOLERANCE,
};
pub use symmetry::{SymmetryDocument, SymmetryKind, SymmetrySet, SymmetrySpec};
