use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::rotation::angle_between;
use crate::error::{domain, Result};

/// Near-uniform points on the unit sphere along a golden-angle spiral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FibonacciLattice {
    points: Vec<Vector3<f64>>,
}

impl FibonacciLattice {
    /// Point `j` has height `z = (2j + 1) / count - 1` and longitude `j * 2 pi (1 - 1/phi)`.
    pub fn new(count: usize) -> Result<Self> {
        if count < 2 {
            return Err(domain(format!("a Fibonacci lattice needs at least 2 points, got {count}")));
        }
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let step = std::f64::consts::TAU * (1.0 - 1.0 / golden);
        let points = (0..count)
            .map(|j| {
                let z = (2 * j + 1) as f64 / count as f64 - 1.0;
                let rho = (1.0 - z * z).max(0.0).sqrt();
                let lon = j as f64 * step;
                let p = Vector3::new(rho * lon.cos(), rho * lon.sin(), z);
                p / p.norm()
            })
            .collect();
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    pub fn point(&self, j: usize) -> &Vector3<f64> {
        &self.points[j]
    }

    /// Index of the lattice point closest to `v` (by angle); ties go to the lower index.
    pub fn nearest(&self, v: &Vector3<f64>) -> usize {
        let mut best = 0;
        let mut best_dot = f64::NEG_INFINITY;
        for (j, p) in self.points.iter().enumerate() {
            let d = p.dot(v);
            if d > best_dot {
                best_dot = d;
                best = j;
            }
        }
        best
    }

    /// The `k` closest other points of every point, nearest first.
    pub fn neighbors(&self, k: usize) -> Vec<Vec<usize>> {
        let k = k.min(self.len() - 1);
        (0..self.len())
            .map(|i| {
                let p = &self.points[i];
                let mut others: Vec<(f64, usize)> = (0..self.len())
                    .filter(|&j| j != i)
                    .map(|j| (-p.dot(&self.points[j]), j))
                    .collect();
                others.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                others.truncate(k);
                others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                others.into_iter().map(|(_, j)| j).collect()
            })
            .collect()
    }

    /// Angle from every point to its nearest other point.
    pub fn nearest_neighbor_angles(&self) -> Vec<f64> {
        self.neighbors(1)
            .iter()
            .enumerate()
            .map(|(i, nn)| angle_between(&self.points[i], &self.points[nn[0]]))
            .collect()
    }

    /// Largest nearest-neighbour angle: no point is farther than this from the rest.
    pub fn resolution(&self) -> f64 {
        self.nearest_neighbor_angles().into_iter().fold(0.0, f64::max)
    }

    /// Smallest pairwise angle.
    pub fn min_separation(&self) -> f64 {
        self.nearest_neighbor_angles().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Max over min nearest-neighbour angle.
    pub fn nearest_neighbor_ratio(&self) -> f64 {
        let nn = self.nearest_neighbor_angles();
        let max = nn.iter().copied().fold(0.0, f64::max);
        let min = nn.iter().copied().fold(f64::INFINITY, f64::min);
        max / min
    }

    /// `sqrt(4 pi / count)`, the spacing of a perfectly uniform set.
    pub fn ideal_spacing(&self) -> f64 {
        (4.0 * std::f64::consts::PI / self.len() as f64).sqrt()
    }
}
