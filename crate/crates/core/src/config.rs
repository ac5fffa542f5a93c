//! Numerical tolerances used across the crate.
//!
//! Relative tolerances are scaled by `1 + ‖A‖` (spectral norm) where the
//! field documentation says so.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Max-norm of `A - A*` allowed for a Hermitian matrix, relative to `max(1, ‖A‖_max)`.
    pub hermitian: f64,
    /// Max-norm of `U*U - I` allowed for a unitary matrix.
    pub unitary: f64,
    /// Reconstruction tolerance of the eigensolver, relative to `‖A‖`.
    pub eig: f64,
    /// Reconstruction tolerance of the polar decomposition, relative to `‖B‖`.
    pub polar: f64,
    /// How far below zero an eigenvalue may sit and still count as PSD, relative.
    pub psd: f64,
    /// Eigenvalues closer than `cluster * (1 + ‖A‖)` form one block.
    pub cluster: f64,
    /// Interlacing slack for float patterns, scaled by `1 + ‖A‖`.
    pub gt: f64,
    /// Gradient norm below which the flow field is undefined.
    pub grad_floor: f64,
    /// Polygon closure residual relative to the longest edge.
    pub closure: f64,
    /// Minimum diagonal length for a bending axis.
    pub bend_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            unitary: 1e-9,
            eig: 1e-9,
            polar: 1e-9,
            psd: 1e-10,
            cluster: 1e-8,
            gt: 1e-8,
            grad_floor: 1e-12,
            closure: 1e-9,
            bend_floor: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn cluster_abs(&self, norm: f64) -> f64 {
        self.cluster * (1.0 + norm)
    }

    pub fn gt_abs(&self, norm: f64) -> f64 {
        self.gt * (1.0 + norm)
    }
}
