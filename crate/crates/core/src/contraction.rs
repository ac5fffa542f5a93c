//! The symplectic contraction on matrix spaces and on `T*U(n)`.
//!
//! On `n x n` matrices the contraction sends `B = UP` to
//! `U sqrt(P² - λ_min I)`, where `λ_min` is the smallest eigenvalue of `B*B`.
//! For `n = 2` this is the time-one map of the gradient-Hamiltonian flow;
//! for `n > 2` the same formula is conjectured from the structure of the
//! flow (pairwise differences `σ_i² - σ_j²` are conserved and the flow stays
//! in `k_1 A k_2`) and is checked against [`crate::flow::integrate_flow`].
//!
//! On `T*K ≅ K × 𝔨*` a point `(k, v)` is sent to the class of
//! `(k h⁻¹, h v h⁻¹)` where `h` puts `v` into the Weyl chamber. Classes are
//! stored as a representative plus the eigenvalue block structure, and
//! equality is the predicate [`same_fiber`].

use std::ops::Range;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::matrix::{
    conjugate_diag, eig_hermitian_with, max_norm, polar_parts, CMat, ComplexMatrix, HermitianMatrix, Spectrum,
    UnitaryMatrix,
};

/// A point `(k, v)` of `T*U(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CotangentPoint {
    pub k: UnitaryMatrix,
    pub v: HermitianMatrix,
}

impl CotangentPoint {
    pub fn new(k: UnitaryMatrix, v: HermitianMatrix) -> Result<Self> {
        if k.dim() != v.dim() {
            return Err(Error::LengthMismatch {
                expected: k.dim(),
                got: v.dim(),
            });
        }
        Ok(Self { k, v })
    }
}

/// Eigenvalue blocks of a sorted spectrum: the face of the Weyl chamber and
/// the block structure of its stabilizer.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPartition {
    pub blocks: Vec<Range<usize>>,
    /// Mean of each block; strictly decreasing.
    pub block_values: Vec<f64>,
}

impl BlockPartition {
    pub fn from_spectrum(w: &Spectrum, tol: f64) -> Self {
        let blocks = w.clusters(tol);
        let block_values = blocks
            .iter()
            .map(|b| w.values()[b.clone()].iter().sum::<f64>() / b.len() as f64)
            .collect();
        Self { blocks, block_values }
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b.contains(&i))
            .expect("index within partition")
    }

    /// Whether `r` is block-diagonal for this partition with every diagonal
    /// block of determinant 1, i.e. `r` lies in the product of the
    /// special-unitary block groups.
    pub fn is_block_special_unitary(&self, r: &CMat, tol: f64) -> bool {
        let n = r.nrows();
        for i in 0..n {
            for j in 0..n {
                if self.block_of(i) != self.block_of(j) && r[(i, j)].norm() > tol {
                    return false;
                }
            }
        }
        self.blocks.iter().all(|b| {
            let d = r
                .view((b.start, b.start), (b.len(), b.len()))
                .into_owned()
                .determinant();
            (d - Complex64::new(1.0, 0.0)).norm() <= tol
        })
    }
}

/// Normal form of a contracted cotangent point.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractedPoint {
    /// Diagonalized momentum.
    pub w: Spectrum,
    /// `g = k h*`, where `h v h* = diag(w)`.
    pub g: UnitaryMatrix,
    pub partition: BlockPartition,
}

/// `B = UP ↦ U sqrt(B*B - λ_min I)`.
pub fn contract_closed_form(b: &ComplexMatrix) -> ComplexMatrix {
    let parts = polar_parts(b);
    let lambda = parts.gram_spectrum.values();
    let lambda_min = *lambda.last().expect("non-empty spectrum");
    let shifted: Vec<f64> = lambda.iter().map(|&l| (l - lambda_min).max(0.0).sqrt()).collect();
    let root = conjugate_diag(parts.gram_vectors.as_mat(), &shifted);
    ComplexMatrix::wrap(parts.unitary.as_mat() * root)
}

pub fn contract_point(x: &CotangentPoint) -> ContractedPoint {
    contract_point_with(x, &Tolerances::default())
}

pub fn contract_point_with(x: &CotangentPoint, tol: &Tolerances) -> ContractedPoint {
    let (w, u) = eig_hermitian_with(&x.v, tol);
    // u* v u = diag(w), so h = u* and g = k h* = k u.
    let g = x.k.compose(&u);
    let partition = BlockPartition::from_spectrum(&w, tol.cluster_abs(w.max_abs()));
    ContractedPoint { w, g, partition }
}

/// The fiber relation: `v_x = v_y` and `k_y = k_x h* R h` for some `R` in the
/// product of special-unitary groups of the eigenvalue blocks of `v_x`.
pub fn same_fiber(x: &CotangentPoint, y: &CotangentPoint, tol: f64) -> bool {
    same_fiber_with(x, y, tol, &Tolerances::default())
}

pub fn same_fiber_with(x: &CotangentPoint, y: &CotangentPoint, tol: f64, tols: &Tolerances) -> bool {
    if x.v.dim() != y.v.dim() {
        return false;
    }
    if max_norm(&(x.v.as_mat() - y.v.as_mat())) > tol {
        return false;
    }
    let (w, u) = eig_hermitian_with(&x.v, tols);
    let partition = BlockPartition::from_spectrum(&w, tols.cluster_abs(w.max_abs()));
    let ratio = u.as_mat().adjoint() * x.k.as_mat().adjoint() * y.k.as_mat() * u.as_mat();
    partition.is_block_special_unitary(&ratio, tol)
}

/// Compares two normal forms: equal spectra and `g_a* g_b` block special
/// unitary for the partition of `a`.
pub fn same_normal_form(a: &ContractedPoint, b: &ContractedPoint, tol: f64) -> bool {
    if a.w.len() != b.w.len() {
        return false;
    }
    if a.w.values().iter().zip(b.w.values()).any(|(p, q)| (p - q).abs() > tol) {
        return false;
    }
    let ratio = a.g.as_mat().adjoint() * b.g.as_mat();
    a.partition.is_block_special_unitary(&ratio, tol)
}

/// Torus action at level `j` of the Gel'fand-Tsetlin chain.
///
/// Conjugates `A` by `C = (h* diag(e^{iθ}) h) ⊕ I_{n-j}`, where `h`
/// diagonalizes the leading `j x j` block into sorted form. Requires the
/// leading block to have simple spectrum.
pub fn star_action(a: &HermitianMatrix, level: usize, phases: &[f64]) -> Result<HermitianMatrix> {
    star_action_with(a, level, phases, &Tolerances::default())
}

pub fn star_action_with(
    a: &HermitianMatrix,
    level: usize,
    phases: &[f64],
    tol: &Tolerances,
) -> Result<HermitianMatrix> {
    let n = a.dim();
    if level == 0 || level >= n {
        return Err(Error::Domain(format!(
            "level {level} outside 1..{}",
            n.saturating_sub(1)
        )));
    }
    if phases.len() != level {
        return Err(Error::LengthMismatch {
            expected: level,
            got: phases.len(),
        });
    }
    let (w, u) = eig_hermitian_with(&a.leading(level), tol);
    let gap_tol = tol.cluster_abs(w.max_abs());
    if let Some(p) = w.values().windows(2).position(|p| p[0] - p[1] <= gap_tol) {
        return Err(Error::PrincipalStratum(format!(
            "leading {level}x{level} block has eigenvalues {} and {} within {gap_tol:e}",
            w.values()[p],
            w.values()[p + 1]
        )));
    }
    let torus = DVector::from_iterator(level, phases.iter().map(|&t| Complex64::from_polar(1.0, t)));
    let block = u.as_mat() * CMat::from_diagonal(&torus) * u.as_mat().adjoint();
    let mut c = CMat::identity(n, n);
    c.view_mut((0, 0), (level, level)).copy_from(&block);
    Ok(HermitianMatrix::symmetrized(&c * a.as_mat() * c.adjoint()))
}
