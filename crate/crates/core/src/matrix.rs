//! Dense complex matrices of small dimension.
//!
//! `ComplexMatrix`, `HermitianMatrix` and `UnitaryMatrix` are thin newtypes
//! over `nalgebra::DMatrix<Complex64>`; the wrappers carry the invariant, the
//! arithmetic is nalgebra's. Momentum values live in Hermitian matrices: the
//! factor `i` of the `𝔲(n)*` momentum `iB*B` is absorbed, so the right
//! momentum of `B` is stored as `B*B`.

use std::ops::Deref;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::Tolerances;
use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A square complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(CMat);

impl ComplexMatrix {
    pub fn new(m: CMat) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvariantViolation(format!(
                "matrix is {}x{}, expected square",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(Error::InvariantViolation("matrix has dimension 0".into()));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvariantViolation("matrix has non-finite entries".into()));
        }
        Ok(Self(m))
    }

    /// Wraps a matrix produced by this crate's own arithmetic.
    pub(crate) fn wrap(m: CMat) -> Self {
        debug_assert!(m.is_square());
        Self(m)
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::InvariantViolation(format!(
                "row {i} has length {}, expected {n}",
                r.len()
            )));
        }
        Self::new(CMat::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        Self::wrap(CMat::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(d[i], 0.0)
            } else {
                ZERO
            }
        }))
    }

    pub fn identity(n: usize) -> Self {
        Self::wrap(CMat::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self::wrap(CMat::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_mat(&self) -> &CMat {
        &self.0
    }

    pub fn into_inner(self) -> CMat {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self::wrap(self.0.adjoint())
    }

    pub fn det(&self) -> Complex64 {
        self.0.clone().determinant()
    }

    pub fn max_norm(&self) -> f64 {
        max_norm(&self.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Self {
        Self::wrap(&self.0 * &other.0)
    }

    pub fn entries_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }
}

impl Deref for ComplexMatrix {
    type Target = CMat;
    fn deref(&self) -> &CMat {
        &self.0
    }
}

impl From<HermitianMatrix> for ComplexMatrix {
    fn from(h: HermitianMatrix) -> Self {
        h.0
    }
}

impl From<UnitaryMatrix> for ComplexMatrix {
    fn from(u: UnitaryMatrix) -> Self {
        u.0
    }
}

/// A complex matrix equal to its conjugate transpose within tolerance.
///
/// Construction symmetrizes the input, so stored values are exactly Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tol(m, Tolerances::default().hermitian)
    }

    pub fn with_tol(m: ComplexMatrix, tol: f64) -> Result<Self> {
        let dev = max_norm(&(&m.0 - m.0.adjoint()));
        let scale = m.max_norm().max(1.0);
        if dev > tol * scale {
            return Err(Error::InvariantViolation(format!(
                "matrix is not Hermitian: ‖A - A*‖_max = {dev:e}"
            )));
        }
        Ok(Self::symmetrized(m.0))
    }

    pub(crate) fn symmetrized(m: CMat) -> Self {
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Self(ComplexMatrix::wrap(h))
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        Self(ComplexMatrix::from_real_diagonal(d))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_rows(rows)?)
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        Self::new(ComplexMatrix::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(ComplexMatrix::zeros(n))
    }

    pub fn as_complex(&self) -> &ComplexMatrix {
        &self.0
    }

    /// Leading `k x k` principal submatrix.
    pub fn leading(&self, k: usize) -> HermitianMatrix {
        Self(ComplexMatrix::wrap(self.0 .0.view((0, 0), (k, k)).into_owned()))
    }

    /// Spectral norm, i.e. the largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> f64 {
        let ev = self.0 .0.clone().symmetric_eigenvalues();
        ev.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Real pairing `⟨X, Y⟩ = Re Tr(XY)`.
    pub fn pairing(&self, other: &HermitianMatrix) -> f64 {
        (&self.0 .0 * &other.0 .0).trace().re
    }

    pub fn trace(&self) -> f64 {
        self.0 .0.trace().re
    }

    /// `A - (Tr A / n) I`, the component in `𝔰𝔲(n)*`.
    pub fn traceless(&self) -> HermitianMatrix {
        let n = self.dim();
        let shift = Complex64::new(self.trace() / n as f64, 0.0);
        let mut m = self.0 .0.clone();
        for i in 0..n {
            m[(i, i)] -= shift;
        }
        Self(ComplexMatrix::wrap(m))
    }
}

impl Deref for HermitianMatrix {
    type Target = ComplexMatrix;
    fn deref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// A complex matrix with `U*U = I` within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tol(m, Tolerances::default().unitary)
    }

    pub fn with_tol(m: ComplexMatrix, tol: f64) -> Result<Self> {
        let n = m.dim();
        let dev = max_norm(&(m.0.adjoint() * &m.0 - CMat::identity(n, n)));
        if dev > tol {
            return Err(Error::InvariantViolation(format!(
                "matrix is not unitary: ‖U*U - I‖_max = {dev:e}"
            )));
        }
        Ok(Self(m))
    }

    pub(crate) fn wrap(m: CMat) -> Self {
        Self(ComplexMatrix::wrap(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    pub fn as_complex(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn inverse(&self) -> UnitaryMatrix {
        Self(self.0.adjoint())
    }

    pub fn compose(&self, other: &UnitaryMatrix) -> UnitaryMatrix {
        Self(self.0.matmul(&other.0))
    }
}

impl Deref for UnitaryMatrix {
    type Target = ComplexMatrix;
    fn deref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// Real eigenvalues in weakly decreasing order: a point of the Weyl chamber.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(w) = values.windows(2).find(|w| w[0] < w[1]) {
            return Err(Error::InvariantViolation(format!(
                "spectrum not weakly decreasing: {} < {}",
                w[0], w[1]
            )));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvariantViolation("spectrum has non-finite values".into()));
        }
        Ok(Self(values))
    }

    /// Sorts arbitrary real values into a spectrum.
    pub fn sorted(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Contiguous index blocks of values within `tol` of their neighbour.
    pub fn clusters(&self, tol: f64) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.0.len() {
            if i == self.0.len() || self.0[i - 1] - self.0[i] > tol {
                out.push(start..i);
                start = i;
            }
        }
        out
    }
}

pub fn max_norm(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

fn diag_mat(d: &[f64]) -> CMat {
    CMat::from_diagonal(&DVector::from_iterator(
        d.len(),
        d.iter().map(|&x| Complex64::new(x, 0.0)),
    ))
}

/// `U diag(d) U*`.
pub(crate) fn conjugate_diag(u: &CMat, d: &[f64]) -> CMat {
    u * diag_mat(d) * u.adjoint()
}

/// Orthogonalizes `v` against the columns in `basis` (two passes of modified
/// Gram-Schmidt) and returns the residual.
fn orthogonalize(mut v: DVector<Complex64>, basis: &[DVector<Complex64>]) -> DVector<Complex64> {
    for _ in 0..2 {
        for q in basis {
            let c = q.dotc(&v);
            v -= q * c;
        }
    }
    v
}

/// Replaces the columns of `q` spanning one eigenspace with a canonical
/// basis: standard basis vectors are projected onto the space in input
/// order and orthonormalized. A projection is accepted once its residual
/// reaches `0.5/sqrt(n)`; some residual always does, since the squared
/// residuals over all `e_i` sum to the remaining dimension. The accepting
/// component of each vector is real positive.
fn canonical_cluster_basis(q: &CMat) -> Vec<DVector<Complex64>> {
    let n = q.nrows();
    let m = q.ncols();
    let threshold = 0.5 / (n as f64).sqrt();
    let mut chosen: Vec<DVector<Complex64>> = Vec::with_capacity(m);
    for i in 0..n {
        if chosen.len() == m {
            break;
        }
        // Q Q* e_i
        let coeffs = q.row(i).adjoint();
        let proj = q * coeffs;
        let r = orthogonalize(proj, &chosen);
        let norm = r.norm();
        if norm >= threshold {
            let mut v = r / Complex64::new(norm, 0.0);
            let phase = v[i] / v[i].norm();
            v *= phase.conj();
            v[i] = Complex64::new(v[i].re, 0.0);
            chosen.push(v);
        }
    }
    debug_assert_eq!(chosen.len(), m, "cluster basis incomplete");
    chosen
}

/// Hermitian eigendecomposition with descending eigenvalues.
///
/// Returns `(Λ, U)` with `U* A U = diag(Λ)`. Within each cluster of
/// eigenvalues (see [`Tolerances::cluster`]) the eigenvectors are replaced by
/// the canonical basis of [`canonical_cluster_basis`], which makes the output
/// independent of the backend's choice of eigenvectors.
pub fn eig_hermitian(a: &HermitianMatrix) -> (Spectrum, UnitaryMatrix) {
    eig_hermitian_with(a, &Tolerances::default())
}

pub fn eig_hermitian_with(a: &HermitianMatrix, tol: &Tolerances) -> (Spectrum, UnitaryMatrix) {
    let n = a.dim();
    let eig = SymmetricEigen::new(a.as_mat().clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let spectrum = Spectrum(values);
    let cl_tol = tol.cluster_abs(spectrum.max_abs());

    let mut u = CMat::zeros(n, n);
    for block in spectrum.clusters(cl_tol) {
        let cols: Vec<DVector<Complex64>> = block
            .clone()
            .map(|k| eig.eigenvectors.column(order[k]).into_owned())
            .collect();
        let q = CMat::from_columns(&cols);
        for (offset, v) in canonical_cluster_basis(&q).into_iter().enumerate() {
            u.set_column(block.start + offset, &v);
        }
    }
    (spectrum, UnitaryMatrix::wrap(u))
}

/// Descending eigenvalues only.
pub fn eigenvalues_hermitian(a: &HermitianMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = a.as_mat().clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|x, y| y.total_cmp(x));
    v
}

/// Polar decomposition `B = U P` with `P = sqrt(B*B)`.
///
/// Columns of `U V` for singular values below `1e-12 σ_max` (including
/// exact zeros) are completed by Gram-Schmidt of the standard basis in
/// input order, so singular `B` still yields a deterministic unitary factor.
pub fn polar_decompose(b: &ComplexMatrix) -> (UnitaryMatrix, HermitianMatrix) {
    let parts = polar_parts(b);
    (parts.unitary, parts.positive)
}

/// Polar factors together with the eigendecomposition of `B*B` they came from.
pub(crate) struct PolarParts {
    pub unitary: UnitaryMatrix,
    pub positive: HermitianMatrix,
    /// Eigenvalues of `B*B`, descending.
    pub gram_spectrum: Spectrum,
    pub gram_vectors: UnitaryMatrix,
}

pub(crate) fn polar_parts(b: &ComplexMatrix) -> PolarParts {
    let n = b.dim();
    let (lambda, v) = eig_hermitian(&momentum_right(b, false));
    let sigma: Vec<f64> = lambda.values().iter().map(|&l| l.max(0.0).sqrt()).collect();
    let p = HermitianMatrix::symmetrized(conjugate_diag(v.as_mat(), &sigma));

    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let rank_floor = 1e-12 * sigma_max;
    let mut w: Vec<DVector<Complex64>> = Vec::with_capacity(n);
    for (i, &s) in sigma.iter().enumerate() {
        if s <= rank_floor || s == 0.0 {
            break;
        }
        let col = b.as_mat() * v.as_mat().column(i) / Complex64::new(s, 0.0);
        let r = orthogonalize(col, &w);
        let norm = r.norm();
        if norm < 0.5 {
            break;
        }
        w.push(r / Complex64::new(norm, 0.0));
    }
    for i in 0..n {
        if w.len() == n {
            break;
        }
        let r = orthogonalize(DVector::from_fn(n, |k, _| if k == i { ONE } else { ZERO }), &w);
        let norm = r.norm();
        if norm > 0.5 / (n as f64).sqrt() {
            w.push(r / Complex64::new(norm, 0.0));
        }
    }
    let w = CMat::from_columns(&w);
    PolarParts {
        unitary: UnitaryMatrix::wrap(w * v.as_mat().adjoint()),
        positive: p,
        gram_spectrum: lambda,
        gram_vectors: v,
    }
}

/// Classical adjugate, computed from cofactors so singular input is fine.
pub fn adjugate(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    if n == 1 {
        return ComplexMatrix::identity(1);
    }
    let m = a.as_mat();
    let mut adj = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let minor = m.clone().remove_row(i).remove_column(j);
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            adj[(j, i)] = minor.determinant() * sign;
        }
    }
    ComplexMatrix::wrap(adj)
}

/// Right momentum `B*B`, or its traceless part.
pub fn momentum_right(b: &ComplexMatrix, traceless: bool) -> HermitianMatrix {
    let h = HermitianMatrix::symmetrized(b.as_mat().adjoint() * b.as_mat());
    if traceless {
        h.traceless()
    } else {
        h
    }
}

/// Principal square root of a positive semi-definite matrix; a section of
/// the right momentum map.
pub fn section_sqrt(h: &HermitianMatrix) -> Result<ComplexMatrix> {
    section_sqrt_with(h, &Tolerances::default())
}

pub fn section_sqrt_with(h: &HermitianMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let (lambda, u) = eig_hermitian_with(h, tol);
    let floor = -tol.psd * (1.0 + lambda.max_abs());
    let mut roots = Vec::with_capacity(lambda.len());
    for &l in lambda.values() {
        if l < floor {
            return Err(Error::Domain(format!(
                "matrix is not positive semi-definite: eigenvalue {l:e}"
            )));
        }
        roots.push(l.max(0.0).sqrt());
    }
    Ok(HermitianMatrix::symmetrized(conjugate_diag(u.as_mat(), &roots)).0)
}

pub fn random_complex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::wrap(CMat::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    }))
}

/// Haar-distributed unitary: Gram-Schmidt QR of a complex Gaussian matrix,
/// which leaves `R` with a positive diagonal.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> UnitaryMatrix {
    let g = random_complex(n, rng);
    let mut cols: Vec<DVector<Complex64>> = Vec::with_capacity(n);
    for j in 0..n {
        let r = orthogonalize(g.column(j).into_owned(), &cols);
        let norm = r.norm();
        cols.push(r / Complex64::new(norm, 0.0));
    }
    UnitaryMatrix::wrap(CMat::from_columns(&cols))
}

/// Haar unitary rescaled by a phase to have determinant 1.
pub fn random_special_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> UnitaryMatrix {
    let u = random_unitary(n, rng);
    let d = u.det();
    let phase = Complex64::from_polar(1.0, -d.arg() / n as f64);
    UnitaryMatrix::wrap(u.as_mat() * phase)
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianMatrix {
    HermitianMatrix::symmetrized(random_complex(n, rng).into_inner())
}

/// Random complex matrix rescaled to determinant exactly 1 (up to rounding).
pub fn random_sl<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_complex(n, rng);
    let d = g.det();
    let scale = Complex64::from_polar(d.norm().powf(-1.0 / n as f64), -d.arg() / n as f64);
    ComplexMatrix::wrap(g.as_mat() * scale)
}
