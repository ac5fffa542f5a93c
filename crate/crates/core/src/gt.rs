//! Gel'fand-Tsetlin patterns and the GT integrable system on coadjoint
//! orbits of `U(n)`.
//!
//! A pattern is stored top row first: `rows[0]` has length `n`, the last row
//! has length 1. Writing `x(i, j)` for the `i`-th entry (1-based) of the row
//! of length `j`, interlacing means `x(i, j) >= x(i, j-1) >= x(i+1, j)`.

use std::collections::HashMap;

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::matrix::{
    conjugate_diag, eig_hermitian_with, eigenvalues_hermitian, random_unitary, CMat, HermitianMatrix, Spectrum,
};

#[derive(Debug, Clone, PartialEq)]
pub struct GtPattern<T = f64> {
    pub rows: Vec<Vec<T>>,
}

impl<T> GtPattern<T> {
    /// Checks the triangular shape: row lengths `n, n-1, ..., 1`.
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        for (k, row) in rows.iter().enumerate() {
            if row.len() != n - k {
                return Err(Error::LengthMismatch {
                    expected: n - k,
                    got: row.len(),
                });
            }
        }
        Ok(Self { rows })
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn top(&self) -> &[T] {
        &self.rows[0]
    }

    /// `x(i, j)`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.rows[self.size() - j][i - 1]
    }
}

/// One failed interlacing inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    /// Entry index within the upper row, 1-based.
    pub i: usize,
    /// Length of the upper row.
    pub j: usize,
    /// `true` for `x(i, j) >= x(i, j-1)`, `false` for `x(i, j-1) >= x(i+1, j)`.
    pub upper: bool,
    pub deficit: f64,
}

/// A weakly decreasing integer vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HighestWeight(Vec<i64>);

impl HighestWeight {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        if let Some(w) = entries.windows(2).find(|w| w[0] < w[1]) {
            return Err(Error::InvariantViolation(format!(
                "weight not weakly decreasing: {} < {}",
                w[0], w[1]
            )));
        }
        Ok(Self(entries))
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Row `j` is the descending spectrum of the leading `j x j` block of `a`.
pub fn gt_pattern(a: &HermitianMatrix) -> GtPattern {
    let n = a.dim();
    let rows = (1..=n).rev().map(|j| eigenvalues_hermitian(&a.leading(j))).collect();
    GtPattern { rows }
}

pub fn validate_interlacing(p: &GtPattern, tol: f64) -> Vec<Violation> {
    let n = p.size();
    let mut out = Vec::new();
    for j in (2..=n).rev() {
        let upper = &p.rows[n - j];
        let lower = &p.rows[n - j + 1];
        for i in 0..j - 1 {
            let d = lower[i] - upper[i];
            if d > tol {
                out.push(Violation {
                    i: i + 1,
                    j,
                    upper: true,
                    deficit: d,
                });
            }
            let d = upper[i + 1] - lower[i];
            if d > tol {
                out.push(Violation {
                    i: i + 1,
                    j,
                    upper: false,
                    deficit: d,
                });
            }
        }
    }
    out
}

/// Exact interlacing test for integer patterns.
pub fn is_interlacing(p: &GtPattern<i64>) -> bool {
    p.rows
        .windows(2)
        .all(|w| (0..w[1].len()).all(|i| w[0][i] >= w[1][i] && w[1][i] >= w[0][i + 1]))
}

/// Number of integer GT patterns with top row `lambda`.
///
/// Exact depth-first count over interlacing rows, memoized on the current
/// row and split across threads by the choice of the second row.
pub fn enumerate_gt(lambda: &HighestWeight) -> u128 {
    let top = lambda.entries();
    if top.len() <= 1 {
        return 1;
    }
    let firsts: Vec<Vec<i64>> = InterlacingRows::new(top).collect();
    firsts
        .par_iter()
        .map(|row| {
            let mut memo = HashMap::new();
            count_below(row, &mut memo)
        })
        .sum()
}

fn count_below(row: &[i64], memo: &mut HashMap<Vec<i64>, u128>) -> u128 {
    if row.len() <= 1 {
        return 1;
    }
    if let Some(&c) = memo.get(row) {
        return c;
    }
    let total = InterlacingRows::new(row).map(|next| count_below(&next, memo)).sum();
    memo.insert(row.to_vec(), total);
    total
}

/// All rows of length `len - 1` interlacing `above`, in lexicographic order.
struct InterlacingRows<'a> {
    above: &'a [i64],
    current: Option<Vec<i64>>,
}

impl<'a> InterlacingRows<'a> {
    fn new(above: &'a [i64]) -> Self {
        let start = above[1..].to_vec();
        Self {
            above,
            current: Some(start),
        }
    }
}

impl Iterator for InterlacingRows<'_> {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        // Odometer: entry i ranges over [above[i+1], above[i]].
        let mut k = next.len();
        while k > 0 {
            k -= 1;
            if next[k] < self.above[k] {
                next[k] += 1;
                for (i, x) in next.iter_mut().enumerate().skip(k + 1) {
                    *x = self.above[i + 1];
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// Streams every integer GT pattern with top row `lambda` in lexicographic
/// order of the flattened rows below the top.
pub struct GtPatterns {
    // iters[k] yields the remaining candidates for rows[k + 1].
    rows: Vec<Vec<i64>>,
    iters: Vec<std::vec::IntoIter<Vec<i64>>>,
    done: bool,
}

impl GtPatterns {
    pub fn new(lambda: &HighestWeight) -> Self {
        let mut s = Self {
            rows: vec![lambda.entries().to_vec()],
            iters: Vec::new(),
            done: false,
        };
        if lambda.is_empty() {
            s.done = true;
        } else {
            s.descend();
        }
        s
    }

    fn children(row: &[i64]) -> std::vec::IntoIter<Vec<i64>> {
        InterlacingRows::new(row).collect::<Vec<_>>().into_iter()
    }

    /// Extends `rows` with the first child at every level down to length 1.
    fn descend(&mut self) {
        while self.rows.last().map_or(0, Vec::len) > 1 {
            let mut it = Self::children(self.rows.last().unwrap());
            let first = it.next().expect("interlacing rows are never empty");
            self.iters.push(it);
            self.rows.push(first);
        }
    }
}

impl Iterator for GtPatterns {
    type Item = GtPattern<i64>;

    fn next(&mut self) -> Option<GtPattern<i64>> {
        if self.done {
            return None;
        }
        let out = GtPattern {
            rows: self.rows.clone(),
        };
        loop {
            let Some(it) = self.iters.last_mut() else {
                self.done = true;
                break;
            };
            self.rows.pop();
            if let Some(row) = it.next() {
                self.rows.push(row);
                self.descend();
                break;
            }
            self.iters.pop();
        }
        Some(out)
    }
}

/// Weyl dimension formula `∏_{i<j} (λ_i - λ_j + j - i) / (j - i)`.
pub fn weyl_dim(lambda: &HighestWeight) -> u128 {
    let l = lambda.entries();
    let mut acc = Ratio::from_integer(1i128);
    for i in 0..l.len() {
        for j in i + 1..l.len() {
            let gap = (j - i) as i128;
            acc *= Ratio::new(l[i] as i128 - l[j] as i128 + gap, gap);
        }
    }
    debug_assert!(acc.is_integer());
    acc.to_integer() as u128
}

/// Functions on `𝔲(n)*` whose gradients are known in closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum OrbitFunction {
    /// The GT momentum `x(i, j)`: `i`-th largest eigenvalue of the leading
    /// `j x j` block.
    GtMomentum { i: usize, j: usize },
    /// `A ↦ Re Tr(XA)`.
    Linear(HermitianMatrix),
}

impl OrbitFunction {
    pub fn value(&self, a: &HermitianMatrix) -> Result<f64> {
        match self {
            OrbitFunction::GtMomentum { i, j } => {
                check_indices(*i, *j, a.dim())?;
                Ok(eigenvalues_hermitian(&a.leading(*j))[i - 1])
            }
            OrbitFunction::Linear(x) => Ok(x.pairing(a)),
        }
    }

    /// Gradient for the pairing `Re Tr(XY)`: for `x(i, j)` the spectral
    /// projector of the leading block, padded with zeros.
    pub fn gradient(&self, a: &HermitianMatrix, tol: &Tolerances) -> Result<HermitianMatrix> {
        match self {
            OrbitFunction::GtMomentum { i, j } => {
                let (i, j) = (*i, *j);
                check_indices(i, j, a.dim())?;
                let (w, u) = eig_hermitian_with(&a.leading(j), tol);
                let gap_tol = tol.cluster_abs(w.max_abs());
                let vals = w.values();
                let simple =
                    (i == 1 || vals[i - 2] - vals[i - 1] > gap_tol) && (i == j || vals[i - 1] - vals[i] > gap_tol);
                if !simple {
                    return Err(Error::PrincipalStratum(format!(
                        "eigenvalue x({i},{j}) = {} is not simple",
                        vals[i - 1]
                    )));
                }
                let n = a.dim();
                let col = u.as_mat().column(i - 1);
                let mut e = CMat::zeros(n, n);
                e.view_mut((0, 0), (j, j)).copy_from(&(col * col.adjoint()));
                Ok(HermitianMatrix::symmetrized(e))
            }
            OrbitFunction::Linear(x) => Ok(x.clone()),
        }
    }
}

fn check_indices(i: usize, j: usize, n: usize) -> Result<()> {
    if j == 0 || j > n || i == 0 || i > j {
        return Err(Error::Domain(format!("GT index ({i},{j}) invalid for n = {n}")));
    }
    Ok(())
}

/// Kostant-Kirillov bracket `{f, g}(A) = ⟨A, i[∇f, ∇g]⟩`.
pub fn poisson_bracket(f: &OrbitFunction, g: &OrbitFunction, a: &HermitianMatrix) -> Result<f64> {
    poisson_bracket_with(f, g, a, &Tolerances::default())
}

pub fn poisson_bracket_with(
    f: &OrbitFunction,
    g: &OrbitFunction,
    a: &HermitianMatrix,
    tol: &Tolerances,
) -> Result<f64> {
    let df = f.gradient(a, tol)?;
    let dg = g.gradient(a, tol)?;
    let comm = df.as_mat() * dg.as_mat() - dg.as_mat() * df.as_mat();
    // Re Tr(A · i C) = -Im Tr(A C)
    Ok(-(a.as_mat() * comm).trace().im)
}

/// `U diag(λ) U*` with `U` Haar-distributed, deterministic in `seed`.
pub fn random_orbit_point(lambda: &Spectrum, seed: u64) -> HermitianMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_unitary(lambda.len(), &mut rng);
    HermitianMatrix::symmetrized(conjugate_diag(u.as_mat(), lambda.values()))
}

/// Directional derivative `⟨∇f, H⟩`.
pub fn directional(grad: &HermitianMatrix, h: &HermitianMatrix) -> f64 {
    grad.pairing(h)
}
