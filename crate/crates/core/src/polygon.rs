//! Closed polygons in R³ and bending flows along diagonals.
//!
//! Edges are labeled `1..=n`; edge `i` runs from vertex `i - 1` to vertex
//! `i mod n` of the model `n`-gon. A diagonal is a contiguous cyclic run of
//! edge labels, and its length is the norm of the sum of those edges.

use nalgebra::Vector3;

use crate::branching::TreeGraph;
use crate::config::Tolerances;
use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct PolygonConfig {
    pub edges: Vec<Vec3>,
}

impl PolygonConfig {
    /// Checks closure and, unless `degenerate` is set, that no edge vanishes.
    pub fn new(edges: Vec<Vec3>, degenerate: bool) -> Result<Self> {
        Self::with_tol(edges, degenerate, &Tolerances::default())
    }

    pub fn with_tol(edges: Vec<Vec3>, degenerate: bool, tol: &Tolerances) -> Result<Self> {
        let p = Self { edges };
        let longest = p.edges.iter().fold(0.0_f64, |m, e| m.max(e.norm()));
        if p.closure_residual() > tol.closure * longest.max(f64::MIN_POSITIVE) {
            return Err(Error::InvariantViolation(format!(
                "polygon does not close: residual {:e}",
                p.closure_residual()
            )));
        }
        if !degenerate && p.edges.iter().any(|e| e.norm() == 0.0) {
            return Err(Error::InvariantViolation("polygon has a zero-length edge".into()));
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn closure_residual(&self) -> f64 {
        self.edges.iter().sum::<Vec3>().norm()
    }

    pub fn side_lengths(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.norm()).collect()
    }

    pub fn edge(&self, label: usize) -> &Vec3 {
        &self.edges[label - 1]
    }

    /// Applies a rotation to every edge.
    pub fn rotated(&self, axis: &Vec3, angle: f64) -> Self {
        let k = axis.normalize();
        Self {
            edges: self.edges.iter().map(|e| rodrigues(e, &k, angle)).collect(),
        }
    }
}

/// Rotation of `v` about the unit axis `k` by `angle`.
fn rodrigues(v: &Vec3, k: &Vec3, angle: f64) -> Vec3 {
    let (s, c) = angle.sin_cos();
    v * c + k.cross(v) * s + k * (k.dot(v) * (1.0 - c))
}

/// Edges `first, first + 1, ..., first + len - 1` (labels taken mod `n`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Diagonal {
    pub first: usize,
    pub len: usize,
}

impl Diagonal {
    pub fn new(first: usize, len: usize) -> Self {
        Self { first, len }
    }

    /// Edge labels in the run, for a polygon with `n` sides.
    pub fn labels(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).map(move |k| (self.first - 1 + k) % n + 1)
    }

    /// Endpoints of the chord in the model `n`-gon, smaller first.
    fn chord(&self, n: usize) -> (usize, usize) {
        let a = (self.first - 1) % n;
        let b = (self.first - 1 + self.len) % n;
        (a.min(b), a.max(b))
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.first == 0 || self.first > n || self.len < 2 || self.len + 2 > n {
            return Err(Error::Domain(format!(
                "diagonal (first {}, len {}) invalid for a {n}-gon",
                self.first, self.len
            )));
        }
        Ok(())
    }
}

/// A triangulation of the model `n`-gon by `n - 3` non-crossing diagonals,
/// together with its dual trivalent tree (leaves are the polygon edges).
#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation {
    pub n: usize,
    pub diagonals: Vec<Diagonal>,
    pub tree: TreeGraph,
}

impl Triangulation {
    pub fn new(n: usize, diagonals: Vec<Diagonal>) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("a polygon needs at least 3 sides, got {n}")));
        }
        if diagonals.len() != n - 3 {
            return Err(Error::LengthMismatch {
                expected: n - 3,
                got: diagonals.len(),
            });
        }
        let mut chords = Vec::with_capacity(diagonals.len());
        for d in &diagonals {
            d.validate(n)?;
            chords.push(d.chord(n));
        }
        for (i, &(a, b)) in chords.iter().enumerate() {
            for &(c, d) in &chords[..i] {
                let crossing = (a < c && c < b && b < d) || (c < a && a < d && d < b);
                if (a, b) == (c, d) || crossing {
                    return Err(Error::Domain(format!(
                        "diagonals ({a},{b}) and ({c},{d}) coincide or cross"
                    )));
                }
            }
        }
        let tree = dual_tree(n, &chords)?;
        Ok(Self { n, diagonals, tree })
    }

    /// Fan of diagonals from vertex 0: edge runs `{1, ..., k}` for `k = 2..n-2`.
    pub fn caterpillar(n: usize) -> Result<Self> {
        Self::new(n, (2..n.saturating_sub(1)).map(|k| Diagonal::new(1, k)).collect())
    }
}

/// Dual tree: one internal vertex per triangle, one leaf per polygon edge.
fn dual_tree(n: usize, chords: &[(usize, usize)]) -> Result<TreeGraph> {
    let mut is_side = vec![vec![false; n]; n];
    for v in 0..n {
        is_side[v][(v + 1) % n] = true;
        is_side[(v + 1) % n][v] = true;
    }
    for &(a, b) in chords {
        is_side[a][b] = true;
        is_side[b][a] = true;
    }
    let mut triangles = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if is_side[a][b] && is_side[b][c] && is_side[a][c] {
                    triangles.push([a, b, c]);
                }
            }
        }
    }
    if triangles.len() != n - 2 {
        return Err(Error::Domain("diagonals do not triangulate the polygon".into()));
    }
    if n == 3 {
        return TreeGraph::new(4, vec![(0, 1), (0, 2), (0, 3)], vec![1, 2, 3]);
    }
    // Vertex l - 1 is the leaf for edge label l; triangles follow. The side
    // from polygon vertex a to a + 1 is edge label a + 1.
    let side_leaf = |a: usize, b: usize| -> Option<usize> {
        if (a + 1) % n == b {
            Some(a)
        } else if (b + 1) % n == a {
            Some(b)
        } else {
            None
        }
    };
    let mut edges = Vec::new();
    for (t, tri) in triangles.iter().enumerate() {
        for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[0], tri[2])] {
            if let Some(leaf) = side_leaf(a, b) {
                edges.push((n + t, leaf));
            }
        }
        for (u, other) in triangles.iter().enumerate().skip(t + 1) {
            if tri.iter().filter(|v| other.contains(v)).count() == 2 {
                edges.push((n + t, n + u));
            }
        }
    }
    TreeGraph::new(n + triangles.len(), edges, (0..n).collect())
}

/// Checks the weak triangle inequality for every triangle of the fan
/// triangulation and returns the sides `(D_{k-1}, r_{k+1}, D_k)`.
fn fan_triangles(r: &[f64], d: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    let n = r.len();
    let mut chain = Vec::with_capacity(n - 1);
    chain.push(r[0]);
    chain.extend_from_slice(d);
    chain.push(r[n - 1]);
    let mut out = Vec::with_capacity(n - 2);
    for k in 1..=n - 2 {
        let (a, b, c) = (chain[k - 1], r[k], chain[k]);
        let slack = 1e-12 * (a + b + c).max(1.0);
        if a > b + c + slack || b > a + c + slack || c > a + b + slack {
            return Err(Error::Infeasible { index: k, a, b, c });
        }
        out.push((a, b, c));
    }
    Ok(out)
}

/// Real (cone) form of the triangle conditions on side and fan-diagonal
/// lengths.
pub fn fan_feasible(r: &[f64], d: &[f64]) -> Result<()> {
    if r.len() < 3 {
        return Err(Error::Domain(format!(
            "a polygon needs at least 3 sides, got {}",
            r.len()
        )));
    }
    if d.len() != r.len() - 3 {
        return Err(Error::LengthMismatch {
            expected: r.len() - 3,
            got: d.len(),
        });
    }
    if r.iter().chain(d).any(|&x| x.is_nan() || x < 0.0 || !x.is_finite()) {
        return Err(Error::Domain("lengths must be finite and non-negative".into()));
    }
    fan_triangles(r, d).map(|_| ())
}

fn any_perpendicular(a: &Vec3) -> Vec3 {
    let trial = if a.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    (trial - a * a.dot(&trial)).normalize()
}

/// Builds the polygon with side lengths `r`, fan diagonal lengths `d`
/// (`d[k-1] = ‖e_1 + ... + e_{k+1}‖`) and dihedral angles along those
/// diagonals.
///
/// The first edge points along +x and the first diagonal lies in the
/// xy-plane with positive y. Angle 0 places each new triangle on the side of
/// the shared diagonal opposite the previous vertex, so all-zero angles give
/// a planar convex polygon.
pub fn build_polygon(r: &[f64], d: &[f64], angles: &[f64]) -> Result<PolygonConfig> {
    fan_feasible(r, d)?;
    if angles.len() != d.len() {
        return Err(Error::LengthMismatch {
            expected: d.len(),
            got: angles.len(),
        });
    }
    let n = r.len();
    let tris = fan_triangles(r, d)?;
    // Partial sums s_k = e_1 + ... + e_k.
    let mut s: Vec<Vec3> = Vec::with_capacity(n);
    s.push(Vec3::new(r[0], 0.0, 0.0));
    for (k, &(prev, side, next)) in tris.iter().enumerate() {
        let current = s[k];
        let axis = if prev > 0.0 { current / prev } else { Vec3::x() };
        let along = if prev > 0.0 {
            (prev * prev + next * next - side * side) / (2.0 * prev)
        } else {
            0.0
        };
        let height = (next * next - along * along).max(0.0).sqrt();
        let dir = if k == 0 {
            Vec3::y()
        } else {
            let back = s[k - 1] - axis * s[k - 1].dot(&axis);
            let base = if back.norm() > 1e-12 * prev.max(1.0) {
                -back.normalize()
            } else {
                any_perpendicular(&axis)
            };
            rodrigues(&base, &axis, angles[k - 1])
        };
        s.push(axis * along + dir * height);
    }
    let mut edges = Vec::with_capacity(n);
    edges.push(s[0]);
    for k in 1..n - 1 {
        edges.push(s[k] - s[k - 1]);
    }
    edges.push(-s[n - 2]);
    Ok(PolygonConfig { edges })
}

/// Lengths of the diagonals of `t`, in the order they are stored.
pub fn diagonal_lengths(p: &PolygonConfig, t: &Triangulation) -> Vec<f64> {
    t.diagonals.iter().map(|d| diagonal_length(p, d)).collect()
}

pub fn diagonal_length(p: &PolygonConfig, d: &Diagonal) -> f64 {
    d.labels(p.len()).map(|l| p.edge(l)).sum::<Vec3>().norm()
}

/// Rotates the edges of `diagonal` about their sum by `theta`.
pub fn bend(p: &PolygonConfig, diagonal: &Diagonal, theta: f64) -> Result<PolygonConfig> {
    bend_with(p, diagonal, theta, &Tolerances::default())
}

pub fn bend_with(p: &PolygonConfig, diagonal: &Diagonal, theta: f64, tol: &Tolerances) -> Result<PolygonConfig> {
    let n = p.len();
    if diagonal.first == 0 || diagonal.first > n || diagonal.len == 0 || diagonal.len > n {
        return Err(Error::Domain(format!("diagonal {diagonal:?} invalid for a {n}-gon")));
    }
    let axis: Vec3 = diagonal.labels(n).map(|l| p.edge(l)).sum();
    let longest = p.edges.iter().fold(0.0_f64, |m, e| m.max(e.norm()));
    if axis.norm() <= tol.bend_floor * longest.max(1.0) {
        return Err(Error::UndefinedAxis(axis.norm()));
    }
    let k = axis.normalize();
    let mut edges = p.edges.clone();
    for l in diagonal.labels(n) {
        edges[l - 1] = rodrigues(&p.edges[l - 1], &k, theta);
    }
    Ok(PolygonConfig { edges })
}
