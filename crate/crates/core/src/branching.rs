//! Exact combinatorics of branching monoids.
//!
//! Everything here is integer arithmetic: Clebsch-Gordan and Pieri
//! admissibility, the polygon monoid of `SU(2)` diagonal branching, lattice
//! points of tree polytopes, the type-A dominance cone and iterated Pieri
//! (fiber product) chains.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::gt::HighestWeight;

/// `M_i ⊗ M_j ⊇ M_k` for `SU(2)`: even sum and triangle inequalities.
pub fn cg_admissible(i: u64, j: u64, k: u64) -> bool {
    (i + j + k) % 2 == 0 && i.abs_diff(j) <= k && k <= i + j
}

/// Decomposes `M_a ⊗ (Σ mult_b M_b)` by the Clebsch-Gordan rule.
fn tensor_with(acc: &BTreeMap<u64, u128>, a: u64) -> BTreeMap<u64, u128> {
    let mut out = BTreeMap::new();
    for (&b, &mult) in acc {
        let mut c = a.abs_diff(b);
        while c <= a + b {
            *out.entry(c).or_insert(0) += mult;
            c += 2;
        }
    }
    out
}

/// Multiplicity of the trivial representation in `M_{r_1} ⊗ ... ⊗ M_{r_n}`.
pub fn cg_multiplicity(r: &[u64]) -> u128 {
    let mut acc = BTreeMap::from([(0u64, 1u128)]);
    for &a in r {
        acc = tensor_with(&acc, a);
    }
    acc.get(&0).copied().unwrap_or(0)
}

/// Whether `eta` (length `n - 1`) interlaces `lambda` (length `n`):
/// `λ_1 >= η_1 >= λ_2 >= ... >= η_{n-1} >= λ_n`.
pub fn pieri_admissible(eta: &HighestWeight, lambda: &HighestWeight) -> Result<bool> {
    let (e, l) = (eta.entries(), lambda.entries());
    if e.len() + 1 != l.len() {
        return Err(Error::LengthMismatch {
            expected: l.len().saturating_sub(1),
            got: e.len(),
        });
    }
    Ok(e.iter().enumerate().all(|(i, &x)| l[i] >= x && x >= l[i + 1]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolygonMode {
    /// Lattice points of the monoid: polygon inequalities and even sum.
    Integral,
    /// The real cone: polygon inequalities only.
    Cone,
}

/// Membership in the polygon monoid (or its cone): every side is at most the
/// sum of the others.
pub fn polygon_monoid_member(r: &[u64], mode: PolygonMode) -> bool {
    let total: u64 = r.iter().sum();
    let polygon = r.iter().all(|&x| x <= total - x);
    match mode {
        PolygonMode::Cone => polygon,
        PolygonMode::Integral => polygon && total % 2 == 0,
    }
}

/// Type-A dominance: `μ - λ = Σ m_i α_i` with `m_i >= 0`, `α_i = e_i - e_{i+1}`.
pub fn dominance_cone_member(lambda: &HighestWeight, mu: &[i64]) -> Result<bool> {
    let l = lambda.entries();
    if l.len() != mu.len() {
        return Err(Error::LengthMismatch {
            expected: l.len(),
            got: mu.len(),
        });
    }
    let mut prefix = 0i64;
    for (a, b) in mu.iter().zip(l) {
        prefix += a - b;
        if prefix < 0 {
            return Ok(false);
        }
    }
    Ok(prefix == 0)
}

/// Iterated Pieri: every consecutive pair of the chain interlaces. The chain
/// is given shortest first, with lengths `1, 2, ..., n`.
pub fn fiber_chain_member(chain: &[HighestWeight]) -> Result<bool> {
    for (k, w) in chain.iter().enumerate() {
        if w.len() != k + 1 {
            return Err(Error::MalformedChain(format!(
                "entry {k} has length {}, expected {}",
                w.len(),
                k + 1
            )));
        }
    }
    for pair in chain.windows(2) {
        if !pieri_admissible(&pair[0], &pair[1])? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// An unrooted tree with leaves labeled `1..=n_leaves`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeGraph {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
    /// `leaf_vertex[label - 1]` is the vertex carrying that label.
    leaf_vertex: Vec<usize>,
    adjacency: Vec<Vec<usize>>,
}

impl TreeGraph {
    /// Validates connectivity, acyclicity and that labeled vertices are
    /// exactly the leaves.
    pub fn new(n_vertices: usize, edges: Vec<(usize, usize)>, leaf_vertex: Vec<usize>) -> Result<Self> {
        if n_vertices == 0 || edges.len() + 1 != n_vertices {
            return Err(Error::MalformedTree(format!(
                "{} edges on {n_vertices} vertices cannot form a tree",
                edges.len()
            )));
        }
        let mut adjacency = vec![Vec::new(); n_vertices];
        for &(a, b) in &edges {
            if a >= n_vertices || b >= n_vertices || a == b {
                return Err(Error::MalformedTree(format!("bad edge ({a}, {b})")));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        let mut seen = vec![false; n_vertices];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::MalformedTree("graph is not connected".into()));
        }
        let mut labeled = vec![false; n_vertices];
        for &v in &leaf_vertex {
            if v >= n_vertices || labeled[v] {
                return Err(Error::MalformedTree(format!("bad leaf vertex {v}")));
            }
            labeled[v] = true;
        }
        if n_vertices > 1 {
            for v in 0..n_vertices {
                if labeled[v] != (adjacency[v].len() == 1) {
                    return Err(Error::MalformedTree(format!(
                        "vertex {v} has degree {} but is {}labeled",
                        adjacency[v].len(),
                        if labeled[v] { "" } else { "not " }
                    )));
                }
            }
        }
        Ok(Self {
            n_vertices,
            edges,
            leaf_vertex,
            adjacency,
        })
    }

    pub fn n_leaves(&self) -> usize {
        self.leaf_vertex.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn leaf_vertex(&self, label: usize) -> usize {
        self.leaf_vertex[label - 1]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    fn label_of(&self, v: usize) -> Option<usize> {
        self.leaf_vertex.iter().position(|&x| x == v).map(|i| i + 1)
    }

    pub fn is_trivalent(&self) -> bool {
        (0..self.n_vertices).all(|v| self.label_of(v).is_some() || self.adjacency[v].len() == 3)
    }

    /// Parses nested-parenthesis (Newick-like) text such as `((1,2),(3,4))`
    /// or `(1,2,(3,4))`. A root of degree two is suppressed.
    pub fn from_newick(text: &str) -> Result<Self> {
        let mut p = NewickParser {
            s: text.trim().trim_end_matches(';').as_bytes(),
            pos: 0,
        };
        let root = p.node()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(Error::MalformedTree(format!("trailing input at byte {}", p.pos)));
        }
        let mut b = TreeBuilder::default();
        match root {
            Newick::Leaf(_) => return Err(Error::MalformedTree("tree has a single leaf".into())),
            Newick::Node(children) if children.len() == 2 => {
                let a = b.add(&children[0])?;
                let c = b.add(&children[1])?;
                b.edges.push((a, c));
            }
            Newick::Node(children) if children.len() >= 3 => {
                let r = b.vertex(None);
                for c in &children {
                    let v = b.add(c)?;
                    b.edges.push((r, v));
                }
            }
            Newick::Node(_) => return Err(Error::MalformedTree("node with one child".into())),
        }
        b.finish()
    }

    /// Nested-parenthesis text rooted at the neighbour of leaf 1.
    pub fn to_newick(&self) -> String {
        fn go(t: &TreeGraph, v: usize, parent: usize, out: &mut String) {
            if let Some(l) = t.label_of(v) {
                out.push_str(&l.to_string());
                return;
            }
            out.push('(');
            let mut first = true;
            for &w in &t.adjacency[v] {
                if w == parent {
                    continue;
                }
                if !first {
                    out.push(',');
                }
                first = false;
                go(t, w, v, out);
            }
            out.push(')');
        }
        let leaf = self.leaf_vertex(1);
        let mut out = String::from("(1,");
        let next = self.adjacency[leaf][0];
        if self.label_of(next).is_some() {
            out.push_str(&self.label_of(next).unwrap().to_string());
        } else {
            let mut inner = String::new();
            go(self, next, leaf, &mut inner);
            // Drop the outer parentheses of the internal vertex: its children
            // join leaf 1 at the root.
            out.push_str(&inner[1..inner.len() - 1]);
        }
        out.push(')');
        out
    }
}

impl fmt::Display for TreeGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_newick())
    }
}

enum Newick {
    Leaf(usize),
    Node(Vec<Newick>),
}

struct NewickParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl NewickParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn node(&mut self) -> Result<Newick> {
        self.skip_ws();
        match self.s.get(self.pos) {
            Some(b'(') => {
                self.pos += 1;
                let mut children = vec![self.node()?];
                loop {
                    self.skip_ws();
                    match self.s.get(self.pos) {
                        Some(b',') => {
                            self.pos += 1;
                            children.push(self.node()?);
                        }
                        Some(b')') => {
                            self.pos += 1;
                            return Ok(Newick::Node(children));
                        }
                        _ => {
                            return Err(Error::MalformedTree(format!(
                                "expected ',' or ')' at byte {}",
                                self.pos
                            )))
                        }
                    }
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
                let label = text
                    .parse()
                    .map_err(|_| Error::MalformedTree(format!("bad label {text}")))?;
                Ok(Newick::Leaf(label))
            }
            _ => Err(Error::MalformedTree(format!("unexpected input at byte {}", self.pos))),
        }
    }
}

#[derive(Default)]
struct TreeBuilder {
    n: usize,
    edges: Vec<(usize, usize)>,
    labels: Vec<(usize, usize)>,
}

impl TreeBuilder {
    fn vertex(&mut self, label: Option<usize>) -> usize {
        let v = self.n;
        self.n += 1;
        if let Some(l) = label {
            self.labels.push((l, v));
        }
        v
    }

    fn add(&mut self, node: &Newick) -> Result<usize> {
        match node {
            Newick::Leaf(l) => Ok(self.vertex(Some(*l))),
            Newick::Node(children) => {
                if children.len() < 2 {
                    return Err(Error::MalformedTree("node with one child".into()));
                }
                let v = self.vertex(None);
                for c in children {
                    let w = self.add(c)?;
                    self.edges.push((v, w));
                }
                Ok(v)
            }
        }
    }

    fn finish(mut self) -> Result<TreeGraph> {
        self.labels.sort_unstable();
        for (k, &(l, _)) in self.labels.iter().enumerate() {
            if l != k + 1 {
                return Err(Error::MalformedTree(format!(
                    "leaf labels must be exactly 1..={}",
                    self.labels.len()
                )));
            }
        }
        let leaf_vertex = self.labels.iter().map(|&(_, v)| v).collect();
        TreeGraph::new(self.n, self.edges, leaf_vertex)
    }
}

/// Every trivalent tree on `n >= 3` labeled leaves, `(2n - 5)!!` of them,
/// built by attaching leaf `k` to each edge of each tree on `k - 1` leaves.
pub fn all_trivalent_trees(n: usize) -> Vec<TreeGraph> {
    assert!(n >= 3, "trivalent trees need at least three leaves");
    // (vertex count, edges, leaf vertices)
    type Raw = (usize, Vec<(usize, usize)>, Vec<usize>);
    let mut trees: Vec<Raw> = vec![(4, vec![(0, 1), (0, 2), (0, 3)], vec![1, 2, 3])];
    for _ in 4..=n {
        let mut next = Vec::with_capacity(trees.len() * 8);
        for (nv, edges, leaves) in &trees {
            for e in 0..edges.len() {
                let (a, b) = edges[e];
                let mid = *nv;
                let leaf = nv + 1;
                let mut ne = edges.clone();
                ne[e] = (a, mid);
                ne.push((mid, b));
                ne.push((mid, leaf));
                let mut nl = leaves.clone();
                nl.push(leaf);
                next.push((nv + 2, ne, nl));
            }
        }
        trees = next;
    }
    trees
        .into_iter()
        .map(|(nv, e, l)| TreeGraph::new(nv, e, l).expect("generated tree is valid"))
        .collect()
}

/// Number of integer weightings of the internal edges that complete the
/// leaf weights `r` (indexed by leaf label) to a point of the tree monoid.
pub fn tree_polytope_count(t: &TreeGraph, r: &[u64]) -> Result<u128> {
    if r.len() != t.n_leaves() {
        return Err(Error::LengthMismatch {
            expected: t.n_leaves(),
            got: r.len(),
        });
    }
    if !t.is_trivalent() {
        return Err(Error::NonTrivalent(t.to_newick()));
    }
    let root_leaf = t.leaf_vertex(1);
    let first = t.adjacency[root_leaf][0];
    let weights = subtree_weights(t, first, root_leaf, r);
    Ok(weights.get(&r[0]).copied().unwrap_or(0))
}

/// For the edge `(parent, v)`, the number of valid weightings of the subtree
/// hanging below `v`, keyed by the weight on that edge.
fn subtree_weights(t: &TreeGraph, v: usize, parent: usize, r: &[u64]) -> BTreeMap<u64, u128> {
    if let Some(label) = t.label_of(v) {
        return BTreeMap::from([(r[label - 1], 1)]);
    }
    let children: Vec<usize> = t.adjacency[v].iter().copied().filter(|&w| w != parent).collect();
    let left = subtree_weights(t, children[0], v, r);
    let right = subtree_weights(t, children[1], v, r);
    let mut out = BTreeMap::new();
    for (&a, &ca) in &left {
        for (&b, &cb) in &right {
            let mut c = a.abs_diff(b);
            while c <= a + b {
                *out.entry(c).or_insert(0) += ca * cb;
                c += 2;
            }
        }
    }
    out
}
