//! Weighted digraphs, the column Laplacian, and reachability structure.
//!
//! Vertices are `0..n` everywhere in the library. The only 1-based entry
//! point is [`WeightedDigraph::build`], which mirrors the edge-list format.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::error::{Error, Result};
use crate::Matrix;

/// Default cap on the number of vertex bases [`WeightedDigraph::vertex_bases`] will enumerate.
pub const DEFAULT_BASIS_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedArc {
    pub tail: usize,
    pub head: usize,
    pub weight: f64,
}

/// A loop-free digraph with strictly positive arc weights.
///
/// Weights are stored densely; a zero entry means "no arc".
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDigraph {
    n: usize,
    weights: Vec<f64>,
}

impl WeightedDigraph {
    /// Builds a digraph from 1-based `(tail, head, weight)` triples.
    /// Parallel arcs are merged by adding their weights.
    pub fn build(n: usize, arcs: &[(usize, usize, f64)]) -> Result<Self> {
        let mut g = Self::arcless(n)?;
        for &(tail, head, weight) in arcs {
            for v in [tail, head] {
                if v == 0 || v > n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if tail == head {
                return Err(Error::LoopArc(tail));
            }
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(Error::NonpositiveWeight { tail, head, weight });
            }
            g.weights[(tail - 1) * n + head - 1] += weight;
        }
        Ok(g)
    }

    /// Builds a digraph from 0-based arcs.
    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = WeightedArc>) -> Result<Self> {
        let shifted: Vec<_> = arcs.into_iter().map(|a| (a.tail + 1, a.head + 1, a.weight)).collect();
        Self::build(n, &shifted)
    }

    pub fn arcless(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewVertices(n));
        }
        Ok(Self {
            n,
            weights: vec![0.0; n * n],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Weight of arc `tail -> head`, zero when absent.
    pub fn weight(&self, tail: usize, head: usize) -> f64 {
        self.weights[tail * self.n + head]
    }

    pub fn has_arc(&self, tail: usize, head: usize) -> bool {
        self.weight(tail, head) > 0.0
    }

    /// Arcs in lexicographic `(tail, head)` order.
    pub fn arcs(&self) -> impl Iterator<Item = WeightedArc> + '_ {
        (0..self.n).flat_map(move |tail| {
            (0..self.n).filter_map(move |head| {
                let weight = self.weight(tail, head);
                (weight > 0.0).then_some(WeightedArc { tail, head, weight })
            })
        })
    }

    pub fn arc_count(&self) -> usize {
        self.weights.iter().filter(|w| **w > 0.0).count()
    }

    pub fn out_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&h| self.has_arc(v, h))
    }

    pub fn in_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&t| self.has_arc(t, v))
    }

    pub fn out_strength(&self, v: usize) -> f64 {
        (0..self.n).map(|h| self.weight(v, h)).sum()
    }

    pub fn in_strength(&self, v: usize) -> f64 {
        (0..self.n).map(|t| self.weight(t, v)).sum()
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    /// The digraph with every arc reversed, weights preserved.
    pub fn reverse(&self) -> Self {
        let n = self.n;
        let mut weights = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                weights[j * n + i] = self.weights[i * n + j];
            }
        }
        Self { n, weights }
    }

    /// Arcs in both directions with `w'_ij = w_ij + w_ji`.
    pub fn symmetrized(&self) -> Self {
        let n = self.n;
        let mut weights = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                weights[i * n + j] = self.weights[i * n + j] + self.weights[j * n + i];
            }
        }
        Self { n, weights }
    }

    /// Every weight multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        Ok(Self {
            n: self.n,
            weights: self.weights.iter().map(|w| w * factor).collect(),
        })
    }

    /// A copy with `delta` added to the weight of `tail -> head` (creating the arc if absent).
    pub fn with_added_weight(&self, tail: usize, head: usize, delta: f64) -> Result<Self> {
        if tail >= self.n || head >= self.n {
            return Err(Error::VertexOutOfRange {
                vertex: tail.max(head) + 1,
                n: self.n,
            });
        }
        if tail == head {
            return Err(Error::LoopArc(tail + 1));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::NonpositiveWeight {
                tail: tail + 1,
                head: head + 1,
                weight: delta,
            });
        }
        let mut g = self.clone();
        g.weights[tail * self.n + head] += delta;
        Ok(g)
    }

    /// A copy without the arcs whose both ends lie in `set`.
    pub fn without_arcs_within(&self, set: &[usize]) -> Self {
        let mut g = self.clone();
        for &a in set {
            for &b in set {
                g.weights[a * self.n + b] = 0.0;
            }
        }
        g
    }

    /// Column Laplacian: `l_ij = -w_ij` off the diagonal, `l_ii` the in-strength of `i`.
    pub fn laplacian(&self) -> LaplacianMatrix {
        let n = self.n;
        let m = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                self.in_strength(i)
            } else {
                -self.weight(i, j)
            }
        });
        LaplacianMatrix(m)
    }

    /// Vertices reachable from `start` (including `start`), as a membership mask.
    pub fn reachable_mask(&self, start: usize) -> Vec<bool> {
        self.reach_from(&[start], None)
    }

    /// Vertices reachable from `start`, sorted.
    pub fn reachable(&self, start: usize) -> Vec<usize> {
        mask_to_set(&self.reachable_mask(start))
    }

    fn reach_from(&self, starts: &[usize], removed: Option<usize>) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::new();
        for &s in starts {
            if Some(s) != removed && !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for v in self.out_neighbors(u) {
                if !seen[v] && Some(v) != removed {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// Full reachability relation: `r[i][j]` iff `j` is reachable from `i`.
    pub fn reachability(&self) -> Vec<Vec<bool>> {
        (0..self.n).map(|i| self.reachable_mask(i)).collect()
    }

    /// Whether `k` lies on every path from `i` to `t` (and at least one such path exists).
    pub fn is_cutpoint(&self, k: usize, i: usize, t: usize) -> Result<bool> {
        for v in [k, i, t] {
            if v >= self.n {
                return Err(Error::VertexOutOfRange {
                    vertex: v + 1,
                    n: self.n,
                });
            }
        }
        if i == k || k == t || i == t {
            return Err(Error::DegenerateTriple {
                k: k + 1,
                i: i + 1,
                t: t + 1,
            });
        }
        Ok(self.reach_from(&[i], None)[t] && !self.reach_from(&[i], Some(k))[t])
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.strong_components().components.len() == 1
    }

    /// Strong components, condensation, source knots and their exclusive reach sets.
    pub fn strong_components(&self) -> SourceKnotInfo {
        let n = self.n;
        let mut pg: DiGraph<(), ()> = DiGraph::with_capacity(n, self.arc_count());
        for _ in 0..n {
            pg.add_node(());
        }
        for a in self.arcs() {
            pg.add_edge(NodeIndex::new(a.tail), NodeIndex::new(a.head), ());
        }
        let mut components: Vec<Vec<usize>> = tarjan_scc(&pg)
            .into_iter()
            .map(|c| {
                let mut c: Vec<usize> = c.into_iter().map(NodeIndex::index).collect();
                c.sort_unstable();
                c
            })
            .collect();
        components.sort_by_key(|c| c[0]);

        let mut component_of = vec![0; n];
        for (ci, c) in components.iter().enumerate() {
            for &v in c {
                component_of[v] = ci;
            }
        }
        let mut condensation_arcs: Vec<(usize, usize)> = self
            .arcs()
            .map(|a| (component_of[a.tail], component_of[a.head]))
            .filter(|(a, b)| a != b)
            .collect();
        condensation_arcs.sort_unstable();
        condensation_arcs.dedup();

        let mut has_in = vec![false; components.len()];
        for &(_, b) in &condensation_arcs {
            has_in[b] = true;
        }
        let source_knots: Vec<Vec<usize>> = components
            .iter()
            .zip(&has_in)
            .filter(|(_, has)| !**has)
            .map(|(c, _)| c.clone())
            .collect();

        let reach: Vec<Vec<bool>> = source_knots.iter().map(|k| self.reach_from(k, None)).collect();
        let exclusive_reach = (0..source_knots.len())
            .map(|s| {
                (0..n)
                    .filter(|&v| reach[s][v] && reach.iter().enumerate().all(|(o, r)| o == s || !r[v]))
                    .collect()
            })
            .collect();

        SourceKnotInfo {
            d_prime: source_knots.len(),
            components,
            component_of,
            condensation_arcs,
            source_knots,
            exclusive_reach,
        }
    }

    /// Every vertex basis: one vertex from each source knot.
    pub fn vertex_bases(&self, cap: u128) -> Result<VertexBases> {
        let knots = self.strong_components().source_knots;
        let count = knots
            .iter()
            .try_fold(1u128, |acc, k| acc.checked_mul(k.len() as u128))
            .unwrap_or(u128::MAX);
        if count > cap {
            return Err(Error::BasisCountOverflow { count, cap });
        }
        Ok(VertexBases {
            cursor: Some(vec![0; knots.len()]),
            knots,
        })
    }
}

fn mask_to_set(mask: &[bool]) -> Vec<usize> {
    mask.iter().enumerate().filter_map(|(v, &m)| m.then_some(v)).collect()
}

/// The column Laplacian of a weighted digraph.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix(pub Matrix);

impl LaplacianMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    /// Largest absolute entry.
    pub fn scale(&self) -> f64 {
        crate::linalg::max_abs(&self.0)
    }
}

/// Component structure of a digraph. All sets are sorted, 0-based, and
/// components are ordered by their smallest vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceKnotInfo {
    pub components: Vec<Vec<usize>>,
    pub component_of: Vec<usize>,
    /// Arcs of the condensation between component indices.
    pub condensation_arcs: Vec<(usize, usize)>,
    pub source_knots: Vec<Vec<usize>>,
    /// `exclusive_reach[s]`: reachable from knot `s` and from no other knot.
    pub exclusive_reach: Vec<Vec<usize>>,
    pub d_prime: usize,
}

impl SourceKnotInfo {
    /// Union of all source knots.
    pub fn knot_vertices(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.source_knots.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }

    /// Index of the source knot containing `v`, if any.
    pub fn knot_of(&self, v: usize) -> Option<usize> {
        self.source_knots.iter().position(|k| k.binary_search(&v).is_ok())
    }

    pub fn is_source_knot(&self, set: &[usize]) -> bool {
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        self.source_knots.contains(&sorted)
    }
}

/// Iterator over vertex bases in lexicographic order of knot choices.
#[derive(Debug, Clone)]
pub struct VertexBases {
    knots: Vec<Vec<usize>>,
    cursor: Option<Vec<usize>>,
}

impl Iterator for VertexBases {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cursor = self.cursor.as_mut()?;
        let mut basis: Vec<usize> = cursor.iter().zip(&self.knots).map(|(&c, k)| k[c]).collect();
        basis.sort_unstable();

        let mut pos = cursor.len();
        loop {
            if pos == 0 {
                self.cursor = None;
                break;
            }
            pos -= 1;
            cursor[pos] += 1;
            if cursor[pos] < self.knots[pos].len() {
                break;
            }
            cursor[pos] = 0;
        }
        Some(basis)
    }
}
