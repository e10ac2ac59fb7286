//! Brute-force enumeration of spanning forests in exact arithmetic.
//!
//! Every vertex picks one incoming arc or none; assignments containing a
//! circuit are discarded. What is left is exactly the set of spanning
//! out-forests. Weights are taken at their exact binary value, so sums are
//! exact rationals (integers when all weights are integers).
//!
//! This module is the ground truth the forest engine is checked against and
//! shares no code path with it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::digraph::WeightedDigraph;
use crate::error::{Error, Result};
use crate::forest::ForestExpansion;
use crate::Matrix;

pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Arcs point away from the roots; roots have indegree 0.
    Out,
    /// Arcs point toward the roots; roots have outdegree 0.
    In,
}

/// A spanning out- or in-forest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningForest {
    pub orientation: Orientation,
    /// Arcs as `(tail, head)`, sorted.
    pub arcs: Vec<(usize, usize)>,
    pub roots: Vec<usize>,
    /// `tree_of[v]` is the root of the tree containing `v`.
    pub tree_of: Vec<usize>,
}

impl SpanningForest {
    fn from_parents(parent: &[Option<usize>], orientation: Orientation) -> Self {
        let n = parent.len();
        let mut arcs: Vec<(usize, usize)> = parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| {
                p.map(|p| match orientation {
                    Orientation::Out => (p, v),
                    Orientation::In => (v, p),
                })
            })
            .collect();
        arcs.sort_unstable();
        let roots = (0..n).filter(|&v| parent[v].is_none()).collect();
        let tree_of = (0..n)
            .map(|mut v| {
                while let Some(p) = parent[v] {
                    v = p;
                }
                v
            })
            .collect();
        Self {
            orientation,
            arcs,
            roots,
            tree_of,
        }
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Product of the arc weights (1 for the empty forest).
    pub fn weight(&self, g: &WeightedDigraph) -> f64 {
        self.arcs.iter().map(|&(t, h)| g.weight(t, h)).product()
    }

    pub fn weight_exact(&self, g: &WeightedDigraph) -> BigRational {
        self.arcs
            .iter()
            .fold(BigRational::one(), |acc, &(t, h)| acc * exact(g.weight(t, h)))
    }

    /// The arc entering `v` (out-forests) or leaving `v` (in-forests).
    fn parent(&self, v: usize) -> Option<usize> {
        self.arcs.iter().find_map(|&(t, h)| match self.orientation {
            Orientation::Out => (h == v).then_some(t),
            Orientation::In => (t == v).then_some(h),
        })
    }

    /// Whether `v` hangs below some vertex of `set` (or lies in it).
    pub fn is_below(&self, v: usize, set: &[usize]) -> bool {
        let mut cur = Some(v);
        while let Some(u) = cur {
            if set.contains(&u) {
                return true;
            }
            cur = self.parent(u);
        }
        false
    }
}

/// Exact value of a finite float.
pub fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("weights are finite")
}

/// Number of parent assignments the enumeration will visit.
fn assignment_count(candidates: &[Vec<usize>]) -> u128 {
    candidates
        .iter()
        .try_fold(1u128, |acc, c| acc.checked_mul(c.len() as u128 + 1))
        .unwrap_or(u128::MAX)
}

/// Calls `visit` with the parent array of every circuit-free assignment.
fn for_each_forest(candidates: &[Vec<usize>], cap: u128, mut visit: impl FnMut(&[Option<usize>])) -> Result<()> {
    let required = assignment_count(candidates);
    if required > cap {
        return Err(Error::EnumerationCapExceeded { required, cap });
    }
    let n = candidates.len();
    let mut choice = vec![0usize; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    // 0 = unvisited, generation stamp otherwise; reset per assignment
    let mut stamp = vec![0usize; n];
    let mut generation = 0usize;
    loop {
        for v in 0..n {
            parent[v] = choice[v].checked_sub(1).map(|c| candidates[v][c]);
        }
        generation += 1;
        if is_acyclic(&parent, &mut stamp, &mut generation) {
            visit(&parent);
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(());
            }
            choice[pos] += 1;
            if choice[pos] <= candidates[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// Root-tracing circuit check. Each walk gets its own stamp; reaching a vertex
/// stamped by the current walk closes a circuit, reaching an older stamp means
/// the rest of the chain was already cleared.
fn is_acyclic(parent: &[Option<usize>], stamp: &mut [usize], generation: &mut usize) -> bool {
    let base = *generation;
    for start in 0..parent.len() {
        if stamp[start] > base {
            continue;
        }
        *generation += 1;
        let walk = *generation;
        let mut v = start;
        loop {
            if stamp[v] == walk {
                return false;
            }
            if stamp[v] > base {
                break;
            }
            stamp[v] = walk;
            match parent[v] {
                Some(p) => v = p,
                None => break,
            }
        }
    }
    true
}

fn in_candidates(g: &WeightedDigraph) -> Vec<Vec<usize>> {
    (0..g.n()).map(|v| g.in_neighbors(v).collect()).collect()
}

fn collect_forests(candidates: &[Vec<usize>], cap: u128, orientation: Orientation) -> Result<Vec<SpanningForest>> {
    let mut out = Vec::new();
    for_each_forest(candidates, cap, |p| {
        out.push(SpanningForest::from_parents(p, orientation))
    })?;
    out.sort_by(|a, b| a.arcs.cmp(&b.arcs));
    Ok(out)
}

/// All spanning out-forests, sorted by arc list.
pub fn enumerate_out_forests(g: &WeightedDigraph, cap: u128) -> Result<Vec<SpanningForest>> {
    collect_forests(&in_candidates(g), cap, Orientation::Out)
}

/// All spanning in-forests, sorted by arc list.
pub fn enumerate_in_forests(g: &WeightedDigraph, cap: u128) -> Result<Vec<SpanningForest>> {
    let candidates: Vec<Vec<usize>> = (0..g.n()).map(|v| g.out_neighbors(v).collect()).collect();
    collect_forests(&candidates, cap, Orientation::In)
}

/// An `n x n` matrix of exact rationals, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMatrix {
    n: usize,
    entries: Vec<BigRational>,
}

impl ExactMatrix {
    fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![BigRational::zero(); n * n],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.n + j]
    }

    pub fn to_f64(&self) -> Matrix {
        Matrix::from_fn(self.n, self.n, |i, j| ratio_to_f64(self.get(i, j)))
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Forest coefficients and forest matrices from direct enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleExpansion {
    pub n: usize,
    /// `sigma_0..=sigma_{n-d'}`.
    pub sigma_exact: Vec<BigRational>,
    /// `Q_0..=Q_{n-d'}`.
    pub q_exact: Vec<ExactMatrix>,
    /// Number of out-forests with `k` arcs.
    pub forests_by_size: Vec<usize>,
}

impl OracleExpansion {
    pub fn max_forest_size(&self) -> usize {
        self.sigma_exact.len() - 1
    }

    pub fn d_prime(&self) -> usize {
        self.n - self.max_forest_size()
    }

    pub fn sigma_f64(&self) -> Vec<f64> {
        self.sigma_exact.iter().map(ratio_to_f64).collect()
    }

    /// Largest per-entry relative deviation of the engine from the oracle.
    ///
    /// Entries that are exactly zero are measured relative to `sigma_k`.
    /// A mismatch in the maximum forest size counts as infinite deviation.
    pub fn deviation_from(&self, exp: &ForestExpansion) -> f64 {
        if exp.max_forest_size() != self.max_forest_size() || exp.n() != self.n {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for (k, s_exact) in self.sigma_exact.iter().enumerate() {
            let s = ratio_to_f64(s_exact);
            worst = worst.max(relative(exp.sigma()[k], s, s));
            let q = exp.q(k).expect("sizes checked above");
            let qe = &self.q_exact[k];
            for i in 0..self.n {
                for j in 0..self.n {
                    worst = worst.max(relative(q[(i, j)], ratio_to_f64(qe.get(i, j)), s));
                }
            }
        }
        worst
    }
}

fn relative(value: f64, exact: f64, scale: f64) -> f64 {
    let diff = (value - exact).abs();
    if exact != 0.0 {
        diff / exact.abs()
    } else {
        diff / scale
    }
}

/// Common power-of-two denominator of the weights and the scaled integer weights.
fn integer_weights(g: &WeightedDigraph) -> (BigInt, Vec<BigInt>) {
    let n = g.n();
    let exacts: Vec<BigRational> = (0..n * n).map(|e| exact(g.weight(e / n, e % n))).collect();
    let denom = exacts
        .iter()
        .map(|r| r.denom().clone())
        .max()
        .unwrap_or_else(BigInt::one);
    let ints = exacts
        .iter()
        .map(|r| (r * BigRational::from_integer(denom.clone())).to_integer())
        .collect();
    (denom, ints)
}

/// `sigma_k` and `Q_k` by summing forest weights.
///
/// All forests with `k` arcs share the denominator `D^k`, so sums run over
/// integers and are divided out once at the end.
pub fn oracle_expansion(g: &WeightedDigraph, cap: u128) -> Result<OracleExpansion> {
    let n = g.n();
    let (denom, ints) = integer_weights(g);
    let mut sigma: Vec<BigInt> = vec![BigInt::zero(); n];
    let mut q: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n * n]; n];
    let mut counts = vec![0usize; n];
    let mut roots = vec![0usize; n];
    for_each_forest(&in_candidates(g), cap, |parent| {
        let mut k = 0;
        let mut w = BigInt::one();
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                k += 1;
                w *= &ints[p * n + v];
            }
        }
        for (v, root) in roots.iter_mut().enumerate() {
            let mut u = v;
            while let Some(p) = parent[u] {
                u = p;
            }
            *root = u;
        }
        counts[k] += 1;
        for (j, &r) in roots.iter().enumerate() {
            q[k][r * n + j] += &w;
        }
        sigma[k] += w;
    })?;

    let top = counts.iter().rposition(|&c| c > 0).unwrap_or(0);
    let mut sigma_exact = Vec::with_capacity(top + 1);
    let mut q_exact = Vec::with_capacity(top + 1);
    let mut scale = BigInt::one();
    for k in 0..=top {
        sigma_exact.push(BigRational::new(sigma[k].clone(), scale.clone()));
        let mut m = ExactMatrix::zeros(n);
        for (e, v) in q[k].iter().enumerate() {
            m.entries[e] = BigRational::new(v.clone(), scale.clone());
        }
        q_exact.push(m);
        scale *= &denom;
    }
    counts.truncate(top + 1);
    Ok(OracleExpansion {
        n,
        sigma_exact,
        q_exact,
        forests_by_size: counts,
    })
}

/// Weights of the spanning diverging trees of a source knot, by root.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotTrees {
    /// Knot vertices, sorted.
    pub knot: Vec<usize>,
    /// `by_root[i]`: weight of trees of the knot diverging from `knot[i]`.
    pub by_root: Vec<BigRational>,
    pub total: BigRational,
}

impl KnotTrees {
    pub fn weight_from(&self, k: usize) -> Option<&BigRational> {
        self.knot.iter().position(|&v| v == k).map(|i| &self.by_root[i])
    }
}

fn require_knot(g: &WeightedDigraph, knot: &[usize]) -> Result<Vec<usize>> {
    let info = g.strong_components();
    if !info.is_source_knot(knot) {
        return Err(Error::NotASourceKnot);
    }
    let mut k = knot.to_vec();
    k.sort_unstable();
    Ok(k)
}

/// Spanning diverging trees of the restriction of `g` to the source knot `knot`.
pub fn knot_tree_weights(g: &WeightedDigraph, knot: &[usize]) -> Result<KnotTrees> {
    let knot = require_knot(g, knot)?;
    let local: Vec<Vec<usize>> = knot
        .iter()
        .map(|&v| {
            knot.iter()
                .enumerate()
                .filter(|&(_, &u)| g.has_arc(u, v))
                .map(|(li, _)| li)
                .collect()
        })
        .collect();
    let size = knot.len();
    let mut by_root = vec![BigRational::zero(); size];
    for_each_forest(&local, DEFAULT_ENUMERATION_CAP, |parent| {
        let roots: Vec<usize> = (0..size).filter(|&v| parent[v].is_none()).collect();
        if let [root] = roots[..] {
            let w = parent
                .iter()
                .enumerate()
                .filter_map(|(v, p)| p.map(|p| exact(g.weight(knot[p], knot[v]))))
                .fold(BigRational::one(), |acc, x| acc * x);
            by_root[root] += w;
        }
    })?;
    let total = by_root.iter().fold(BigRational::zero(), |acc, x| acc + x);
    Ok(KnotTrees { knot, by_root, total })
}

/// Weight of the maximum out-forests of `g` minus the arcs inside `knot` in
/// which `j` is reachable from a vertex of `knot`.
pub fn max_forest_reach_weight(g: &WeightedDigraph, knot: &[usize], j: usize) -> Result<BigRational> {
    let knot = require_knot(g, knot)?;
    let pruned = g.without_arcs_within(&knot);
    let forests = enumerate_out_forests(&pruned, DEFAULT_ENUMERATION_CAP)?;
    let top = forests.iter().map(SpanningForest::arc_count).max().unwrap_or(0);
    Ok(forests
        .iter()
        .filter(|f| f.arc_count() == top && f.is_below(j, &knot))
        .fold(BigRational::zero(), |acc, f| acc + f.weight_exact(&pruned)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: i64) -> BigRational {
        BigRational::from_integer(x.into())
    }

    fn path() -> WeightedDigraph {
        WeightedDigraph::build(3, &[(1, 2, 1.0), (2, 3, 1.0)]).unwrap()
    }

    fn fork() -> WeightedDigraph {
        WeightedDigraph::build(3, &[(1, 3, 1.0), (2, 3, 1.0)]).unwrap()
    }

    #[test]
    fn out_forests_of_small_graphs() {
        let f = enumerate_out_forests(&path(), DEFAULT_ENUMERATION_CAP).unwrap();
        let arcs: Vec<_> = f.iter().map(|f| f.arcs.clone()).collect();
        assert_eq!(arcs, vec![vec![], vec![(0, 1)], vec![(0, 1), (1, 2)], vec![(1, 2)]]);
        for forest in &f {
            assert_eq!(forest.roots.len(), 3 - forest.arc_count());
        }

        let f = enumerate_out_forests(&WeightedDigraph::arcless(3).unwrap(), 10).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].tree_of, vec![0, 1, 2]);

        let two_cycle = WeightedDigraph::build(2, &[(1, 2, 1.0), (2, 1, 1.0)]).unwrap();
        let f = enumerate_out_forests(&two_cycle, 10).unwrap();
        assert_eq!(f.len(), 3);
        assert!(f.iter().all(|f| f.arc_count() <= 1));
    }

    #[test]
    fn cap_is_enforced() {
        assert_eq!(
            enumerate_out_forests(&path(), 3).unwrap_err(),
            Error::EnumerationCapExceeded { required: 4, cap: 3 }
        );
    }

    #[test]
    fn in_forests_mirror_out_forests() {
        let inf = enumerate_in_forests(&path(), 100).unwrap();
        assert_eq!(inf.len(), 4);
        let full = inf.iter().find(|f| f.arc_count() == 2).unwrap();
        assert_eq!(full.roots, vec![2]);
        assert_eq!(full.tree_of, vec![2, 2, 2]);
        let rev = enumerate_out_forests(&path().reverse(), 100).unwrap();
        let mut a: Vec<_> = inf.iter().map(|f| f.weight(&path())).collect();
        let mut b: Vec<_> = rev.iter().map(|f| f.weight(&path().reverse())).collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert_eq!(a, b);
        assert_eq!(
            enumerate_in_forests(&WeightedDigraph::arcless(2).unwrap(), 1)
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn expansion_of_path_and_single_arc() {
        let o = oracle_expansion(&path(), DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(o.sigma_exact, vec![r(1), r(2), r(1)]);
        assert_eq!(o.q_exact[2].get(0, 2), &r(1));
        assert_eq!(o.forests_by_size, vec![1, 2, 1]);

        let g = WeightedDigraph::build(2, &[(1, 2, 3.0)]).unwrap();
        let o = oracle_expansion(&g, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(o.sigma_exact, vec![r(1), r(3)]);
        assert_eq!(o.q_exact[1].to_f64(), Matrix::from_row_slice(2, 2, &[3., 3., 0., 0.]));
    }

    #[test]
    fn fractional_weights_are_exact() {
        let g = WeightedDigraph::build(3, &[(1, 2, 0.5), (2, 3, 0.25), (1, 3, 0.75)]).unwrap();
        let o = oracle_expansion(&g, DEFAULT_ENUMERATION_CAP).unwrap();
        // 1-arc forests: 0.5 + 0.25 + 0.75; 2-arc: {1->2, 2->3}, {1->2, 1->3}
        assert_eq!(o.sigma_f64(), vec![1.0, 1.5, 0.5 * 0.25 + 0.5 * 0.75]);
    }

    #[test]
    fn column_sums_equal_sigma() {
        let g = WeightedDigraph::build(4, &[(1, 2, 2.0), (2, 3, 1.0), (3, 1, 3.0), (3, 4, 1.0), (4, 2, 2.0)]).unwrap();
        let o = oracle_expansion(&g, DEFAULT_ENUMERATION_CAP).unwrap();
        for (k, qk) in o.q_exact.iter().enumerate() {
            for j in 0..4 {
                let col = (0..4).fold(BigRational::zero(), |acc, i| acc + qk.get(i, j));
                assert_eq!(col, o.sigma_exact[k]);
            }
        }
    }

    #[test]
    fn knot_trees() {
        let g = WeightedDigraph::build(2, &[(1, 2, 2.0), (2, 1, 1.0)]).unwrap();
        let t = knot_tree_weights(&g, &[0, 1]).unwrap();
        assert_eq!(t.by_root, vec![r(2), r(1)]);
        assert_eq!(t.total, r(3));

        let t = knot_tree_weights(&path(), &[0]).unwrap();
        assert_eq!(t.by_root, vec![r(1)]);
        assert_eq!(t.total, r(1));

        let tri = WeightedDigraph::build(3, &[(1, 2, 1.0), (2, 3, 1.0), (3, 1, 1.0)]).unwrap();
        let t = knot_tree_weights(&tri, &[0, 1, 2]).unwrap();
        assert_eq!(t.by_root, vec![r(1), r(1), r(1)]);
        assert_eq!(t.total, r(3));

        assert_eq!(knot_tree_weights(&path(), &[1]).unwrap_err(), Error::NotASourceKnot);
    }

    #[test]
    fn max_forest_reach() {
        assert_eq!(max_forest_reach_weight(&fork(), &[0], 2).unwrap(), r(1));
        assert_eq!(max_forest_reach_weight(&fork(), &[0], 0).unwrap(), r(2));
        assert_eq!(max_forest_reach_weight(&path(), &[0], 1).unwrap(), r(1));
        assert_eq!(
            max_forest_reach_weight(&fork(), &[2], 0).unwrap_err(),
            Error::NotASourceKnot
        );
    }
}
