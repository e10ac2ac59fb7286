//! Score vectors and rankings derived from preference digraphs.

use std::fmt;

use crate::digraph::WeightedDigraph;
use crate::error::{Error, Result};
use crate::forest::{check_tau, ForestExpansion};
use crate::Matrix;

/// Scores within this distance, after dividing by `max|x|`, are tied.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreMethod {
    KernelMean,
    /// Average of the kernel basis vectors.
    KernelBasis,
    DanielsTree,
    Borda,
    UniformStartLimit,
}

impl ScoreMethod {
    pub fn name(self) -> &'static str {
        match self {
            ScoreMethod::KernelMean => "kernel_mean",
            ScoreMethod::KernelBasis => "kernel_basis",
            ScoreMethod::DanielsTree => "daniels_tree",
            ScoreMethod::Borda => "borda",
            ScoreMethod::UniformStartLimit => "uniform_start_limit",
        }
    }
}

impl fmt::Display for ScoreMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    pub values: Vec<f64>,
    pub method: ScoreMethod,
    /// `tau` for Borda scores, `alpha` for the uniform-start limit.
    pub param: Option<f64>,
}

/// Vertices in descending score order, ties broken by ascending id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankingReport {
    pub ordering: Vec<usize>,
    /// Groups of two or more tied vertices, each in ascending id order.
    pub tie_groups: Vec<Vec<usize>>,
}

/// Columns of `J~` at the smallest vertex of each source knot.
///
/// Each vector solves `Lx = 0` and is supported on its knot.
pub fn kernel_basis(g: &WeightedDigraph) -> Result<Vec<Vec<f64>>> {
    let exp = ForestExpansion::of_graph(g)?;
    let jt = exp.j_tilde();
    let knots = g.strong_components().source_knots;
    Ok(knots
        .iter()
        .map(|knot| jt.matrix().column(knot[0]).iter().copied().collect())
        .collect())
}

/// Row means of `J~`.
pub fn mean_limit_scores(g: &WeightedDigraph) -> Result<ScoreVector> {
    let jt = ForestExpansion::of_graph(g)?.j_tilde();
    let n = g.n() as f64;
    Ok(ScoreVector {
        values: jt.matrix().row_iter().map(|r| r.sum() / n).collect(),
        method: ScoreMethod::KernelMean,
        param: None,
    })
}

/// Weights of the spanning out-trees rooted at each vertex of a strong digraph.
pub fn daniels_tree_scores(g: &WeightedDigraph) -> Result<ScoreVector> {
    if !g.is_strongly_connected() {
        return Err(Error::NotStronglyConnected);
    }
    let l = g.laplacian();
    let n = g.n();
    let values = (0..n)
        .map(|j| {
            let minor = l.matrix().clone().remove_row(j).remove_column(j);
            minor.determinant().max(0.0)
        })
        .collect();
    Ok(ScoreVector {
        values,
        method: ScoreMethod::DanielsTree,
        param: None,
    })
}

/// `J'(tau) s`, where `J'` is the parametric matrix of the symmetrized digraph
/// and `s_i` is the out-strength minus the in-strength of `i` in `g`.
pub fn borda_scores(g: &WeightedDigraph, tau: f64) -> Result<ScoreVector> {
    check_tau(tau)?;
    let j = ForestExpansion::of_graph(&g.symmetrized())?.j_of_tau(tau)?.j_matrix;
    let s = Matrix::from_iterator(g.n(), 1, (0..g.n()).map(|i| g.out_strength(i) - g.in_strength(i)));
    Ok(ScoreVector {
        values: (j * s).iter().copied().collect(),
        method: ScoreMethod::Borda,
        param: Some(tau),
    })
}

pub fn rank(scores: &ScoreVector) -> RankingReport {
    rank_values(&scores.values)
}

pub fn rank_values(values: &[f64]) -> RankingReport {
    let scale = values.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let norm: Vec<f64> = values
        .iter()
        .map(|x| if scale > 0.0 { x / scale } else { 0.0 })
        .collect();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| norm[b].total_cmp(&norm[a]).then(a.cmp(&b)));

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match groups.last_mut() {
            Some(group) if norm[group[0]] - norm[v] <= TIE_TOL => group.push(v),
            _ => groups.push(vec![v]),
        }
    }
    for group in &mut groups {
        group.sort_unstable();
    }
    RankingReport {
        ordering: groups.iter().flatten().copied().collect(),
        tie_groups: groups.into_iter().filter(|g| g.len() > 1).collect(),
    }
}
