//! Markov chains inversely corresponding to a digraph, their Cesaro limits,
//! and a Monte Carlo model of information dissemination along forests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::digraph::WeightedDigraph;
use crate::error::{Error, Result};
use crate::forest::ForestExpansion;
use crate::linalg::{max_abs_diff, row_sums};
use crate::oracle::{enumerate_out_forests, DEFAULT_ENUMERATION_CAP};
use crate::ranking::{ScoreMethod, ScoreVector};
use crate::Matrix;

pub const DEFAULT_MAX_ITERS: usize = 200;
pub const DEFAULT_TOL: f64 = 1e-12;

/// A row-stochastic chain with `I - P = alpha L^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    pub p: Matrix,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CesaroResult {
    pub pi: Matrix,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

impl CesaroResult {
    pub fn into_result(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                residual: self.residual,
                iterations: self.iterations,
            })
        }
    }
}

/// Largest admissible `alpha`, or `None` for an arcless digraph.
pub fn max_alpha(g: &WeightedDigraph) -> Option<f64> {
    let l_max = (0..g.n()).map(|i| g.in_strength(i)).fold(0.0, f64::max);
    (l_max > 0.0).then(|| 1.0 / l_max)
}

/// `P = I - alpha L^T`; `alpha` defaults to half of its maximum.
pub fn inverse_chain(g: &WeightedDigraph, alpha: Option<f64>) -> Result<MarkovChain> {
    let bound = max_alpha(g);
    let alpha = match alpha {
        Some(a) if !(a.is_finite() && a > 0.0) => {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {a}")))
        }
        Some(a) => {
            if let Some(max) = bound {
                if a > max * (1.0 + 1e-12) {
                    return Err(Error::AlphaTooLarge { alpha: a, max });
                }
            }
            a
        }
        None => bound.map_or(1.0, |m| m / 2.0),
    };
    let n = g.n();
    let l = g.laplacian();
    let mut p = Matrix::identity(n, n) - l.matrix().transpose() * alpha;
    // clear rounding residue at the admissible boundary
    p.iter_mut().for_each(|x| *x = x.max(0.0));
    Ok(MarkovChain { p, alpha })
}

/// Cesaro limit of the powers of `chain.p`.
///
/// Squares the lazy chain `(I + P) / 2`, whose powers converge to the same
/// limit, until successive iterates differ by at most `tol` and the result is
/// invariant under `P` within `tol`. `iterations` counts squarings.
pub fn cesaro_limit(chain: &MarkovChain, max_iters: usize, tol: f64) -> CesaroResult {
    let n = chain.p.nrows();
    let mut a = (Matrix::identity(n, n) + &chain.p) * 0.5;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iters {
        let next = &a * &a;
        let step = max_abs_diff(&next, &a);
        a = next;
        iterations += 1;
        residual = step.max(max_abs_diff(&(&a * &chain.p), &a));
        if residual <= tol {
            break;
        }
    }
    CesaroResult {
        converged: residual <= tol,
        pi: a,
        iterations,
        residual,
    }
}

/// The literal running average `(1/m) sum_{k<m} P^k`.
///
/// Stops once two consecutive steps change the average by at most `tol`, since
/// a single step can vanish by coincidence. Converges like `1/m`; kept for
/// cross-checking [`cesaro_limit`].
pub fn cesaro_average(chain: &MarkovChain, max_iters: usize, tol: f64) -> CesaroResult {
    let n = chain.p.nrows();
    let mut power = Matrix::identity(n, n);
    let mut sum = Matrix::zeros(n, n);
    let mut prev = Matrix::identity(n, n);
    let mut residual = f64::INFINITY;
    let mut last_step = f64::INFINITY;
    let mut m = 0;
    while m < max_iters {
        sum += &power;
        m += 1;
        let avg = &sum / m as f64;
        if m > 1 {
            let step = max_abs_diff(&avg, &prev);
            residual = step.max(last_step);
            last_step = step;
        }
        prev = avg;
        if residual <= tol {
            break;
        }
        power = &power * &chain.p;
    }
    CesaroResult {
        converged: residual <= tol,
        pi: prev,
        iterations: m,
        residual,
    }
}

/// `max|Cesaro(P) - J~^T|` for the chain inversely corresponding to `g`.
pub fn cesaro_deviation(g: &WeightedDigraph, alpha: Option<f64>, max_iters: usize, tol: f64) -> Result<f64> {
    let chain = inverse_chain(g, alpha)?;
    let pi = cesaro_limit(&chain, max_iters, tol).into_result()?.pi;
    let jt = ForestExpansion::of_graph(g)?.j_tilde();
    Ok(max_abs_diff(&pi, &jt.matrix().transpose()))
}

/// Limiting state distribution from the uniform initial distribution.
pub fn uniform_start_limit(g: &WeightedDigraph, alpha: Option<f64>) -> Result<ScoreVector> {
    let chain = inverse_chain(g, alpha)?;
    let pi = cesaro_limit(&chain, DEFAULT_MAX_ITERS, DEFAULT_TOL).into_result()?.pi;
    let n = g.n() as f64;
    Ok(ScoreVector {
        values: pi.column_iter().map(|c| c.sum() / n).collect(),
        method: ScoreMethod::UniformStartLimit,
        param: Some(chain.alpha),
    })
}

/// Row sums of a chain or Cesaro matrix, for stochasticity checks.
pub fn stochasticity_error(m: &Matrix) -> f64 {
    row_sums(m).iter().fold(0.0, |acc, s| acc.max((s - 1.0).abs()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisseminationEstimate {
    /// `estimate[(i, j)]` estimates the probability that `j` received from root `i`.
    pub estimate: Matrix,
    pub std_error: Matrix,
    pub trials: usize,
    /// Trials whose plan transmitted successfully.
    pub accepted: usize,
    pub seed: u64,
}

/// Draws plans uniformly among spanning out-forests, lets each plan arc
/// succeed with probability equal to its weight, and records the root that
/// reached each vertex in the trials where every plan arc succeeded.
pub fn simulate_dissemination(g: &WeightedDigraph, trials: usize, seed: u64) -> Result<DisseminationEstimate> {
    if let Some(a) = g.arcs().find(|a| a.weight > 1.0) {
        return Err(Error::WeightAboveOne {
            tail: a.tail + 1,
            head: a.head + 1,
            weight: a.weight,
        });
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let forests = enumerate_out_forests(g, DEFAULT_ENUMERATION_CAP)?;
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; n * n];
    let mut accepted = 0usize;
    for _ in 0..trials {
        let forest = &forests[rng.random_range(0..forests.len())];
        // every arc is drawn so the stream does not depend on early exits
        let mut ok = true;
        for &(t, h) in &forest.arcs {
            ok &= rng.random::<f64>() < g.weight(t, h);
        }
        if ok {
            accepted += 1;
            for j in 0..n {
                counts[forest.tree_of[j] * n + j] += 1;
            }
        }
    }
    let mut estimate = Matrix::zeros(n, n);
    let mut std_error = Matrix::zeros(n, n);
    if accepted > 0 {
        let m = accepted as f64;
        for i in 0..n {
            for j in 0..n {
                let p = counts[i * n + j] as f64 / m;
                estimate[(i, j)] = p;
                std_error[(i, j)] = (p * (1.0 - p) / m).sqrt();
            }
        }
    }
    Ok(DisseminationEstimate {
        estimate,
        std_error,
        trials,
        accepted,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cycle() -> WeightedDigraph {
        WeightedDigraph::build(2, &[(1, 2, 2.0), (2, 1, 1.0)]).unwrap()
    }

    fn path() -> WeightedDigraph {
        WeightedDigraph::build(3, &[(1, 2, 1.0), (2, 3, 1.0)]).unwrap()
    }

    fn fork() -> WeightedDigraph {
        WeightedDigraph::build(3, &[(1, 3, 1.0), (2, 3, 1.0)]).unwrap()
    }

    #[test]
    fn chain_examples() {
        let c = inverse_chain(&two_cycle(), Some(0.25)).unwrap();
        assert_eq!(c.p, Matrix::from_row_slice(2, 2, &[0.75, 0.25, 0.5, 0.5]));
        let arcless = WeightedDigraph::arcless(3).unwrap();
        assert_eq!(inverse_chain(&arcless, Some(7.0)).unwrap().p, Matrix::identity(3, 3));
        assert_eq!(inverse_chain(&arcless, None).unwrap().alpha, 1.0);
        let c = inverse_chain(&path(), Some(0.5)).unwrap();
        assert_eq!(c.p.row(2).iter().copied().collect::<Vec<_>>(), vec![0.0, 0.5, 0.5]);
        assert!(matches!(
            inverse_chain(&two_cycle(), Some(0.6)),
            Err(Error::AlphaTooLarge { .. })
        ));
        assert!(inverse_chain(&two_cycle(), Some(0.0)).is_err());
        let c = inverse_chain(&two_cycle(), None).unwrap();
        assert_eq!(c.alpha, 0.25);
        assert!(stochasticity_error(&c.p) < 1e-12);
    }

    #[test]
    fn cesaro_examples() {
        let c = inverse_chain(&two_cycle(), Some(0.25)).unwrap();
        let r = cesaro_limit(&c, DEFAULT_MAX_ITERS, 1e-12);
        assert!(r.converged);
        for i in 0..2 {
            assert!((r.pi[(i, 0)] - 2.0 / 3.0).abs() < 1e-9);
        }
        let id = MarkovChain {
            p: Matrix::identity(3, 3),
            alpha: 1.0,
        };
        let r = cesaro_limit(&id, 10, 1e-12);
        assert_eq!(r.pi, Matrix::identity(3, 3));
        assert_eq!(r.iterations, 1);
        let r = cesaro_limit(&inverse_chain(&path(), None).unwrap(), DEFAULT_MAX_ITERS, 1e-12);
        for i in 0..3 {
            assert!((r.pi[(i, 0)] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn averaged_route_agrees() {
        let c = inverse_chain(&two_cycle(), Some(0.5)).unwrap();
        let avg = cesaro_average(&c, 200_000, 1e-10);
        let fast = cesaro_limit(&c, DEFAULT_MAX_ITERS, 1e-12);
        assert!(max_abs_diff(&avg.pi, &fast.pi) < 1e-4);
    }

    #[test]
    fn nonconvergence_is_flagged() {
        let c = inverse_chain(&path(), None).unwrap();
        let r = cesaro_limit(&c, 1, 1e-15);
        assert!(!r.converged);
        assert!(matches!(r.into_result(), Err(Error::NotConverged { .. })));
    }

    #[test]
    fn cesaro_deviation_examples() {
        assert!(cesaro_deviation(&two_cycle(), None, DEFAULT_MAX_ITERS, 1e-12).unwrap() < 1e-6);
        let arcless = WeightedDigraph::arcless(2).unwrap();
        assert_eq!(cesaro_deviation(&arcless, None, DEFAULT_MAX_ITERS, 1e-12).unwrap(), 0.0);
        let chain = inverse_chain(&fork(), None).unwrap();
        let pi = cesaro_limit(&chain, DEFAULT_MAX_ITERS, 1e-12).pi;
        assert!((pi[(2, 0)] - 0.5).abs() < 1e-9 && (pi[(2, 1)] - 0.5).abs() < 1e-9);
        assert!(cesaro_deviation(&fork(), None, DEFAULT_MAX_ITERS, 1e-12).unwrap() < 1e-6);
    }

    #[test]
    fn uniform_start_examples() {
        let s = uniform_start_limit(&fork(), None).unwrap();
        assert!((s.values[0] - 0.5).abs() < 1e-9 && s.values[2].abs() < 1e-9);
        let s = uniform_start_limit(&two_cycle(), None).unwrap();
        assert!((s.values[0] - 2.0 / 3.0).abs() < 1e-9);
        let s = uniform_start_limit(&WeightedDigraph::arcless(4).unwrap(), None).unwrap();
        assert!(s.values.iter().all(|v| (v - 0.25).abs() < 1e-12));
    }

    #[test]
    fn dissemination_examples() {
        let g = WeightedDigraph::build(2, &[(1, 2, 0.5)]).unwrap();
        let est = simulate_dissemination(&g, 100_000, 7).unwrap();
        let want = 1.0 / 3.0;
        assert!((est.estimate[(0, 1)] - want).abs() <= 3.0 * est.std_error[(0, 1)].max(1e-3));
        assert_eq!(est, simulate_dissemination(&g, 100_000, 7).unwrap());

        let arcless = WeightedDigraph::arcless(3).unwrap();
        let est = simulate_dissemination(&arcless, 1000, 1).unwrap();
        assert_eq!(est.estimate, Matrix::identity(3, 3));
        assert_eq!(est.accepted, 1000);

        let est = simulate_dissemination(&path(), 20_000, 3).unwrap();
        assert_eq!(est.accepted, 20_000);

        assert!(matches!(
            simulate_dissemination(&two_cycle(), 10, 0),
            Err(Error::WeightAboveOne { .. })
        ));
    }
}
