//! Forest coefficients `sigma_k`, forest matrices `Q_k`, and the matrices
//! derived from them: the parametric `J(tau) = (I + tau L)^-1`, the
//! normalized `J_k`, and the limiting matrix of maximum out-forests.
//!
//! `sigma_k` is the total weight of spanning out-forests with `k` arcs and
//! `Q_k[i][j]` the weight of those in which `j` lies in the tree rooted at
//! `i`. Both are produced by the trace recurrence
//!
//! ```text
//! sigma_k = tr(L Q_{k-1}) / k,    Q_k = sigma_k I - L Q_{k-1},
//! ```
//!
//! starting from `sigma_0 = 1`, `Q_0 = I` and stopping at `k = n - d'`, the
//! size of a maximum out-forest.

use crate::digraph::{LaplacianMatrix, WeightedDigraph};
use crate::error::{Error, Result};
use crate::linalg::{max_abs, max_abs_diff};
use crate::Matrix;

/// Relative threshold below which a computed `sigma_k` counts as negative.
const NEGATIVE_SIGMA_TOL: f64 = 1e-9;
/// Relative size the first vanishing `Q_k` may reach before the expansion is rejected.
const SENTINEL_TOL: f64 = 1e-9;
/// Agreement required between the two evaluations of a dense-forest measure.
const DENSE_AGREEMENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ForestExpansion {
    n: usize,
    d_prime: usize,
    /// `sigma[0..=n]`, zero past `n - d'`.
    sigma: Vec<f64>,
    /// `Q_0..=Q_{n-d'}`.
    q: Vec<Matrix>,
}

impl ForestExpansion {
    /// Runs the trace recurrence on `l` up to `k = n - d_prime`.
    pub fn compute(l: &LaplacianMatrix, d_prime: usize) -> Result<Self> {
        let n = l.n();
        if d_prime == 0 || d_prime > n {
            return Err(Error::InvalidParameter(format!(
                "out-forest dimension must lie in 1..={n}, got {d_prime}"
            )));
        }
        let top = n - d_prime;
        let lm = exact_laplacian(l.matrix());

        let mut sigma = vec![0.0; n + 1];
        sigma[0] = 1.0;
        let mut q = Vec::with_capacity(top + 1);
        q.push(Matrix::identity(n, n));
        let mut current = DdMatrix::identity(n);
        for (k, slot) in sigma.iter_mut().enumerate().take(top + 1).skip(1) {
            let (s, next) = current.step(&lm, k);
            *slot = s.value();
            q.push(next.rounded());
            current = next;
        }

        if let Some(k) = (0..=top).find(|&k| !sigma[k].is_finite() || q[k].iter().any(|x| !x.is_finite())) {
            return Err(Error::NumericalBreakdown(format!(
                "sigma_{k} or Q_{k} overflows the double range; rescale the weights"
            )));
        }
        let largest = sigma.iter().copied().fold(0.0, f64::max);
        if let Some(k) = sigma.iter().position(|&s| s < -NEGATIVE_SIGMA_TOL * largest) {
            return Err(Error::NumericalBreakdown(format!(
                "sigma_{k} = {} is negative",
                sigma[k]
            )));
        }
        if sigma[top] <= NEGATIVE_SIGMA_TOL * largest {
            return Err(Error::NumericalBreakdown(format!(
                "sigma_{top} = {} vanishes; the out-forest dimension {d_prime} is inconsistent with L",
                sigma[top]
            )));
        }

        // Q_{top+1} vanishes analytically; a large residue signals conditioning trouble.
        let next = current.step(&lm, top + 1).1.rounded();
        let residue = max_abs(&next);
        let allowed = SENTINEL_TOL * sigma[top] * l.scale() * n as f64;
        if residue > allowed {
            return Err(Error::NumericalBreakdown(format!(
                "Q_{} has residue {residue:e}, above {allowed:e}",
                top + 1
            )));
        }

        Ok(Self { n, d_prime, sigma, q })
    }

    /// Expansion of a digraph, with `d'` taken from its source knots.
    pub fn of_graph(g: &WeightedDigraph) -> Result<Self> {
        Self::compute(&g.laplacian(), g.strong_components().d_prime)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d_prime(&self) -> usize {
        self.d_prime
    }

    /// Number of arcs in a maximum out-forest, `n - d'`.
    pub fn max_forest_size(&self) -> usize {
        self.n - self.d_prime
    }

    /// `sigma_0..=sigma_n` indexed by arc count.
    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// `sigma_0..=sigma_{n-d'}`, the nonzero part.
    pub fn sigma_nonzero(&self) -> &[f64] {
        &self.sigma[..=self.max_forest_size()]
    }

    /// Forest weight indexed by tree count: `sigma_(k) = sigma_{n-k}` for `1 <= k <= n`.
    pub fn sigma_by_trees(&self, trees: usize) -> Option<f64> {
        (1..=self.n).contains(&trees).then(|| self.sigma[self.n - trees])
    }

    /// `Q_k`, or `None` past the maximum forest size (where it is zero).
    pub fn q(&self, k: usize) -> Option<&Matrix> {
        self.q.get(k)
    }

    pub fn q_matrices(&self) -> &[Matrix] {
        &self.q
    }

    /// `sigma(tau) = sum_k sigma_k tau^k`, which equals `det(I + tau L)`.
    pub fn sigma_of_tau(&self, tau: f64) -> f64 {
        self.sigma_nonzero().iter().rev().fold(0.0, |acc, s| acc * tau + s)
    }

    /// `Q(tau) = sum_k Q_k tau^k`, which equals `adj(I + tau L)`.
    pub fn q_of_tau(&self, tau: f64) -> Matrix {
        let mut acc = Matrix::zeros(self.n, self.n);
        for qk in self.q.iter().rev() {
            acc = acc * tau + qk;
        }
        acc
    }

    /// `J(tau) = Q(tau) / sigma(tau)`.
    pub fn j_of_tau(&self, tau: f64) -> Result<ParametricProximity> {
        check_tau(tau)?;
        let sigma_tau = self.sigma_of_tau(tau);
        let j_matrix = self.q_of_tau(tau) / sigma_tau;
        Ok(ParametricProximity {
            tau,
            j_matrix,
            sigma_tau,
        })
    }

    /// `J_k = Q_k / sigma_k`.
    pub fn j_k(&self, k: usize) -> Result<Matrix> {
        let max = self.max_forest_size();
        if k > max {
            return Err(Error::IndexBeyondMaxForest { k, max });
        }
        let s = self.sigma[k];
        if s <= 0.0 {
            return Err(Error::ZeroSigma(k));
        }
        Ok(&self.q[k] / s)
    }

    /// The stochastic matrix of maximum out-forests, `J_{n-d'}`.
    pub fn j_tilde(&self) -> LimitingMatrix {
        let top = self.max_forest_size();
        LimitingMatrix {
            j_tilde: &self.q[top] / self.sigma[top],
        }
    }
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "tau must be positive and finite, got {tau}"
        )))
    }
}

/// `J(tau)` together with its normalizer.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricProximity {
    pub tau: f64,
    /// Column-stochastic `(I + tau L)^-1`.
    pub j_matrix: Matrix,
    pub sigma_tau: f64,
}

/// The limiting matrix `J~`: idempotent, column-stochastic, annihilated by `L`
/// on both sides, of rank `d'`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitingMatrix {
    pub j_tilde: Matrix,
}

impl LimitingMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.j_tilde
    }

    pub fn n(&self) -> usize {
        self.j_tilde.nrows()
    }
}

/// Upper limit on `alpha` for the dense out-forest measure: `sigma_(d') / sigma_(d'+1)`.
pub fn dense_alpha_bound(exp: &ForestExpansion) -> Result<f64> {
    let top = exp.max_forest_size();
    if top == 0 {
        return Err(Error::UndefinedBound);
    }
    Ok(exp.sigma[top] / exp.sigma[top - 1])
}

/// The dense out-forest measure `(I + alpha J~)^-1`.
///
/// Computed both by inversion and by the closed form `I - alpha/(1+alpha) J~`
/// that idempotence of `J~` gives; the two must agree.
pub fn dense_forest_measure(jt: &LimitingMatrix, exp: &ForestExpansion, alpha: f64) -> Result<Matrix> {
    let bound = dense_alpha_bound(exp)?;
    if !(alpha > 0.0 && alpha < bound) {
        return Err(Error::AlphaOutOfBounds { alpha, bound });
    }
    let n = jt.n();
    let identity = Matrix::identity(n, n);
    let closed = &identity - jt.matrix() * (alpha / (1.0 + alpha));
    let inverted = (&identity + jt.matrix() * alpha)
        .try_inverse()
        .ok_or_else(|| Error::NumericalBreakdown("I + alpha J~ is singular".into()))?;
    let gap = max_abs_diff(&closed, &inverted);
    if gap > DENSE_AGREEMENT_TOL {
        return Err(Error::NumericalBreakdown(format!(
            "dense-forest inversion and closed form differ by {gap:e}"
        )));
    }
    Ok(closed)
}

/// Unevaluated sum `hi + lo` carrying about twice the precision of `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }

    fn renormalized(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        Dd {
            hi: s,
            lo: lo - (s - hi),
        }
    }

    fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let (t, f) = two_sum(self.lo, other.lo);
        let e = e + t;
        let (s, e) = (s + e, e - ((s + e) - s));
        Dd::renormalized(s, e + f)
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn mul(self, other: Dd) -> Dd {
        let p = self.hi * other.hi;
        let e = self.hi.mul_add(other.hi, -p) + (self.hi * other.lo + self.lo * other.hi);
        Dd::renormalized(p, e)
    }

    fn div_f64(self, d: f64) -> Dd {
        let q = self.hi / d;
        let r = self.add(Dd::from(q).mul(Dd::from(d)).neg());
        Dd::renormalized(q, r.value() / d)
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Row-major square matrix of [`Dd`] entries.
struct DdMatrix {
    n: usize,
    data: Vec<Dd>,
}

impl DdMatrix {
    fn identity(n: usize) -> Self {
        let mut data = vec![Dd::ZERO; n * n];
        for i in 0..n {
            data[i * n + i] = Dd::from(1.0);
        }
        DdMatrix { n, data }
    }

    /// One step of the recurrence: `(sigma_k, Q_k)` from `Q_{k-1}`.
    fn step(&self, l: &DdMatrix, k: usize) -> (Dd, DdMatrix) {
        let n = self.n;
        let mut lq = vec![Dd::ZERO; n * n];
        for i in 0..n {
            for m in 0..n {
                let a = l.data[i * n + m];
                if a.hi == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let cell = &mut lq[i * n + j];
                    *cell = cell.add(a.mul(self.data[m * n + j]));
                }
            }
        }
        let trace = (0..n).fold(Dd::ZERO, |acc, i| acc.add(lq[i * n + i]));
        let s = trace.div_f64(k as f64);
        let mut data: Vec<Dd> = lq.into_iter().map(Dd::neg).collect();
        for i in 0..n {
            data[i * n + i] = data[i * n + i].add(s);
        }
        (s, DdMatrix { n, data })
    }

    fn rounded(&self) -> Matrix {
        Matrix::from_fn(self.n, self.n, |i, j| self.data[i * self.n + j].value())
    }
}

/// `l` in extended precision, with each diagonal entry replaced by the exact
/// negated sum of its column's off-diagonal entries when `l` is a column
/// Laplacian up to rounding.
fn exact_laplacian(l: &Matrix) -> DdMatrix {
    let n = l.nrows();
    let mut data: Vec<Dd> = (0..n * n).map(|idx| Dd::from(l[(idx / n, idx % n)])).collect();
    for j in 0..n {
        let mut sum = Dd::ZERO;
        let mut magnitude = 0.0;
        for i in (0..n).filter(|&i| i != j) {
            sum = sum.add(Dd::from(l[(i, j)]).neg());
            magnitude += l[(i, j)].abs();
        }
        if (sum.value() - l[(j, j)]).abs() <= 4.0 * f64::EPSILON * magnitude {
            data[j * n + j] = sum;
        }
    }
    DdMatrix { n, data }
}
