//! Forest-based accessibility measures and executable checks of the
//! conditions a vertex accessibility measure is expected to satisfy.
//!
//! `p[i][j]` is read as the accessibility of `j` from `i`. Checks return a
//! [`CheckOutcome`] that separates cases where a strict inequality only holds
//! with equality (`boundary`) from genuine violations.

use std::fmt;

use crate::digraph::WeightedDigraph;
use crate::error::{Error, Result};
use crate::forest::{dense_forest_measure, ForestExpansion};
use crate::linalg::max_abs;
use crate::Matrix;

/// Entries at or below this magnitude count as zero.
pub const ZERO_TOL: f64 = 1e-12;
/// Strict inequalities need a gap above this, times `max(1, max|p_ij|)`.
pub const STRICT_MARGIN: f64 = 1e-9;
/// Largest digraph the convexity path search will accept.
pub const CONVEXITY_MAX_N: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Out,
    In,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    Out,
    In,
    LimitingOut,
    LimitingIn,
    DenseOut,
}

impl MeasureKind {
    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::Out => "out",
            MeasureKind::In => "in",
            MeasureKind::LimitingOut => "limiting_out",
            MeasureKind::LimitingIn => "limiting_in",
            MeasureKind::DenseOut => "dense_out",
        }
    }
}

/// An accessibility matrix tagged with the measure that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct AccessibilityMatrix {
    pub p: Matrix,
    pub kind: MeasureKind,
    /// `tau` for parametric measures, `alpha` for the dense measure.
    pub param: Option<f64>,
}

/// A measure together with its parameter, re-evaluable on any digraph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measure {
    Out { tau: f64 },
    In { tau: f64 },
    LimitingOut,
    LimitingIn,
    DenseOut { alpha: f64 },
}

impl Measure {
    pub fn evaluate(&self, g: &WeightedDigraph) -> Result<AccessibilityMatrix> {
        match *self {
            Measure::Out { tau } => access_out(g, tau),
            Measure::In { tau } => access_in(g, tau),
            Measure::LimitingOut => access_limiting(g, Direction::Out),
            Measure::LimitingIn => access_limiting(g, Direction::In),
            Measure::DenseOut { alpha } => access_dense_out(g, alpha),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Out { tau } => write!(f, "out(tau={tau})"),
            Measure::In { tau } => write!(f, "in(tau={tau})"),
            Measure::LimitingOut => write!(f, "limiting_out"),
            Measure::LimitingIn => write!(f, "limiting_in"),
            Measure::DenseOut { alpha } => write!(f, "dense_out(alpha={alpha})"),
        }
    }
}

/// `P_tau^out = J(tau) = (I + tau L)^-1`.
pub fn access_out(g: &WeightedDigraph, tau: f64) -> Result<AccessibilityMatrix> {
    let j = ForestExpansion::of_graph(g)?.j_of_tau(tau)?;
    Ok(AccessibilityMatrix {
        p: j.j_matrix,
        kind: MeasureKind::Out,
        param: Some(tau),
    })
}

/// `P_tau^in`, the dual of `P_tau^out`: the transpose of `P_tau^out` of the reversed digraph.
pub fn access_in(g: &WeightedDigraph, tau: f64) -> Result<AccessibilityMatrix> {
    let out = access_out(&g.reverse(), tau)?;
    Ok(AccessibilityMatrix {
        p: out.p.transpose(),
        kind: MeasureKind::In,
        param: Some(tau),
    })
}

/// The limiting measures: `J~` for `Out`, the transposed `J~` of the reversed digraph for `In`.
pub fn access_limiting(g: &WeightedDigraph, direction: Direction) -> Result<AccessibilityMatrix> {
    Ok(match direction {
        Direction::Out => AccessibilityMatrix {
            p: ForestExpansion::of_graph(g)?.j_tilde().j_tilde,
            kind: MeasureKind::LimitingOut,
            param: None,
        },
        Direction::In => AccessibilityMatrix {
            p: ForestExpansion::of_graph(&g.reverse())?.j_tilde().j_tilde.transpose(),
            kind: MeasureKind::LimitingIn,
            param: None,
        },
    })
}

/// The dense out-forest measure `(I + alpha J~)^-1`.
pub fn access_dense_out(g: &WeightedDigraph, alpha: f64) -> Result<AccessibilityMatrix> {
    let exp = ForestExpansion::of_graph(g)?;
    let p = dense_forest_measure(&exp.j_tilde(), &exp, alpha)?;
    Ok(AccessibilityMatrix {
        p,
        kind: MeasureKind::DenseOut,
        param: Some(alpha),
    })
}

/// Which half of the reachability condition to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReachPart {
    /// `p_ij = 0` implies `j` is unreachable from `i`.
    ZeroImpliesUnreachable,
    /// `j` unreachable from `i` implies `p_ij = 0`.
    UnreachableImpliesZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    Nonnegativity,
    Reachability(ReachPart),
    SelfAccessibility(Variant),
    Triangle(Variant),
    Transit(Variant),
    /// `Delta p_kt > 0` after raising `w_kt`.
    MonotonicityIncrease,
    /// The two cutpoint comparisons shared by both variants.
    MonotonicityCutpoint,
    MonotonicityTransfer(Variant),
    Convexity(Variant),
}

impl Condition {
    /// Every condition, in report order.
    pub const ALL: [Condition; 15] = [
        Condition::Nonnegativity,
        Condition::Reachability(ReachPart::ZeroImpliesUnreachable),
        Condition::Reachability(ReachPart::UnreachableImpliesZero),
        Condition::SelfAccessibility(Variant::A),
        Condition::SelfAccessibility(Variant::B),
        Condition::Triangle(Variant::A),
        Condition::Triangle(Variant::B),
        Condition::Transit(Variant::A),
        Condition::Transit(Variant::B),
        Condition::MonotonicityIncrease,
        Condition::MonotonicityCutpoint,
        Condition::MonotonicityTransfer(Variant::A),
        Condition::MonotonicityTransfer(Variant::B),
        Condition::Convexity(Variant::A),
        Condition::Convexity(Variant::B),
    ];

    pub fn variant(self) -> Option<Variant> {
        match self {
            Condition::SelfAccessibility(v)
            | Condition::Triangle(v)
            | Condition::Transit(v)
            | Condition::MonotonicityTransfer(v)
            | Condition::Convexity(v) => Some(v),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Condition::Nonnegativity => "nonnegativity",
            Condition::Reachability(ReachPart::ZeroImpliesUnreachable) => "reachability_zero_implies_unreachable",
            Condition::Reachability(ReachPart::UnreachableImpliesZero) => "reachability_unreachable_implies_zero",
            Condition::SelfAccessibility(Variant::A) => "self_accessibility_a",
            Condition::SelfAccessibility(Variant::B) => "self_accessibility_b",
            Condition::Triangle(Variant::A) => "triangle_a",
            Condition::Triangle(Variant::B) => "triangle_b",
            Condition::Transit(Variant::A) => "transit_a",
            Condition::Transit(Variant::B) => "transit_b",
            Condition::MonotonicityIncrease => "monotonicity_increase",
            Condition::MonotonicityCutpoint => "monotonicity_cutpoint",
            Condition::MonotonicityTransfer(Variant::A) => "monotonicity_transfer_a",
            Condition::MonotonicityTransfer(Variant::B) => "monotonicity_transfer_b",
            Condition::Convexity(Variant::A) => "convexity_a",
            Condition::Convexity(Variant::B) => "convexity_b",
        }
    }

    fn has_strict_form(self) -> bool {
        !matches!(
            self,
            Condition::Nonnegativity | Condition::Reachability(_) | Condition::Triangle(_)
        )
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An arc weight increase `w_tail,head += delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    pub tail: usize,
    pub head: usize,
    pub delta: f64,
}

/// The vertices and values at which a condition was evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub vertices: Vec<usize>,
    /// The two sides of the inequality, or the offending entry.
    pub values: Vec<f64>,
    pub perturbation: Option<Perturbation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// Holds only after relaxing strict inequalities.
    PassNonstrictOnly,
    Fail,
    NotEvaluated,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::PassNonstrictOnly => "pass_nonstrict_only",
            Verdict::Fail => "fail",
            Verdict::NotEvaluated => "not_evaluated",
        }
    }
}

/// Classification of a single case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseClass {
    Holds,
    /// A strict inequality that holds only with equality.
    Boundary,
    Violated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub condition: Condition,
    /// Number of cases where the premise applied.
    pub cases: usize,
    pub boundary: Option<Witness>,
    pub violation: Option<Witness>,
}

impl CheckOutcome {
    fn new(condition: Condition) -> Self {
        Self {
            condition,
            cases: 0,
            boundary: None,
            violation: None,
        }
    }

    fn record(&mut self, class: CaseClass, witness: impl FnOnce() -> Witness) {
        self.cases += 1;
        match class {
            CaseClass::Holds => {}
            CaseClass::Boundary => {
                if self.boundary.is_none() {
                    self.boundary = Some(witness());
                }
            }
            CaseClass::Violated => {
                if self.violation.is_none() {
                    self.violation = Some(witness());
                }
            }
        }
    }

    fn merge(&mut self, other: CheckOutcome) {
        self.cases += other.cases;
        if self.boundary.is_none() {
            self.boundary = other.boundary;
        }
        if self.violation.is_none() {
            self.violation = other.violation;
        }
    }

    pub fn verdict(&self) -> Verdict {
        if self.violation.is_some() {
            Verdict::Fail
        } else if self.boundary.is_some() {
            Verdict::PassNonstrictOnly
        } else {
            Verdict::Pass
        }
    }

    /// Whether the condition holds in its strict (`strict = true`) or nonstrict form.
    pub fn passes(&self, strict: bool) -> bool {
        self.violation.is_none() && (!strict || self.boundary.is_none())
    }

    /// The first case that breaks the requested form.
    pub fn witness(&self, strict: bool) -> Option<&Witness> {
        self.violation
            .as_ref()
            .or(if strict { self.boundary.as_ref() } else { None })
    }
}

fn margin(p: &Matrix) -> f64 {
    STRICT_MARGIN * max_abs(p).max(1.0)
}

/// `lhs > rhs` with a tolerance band classified as boundary.
fn strictly_greater(lhs: f64, rhs: f64, m: f64) -> CaseClass {
    let gap = lhs - rhs;
    if gap > m {
        CaseClass::Holds
    } else if gap >= -m {
        CaseClass::Boundary
    } else {
        CaseClass::Violated
    }
}

fn at_most(lhs: f64, rhs: f64, m: f64) -> CaseClass {
    if lhs <= rhs + m {
        CaseClass::Holds
    } else {
        CaseClass::Violated
    }
}

fn witness(vertices: &[usize], values: &[f64]) -> Witness {
    Witness {
        vertices: vertices.to_vec(),
        values: values.to_vec(),
        perturbation: None,
    }
}

/// `p_ij >= 0` for all `i, j`.
pub fn check_nonnegativity(p: &Matrix) -> CheckOutcome {
    let mut out = CheckOutcome::new(Condition::Nonnegativity);
    for i in 0..p.nrows() {
        for j in 0..p.ncols() {
            let v = p[(i, j)];
            let class = if v >= -ZERO_TOL {
                CaseClass::Holds
            } else {
                CaseClass::Violated
            };
            out.record(class, || witness(&[i, j], &[v]));
        }
    }
    out
}

fn reach_case(p: &Matrix, reach: &[Vec<bool>], part: ReachPart, i: usize, j: usize) -> CaseClass {
    let zero = p[(i, j)].abs() <= ZERO_TOL;
    let reachable = reach[i][j];
    let ok = match part {
        ReachPart::ZeroImpliesUnreachable => !zero || !reachable,
        ReachPart::UnreachableImpliesZero => reachable || zero,
    };
    if ok {
        CaseClass::Holds
    } else {
        CaseClass::Violated
    }
}

/// One half of `p_ij = 0 <=> j unreachable from i`.
pub fn check_reachability(p: &Matrix, g: &WeightedDigraph, part: ReachPart) -> CheckOutcome {
    let reach = g.reachability();
    let mut out = CheckOutcome::new(Condition::Reachability(part));
    for i in 0..g.n() {
        for j in 0..g.n() {
            let class = reach_case(p, &reach, part, i, j);
            out.record(class, || witness(&[i, j], &[p[(i, j)]]));
        }
    }
    out
}

/// (A) `p_ii > p_ij`, (B) `p_ii > p_ji` for distinct `i, j`.
pub fn check_self_accessibility(p: &Matrix, variant: Variant) -> CheckOutcome {
    let m = margin(p);
    let mut out = CheckOutcome::new(Condition::SelfAccessibility(variant));
    let n = p.nrows();
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let other = match variant {
                Variant::A => p[(i, j)],
                Variant::B => p[(j, i)],
            };
            let class = strictly_greater(p[(i, i)], other, m);
            out.record(class, || witness(&[i, j], &[p[(i, i)], other]));
        }
    }
    out
}

fn triangle_sides(p: &Matrix, variant: Variant, i: usize, k: usize, t: usize) -> (f64, f64) {
    match variant {
        Variant::A => (p[(k, i)] - p[(t, i)], p[(k, k)] - p[(t, k)]),
        Variant::B => (p[(i, k)] - p[(i, t)], p[(k, k)] - p[(k, t)]),
    }
}

/// (A) `p_ki - p_ti <= p_kk - p_tk`, (B) `p_ik - p_it <= p_kk - p_kt`,
/// over all ordered triples `(i, k, t)`.
pub fn check_triangle(p: &Matrix, variant: Variant) -> CheckOutcome {
    let m = margin(p);
    let n = p.nrows();
    let mut out = CheckOutcome::new(Condition::Triangle(variant));
    for i in 0..n {
        for k in 0..n {
            for t in 0..n {
                let (lhs, rhs) = triangle_sides(p, variant, i, k, t);
                out.record(at_most(lhs, rhs, m), || witness(&[i, k, t], &[lhs, rhs]));
            }
        }
    }
    out
}

/// Ordered triples `(k, i, t)` where `k` is a cutpoint between `i` and `t`.
fn cutpoint_triples(g: &WeightedDigraph) -> Vec<(usize, usize, usize)> {
    let n = g.n();
    let mut triples = Vec::new();
    for k in 0..n {
        for i in (0..n).filter(|&i| i != k) {
            for t in (0..n).filter(|&t| t != k && t != i) {
                if g.is_cutpoint(k, i, t).expect("distinct in-range vertices") {
                    triples.push((k, i, t));
                }
            }
        }
    }
    triples
}

/// If `k` is a cutpoint between `i` and `t`: (A) `p_ik > p_it`, (B) `p_kt > p_it`.
pub fn check_transit(p: &Matrix, g: &WeightedDigraph, variant: Variant) -> CheckOutcome {
    let m = margin(p);
    let mut out = CheckOutcome::new(Condition::Transit(variant));
    for (k, i, t) in cutpoint_triples(g) {
        let lhs = match variant {
            Variant::A => p[(i, k)],
            Variant::B => p[(k, t)],
        };
        let class = strictly_greater(lhs, p[(i, t)], m);
        out.record(class, || witness(&[k, i, t], &[lhs, p[(i, t)]]));
    }
    out
}

/// Results of one monotonicity perturbation, one outcome per item.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityOutcome {
    pub increase: CheckOutcome,
    pub cutpoint: CheckOutcome,
    pub transfer_a: CheckOutcome,
    pub transfer_b: CheckOutcome,
}

/// Raises `w_kt` by `delta`, recomputes the measure and compares increments.
///
/// 1. `Delta p_kt > 0`;
/// 2. if `t` is a cutpoint between `k` and `i`: `Delta p_ki > Delta p_ti`;
///    if `k` is a cutpoint between `i` and `t`: `Delta p_it > Delta p_ik`;
/// 3. (A) if `t` is a cutpoint between `k` and `i`: `Delta p_kt > Delta p_ki`;
///    (B) if `k` is a cutpoint between `i` and `t`: `Delta p_kt > Delta p_it`.
///
/// Cutpoints are taken in the digraph before the perturbation.
pub fn check_monotonicity(
    measure: &Measure,
    g: &WeightedDigraph,
    perturbation: Perturbation,
) -> Result<MonotonicityOutcome> {
    let before = measure.evaluate(g)?.p;
    let perturbed = g.with_added_weight(perturbation.tail, perturbation.head, perturbation.delta)?;
    let after = measure.evaluate(&perturbed)?.p;
    let delta = &after - &before;
    Ok(monotonicity_from_increments(&delta, g, perturbation))
}

fn monotonicity_from_increments(d: &Matrix, g: &WeightedDigraph, perturbation: Perturbation) -> MonotonicityOutcome {
    let (k, t) = (perturbation.tail, perturbation.head);
    let m = STRICT_MARGIN;
    let w = |vertices: &[usize], values: &[f64]| Witness {
        vertices: vertices.to_vec(),
        values: values.to_vec(),
        perturbation: Some(perturbation),
    };
    let mut increase = CheckOutcome::new(Condition::MonotonicityIncrease);
    let mut cutpoint = CheckOutcome::new(Condition::MonotonicityCutpoint);
    let mut transfer_a = CheckOutcome::new(Condition::MonotonicityTransfer(Variant::A));
    let mut transfer_b = CheckOutcome::new(Condition::MonotonicityTransfer(Variant::B));

    increase.record(strictly_greater(d[(k, t)], 0.0, m), || w(&[k, t], &[d[(k, t)], 0.0]));
    for i in (0..g.n()).filter(|&i| i != k && i != t) {
        if g.is_cutpoint(t, k, i).expect("distinct vertices") {
            cutpoint.record(strictly_greater(d[(k, i)], d[(t, i)], m), || {
                w(&[k, t, i], &[d[(k, i)], d[(t, i)]])
            });
            transfer_a.record(strictly_greater(d[(k, t)], d[(k, i)], m), || {
                w(&[k, t, i], &[d[(k, t)], d[(k, i)]])
            });
        }
        if g.is_cutpoint(k, i, t).expect("distinct vertices") {
            cutpoint.record(strictly_greater(d[(i, t)], d[(i, k)], m), || {
                w(&[k, t, i], &[d[(i, t)], d[(i, k)]])
            });
            transfer_b.record(strictly_greater(d[(k, t)], d[(i, t)], m), || {
                w(&[k, t, i], &[d[(k, t)], d[(i, t)]])
            });
        }
    }
    MonotonicityOutcome {
        increase,
        cutpoint,
        transfer_a,
        transfer_b,
    }
}

/// Searches simple paths `from -> to` along which `f` changes in the required
/// direction at every step.
fn monotone_path_exists(
    g: &WeightedDigraph,
    from: usize,
    to: usize,
    f: &dyn Fn(usize) -> f64,
    step_ok: &dyn Fn(f64, f64) -> bool,
) -> bool {
    fn dfs(
        g: &WeightedDigraph,
        v: usize,
        to: usize,
        on_path: &mut [bool],
        f: &dyn Fn(usize) -> f64,
        step_ok: &dyn Fn(f64, f64) -> bool,
    ) -> bool {
        if v == to {
            return true;
        }
        let fv = f(v);
        for u in g.out_neighbors(v) {
            if !on_path[u] && step_ok(fv, f(u)) {
                on_path[u] = true;
                if dfs(g, u, to, on_path, f, step_ok) {
                    return true;
                }
                on_path[u] = false;
            }
        }
        false
    }
    let mut on_path = vec![false; g.n()];
    on_path[from] = true;
    dfs(g, from, to, &mut on_path, f, step_ok)
}

fn convexity_case(
    p: &Matrix,
    g: &WeightedDigraph,
    variant: Variant,
    k: usize,
    i: usize,
    m: f64,
) -> Option<(CaseClass, [f64; 2])> {
    // (A): premise p_ki > p_ii, path k -> i with p_kj - p_ij decreasing.
    // (B): premise p_ik > p_ii, path i -> k with p_jk - p_ji increasing.
    let (premise, from, to, sign) = match variant {
        Variant::A => (p[(k, i)], k, i, -1.0),
        Variant::B => (p[(i, k)], i, k, 1.0),
    };
    if premise - p[(i, i)] <= m {
        return None;
    }
    // orient both variants so that the tracked value must increase
    let f = move |j: usize| match variant {
        Variant::A => sign * (p[(k, j)] - p[(i, j)]),
        Variant::B => sign * (p[(j, k)] - p[(j, i)]),
    };
    let strict = |a: f64, b: f64| b - a > m;
    let nonstrict = |a: f64, b: f64| b - a >= -m;
    let class = if monotone_path_exists(g, from, to, &f, &strict) {
        CaseClass::Holds
    } else if monotone_path_exists(g, from, to, &f, &nonstrict) {
        CaseClass::Boundary
    } else {
        CaseClass::Violated
    };
    Some((class, [premise, p[(i, i)]]))
}

/// (A) if `p_ki > p_ii` there is a `k -> i` path along which `p_kj - p_ij`
/// strictly decreases; (B) if `p_ik > p_ii` there is an `i -> k` path along
/// which `p_jk - p_ji` strictly increases.
pub fn check_convexity(p: &Matrix, g: &WeightedDigraph, variant: Variant) -> Result<CheckOutcome> {
    if g.n() > CONVEXITY_MAX_N {
        return Err(Error::GraphTooLargeForConvexity {
            n: g.n(),
            max: CONVEXITY_MAX_N,
        });
    }
    let m = margin(p);
    let mut out = CheckOutcome::new(Condition::Convexity(variant));
    for k in 0..g.n() {
        for i in (0..g.n()).filter(|&i| i != k) {
            if let Some((class, values)) = convexity_case(p, g, variant, k, i, m) {
                out.record(class, || witness(&[k, i], &values));
            }
        }
    }
    Ok(out)
}

/// Re-evaluates a single recorded case. `None` means the premise does not apply there.
pub fn recheck(
    condition: Condition,
    measure: &Measure,
    g: &WeightedDigraph,
    witness: &Witness,
) -> Result<Option<CaseClass>> {
    let p = measure.evaluate(g)?.p;
    let m = margin(&p);
    let v = &witness.vertices;
    Ok(match condition {
        Condition::Nonnegativity => Some(if p[(v[0], v[1])] >= -ZERO_TOL {
            CaseClass::Holds
        } else {
            CaseClass::Violated
        }),
        Condition::Reachability(part) => Some(reach_case(&p, &g.reachability(), part, v[0], v[1])),
        Condition::SelfAccessibility(variant) => {
            let (i, j) = (v[0], v[1]);
            let other = match variant {
                Variant::A => p[(i, j)],
                Variant::B => p[(j, i)],
            };
            Some(strictly_greater(p[(i, i)], other, m))
        }
        Condition::Triangle(variant) => {
            let (lhs, rhs) = triangle_sides(&p, variant, v[0], v[1], v[2]);
            Some(at_most(lhs, rhs, m))
        }
        Condition::Transit(variant) => {
            let (k, i, t) = (v[0], v[1], v[2]);
            if !g.is_cutpoint(k, i, t)? {
                return Ok(None);
            }
            let lhs = match variant {
                Variant::A => p[(i, k)],
                Variant::B => p[(k, t)],
            };
            Some(strictly_greater(lhs, p[(i, t)], m))
        }
        Condition::Convexity(variant) => convexity_case(&p, g, variant, v[0], v[1], m).map(|c| c.0),
        Condition::MonotonicityIncrease | Condition::MonotonicityCutpoint | Condition::MonotonicityTransfer(_) => {
            let Some(pert) = witness.perturbation else {
                return Ok(None);
            };
            let outcome = check_monotonicity(measure, g, pert)?;
            let item = match condition {
                Condition::MonotonicityIncrease => outcome.increase,
                Condition::MonotonicityCutpoint => outcome.cutpoint,
                Condition::MonotonicityTransfer(Variant::A) => outcome.transfer_a,
                _ => outcome.transfer_b,
            };
            // find the case with the same vertices and values
            let matches = |w: &Option<Witness>| w.as_ref() == Some(witness);
            if matches(&item.violation) {
                Some(CaseClass::Violated)
            } else if matches(&item.boundary) {
                Some(CaseClass::Boundary)
            } else {
                Some(CaseClass::Holds)
            }
        }
    })
}

/// Default perturbations: every arc raised by half its weight, plus one new
/// arc of weight 1 between the smallest vertices of each ordered pair of
/// distinct source knots.
pub fn default_plan(g: &WeightedDigraph) -> Vec<Perturbation> {
    let mut plan: Vec<Perturbation> = g
        .arcs()
        .map(|a| Perturbation {
            tail: a.tail,
            head: a.head,
            delta: a.weight / 2.0,
        })
        .collect();
    let knots = g.strong_components().source_knots;
    for a in &knots {
        for b in &knots {
            if a != b && !g.has_arc(a[0], b[0]) {
                plan.push(Perturbation {
                    tail: a[0],
                    head: b[0],
                    delta: 1.0,
                });
            }
        }
    }
    plan
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditEntry {
    pub condition: Condition,
    pub verdict: Verdict,
    pub cases: usize,
    /// The first violation, or the first boundary case when nothing is violated.
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub measure: Measure,
    /// One entry per condition, in [`Condition::ALL`] order.
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn entry(&self, condition: Condition) -> &AuditEntry {
        self.entries
            .iter()
            .find(|e| e.condition == condition)
            .expect("every condition is audited")
    }

    pub fn verdict(&self, condition: Condition) -> Verdict {
        self.entry(condition).verdict
    }

    /// Conditions whose verdict differs from what `profile` requires.
    pub fn deviations(&self, profile: Profile) -> Vec<(Condition, Expectation, Verdict)> {
        self.entries
            .iter()
            .filter_map(|e| {
                let want = profile.expectation(e.condition);
                (!want.admits(e.verdict)).then_some((e.condition, want, e.verdict))
            })
            .collect()
    }

    pub fn conforms(&self, profile: Profile) -> bool {
        self.deviations(profile).is_empty()
    }
}

fn entry_from(outcome: CheckOutcome) -> AuditEntry {
    let verdict = if outcome.condition.has_strict_form() || outcome.boundary.is_none() {
        outcome.verdict()
    } else {
        Verdict::Pass
    };
    AuditEntry {
        condition: outcome.condition,
        verdict,
        cases: outcome.cases,
        witness: outcome.violation.or(outcome.boundary),
    }
}

/// Runs every check on `measure` over `g`, with monotonicity driven by `plan`.
pub fn audit(measure: &Measure, g: &WeightedDigraph, plan: &[Perturbation]) -> Result<AuditReport> {
    let p = measure.evaluate(g)?.p;
    let mut increase = CheckOutcome::new(Condition::MonotonicityIncrease);
    let mut cutpoint = CheckOutcome::new(Condition::MonotonicityCutpoint);
    let mut transfer_a = CheckOutcome::new(Condition::MonotonicityTransfer(Variant::A));
    let mut transfer_b = CheckOutcome::new(Condition::MonotonicityTransfer(Variant::B));
    for &pert in plan {
        let perturbed = g.with_added_weight(pert.tail, pert.head, pert.delta)?;
        let delta = &measure.evaluate(&perturbed)?.p - &p;
        let m = monotonicity_from_increments(&delta, g, pert);
        increase.merge(m.increase);
        cutpoint.merge(m.cutpoint);
        transfer_a.merge(m.transfer_a);
        transfer_b.merge(m.transfer_b);
    }

    let mut entries = Vec::with_capacity(Condition::ALL.len());
    for condition in Condition::ALL {
        let outcome = match condition {
            Condition::Nonnegativity => check_nonnegativity(&p),
            Condition::Reachability(part) => check_reachability(&p, g, part),
            Condition::SelfAccessibility(v) => check_self_accessibility(&p, v),
            Condition::Triangle(v) => check_triangle(&p, v),
            Condition::Transit(v) => check_transit(&p, g, v),
            Condition::MonotonicityIncrease => increase.clone(),
            Condition::MonotonicityCutpoint => cutpoint.clone(),
            Condition::MonotonicityTransfer(Variant::A) => transfer_a.clone(),
            Condition::MonotonicityTransfer(Variant::B) => transfer_b.clone(),
            Condition::Convexity(v) => match check_convexity(&p, g, v) {
                Ok(o) => o,
                Err(Error::GraphTooLargeForConvexity { .. }) => {
                    entries.push(AuditEntry {
                        condition,
                        verdict: Verdict::NotEvaluated,
                        cases: 0,
                        witness: None,
                    });
                    continue;
                }
                Err(e) => return Err(e),
            },
        };
        entries.push(entry_from(outcome));
    }
    Ok(AuditReport {
        measure: *measure,
        entries,
    })
}

/// The verdict pattern expected of a measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// `P_tau^out`: every unpartitioned condition and every (A) condition, strictly.
    ParametricOut,
    /// `P_tau^in`: every unpartitioned condition and every (B) condition, strictly.
    ParametricIn,
    /// `P~^out` on a witness digraph such as the 3-vertex path.
    LimitingOut,
    /// `P~^in` on a witness digraph such as the reversed 3-vertex path.
    LimitingIn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    Pass,
    /// Strict form violated, nonstrict form holds.
    NonstrictOnly,
    Fail,
    Unconstrained,
}

impl Expectation {
    pub fn admits(self, verdict: Verdict) -> bool {
        match self {
            Expectation::Pass => verdict == Verdict::Pass,
            Expectation::NonstrictOnly => verdict == Verdict::PassNonstrictOnly,
            Expectation::Fail => verdict == Verdict::Fail,
            Expectation::Unconstrained => true,
        }
    }
}

impl Profile {
    pub fn expectation(self, condition: Condition) -> Expectation {
        use Condition as C;
        let own = match self {
            Profile::ParametricOut | Profile::LimitingOut => Variant::A,
            Profile::ParametricIn | Profile::LimitingIn => Variant::B,
        };
        match self {
            Profile::ParametricOut | Profile::ParametricIn => match condition.variant() {
                None => Expectation::Pass,
                Some(v) if v == own => Expectation::Pass,
                Some(_) => Expectation::Unconstrained,
            },
            Profile::LimitingOut | Profile::LimitingIn => match condition {
                C::Nonnegativity => Expectation::Pass,
                C::Reachability(ReachPart::UnreachableImpliesZero) => Expectation::Pass,
                C::Reachability(ReachPart::ZeroImpliesUnreachable) => Expectation::Fail,
                C::Triangle(v) if v == own => Expectation::Pass,
                C::SelfAccessibility(v) | C::Transit(v) | C::MonotonicityTransfer(v) | C::Convexity(v) if v == own => {
                    Expectation::NonstrictOnly
                }
                C::MonotonicityIncrease | C::MonotonicityCutpoint => Expectation::NonstrictOnly,
                _ => Expectation::Unconstrained,
            },
        }
    }
}
