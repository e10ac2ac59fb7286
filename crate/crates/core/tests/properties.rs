mod common;

use common::*;
use forestkit::accessibility::{
    access_in, access_out, check_convexity, check_monotonicity, check_nonnegativity, check_reachability,
    check_self_accessibility, check_transit, check_triangle, Measure, Perturbation, ReachPart, Variant,
};
use forestkit::edgelist::{parse_digraph, serialize};
use forestkit::forest::{dense_alpha_bound, dense_forest_measure, ForestExpansion};
use forestkit::linalg::{column_sums, max_abs_diff, rank, row_sums};
use forestkit::markov::{cesaro_limit, inverse_chain, max_alpha, stochasticity_error, uniform_start_limit};
use forestkit::oracle::{
    enumerate_in_forests, knot_tree_weights, oracle_expansion, ratio_to_f64, DEFAULT_ENUMERATION_CAP,
};
use forestkit::ranking::{borda_scores, daniels_tree_scores, kernel_basis, mean_limit_scores, rank as rank_scores};
use forestkit::{Matrix, WeightedDigraph};
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn symmetric(g: &WeightedDigraph) -> WeightedDigraph {
    let mut arcs = Vec::new();
    for t in 0..g.n() {
        for h in t + 1..g.n() {
            let w = g.weight(t, h) + g.weight(h, t);
            if w > 0.0 {
                arcs.push((t + 1, h + 1, w));
                arcs.push((h + 1, t + 1, w));
            }
        }
    }
    WeightedDigraph::build(g.n(), &arcs).unwrap()
}

fn strong(g: &WeightedDigraph) -> WeightedDigraph {
    let n = g.n();
    let mut arcs: Vec<(usize, usize, f64)> = g.arcs().map(|a| (a.tail + 1, a.head + 1, a.weight)).collect();
    for v in 1..=n {
        arcs.push((v, v % n + 1, 0.5));
    }
    WeightedDigraph::build(n, &arcs).unwrap()
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn engine_matches_oracle(g in arb_digraph(5)) {
        let exp = ForestExpansion::of_graph(&g).unwrap();
        let oracle = oracle_expansion(&g, DEFAULT_ENUMERATION_CAP).unwrap();
        prop_assert!(oracle.deviation_from(&exp) <= 1e-9);
        prop_assert_eq!(exp.d_prime(), g.strong_components().d_prime);
    }

    #[test]
    fn forest_matrix_columns_sum_to_sigma(g in arb_digraph(7)) {
        let exp = ForestExpansion::of_graph(&g).unwrap();
        for (k, q) in exp.q_matrices().iter().enumerate() {
            let sigma = exp.sigma()[k];
            prop_assert!(sigma > 0.0);
            for s in column_sums(q) {
                prop_assert!((s - sigma).abs() <= 1e-9 * sigma);
            }
            prop_assert!(q.iter().all(|x| *x >= -1e-9 * sigma));
            let jk = exp.j_k(k).unwrap();
            for s in column_sums(&jk) {
                prop_assert!((s - 1.0).abs() <= 1e-9);
            }
        }
        prop_assert!(exp.sigma()[exp.max_forest_size() + 1..].iter().all(|s| *s == 0.0));
    }

    #[test]
    fn parametric_matrix_is_column_stochastic_inverse(g in arb_digraph(8), tau in 0.01f64..50.0) {
        let exp = ForestExpansion::of_graph(&g).unwrap();
        let j = exp.j_of_tau(tau).unwrap();
        let n = g.n();
        let a = Matrix::identity(n, n) + g.laplacian().matrix() * tau;
        prop_assert!(max_abs_diff(&(&a * &j.j_matrix), &Matrix::identity(n, n)) <= 1e-9);
        prop_assert!(j.j_matrix.iter().all(|x| *x >= -1e-12));
        for s in column_sums(&j.j_matrix) {
            prop_assert!((s - 1.0).abs() <= 1e-9);
        }
        let det = a.determinant();
        prop_assert!((j.sigma_tau - det).abs() <= 1e-9 * j.sigma_tau);
    }

    #[test]
    fn limiting_matrix_algebra(g in arb_digraph(8)) {
        let exp = ForestExpansion::of_graph(&g).unwrap();
        let jt = exp.j_tilde().j_tilde;
        let l = g.laplacian();
        let scale = max_abs(l.matrix());
        prop_assert!(max_abs_diff(&(&jt * &jt), &jt) <= 1e-9);
        prop_assert!(max_abs(&(l.matrix() * &jt)) <= 1e-9 * scale);
        prop_assert!(max_abs(&(&jt * l.matrix())) <= 1e-9 * scale);
        prop_assert_eq!(rank(&jt, 1e-9), exp.d_prime());
        prop_assert_eq!(rank(l.matrix(), 1e-9), g.n() - exp.d_prime());
    }

    #[test]
    fn relabeling_is_equivariant(g in arb_digraph(6), seed in any::<u64>()) {
        let n = g.n();
        let perms = permutations(n);
        let perm = &perms[(seed % perms.len() as u64) as usize];
        let h = permuted(&g, perm);
        let eg = ForestExpansion::of_graph(&g).unwrap();
        let eh = ForestExpansion::of_graph(&h).unwrap();
        prop_assert_eq!(eg.d_prime(), eh.d_prime());
        for (a, b) in eg.sigma().iter().zip(eh.sigma()) {
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
        for (qg, qh) in eg.q_matrices().iter().zip(eh.q_matrices()) {
            let scale = max_abs(qg).max(1.0);
            prop_assert!(max_abs_diff(&permuted_matrix(qg, perm), qh) <= 1e-9 * scale);
        }
        prop_assert!(max_abs_diff(&permuted_matrix(&eg.j_tilde().j_tilde, perm), &eh.j_tilde().j_tilde) <= 1e-9);
    }

    #[test]
    fn in_measure_matches_in_forest_definition(g in arb_digraph(5), tau in 0.1f64..5.0) {
        let forests = enumerate_in_forests(&g, DEFAULT_ENUMERATION_CAP).unwrap();
        let n = g.n();
        let mut num = Matrix::zeros(n, n);
        let mut den = 0.0;
        for f in &forests {
            let w = f.weight(&g) * tau.powi(f.arc_count() as i32);
            den += w;
            for i in 0..n {
                num[(i, f.tree_of[i])] += w;
            }
        }
        let direct = num / den;
        let p = access_in(&g, tau).unwrap().p;
        prop_assert!(max_abs_diff(&direct, &p) <= 1e-9);
        for s in row_sums(&p) {
            prop_assert!((s - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn out_measure_satisfies_its_conditions(g in arb_digraph(6), tau in 0.2f64..5.0) {
        let p = access_out(&g, tau).unwrap().p;
        prop_assert!(check_nonnegativity(&p).passes(true));
        prop_assert!(check_reachability(&p, &g, ReachPart::ZeroImpliesUnreachable).passes(true));
        prop_assert!(check_reachability(&p, &g, ReachPart::UnreachableImpliesZero).passes(true));
        prop_assert!(check_self_accessibility(&p, Variant::A).passes(true));
        prop_assert!(check_transit(&p, &g, Variant::A).passes(true));
        prop_assert!(check_convexity(&p, &g, Variant::A).unwrap().passes(true));
    }

    #[test]
    fn in_measure_satisfies_its_conditions(g in arb_digraph(6), tau in 0.2f64..5.0) {
        let p = access_in(&g, tau).unwrap().p;
        prop_assert!(check_nonnegativity(&p).passes(true));
        prop_assert!(check_reachability(&p, &g, ReachPart::ZeroImpliesUnreachable).passes(true));
        prop_assert!(check_reachability(&p, &g, ReachPart::UnreachableImpliesZero).passes(true));
        prop_assert!(check_self_accessibility(&p, Variant::B).passes(true));
        prop_assert!(check_transit(&p, &g, Variant::B).passes(true));
        prop_assert!(check_convexity(&p, &g, Variant::B).unwrap().passes(true));
    }

    #[test]
    fn monotonicity_under_weight_increase(
        g in arb_digraph(6),
        tau in 0.2f64..5.0,
        pick in any::<prop::sample::Index>(),
        delta in 0.05f64..3.0,
    ) {
        let n = g.n();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|t| (0..n).filter(move |&h| h != t).map(move |h| (t, h))).collect();
        let (tail, head) = pairs[pick.index(pairs.len())];
        let pert = Perturbation { tail, head, delta };
        let out = check_monotonicity(&Measure::Out { tau }, &g, pert).unwrap();
        prop_assert!(out.increase.passes(true));
        prop_assert!(out.cutpoint.passes(true));
        prop_assert!(out.transfer_a.passes(true));
        let inn = check_monotonicity(&Measure::In { tau }, &g, pert).unwrap();
        prop_assert!(inn.increase.passes(true));
        prop_assert!(inn.cutpoint.passes(true));
        prop_assert!(inn.transfer_b.passes(true));
    }

    #[test]
    fn triangle_holds_on_symmetric_digraphs(g in arb_digraph(6), tau in 0.2f64..5.0) {
        let s = symmetric(&g);
        let p = access_out(&s, tau).unwrap().p;
        prop_assert!(check_triangle(&p, Variant::A).passes(true));
        prop_assert!(check_triangle(&p, Variant::B).passes(true));
    }

    #[test]
    fn limiting_measure_satisfies_nonstrict_forms(g in arb_digraph(6)) {
        let p = ForestExpansion::of_graph(&g).unwrap().j_tilde().j_tilde;
        prop_assert!(check_nonnegativity(&p).passes(true));
        prop_assert!(check_reachability(&p, &g, ReachPart::UnreachableImpliesZero).passes(true));
        prop_assert!(check_self_accessibility(&p, Variant::A).passes(false));
        prop_assert!(check_transit(&p, &g, Variant::A).passes(false));
        prop_assert!(check_convexity(&p, &g, Variant::A).unwrap().passes(false));
    }

    #[test]
    fn dense_measure_inverts(g in arb_digraph(6), frac in 0.05f64..0.95) {
        prop_assume!(g.arc_count() > 0);
        let exp = ForestExpansion::of_graph(&g).unwrap();
        prop_assume!(exp.max_forest_size() >= 1);
        let bound = dense_alpha_bound(&exp).unwrap();
        let alpha = frac * bound;
        let jt = exp.j_tilde();
        let m = dense_forest_measure(&jt, &exp, alpha).unwrap();
        let n = g.n();
        let prod = &m * (Matrix::identity(n, n) + jt.matrix() * alpha);
        prop_assert!(max_abs_diff(&prod, &Matrix::identity(n, n)) <= 1e-9);
    }

    #[test]
    fn kernel_basis_structure(g in arb_digraph(5)) {
        let info = g.strong_components();
        let basis = kernel_basis(&g).unwrap();
        prop_assert_eq!(basis.len(), info.d_prime);
        prop_assert_eq!(basis.len(), g.n() - rank(g.laplacian().matrix(), 1e-9));
        for (x, knot) in basis.iter().zip(&info.source_knots) {
            let support: Vec<usize> = (0..g.n()).filter(|&i| x[i].abs() > 1e-12).collect();
            prop_assert_eq!(&support, knot);
            let trees = knot_tree_weights(&g, knot).unwrap();
            for &k in knot {
                let want = ratio_to_f64(&(trees.weight_from(k).unwrap() / &trees.total));
                prop_assert!((x[k] - want).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn knot_rows_are_proportional(g in arb_digraph(6)) {
        let jt = ForestExpansion::of_graph(&g).unwrap().j_tilde().j_tilde;
        for knot in g.strong_components().source_knots {
            let k1 = knot[0];
            for &k2 in &knot[1..] {
                let ratio = jt[(k2, k2)] / jt[(k1, k2)];
                for j in 0..g.n() {
                    prop_assert!((jt[(k2, j)] - ratio * jt[(k1, j)]).abs() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn standard_numeration_gives_contiguous_supports(g in arb_digraph(6)) {
        let info = g.strong_components();
        let mut order: Vec<usize> = info.source_knots.iter().flatten().copied().collect();
        order.extend((0..g.n()).filter(|v| info.knot_of(*v).is_none()));
        let mut perm = vec![0; g.n()];
        for (new, &old) in order.iter().enumerate() {
            perm[old] = new;
        }
        let h = permuted(&g, &perm);
        for x in kernel_basis(&h).unwrap() {
            let support: Vec<usize> = (0..h.n()).filter(|&i| x[i].abs() > 1e-12).collect();
            prop_assert_eq!(support.last().unwrap() - support[0] + 1, support.len());
        }
    }

    #[test]
    fn strong_digraph_rankings_agree(g in arb_digraph(6)) {
        let s = strong(&g);
        let daniels = daniels_tree_scores(&s).unwrap();
        let mean = mean_limit_scores(&s).unwrap();
        let basis = kernel_basis(&s).unwrap();
        prop_assert_eq!(basis.len(), 1);
        let total: f64 = daniels.values.iter().sum();
        for i in 0..s.n() {
            prop_assert!((daniels.values[i] / total - mean.values[i]).abs() <= 1e-9);
            prop_assert!((basis[0][i] - mean.values[i]).abs() <= 1e-9);
        }
        let lt = s.laplacian().matrix() * Matrix::from_column_slice(s.n(), 1, &daniels.values);
        prop_assert!(max_abs(&lt) <= 1e-9 * max_abs(s.laplacian().matrix()) * total);
    }

    #[test]
    fn rankings_are_scale_invariant(g in arb_digraph(6), c in 0.01f64..100.0) {
        let scaled = g.scaled(c).unwrap();
        let a = rank_scores(&mean_limit_scores(&g).unwrap());
        let b = rank_scores(&mean_limit_scores(&scaled).unwrap());
        prop_assert_eq!(a, b);
        let s = strong(&g);
        let a = rank_scores(&daniels_tree_scores(&s).unwrap());
        let b = rank_scores(&daniels_tree_scores(&s.scaled(c).unwrap()).unwrap());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn borda_scores_flip_under_reversal(g in arb_digraph(6), tau in 0.1f64..5.0) {
        let a = borda_scores(&g, tau).unwrap();
        let b = borda_scores(&g.reverse(), tau).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x + y).abs() <= 1e-9);
        }
        prop_assert!(a.values.iter().sum::<f64>().abs() <= 1e-9 * g.max_weight().max(1.0) * g.n() as f64);
    }

    #[test]
    fn inverse_chain_is_stochastic(g in arb_digraph(7), frac in 0.05f64..=1.0) {
        let alpha = max_alpha(&g).map(|m| m * frac);
        let chain = inverse_chain(&g, alpha).unwrap();
        prop_assert!(chain.p.iter().all(|x| (0.0..=1.0).contains(x)));
        prop_assert!(stochasticity_error(&chain.p) <= 1e-12);
        for iters in [1, 3, 10, 200] {
            let r = cesaro_limit(&chain, iters, 1e-9);
            prop_assert!(stochasticity_error(&r.pi) <= 1e-9);
        }
        let r = cesaro_limit(&chain, 200, 1e-9);
        prop_assert!(r.converged);
        let jt = ForestExpansion::of_graph(&g).unwrap().j_tilde().j_tilde;
        prop_assert!(max_abs_diff(&r.pi, &jt.transpose()) <= 1e-6);
    }

    #[test]
    fn uniform_start_equals_mean_limit(g in arb_digraph(7)) {
        let a = mean_limit_scores(&g).unwrap();
        let b = uniform_start_limit(&g, None).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - y).abs() <= 1e-6);
        }
        prop_assert!((a.values.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn edge_list_round_trip(g in arb_digraph(9)) {
        let text = serialize(&g);
        prop_assert_eq!(parse_digraph(&text).unwrap(), g);
    }
}
