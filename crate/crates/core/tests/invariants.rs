mod common;

use std::path::Path;

use proptest::prelude::*;
use sbmlab::abp::{assign_probability, compensate, vertex_sums};
use sbmlab::io::{format_edge_list, parse_edge_list};
use sbmlab::metrics::{agreement, hungarian, permutation_distance};
use sbmlab::nonbacktracking::sigma_t;
use sbmlab::topology::component_stats;
use sbmlab::typicality::{
    a0_threshold_rhs, binomial_exponent, count_typical, f_tau, is_typical, it_bound_report, tau,
    TypicalityParams, TAU_TOL,
};
use sbmlab::{Labeling, SymmetricSbm};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn assign_probability_is_a_monotone_probability(
        y1 in -10.0f64..10.0, y2 in -10.0f64..10.0, c in 0.0f64..5.0,
    ) {
        let (lo, hi) = if y1 <= y2 { (y1, y2) } else { (y2, y1) };
        let (p, q) = (assign_probability(lo, c), assign_probability(hi, c));
        prop_assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&q));
        prop_assert!(p <= q);
        prop_assert_eq!(assign_probability(0.0, c), 0.5);
    }

    #[test]
    fn compensation_annihilates_a_geometric_direction(
        lambda in 0.5f64..4.0, m in 3usize..12, e in 1usize..3, n in 1usize..6, other in -3.0f64..3.0,
    ) {
        prop_assume!(e < m);
        // Columns t -> lambda^t v: one factor with lambda removes them.
        let v: Vec<f64> = (0..n).map(|i| i as f64 - 1.5).collect();
        let columns: Vec<Vec<f64>> =
            (0..m).map(|t| v.iter().map(|x| x * lambda.powi(t as i32)).collect()).collect();
        let out = compensate(&columns, &[lambda, other], &[e, 0]).unwrap();
        let scale = lambda.powi(m as i32).max(1.0);
        for x in out {
            prop_assert!(x.abs() <= 1e-9 * scale, "{x}");
        }
    }

    #[test]
    fn compensation_with_no_factors_is_the_last_column(m in 1usize..8, n in 1usize..6, seed in any::<u64>()) {
        let mut rng = sbmlab::rng::SbmRng::new(seed);
        let columns: Vec<Vec<f64>> = (0..m).map(|_| rng.gaussian_vec(n)).collect();
        prop_assert_eq!(compensate(&columns, &[], &[]).unwrap(), columns[m - 1].clone());
        prop_assert!(compensate(&columns, &[1.0], &[m]).is_err());
    }

    #[test]
    fn edge_list_round_trips(n in 2usize..40, p in 0.0f64..0.4, seed in any::<u64>()) {
        let g = common::gnp(n, p, seed);
        let text = format_edge_list(&g);
        prop_assert_eq!(parse_edge_list(Path::new("mem"), &text, Some(n)).unwrap(), g);
    }

    #[test]
    fn vertex_sums_preserve_the_total(n in 2usize..30, p in 0.0f64..0.5, seed in any::<u64>()) {
        let g = common::gnp(n, p, seed);
        let vals: Vec<f64> = (0..g.num_directed()).map(|e| (e % 7) as f64 - 3.0).collect();
        let total: f64 = vals.iter().sum();
        prop_assert!((vertex_sums(&g, &vals).iter().sum::<f64>() - total).abs() < 1e-9);
    }

    #[test]
    fn walk_counts_are_symmetric(n in 2usize..25, p in 0.05f64..0.5, seed in any::<u64>(), t in 0usize..7) {
        let g = common::gnp(n, p, seed);
        let s = sigma_t(&g, t).unwrap();
        for u in 0..n {
            for v in 0..n {
                prop_assert_eq!(s.get(u, v), s.get(v, u));
                prop_assert!(s.get(u, v) >= 0);
            }
        }
    }

    #[test]
    fn agreement_is_at_least_one_over_k(seed in any::<u64>(), k in 2usize..5, n in 1usize..40) {
        let mut rng = sbmlab::rng::SbmRng::new(seed);
        let x = Labeling::new((0..n).map(|_| rng.below(k as u64) as u32).collect(), k).unwrap();
        let y = Labeling::new((0..n).map(|_| rng.below(k as u64) as u32).collect(), k).unwrap();
        let a = agreement(&x, &y).unwrap();
        prop_assert!(a >= 1.0 / k as f64 - 1e-12 && a <= 1.0);
        let d = permutation_distance(&x, &y).unwrap();
        prop_assert!((a - (1.0 - d as f64 / n as f64)).abs() < 1e-12);
        prop_assert_eq!(agreement(&x, &x).unwrap(), 1.0);
    }

    #[test]
    fn hungarian_matches_brute_force(seed in any::<u64>(), k in 1usize..6) {
        let mut rng = sbmlab::rng::SbmRng::new(seed);
        let cost: Vec<Vec<i64>> =
            (0..k).map(|_| (0..k).map(|_| rng.below(50) as i64).collect()).collect();
        let assign = hungarian(&cost);
        let total = |perm: &[usize]| perm.iter().enumerate().map(|(i, &j)| cost[i][j]).sum::<i64>();
        let mut perm: Vec<usize> = (0..k).collect();
        let mut best = i64::MAX;
        permutations(&mut perm, 0, &mut |p| best = best.min(total(p)));
        prop_assert_eq!(total(&assign), best);
    }

    #[test]
    fn tau_is_the_conjugate_root(d in 1.01f64..30.0) {
        let t = tau(d, TAU_TOL).unwrap();
        prop_assert!(t > 0.0 && t < 1.0);
        prop_assert!((t * (-t).exp() - d * (-d).exp()).abs() < 1e-10);
        let f = f_tau(t, d);
        prop_assert!(f > 0.0 && f <= 1.0);
    }

    #[test]
    fn binomial_exponent_is_nonnegative(s in 0.01f64..10.0, t in 0.0f64..10.0) {
        prop_assert!(binomial_exponent(s, t) >= -1e-12);
        prop_assert!(binomial_exponent(s, s).abs() < 1e-12);
    }

    #[test]
    fn disjoint_communities_reduce_to_the_a0_line(k in 2usize..7, b in 1.5f64..40.0) {
        // With a = 0 the tree branch of the general condition collapses to
        // b > a0_threshold_rhs; the min over both branches can only add cases.
        let d = b * (k as f64 - 1.0) / k as f64;
        prop_assume!(d > 1.0);
        let rep = it_bound_report(0.0, b, k).unwrap();
        let rhs = a0_threshold_rhs(b, k).unwrap();
        prop_assume!((b - rhs).abs() > 1e-6);
        prop_assert_eq!(rep.it_lhs > rep.it_rhs_tree, b > rhs);
        if b > rhs {
            prop_assert!(rep.it_bound_holds);
        }
    }

    #[test]
    fn tree_accounting(n in 1usize..60, p in 0.0f64..0.2, seed in any::<u64>()) {
        let g = common::gnp(n, p, seed);
        let s = component_stats(&g, 4);
        prop_assert!(s.trees <= s.components);
        prop_assert!(s.giant_size <= n);
        prop_assert!(s.tree_edges + s.trees <= n);
        prop_assert!(s.tree_counts.iter().sum::<usize>() <= s.trees);
        prop_assert!(s.planted_edges <= g.num_edges());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn typical_set_is_closed_under_relabeling(seed in 0u64..500, n in 8usize..11) {
        let (_, g) = SymmetricSbm::new(n, 2, 8.0, 2.0).unwrap().sample(seed).unwrap();
        let params = TypicalityParams::new(2, 8.0, 2.0, 0.5).unwrap();
        let full = count_typical(&g, &params, false).unwrap();
        let quotient = count_typical(&g, &params, true).unwrap();
        prop_assert_eq!(full, 2 * quotient);
        let x = Labeling::new((0..n).map(|v| (v % 2) as u32).collect(), 2).unwrap();
        let flipped = x.permuted(&[1, 0]);
        prop_assert_eq!(is_typical(&x, &g, &params), is_typical(&flipped, &g, &params));
    }
}

fn permutations(perm: &mut Vec<usize>, i: usize, visit: &mut impl FnMut(&[usize])) {
    if i == perm.len() {
        visit(perm);
        return;
    }
    for j in i..perm.len() {
        perm.swap(i, j);
        permutations(perm, i + 1, visit);
        perm.swap(i, j);
    }
}
