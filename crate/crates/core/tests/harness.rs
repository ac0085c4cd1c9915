use std::collections::BTreeSet;
use std::sync::Arc;

use percolab::couple::{minimal_m_s, CouplingParams};
use percolab::cover::{builtin_pair, BUILTIN_PAIRS};
use percolab::enhance::exact::{rational, to_f64, ExactModel};
use percolab::enhance::{event_el, sample_cluster, ModelParams};
use percolab::graph::{hypercubic, regular_tree, FiniteGraph, GraphRef, Vertex};
use percolab::harness::{
    ball_arm_mc, ball_connect_mc, check_hypotheses, couple_verify_campaign, csv_string, curvature, domination_tails, pc_bisect, strict_gap_experiment, sweep,
    theta_mc, ArmSampler, GapBudget, PcConfig, Side, Statistic, CSV_HEADER,
};

fn v(k: &[i64]) -> Vertex {
    Vertex::from_slice(k)
}

fn finite(name: &str, n: usize, edges: &[(usize, usize)]) -> GraphRef {
    Arc::new(FiniteGraph::new(name, n, edges).unwrap())
}

fn root_set(g: &GraphRef) -> BTreeSet<Vertex> {
    BTreeSet::from([g.root()])
}

#[test]
fn single_edge_theta_is_p() {
    let g = finite("K2", 2, &[(0, 1)]);
    let est = theta_mc(&g, &root_set(&g), &ModelParams::new(0.3, 0.0, 1, 1).unwrap(), 100_000, 5, 0).unwrap();
    assert!((est.value - 0.3).abs() < 0.005, "{est:?}");
    assert!(est.agrees(0.3, 3.0));
    assert!((est.stderr - (est.value * (1.0 - est.value) / 1e5).sqrt()).abs() < 1e-15);
}

#[test]
fn four_cycle_antipode_matches_the_oracle() {
    let g = finite("C4", 4, &[(0, 1), (1, 2), (2, 3), (0, 3)]);
    let model = ExactModel::new(4, &[(0, 1), (1, 2), (2, 3), (0, 3)], &[], &[0], 1).unwrap();
    let exact = to_f64(&model.probability(model.sphere_mask(0, 2), &rational(0.5), &rational(0.0)));
    assert_eq!(exact, 0.4375);
    let est = theta_mc(&g, &root_set(&g), &ModelParams::new(0.5, 0.0, 1, 2).unwrap(), 100_000, 11, 0).unwrap();
    assert!(est.agrees(exact, 3.0), "{est:?}");
}

#[test]
fn enhanced_theta_matches_the_oracle_on_a_path() {
    let edges: Vec<(usize, usize)> = (0..5).map(|i| (i, i + 1)).collect();
    let g = finite("P6", 6, &edges);
    let marks: Vec<usize> = (0..6).collect();
    let model = ExactModel::new(6, &edges, &marks, &[0], 1).unwrap();
    for (p, s) in [(0.4, 0.5), (0.7, 1.0), (0.5, 0.0)] {
        let exact = to_f64(&model.probability(model.sphere_mask(0, 4), &rational(p), &rational(s)));
        let est = theta_mc(&g, &root_set(&g), &ModelParams::new(p, s, 1, 4).unwrap(), 50_000, 3, 0).unwrap();
        assert!(est.agrees(exact, 3.0), "p={p} s={s}: {est:?} vs {exact}");
    }
}

#[test]
fn fast_sampler_agrees_with_the_reference_sampler() {
    for (g, l, p, s) in [(hypercubic(2).unwrap(), 5, 0.45, 0.3), (regular_tree(3).unwrap(), 4, 0.5, 0.4)] {
        let params = ModelParams::new(p, s, 1, l).unwrap();
        let roots = root_set(&g);
        let sampler = ArmSampler::new(&g, &roots, &params).unwrap();
        let mut state = Default::default();
        for replica in 0..300 {
            let (c, _) = sample_cluster(&g, &roots, &params, 17, replica, params.horizon()).unwrap();
            let reached = sampler.depth(&mut state, 17, replica).unwrap();
            assert_eq!(event_el(&c, &g.root(), l).unwrap(), reached >= l, "{} replica {replica}", g.name());
            assert_eq!(reached, c.max_depth().min(l));
        }
    }
}

#[test]
fn subcritical_tree_theta_decays() {
    let g = regular_tree(3).unwrap();
    let prof = ArmSampler::new(&g, &root_set(&g), &ModelParams::new(0.4, 0.0, 1, 32).unwrap()).unwrap().profile(20_000, 2, 0).unwrap();
    let thetas: Vec<f64> = [2, 4, 8, 16, 32].iter().map(|&l| prof.theta(l).value).collect();
    assert!(thetas.windows(2).all(|w| w[1] < w[0]), "{thetas:?}");
    assert!(thetas[4] < 0.01);
}

#[test]
fn aggregates_do_not_depend_on_the_worker_count() {
    let g = hypercubic(2).unwrap();
    let roots = root_set(&g);
    let run = |workers| {
        let res = sweep(&g, &roots, 1, &[0.45, 0.55], &[0.0, 0.2], &[4, 8], 3000, 9, workers).unwrap();
        csv_string(&res.csv_rows()).unwrap()
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert!(one.starts_with(&format!("{CSV_HEADER}\n")));
    assert_eq!(one.lines().count(), 9);
}

#[test]
fn sweep_trends_are_monotone() {
    let g = hypercubic(2).unwrap();
    let res = sweep(&g, &root_set(&g), 1, &[0.3, 0.4, 0.5, 0.6], &[0.0, 0.5], &[2, 4, 8], 4000, 1, 0).unwrap();
    assert!(res.trend_violations(3.0).is_empty(), "{:?}", res.trend_violations(3.0));
    assert!(res.get(0.6, 0.5, 8).unwrap().value >= res.get(0.6, 0.0, 8).unwrap().value);
}

#[test]
fn curvature_separates_power_laws_from_decay() {
    let (flat, se) = curvature([8000, 4000, 2000], 100_000);
    assert!(flat.abs() < 3.0 * se);
    let (decay, se) = curvature([8000, 800, 40], 100_000);
    assert!(decay < -3.0 * se);
    let (limit, se) = curvature([60_000, 52_000, 50_000], 100_000);
    assert!(limit > 3.0 * se);
}

/// `θ_L` on the tree whose root has degree 3 and other vertices branch twice.
fn tree_theta(p: f64, l: usize) -> f64 {
    let mut f = 1.0;
    for _ in 1..l {
        f = 1.0 - (1.0 - p * f).powi(2);
    }
    1.0 - (1.0 - p * f).powi(3)
}

#[test]
fn threshold_bisection_brackets_the_exact_crossing() {
    let g = regular_tree(3).unwrap();
    let mut cfg = PcConfig::new(vec![4], 20_000, 4);
    cfg.statistic = Statistic::Threshold(0.5);
    cfg.tol = 0.02;
    let est = pc_bisect(&g, &cfg).unwrap();
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if tree_theta(mid, 4) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!(est.contains(lo), "{:?} vs {lo}", est.interval());
    assert!(est.levels[0].points.iter().all(|pt| pt.side != Side::Above || pt.p > lo));
}

#[test]
fn bisection_rejects_bad_configurations() {
    let g = regular_tree(3).unwrap();
    let mut cfg = PcConfig::new(vec![4], 100, 4);
    cfg.tol = 0.0;
    assert!(pc_bisect(&g, &cfg).is_err());
    let cfg = PcConfig::new(vec![], 100, 4);
    assert!(pc_bisect(&g, &cfg).is_err());
}

#[test]
fn ball_connection_trivial_cases() {
    let g = hypercubic(2).unwrap();
    let o = v(&[0, 0]);
    assert_eq!(ball_connect_mc(g.as_ref(), &o, &o, 2, 0.0, 4, 100, 1, 0).unwrap().estimate.value, 1.0);
    let far = v(&[7, 0]);
    assert_eq!(ball_connect_mc(g.as_ref(), &o, &far, 2, 0.0, 6, 100, 1, 0).unwrap().estimate.value, 0.0);
    assert_eq!(ball_connect_mc(g.as_ref(), &o, &far, 2, 1.0, 6, 100, 1, 0).unwrap().estimate.value, 1.0);
}

#[test]
fn ball_connection_dominates_the_product_of_arms() {
    let g = hypercubic(2).unwrap();
    let (x, y) = (v(&[0, 0]), v(&[20, 0]));
    let conn = ball_connect_mc(g.as_ref(), &x, &y, 4, 0.6, 30, 4000, 3, 0).unwrap();
    let ax = ball_arm_mc(g.as_ref(), &x, 4, 0.6, 30, 4000, 5, 0).unwrap();
    let ay = ball_arm_mc(g.as_ref(), &y, 4, 0.6, 30, 4000, 7, 0).unwrap();
    let product = ax.estimate.value * ay.estimate.value;
    let se = (conn.estimate.stderr.powi(2) + (ax.estimate.stderr * ay.estimate.value).powi(2) + (ay.estimate.stderr * ax.estimate.value).powi(2)).sqrt();
    assert!(conn.estimate.value >= product - 3.0 * se, "{} < {product}", conn.estimate.value);
    assert_eq!(conn.window, 30);
}

#[test]
fn hypotheses_of_the_built_in_pairs() {
    let verdict = |name: &str| check_hypotheses(builtin_pair(name).unwrap()).unwrap().0;
    for name in ["z3-slab2", "z2-cylinder3"] {
        assert!(verdict(name).violations().is_empty(), "{name}: {:?}", verdict(name));
    }
    assert!(verdict("z2-cylinder3").h_linear);
    assert!(!verdict("z3-slab2").h_linear);
    let fold = verdict("tree3-fold");
    assert!(!fold.h_quasi_transitive && fold.g_quasi_transitive);
    assert!(!verdict("z-k2").g_pc_below_one);
    assert_eq!(BUILTIN_PAIRS.len(), 6);
}

#[test]
fn gap_experiment_refuses_pairs_that_break_a_hypothesis() {
    let budget = GapBudget { pc: PcConfig::new(vec![4], 100, 1), decay_ls: vec![4], decay_samples: 100, decay_offset: 0.1 };
    let report = strict_gap_experiment(builtin_pair("tree3-fold").unwrap(), &budget).unwrap();
    assert!(report.is_refused());
    assert!(report.refused.iter().any(|r| r.contains("H is not quasi-transitive")));
    assert!(report.g.is_none() && report.gap.is_none());
    let report = strict_gap_experiment(builtin_pair("z-c3").unwrap(), &budget).unwrap();
    assert!(report.refused.iter().any(|r| r.contains("p_c(G) = 1")));
}

#[test]
fn coupling_campaign_is_sound_and_has_the_right_marginals() {
    let map = builtin_pair("z-k2").unwrap().build().unwrap().2;
    let (m, s) = minimal_m_s(&map, 1, 0.9, 3).unwrap();
    let params = CouplingParams::new(0.95, 0.9, 1, m, s, 4).unwrap();
    let o = map.source().root();
    let sum = couple_verify_campaign("z-k2", &map, &o, &params, 3, 4000, 21, 0).unwrap();
    assert!(sum.sound(), "{:?}", sum.failures);
    assert_eq!(sum.runs, 4000);
    assert!(sum.max_z() < 4.0, "{}", sum.max_z());
    assert_eq!(sum.omega.len(), 1);
    assert_eq!(sum.eta.len(), 6);
    assert_eq!(sum.table.iter().sum::<u64>(), 4000);
    let again = couple_verify_campaign("z-k2", &map, &o, &params, 3, 4000, 21, 2).unwrap();
    assert_eq!((sum.table, sum.enhancements), (again.table, again.enhancements));
}

#[test]
fn domination_on_the_two_point_quotient() {
    let map = builtin_pair("z-k2").unwrap().build().unwrap().2;
    let rows = domination_tails(&map, &map.source().root(), 3, 1, &[0.2, 0.5], &[0.1, 0.5]).unwrap();
    assert_eq!(rows.len(), 8);
    for row in &rows {
        assert!(row.holds);
        if row.k == 1 {
            assert_eq!((row.h_value, row.g_value), (1.0, 1.0));
        } else {
            assert!((row.h_value - row.p).abs() < 1e-12);
            assert!((row.g_value - (1.0 - (1.0 - row.p).powi(2))).abs() < 1e-12);
        }
    }
}
