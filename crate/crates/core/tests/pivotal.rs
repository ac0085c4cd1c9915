use std::collections::BTreeSet;

use percolab::enhance::exact::{rational, to_f64, ExactModel};
use percolab::enhance::Configuration;
use percolab::graph::{hypercubic, regular_tree, Edge, FiniteGraph, Graph, Vertex};
use percolab::pivotal::{
    is_p_pivotal, is_s_pivotal, lemma_witness, russo_check, strip_alpha, surgery, surgery_ab, surgery_campaign, verify_result, Case, Event, FailureDump, Frame,
    PivotalError, Strip, ZRule,
};
use percolab::rng::SplitMix;
use proptest::prelude::*;

fn v(k: &[i64]) -> Vertex {
    Vertex::from_slice(k)
}

fn e(a: &[i64], b: &[i64]) -> Edge {
    Edge::new(v(a), v(b))
}

fn open(edges: &[(&[i64], &[i64])], marks: &[&[i64]]) -> Configuration {
    let mut cfg = Configuration::new();
    for (a, b) in edges {
        cfg.set_edge(e(a, b), true);
    }
    for m in marks {
        cfg.set_vertex(v(m), true);
    }
    cfg
}

fn ring(n: usize) -> Result<FiniteGraph, percolab::graph::GraphError> {
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    FiniteGraph::new(format!("C{n}"), n, &edges)
}

fn set(vs: &[&[i64]]) -> BTreeSet<Vertex> {
    vs.iter().map(|k| v(k)).collect()
}

#[test]
fn single_edge_is_always_pivotal() {
    let g = FiniteGraph::path(2).unwrap();
    let ev = Event::arm(v(&[0]), 1);
    for bits in 0..8u32 {
        let mut cfg = Configuration::new();
        cfg.set_edge(e(&[0], &[1]), bits & 1 == 1);
        cfg.set_vertex(v(&[0]), bits & 2 != 0);
        cfg.set_vertex(v(&[1]), bits & 4 != 0);
        assert!(is_p_pivotal(&g, &cfg, &e(&[0], &[1]), &ev, 1).unwrap(), "bits {bits}");
    }
}

#[test]
fn open_bypass_removes_pivotality() {
    let g = ring(4).unwrap();
    let ev = Event::arm(v(&[0]), 2);
    let cfg = open(&[(&[0], &[3]), (&[2], &[3]), (&[1], &[2])], &[]);
    assert!(!is_p_pivotal(&g, &cfg, &e(&[0], &[1]), &ev, 1).unwrap());
    let cfg = open(&[(&[1], &[2])], &[]);
    assert!(is_p_pivotal(&g, &cfg, &e(&[0], &[1]), &ev, 1).unwrap());
}

#[test]
fn enhancement_vertex_of_the_path_is_s_pivotal() {
    let g = FiniteGraph::path(5).unwrap();
    let ev = Event::arm(v(&[0]), 3);
    let cfg = open(&[(&[0], &[1]), (&[1], &[2])], &[]);
    assert!(is_s_pivotal(&g, &cfg, &v(&[1]), &ev, 1).unwrap());
    assert!(!is_s_pivotal(&g, &cfg, &v(&[2]), &ev, 1).unwrap());
    assert!(!is_s_pivotal(&g, &cfg, &v(&[0]), &ev, 1).unwrap());
}

fn numbered(g: &FiniteGraph) -> Vec<Edge> {
    g.edges().into_iter().map(|(a, b)| e(&[a as i64], &[b as i64])).collect()
}

/// Pivotality from two engine evaluations per configuration, tallied into
/// polynomial coefficients and compared with the enumeration oracle.
#[test]
fn flip_tests_match_the_enumeration_oracle() {
    for (g, marks, l, r) in [
        (ring(4).unwrap(), vec![0usize, 1, 2, 3], 2usize, 1usize),
        (FiniteGraph::path(5).unwrap(), vec![0, 1, 2, 3, 4], 3, 1),
        (ring(6).unwrap(), vec![0, 2, 4], 3, 1),
    ] {
        let model = ExactModel::from_graph(&g, &marks, &[0], r).unwrap();
        let table = model.event_table(model.sphere_mask(0, l));
        let edges = numbered(&g);
        let ev = Event::arm(v(&[0]), l);
        let mut frame = Frame::new(&g, &ev, r).unwrap();
        let m = edges.len();
        let coords = m + marks.len();
        for k in 0..coords {
            let mut tally = vec![0u64; (m + 1) * (marks.len() + 1)];
            for c in 0..1u64 << coords {
                if c >> k & 1 == 1 {
                    continue;
                }
                let mut cfg = Configuration::new();
                for (i, ed) in edges.iter().enumerate() {
                    cfg.set_edge(ed.clone(), c >> i & 1 == 1);
                }
                for (j, &x) in marks.iter().enumerate() {
                    cfg.set_vertex(v(&[x as i64]), c >> (m + j) & 1 == 1);
                }
                let mut d = frame.load(&cfg);
                let piv = if k < m {
                    frame.p_pivotal(&mut d, frame.edge_id(&edges[k]).unwrap()).unwrap()
                } else {
                    frame.s_pivotal(&mut d, frame.vertex_id(&v(&[marks[k - m] as i64])).unwrap()).unwrap()
                };
                if piv {
                    let i = (c & ((1 << m) - 1)).count_ones() as usize;
                    let j = (c >> m).count_ones() as usize;
                    tally[i * (marks.len() + 1) + j] += 1;
                }
            }
            let oracle = if k < m { table.pivotal_edge(k) } else { table.pivotal_mark(k - m) };
            let (di, dj) = oracle.degrees();
            for i in 0..=di {
                for j in 0..=dj {
                    assert_eq!(tally[i * (marks.len() + 1) + j], oracle.coeff(i, j), "{} coordinate {k} at ({i},{j})", g.name());
                }
            }
        }
    }
}

#[test]
fn russo_on_a_single_edge() {
    let g = FiniteGraph::path(2).unwrap();
    let model = ExactModel::from_graph(&g, &[0, 1], &[0], 1).unwrap();
    let rep = russo_check(&model, model.sphere_mask(0, 1), 0.3, 0.0);
    assert!((rep.dp_exact - 1.0).abs() < 1e-12);
    assert!((rep.dp_pivotal - 1.0).abs() < 1e-12);
    assert!(rep.passed(), "{}", rep.line());
}

#[test]
fn russo_on_the_four_cycle() {
    let g = ring(4).unwrap();
    let model = ExactModel::from_graph(&g, &[0, 1, 2, 3], &[0], 1).unwrap();
    let rep = russo_check(&model, model.sphere_mask(0, 2), 0.5, 0.0);
    // θ = 2p² − p⁴, so θ′(1/2) = 4p − 4p³ = 3/2.
    let p = rational(0.5);
    let want = to_f64(&(rational(4.0) * &p - rational(4.0) * &p * &p * &p));
    assert_eq!(want, 1.5);
    assert!((rep.dp_exact - want).abs() < 1e-12);
    assert!((rep.dp_pivotal - want).abs() < 1e-12);
    assert!(rep.passed(), "{}", rep.line());
}

#[test]
fn marks_without_outer_spheres_have_no_influence() {
    let edges: Vec<(usize, usize)> = (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b))).collect();
    let k4 = FiniteGraph::new("K4", 4, &edges).unwrap();
    let model = ExactModel::from_graph(&k4, &[0, 1, 2, 3], &[0], 1).unwrap();
    for p in [0.2, 0.7] {
        let rep = russo_check(&model, model.sphere_mask(0, 1), p, 1.0);
        assert_eq!(rep.ds_exact, 0.0);
        assert_eq!(rep.ds_pivotal, 0.0);
        assert!(rep.passed(), "{}", rep.line());
    }
}

#[test]
fn russo_identities_on_mixed_instances() {
    let z_window = FiniteGraph::path(7).unwrap();
    for (g, marks, root, l, r) in [
        (ring(6).unwrap(), vec![0usize, 1, 2, 3, 4, 5], 0usize, 3usize, 1usize),
        (z_window, vec![1, 2, 3, 4, 5], 3, 3, 1),
        (ring(8).unwrap(), vec![0, 1, 2, 3], 0, 4, 1),
    ] {
        let model = ExactModel::from_graph(&g, &marks, &[root], r).unwrap();
        for (p, s) in [(0.3, 0.6), (0.55, 0.25), (0.9, 0.9)] {
            let rep = russo_check(&model, model.sphere_mask(root, l), p, s);
            assert!(rep.passed(), "{} {}", g.name(), rep.line());
            assert!(rep.ds_exact > 0.0);
        }
    }
}

#[test]
fn s_pivotal_mass_follows_p_pivotal_mass() {
    // Marks on every vertex of a cycle long enough to hold B_R(e).
    let g = ring(10).unwrap();
    let marks: Vec<usize> = (0..10).collect();
    let model = ExactModel::from_graph(&g, &marks, &[0], 1).unwrap();
    let table = model.event_table(model.sphere_mask(0, 4));
    let (p, s) = (rational(0.4), rational(0.3));
    let edges = g.edges();
    let dist = |a: usize, b: usize| {
        let d = a.abs_diff(b);
        d.min(10 - d)
    };
    for (k, &(x, y)) in edges.iter().enumerate() {
        let pe = to_f64(&table.pivotal_edge(k).eval(&p, &s));
        let near: f64 = (0..10).filter(|&w| dist(w, x).min(dist(w, y)) <= 4).map(|w| to_f64(&table.pivotal_mark(w).eval(&p, &s))).sum();
        if pe > 0.0 {
            assert!(near > 0.0, "edge {x}-{y}");
        }
    }
}

fn z1() -> percolab::graph::GraphRef {
    hypercubic(1).unwrap()
}

fn z2() -> percolab::graph::GraphRef {
    hypercubic(2).unwrap()
}

#[test]
fn stripping_an_unmarked_ball_changes_nothing() {
    let g = z1();
    let ev = Event::arm(v(&[0]), 4);
    let cfg = open(&[(&[0], &[1]), (&[1], &[2]), (&[2], &[3]), (&[3], &[4])], &[&[20]]);
    match strip_alpha(g.as_ref(), &cfg, &e(&[3], &[4]), 4, &ev, 1).unwrap() {
        Strip::Stripped(out) => assert_eq!(out.open_edges().count(), 4),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn stripping_finds_the_essential_enhancement() {
    let g = z1();
    let ev = Event::arm(v(&[0]), 4);
    let cfg = open(&[(&[0], &[1]), (&[1], &[2]), (&[3], &[4])], &[&[1], &[-1], &[-7]]);
    assert!(is_p_pivotal(g.as_ref(), &cfg, &e(&[3], &[4]), &ev, 1).unwrap());
    match strip_alpha(g.as_ref(), &cfg, &e(&[3], &[4]), 4, &ev, 1).unwrap() {
        Strip::Witness { z, configuration } => {
            assert_eq!(z, v(&[1]));
            assert!(is_s_pivotal(g.as_ref(), &configuration, &z, &ev, 1).unwrap());
            assert!(!configuration.vertex(&v(&[-1])));
            assert!(!configuration.vertex(&v(&[1])));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn stripping_requires_the_event_and_a_pivotal_edge() {
    let g = z1();
    let ev = Event::arm(v(&[0]), 4);
    let cfg = open(&[(&[0], &[1])], &[]);
    assert!(matches!(strip_alpha(g.as_ref(), &cfg, &e(&[0], &[1]), 4, &ev, 1), Err(PivotalError::Precondition(_))));
}

fn random_config(f: &Frame, rng: &mut SplitMix, p: f64, s: f64) -> percolab::enhance::engine::DenseConfig {
    let mut d = percolab::enhance::engine::DenseConfig::zeros(f.window());
    for b in d.omega.iter_mut() {
        *b = rng.bernoulli(p);
    }
    for b in d.alpha.iter_mut() {
        *b = rng.bernoulli(s);
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn removal_order_does_not_decide_whether_a_witness_exists(seed in any::<u64>()) {
        let g = z2();
        let ev = Event::arm(v(&[0, 0]), 4);
        let mut f = Frame::new(g.as_ref(), &ev, 1).unwrap();
        let mut rng = SplitMix::new(seed);
        let mut d = random_config(&f, &mut rng, 0.55, 0.3);
        let edges: Vec<u32> = (0..f.window().num_edges() as u32).collect();
        for &id in &edges {
            if !f.p_pivotal(&mut d, id).unwrap() {
                continue;
            }
            d.omega[id as usize] = true;
            let ball = f.edge_ball(id, 4);
            let marked: Vec<u32> = (0..ball.len() as u32).filter(|&x| ball[x as usize] && d.alpha[x as usize]).collect();
            let reversed: Vec<u32> = marked.iter().rev().copied().collect();
            let (_, w1) = f.strip(&d, id, 4, Some(&marked)).unwrap();
            let (_, w2) = f.strip(&d, id, 4, Some(&reversed)).unwrap();
            prop_assert_eq!(w1.is_some(), w2.is_some());
            break;
        }
    }
}

#[test]
fn case_b_on_the_line() {
    let g = z1();
    let cfg = open(&[(&[0], &[1]), (&[1], &[2]), (&[2], &[3]), (&[3], &[4])], &[]);
    let res = surgery(g.as_ref(), &cfg, &e(&[0], &[1]), &v(&[0]), 1, 4).unwrap();
    assert_eq!(res.case, Case::B);
    assert_eq!(res.z, v(&[0]));
    let want: BTreeSet<Edge> = [e(&[-1], &[0]), e(&[0], &[1]), e(&[2], &[3]), e(&[3], &[4])].into_iter().collect();
    assert_eq!(res.omega_prime, want);
    let ev = Event::arm(v(&[0]), 4);
    assert!(is_s_pivotal(g.as_ref(), &res.configuration(), &res.z, &ev, 1).unwrap());
    verify_result(g.as_ref(), &cfg, &e(&[0], &[1]), &ev, 1, &res).unwrap();
}

#[test]
fn every_pivotal_configuration_of_a_line_window_admits_the_surgery() {
    let g = z1();
    let ev = Event::arm(v(&[0]), 4);
    let mut f = Frame::new(g.as_ref(), &ev, 1).unwrap();
    let near: Vec<u32> = (0..f.window().num_edges() as u32)
        .filter(|&id| {
            let (a, b) = f.window().edge_endpoints(id);
            f.depth(a).max(f.depth(b)) <= 5
        })
        .collect();
    assert_eq!(near.len(), 10);
    let mut checked = 0;
    for c in 0..1u32 << near.len() {
        let mut d = percolab::enhance::engine::DenseConfig::zeros(f.window());
        for (i, &id) in near.iter().enumerate() {
            d.omega[id as usize] = c >> i & 1 == 1;
        }
        for &id in &near {
            if f.p_pivotal(&mut d, id).unwrap() {
                let res = f.lemma(&d, id).unwrap();
                f.verify(&d, id, &res).unwrap();
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn case_a_in_the_plane() {
    let g = z2();
    let ev = Event::arm(v(&[0, 0]), 4);
    let path: Vec<(&[i64], &[i64])> = vec![(&[0, 0], &[1, 0]), (&[1, 0], &[2, 0]), (&[2, 0], &[3, 0]), (&[3, 0], &[4, 0])];
    let cfg = open(&path, &[]);
    let res = surgery(g.as_ref(), &cfg, &e(&[2, 0], &[3, 0]), &v(&[0, 0]), 1, 4).unwrap();
    assert_eq!(res.case, Case::A(ZRule::Endpoint));
    assert_eq!(res.x, v(&[2, 0]));
    assert!(res.z_ball.contains(&res.x));
    assert!(!res.z_ball.contains(&v(&[0, 0])));
    assert_eq!(res.u, Some(v(&[0, 0])));
    assert_eq!(res.v, Some(v(&[1, 0])));
    verify_result(g.as_ref(), &cfg, &e(&[2, 0], &[3, 0]), &ev, 1, &res).unwrap();

    let res = surgery(g.as_ref(), &cfg, &e(&[3, 0], &[4, 0]), &v(&[0, 0]), 1, 4).unwrap();
    assert_eq!(res.case, Case::A(ZRule::Geodesic));
    assert_eq!(res.z, v(&[2, 0]));
    assert!(res.z_ball.contains(&res.x));
    assert!(!res.z_ball.contains(&v(&[0, 0])));
    verify_result(g.as_ref(), &cfg, &e(&[3, 0], &[4, 0]), &ev, 1, &res).unwrap();
}

#[test]
fn surgery_rejects_bad_inputs() {
    let g = z2();
    let cfg = open(&[(&[0, 0], &[1, 0])], &[]);
    let far = e(&[5, 5], &[5, 6]);
    assert!(matches!(surgery(g.as_ref(), &cfg, &far, &v(&[0, 0]), 1, 4), Err(PivotalError::Precondition(_))));
    let cfg = open(&[(&[0, 0], &[1, 0]), (&[1, 0], &[2, 0]), (&[2, 0], &[3, 0])], &[]);
    assert!(matches!(surgery(g.as_ref(), &cfg, &e(&[2, 0], &[3, 0]), &v(&[0, 0]), 1, 3), Err(PivotalError::Precondition(_))));
    let cfg = open(&[(&[0, 0], &[1, 0]), (&[1, 0], &[2, 0]), (&[2, 0], &[3, 0]), (&[3, 0], &[4, 0])], &[&[1, 1]]);
    assert!(matches!(surgery(g.as_ref(), &cfg, &e(&[2, 0], &[3, 0]), &v(&[0, 0]), 1, 4), Err(PivotalError::Precondition(_))));
}

#[test]
fn connection_surgery_reduces_to_the_arm_surgery() {
    let g = z2();
    let (l, r) = (4usize, 1usize);
    let arm = Event::arm(v(&[0, 0]), l);
    let sphere: BTreeSet<Vertex> = percolab::graph::sphere(g.as_ref(), &v(&[0, 0]), l, 1000).unwrap();
    let connect = Event::connect(v(&[0, 0]), l + 3 * r + 1, set(&[&[0, 0]]), sphere);
    let mut fa = Frame::new(g.as_ref(), &arm, r).unwrap();
    let mut fc = Frame::new(g.as_ref(), &connect, r).unwrap();
    let mut rng = SplitMix::new(11);
    let mut compared = 0;
    while compared < 300 {
        let mut d = percolab::enhance::engine::DenseConfig::zeros(fa.window());
        for id in 0..d.omega.len() as u32 {
            let (a, b) = fa.window().edge_endpoints(id);
            d.omega[id as usize] = fa.depth(a).max(fa.depth(b)) <= l + r && rng.bernoulli(0.6);
        }
        let id = rng.below(d.omega.len()) as u32;
        if !fa.p_pivotal(&mut d, id).unwrap() {
            continue;
        }
        let cfg = fa.to_config(&d);
        let edge = fa.window().edge(id);
        let mut dc = fc.load(&cfg);
        let idc = fc.edge_id(&edge).unwrap();
        assert!(fc.p_pivotal(&mut dc, idc).unwrap());
        let ra = fa.lemma(&d, id).unwrap();
        let rc = fc.lemma(&dc, idc).unwrap();
        assert_eq!(matches!(ra.case, Case::B), matches!(rc.case, Case::B));
        assert_eq!((&ra.z, &ra.u, &ra.v), (&rc.z, &rc.u, &rc.v), "edge {edge}");
        assert_eq!(ra.omega_prime, rc.omega_prime);
        assert_eq!(ra.alpha_prime, rc.alpha_prime);
        fc.verify(&dc, idc, &rc).unwrap();
        compared += 1;
    }
}

#[test]
fn connection_case_b_uses_the_endpoint_near_a() {
    let g = z2();
    let a = set(&[&[0, 0]]);
    let b = set(&[&[5, 0]]);
    let ev = Event::connect(v(&[0, 0]), 9, a, b);
    let chain: Vec<(&[i64], &[i64])> = (0..5).map(|i| -> (&[i64], &[i64]) { (&[[0, 0], [1, 0], [2, 0], [3, 0], [4, 0]][i], &[[1, 0], [2, 0], [3, 0], [4, 0], [5, 0]][i]) }).collect();
    let cfg = open(&chain, &[]);
    let res = surgery_ab(g.as_ref(), &cfg, &e(&[1, 0], &[2, 0]), &ev, 1).unwrap();
    assert_eq!(res.case, Case::B);
    assert_eq!(res.z, v(&[1, 0]));
    verify_result(g.as_ref(), &cfg, &e(&[1, 0], &[2, 0]), &ev, 1, &res).unwrap();
    let res = surgery_ab(g.as_ref(), &cfg, &e(&[3, 0], &[4, 0]), &ev, 1).unwrap();
    assert_eq!(res.case, Case::A(ZRule::Endpoint));
    verify_result(g.as_ref(), &cfg, &e(&[3, 0], &[4, 0]), &ev, 1, &res).unwrap();
    let res = surgery_ab(g.as_ref(), &cfg, &e(&[4, 0], &[5, 0]), &ev, 1).unwrap();
    assert_eq!(res.case, Case::A(ZRule::Nice));
    assert_eq!(res.x, v(&[4, 0]));
    assert!(!res.z_ball.contains(&v(&[5, 0])));
    verify_result(g.as_ref(), &cfg, &e(&[4, 0], &[5, 0]), &ev, 1, &res).unwrap();
}

#[test]
fn connection_surgery_needs_separated_sets() {
    let g = z2();
    let ev = Event::connect(v(&[0, 0]), 9, set(&[&[0, 0]]), set(&[&[3, 0]]));
    let cfg = open(&[(&[0, 0], &[1, 0]), (&[1, 0], &[2, 0]), (&[2, 0], &[3, 0])], &[]);
    let err = surgery_ab(g.as_ref(), &cfg, &e(&[1, 0], &[2, 0]), &ev, 1).unwrap_err();
    assert!(matches!(err, PivotalError::Precondition(ref m) if m.contains("d(A, B)")), "{err}");
}

#[test]
fn lemma_on_the_binary_branching_tree() {
    let g = regular_tree(3).unwrap();
    let ev = Event::arm(g.root(), 4);
    let mut f = Frame::new(g.as_ref(), &ev, 1).unwrap();
    let mut rng = SplitMix::new(5);
    let mut done = 0;
    while done < 200 {
        let d = random_config(&f, &mut rng, 0.7, 0.2);
        let mut d = d;
        let id = rng.below(d.omega.len()) as u32;
        if !f.p_pivotal(&mut d, id).unwrap() {
            continue;
        }
        let res = f.lemma(&d, id).unwrap();
        f.verify(&d, id, &res).unwrap();
        done += 1;
    }
}

#[test]
fn witness_survives_the_sparse_round_trip() {
    let g = z2();
    let ev = Event::arm(v(&[0, 0]), 4);
    let cfg = open(&[(&[0, 0], &[0, 1]), (&[0, 1], &[0, 2]), (&[0, 2], &[0, 3]), (&[0, 3], &[0, 4])], &[&[0, 1]]);
    let res = lemma_witness(g.as_ref(), &cfg, &e(&[0, 2], &[0, 3]), &ev, 1).unwrap();
    assert!(is_s_pivotal(g.as_ref(), &res.configuration(), &res.z, &ev, 1).unwrap());
}

#[test]
fn failure_dumps_round_trip() {
    let dump = FailureDump {
        event: Event::connect(v(&[0, 0]), 9, set(&[&[0, 0], &[0, 1]]), set(&[&[5, 0]])),
        r: 2,
        edge: e(&[1, 0], &[2, 0]),
        claim: "z is s-pivotal in (ω′, α′)".into(),
        notes: vec![("z".into(), "(1,0)".into())],
        configuration: open(&[(&[0, 0], &[1, 0])], &[&[3, 3]]),
    };
    assert_eq!(FailureDump::from_text(&dump.to_text()).unwrap(), dump);
    let arm = Event::arm(v(&[0]), 4);
    assert_eq!(arm.to_string().parse::<Event>().unwrap(), arm);
}

#[test]
fn campaigns_produce_verified_witnesses() {
    let z2 = hypercubic(2).unwrap();
    let arm = surgery_campaign(z2.as_ref(), &Event::arm(v(&[0, 0]), 4), 1, 0.5, 0.3, 300, 1).unwrap();
    assert!(arm.passed(), "{:?}", arm.failures);
    assert_eq!(arm.instances, 300);
    assert_eq!(arm.strip + arm.case_a + arm.case_b, arm.instances);
    let connect = Event::connect(v(&[0, 0]), 8, set(&[&[0, 0]]), set(&[&[4, 0]]));
    let rep = surgery_campaign(z2.as_ref(), &connect, 1, 0.6, 0.3, 100, 2).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures);
    let again = surgery_campaign(z2.as_ref(), &connect, 1, 0.6, 0.3, 100, 2).unwrap();
    assert_eq!((rep.attempts, rep.case_a, rep.case_b), (again.attempts, again.case_a, again.case_b));
}
