use std::collections::BTreeSet;

use percolab::couple::{
    audit_conditions, choose_m_log_s, choose_m_s, display_bounds, extract_marginals, minimal_m_s, phat, run_coupling, run_coupling_with, Condition, CoupleError,
    CouplingParams, CouplingSource, CouplingTranscript, Event, MultiEdge, Record,
};
use percolab::cover::{builtin_pair, CoveringMap};
use percolab::enhance::exact::ExactModel;
use percolab::enhance::{grow_cluster, Configuration};
use percolab::graph::{ball, Edge, FiniteGraph, Vertex, DEFAULT_BALL_CAP};

fn pair(name: &str) -> CoveringMap {
    builtin_pair(name).unwrap().build().unwrap().2
}

fn root(map: &CoveringMap) -> Vertex {
    map.source().root()
}

fn k2_tight() -> (CoveringMap, CouplingParams) {
    let map = pair("z-k2");
    let (m, s) = minimal_m_s(&map, 1, 0.9, 3).unwrap();
    (map, CouplingParams::new(0.95, 0.9, 1, m, s, 4).unwrap())
}

/// `C_∞` recomputed by the growth engine from the extracted bits.
fn engine_cluster(map: &CoveringMap, t: &CouplingTranscript) -> BTreeSet<Vertex> {
    let m = extract_marginals(map, t, 1).unwrap();
    let mut cfg = Configuration::new();
    for (e, b) in m.omega_h {
        cfg.set_edge(e, b);
    }
    for (v, b) in m.alpha {
        cfg.set_vertex(v, b);
    }
    let o = t.o().unwrap().clone();
    grow_cluster(map.target().as_ref(), &BTreeSet::from([o]), &cfg, t.params.r, t.params.horizon).unwrap().vertices()
}

#[test]
fn phat_values() {
    assert_eq!(phat(0.5, 1), 0.5);
    assert!((phat(0.75, 2) - 0.5).abs() < 1e-15);
    assert_eq!(phat(0.0, 7), 0.0);
    assert_eq!(phat(1.0, 7), 1.0);
    for m in [1, 2, 5, 64, 256] {
        for p in [0.01, 0.1, 0.5, 0.9, 0.999] {
            let q = phat(p, m);
            assert!((1.0 - (1.0 - q).powi(m as i32) - p).abs() < 1e-12);
        }
    }
}

#[test]
fn explicit_choice_of_m_and_s() {
    assert_eq!(choose_m_s(4, 1, 0.1).unwrap().0, 64);
    let (m, log_s) = choose_m_log_s(3, 1, 0.1).unwrap();
    assert_eq!(m, 27);
    let want = 243.0 * (1.0 - 0.9f64.powf(1.0 / 27.0)).ln();
    assert!((log_s / want - 1.0).abs() < 1e-12);
    assert_eq!(choose_m_s(3, 1, 0.1).unwrap().1, 0.0);
    let (m, s) = choose_m_s(2, 1, 0.1).unwrap();
    assert_eq!(m, 8);
    assert!((s / (1.0 - 0.9f64.powf(0.125)).powi(32) - 1.0).abs() < 1e-12);
    let small = choose_m_s(2, 1, 1e-6).unwrap().1;
    assert!(small < choose_m_s(2, 1, 0.1).unwrap().1);
    assert_eq!(choose_m_s(4, 2, 0.1).unwrap().1, 0.0);
    assert!(choose_m_s(1, 1, 0.1).is_err());
}

#[test]
fn display_bounds_by_hand() {
    let k2 = pair("z-k2");
    let b = display_bounds(&k2, 1, 3).unwrap();
    assert_eq!((b.m_required, b.edge_exponent), (2, 8));
    let (m, s) = minimal_m_s(&k2, 1, 0.9, 3).unwrap();
    assert_eq!(m, 2);
    assert!((s - (1.0 - 0.1f64.sqrt()).powi(8)).abs() < 1e-15);
    assert!((s - 0.0477).abs() < 1e-4);

    let cyl = display_bounds(&pair("z2-cylinder3"), 2, 2).unwrap();
    assert_eq!((cyl.m_required, cyl.edge_exponent), (14, 196));

    let params = CouplingParams::new(0.5, 0.5, 1, 1, 0.0, 4).unwrap();
    assert!(params.check_display(&k2, 3).is_err());
    let params = CouplingParams::new(0.5, 0.5, 1, 2, 0.5, 4).unwrap();
    assert!(params.check_display(&k2, 3).is_err());
    assert!(CouplingParams::new(0.05, 0.1, 1, 2, 0.0, 4).is_err());
}

#[test]
fn full_percolation_covers_the_quotient() {
    let map = pair("z-k2");
    let params = CouplingParams::new(1.0, 1.0, 1, 2, 1.0, 4).unwrap();
    let t = run_coupling(&map, &root(&map), &params, 1, 0).unwrap();
    assert_eq!(t.c.len(), 2);
    assert!(t.enhancements() >= 1);
    assert!(audit_conditions(&map, &t).unwrap().passed());
}

#[test]
fn runs_pass_the_audit_and_match_the_growth_engine() {
    for (name, r, horizon, p) in [("z-k2", 1, 4, 0.95), ("z-c4", 2, 5, 0.7), ("z2-cylinder3", 2, 6, 0.6)] {
        let map = pair(name);
        let (m, s) = minimal_m_s(&map, r, 0.5, 2).unwrap();
        let params = CouplingParams::new(p, 0.5, r, m, s, horizon).unwrap();
        for replica in 0..150 {
            let t = run_coupling(&map, &root(&map), &params, 17, replica).unwrap();
            let report = audit_conditions(&map, &t).unwrap();
            assert!(report.passed(), "{name} replica {replica}: {}", report.line());
            assert_eq!(report.c, t.c);
            assert_eq!(report.c_prime, t.c_prime);
            let image: BTreeSet<Vertex> = t.c_prime.iter().map(|y| map.project(y)).collect();
            assert_eq!(image, t.c);
            assert_eq!(engine_cluster(&map, &t), t.c, "{name} replica {replica}");
        }
    }
}

/// `ω` open exactly on the edges of one ball, every `ω'` copy open, coins 0.
struct Scripted {
    open: BTreeSet<Edge>,
}

impl CouplingSource for Scripted {
    fn omega(&self, e: &Edge, _digest: u64, k: u32) -> bool {
        k == 1 && self.open.contains(e)
    }

    fn omega_prime(&self, _e: &Edge, _k: u32) -> bool {
        true
    }

    fn coin(&self, _u: &Vertex) -> f64 {
        0.0
    }
}

#[test]
fn forced_enhancement_adds_the_next_sphere() {
    let map = pair("z2-cylinder3");
    let h = map.target().clone();
    let o = map.project(&root(&map));
    let src = Scripted { open: ball(h.as_ref(), &o, 2, DEFAULT_BALL_CAP).unwrap().edges().clone() };
    let (m, _) = minimal_m_s(&map, 2, 0.5, 2).unwrap();
    let params = CouplingParams::new(0.99, 0.5, 2, m, 1e-100, 6).unwrap();
    let t = run_coupling_with(&map, &root(&map), &params, &src, 0, 0).unwrap();
    let b3: BTreeSet<Vertex> = ball(h.as_ref(), &o, 3, DEFAULT_BALL_CAP).unwrap().vertices().cloned().collect();
    assert_eq!(t.c, b3);
    assert_eq!(t.enhancements(), 1);
    assert!(t.events.iter().any(|r| matches!(r.event, Event::SExplore { substep: 5, .. })));
    let report = audit_conditions(&map, &t).unwrap();
    assert!(report.passed(), "{}", report.line());
    let image: BTreeSet<Vertex> = t.c_prime.iter().map(|y| map.project(y)).collect();
    assert_eq!(image, b3);
}

#[test]
fn transcripts_round_trip_and_replay() {
    let (map, params) = k2_tight();
    let t = run_coupling(&map, &root(&map), &params, 5, 9).unwrap();
    let text = t.to_lines();
    assert!(text.starts_with("0 0 (0) start (0)\n"));
    let parsed = CouplingTranscript::from_lines(&text, params, 5, 9).unwrap();
    assert_eq!(parsed.to_lines(), text);
    let report = audit_conditions(&map, &parsed).unwrap();
    assert!(report.passed());
    assert_eq!(report.c, t.c);
    assert_eq!(run_coupling(&map, &root(&map), &params, 5, 9).unwrap().to_lines(), text);
    assert!(matches!(CouplingTranscript::from_lines("1 4 (0)-(1) p-explore nonsense", params, 0, 0), Err(CoupleError::Parse { line: 1, .. })));
    let rec: Record = "3 5 (0)-(1)#2 s-explore 1".parse().unwrap();
    assert_eq!(rec.to_string(), "3 5 (0)-(1)#2 s-explore 1");
}

#[test]
fn flipped_eta_bit_breaks_connectivity() {
    let (map, params) = k2_tight();
    let mut tried = 0;
    for replica in 0..200 {
        let mut t = run_coupling(&map, &root(&map), &params, 3, replica).unwrap();
        let Some(i) = t.events.iter().position(|r| matches!(&r.event, Event::PExplore { copies, .. } if copies.iter().filter(|&&b| b).count() == 1))
        else {
            continue;
        };
        if let Event::PExplore { copies, .. } = &mut t.events[i].event {
            copies.iter_mut().for_each(|b| *b = false);
        }
        let report = audit_conditions(&map, &t).unwrap();
        let v = report.violation.expect("corruption must be detected");
        assert_eq!(v.condition, Condition::C);
        assert_eq!(v.event, i);
        tried += 1;
    }
    assert!(tried > 10);
}

#[test]
fn forged_s_exploration_breaks_the_copy_budget() {
    let (map, params) = k2_tight();
    let mut tried = 0;
    for replica in 0..50 {
        let mut t = run_coupling(&map, &root(&map), &params, 4, replica).unwrap();
        let Some(i) = t.events.iter().position(|r| matches!(r.event, Event::SExplore { .. })) else {
            continue;
        };
        let Event::SExplore { substep, copy, .. } = t.events[i].event.clone() else { unreachable!() };
        let forged = Record { step: t.events[i].step, event: Event::SExplore { substep, copy: MultiEdge { base: copy.base, copy: copy.copy + 1 }, value: true } };
        t.events.insert(i + 1, forged);
        let v = audit_conditions(&map, &t).unwrap().violation.expect("forgery must be detected");
        assert_eq!(v.condition, Condition::D);
        tried += 1;
    }
    assert!(tried > 10);
}

#[test]
fn s_explored_image_must_be_p_explored() {
    let (map, params) = k2_tight();
    let mut t = run_coupling(&map, &root(&map), &params, 4, 0).unwrap();
    t.events.truncate(1);
    t.events.push(Record { step: 2, event: Event::Center { u: Vertex::new([0]), x: Vertex::new([0]) } });
    t.events.push(Record { step: 2, event: Event::SExplore { substep: 4, copy: MultiEdge { base: Edge::new(Vertex::new([0]), Vertex::new([1])), copy: 1 }, value: true } });
    t.c.clear();
    t.c_prime.clear();
    assert_eq!(audit_conditions(&map, &t).unwrap().violation.unwrap().condition, Condition::B);
}

#[test]
fn zero_marks_give_the_bond_cluster_law() {
    let map = pair("z-c4");
    let (m, _) = minimal_m_s(&map, 2, 0.5, 2).unwrap();
    let params = CouplingParams::new(0.5, 0.5, 2, m, 0.0, 5).unwrap();
    let h = map.target().clone();
    let o = map.project(&root(&map));
    let verts: Vec<Vertex> = ball(h.as_ref(), &o, 2, DEFAULT_BALL_CAP).unwrap().vertices().cloned().collect();
    let (c4, _) = FiniteGraph::from_subgraph("c4", h.as_ref(), &o, &verts).unwrap();
    let model = ExactModel::from_graph(&c4, &[], &[0], 2).unwrap();
    let by_size = model.counts(5, |mask| mask.count_ones() as usize);
    let half = percolab::enhance::exact::rational(0.5);
    let zero = percolab::enhance::exact::rational(0.0);
    let n = 4000;
    let mut hist = [0usize; 5];
    for replica in 0..n {
        let t = run_coupling(&map, &root(&map), &params, 23, replica).unwrap();
        assert!(t.alpha_defined().values().all(|&a| !a));
        hist[t.c.len()] += 1;
    }
    for k in 1..=4 {
        let exact = percolab::enhance::exact::to_f64(&by_size[k].eval(&half, &zero));
        let est = hist[k] as f64 / n as f64;
        let se = (exact * (1.0 - exact) / n as f64).sqrt();
        assert!((est - exact).abs() < 4.0 * se, "size {k}: {est} vs {exact}");
    }
}

#[test]
fn collapsed_bits_agree_on_p_explored_lifts() {
    let (map, params) = k2_tight();
    for replica in 0..100 {
        let t = run_coupling(&map, &root(&map), &params, 8, replica).unwrap();
        let m = extract_marginals(&map, &t, 6).unwrap();
        for rec in &t.events {
            if let Event::PExplore { edge, lift, copies, .. } = &rec.event {
                let collapsed = copies.iter().any(|&b| b);
                assert_eq!(m.omega_h[edge], collapsed);
                assert_eq!(m.eta_g[lift], collapsed);
            }
        }
        for (u, a) in t.alpha_defined() {
            assert_eq!(m.alpha[&u], a);
        }
    }
}

#[test]
fn collapsed_omega_has_mean_p() {
    let (map, params) = k2_tight();
    let n = 20_000u64;
    let (mut omega, mut alpha, mut eta) = (0usize, 0usize, 0usize);
    let far = Edge::new(Vertex::new([4]), Vertex::new([5]));
    for replica in 0..n {
        let t = run_coupling(&map, &root(&map), &params, 99, replica).unwrap();
        let m = extract_marginals(&map, &t, 5).unwrap();
        omega += m.omega_h.values().filter(|&&b| b).count();
        alpha += m.alpha.values().filter(|&&b| b).count();
        eta += m.eta_g[&far] as usize;
    }
    let check = |hits: usize, trials: f64, p: f64| {
        let est = hits as f64 / trials;
        let se = (p * (1.0 - p) / trials).sqrt();
        assert!((est - p).abs() < 4.0 * se, "{est} vs {p}");
    };
    check(omega, n as f64, params.p);
    check(alpha, 2.0 * n as f64, params.s);
    check(eta, n as f64, params.p);
}
