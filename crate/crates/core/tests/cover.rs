use std::collections::BTreeSet;
use std::sync::Arc;

use percolab::cover::{builtin_pair, fingerprint, fingerprint_classes, quotient, CoverError, CoveringMap, GroupAction, LiftedTree, Tree, BUILTIN_PAIRS};
use percolab::graph::{ball, cycle, hypercubic, product, Edge, Vertex, DEFAULT_BALL_CAP};

fn v(k: &[i64]) -> Vertex {
    Vertex::from_slice(k)
}

fn z_mod(n: i64) -> CoveringMap {
    quotient(hypercubic(1).unwrap(), GroupAction::translate(1, 0, n).unwrap()).unwrap().1
}

fn cylinder() -> CoveringMap {
    builtin_pair("z2-cylinder3").unwrap().build().unwrap().2
}

#[test]
fn z_mod_two_is_k2() {
    let m = z_mod(2);
    let h = m.target();
    assert_eq!(h.root(), v(&[0]));
    assert_eq!(h.neighbors(&v(&[0])), vec![v(&[1])]);
    assert_eq!(h.neighbors(&v(&[1])), vec![v(&[0])]);
    assert!(h.contains(&v(&[1])) && !h.contains(&v(&[2])));
}

#[test]
fn cylinder_quotient_is_isomorphic_to_c3_times_z() {
    let m = cylinder();
    let h = m.target().clone();
    let c3z = product(cycle(3).unwrap(), hypercubic(1).unwrap());
    let iso = |x: &Vertex| Vertex::from_slice(&[1, x.key()[0], x.key()[1]]);
    let b = ball(h.as_ref(), &h.root(), 5, DEFAULT_BALL_CAP).unwrap();
    let bc = ball(c3z.as_ref(), &c3z.root(), 5, DEFAULT_BALL_CAP).unwrap();
    assert_eq!(b.len(), bc.len());
    for x in b.vertices() {
        let img: Vec<Vertex> = h.neighbors(x).iter().map(iso).collect();
        let mut sorted = img.clone();
        sorted.sort();
        assert_eq!(sorted, c3z.neighbors(&iso(x)), "adjacency differs at {x}");
        assert_eq!(fingerprint(h.as_ref(), x, 3).unwrap(), fingerprint(c3z.as_ref(), &iso(x), 3).unwrap());
    }
}

#[test]
fn trivial_and_non_automorphic_actions_are_rejected() {
    assert!(matches!(GroupAction::translate(1, 0, 0), Err(CoverError::InvalidAction(_))));
    assert!(matches!(GroupAction::translations(1, vec![vec![0]]), Err(CoverError::InvalidAction(_))));
    let tree = builtin_pair("tree3-fold").unwrap().graph_spec().unwrap().build().unwrap();
    let shift = GroupAction::finite(vec![percolab::cover::Generator::translation(vec![1, 0])], 8).unwrap();
    assert!(matches!(quotient(tree, shift), Err(CoverError::NotAutomorphism { .. })));
}

#[test]
fn weak_covering_checks() {
    assert!(z_mod(2).is_weak_covering(6).unwrap().passed());
    let r = cylinder().is_weak_covering(4).unwrap();
    assert!(r.passed(), "{}", r.line());
    assert!(r.line().ends_with("result=pass"));

    let z = hypercubic(1).unwrap();
    let k2 = z_mod(2).target().clone();
    let corrupted = CoveringMap::new(
        z,
        k2,
        Arc::new(|x: &Vertex| if x.key()[0] == 3 { v(&[0]) } else { v(&[x.key()[0].rem_euclid(2)]) }),
        None,
    );
    let r = corrupted.is_weak_covering(4).unwrap();
    assert!(!r.passed());
    assert!(r.line().contains("result=fail witness="));
}

#[test]
fn strong_covering_checks() {
    let r = z_mod(2).is_strong_covering(4).unwrap();
    assert_eq!(r.witness.as_deref(), Some("non-unique-lift:(-4)->(1)"));
    assert!(z_mod(4).is_strong_covering(8).unwrap().passed());
    assert!(CoveringMap::identity(hypercubic(2).unwrap()).is_strong_covering(3).unwrap().passed());
}

#[test]
fn lift_single_vertex_and_edge() {
    let m = z_mod(2);
    let lt = m.lift_tree(&Tree::single(v(&[0])), &v(&[0])).unwrap();
    assert_eq!(lt.vertices(), BTreeSet::from([v(&[0])]));
    let t = Tree { root: v(&[0]), edges: BTreeSet::from([Edge::new(v(&[0]), v(&[1]))]) };
    let lt = m.lift_tree(&t, &v(&[0])).unwrap();
    assert!(lt.vertices().contains(&v(&[0])));
    assert_eq!(lt.vertices().len(), 2);
    m.verify_lift(&t, &lt).unwrap();
}

#[test]
fn lift_path_in_cylinder() {
    let m = cylinder();
    let t = Tree { root: v(&[0, 0]), edges: BTreeSet::from([Edge::new(v(&[0, 0]), v(&[1, 0])), Edge::new(v(&[0, 0]), v(&[2, 0]))]) };
    let x = v(&[3, 0]);
    let lt = m.lift_tree(&t, &x).unwrap();
    assert!(lt.vertices().contains(&x));
    let projected: BTreeSet<Vertex> = lt.vertices().iter().map(|y| m.project(y)).collect();
    assert_eq!(projected, t.vertices());
    assert_eq!(lt.vertices().len(), 3);
}

#[test]
fn lift_rejects_non_tree_and_foreign_base() {
    let m = z_mod(4);
    let cyc = Tree {
        root: v(&[0]),
        edges: (0..4).map(|i| Edge::new(v(&[i]), v(&[(i + 1) % 4]))).collect(),
    };
    assert_eq!(m.lift_tree(&cyc, &v(&[0])), Err(CoverError::NotATree));
    let t = Tree::single(v(&[1]));
    assert!(matches!(m.lift_tree(&t, &v(&[0])), Err(CoverError::Precondition(_))));
}

#[test]
fn disjoint_lifts_on_the_line() {
    let m = z_mod(2);
    let t = Tree { root: v(&[0]), edges: BTreeSet::from([Edge::new(v(&[0]), v(&[1]))]) };
    let forced = LiftedTree {
        base: v(&[0]),
        lift: [(v(&[0]), v(&[0])), (v(&[1]), v(&[1]))].into_iter().collect(),
        edges: BTreeSet::from([Edge::new(v(&[0]), v(&[1]))]),
    };
    let ty = m.translate_lift(&t, &forced, &v(&[2]), 4).unwrap();
    assert_eq!(ty.vertices(), BTreeSet::from([v(&[2]), v(&[3])]));

    let (a, b) = m.disjoint_lifts(&t, &v(&[0]), &v(&[2]), 4).unwrap();
    assert!(a.vertices().is_disjoint(&b.vertices()));
    assert!(matches!(m.disjoint_lifts(&t, &v(&[0]), &v(&[0]), 4), Err(CoverError::Precondition(_))));
    assert!(matches!(m.disjoint_lifts(&t, &v(&[0]), &v(&[1]), 4), Err(CoverError::Precondition(_))));
    assert_eq!(m.disjoint_lifts(&t, &v(&[0]), &v(&[40]), 3), Err(CoverError::ElementNotFound { max_len: 3 }));
}

#[test]
fn disjoint_lifts_in_cylinder() {
    let m = cylinder();
    let h = m.target().clone();
    let t = Tree::bfs_spanning(h.as_ref(), &h.root(), 2).unwrap();
    let (a, b) = m.disjoint_lifts(&t, &v(&[0, 0]), &v(&[3, 0]), 4).unwrap();
    assert_eq!(a.vertices().len(), t.vertices().len());
    assert!(a.vertices().is_disjoint(&b.vertices()));
    m.verify_lift(&t, &b).unwrap();
}

#[test]
fn strong_covers_lift_disjointly_without_the_action() {
    for n in [3, 4, 5] {
        let m = z_mod(n);
        let h = m.target().clone();
        for r in 0..=(n as usize / 2) {
            for root in 0..n {
                let t = Tree::bfs_spanning(h.as_ref(), &v(&[root]), r).unwrap();
                let x = v(&[root]);
                for k in [-2, -1, 1, 2] {
                    let y = v(&[root + k * n]);
                    let (a, b) = m.disjoint_lifts_strong(&t, &x, &y).unwrap();
                    assert!(a.vertices().is_disjoint(&b.vertices()));
                }
            }
        }
    }
    let pair = builtin_pair("z2-cylinder3").unwrap();
    let (g, _, m) = pair.build().unwrap();
    assert!(m.is_strong_covering(4).unwrap().passed());
    let z2_mod4 = quotient(g, GroupAction::translate(2, 0, 4).unwrap()).unwrap().1;
    assert!(z2_mod4.is_strong_covering(4).unwrap().passed());
    let h = z2_mod4.target().clone();
    let t = Tree::bfs_spanning(h.as_ref(), &h.root(), 2).unwrap();
    let (a, b) = z2_mod4.disjoint_lifts_strong(&t, &v(&[0, 0]), &v(&[4, 0])).unwrap();
    assert!(a.vertices().is_disjoint(&b.vertices()));
    let z2_mod2 = quotient(hypercubic(2).unwrap(), GroupAction::translate(2, 0, 2).unwrap()).unwrap().1;
    assert!(!z2_mod2.is_strong_covering(4).unwrap().passed());
}

#[test]
fn tame_radius_values() {
    assert_eq!(z_mod(2).tame_radius(3, 10).unwrap(), 2);
    assert_eq!(cylinder().tame_radius(4, 10).unwrap(), 3);
    let id = CoveringMap::identity(hypercubic(1).unwrap());
    assert!(matches!(id.tame_radius(2, 10), Err(CoverError::NotTame { cap: 10, .. })));
}

#[test]
fn choose_r_is_half_the_tame_radius() {
    assert_eq!(z_mod(2).choose_r(3, 10).unwrap(), 1);
    assert_eq!(cylinder().choose_r(2, 10).unwrap(), 2);
    assert_eq!(z_mod(7).tame_radius(3, 10).unwrap(), 7);
    assert_eq!(z_mod(7).choose_r(3, 10).unwrap(), 4);
}

#[test]
fn pattern_sets() {
    let z = z_mod(2).pattern_set(&v(&[0]), 1).unwrap();
    assert!(z.verified());
    let expected: BTreeSet<Vertex> = (-3..=3).map(|i| v(&[i])).collect();
    assert_eq!(z.vertices, expected);

    let m = cylinder();
    let z = m.pattern_set(&v(&[0, 0]), 2).unwrap();
    assert!(z.verified() && z.interior_rich());
    let small = m.pattern_set(&v(&[0, 0]), 1).unwrap();
    assert!(!small.verified());
    assert!(small.sphere_failures.contains(&v(&[0, 2])));
    assert!(matches!(m.pattern_set(&v(&[0, 0]), 0), Err(CoverError::Precondition(_))));
}

#[test]
fn pattern_set_sphere_property_by_enumeration() {
    let m = cylinder();
    let g = m.source().clone();
    let h = m.target().clone();
    let x = v(&[1, -2]);
    let z = m.pattern_set(&x, 2).unwrap();
    let px = m.project(&x);
    let s3 = percolab::graph::sphere(h.as_ref(), &px, 3, DEFAULT_BALL_CAP).unwrap();
    let big = ball(g.as_ref(), &x, 8, DEFAULT_BALL_CAP).unwrap();
    for u in &s3 {
        let adjacent = m
            .fibre(u, &big)
            .into_iter()
            .filter(|y| g.neighbors(y).iter().any(|w| z.vertices.contains(w)))
            .count();
        assert!(adjacent >= 2, "{u}");
    }
}

#[test]
fn fibres() {
    let m = z_mod(2);
    let b = ball(m.source().as_ref(), &v(&[0]), 4, DEFAULT_BALL_CAP).unwrap();
    let f: Vec<i64> = m.fibre(&v(&[0]), &b).iter().map(|x| x.key()[0]).collect();
    assert_eq!(f, vec![-4, -2, 0, 2, 4]);

    let id = CoveringMap::identity(hypercubic(1).unwrap());
    assert_eq!(id.fibre(&v(&[1]), &b).len(), 1);
    assert!(id.fibre(&v(&[9]), &b).is_empty());

    let m = cylinder();
    let b = ball(m.source().as_ref(), &v(&[0, 0]), 3, DEFAULT_BALL_CAP).unwrap();
    assert_eq!(m.fibre(&v(&[0, 0]), &b), BTreeSet::from([v(&[-3, 0]), v(&[0, 0]), v(&[3, 0])]));
}

#[test]
fn fibre_round_trip() {
    let m = cylinder();
    let h = m.target().clone();
    let gb = ball(m.source().as_ref(), &v(&[0, 0]), 6, DEFAULT_BALL_CAP).unwrap();
    let hb = ball(h.as_ref(), &h.root(), 3, DEFAULT_BALL_CAP).unwrap();
    for u in hb.vertices() {
        let f = m.fibre(u, &gb);
        assert!(!f.is_empty());
        assert!(f.iter().all(|y| m.project(y) == *u));
    }
}

#[test]
fn builtin_pairs_build_and_fold_is_not_quasi_transitive() {
    for p in BUILTIN_PAIRS {
        let (g, h, m) = p.build().unwrap();
        assert!(m.is_weak_covering(3).unwrap().passed(), "{}", p.name);
        let qt = fingerprint_classes(h.as_ref(), 3, 3).unwrap() == fingerprint_classes(h.as_ref(), 6, 3).unwrap();
        assert_eq!(qt, p.name != "tree3-fold", "{}", p.name);
        assert_eq!(fingerprint_classes(g.as_ref(), 3, 3).unwrap(), fingerprint_classes(g.as_ref(), 6, 3).unwrap());
    }
    let fold = builtin_pair("tree3-fold").unwrap();
    let (_, h, _) = fold.build().unwrap();
    assert_eq!(h.neighbors(&h.root()).len(), 2);
    assert!(builtin_pair("nope").is_err());
}

#[test]
fn free_actions_pass_the_spot_check() {
    let a = GroupAction::translate(2, 0, 3).unwrap();
    a.check_free(hypercubic(2).unwrap().as_ref(), 2, 4).unwrap();
}
