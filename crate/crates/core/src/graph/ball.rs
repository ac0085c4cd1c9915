use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rustc_hash::FxHashMap;

use super::{Edge, Graph, GraphError, Vertex};

/// The ball `B_r(center)` with exact distances and its internal edges.
#[derive(Debug, Clone)]
pub struct FiniteBall {
    center: Vertex,
    radius: usize,
    dist: BTreeMap<Vertex, usize>,
    edges: BTreeSet<Edge>,
}

impl FiniteBall {
    pub fn center(&self) -> &Vertex {
        &self.center
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.dist.contains_key(v)
    }

    pub fn distance(&self, v: &Vertex) -> Option<usize> {
        self.dist.get(v).copied()
    }

    /// Vertices in key order.
    pub fn vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.dist.keys()
    }

    /// `(vertex, distance)` pairs in key order.
    pub fn iter(&self) -> impl Iterator<Item = (&Vertex, usize)> {
        self.dist.iter().map(|(v, &d)| (v, d))
    }

    /// Edges with both endpoints in the ball, in canonical order.
    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn shell(&self, k: usize) -> BTreeSet<Vertex> {
        self.dist.iter().filter(|(_, &d)| d == k).map(|(v, _)| v.clone()).collect()
    }

    /// Line records `vertex-key<TAB>distance`, in key order.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (v, d) in self.iter() {
            s.push_str(&format!("{v}\t{d}\n"));
        }
        s
    }
}

/// BFS distances from a set of sources up to `r`, with a size cap.
pub fn bfs_from_set<'a>(
    g: &dyn Graph,
    sources: impl IntoIterator<Item = &'a Vertex>,
    r: usize,
    cap: usize,
) -> Result<FxHashMap<Vertex, usize>, GraphError> {
    let mut dist: FxHashMap<Vertex, usize> = FxHashMap::default();
    let mut q = VecDeque::new();
    for s in sources {
        if dist.insert(s.clone(), 0).is_none() {
            q.push_back(s.clone());
        }
    }
    while let Some(v) = q.pop_front() {
        let d = dist[&v];
        if d == r {
            continue;
        }
        for w in g.neighbors(&v) {
            if !dist.contains_key(&w) {
                if dist.len() >= cap {
                    return Err(GraphError::CapExceeded { cap });
                }
                dist.insert(w.clone(), d + 1);
                q.push_back(w);
            }
        }
    }
    Ok(dist)
}

pub fn ball(g: &dyn Graph, x: &Vertex, r: usize, cap: usize) -> Result<FiniteBall, GraphError> {
    let dist = bfs_from_set(g, [x], r, cap)?;
    let mut edges = BTreeSet::new();
    for v in dist.keys() {
        for w in g.neighbors(v) {
            if v < &w && dist.contains_key(&w) {
                edges.insert(Edge::new(v.clone(), w));
            }
        }
    }
    Ok(FiniteBall { center: x.clone(), radius: r, dist: dist.into_iter().collect(), edges })
}

/// Vertices at distance at most `r` from the set `a`.
pub fn ball_of_set(g: &dyn Graph, a: &BTreeSet<Vertex>, r: usize, cap: usize) -> Result<BTreeMap<Vertex, usize>, GraphError> {
    Ok(bfs_from_set(g, a, r, cap)?.into_iter().collect())
}

pub fn sphere(g: &dyn Graph, x: &Vertex, r: usize, cap: usize) -> Result<BTreeSet<Vertex>, GraphError> {
    let dist = bfs_from_set(g, [x], r, cap)?;
    Ok(dist.into_iter().filter(|&(_, d)| d == r).map(|(v, _)| v).collect())
}

/// Edges joining `S_r(x)` to `S_{r+1}(x)`.
pub fn edge_sphere(g: &dyn Graph, x: &Vertex, r: usize, cap: usize) -> Result<BTreeSet<Edge>, GraphError> {
    let dist = bfs_from_set(g, [x], r + 1, cap)?;
    let mut out = BTreeSet::new();
    for (v, &d) in &dist {
        if d == r {
            for w in g.neighbors(v) {
                if dist.get(&w) == Some(&(r + 1)) {
                    out.insert(Edge::new(v.clone(), w));
                }
            }
        }
    }
    Ok(out)
}

/// Exact distance if at most `cap`, otherwise `None`.
pub fn graph_distance(g: &dyn Graph, x: &Vertex, y: &Vertex, cap: usize) -> Option<usize> {
    if x == y {
        return Some(0);
    }
    let mut seen: FxHashMap<Vertex, usize> = FxHashMap::default();
    seen.insert(x.clone(), 0);
    let mut q = VecDeque::from([x.clone()]);
    while let Some(v) = q.pop_front() {
        let d = seen[&v];
        if d == cap {
            continue;
        }
        for w in g.neighbors(&v) {
            if &w == y {
                return Some(d + 1);
            }
            if !seen.contains_key(&w) {
                seen.insert(w.clone(), d + 1);
                q.push_back(w);
            }
        }
    }
    None
}

/// Edges with both endpoints in `set`.
pub fn induced_edges(g: &dyn Graph, set: &BTreeSet<Vertex>) -> BTreeSet<Edge> {
    let mut out = BTreeSet::new();
    for v in set {
        for w in g.neighbors(v) {
            if v < &w && set.contains(&w) {
                out.insert(Edge::new(v.clone(), w));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle, hypercubic, regular_tree};

    #[test]
    fn ball_sizes() {
        let z2 = hypercubic(2).unwrap();
        let b = ball(z2.as_ref(), &z2.root(), 1, 1000).unwrap();
        assert_eq!((b.len(), b.edges().len()), (5, 4));
        let t3 = regular_tree(3).unwrap();
        assert_eq!(ball(t3.as_ref(), &t3.root(), 2, 1000).unwrap().len(), 10);
        let z3 = hypercubic(3).unwrap();
        assert_eq!(ball(z3.as_ref(), &z3.root(), 2, 1000).unwrap().len(), 25);
    }

    #[test]
    fn spheres_and_edge_spheres() {
        let z = hypercubic(1).unwrap();
        let s: Vec<String> = sphere(z.as_ref(), &z.root(), 3, 100).unwrap().iter().map(|v| v.to_string()).collect();
        assert_eq!(s, vec!["(-3)", "(3)"]);
        let es: Vec<String> = edge_sphere(z.as_ref(), &z.root(), 1, 100).unwrap().iter().map(|e| e.to_string()).collect();
        assert_eq!(es, vec!["(-2)-(-1)", "(1)-(2)"]);
        let z2 = hypercubic(2).unwrap();
        assert_eq!(sphere(z2.as_ref(), &z2.root(), 1, 100).unwrap().len(), 4);
        assert_eq!(edge_sphere(z2.as_ref(), &z2.root(), 0, 100).unwrap().len(), 4);
        let t3 = regular_tree(3).unwrap();
        assert_eq!(sphere(t3.as_ref(), &t3.root(), 2, 100).unwrap().len(), 6);
        assert_eq!(edge_sphere(t3.as_ref(), &t3.root(), 1, 100).unwrap().len(), 6);
    }

    #[test]
    fn distances() {
        let z2 = hypercubic(2).unwrap();
        assert_eq!(graph_distance(z2.as_ref(), &Vertex::new([0, 0]), &Vertex::new([2, 1]), 10), Some(3));
        assert_eq!(graph_distance(z2.as_ref(), &Vertex::new([0, 0]), &Vertex::new([2, 1]), 2), None);
        assert_eq!(graph_distance(z2.as_ref(), &Vertex::new([4, 4]), &Vertex::new([4, 4]), 0), Some(0));
        let c6 = cycle(6).unwrap();
        assert_eq!(graph_distance(c6.as_ref(), &Vertex::new([0]), &Vertex::new([3]), 10), Some(3));
    }

    #[test]
    fn cap_is_enforced() {
        let z2 = hypercubic(2).unwrap();
        assert!(matches!(ball(z2.as_ref(), &z2.root(), 10, 50), Err(GraphError::CapExceeded { cap: 50 })));
    }

    #[test]
    fn ball_is_disjoint_union_of_spheres_and_dump_format() {
        let z2 = hypercubic(2).unwrap();
        let b = ball(z2.as_ref(), &z2.root(), 3, 1000).unwrap();
        let mut total = 0;
        for k in 0..=3 {
            let s = sphere(z2.as_ref(), &z2.root(), k, 1000).unwrap();
            assert_eq!(s, b.shell(k));
            total += s.len();
        }
        assert_eq!(total, b.len());
        let internal = b.edges();
        for e in edge_sphere(z2.as_ref(), &z2.root(), 3, 1000).unwrap() {
            assert!(!internal.contains(&e));
        }
        assert!(b.dump().starts_with("(-3,0)\t3\n"));
    }
}
