use std::collections::VecDeque;
use std::sync::Arc;

use rustc_hash::FxHashMap;

use super::{Graph, GraphError, GraphRef, Vertex};

/// The lattice Z^d with nearest-neighbor edges.
#[derive(Debug, Clone)]
pub struct Hypercubic {
    d: usize,
}

impl Hypercubic {
    pub fn new(d: usize) -> Result<Self, GraphError> {
        if d == 0 {
            return Err(GraphError::InvalidParameter("hypercubic dimension must be at least 1".into()));
        }
        Ok(Hypercubic { d })
    }

    pub fn dim(&self) -> usize {
        self.d
    }
}

impl Graph for Hypercubic {
    fn name(&self) -> String {
        format!("hypercubic({})", self.d)
    }

    fn root(&self) -> Vertex {
        Vertex::new(std::iter::repeat_n(0, self.d))
    }

    fn degree_bound(&self) -> usize {
        2 * self.d
    }

    fn neighbors(&self, v: &Vertex) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(2 * self.d);
        for i in 0..self.d {
            let mut w = v.clone();
            w.key_mut()[i] -= 1;
            out.push(w);
        }
        for i in 0..self.d {
            let mut w = v.clone();
            w.key_mut()[i] += 1;
            out.push(w);
        }
        out.sort();
        out
    }

    fn contains(&self, v: &Vertex) -> bool {
        v.len() == self.d
    }

    fn root_distance(&self, v: &Vertex) -> Option<usize> {
        Some(v.key().iter().map(|x| x.unsigned_abs() as usize).sum())
    }
}

/// The d-regular tree, as reduced words over `0..d` with no letter repeated twice in a row.
#[derive(Debug, Clone)]
pub struct RegularTree {
    d: usize,
}

impl RegularTree {
    pub fn new(d: usize) -> Result<Self, GraphError> {
        if d < 2 {
            return Err(GraphError::InvalidParameter("regular tree degree must be at least 2".into()));
        }
        Ok(RegularTree { d })
    }
}

impl Graph for RegularTree {
    fn name(&self) -> String {
        format!("tree({})", self.d)
    }

    fn root(&self) -> Vertex {
        Vertex::new([])
    }

    fn degree_bound(&self) -> usize {
        self.d
    }

    fn neighbors(&self, v: &Vertex) -> Vec<Vertex> {
        let key = v.key();
        let last = key.last().copied();
        let mut out = Vec::with_capacity(self.d);
        if !key.is_empty() {
            out.push(Vertex::from_slice(&key[..key.len() - 1]));
        }
        for a in 0..self.d as i64 {
            if Some(a) != last {
                let mut w = v.clone();
                w.key_mut().push(a);
                out.push(w);
            }
        }
        out
    }

    fn contains(&self, v: &Vertex) -> bool {
        let k = v.key();
        k.iter().all(|&a| a >= 0 && (a as usize) < self.d) && k.windows(2).all(|w| w[0] != w[1])
    }

    fn root_distance(&self, v: &Vertex) -> Option<usize> {
        Some(v.len())
    }

    fn exponential_growth(&self) -> bool {
        self.d > 2
    }
}

/// Cayley graph of a free product of cyclic groups.
///
/// `orders[g]` is the order of generator `g`, with 0 meaning infinite order.
/// Elements are reduced words of syllables `(g, e)` flattened to `[g0, e0, g1, e1, ...]`;
/// consecutive syllables use distinct generators and exponents are normalised to
/// `1..order` (finite order) or nonzero (infinite order).
#[derive(Debug, Clone)]
pub struct FreeProduct {
    orders: Vec<u32>,
}

impl FreeProduct {
    pub fn new(orders: Vec<u32>) -> Result<Self, GraphError> {
        if orders.is_empty() {
            return Err(GraphError::InvalidParameter("cayley graph needs at least one generator".into()));
        }
        if orders.contains(&1) {
            return Err(GraphError::InvalidParameter("generator of order 1 is the identity".into()));
        }
        Ok(FreeProduct { orders })
    }

    fn step(&self, v: &Vertex, g: usize, delta: i64) -> Vertex {
        let mut key: Vec<i64> = v.key().to_vec();
        let ord = self.orders[g] as i64;
        let normalise = |e: i64| if ord == 0 { e } else { e.rem_euclid(ord) };
        let n = key.len();
        if n >= 2 && key[n - 2] == g as i64 {
            let e = normalise(key[n - 1] + delta);
            if e == 0 {
                key.truncate(n - 2);
            } else {
                key[n - 1] = e;
            }
        } else {
            key.push(g as i64);
            key.push(normalise(delta));
        }
        Vertex::new(key)
    }
}

impl Graph for FreeProduct {
    fn name(&self) -> String {
        let parts: Vec<String> = self.orders.iter().map(|o| o.to_string()).collect();
        format!("cayley({})", parts.join(","))
    }

    fn root(&self) -> Vertex {
        Vertex::new([])
    }

    fn degree_bound(&self) -> usize {
        self.orders.iter().map(|&o| if o == 2 { 1 } else { 2 }).sum()
    }

    fn neighbors(&self, v: &Vertex) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(self.degree_bound());
        for (g, &o) in self.orders.iter().enumerate() {
            out.push(self.step(v, g, 1));
            if o != 2 {
                out.push(self.step(v, g, -1));
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn contains(&self, v: &Vertex) -> bool {
        let k = v.key();
        if !k.len().is_multiple_of(2) {
            return false;
        }
        let mut prev = -1;
        for s in k.chunks(2) {
            let (g, e) = (s[0], s[1]);
            if g < 0 || g as usize >= self.orders.len() || g == prev {
                return false;
            }
            let o = self.orders[g as usize] as i64;
            if e == 0 || (o > 0 && !(1..o).contains(&e)) {
                return false;
            }
            prev = g;
        }
        true
    }

    fn root_distance(&self, v: &Vertex) -> Option<usize> {
        Some(
            v.key()
                .chunks(2)
                .map(|s| {
                    let o = self.orders[s[0] as usize] as i64;
                    if o == 0 {
                        s[1].unsigned_abs() as usize
                    } else {
                        s[1].min(o - s[1]) as usize
                    }
                })
                .sum(),
        )
    }

    fn exponential_growth(&self) -> bool {
        match self.orders.len() {
            1 => false,
            2 => self.orders != [2, 2],
            _ => true,
        }
    }
}

/// The cycle C_n on `0..n`.
#[derive(Debug, Clone)]
pub struct Cycle {
    n: i64,
}

impl Cycle {
    pub fn new(n: usize) -> Result<Self, GraphError> {
        if n < 3 {
            return Err(GraphError::InvalidParameter("cycle length must be at least 3".into()));
        }
        Ok(Cycle { n: n as i64 })
    }
}

impl Graph for Cycle {
    fn name(&self) -> String {
        format!("cycle({})", self.n)
    }

    fn root(&self) -> Vertex {
        Vertex::new([0])
    }

    fn degree_bound(&self) -> usize {
        2
    }

    fn neighbors(&self, v: &Vertex) -> Vec<Vertex> {
        let i = v.key()[0];
        let mut out = vec![Vertex::new([(i + self.n - 1) % self.n]), Vertex::new([(i + 1) % self.n])];
        out.sort();
        out
    }

    fn contains(&self, v: &Vertex) -> bool {
        v.len() == 1 && (0..self.n).contains(&v.key()[0])
    }

    fn root_distance(&self, v: &Vertex) -> Option<usize> {
        let i = v.key()[0];
        Some(i.min(self.n - i) as usize)
    }

    fn vertices(&self) -> Option<Vec<Vertex>> {
        Some((0..self.n).map(|i| Vertex::new([i])).collect())
    }
}

/// A finite graph given by an explicit edge list on `0..n`.
#[derive(Debug, Clone)]
pub struct FiniteGraph {
    name: String,
    adj: Vec<Vec<usize>>,
    dist: Vec<usize>,
}

impl FiniteGraph {
    /// Builds a connected simple graph; vertex 0 is the root.
    pub fn new(name: impl Into<String>, n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::InvalidParameter("finite graph needs a vertex".into()));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(GraphError::InvalidParameter(format!("bad edge {a}-{b}")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for l in adj.iter_mut() {
            l.sort_unstable();
            l.dedup();
        }
        let mut dist = vec![usize::MAX; n];
        dist[0] = 0;
        let mut q = VecDeque::from([0usize]);
        while let Some(v) = q.pop_front() {
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    q.push_back(w);
                }
            }
        }
        if dist.contains(&usize::MAX) {
            return Err(GraphError::InvalidParameter("finite graph must be connected".into()));
        }
        Ok(FiniteGraph { name: name.into(), adj, dist })
    }

    pub fn path(n: usize) -> Result<Self, GraphError> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        FiniteGraph::new(format!("path({n})"), n, &edges)
    }

    /// Star with center 0 and `k` leaves.
    pub fn star(k: usize) -> Result<Self, GraphError> {
        let edges: Vec<_> = (1..=k).map(|i| (0, i)).collect();
        FiniteGraph::new(format!("star({k})"), k + 1, &edges)
    }

    /// Relabels a finite subgraph of any oracle, with `root` mapped to 0 and
    /// other vertices numbered in key order. Returns the graph and the labels.
    pub fn from_subgraph(
        name: impl Into<String>,
        g: &dyn Graph,
        root: &Vertex,
        vertices: &[Vertex],
    ) -> Result<(Self, Vec<Vertex>), GraphError> {
        let mut labels: Vec<Vertex> = vertices.iter().filter(|v| *v != root).cloned().collect();
        labels.sort();
        labels.dedup();
        labels.insert(0, root.clone());
        let index: FxHashMap<&Vertex, usize> = labels.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut edges = Vec::new();
        for (i, v) in labels.iter().enumerate() {
            for w in g.neighbors(v) {
                if let Some(&j) = index.get(&w) {
                    if i < j {
                        edges.push((i, j));
                    }
                }
            }
        }
        let fg = FiniteGraph::new(name, labels.len(), &edges)?;
        Ok((fg, labels))
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, l) in self.adj.iter().enumerate() {
            for &b in l {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

impl Graph for FiniteGraph {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn root(&self) -> Vertex {
        Vertex::new([0])
    }

    fn degree_bound(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0).max(1)
    }

    fn neighbors(&self, v: &Vertex) -> Vec<Vertex> {
        self.adj[v.key()[0] as usize].iter().map(|&w| Vertex::new([w as i64])).collect()
    }

    fn contains(&self, v: &Vertex) -> bool {
        v.len() == 1 && (0..self.adj.len() as i64).contains(&v.key()[0])
    }

    fn root_distance(&self, v: &Vertex) -> Option<usize> {
        Some(self.dist[v.key()[0] as usize])
    }

    fn vertices(&self) -> Option<Vec<Vertex>> {
        Some((0..self.adj.len() as i64).map(|i| Vertex::new([i])).collect())
    }
}

/// Cartesian product; keys are `[len(left), left..., right...]`.
#[derive(Debug, Clone)]
pub struct Product {
    left: GraphRef,
    right: GraphRef,
}

impl Product {
    pub fn new(left: GraphRef, right: GraphRef) -> Self {
        Product { left, right }
    }

    pub fn pair(a: &Vertex, b: &Vertex) -> Vertex {
        let mut key = Vec::with_capacity(1 + a.len() + b.len());
        key.push(a.len() as i64);
        key.extend_from_slice(a.key());
        key.extend_from_slice(b.key());
        Vertex::new(key)
    }

    pub fn split(v: &Vertex) -> (Vertex, Vertex) {
        let k = v.key();
        let n = k[0] as usize;
        (Vertex::from_slice(&k[1..1 + n]), Vertex::from_slice(&k[1 + n..]))
    }
}

impl Graph for Product {
    fn name(&self) -> String {
        format!("product({},{})", self.left.name(), self.right.name())
    }

    fn root(&self) -> Vertex {
        Product::pair(&self.left.root(), &self.right.root())
    }

    fn degree_bound(&self) -> usize {
        self.left.degree_bound() + self.right.degree_bound()
    }

    fn neighbors(&self, v: &Vertex) -> Vec<Vertex> {
        let (a, b) = Product::split(v);
        let mut out: Vec<Vertex> = self.left.neighbors(&a).iter().map(|x| Product::pair(x, &b)).collect();
        out.extend(self.right.neighbors(&b).iter().map(|y| Product::pair(&a, y)));
        out.sort();
        out
    }

    fn contains(&self, v: &Vertex) -> bool {
        let k = v.key();
        if k.is_empty() || k[0] < 0 || k[0] as usize + 1 > k.len() {
            return false;
        }
        let (a, b) = Product::split(v);
        self.left.contains(&a) && self.right.contains(&b)
    }

    fn root_distance(&self, v: &Vertex) -> Option<usize> {
        let (a, b) = Product::split(v);
        Some(self.left.root_distance(&a)? + self.right.root_distance(&b)?)
    }

    fn vertices(&self) -> Option<Vec<Vertex>> {
        let l = self.left.vertices()?;
        let r = self.right.vertices()?;
        let mut out: Vec<Vertex> = l.iter().flat_map(|a| r.iter().map(move |b| Product::pair(a, b))).collect();
        out.sort();
        Some(out)
    }

    fn exponential_growth(&self) -> bool {
        self.left.exponential_growth() || self.right.exponential_growth()
    }
}

pub fn hypercubic(d: usize) -> Result<GraphRef, GraphError> {
    Ok(Arc::new(Hypercubic::new(d)?))
}

pub fn regular_tree(d: usize) -> Result<GraphRef, GraphError> {
    Ok(Arc::new(RegularTree::new(d)?))
}

pub fn cycle(n: usize) -> Result<GraphRef, GraphError> {
    Ok(Arc::new(Cycle::new(n)?))
}

pub fn product(a: GraphRef, b: GraphRef) -> GraphRef {
    Arc::new(Product::new(a, b))
}

pub fn cayley(orders: Vec<u32>) -> Result<GraphRef, GraphError> {
    Ok(Arc::new(FreeProduct::new(orders)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn symmetric_on_ball(g: &dyn Graph, r: usize) {
        let ball = crate::graph::ball(g, &g.root(), r, 100_000).unwrap();
        for v in ball.vertices() {
            let ns = g.neighbors(v);
            assert!(ns.len() <= g.degree_bound());
            assert!(ns.windows(2).all(|w| w[0] < w[1]), "unsorted neighbors at {v}");
            for w in &ns {
                assert!(g.contains(w));
                assert!(g.neighbors(w).contains(v), "asymmetric {v} {w}");
            }
        }
    }

    #[test]
    fn degree_bounds() {
        assert_eq!(hypercubic(2).unwrap().degree_bound(), 4);
        assert_eq!(product(hypercubic(2).unwrap(), cycle(3).unwrap()).degree_bound(), 6);
        assert_eq!(regular_tree(4).unwrap().degree_bound(), 4);
        assert_eq!(cycle(5).unwrap().degree_bound(), 2);
        assert_eq!(cayley(vec![2, 2, 2]).unwrap().degree_bound(), 3);
        assert_eq!(cayley(vec![0, 3]).unwrap().degree_bound(), 4);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(hypercubic(0).is_err());
        assert!(cycle(2).is_err());
        assert!(regular_tree(1).is_err());
        assert!(cayley(vec![]).is_err());
        assert!(FiniteGraph::new("x", 3, &[(0, 1)]).is_err());
    }

    #[test]
    fn families_are_symmetric_and_sorted() {
        symmetric_on_ball(&Hypercubic::new(3).unwrap(), 3);
        symmetric_on_ball(&RegularTree::new(3).unwrap(), 4);
        symmetric_on_ball(&FreeProduct::new(vec![0, 3, 2]).unwrap(), 3);
        symmetric_on_ball(&Cycle::new(5).unwrap(), 3);
        symmetric_on_ball(&Product::new(hypercubic(1).unwrap(), cycle(3).unwrap()), 4);
        symmetric_on_ball(&FiniteGraph::star(3).unwrap(), 2);
    }

    #[test]
    fn closed_form_distances_match_bfs() {
        let gs: Vec<GraphRef> = vec![
            hypercubic(2).unwrap(),
            regular_tree(3).unwrap(),
            cayley(vec![0, 3]).unwrap(),
            cycle(7).unwrap(),
            product(regular_tree(3).unwrap(), cycle(4).unwrap()),
        ];
        for g in gs {
            let ball = crate::graph::ball(g.as_ref(), &g.root(), 4, 100_000).unwrap();
            for (v, d) in ball.iter() {
                assert_eq!(g.root_distance(v), Some(d), "{} at {v}", g.name());
            }
        }
    }

    #[test]
    fn free_product_of_three_involutions_is_the_cubic_tree() {
        let g = FreeProduct::new(vec![2, 2, 2]).unwrap();
        let t = RegularTree::new(3).unwrap();
        for r in 0..6 {
            let a = crate::graph::sphere(&g, &g.root(), r, 100_000).unwrap().len();
            let b = crate::graph::sphere(&t, &t.root(), r, 100_000).unwrap().len();
            assert_eq!(a, b);
        }
    }
}
