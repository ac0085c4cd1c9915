//! Exact enumeration over every configuration of a tiny instance.
//!
//! This is deliberately separate from the growth engine: clusters are
//! computed with vertex bitmasks over a plain adjacency list, so agreement
//! between the two is evidence rather than tautology.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::EnhanceError;
use crate::graph::FiniteGraph;

/// Enumeration bound on `|edges| + |mark support|`.
pub const MAX_COORDS: usize = 24;

/// A finite instance: vertices `0..n` (at most 128), edges, the vertices that
/// may carry a mark, the root set and `r`.
#[derive(Debug, Clone)]
pub struct ExactModel {
    n: usize,
    edges: Vec<(usize, usize)>,
    marks: Vec<usize>,
    roots: u128,
    r: usize,
    adj: Vec<Vec<(usize, usize)>>,
    ball_edges: Vec<u64>,
    sphere: Vec<u128>,
}

fn bfs(adj: &[Vec<(usize, usize)>], src: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[src] = 0;
    let mut queue = vec![src];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        for &(_, y) in &adj[x] {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push(y);
            }
        }
    }
    dist
}

impl ExactModel {
    pub fn new(n: usize, edges: &[(usize, usize)], marks: &[usize], roots: &[usize], r: usize) -> Result<Self, EnhanceError> {
        let coords = edges.len() + marks.len();
        if coords > MAX_COORDS {
            return Err(EnhanceError::EnumerationTooLarge { coords, max: MAX_COORDS });
        }
        if n > 128 || roots.is_empty() || roots.iter().chain(marks).any(|&v| v >= n) || edges.iter().any(|&(a, b)| a >= n || b >= n || a == b) {
            return Err(EnhanceError::Precondition("instance needs at most 128 vertices, valid indices and a nonempty root set".into()));
        }
        let mut adj = vec![Vec::new(); n];
        for (k, &(a, b)) in edges.iter().enumerate() {
            adj[a].push((k, b));
            adj[b].push((k, a));
        }
        let mut ball_edges = vec![0u64; n];
        let mut sphere = vec![0u128; n];
        for u in 0..n {
            let d = bfs(&adj, u);
            for (k, &(a, b)) in edges.iter().enumerate() {
                if d[a] <= r && d[b] <= r {
                    ball_edges[u] |= 1 << k;
                }
            }
            for (v, &dv) in d.iter().enumerate() {
                if dv == r + 1 {
                    sphere[u] |= 1 << v;
                }
            }
        }
        let roots = roots.iter().fold(0u128, |m, &v| m | (1 << v));
        Ok(ExactModel { n, edges: edges.to_vec(), marks: marks.to_vec(), roots, r, adj, ball_edges, sphere })
    }

    /// Instance on a finite graph with the given mark support and roots.
    pub fn from_graph(g: &FiniteGraph, marks: &[usize], roots: &[usize], r: usize) -> Result<Self, EnhanceError> {
        Self::new(g.len(), &g.edges(), marks, roots, r)
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_marks(&self) -> usize {
        self.marks.len()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn marks(&self) -> &[usize] {
        &self.marks
    }

    /// Vertices at graph distance exactly `l` from `o`, as a mask.
    pub fn sphere_mask(&self, o: usize, l: usize) -> u128 {
        bfs(&self.adj, o).iter().enumerate().filter(|&(_, &d)| d == l).fold(0, |m, (v, _)| m | (1 << v))
    }

    /// The cluster of the roots as a vertex mask, for edge bits `omega` and
    /// bits `alpha` over the mark support (bit `k` is the mark of `marks[k]`).
    pub fn cluster(&self, omega: u64, alpha: u64) -> u128 {
        let mut c = self.roots;
        let mut frontier = c;
        loop {
            while frontier != 0 {
                let mut next = 0u128;
                let mut f = frontier;
                while f != 0 {
                    let v = f.trailing_zeros() as usize;
                    f &= f - 1;
                    for &(k, w) in &self.adj[v] {
                        if omega >> k & 1 == 1 {
                            next |= 1 << w;
                        }
                    }
                }
                next &= !c;
                c |= next;
                frontier = next;
            }
            let mut add = 0u128;
            for (k, &u) in self.marks.iter().enumerate() {
                if alpha >> k & 1 == 1 && c >> u & 1 == 1 && self.ball_edges[u] & !omega == 0 {
                    add |= self.sphere[u];
                }
            }
            add &= !c;
            if add == 0 {
                return c;
            }
            c |= add;
            frontier = add;
        }
    }

    fn configs(&self) -> u64 {
        1u64 << (self.edges.len() + self.marks.len())
    }

    fn split(&self, c: u64) -> (u64, u64) {
        let m = self.edges.len();
        (c & ((1u64 << m) - 1), c >> m)
    }

    /// Event bits `cluster ∩ target ≠ ∅` for every configuration.
    pub fn event_table(&self, target: u128) -> EventTable {
        let total = self.configs();
        let mut bits = vec![0u64; total.div_ceil(64) as usize];
        for c in 0..total {
            let (w, a) = self.split(c);
            if self.cluster(w, a) & target != 0 {
                bits[(c >> 6) as usize] |= 1 << (c & 63);
            }
        }
        EventTable { bits, m: self.edges.len(), na: self.marks.len() }
    }

    /// Configuration counts by `(category(cluster), open edges, marks)`.
    pub fn counts(&self, categories: usize, category: impl Fn(u128) -> usize) -> Vec<Bernstein> {
        let (m, na) = (self.edges.len(), self.marks.len());
        let mut out = vec![Bernstein::zero(m, na); categories];
        for c in 0..self.configs() {
            let (w, a) = self.split(c);
            let k = category(self.cluster(w, a));
            out[k].add(w.count_ones() as usize, a.count_ones() as usize, 1);
        }
        out
    }

    /// Exact `P_{p,s}(cluster ∩ target ≠ ∅)`.
    pub fn probability(&self, target: u128, p: &BigRational, s: &BigRational) -> BigRational {
        self.event_table(target).counts().eval(p, s)
    }
}

/// The event indicator over all configurations; bit `c` holds configuration
/// `c`, whose low bits are edges and high bits are marks.
#[derive(Debug, Clone)]
pub struct EventTable {
    bits: Vec<u64>,
    m: usize,
    na: usize,
}

impl EventTable {
    #[inline]
    pub fn get(&self, c: u64) -> bool {
        self.bits[(c >> 6) as usize] >> (c & 63) & 1 == 1
    }

    fn total(&self) -> u64 {
        1u64 << (self.m + self.na)
    }

    fn weight_of(&self, c: u64) -> (usize, usize) {
        let w = c & ((1u64 << self.m) - 1);
        ((w.count_ones()) as usize, (c >> self.m).count_ones() as usize)
    }

    /// Counts of configurations in the event.
    pub fn counts(&self) -> Bernstein {
        let mut b = Bernstein::zero(self.m, self.na);
        for c in 0..self.total() {
            if self.get(c) {
                let (i, j) = self.weight_of(c);
                b.add(i, j, 1);
            }
        }
        b
    }

    /// Whether every coordinate flip from 0 to 1 preserves the event.
    pub fn is_increasing(&self) -> bool {
        (0..self.total()).all(|c| !self.get(c) || (0..self.m + self.na).all(|k| self.get(c | 1 << k)))
    }

    /// Counts, over the other coordinates, of configurations where flipping
    /// coordinate `k` changes the event.
    fn pivotal(&self, k: usize) -> Bernstein {
        let is_edge = k < self.m;
        let mut b = if is_edge { Bernstein::zero(self.m - 1, self.na) } else { Bernstein::zero(self.m, self.na - 1) };
        let bit = 1u64 << k;
        for c in 0..self.total() {
            if c & bit == 0 && self.get(c) != self.get(c | bit) {
                let (i, j) = self.weight_of(c);
                b.add(i, j, 1);
            }
        }
        b
    }

    /// `P(edge k is p-pivotal)` as a polynomial over the remaining coordinates.
    pub fn pivotal_edge(&self, k: usize) -> Bernstein {
        assert!(k < self.m);
        self.pivotal(k)
    }

    /// `P(mark k is s-pivotal)` as a polynomial over the remaining coordinates.
    pub fn pivotal_mark(&self, k: usize) -> Bernstein {
        assert!(k < self.na);
        self.pivotal(self.m + k)
    }
}

/// `Σ c_ij p^i (1-p)^(m-i) s^j (1-s)^(na-j)` with integer counts `c_ij`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bernstein {
    m: usize,
    na: usize,
    c: Vec<u64>,
}

fn powers(x: &BigRational, n: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(BigRational::one());
    for i in 0..n {
        let next = &out[i] * x;
        out.push(next);
    }
    out
}

impl Bernstein {
    pub fn zero(m: usize, na: usize) -> Self {
        Bernstein { m, na, c: vec![0; (m + 1) * (na + 1)] }
    }

    pub fn add(&mut self, i: usize, j: usize, k: u64) {
        self.c[i * (self.na + 1) + j] += k;
    }

    pub fn coeff(&self, i: usize, j: usize) -> u64 {
        self.c[i * (self.na + 1) + j]
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.m, self.na)
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    /// Coefficientwise sum; degrees must match.
    pub fn plus(&self, other: &Bernstein) -> Bernstein {
        assert_eq!((self.m, self.na), (other.m, other.na));
        Bernstein { m: self.m, na: self.na, c: self.c.iter().zip(&other.c).map(|(a, b)| a + b).collect() }
    }

    fn combine(&self, p: &BigRational, s: &BigRational, fp: impl Fn(usize, &[BigRational], &[BigRational]) -> BigRational, fs: impl Fn(usize, &[BigRational], &[BigRational]) -> BigRational) -> BigRational {
        let one = BigRational::one();
        let (pp, qp) = (powers(p, self.m), powers(&(&one - p), self.m));
        let (ps, qs) = (powers(s, self.na), powers(&(&one - s), self.na));
        let mut total = BigRational::zero();
        for i in 0..=self.m {
            let a = fp(i, &pp, &qp);
            if a.is_zero() {
                continue;
            }
            for j in 0..=self.na {
                let c = self.coeff(i, j);
                if c == 0 {
                    continue;
                }
                let b = fs(j, &ps, &qs);
                total += &a * &b * BigRational::from_integer(BigInt::from(c));
            }
        }
        total
    }

    pub fn eval(&self, p: &BigRational, s: &BigRational) -> BigRational {
        let (m, na) = (self.m, self.na);
        self.combine(p, s, |i, pp, qp| &pp[i] * &qp[m - i], |j, ps, qs| &ps[j] * &qs[na - j])
    }

    /// Exact `∂/∂p`.
    pub fn dp(&self, p: &BigRational, s: &BigRational) -> BigRational {
        let (m, na) = (self.m, self.na);
        self.combine(p, s, move |i, pp, qp| bernstein_derivative(i, m, pp, qp), |j, ps, qs| &ps[j] * &qs[na - j])
    }

    /// Exact `∂/∂s`.
    pub fn ds(&self, p: &BigRational, s: &BigRational) -> BigRational {
        let (m, na) = (self.m, self.na);
        self.combine(p, s, |i, pp, qp| &pp[i] * &qp[m - i], move |j, ps, qs| bernstein_derivative(j, na, ps, qs))
    }
}

/// `d/dx [x^i (1-x)^(n-i)]`.
fn bernstein_derivative(i: usize, n: usize, xp: &[BigRational], yp: &[BigRational]) -> BigRational {
    let mut out = BigRational::zero();
    if i > 0 {
        out += &xp[i - 1] * &yp[n - i] * BigRational::from_integer(BigInt::from(i));
    }
    if i < n {
        out -= &xp[i] * &yp[n - i - 1] * BigRational::from_integer(BigInt::from(n - i));
    }
    out
}

/// Exact rational value of a finite double.
pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite probability")
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
