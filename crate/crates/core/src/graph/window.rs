use rustc_hash::FxHashMap;

use super::{bfs_from_set, edge_digest, Edge, Graph, GraphError, Vertex};

/// An indexed ball `B_R(center)`.
///
/// Vertices are numbered in key order, so index comparison agrees with the
/// canonical vertex order; edges are numbered in canonical edge order.
#[derive(Debug, Clone)]
pub struct Window {
    center: Vertex,
    radius: usize,
    keys: Vec<Vertex>,
    index: FxHashMap<Vertex, u32>,
    depth: Vec<u32>,
    complete: Vec<bool>,
    adj_start: Vec<u32>,
    adj: Vec<(u32, u32)>,
    edges: Vec<(u32, u32)>,
    edge_hash: Vec<u64>,
    vertex_hash: Vec<u64>,
}

impl Window {
    pub fn build(g: &dyn Graph, center: &Vertex, radius: usize, cap: usize) -> Result<Window, GraphError> {
        Self::build_from_set(g, std::slice::from_ref(center), radius, cap)
    }

    /// The `radius`-neighbourhood of a nonempty set; depths are distances to
    /// the set and the center is its smallest vertex.
    pub fn build_from_set(g: &dyn Graph, sources: &[Vertex], radius: usize, cap: usize) -> Result<Window, GraphError> {
        let center = sources.iter().min().ok_or_else(|| GraphError::InvalidParameter("window needs a source".into()))?;
        let dist = bfs_from_set(g, sources, radius, cap)?;
        let mut keys: Vec<Vertex> = dist.keys().cloned().collect();
        keys.sort();
        let index: FxHashMap<Vertex, u32> = keys.iter().enumerate().map(|(i, v)| (v.clone(), i as u32)).collect();
        let depth: Vec<u32> = keys.iter().map(|v| dist[v] as u32).collect();
        let mut complete = vec![true; keys.len()];
        let mut adj_start = Vec::with_capacity(keys.len() + 1);
        let mut nbrs: Vec<u32> = Vec::new();
        adj_start.push(0u32);
        for (i, v) in keys.iter().enumerate() {
            for w in g.neighbors(v) {
                match index.get(&w) {
                    Some(&j) => nbrs.push(j),
                    None => complete[i] = false,
                }
            }
            adj_start.push(nbrs.len() as u32);
        }
        let mut edges = Vec::new();
        for i in 0..keys.len() {
            for &j in &nbrs[adj_start[i] as usize..adj_start[i + 1] as usize] {
                if (i as u32) < j {
                    edges.push((i as u32, j));
                }
            }
        }
        let edge_id: FxHashMap<(u32, u32), u32> = edges.iter().enumerate().map(|(k, &e)| (e, k as u32)).collect();
        let adj: Vec<(u32, u32)> = (0..keys.len())
            .flat_map(|i| {
                let (nbrs, edge_id) = (&nbrs, &edge_id);
                nbrs[adj_start[i] as usize..adj_start[i + 1] as usize].iter().map(move |&j| {
                    let e = if (i as u32) < j { (i as u32, j) } else { (j, i as u32) };
                    (j, edge_id[&e])
                })
            })
            .collect();
        let edge_hash = edges.iter().map(|&(a, b)| edge_digest(&keys[a as usize], &keys[b as usize])).collect();
        let vertex_hash = keys.iter().map(Vertex::digest).collect();
        Ok(Window {
            center: center.clone(),
            radius,
            keys,
            index,
            depth,
            complete,
            adj_start,
            adj,
            edges,
            edge_hash,
            vertex_hash,
        })
    }

    pub fn center(&self) -> &Vertex {
        &self.center
    }

    pub fn center_index(&self) -> u32 {
        self.index[&self.center]
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn num_vertices(&self) -> usize {
        self.keys.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn key(&self, v: u32) -> &Vertex {
        &self.keys[v as usize]
    }

    pub fn index_of(&self, v: &Vertex) -> Option<u32> {
        self.index.get(v).copied()
    }

    pub fn depth(&self, v: u32) -> usize {
        self.depth[v as usize] as usize
    }

    /// Whether every graph neighbor of `v` lies in the window.
    pub fn is_complete(&self, v: u32) -> bool {
        self.complete[v as usize]
    }

    /// `(neighbor, edge id)` pairs in neighbor key order.
    #[inline]
    pub fn adjacent(&self, v: u32) -> &[(u32, u32)] {
        &self.adj[self.adj_start[v as usize] as usize..self.adj_start[v as usize + 1] as usize]
    }

    pub fn edge_endpoints(&self, e: u32) -> (u32, u32) {
        self.edges[e as usize]
    }

    pub fn edge(&self, e: u32) -> Edge {
        let (a, b) = self.edges[e as usize];
        Edge::new(self.keys[a as usize].clone(), self.keys[b as usize].clone())
    }

    pub fn edge_id(&self, a: u32, b: u32) -> Option<u32> {
        self.adjacent(a).iter().find(|&&(w, _)| w == b).map(|&(_, e)| e)
    }

    pub fn edge_index_of(&self, e: &Edge) -> Option<u32> {
        self.edge_id(self.index_of(e.lo())?, self.index_of(e.hi())?)
    }

    #[inline]
    pub fn edge_hash(&self, e: u32) -> u64 {
        self.edge_hash[e as usize]
    }

    #[inline]
    pub fn vertex_hash(&self, v: u32) -> u64 {
        self.vertex_hash[v as usize]
    }

    /// BFS distances from `v` up to `r` inside the window, as `(vertex, distance)` in BFS order.
    pub fn local_ball(&self, v: u32, r: usize) -> Vec<(u32, usize)> {
        let mut out = vec![(v, 0usize)];
        let mut seen = FxHashMap::default();
        seen.insert(v, 0usize);
        let mut head = 0;
        while head < out.len() {
            let (x, d) = out[head];
            head += 1;
            if d == r {
                continue;
            }
            for &(y, _) in self.adjacent(x) {
                if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(y) {
                    e.insert(d + 1);
                    out.push((y, d + 1));
                }
            }
        }
        out
    }

    /// Distance between two window vertices along window paths, up to `cap`.
    pub fn local_distance(&self, a: u32, b: u32, cap: usize) -> Option<usize> {
        self.local_ball(a, cap).into_iter().find(|&(x, _)| x == b).map(|(_, d)| d)
    }
}
