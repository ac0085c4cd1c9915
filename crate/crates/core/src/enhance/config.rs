use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::EnhanceError;
use crate::graph::{Edge, Vertex};

/// Edge bits `ω` and vertex marks `α` on finite supports; everything outside
/// the supports reads as 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Configuration {
    omega: BTreeMap<Edge, bool>,
    alpha: BTreeMap<Vertex, bool>,
}

impl Configuration {
    pub fn new() -> Self {
        Self::default()
    }

    /// All-zero configuration on the given supports.
    pub fn zeros<'a>(edges: impl IntoIterator<Item = &'a Edge>, vertices: impl IntoIterator<Item = &'a Vertex>) -> Self {
        Configuration {
            omega: edges.into_iter().map(|e| (e.clone(), false)).collect(),
            alpha: vertices.into_iter().map(|v| (v.clone(), false)).collect(),
        }
    }

    pub fn set_edge(&mut self, e: Edge, open: bool) {
        self.omega.insert(e, open);
    }

    pub fn set_vertex(&mut self, v: Vertex, mark: bool) {
        self.alpha.insert(v, mark);
    }

    pub fn edge(&self, e: &Edge) -> bool {
        self.omega.get(e).copied().unwrap_or(false)
    }

    pub fn vertex(&self, v: &Vertex) -> bool {
        self.alpha.get(v).copied().unwrap_or(false)
    }

    /// The bit of `e` if it lies in the support.
    pub fn edge_bit(&self, e: &Edge) -> Option<bool> {
        self.omega.get(e).copied()
    }

    pub fn vertex_bit(&self, v: &Vertex) -> Option<bool> {
        self.alpha.get(v).copied()
    }

    pub fn edge_support(&self) -> impl Iterator<Item = &Edge> {
        self.omega.keys()
    }

    pub fn vertex_support(&self) -> impl Iterator<Item = &Vertex> {
        self.alpha.keys()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&Edge, bool)> {
        self.omega.iter().map(|(e, &b)| (e, b))
    }

    pub fn vertices(&self) -> impl Iterator<Item = (&Vertex, bool)> {
        self.alpha.iter().map(|(v, &b)| (v, b))
    }

    pub fn open_edges(&self) -> impl Iterator<Item = &Edge> {
        self.omega.iter().filter(|(_, &b)| b).map(|(e, _)| e)
    }

    pub fn marked_vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.alpha.iter().filter(|(_, &b)| b).map(|(v, _)| v)
    }

    /// Whether `self ≤ other` coordinatewise, reading missing bits as 0.
    pub fn le(&self, other: &Configuration) -> bool {
        self.open_edges().all(|e| other.edge(e)) && self.marked_vertices().all(|v| other.vertex(v))
    }

    /// One record per line: `edge-key bit` then `vertex-key bit`, in key order.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for (e, b) in &self.omega {
            let _ = writeln!(out, "{e} {}", u8::from(*b));
        }
        for (v, b) in &self.alpha {
            let _ = writeln!(out, "{v} {}", u8::from(*b));
        }
        out
    }

    pub fn from_lines(text: &str) -> Result<Self, EnhanceError> {
        let mut cfg = Configuration::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = || EnhanceError::Parse { line: no + 1, text: line.to_string() };
            let (key, bit) = line.rsplit_once(' ').ok_or_else(bad)?;
            let bit = match bit {
                "0" => false,
                "1" => true,
                _ => return Err(bad()),
            };
            if key.contains(")-(") {
                cfg.set_edge(key.parse().map_err(|_| bad())?, bit);
            } else {
                cfg.set_vertex(key.parse().map_err(|_| bad())?, bit);
            }
        }
        Ok(cfg)
    }
}
