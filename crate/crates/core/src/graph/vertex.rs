use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;

use crate::rng::mix_key;

/// Canonical vertex identity: a family-specific integer tuple.
///
/// Lattices use coordinates, trees and Cayley graphs use reduced words.
/// Equality is key equality and the derived `Ord` (lexicographic on the
/// integer sequence) is the well-ordering used for every "smallest" tie-break.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex(SmallVec<[i64; 4]>);

impl Vertex {
    pub fn new(key: impl IntoIterator<Item = i64>) -> Self {
        Vertex(key.into_iter().collect())
    }

    pub fn from_slice(key: &[i64]) -> Self {
        Vertex(SmallVec::from_slice(key))
    }

    pub fn key(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn key_mut(&mut self) -> &mut SmallVec<[i64; 4]> {
        &mut self.0
    }

    /// 64-bit digest of the canonical key, used to key counter-based draws.
    pub fn digest(&self) -> u64 {
        mix_key(0x9e37_79b9_7f4a_7c15, &self.0)
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed key `{0}`")]
pub struct KeyParseError(pub String);

impl FromStr for Vertex {
    type Err = KeyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| KeyParseError(s.to_string()))?;
        if inner.trim().is_empty() {
            return Ok(Vertex::new([]));
        }
        inner
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<Result<SmallVec<_>, _>>()
            .map(Vertex)
            .map_err(|_| KeyParseError(s.to_string()))
    }
}

/// Unordered pair of distinct vertices, stored sorted.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    lo: Vertex,
    hi: Vertex,
}

impl Edge {
    /// Returns `None` for a would-be self-loop.
    pub fn try_new(a: Vertex, b: Vertex) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Edge { lo: a, hi: b }),
            std::cmp::Ordering::Greater => Some(Edge { lo: b, hi: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    /// Panics on equal endpoints; simple graphs carry no self-loops.
    pub fn new(a: Vertex, b: Vertex) -> Self {
        Edge::try_new(a, b).expect("edge endpoints must be distinct")
    }

    pub fn lo(&self) -> &Vertex {
        &self.lo
    }

    pub fn hi(&self) -> &Vertex {
        &self.hi
    }

    pub fn endpoints(&self) -> [&Vertex; 2] {
        [&self.lo, &self.hi]
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        &self.lo == v || &self.hi == v
    }

    /// The endpoint that is not `v`, if `v` is an endpoint.
    pub fn other(&self, v: &Vertex) -> Option<&Vertex> {
        if &self.lo == v {
            Some(&self.hi)
        } else if &self.hi == v {
            Some(&self.lo)
        } else {
            None
        }
    }

    pub fn digest(&self) -> u64 {
        edge_digest(&self.lo, &self.hi)
    }
}

/// Digest of the edge `{a, b}`; symmetric in its arguments.
pub fn edge_digest(a: &Vertex, b: &Vertex) -> u64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let h = mix_key(0xd1b5_4a32_d192_ed03, lo.key());
    mix_key(h ^ (lo.len() as u64).wrapping_mul(0x8cb9_2ba7_2f3d_8dd7), hi.key())
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

impl FromStr for Edge {
    type Err = KeyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let split = s.find(")-(").ok_or_else(|| KeyParseError(s.to_string()))?;
        let a: Vertex = s[..=split].parse()?;
        let b: Vertex = s[split + 2..].parse()?;
        Edge::try_new(a, b).ok_or_else(|| KeyParseError(s.to_string()))
    }
}
