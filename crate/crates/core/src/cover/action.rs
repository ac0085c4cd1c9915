use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use super::CoverError;
use crate::graph::{ball, Graph, Term, Vertex};

/// An invertible map on vertex keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    /// `key ↦ P·key + offset`, where `P` is a signed permutation given as
    /// `perm[i] = (j, sign)` meaning output coordinate `i` is `sign * key[j]`.
    Affine { perm: Vec<(usize, i64)>, offset: Vec<i64> },
    /// Left multiplication by a reduced word of a free product of cyclic groups.
    LeftWord { word: Vec<i64>, orders: Vec<u32> },
}

impl Generator {
    pub fn translation(offset: Vec<i64>) -> Self {
        let perm = (0..offset.len()).map(|i| (i, 1)).collect();
        Generator::Affine { perm, offset }
    }

    pub fn apply(&self, v: &Vertex) -> Vertex {
        match self {
            Generator::Affine { perm, offset } => {
                let k = v.key();
                Vertex::new(perm.iter().zip(offset).map(|(&(j, s), &o)| s * k[j] + o))
            }
            Generator::LeftWord { word, orders } => {
                let mut out: Vec<i64> = Vec::with_capacity(word.len() + v.len());
                out.extend_from_slice(word);
                for s in v.key().chunks(2) {
                    push_syllable(&mut out, s[0], s[1], orders);
                }
                Vertex::new(out)
            }
        }
    }

    pub fn inverse(&self) -> Generator {
        match self {
            Generator::Affine { perm, offset } => {
                let n = perm.len();
                let mut inv = vec![(0usize, 1i64); n];
                for (i, &(j, s)) in perm.iter().enumerate() {
                    inv[j] = (i, s);
                }
                let off: Vec<i64> = (0..n).map(|j| -inv[j].1 * offset[inv[j].0]).collect();
                Generator::Affine { perm: inv, offset: off }
            }
            Generator::LeftWord { word, orders } => {
                let mut out = Vec::new();
                for s in word.chunks(2).rev() {
                    let o = orders[s[0] as usize] as i64;
                    let e = if o == 0 { -s[1] } else { (o - s[1]).rem_euclid(o) };
                    push_syllable(&mut out, s[0], e, orders);
                }
                Generator::LeftWord { word: out, orders: orders.clone() }
            }
        }
    }

    fn validate(&self) -> Result<(), CoverError> {
        if let Generator::Affine { perm, offset } = self {
            let n = perm.len();
            let targets: BTreeSet<usize> = perm.iter().map(|&(j, _)| j).collect();
            if offset.len() != n || targets.len() != n || targets.iter().any(|&j| j >= n) || perm.iter().any(|&(_, s)| s != 1 && s != -1) {
                return Err(CoverError::InvalidAction("affine generator must be a signed permutation plus offset".into()));
            }
        }
        Ok(())
    }
}

fn push_syllable(out: &mut Vec<i64>, g: i64, e: i64, orders: &[u32]) {
    let o = orders[g as usize] as i64;
    let n = out.len();
    if n >= 2 && out[n - 2] == g {
        let ne = if o == 0 { out[n - 1] + e } else { (out[n - 1] + e).rem_euclid(o) };
        if ne == 0 {
            out.truncate(n - 2);
        } else {
            out[n - 1] = ne;
        }
    } else if e != 0 {
        out.push(g);
        out.push(if o == 0 { e } else { e.rem_euclid(o) });
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Affine { perm, offset } if perm.iter().enumerate().all(|(i, &(j, s))| i == j && s == 1) => {
                let o: Vec<String> = offset.iter().map(|x| x.to_string()).collect();
                write!(f, "shift({})", o.join(","))
            }
            Generator::Affine { perm, offset } => {
                let p: Vec<String> = perm.iter().map(|&(j, s)| format!("{}{}", if s < 0 { "-" } else { "" }, j)).collect();
                let o: Vec<String> = offset.iter().map(|x| x.to_string()).collect();
                write!(f, "affine([{}],[{}])", p.join(","), o.join(","))
            }
            Generator::LeftWord { word, .. } => {
                let w: Vec<String> = word.iter().map(|x| x.to_string()).collect();
                write!(f, "left({})", w.join(","))
            }
        }
    }
}

/// How orbit representatives are computed.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Canonicalizer {
    /// Reduction modulo a translation lattice in Hermite normal form.
    Lattice { basis: Vec<Vec<i64>> },
    /// Least key of the orbit, found by closure; orbits must be finite.
    FiniteOrbit { cap: usize },
}

/// A group acting on vertex keys, given by generators and a canonicalizer.
#[derive(Debug, Clone)]
pub struct GroupAction {
    generators: Vec<Generator>,
    canon: Canonicalizer,
    descriptor: String,
}

impl GroupAction {
    /// The translation group generated by `offsets`, acting on keys of length `dim`.
    pub fn translations(dim: usize, offsets: Vec<Vec<i64>>) -> Result<Self, CoverError> {
        if offsets.is_empty() || offsets.iter().any(|o| o.len() != dim) {
            return Err(CoverError::InvalidAction(format!("translations must have length {dim}")));
        }
        let basis = hermite(offsets.clone());
        if basis.is_empty() {
            return Err(CoverError::InvalidAction("translation group is trivial; the quotient map would be injective".into()));
        }
        let descriptor = offsets
            .iter()
            .map(|o| format!("shift({})", o.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect::<Vec<_>>()
            .join(",");
        Ok(GroupAction { generators: offsets.into_iter().map(Generator::translation).collect(), canon: Canonicalizer::Lattice { basis }, descriptor })
    }

    /// Translation by `period` along `axis` of a `dim`-dimensional lattice.
    pub fn translate(dim: usize, axis: usize, period: i64) -> Result<Self, CoverError> {
        if axis >= dim || period == 0 {
            return Err(CoverError::InvalidAction(format!("translate({axis},{period}) is not a nontrivial translation of Z^{dim}")));
        }
        let mut o = vec![0; dim];
        o[axis] = period;
        let mut a = Self::translations(dim, vec![o])?;
        a.descriptor = format!("translate({axis},{period})");
        Ok(a)
    }

    /// A group with finite orbits; representatives are least keys of orbits.
    pub fn finite(generators: Vec<Generator>, orbit_cap: usize) -> Result<Self, CoverError> {
        if generators.is_empty() {
            return Err(CoverError::InvalidAction("no generators".into()));
        }
        for g in &generators {
            g.validate()?;
        }
        let descriptor = generators.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(",");
        Ok(GroupAction { generators, canon: Canonicalizer::FiniteOrbit { cap: orbit_cap }, descriptor })
    }

    /// Parses `translate(axis,period)`, `shift(a,b,...)` or a comma list of
    /// `shift(...)` terms, for keys of length `dim`.
    pub fn parse(s: &str, dim: usize) -> Result<Self, CoverError> {
        let wrapped = format!("action({s})");
        let t = Term::parse(&wrapped).map_err(|e| CoverError::InvalidAction(e.to_string()))?;
        let Term::Call(_, items) = t else { unreachable!() };
        let ints = |args: &[Term]| -> Result<Vec<i64>, CoverError> {
            args.iter().map(|a| a.as_int().ok_or_else(|| CoverError::InvalidAction(format!("expected integers in `{s}`")))).collect()
        };
        let mut offsets = Vec::new();
        for it in &items {
            match it {
                Term::Call(n, args) if n == "translate" && items.len() == 1 => {
                    let v = ints(args)?;
                    if v.len() != 2 || v[0] < 0 {
                        return Err(CoverError::InvalidAction("translate takes (axis, period)".into()));
                    }
                    return Self::translate(dim, v[0] as usize, v[1]);
                }
                Term::Call(n, args) if n == "shift" => offsets.push(ints(args)?),
                _ => return Err(CoverError::InvalidAction(format!("unknown action `{s}`"))),
            }
        }
        Self::translations(dim, offsets)
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    /// Generators followed by their inverses.
    pub fn symmetric_generators(&self) -> Vec<Generator> {
        let mut out = self.generators.clone();
        out.extend(self.generators.iter().map(Generator::inverse));
        out
    }

    pub fn canonicalize(&self, v: &Vertex) -> Vertex {
        match &self.canon {
            Canonicalizer::Lattice { basis } => {
                let mut k: Vec<i64> = v.key().to_vec();
                for row in basis {
                    let c = row.iter().position(|&x| x != 0).unwrap();
                    let q = k[c].div_euclid(row[c]);
                    if q != 0 {
                        for (x, &b) in k.iter_mut().zip(row) {
                            *x -= q * b;
                        }
                    }
                }
                Vertex::new(k)
            }
            Canonicalizer::FiniteOrbit { cap } => {
                let orbit = self.orbit(v, *cap);
                orbit.into_iter().next().unwrap()
            }
        }
    }

    /// The orbit of `v`, truncated to `cap` elements.
    pub fn orbit(&self, v: &Vertex, cap: usize) -> BTreeSet<Vertex> {
        let gens = self.symmetric_generators();
        let mut seen = BTreeSet::from([v.clone()]);
        let mut q = VecDeque::from([v.clone()]);
        while let Some(x) = q.pop_front() {
            for g in &gens {
                let y = g.apply(&x);
                if seen.len() < cap && seen.insert(y.clone()) {
                    q.push_back(y);
                }
            }
        }
        seen
    }

    /// Checks on `B_radius(root)` that every generator is a graph automorphism.
    pub fn check_automorphisms(&self, g: &dyn Graph, radius: usize) -> Result<(), CoverError> {
        let b = ball(g, &g.root(), radius, crate::graph::DEFAULT_BALL_CAP)?;
        for gen in self.symmetric_generators() {
            gen.validate()?;
            let inv = gen.inverse();
            for v in b.vertices() {
                if let Generator::Affine { perm, .. } = &gen {
                    if perm.len() != v.len() {
                        return Err(CoverError::NotAutomorphism { generator: gen.to_string(), witness: v.to_string() });
                    }
                }
                let gv = gen.apply(v);
                if !g.contains(&gv) || inv.apply(&gv) != *v {
                    return Err(CoverError::NotAutomorphism { generator: gen.to_string(), witness: v.to_string() });
                }
                let mut image: Vec<Vertex> = g.neighbors(v).iter().map(|w| gen.apply(w)).collect();
                image.sort();
                if image != g.neighbors(&gv) {
                    return Err(CoverError::NotAutomorphism { generator: gen.to_string(), witness: v.to_string() });
                }
            }
        }
        Ok(())
    }

    /// Spot-checks freeness: every word of length at most `max_len` that fixes
    /// some sampled vertex must fix all sampled vertices.
    pub fn check_free(&self, g: &dyn Graph, radius: usize, max_len: usize) -> Result<(), CoverError> {
        let b = ball(g, &g.root(), radius, crate::graph::DEFAULT_BALL_CAP)?;
        let sample: Vec<Vertex> = b.vertices().cloned().collect();
        let gens = self.symmetric_generators();
        let mut frontier: Vec<Vec<Vertex>> = vec![sample.clone()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for images in &frontier {
                for gen in &gens {
                    let moved: Vec<Vertex> = images.iter().map(|v| gen.apply(v)).collect();
                    let fixed = moved.iter().zip(&sample).filter(|(a, b)| a == b).count();
                    if fixed > 0 && fixed < sample.len() {
                        let w = moved.iter().zip(&sample).find(|(a, b)| a == b).unwrap().1;
                        return Err(CoverError::NotFree { witness: w.to_string() });
                    }
                    if fixed == 0 {
                        next.push(moved);
                    }
                }
            }
            next.sort();
            next.dedup();
            frontier = next;
        }
        Ok(())
    }

    /// Breadth-first search for a word `w` with `w(x) = y`, up to `max_len` letters.
    /// Returns the sequence of generators to apply, first to last.
    pub fn find_element(&self, x: &Vertex, y: &Vertex, max_len: usize) -> Option<Vec<Generator>> {
        let gens = self.symmetric_generators();
        let mut seen = BTreeSet::from([x.clone()]);
        let mut layer: Vec<(Vertex, Vec<usize>)> = vec![(x.clone(), Vec::new())];
        for _ in 0..=max_len {
            let mut next = Vec::new();
            for (z, word) in &layer {
                if z == y {
                    return Some(word.iter().map(|&i| gens[i].clone()).collect());
                }
                for (i, g) in gens.iter().enumerate() {
                    let w = g.apply(z);
                    if seen.insert(w.clone()) {
                        let mut wd = word.clone();
                        wd.push(i);
                        next.push((w, wd));
                    }
                }
            }
            layer = next;
        }
        None
    }
}

/// Row-style Hermite normal form of an integer lattice basis; zero rows dropped.
fn hermite(mut rows: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let n = rows.first().map_or(0, Vec::len);
    let mut out: Vec<Vec<i64>> = Vec::new();
    let mut col = 0;
    while col < n && !rows.is_empty() {
        loop {
            rows.retain(|r| r.iter().any(|&x| x != 0));
            let nz: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| rows[i][col].abs()).unwrap();
            let pivot = rows[p].clone();
            for &i in &nz {
                if i != p {
                    let q = rows[i][col].div_euclid(pivot[col]);
                    for (x, &b) in rows[i].iter_mut().zip(&pivot) {
                        *x -= q * b;
                    }
                }
            }
        }
        if let Some(i) = (0..rows.len()).find(|&i| rows[i][col] != 0) {
            let mut r = rows.remove(i);
            if r[col] < 0 {
                r.iter_mut().for_each(|x| *x = -*x);
            }
            for prev in out.iter_mut() {
                let q = prev[col].div_euclid(r[col]);
                for (x, &b) in prev.iter_mut().zip(&r) {
                    *x -= q * b;
                }
            }
            out.push(r);
        }
        col += 1;
    }
    out
}
