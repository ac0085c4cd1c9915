use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use super::{CoupleError, CouplingParams};
use crate::graph::{Edge, Vertex};

/// Copy `copy ∈ 1..=M` of an edge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiEdge {
    pub base: Edge,
    pub copy: u32,
}

impl fmt::Display for MultiEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.base, self.copy)
    }
}

impl FromStr for MultiEdge {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (base, copy) = s.rsplit_once('#').ok_or_else(|| s.to_string())?;
        Ok(MultiEdge { base: parse_edge(base)?, copy: copy.parse().map_err(|_| s.to_string())? })
    }
}

fn parse_edge(s: &str) -> Result<Edge, String> {
    let (a, b) = s.split_once(")-(").ok_or_else(|| s.to_string())?;
    let a: Vertex = format!("{a})").parse().map_err(|_| s.to_string())?;
    let b: Vertex = format!("({b}").parse().map_err(|_| s.to_string())?;
    Edge::try_new(a, b).ok_or_else(|| s.to_string())
}

/// One logged action of the exploration.
#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    /// `C_0 = {o}` and `C'_0 = {o'}`.
    Start { o: Vertex, o_prime: Vertex },
    /// Odd step: `edge` of `H` explored from `from` through `lift`; `copies[k-1]`
    /// is `ω_{(edge,k)}`, copied to `η_{(lift,k)}`.
    PExplore { edge: Edge, from: Vertex, lift: Edge, copies: Vec<bool>, joined: bool },
    /// Even step: center `u` with representative `x` in its fibre.
    Center { u: Vertex, x: Vertex },
    /// Even step: a copy of a `G`-edge drawn from `ω'` in substep 4 or 5.
    SExplore { substep: u8, copy: MultiEdge, value: bool },
    /// Even step: `u` becomes s-explored with mark `alpha`; the acceptance
    /// probability was `p̂^exponent`.
    Accept { u: Vertex, exponent: usize, alpha: bool },
}

/// An event with the index of its step.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub step: u32,
    pub event: Event,
}

fn bit(b: bool) -> char {
    if b {
        '1'
    } else {
        '0'
    }
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let step = self.step;
        match &self.event {
            Event::Start { o, o_prime } => write!(f, "{step} 0 {o} start {o_prime}"),
            Event::PExplore { edge, from, lift, copies, joined } => {
                let copies: String = copies.iter().map(|&b| bit(b)).collect();
                write!(f, "{step} 4 {edge} p-explore from={from};lift={lift};copies={copies};joined={}", bit(*joined))
            }
            Event::Center { u, x } => write!(f, "{step} 2 {u} center {x}"),
            Event::SExplore { substep, copy, value } => write!(f, "{step} {substep} {copy} s-explore {}", bit(*value)),
            Event::Accept { u, exponent, alpha } => write!(f, "{step} 6 {u} accept n={exponent};alpha={}", bit(*alpha)),
        }
    }
}

fn parse_bit(s: &str) -> Option<bool> {
    match s {
        "0" => Some(false),
        "1" => Some(true),
        _ => None,
    }
}

impl FromStr for Record {
    type Err = String;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let bad = || line.to_string();
        let parts: Vec<&str> = line.split(' ').collect();
        let [step, substep, object, action, value] = parts[..] else {
            return Err(bad());
        };
        let step: u32 = step.parse().map_err(|_| bad())?;
        let vertex = |s: &str| s.parse::<Vertex>().map_err(|_| bad());
        let fields: BTreeMap<&str, &str> = value.split(';').filter_map(|kv| kv.split_once('=')).collect();
        let field = |k: &str| fields.get(k).copied().ok_or_else(bad);
        let event = match (substep, action) {
            ("0", "start") => Event::Start { o: vertex(object)?, o_prime: vertex(value)? },
            ("4", "p-explore") => Event::PExplore {
                edge: parse_edge(object)?,
                from: vertex(field("from")?)?,
                lift: parse_edge(field("lift")?)?,
                copies: field("copies")?.chars().map(|c| parse_bit(&c.to_string()).ok_or_else(bad)).collect::<Result<_, _>>()?,
                joined: parse_bit(field("joined")?).ok_or_else(bad)?,
            },
            ("2", "center") => Event::Center { u: vertex(object)?, x: vertex(value)? },
            ("4" | "5", "s-explore") => Event::SExplore {
                substep: substep.parse().map_err(|_| bad())?,
                copy: object.parse()?,
                value: parse_bit(value).ok_or_else(bad)?,
            },
            ("6", "accept") => Event::Accept {
                u: vertex(object)?,
                exponent: field("n")?.parse().map_err(|_| bad())?,
                alpha: parse_bit(field("alpha")?).ok_or_else(bad)?,
            },
            _ => return Err(bad()),
        };
        Ok(Record { step, event })
    }
}

/// A complete coupling run.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingTranscript {
    pub params: CouplingParams,
    pub seed: u64,
    pub replica: u64,
    pub events: Vec<Record>,
    /// `C_∞ ⊆ V(H)`.
    pub c: BTreeSet<Vertex>,
    /// `C'_∞ ⊆ V(G)`.
    pub c_prime: BTreeSet<Vertex>,
}

impl CouplingTranscript {
    pub fn o(&self) -> Option<&Vertex> {
        match self.events.first().map(|r| &r.event) {
            Some(Event::Start { o, .. }) => Some(o),
            _ => None,
        }
    }

    pub fn o_prime(&self) -> Option<&Vertex> {
        match self.events.first().map(|r| &r.event) {
            Some(Event::Start { o_prime, .. }) => Some(o_prime),
            _ => None,
        }
    }

    /// `η` on every copy it was assigned during the run.
    pub fn eta_defined(&self) -> BTreeMap<MultiEdge, bool> {
        let mut eta = BTreeMap::new();
        for rec in &self.events {
            match &rec.event {
                Event::PExplore { lift, copies, .. } => {
                    for (k, &b) in copies.iter().enumerate() {
                        eta.insert(MultiEdge { base: lift.clone(), copy: k as u32 + 1 }, b);
                    }
                }
                Event::SExplore { copy, value, .. } => {
                    eta.insert(copy.clone(), *value);
                }
                _ => {}
            }
        }
        eta
    }

    /// `α` on the s-explored vertices.
    pub fn alpha_defined(&self) -> BTreeMap<Vertex, bool> {
        self.events
            .iter()
            .filter_map(|rec| match &rec.event {
                Event::Accept { u, alpha, .. } => Some((u.clone(), *alpha)),
                _ => None,
            })
            .collect()
    }

    /// Number of enhancements performed.
    pub fn enhancements(&self) -> usize {
        self.alpha_defined().values().filter(|&&a| a).count()
    }

    pub fn to_lines(&self) -> String {
        self.events.iter().map(|r| format!("{r}\n")).collect()
    }

    /// Parses event lines; the final sets are left empty and are recovered by an audit.
    pub fn from_lines(text: &str, params: CouplingParams, seed: u64, replica: u64) -> Result<Self, CoupleError> {
        let events = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(no, l)| l.trim().parse::<Record>().map_err(|_| CoupleError::Parse { line: no + 1, text: l.to_string() }))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CouplingTranscript { params, seed, replica, events, c: BTreeSet::new(), c_prime: BTreeSet::new() })
    }
}
