use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::{cayley, cycle, hypercubic, product, regular_tree, FiniteGraph, GraphError, GraphRef};

/// A graph family with its parameters.
///
/// Textual form is functional, e.g. `product(hypercubic(2),cycle(3))`.
/// The same data can be given as a TOML document with a `family` key and
/// family parameters (`d`, `n`, `k`, `orders`, or `left`/`right` tables).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphSpec {
    Hypercubic(usize),
    Tree(usize),
    Cycle(usize),
    Path(usize),
    Star(usize),
    Cayley(Vec<u32>),
    Product(Box<GraphSpec>, Box<GraphSpec>),
}

impl GraphSpec {
    pub fn build(&self) -> Result<GraphRef, GraphError> {
        match self {
            GraphSpec::Hypercubic(d) => hypercubic(*d),
            GraphSpec::Tree(d) => regular_tree(*d),
            GraphSpec::Cycle(n) => cycle(*n),
            GraphSpec::Path(n) => {
                if *n < 2 {
                    return Err(GraphError::InvalidParameter("path needs at least 2 vertices".into()));
                }
                Ok(Arc::new(FiniteGraph::path(*n)?))
            }
            GraphSpec::Star(k) => {
                if *k < 1 {
                    return Err(GraphError::InvalidParameter("star needs a leaf".into()));
                }
                Ok(Arc::new(FiniteGraph::star(*k)?))
            }
            GraphSpec::Cayley(o) => cayley(o.clone()),
            GraphSpec::Product(a, b) => Ok(product(a.build()?, b.build()?)),
        }
    }

    pub fn from_toml(doc: &str) -> Result<Self, GraphError> {
        let v: toml::Table = doc.parse().map_err(|e: toml::de::Error| GraphError::Parse(e.to_string()))?;
        Self::from_table(&v)
    }

    fn from_table(t: &toml::Table) -> Result<Self, GraphError> {
        let fam = t
            .get("family")
            .and_then(|v| v.as_str())
            .ok_or_else(|| GraphError::Parse("missing string key `family`".into()))?;
        let int = |k: &str| -> Result<usize, GraphError> {
            t.get(k)
                .and_then(|v| v.as_integer())
                .filter(|&x| x >= 0)
                .map(|x| x as usize)
                .ok_or_else(|| GraphError::Parse(format!("family `{fam}` needs a nonnegative integer `{k}`")))
        };
        let sub = |k: &str| -> Result<Box<GraphSpec>, GraphError> {
            let tab = t
                .get(k)
                .and_then(|v| v.as_table())
                .ok_or_else(|| GraphError::Parse(format!("product needs a `{k}` table")))?;
            Ok(Box::new(Self::from_table(tab)?))
        };
        match fam {
            "hypercubic" => Ok(GraphSpec::Hypercubic(int("d")?)),
            "tree" | "regular_tree" => Ok(GraphSpec::Tree(int("d")?)),
            "cycle" => Ok(GraphSpec::Cycle(int("n")?)),
            "path" => Ok(GraphSpec::Path(int("n")?)),
            "star" => Ok(GraphSpec::Star(int("k")?)),
            "cayley" => {
                let arr = t
                    .get("orders")
                    .and_then(|v| v.as_array())
                    .ok_or_else(|| GraphError::Parse("cayley needs an `orders` array".into()))?;
                let orders = arr
                    .iter()
                    .map(|x| x.as_integer().filter(|&i| i >= 0).map(|i| i as u32))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| GraphError::Parse("cayley orders must be nonnegative integers".into()))?;
                Ok(GraphSpec::Cayley(orders))
            }
            "product" => Ok(GraphSpec::Product(sub("left")?, sub("right")?)),
            other => Err(GraphError::Parse(format!("unknown family `{other}`"))),
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Hypercubic(d) => write!(f, "hypercubic({d})"),
            GraphSpec::Tree(d) => write!(f, "tree({d})"),
            GraphSpec::Cycle(n) => write!(f, "cycle({n})"),
            GraphSpec::Path(n) => write!(f, "path({n})"),
            GraphSpec::Star(k) => write!(f, "star({k})"),
            GraphSpec::Cayley(o) => {
                let parts: Vec<String> = o.iter().map(|x| x.to_string()).collect();
                write!(f, "cayley({})", parts.join(","))
            }
            GraphSpec::Product(a, b) => write!(f, "product({a},{b})"),
        }
    }
}

/// A parsed call `name(arg, arg, ...)`, where each argument is either an
/// integer or another call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Int(i64),
    Call(String, Vec<Term>),
}

impl Term {
    pub fn parse(s: &str) -> Result<Term, GraphError> {
        let mut p = TermParser { s: s.as_bytes(), i: 0 };
        let t = p.term()?;
        p.ws();
        if p.i != p.s.len() {
            return Err(GraphError::Parse(format!("trailing input in `{s}`")));
        }
        Ok(t)
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Term::Int(i) => Some(*i),
            Term::Call(..) => None,
        }
    }
}

struct TermParser<'a> {
    s: &'a [u8],
    i: usize,
}

impl TermParser<'_> {
    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn err(&self, what: &str) -> GraphError {
        GraphError::Parse(format!("{what} at byte {} of `{}`", self.i, String::from_utf8_lossy(self.s)))
    }

    fn term(&mut self) -> Result<Term, GraphError> {
        self.ws();
        let start = self.i;
        if self.i < self.s.len() && (self.s[self.i] == b'-' || self.s[self.i].is_ascii_digit()) {
            self.i += 1;
            while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                self.i += 1;
            }
            let txt = std::str::from_utf8(&self.s[start..self.i]).unwrap();
            return txt.parse().map(Term::Int).map_err(|_| self.err("bad integer"));
        }
        while self.i < self.s.len() && (self.s[self.i].is_ascii_alphanumeric() || self.s[self.i] == b'_') {
            self.i += 1;
        }
        if start == self.i {
            return Err(self.err("expected a name or integer"));
        }
        let name = std::str::from_utf8(&self.s[start..self.i]).unwrap().to_string();
        self.ws();
        let mut args = Vec::new();
        if self.i < self.s.len() && self.s[self.i] == b'(' {
            self.i += 1;
            self.ws();
            if self.i < self.s.len() && self.s[self.i] == b')' {
                self.i += 1;
            } else {
                loop {
                    args.push(self.term()?);
                    self.ws();
                    match self.s.get(self.i) {
                        Some(b',') => self.i += 1,
                        Some(b')') => {
                            self.i += 1;
                            break;
                        }
                        _ => return Err(self.err("expected `,` or `)`")),
                    }
                }
            }
        }
        Ok(Term::Call(name, args))
    }
}

impl TryFrom<&Term> for GraphSpec {
    type Error = GraphError;

    fn try_from(t: &Term) -> Result<Self, Self::Error> {
        let Term::Call(name, args) = t else {
            return Err(GraphError::Parse("expected a graph family".into()));
        };
        let one = || -> Result<usize, GraphError> {
            match args.as_slice() {
                [Term::Int(x)] if *x >= 0 => Ok(*x as usize),
                _ => Err(GraphError::Parse(format!("`{name}` takes one nonnegative integer"))),
            }
        };
        match name.as_str() {
            "hypercubic" => Ok(GraphSpec::Hypercubic(one()?)),
            "tree" | "regular_tree" => Ok(GraphSpec::Tree(one()?)),
            "cycle" => Ok(GraphSpec::Cycle(one()?)),
            "path" => Ok(GraphSpec::Path(one()?)),
            "star" => Ok(GraphSpec::Star(one()?)),
            "cayley" => args
                .iter()
                .map(|a| a.as_int().filter(|&x| x >= 0).map(|x| x as u32))
                .collect::<Option<Vec<_>>>()
                .map(GraphSpec::Cayley)
                .ok_or_else(|| GraphError::Parse("cayley takes generator orders".into())),
            "product" => match args.as_slice() {
                [a, b] => Ok(GraphSpec::Product(Box::new(a.try_into()?), Box::new(b.try_into()?))),
                _ => Err(GraphError::Parse("product takes two graphs".into())),
            },
            other => Err(GraphError::Parse(format!("unknown family `{other}`"))),
        }
    }
}

impl FromStr for GraphSpec {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        (&Term::parse(s)?).try_into()
    }
}
