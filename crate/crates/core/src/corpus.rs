//! Fixtures, seeded generators and the recipe language.
//!
//! A recipe is a nested term:
//!
//! ```text
//! join2(even, leaf(C6), leaf(bipartite(6, seed)))
//! cojoin2(odd, ends(line(7, seed), {0}, {4}), co(doubled(6, 11)))
//! kjoin(10/00, ck(bipartite(8, seed), {6,7}) @ {6,7}, ck(graph(5, 0-1 1-2 2-3), {3,4}) @ {3,4})
//! ```
//!
//! Fixtures: `C<k>`, `P<k>`, `K<k>`, `S<k>`. Random families take a size
//! and either a number or the word `seed`; the latter draws from the
//! generator seed, on a ChaCha8 stream numbered by the leaf's position in
//! the recipe (generator `chacha8-stream-v1`). `join2` puts the left side
//! first in the labeling and records it as the ground-truth side.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basic::{classify_basic, BasicKind};
use crate::berge::is_in_class_f;
use crate::decomposition::{find_bsp, split_for_side, split_violation, two_join_parity, JoinKind, Parity, TwoJoinSplit};
use crate::error::{Error, Result};
use crate::kjoin::{CkLeaf, CompositionTree, KJoinInterface};
use crate::limits::Limits;
use crate::trigraph::{Theta, Trigraph};
use crate::vset::VertexSet;

/// Name of the generator algorithm behind `seed` leaves.
pub const GENERATOR: &str = "chacha8-stream-v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeedRef {
    /// The generator seed, on the leaf's own stream.
    Global,
    Fixed(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Bipartite,
    Line,
    Doubled,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Bipartite => "bipartite",
            Family::Line => "line",
            Family::Doubled => "doubled",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Fixture(String),
    Random { family: Family, size: usize, seed: SeedRef },
    Graph { n: usize, edges: Vec<(usize, usize)> },
    Leaf(Box<Term>),
    Co(Box<Term>),
    Ends { inner: Box<Term>, a: Vec<usize>, b: Vec<usize> },
    Join2 { parity: Parity, complement: bool, left: Box<Term>, right: Box<Term> },
    Ck { inner: Box<Term>, parts: Vec<Vec<usize>> },
    KJoin { pattern: String, left: Box<Term>, left_ports: Vec<usize>, right: Box<Term>, right_ports: Vec<usize> },
}

fn list(v: &[usize]) -> String {
    let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", s.join(","))
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Fixture(name) => f.write_str(name),
            Term::Random { family, size, seed } => match seed {
                SeedRef::Global => write!(f, "{family}({size}, seed)"),
                SeedRef::Fixed(s) => write!(f, "{family}({size}, {s})"),
            },
            Term::Graph { n, edges } => {
                let e: Vec<String> = edges.iter().map(|(u, v)| format!("{u}-{v}")).collect();
                write!(f, "graph({n}, {})", e.join(" "))
            }
            Term::Leaf(t) => write!(f, "leaf({t})"),
            Term::Co(t) => write!(f, "co({t})"),
            Term::Ends { inner, a, b } => write!(f, "ends({inner}, {}, {})", list(a), list(b)),
            Term::Join2 { parity, complement, left, right } => {
                let name = if *complement { "cojoin2" } else { "join2" };
                write!(f, "{name}({parity}, {left}, {right})")
            }
            Term::Ck { inner, parts } => {
                let p: Vec<String> = parts.iter().map(|p| list(p)).collect();
                write!(f, "ck({inner}, {})", p.join("/"))
            }
            Term::KJoin { pattern, left, left_ports, right, right_ports } => write!(
                f,
                "kjoin({pattern}, {left} @ {}, {right} @ {})",
                list(left_ports),
                list(right_ports)
            ),
        }
    }
}

// ---- parsing -------------------------------------------------------------

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: 1, msg: format!("recipe, column {}: {}", self.pos + 1, msg.into()) })
    }

    fn skip(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{}`", c as char))
        }
    }

    fn word(&mut self) -> Result<String> {
        self.skip();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a name or number");
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    fn number(&mut self) -> Result<usize> {
        let w = self.word()?;
        match w.parse() {
            Ok(x) => Ok(x),
            Err(_) => self.err(format!("expected a number, found `{w}`")),
        }
    }

    fn set(&mut self) -> Result<Vec<usize>> {
        self.eat(b'{')?;
        let mut out = Vec::new();
        if self.peek() == Some(b'}') {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            out.push(self.number()?);
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b'}') => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => return self.err("expected `,` or `}`"),
            }
        }
    }

    fn parity(&mut self) -> Result<Parity> {
        match self.word()?.as_str() {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            other => self.err(format!("expected `even` or `odd`, found `{other}`")),
        }
    }

    fn term(&mut self) -> Result<Term> {
        let name = self.word()?;
        if self.peek() != Some(b'(') {
            return fixture_name(&name).map(|_| Term::Fixture(name.clone())).or_else(|_| self.err(format!("unknown fixture `{name}`")));
        }
        self.eat(b'(')?;
        let t = match name.as_str() {
            "leaf" => Term::Leaf(Box::new(self.term()?)),
            "co" => Term::Co(Box::new(self.term()?)),
            "bipartite" | "line" | "doubled" => {
                let family = match name.as_str() {
                    "bipartite" => Family::Bipartite,
                    "line" => Family::Line,
                    _ => Family::Doubled,
                };
                let size = self.number()?;
                let seed = if self.peek() == Some(b',') {
                    self.pos += 1;
                    let w = self.word()?;
                    if w == "seed" {
                        SeedRef::Global
                    } else {
                        match w.parse() {
                            Ok(s) => SeedRef::Fixed(s),
                            Err(_) => return self.err(format!("expected `seed` or a number, found `{w}`")),
                        }
                    }
                } else {
                    SeedRef::Global
                };
                Term::Random { family, size, seed }
            }
            "graph" => {
                let n = self.number()?;
                let mut edges = Vec::new();
                if self.peek() == Some(b',') {
                    self.pos += 1;
                    while self.peek() != Some(b')') {
                        let u = self.number()?;
                        self.eat(b'-')?;
                        let v = self.number()?;
                        edges.push((u, v));
                    }
                }
                Term::Graph { n, edges }
            }
            "ends" => {
                let inner = Box::new(self.term()?);
                self.eat(b',')?;
                let a = self.set()?;
                self.eat(b',')?;
                let b = self.set()?;
                Term::Ends { inner, a, b }
            }
            "join2" | "cojoin2" => {
                let parity = self.parity()?;
                self.eat(b',')?;
                let left = Box::new(self.term()?);
                self.eat(b',')?;
                let right = Box::new(self.term()?);
                Term::Join2 { parity, complement: name == "cojoin2", left, right }
            }
            "ck" => {
                let inner = Box::new(self.term()?);
                let mut parts = Vec::new();
                if self.peek() == Some(b',') {
                    self.pos += 1;
                    parts.push(self.set()?);
                    while self.peek() == Some(b'/') {
                        self.pos += 1;
                        parts.push(self.set()?);
                    }
                }
                Term::Ck { inner, parts }
            }
            "kjoin" => {
                let mut rows = vec![self.word()?];
                while self.peek() == Some(b'/') {
                    self.pos += 1;
                    rows.push(self.word()?);
                }
                self.eat(b',')?;
                let left = Box::new(self.term()?);
                self.eat(b'@')?;
                let left_ports = self.set()?;
                self.eat(b',')?;
                let right = Box::new(self.term()?);
                self.eat(b'@')?;
                let right_ports = self.set()?;
                Term::KJoin { pattern: rows.join("/"), left, left_ports, right, right_ports }
            }
            other => return self.err(format!("unknown term `{other}`")),
        };
        self.eat(b')')?;
        Ok(t)
    }
}

impl Term {
    pub fn parse(text: &str) -> Result<Term> {
        let mut p = Parser { s: text.as_bytes(), pos: 0 };
        let t = p.term()?;
        if p.peek().is_some() {
            return p.err("trailing input");
        }
        Ok(t)
    }

    pub fn is_kjoin(&self) -> bool {
        matches!(self, Term::KJoin { .. } | Term::Ck { .. })
    }
}

// ---- fixtures and random families -----------------------------------------

fn fixture_name(name: &str) -> Result<Trigraph> {
    let bad = || Error::InvalidInput(format!("unknown fixture `{name}`"));
    let (head, num) = name.split_at(1);
    let k: usize = num.parse().map_err(|_| bad())?;
    let t = match head {
        "C" if k >= 3 => Trigraph::cycle(k),
        "P" if k >= 1 => Trigraph::path(k),
        "K" => Trigraph::clique(k),
        "S" => Trigraph::stable(k),
        _ => return Err(bad()),
    };
    Ok(t)
}

/// A named fixture: `C<k>` cycle, `P<k>` path on k vertices, `K<k>`
/// clique, `S<k>` stable set.
pub fn fixture(name: &str) -> Result<Trigraph> {
    fixture_name(name)
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &(a, b) in edges {
            let w = if a == u { b } else if b == u { a } else { continue };
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|x| x)
}

/// Union of three random matchings between the even and the odd vertices,
/// then joined up if disconnected.
fn bipartite_edges(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let evens: Vec<usize> = (0..n).step_by(2).collect();
    let mut odds: Vec<usize> = (1..n).step_by(2).collect();
    let mut edges = std::collections::BTreeSet::new();
    if odds.is_empty() {
        return Vec::new();
    }
    for _ in 0..3 {
        odds.shuffle(rng);
        for (i, &e) in evens.iter().enumerate() {
            let o = if i < odds.len() { odds[i] } else { *odds.choose(rng).expect("nonempty") };
            edges.insert((e.min(o), e.max(o)));
        }
    }
    let mut edges: Vec<(usize, usize)> = edges.into_iter().collect();
    while !connected(n, &edges) {
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(a, b) in &edges {
                let w = if a == u { b } else if b == u { a } else { continue };
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        let out = (0..n).find(|&v| !seen[v]).expect("disconnected");
        let ins: Vec<usize> = (0..n).filter(|&v| seen[v] && (v + out) % 2 == 1).collect();
        let v = *ins.choose(rng).expect("both sides are reached");
        edges.push((v.min(out), v.max(out)));
    }
    edges
}

/// Connected bipartite graph, close to cubic; even vertices on one side,
/// odd on the other.
pub fn random_bipartite(n: usize, rng: &mut ChaCha8Rng) -> Result<Trigraph> {
    Trigraph::from_edges(n, &bipartite_edges(n, rng))
}

/// Connected bipartite root with `m` edges on vertices `0..h`, even
/// vertices on one side: `(h, edges)`.
pub fn random_line_root(m: usize, rng: &mut ChaCha8Rng) -> Result<(usize, Vec<(usize, usize)>)> {
    if m == 0 {
        return Ok((0, Vec::new()));
    }
    let mut h = (2 * m).div_ceil(3).max(2);
    let mut root = bipartite_edges(h, rng);
    while root.len() < m {
        h += 1;
        root = bipartite_edges(h, rng);
    }
    root.shuffle(rng);
    let mut i = 0;
    while root.len() > m && i < root.len() {
        let e = root.remove(i);
        if !connected(h, &root) {
            root.insert(i, e);
            i += 1;
        }
    }
    if root.len() != m {
        return Err(Error::InvalidInput(format!("no connected bipartite root with {m} edges")));
    }
    Ok((h, root))
}

/// Line graph of the given root edges.
pub fn line_graph(root: &[(usize, usize)]) -> Result<Trigraph> {
    let m = root.len();
    let mut t = Trigraph::new(m)?;
    for i in 0..m {
        for j in i + 1..m {
            let (a, b) = root[i];
            let (c, d) = root[j];
            if a == c || a == d || b == c || b == d {
                t.set(i, j, Theta::Strong);
            }
        }
    }
    Ok(t)
}

/// Line graph of a connected bipartite graph with `m` edges, close to
/// cubic.
pub fn random_line(m: usize, rng: &mut ChaCha8Rng) -> Result<Trigraph> {
    line_graph(&random_line_root(m, rng)?.1)
}

/// Doubled graph: `X` a matching plus isolated vertices, `Y` the
/// complement of one, with the incidence rule between them.
pub fn random_doubled(n: usize, rng: &mut ChaCha8Rng) -> Result<Trigraph> {
    let mut t = Trigraph::new(n)?;
    let nx = rng.gen_range(0..=n);
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut v = 0;
    while v < nx {
        if v + 1 < nx && rng.gen_bool(0.6) {
            t.set(v, v + 1, Theta::Strong);
            comps.push(vec![v, v + 1]);
            v += 2;
        } else {
            comps.push(vec![v]);
            v += 1;
        }
    }
    let mut anti: Vec<Vec<usize>> = Vec::new();
    while v < n {
        if v + 1 < n && rng.gen_bool(0.6) {
            anti.push(vec![v, v + 1]);
            v += 2;
        } else {
            anti.push(vec![v]);
            v += 1;
        }
    }
    for (i, a) in anti.iter().enumerate() {
        for b in &anti[i + 1..] {
            for &x in a {
                for &y in b {
                    t.set(x, y, Theta::Strong);
                }
            }
        }
        if a.len() == 2 {
            t.set(a[0], a[1], Theta::StrongAnti);
        }
    }
    for c in &comps {
        for a in &anti {
            match (c.len(), a.len()) {
                (1, 1) => {
                    if rng.gen_bool(0.5) {
                        t.set(c[0], a[0], Theta::Strong);
                    }
                }
                (1, 2) => t.set(c[0], a[rng.gen_range(0..2)], Theta::Strong),
                (2, 1) => t.set(c[rng.gen_range(0..2)], a[0], Theta::Strong),
                _ => {
                    let flip = rng.gen_range(0..2);
                    t.set(c[0], a[flip], Theta::Strong);
                    t.set(c[1], a[1 - flip], Theta::Strong);
                }
            }
        }
    }
    Ok(t)
}

// ---- evaluation -------------------------------------------------------------

/// One 2-join the recipe intended, over the final labeling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthJoin {
    pub kind: JoinKind,
    pub parity: Parity,
    /// The recipe's left side.
    pub x1: VertexSet,
}

/// A basic leaf of the recipe and where its vertices ended up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthLeaf {
    pub recipe: String,
    pub vertices: VertexSet,
    /// Classification at generation time, when within the caps.
    pub kind: Option<BasicKind>,
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub trigraph: Trigraph,
    /// Outermost join first.
    pub joins: Vec<TruthJoin>,
    pub leaves: Vec<TruthLeaf>,
}

impl Generated {
    /// Ground-truth sides, usable as decomposition hints.
    pub fn hints(&self) -> Vec<VertexSet> {
        self.joins.iter().map(|j| j.x1).collect()
    }

    pub fn is_composed(&self) -> bool {
        !self.joins.is_empty()
    }

    /// Ground-truth record as comment lines.
    pub fn truth_text(&self) -> String {
        let mut s = String::new();
        for j in &self.joins {
            s.push_str(&format!("# join {} {} X1={}\n", j.kind, j.parity, j.x1));
        }
        for l in &self.leaves {
            let kind = l.kind.map_or("unclassified".to_string(), |k| k.to_string());
            s.push_str(&format!("# leaf {} at {} {kind}\n", l.recipe, l.vertices));
        }
        s
    }
}

struct Eval {
    seed: u64,
    stream: u64,
    limits: Limits,
}

struct Built {
    t: Trigraph,
    ends: Option<(VertexSet, VertexSet)>,
    /// Root of a line leaf: vertex count and edges.
    root: Option<(usize, Vec<(usize, usize)>)>,
    joins: Vec<TruthJoin>,
    leaves: Vec<TruthLeaf>,
}

fn shift(s: VertexSet, by: usize) -> VertexSet {
    VertexSet(s.0 << by)
}

fn to_set(v: &[usize], n: usize, what: &str) -> Result<VertexSet> {
    VertexSet::from_iter_checked(v.iter().copied(), n)
        .ok_or_else(|| Error::InvalidInput(format!("{what} {v:?} is out of range or repeated (n = {n})")))
}

fn union(t1: &Trigraph, t2: &Trigraph) -> Result<Trigraph> {
    let (n1, n2) = (t1.n(), t2.n());
    let mut t = Trigraph::new(n1 + n2)?;
    for u in 0..n1 {
        for v in u + 1..n1 {
            t.set(u, v, t1.theta(u, v));
        }
    }
    for u in 0..n2 {
        for v in u + 1..n2 {
            t.set(n1 + u, n1 + v, t2.theta(u, v));
        }
    }
    Ok(t)
}

/// `A = {0}` and `B = {v}` for the vertices at a distance from 0 of the
/// wanted parity, farthest first, neighbors of 0 last.
fn default_ends(t: &Trigraph, parity: Parity) -> Vec<(VertexSet, VertexSet)> {
    let mut dist = vec![usize::MAX; t.n()];
    if t.n() == 0 {
        return Vec::new();
    }
    dist[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for v in t.nbrs(u).iter() {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let want = if parity == Parity::Odd { 1 } else { 0 };
    let mut cands: Vec<usize> = (1..t.n()).filter(|&v| dist[v] != usize::MAX && dist[v] % 2 == want).collect();
    // Adjacent ends only as a last resort.
    cands.sort_by_key(|&v| (dist[v] == 1, std::cmp::Reverse(dist[v]), v));
    cands.into_iter().map(|v| (VertexSet::singleton(0), VertexSet::singleton(v))).collect()
}

impl Eval {
    fn rng(&mut self, seed: &SeedRef) -> ChaCha8Rng {
        let stream = self.stream;
        self.stream += 1;
        match seed {
            SeedRef::Global => {
                let mut r = ChaCha8Rng::seed_from_u64(self.seed);
                r.set_stream(stream);
                r
            }
            SeedRef::Fixed(s) => ChaCha8Rng::seed_from_u64(*s),
        }
    }

    fn leaf(&self, t: Trigraph, recipe: String) -> Built {
        let kind = if t.n() <= self.limits.doubled {
            classify_basic(&t, &self.limits).ok().map(|c| c.kind)
        } else {
            None
        };
        let leaves = vec![TruthLeaf { recipe, vertices: t.vertices(), kind }];
        Built { t, ends: None, root: None, joins: Vec::new(), leaves }
    }

    fn eval(&mut self, term: &Term) -> Result<Built> {
        match term {
            Term::Fixture(name) => Ok(self.leaf(fixture(name)?, term.to_string())),
            Term::Random { family, size, seed } => {
                let mut rng = self.rng(seed);
                let (t, root) = match family {
                    Family::Bipartite => (random_bipartite(*size, &mut rng)?, None),
                    Family::Line => {
                        let root = random_line_root(*size, &mut rng)?;
                        (line_graph(&root.1)?, Some(root))
                    }
                    Family::Doubled => (random_doubled(*size, &mut rng)?, None),
                };
                let mut b = self.leaf(t, term.to_string());
                b.root = root;
                Ok(b)
            }
            Term::Graph { n, edges } => Ok(self.leaf(Trigraph::from_edges(*n, edges)?, term.to_string())),
            Term::Leaf(inner) => self.eval(inner),
            Term::Co(inner) => {
                let mut b = self.eval(inner)?;
                b.t = b.t.complement();
                b.root = None;
                for l in &mut b.leaves {
                    l.recipe = format!("co({})", l.recipe);
                    l.kind = l.kind.map(co_kind);
                }
                for j in &mut b.joins {
                    j.kind = match j.kind {
                        JoinKind::Direct => JoinKind::Complement,
                        JoinKind::Complement => JoinKind::Direct,
                    };
                }
                Ok(b)
            }
            Term::Ends { inner, a, b } => {
                let mut built = self.eval(inner)?;
                let n = built.t.n();
                built.ends = Some((to_set(a, n, "A")?, to_set(b, n, "B")?));
                Ok(built)
            }
            Term::Join2 { parity, complement, left, right } => {
                let l = self.eval(left)?;
                let r = self.eval(right)?;
                join2(l, r, *parity, *complement)
            }
            Term::Ck { .. } | Term::KJoin { .. } => {
                Err(Error::InvalidInput("k-join terms build compositions; use compose_kjoin".into()))
            }
        }
    }
}

fn co_kind(k: BasicKind) -> BasicKind {
    match k {
        BasicKind::Bipartite => BasicKind::CoBipartite,
        BasicKind::CoBipartite => BasicKind::Bipartite,
        BasicKind::Line => BasicKind::CoLine,
        BasicKind::CoLine => BasicKind::Line,
        other => other,
    }
}

/// Most candidate ends tried per side.
const END_CANDIDATES: usize = 40;

fn candidate_ends(b: &Built, host: &Trigraph, parity: Parity, complement: bool) -> Vec<(VertexSet, VertexSet)> {
    if let Some(e) = b.ends {
        return vec![e];
    }
    let mut c = match (&b.root, complement) {
        (Some((h, root)), false) => star_ends(*h, root, parity),
        _ => default_ends(host, parity),
    };
    // Ends inside one leaf keep the earlier joins of a composed piece
    // intact once this join is contracted.
    c.sort_by_key(|(x, y)| !b.leaves.iter().any(|l| (*x | *y).is_subset(l.vertices)));
    c.truncate(END_CANDIDATES);
    c
}

/// Ends of a line leaf: the edges at two root vertices. Paths between the
/// two stars follow root paths, so their parity is fixed by the colors:
/// odd for vertices on the same side, even otherwise.
fn star_ends(h: usize, root: &[(usize, usize)], parity: Parity) -> Vec<(VertexSet, VertexSet)> {
    let star = |u: usize| -> VertexSet { (0..root.len()).filter(|&i| root[i].0 == u || root[i].1 == u).collect() };
    let adj = |u: usize, v: usize| root.iter().any(|&(a, b)| (a, b) == (u.min(v), u.max(v)));
    let mut dist = vec![vec![usize::MAX; h]; h];
    for (s, row) in dist.iter_mut().enumerate() {
        row[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &(a, b) in root {
                let w = if a == u { b } else if b == u { a } else { continue };
                if row[w] == usize::MAX {
                    row[w] = row[u] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    let same = parity == Parity::Odd;
    let mut pairs: Vec<(usize, usize)> = (0..h)
        .flat_map(|u| (0..h).map(move |v| (u, v)))
        .filter(|&(u, v)| u != v && ((u + v) % 2 == 0) == same && !adj(u, v) && dist[u][v] != usize::MAX)
        .collect();
    pairs.sort_by_key(|&(u, v)| (std::cmp::Reverse(dist[u][v]), u, v));
    pairs
        .into_iter()
        .map(|(u, v)| (star(u), star(v)))
        .filter(|(a, b)| !a.is_empty() && !b.is_empty())
        .collect()
}

fn join2(l: Built, r: Built, parity: Parity, complement: bool) -> Result<Built> {
    let (n1, n2) = (l.t.n(), r.t.n());
    // A complement join is a direct join of the complements.
    let (h1, h2) = if complement { (l.t.complement(), r.t.complement()) } else { (l.t.clone(), r.t.clone()) };
    let lc = candidate_ends(&l, &h1, parity, complement);
    let rc = candidate_ends(&r, &h2, parity, complement);
    let kind = if complement { JoinKind::Complement } else { JoinKind::Direct };
    let base = union(&h1, &h2)?;
    let mut last = String::from("no candidate ends");
    for &(a1, b1) in &lc {
        for &(a2, b2) in &rc {
            let (a2, b2) = (shift(a2, n1), shift(b2, n1));
            let mut h = base.clone();
            for (x, y) in [(a1, a2), (b1, b2)] {
                for u in x.iter() {
                    for v in y.iter() {
                        h.set(u, v, Theta::Strong);
                    }
                }
            }
            let t = if complement { h.complement() } else { h };
            let x1 = VertexSet::full(n1);
            let x2 = shift(VertexSet::full(n2), n1);
            let split = TwoJoinSplit { a1, b1, c1: x1 - a1 - b1, a2, b2, c2: x2 - a2 - b2, kind, parity };
            if let Some(v) = split_violation(&t, &split) {
                last = v;
                continue;
            }
            match two_join_parity(&t, &split) {
                Ok(p) if p == parity => {}
                Ok(p) => {
                    last = format!("paths between the ends are {p}");
                    continue;
                }
                Err(e) => {
                    last = e.to_string();
                    continue;
                }
            }
            // An earlier join survives with the other piece added to the
            // side holding the new ends; ends that straddle it break it.
            let inherited = l
                .joins
                .iter()
                .map(|j| (j.clone(), x2))
                .chain(r.joins.iter().map(|j| (TruthJoin { x1: shift(j.x1, n1), ..j.clone() }, x1)));
            let mut joins = vec![TruthJoin { kind, parity, x1 }];
            for (j, other) in inherited {
                let mut kept = None;
                for side in [j.x1, j.x1 | other] {
                    if split_for_side(&t, side, j.kind)?.is_some_and(|s| s.parity == j.parity) {
                        kept = Some(TruthJoin { x1: side, ..j.clone() });
                        break;
                    }
                }
                match kept {
                    Some(j) => joins.push(j),
                    None => break,
                }
            }
            if joins.len() != 1 + l.joins.len() + r.joins.len() {
                last = "the ends break an earlier 2-join".into();
                continue;
            }
            let mut leaves = l.leaves.clone();
            leaves.extend(r.leaves.iter().map(|x| TruthLeaf { vertices: shift(x.vertices, n1), ..x.clone() }));
            return Ok(Built { t, ends: None, root: None, joins, leaves });
        }
    }
    Err(Error::InvalidStructure(format!("unrealizable recipe: no {parity} {kind} 2-join of the two sides ({last})")))
}

/// Builds the trigraph of a 2-join recipe.
pub fn generate(recipe: &str, seed: u64) -> Result<Generated> {
    generate_term(&Term::parse(recipe)?, seed)
}

pub fn generate_term(term: &Term, seed: u64) -> Result<Generated> {
    let mut ev = Eval { seed, stream: 0, limits: Limits::default() };
    let b = ev.eval(term)?;
    Ok(Generated { trigraph: b.t, joins: b.joins, leaves: b.leaves })
}

/// Builds the composition tree of a k-join recipe.
pub fn compose_kjoin(recipe: &str, seed: u64, k: usize) -> Result<CompositionTree> {
    let term = Term::parse(recipe)?;
    let mut ev = Eval { seed, stream: 0, limits: Limits::default() };
    kjoin_tree(&mut ev, &term, k)
}

fn kjoin_tree(ev: &mut Eval, term: &Term, k: usize) -> Result<CompositionTree> {
    match term {
        Term::KJoin { pattern, left, left_ports, right, right_ports } => {
            let iface = KJoinInterface::parse(pattern)?;
            let l = kjoin_tree(ev, left, k)?;
            let r = kjoin_tree(ev, right, k)?;
            CompositionTree::join(iface, l, left_ports, r, right_ports, k)
        }
        Term::Ck { inner, parts } => {
            let g = ev.eval(inner)?.t;
            let mut covered = VertexSet::EMPTY;
            let mut sets = Vec::new();
            for p in parts {
                let s = to_set(p, g.n(), "part")?;
                covered |= s;
                sets.push(s);
            }
            sets.extend((g.vertices() - covered).iter().map(VertexSet::singleton));
            sets.sort_by_key(|s| s.first());
            Ok(CompositionTree::leaf(CkLeaf::new(g, sets, k)?))
        }
        other => {
            let g = ev.eval(other)?.t;
            let parts = g.vertices().iter().map(VertexSet::singleton).collect();
            Ok(CompositionTree::leaf(CkLeaf::new(g, parts, k)?))
        }
    }
}

// ---- seeded corpora -------------------------------------------------------

/// A corpus entry: recipe, seed and what they build.
#[derive(Clone, Debug)]
pub struct Instance {
    pub recipe: String,
    pub seed: u64,
    pub generated: Generated,
}

fn random_leaf(rng: &mut ChaCha8Rng, size: usize) -> String {
    let base = match rng.gen_range(0..10) {
        0 | 1 if size >= 4 && size.is_multiple_of(2) => format!("C{size}"),
        2 => format!("K{size}"),
        3..=5 => format!("line({size}, seed)"),
        6 => format!("doubled({size}, seed)"),
        _ => format!("bipartite({size}, seed)"),
    };
    if rng.gen_ratio(1, 5) {
        format!("co({base})")
    } else {
        base
    }
}

/// A random recipe with at most `max_n` vertices; `composed` asks for at
/// least one 2-join.
pub fn random_recipe(rng: &mut ChaCha8Rng, max_n: usize, composed: bool) -> String {
    if !composed || max_n < 8 {
        let size = rng.gen_range(3..=max_n);
        return format!("leaf({})", random_leaf(rng, size));
    }
    let parity = if rng.gen_bool(0.5) { "even" } else { "odd" };
    let op = if rng.gen_ratio(1, 4) { "cojoin2" } else { "join2" };
    let n1 = rng.gen_range(4..=max_n - 4);
    let n2 = rng.gen_range(4..=max_n - n1);
    let left = if n1 >= 8 && rng.gen_ratio(1, 4) {
        random_recipe(rng, n1, true)
    } else {
        format!("leaf({})", random_leaf(rng, n1))
    };
    format!("{op}({parity}, {left}, leaf({}))", random_leaf(rng, n2))
}

/// Seeded instances with at most `max_n` vertices that are in the class
/// and free of balanced skew-partitions, checked exhaustively; recipes
/// that fail to build or to qualify are skipped. Every other instance is
/// composed.
pub fn class_corpus(seed: u64, count: usize, max_n: usize) -> Result<Vec<Instance>> {
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 500 * count.max(1) {
            return Err(Error::Verification(format!("only {} of {count} instances after {attempts} attempts", out.len())));
        }
        let composed = out.len() % 2 == 1 && max_n >= 8;
        let recipe = random_recipe(&mut rng, max_n, composed);
        let iseed = rng.gen();
        let Ok(generated) = generate(&recipe, iseed) else { continue };
        let t = &generated.trigraph;
        if t.n() < 3 || t.n() > max_n || !is_in_class_f(t, &limits)?.0 || find_bsp(t, &limits)?.is_some() {
            continue;
        }
        out.push(Instance { recipe, seed: iseed, generated });
    }
    Ok(out)
}

/// Seeded 2-joins of a bipartite leaf and a line leaf with 55 to 60
/// vertices, in the class and free of balanced skew-partitions. Checked
/// with the odd-hole search at full width and the sparse skew search.
pub fn large_corpus(seed: u64, count: usize) -> Result<Vec<Instance>> {
    let limits = Limits { berge: crate::vset::MAX_VERTICES, ..Limits::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 100 * count.max(1) {
            return Err(Error::Verification(format!("only {} of {count} instances after {attempts} attempts", out.len())));
        }
        let parity = if rng.gen_bool(0.5) { "even" } else { "odd" };
        let n = rng.gen_range(55..=60);
        let a = rng.gen_range(24..=32);
        let recipe = format!("join2({parity}, bipartite({a}, seed), line({}, seed))", n - a);
        let iseed = rng.gen();
        let Ok(generated) = generate(&recipe, iseed) else { continue };
        let t = &generated.trigraph;
        if !is_in_class_f(t, &limits)?.0
            || crate::decomposition::find_balanced_skew_partition_sparse(t, &limits)?.is_some()
        {
            continue;
        }
        out.push(Instance { recipe, seed: iseed, generated });
    }
    Ok(out)
}

/// Seeded instances of 63 to 78 vertices where a large bipartite leaf
/// takes one or two small line leaves by 2-joins; with
/// [`skewed_weights`] the extraction contracts every join before it
/// stops.
pub fn contraction_corpus(seed: u64, count: usize) -> Result<Vec<Instance>> {
    let limits = Limits { berge: crate::vset::MAX_VERTICES, ..Limits::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut attempts = 0usize;
    let parity = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.5) { "even" } else { "odd" };
    while out.len() < count {
        attempts += 1;
        if attempts > 100 * count.max(1) {
            return Err(Error::Verification(format!("only {} of {count} instances after {attempts} attempts", out.len())));
        }
        let big = rng.gen_range(56..=60);
        let (p, b) = (parity(&mut rng), rng.gen_range(7..=9));
        let mut recipe = format!("join2({p}, bipartite({big}, seed), line({b}, seed))");
        if rng.gen_bool(0.5) {
            let (p, b) = (parity(&mut rng), rng.gen_range(7..=9));
            recipe = format!("join2({p}, {recipe}, line({b}, seed))");
        }
        let iseed = rng.gen();
        let Ok(generated) = generate(&recipe, iseed) else { continue };
        let t = &generated.trigraph;
        if !is_in_class_f(t, &limits)?.0
            || crate::decomposition::find_balanced_skew_partition_sparse(t, &limits)?.is_some()
        {
            continue;
        }
        out.push(Instance { recipe, seed: iseed, generated });
    }
    Ok(out)
}

/// Real weights: `heavy` on the largest leaf, 1 elsewhere.
pub fn skewed_weights(g: &Generated, heavy: u64) -> Vec<u64> {
    let big = g.leaves.iter().map(|l| l.vertices).max_by_key(|v| v.len()).unwrap_or(VertexSet::EMPTY);
    (0..g.trigraph.n()).map(|v| if big.contains(v) { heavy } else { 1 }).collect()
}

/// A k-join corpus entry.
#[derive(Clone, Debug)]
pub struct KInstance {
    pub recipe: String,
    pub seed: u64,
    pub tree: CompositionTree,
}

/// Interfaces for `k = 2` with one nonzero entry: rows and columns stay
/// distinct, and the all-zero row and column absorb the vertices on the
/// ports' side of a bipartite leaf.
const KJOIN_PATTERNS: [&str; 4] = ["10/00", "01/00", "00/10", "00/01"];

/// A lifted bipartite leaf on `a + 1` vertices: vertex 0 is the live port,
/// vertex `a` the isolated one, and a few more same-side pairs become
/// switchable.
fn kjoin_leaf(rng: &mut ChaCha8Rng, a: usize) -> (String, usize, usize) {
    let edges = bipartite_edges(a, rng);
    let g = Term::Graph { n: a + 1, edges };
    let mut parts = vec![vec![0, a]];
    let mut evens: Vec<usize> = (2..a).step_by(2).collect();
    evens.shuffle(rng);
    for pair in evens.chunks_exact(2).take(rng.gen_range(0..=2)) {
        parts.push(vec![pair[0].min(pair[1]), pair[0].max(pair[1])]);
    }
    (Term::Ck { inner: Box::new(g), parts }.to_string(), 0, a)
}

/// Seeded single-level k-join recipes for `k = 2` with between `min_n`
/// and `max_n` vertices after joining.
pub fn kjoin_corpus(seed: u64, count: usize, min_n: usize, max_n: usize) -> Result<Vec<KInstance>> {
    if min_n > max_n || max_n < 4 {
        return Err(Error::InvalidInput(format!("no k-join sizes between {min_n} and {max_n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.gen_range(min_n.max(4)..=max_n);
        // Half the time one side is as small as possible, so that its parts
        // stay light and extraction contracts instead of exiting early.
        let mut a = if rng.gen_bool(0.5) { n - 1 } else { rng.gen_range(3..=n - 1) };
        let mut b = n + 2 - a;
        if rng.gen_bool(0.5) {
            std::mem::swap(&mut a, &mut b);
        }
        let pattern = KJOIN_PATTERNS[rng.gen_range(0..KJOIN_PATTERNS.len())];
        let rows: Vec<&str> = pattern.split('/').collect();
        let col = rows.iter().find_map(|r| r.find('1')).unwrap_or(0);
        let row = rows.iter().position(|r| r.contains('1')).unwrap_or(0);
        let (left, l_live, l_dead) = kjoin_leaf(&mut rng, a);
        let (right, r_live, r_dead) = kjoin_leaf(&mut rng, b);
        let lp = if col == 0 { vec![l_live, l_dead] } else { vec![l_dead, l_live] };
        let rp = if row == 0 { vec![r_live, r_dead] } else { vec![r_dead, r_live] };
        let recipe = format!("kjoin({pattern}, {left} @ {}, {right} @ {})", list(&lp), list(&rp));
        let iseed = rng.gen();
        let tree = compose_kjoin(&recipe, iseed, 2)?;
        out.push(KInstance { recipe, seed: iseed, tree });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basic::is_bipartite_trigraph;
    use crate::decomposition::{find_balanced_skew_partition, split_for_side};

    #[test]
    fn fixtures() {
        assert_eq!(generate("C4", 0).unwrap().trigraph, Trigraph::cycle(4));
        assert_eq!(generate("leaf(P4)", 0).unwrap().trigraph, Trigraph::path(4));
        assert!(fixture("Q3").is_err());
        assert!(generate("C2", 0).is_err());
    }

    #[test]
    fn recipes_round_trip_through_text() {
        for r in [
            "join2(even, leaf(C6), leaf(bipartite(6, seed)))",
            "cojoin2(odd, ends(line(7, 3), {0}, {4}), co(doubled(6, seed)))",
            "kjoin(10/00, ck(bipartite(8, seed), {6,7}) @ {6,7}, ck(graph(5, 0-1 1-2), {3,4}) @ {3,4})",
        ] {
            let t = Term::parse(r).unwrap();
            assert_eq!(Term::parse(&t.to_string()).unwrap(), t);
        }
        assert!(Term::parse("join2(even, C6)").is_err());
        assert!(Term::parse("C6 C6").is_err());
    }

    #[test]
    fn same_seed_same_trigraph() {
        let r = "join2(odd, bipartite(7, seed), line(6, seed))";
        let a = generate(r, 5).unwrap();
        let b = generate(r, 5).unwrap();
        assert_eq!(a.trigraph, b.trigraph);
        assert_eq!(a.joins, b.joins);
    }

    #[test]
    fn random_families_are_basic() {
        let limits = Limits::default();
        for s in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let b = random_bipartite(9, &mut rng).unwrap();
            assert!(b.is_connected(b.vertices()));
            assert!(is_bipartite_trigraph(&b).is_some());
            let l = random_line(9, &mut rng).unwrap();
            assert!(!(classify_basic(&l, &limits).unwrap().kind == BasicKind::NotBasic));
            let d = random_doubled(9, &mut rng).unwrap();
            assert!(classify_basic(&d, &limits).unwrap().is_basic());
        }
    }

    #[test]
    fn even_join_of_c6_and_bipartite_leaf() {
        let g = generate("join2(even, leaf(C6), leaf(bipartite(6, seed)))", 1).unwrap();
        assert_eq!(g.trigraph.n(), 12);
        let j = &g.joins[0];
        let s = split_for_side(&g.trigraph, j.x1, JoinKind::Direct).unwrap().unwrap();
        assert_eq!(s.parity, Parity::Even);
    }

    #[test]
    fn complement_join_is_recorded() {
        let g = generate("cojoin2(odd, leaf(C6), leaf(C8))", 0).unwrap();
        let j = &g.joins[0];
        assert_eq!(j.kind, JoinKind::Complement);
        assert!(split_for_side(&g.trigraph, j.x1, JoinKind::Complement).unwrap().is_some());
    }

    #[test]
    fn unrealizable_parity_is_reported() {
        // Every path between two vertices of K3 has length 1 or 2 through a
        // single interior vertex; ends at distance 2 do not exist.
        let e = generate("join2(even, leaf(K3), leaf(C6))", 0).unwrap_err();
        assert!(matches!(e, Error::InvalidStructure(m) if m.contains("unrealizable")));
    }

    #[test]
    fn kjoin_recipe_builds() {
        let tree = compose_kjoin(
            "kjoin(1, ck(graph(3, 0-2 1-2), {2}) @ {2}, ck(graph(3, 0-2 1-2), {2}) @ {2})",
            0,
            1,
        )
        .unwrap();
        assert_eq!(tree.trigraph().n(), 4);
        assert_eq!(tree.leaves().len(), 2);
    }

    #[test]
    fn sparse_and_exhaustive_skew_searches_agree() {
        let limits = Limits::default();
        let corpus = class_corpus(3, 25, 10).unwrap();
        for t in corpus.iter().map(|i| &i.generated.trigraph).chain([&Trigraph::path(4), &Trigraph::path(6)]) {
            let a = find_balanced_skew_partition(t, &limits).unwrap().is_some();
            let b = crate::decomposition::find_balanced_skew_partition_sparse(t, &Limits::unbounded()).unwrap().is_some();
            assert_eq!(a, b, "{t:?}");
        }
    }

    #[test]
    fn kjoin_corpus_builds_in_range() {
        for inst in kjoin_corpus(4, 30, 4, 12).unwrap() {
            let n = inst.tree.trigraph().n();
            assert!((4..=12).contains(&n), "{}", inst.recipe);
            assert_eq!(compose_kjoin(&inst.recipe, inst.seed, 2).unwrap(), inst.tree);
        }
    }

    #[test]
    fn corpus_is_reproducible() {
        let a = class_corpus(9, 10, 12).unwrap();
        let b = class_corpus(9, 10, 12).unwrap();
        assert_eq!(a.len(), 10);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.recipe, y.recipe);
            assert_eq!(x.generated.trigraph, y.generated.trigraph);
        }
    }
}
