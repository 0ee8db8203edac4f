//! Recognition of the five basic classes, with re-checkable certificates.

use std::fmt;

use crate::error::{cap_check, Error, Result};
use crate::limits::Limits;
use crate::separation::parse_set;
use crate::trigraph::Trigraph;
use crate::vset::VertexSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasicKind {
    Bipartite,
    CoBipartite,
    Line,
    CoLine,
    Doubled,
    NotBasic,
}

impl BasicKind {
    pub fn name(self) -> &'static str {
        match self {
            BasicKind::Bipartite => "bipartite",
            BasicKind::CoBipartite => "cobipartite",
            BasicKind::Line => "line",
            BasicKind::CoLine => "coline",
            BasicKind::Doubled => "doubled",
            BasicKind::NotBasic => "notbasic",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "bipartite" => BasicKind::Bipartite,
            "cobipartite" => BasicKind::CoBipartite,
            "line" => BasicKind::Line,
            "coline" => BasicKind::CoLine,
            "doubled" => BasicKind::Doubled,
            "notbasic" => BasicKind::NotBasic,
            _ => return None,
        })
    }

    /// Classes whose payload describes the complement.
    pub fn is_co(self) -> bool {
        matches!(self, BasicKind::CoBipartite | BasicKind::CoLine)
    }
}

impl fmt::Display for BasicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A bipartite root graph whose line graph is the full realization of a
/// trigraph: trigraph vertex `v` is the root edge `edges[v]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineRoot {
    pub root_vertices: usize,
    pub edges: Vec<(usize, usize)>,
    /// Side of each root vertex in a proper 2-coloring.
    pub side: Vec<bool>,
}

impl LineRoot {
    /// Trigraph vertices incident to each root vertex (the stars).
    pub fn stars(&self) -> Vec<VertexSet> {
        let mut s = vec![VertexSet::EMPTY; self.root_vertices];
        for (v, &(a, b)) in self.edges.iter().enumerate() {
            s[a].insert(v);
            s[b].insert(v);
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasicPayload {
    /// Two strong stable sets (of the complement for the co-class).
    Bipartition(VertexSet, VertexSet),
    /// Root of the trigraph (of the complement for the co-class).
    Root(LineRoot),
    /// Good partition `(X, Y)`.
    Good(VertexSet, VertexSet),
    None,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicCertificate {
    pub kind: BasicKind,
    pub payload: BasicPayload,
}

impl BasicCertificate {
    pub fn not_basic() -> Self {
        BasicCertificate { kind: BasicKind::NotBasic, payload: BasicPayload::None }
    }

    pub fn is_basic(&self) -> bool {
        self.kind != BasicKind::NotBasic
    }

    /// Re-checks the payload against the class definition. `NotBasic`
    /// certificates carry no claim and always validate.
    pub fn validate(&self, t: &Trigraph) -> Result<()> {
        let host = if self.kind.is_co() { t.complement() } else { t.clone() };
        let bad = |m: String| Err(Error::InvalidStructure(format!("{} certificate: {m}", self.kind)));
        match (self.kind, &self.payload) {
            (BasicKind::NotBasic, BasicPayload::None) => Ok(()),
            (BasicKind::Bipartite | BasicKind::CoBipartite, BasicPayload::Bipartition(a, b)) => {
                if !a.is_disjoint(*b) || (*a | *b) != host.vertices() {
                    return bad("parts do not partition the vertices".into());
                }
                if !host.is_strong_stable(*a) || !host.is_strong_stable(*b) {
                    return bad("a part is not a strong stable set".into());
                }
                Ok(())
            }
            (BasicKind::Line | BasicKind::CoLine, BasicPayload::Root(r)) => {
                validate_root(&host, r).or_else(&bad)
            }
            (BasicKind::Doubled, BasicPayload::Good(x, y)) => {
                good_partition_violation(&host, *x, *y).map_or(Ok(()), bad)
            }
            _ => bad("payload does not match kind".into()),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("basic {}\n", self.kind);
        match &self.payload {
            BasicPayload::Bipartition(a, b) => s.push_str(&format!("parts {a} | {b}\n")),
            BasicPayload::Good(x, y) => s.push_str(&format!("good {x} | {y}\n")),
            BasicPayload::Root(r) => {
                s.push_str(&format!("root {}\n", r.root_vertices));
                for (v, (a, b)) in r.edges.iter().enumerate() {
                    s.push_str(&format!("rootedge {v} {a} {b}\n"));
                }
                let ones: Vec<String> =
                    (0..r.root_vertices).filter(|&i| r.side[i]).map(|i| i.to_string()).collect();
                s.push_str(&format!("side {}\n", ones.join(",")));
            }
            BasicPayload::None => {}
        }
        s.push_str("end\n");
        s
    }

    /// Parses the block written by [`to_text`](Self::to_text) for an
    /// `n`-vertex host. The result still needs [`validate`](Self::validate).
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let perr = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
        let (ln, head) = lines.next().ok_or_else(|| perr(1, "empty certificate"))?;
        let kind = head
            .strip_prefix("basic ")
            .and_then(|k| BasicKind::from_name(k.trim()))
            .ok_or_else(|| perr(ln, "expected `basic <kind>`"))?;
        let pair = |ln: usize, rest: &str, m: usize| -> Result<(VertexSet, VertexSet)> {
            let (a, b) = rest.split_once('|').ok_or_else(|| perr(ln, "missing `|`"))?;
            Ok((
                parse_set(a, m).map_err(|e| perr(ln, &e))?,
                parse_set(b, m).map_err(|e| perr(ln, &e))?,
            ))
        };
        let mut payload = BasicPayload::None;
        let mut root: Option<LineRoot> = None;
        for (ln, l) in lines {
            if l == "end" {
                break;
            }
            let (tag, rest) = l.split_once(' ').unwrap_or((l, ""));
            match tag {
                "parts" => {
                    let (a, b) = pair(ln, rest, n)?;
                    payload = BasicPayload::Bipartition(a, b);
                }
                "good" => {
                    let (a, b) = pair(ln, rest, n)?;
                    payload = BasicPayload::Good(a, b);
                }
                "root" => {
                    let m: usize = rest.trim().parse().map_err(|_| perr(ln, "bad root size"))?;
                    root = Some(LineRoot { root_vertices: m, edges: vec![(0, 0); n], side: vec![false; m] });
                }
                "rootedge" | "side" => {
                    let r = root.as_mut().ok_or_else(|| perr(ln, "`root` line must come first"))?;
                    if tag == "side" {
                        for tok in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                            let i: usize = tok.parse().map_err(|_| perr(ln, "bad root vertex"))?;
                            *r.side.get_mut(i).ok_or_else(|| perr(ln, "root vertex out of range"))? = true;
                        }
                    } else {
                        let nums: Vec<usize> = rest
                            .split_whitespace()
                            .map(|x| x.parse().map_err(|_| perr(ln, "bad number")))
                            .collect::<Result<_>>()?;
                        if nums.len() != 3 || nums[0] >= n {
                            return Err(perr(ln, "expected `rootedge <v> <a> <b>`"));
                        }
                        r.edges[nums[0]] = (nums[1], nums[2]);
                    }
                }
                _ => return Err(perr(ln, "unknown certificate line")),
            }
        }
        if let Some(r) = root {
            payload = BasicPayload::Root(r);
        }
        Ok(BasicCertificate { kind, payload })
    }
}

/// Two strong stable sets covering `t`, by 2-coloring the pairs with `theta >= 0`.
pub fn is_bipartite_trigraph(t: &Trigraph) -> Option<(VertexSet, VertexSet)> {
    let mut color: Vec<Option<bool>> = vec![None; t.n()];
    for s in 0..t.n() {
        if color[s].is_some() {
            continue;
        }
        color[s] = Some(false);
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            let cu = color[u].unwrap();
            for v in t.nbrs(u).iter() {
                match color[v] {
                    None => {
                        color[v] = Some(!cu);
                        stack.push(v);
                    }
                    Some(cv) if cv == cu => return None,
                    _ => {}
                }
            }
        }
    }
    let a: VertexSet = (0..t.n()).filter(|&v| color[v] == Some(false)).collect();
    Some((a, t.vertices() - a))
}

/// Root of `t` if its full realization is the line graph of a bipartite
/// graph and every clique of size at least 3 is strong.
///
/// In the line graph of a bipartite graph every neighborhood is the disjoint
/// union of at most two cliques with nothing between them; the maximal
/// cliques are then read off directly and become the root's vertices.
pub fn is_line_trigraph(t: &Trigraph, limits: &Limits) -> Result<Option<LineRoot>> {
    cap_check("vertices for line recognition", t.n(), limits.line)?;
    let n = t.n();
    let mut cliques: Vec<VertexSet> = Vec::new();
    let mut member: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        let nb = t.nbrs(v);
        let comps = t.components(nb);
        if comps.len() > 2 || comps.iter().any(|&c| !t.is_clique(c)) {
            return Ok(None);
        }
        let mut local: Vec<VertexSet> = comps.into_iter().map(|c| c.with(v)).collect();
        if local.is_empty() {
            local.push(VertexSet::singleton(v));
        }
        for k in local {
            let idx = match cliques.iter().position(|&c| c == k) {
                Some(i) => i,
                None => {
                    cliques.push(k);
                    cliques.len() - 1
                }
            };
            if !member[v].contains(&idx) {
                member[v].push(idx);
            }
        }
    }
    for k in &cliques {
        if k.len() >= 3 && !t.is_strong_clique(*k) {
            return Ok(None);
        }
    }
    let mut root_vertices = cliques.len();
    let mut edges = Vec::with_capacity(n);
    for v in 0..n {
        match member[v][..] {
            [a] => {
                edges.push((a, root_vertices));
                root_vertices += 1;
            }
            [a, b] => edges.push((a.min(b), a.max(b))),
            _ => return Ok(None),
        }
    }
    let Some(side) = two_color(root_vertices, &edges) else {
        return Ok(None);
    };
    let r = LineRoot { root_vertices, edges, side };
    Ok(validate_root(t, &r).ok().map(|_| r))
}

fn two_color(m: usize, edges: &[(usize, usize)]) -> Option<Vec<bool>> {
    let mut adj = vec![Vec::new(); m];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut color: Vec<Option<bool>> = vec![None; m];
    for s in 0..m {
        if color[s].is_some() {
            continue;
        }
        color[s] = Some(false);
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                match color[v] {
                    None => {
                        color[v] = Some(!color[u].unwrap());
                        stack.push(v);
                    }
                    Some(c) if Some(c) == color[u] => return None,
                    _ => {}
                }
            }
        }
    }
    Some(color.into_iter().map(|c| c.unwrap()).collect())
}

fn validate_root(t: &Trigraph, r: &LineRoot) -> std::result::Result<(), String> {
    let n = t.n();
    if r.edges.len() != n || r.side.len() != r.root_vertices {
        return Err("root sizes do not match".into());
    }
    for (v, &(a, b)) in r.edges.iter().enumerate() {
        if a >= r.root_vertices || b >= r.root_vertices || a == b {
            return Err(format!("root edge of vertex {v} is malformed"));
        }
        if r.side[a] == r.side[b] {
            return Err(format!("root edge of vertex {v} is not bipartite"));
        }
    }
    for u in 0..n {
        for v in u + 1..n {
            let (a, b) = r.edges[u];
            let (c, d) = r.edges[v];
            if (a.min(b), a.max(b)) == (c.min(d), c.max(d)) {
                return Err(format!("vertices {u} and {v} are parallel root edges"));
            }
            let share = a == c || a == d || b == c || b == d;
            if share != t.adjacent(u, v) {
                return Err(format!("line graph disagrees with the full realization at {u},{v}"));
            }
        }
    }
    for s in r.stars() {
        if s.len() >= 3 && !t.is_strong_clique(s) {
            return Err(format!("clique {s:?} of size >= 3 is not strong"));
        }
    }
    Ok(())
}

/// Describes the first violated good-partition condition, if any.
pub fn good_partition_violation(t: &Trigraph, x: VertexSet, y: VertexSet) -> Option<String> {
    if !x.is_disjoint(y) || (x | y) != t.vertices() {
        return Some("(X, Y) is not a partition".into());
    }
    for v in x.iter() {
        if !(t.semi_nbrs(v) & y).is_empty() {
            return Some(format!("switchable pair at {v} meets both X and Y"));
        }
    }
    let cx = t.components(x);
    let cy = t.anticomponents(y);
    if let Some(c) = cx.iter().find(|c| c.len() > 2) {
        return Some(format!("component {c:?} of T[X] has more than two vertices"));
    }
    if let Some(c) = cy.iter().find(|c| c.len() > 2) {
        return Some(format!("anticomponent {c:?} of T[Y] has more than two vertices"));
    }
    incidence_violation(t, &cx, &cy)
}

fn incidence_violation(t: &Trigraph, cx: &[VertexSet], cy: &[VertexSet]) -> Option<String> {
    for &a in cx {
        for &b in cy {
            for v in (a | b).iter() {
                let other = if a.contains(v) { b } else { a };
                if (t.strong_nbrs(v) & other).len() > 1 || (t.strong_anti_nbrs(v) & other).len() > 1 {
                    return Some(format!(
                        "vertex {v} has two strong edges or two strong antiedges between {a:?} and {b:?}"
                    ));
                }
            }
        }
    }
    None
}

/// Good partition by search over unions of switchable components.
pub fn find_good_partition(t: &Trigraph, limits: &Limits) -> Result<Option<(VertexSet, VertexSet)>> {
    cap_check("vertices for good partition search", t.n(), limits.doubled)?;
    let comps: Vec<VertexSet> = t.switchable_components().into_iter().map(|(c, _)| c).collect();
    let m = comps.len();
    'outer: for mask in 0u64..(1u64 << m) {
        let x: VertexSet = (0..m).filter(|i| mask >> i & 1 == 1).fold(VertexSet::EMPTY, |a, i| a | comps[i]);
        let y = t.vertices() - x;
        let cx = t.components(x);
        let cy = t.anticomponents(y);
        if cx.iter().any(|c| c.len() > 2) || cy.iter().any(|c| c.len() > 2) {
            continue 'outer;
        }
        if incidence_violation(t, &cx, &cy).is_none() {
            return Ok(Some((x, y)));
        }
    }
    Ok(None)
}

/// First matching class in the order bipartite, co-bipartite, line,
/// co-line, doubled. The certificate is re-validated before return.
pub fn classify_basic(t: &Trigraph, limits: &Limits) -> Result<BasicCertificate> {
    let cert = classify_unchecked(t, limits)?;
    cert.validate(t).map_err(|e| Error::Verification(e.to_string()))?;
    Ok(cert)
}

fn classify_unchecked(t: &Trigraph, limits: &Limits) -> Result<BasicCertificate> {
    if let Some((a, b)) = is_bipartite_trigraph(t) {
        return Ok(BasicCertificate { kind: BasicKind::Bipartite, payload: BasicPayload::Bipartition(a, b) });
    }
    let co = t.complement();
    if let Some((a, b)) = is_bipartite_trigraph(&co) {
        return Ok(BasicCertificate { kind: BasicKind::CoBipartite, payload: BasicPayload::Bipartition(a, b) });
    }
    if let Some(r) = is_line_trigraph(t, limits)? {
        return Ok(BasicCertificate { kind: BasicKind::Line, payload: BasicPayload::Root(r) });
    }
    if let Some(r) = is_line_trigraph(&co, limits)? {
        return Ok(BasicCertificate { kind: BasicKind::CoLine, payload: BasicPayload::Root(r) });
    }
    if let Some((x, y)) = find_good_partition(t, limits)? {
        return Ok(BasicCertificate { kind: BasicKind::Doubled, payload: BasicPayload::Good(x, y) });
    }
    Ok(BasicCertificate::not_basic())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trigraph::Theta;

    fn classify(t: &Trigraph) -> BasicKind {
        classify_basic(t, &Limits::default()).unwrap().kind
    }

    #[test]
    fn bipartite_examples() {
        let (a, b) = is_bipartite_trigraph(&Trigraph::cycle(4)).unwrap();
        assert_eq!((a.to_vec(), b.to_vec()), (vec![0, 2], vec![1, 3]));
        assert!(is_bipartite_trigraph(&Trigraph::clique(3)).is_none());
        let mut t = Trigraph::new(2).unwrap();
        t.set(0, 1, Theta::Switchable);
        assert!(is_bipartite_trigraph(&t).is_some());
    }

    #[test]
    fn line_examples() {
        let l = Limits::default();
        let r = is_line_trigraph(&Trigraph::cycle(6), &l).unwrap().unwrap();
        assert_eq!(r.root_vertices, 6);
        let mut k3 = Trigraph::clique(3);
        assert!(is_line_trigraph(&k3, &l).unwrap().is_some());
        k3.set(0, 1, Theta::Switchable);
        assert!(is_line_trigraph(&k3, &l).unwrap().is_none());
        // The claw is not a line graph.
        let claw = Trigraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(is_line_trigraph(&claw, &l).unwrap().is_none());
        // C5 = L(C5), but C5 is not bipartite.
        assert!(is_line_trigraph(&Trigraph::cycle(5), &l).unwrap().is_none());
    }

    #[test]
    fn good_partition_examples() {
        let l = Limits::default();
        let (x, y) = find_good_partition(&Trigraph::cycle(4), &l).unwrap().unwrap();
        assert!(good_partition_violation(&Trigraph::cycle(4), x, y).is_none());
        assert_eq!(find_good_partition(&Trigraph::new(0).unwrap(), &l).unwrap(), Some((VertexSet::EMPTY, VertexSet::EMPTY)));
    }

    #[test]
    fn classification_order() {
        assert_eq!(classify(&Trigraph::cycle(4)), BasicKind::Bipartite);
        // The complement of C6 is two disjoint triangles plus a matching, so
        // co-bipartite wins over co-line.
        assert_eq!(classify(&Trigraph::cycle(6).complement()), BasicKind::CoBipartite);
        // The net: a triangle with one pendant vertex at each corner.
        let net = Trigraph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (0, 3), (1, 4), (2, 5)]).unwrap();
        assert_eq!(classify(&net), BasicKind::Line);
        assert_eq!(classify(&net.complement()), BasicKind::CoLine);
        assert_eq!(classify(&Trigraph::cycle(5)), BasicKind::NotBasic);
        assert_eq!(classify(&Trigraph::clique(4)), BasicKind::CoBipartite);
    }

    #[test]
    fn certificate_text_round_trip() {
        let l = Limits::default();
        for t in [Trigraph::cycle(4), Trigraph::cycle(6).complement(), Trigraph::cycle(6)] {
            let c = classify_basic(&t, &l).unwrap();
            let back = BasicCertificate::parse(&c.to_text(), t.n()).unwrap();
            assert_eq!(back, c);
            back.validate(&t).unwrap();
        }
        let c = BasicCertificate {
            kind: BasicKind::Doubled,
            payload: BasicPayload::Good(VertexSet::EMPTY, Trigraph::cycle(4).vertices()),
        };
        assert_eq!(BasicCertificate::parse(&c.to_text(), 4).unwrap(), c);
    }

    #[test]
    fn corrupted_certificates_fail() {
        let t = Trigraph::cycle(6);
        let c = BasicCertificate {
            kind: BasicKind::Bipartite,
            payload: BasicPayload::Bipartition([0, 1, 2].into_iter().collect(), [3, 4, 5].into_iter().collect()),
        };
        assert!(c.validate(&t).is_err());
        let mut r = is_line_trigraph(&t, &Limits::default()).unwrap().unwrap();
        r.edges.swap(0, 2);
        let c = BasicCertificate { kind: BasicKind::Line, payload: BasicPayload::Root(r) };
        assert!(c.validate(&t).is_err());
    }
}
