//! Graphs with small switchable parts, the generalized k-join, and
//! separators for trigraphs built from them.

use std::fmt;

use crate::error::{cap_check, Error, Result};
use crate::limits::Limits;
use crate::separation::{verify_cs_separator, CsSeparator, Cut};
use crate::trigraph::{Theta, Trigraph};
use crate::vset::VertexSet;

/// Largest intermediate family `product_separator` will build.
pub const PRODUCT_CAP: usize = 1 << 22;

/// Makes every pair inside a part switchable. `g` must be a graph and the
/// parts a partition of its vertices into sets of size at most `k`.
pub fn lift_to_ck(g: &Trigraph, parts: &[VertexSet], k: usize) -> Result<Trigraph> {
    if !g.is_graph() {
        return Err(Error::InvalidInput("the realization must be a graph (no switchable pairs)".into()));
    }
    check_partition(parts, g.vertices(), "parts")?;
    let mut t = g.clone();
    for p in parts {
        if p.len() > k {
            return Err(Error::InvalidInput(format!("part {p:?} has {} vertices, more than k = {k}", p.len())));
        }
        let v = p.to_vec();
        for (i, &a) in v.iter().enumerate() {
            for &b in &v[i + 1..] {
                t.set(a, b, Theta::Switchable);
            }
        }
    }
    Ok(t)
}

fn check_partition(parts: &[VertexSet], all: VertexSet, what: &str) -> Result<()> {
    let mut seen = VertexSet::EMPTY;
    for p in parts {
        if p.is_empty() || !p.is_disjoint(seen) {
            return Err(Error::InvalidInput(format!("{what} must be nonempty and disjoint")));
        }
        seen |= *p;
    }
    if seen != all {
        return Err(Error::InvalidInput(format!("{what} do not cover the vertices")));
    }
    Ok(())
}

/// A leaf of a composition: a graph, its parts, and the lifted trigraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CkLeaf {
    pub graph: Trigraph,
    pub parts: Vec<VertexSet>,
    pub trigraph: Trigraph,
}

impl CkLeaf {
    pub fn new(graph: Trigraph, parts: Vec<VertexSet>, k: usize) -> Result<Self> {
        let trigraph = lift_to_ck(&graph, &parts, k)?;
        Ok(CkLeaf { graph, parts, trigraph })
    }

    pub fn max_part(&self) -> usize {
        self.parts.iter().map(|p| p.len()).max().unwrap_or(1).max(1)
    }
}

/// `pattern[j][i]`: `A_j` strongly complete to `B_i` (else anticomplete).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KJoinInterface {
    pub pattern: Vec<Vec<bool>>,
}

impl KJoinInterface {
    pub fn new(pattern: Vec<Vec<bool>>) -> Result<Self> {
        let r = pattern.len();
        let s = pattern.first().map_or(0, |row| row.len());
        if r == 0 || s == 0 || pattern.iter().any(|row| row.len() != s) {
            return Err(Error::InvalidInput("interface must be a nonempty rectangular matrix".into()));
        }
        for j in 0..r {
            for j2 in j + 1..r {
                if pattern[j] == pattern[j2] {
                    return Err(Error::InvalidInput(format!("interface rows {j} and {j2} coincide")));
                }
            }
        }
        for i in 0..s {
            for i2 in i + 1..s {
                if (0..r).all(|j| pattern[j][i] == pattern[j][i2]) {
                    return Err(Error::InvalidInput(format!("interface columns {i} and {i2} coincide")));
                }
            }
        }
        Ok(KJoinInterface { pattern })
    }

    pub fn r(&self) -> usize {
        self.pattern.len()
    }

    pub fn s(&self) -> usize {
        self.pattern[0].len()
    }

    /// Rows separated by `/`, e.g. `110/011`.
    pub fn parse(text: &str) -> Result<Self> {
        let rows = text
            .split('/')
            .map(|row| {
                row.trim()
                    .chars()
                    .map(|c| match c {
                        '1' => Ok(true),
                        '0' => Ok(false),
                        _ => Err(Error::InvalidInput(format!("bad interface digit `{c}`"))),
                    })
                    .collect::<Result<Vec<bool>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        KJoinInterface::new(rows)
    }
}

impl fmt::Display for KJoinInterface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> =
            self.pattern.iter().map(|r| r.iter().map(|&b| if b { '1' } else { '0' }).collect()).collect();
        f.write_str(&rows.join("/"))
    }
}

/// Where everything went in a generalized k-join.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinLayout {
    /// `A_1..A_r` in the left trigraph.
    pub left_a_parts: Vec<VertexSet>,
    /// `B_1..B_s` in the right trigraph.
    pub right_b_parts: Vec<VertexSet>,
    /// Ports `b_1..b_s` of the left trigraph and `a_1..a_r` of the right.
    pub left_ports: Vec<usize>,
    pub right_ports: Vec<usize>,
    /// New index of each left (right) vertex; ports map to `None`.
    pub left_map: Vec<Option<usize>>,
    pub right_map: Vec<Option<usize>>,
    /// `A_j` and `B_i` in the joined labeling.
    pub a_parts: Vec<VertexSet>,
    pub b_parts: Vec<VertexSet>,
}

fn map_set(s: VertexSet, map: &[Option<usize>]) -> VertexSet {
    s.iter().filter_map(|v| map[v]).collect()
}

/// Joins `t1` (ports `b_1..b_s`) and `t2` (ports `a_1..a_r`). The parts
/// `A_j` of `t1` are read off the ports' adjacency, which must match row
/// `j` of the interface; dually for the `B_i` of `t2`. The joined labeling
/// lists the non-port vertices of `t1`, then those of `t2`.
pub fn generalized_k_join(
    t1: &Trigraph,
    b_ports: &[usize],
    t2: &Trigraph,
    a_ports: &[usize],
    iface: &KJoinInterface,
    k: usize,
) -> Result<(Trigraph, JoinLayout)> {
    let (r, s) = (iface.r(), iface.s());
    let fail = |m: String| Err(Error::Precondition(format!("generalized k-join: {m}")));
    if r > k || s > k {
        return fail(format!("interface is {r}x{s}, larger than k = {k}"));
    }
    if b_ports.len() != s || a_ports.len() != r {
        return fail(format!("expected {s} ports on the left and {r} on the right"));
    }
    let bset = ports_set(b_ports, t1.n())?;
    let aset = ports_set(a_ports, t2.n())?;
    if !ports_switchable(t1, b_ports) {
        return fail("left ports are not pairwise switchable".into());
    }
    if !ports_switchable(t2, a_ports) {
        return fail("right ports are not pairwise switchable".into());
    }
    let left_a_parts = read_parts(t1, bset, b_ports, |j, i| iface.pattern[j][i], r)
        .map_err(|m| Error::Precondition(format!("generalized k-join: left side: {m}")))?;
    let right_b_parts = read_parts(t2, aset, a_ports, |i, j| iface.pattern[j][i], s)
        .map_err(|m| Error::Precondition(format!("generalized k-join: right side: {m}")))?;
    let mut left_map = vec![None; t1.n()];
    let mut right_map = vec![None; t2.n()];
    let mut next = 0;
    for v in 0..t1.n() {
        if !bset.contains(v) {
            left_map[v] = Some(next);
            next += 1;
        }
    }
    for v in 0..t2.n() {
        if !aset.contains(v) {
            right_map[v] = Some(next);
            next += 1;
        }
    }
    let mut t = Trigraph::new(next)?;
    for u in 0..t1.n() {
        for v in u + 1..t1.n() {
            if let (Some(a), Some(b)) = (left_map[u], left_map[v]) {
                t.set(a, b, t1.theta(u, v));
            }
        }
    }
    for u in 0..t2.n() {
        for v in u + 1..t2.n() {
            if let (Some(a), Some(b)) = (right_map[u], right_map[v]) {
                t.set(a, b, t2.theta(u, v));
            }
        }
    }
    let a_parts: Vec<VertexSet> = left_a_parts.iter().map(|&p| map_set(p, &left_map)).collect();
    let b_parts: Vec<VertexSet> = right_b_parts.iter().map(|&p| map_set(p, &right_map)).collect();
    for (j, &aj) in a_parts.iter().enumerate() {
        for (i, &bi) in b_parts.iter().enumerate() {
            let th = if iface.pattern[j][i] { Theta::Strong } else { Theta::StrongAnti };
            for a in aj.iter() {
                for b in bi.iter() {
                    t.set(a, b, th);
                }
            }
        }
    }
    let layout = JoinLayout {
        left_a_parts,
        right_b_parts,
        left_ports: b_ports.to_vec(),
        right_ports: a_ports.to_vec(),
        left_map,
        right_map,
        a_parts,
        b_parts,
    };
    Ok((t, layout))
}

fn ports_set(ports: &[usize], n: usize) -> Result<VertexSet> {
    let s: VertexSet = ports.iter().copied().filter(|&p| p < n).collect();
    if s.len() != ports.len() {
        return Err(Error::InvalidInput(format!("ports {ports:?} are repeated or out of range")));
    }
    if s.len() == n {
        return Err(Error::Precondition("generalized k-join: a side consists of ports only".into()));
    }
    Ok(s)
}

fn ports_switchable(t: &Trigraph, ports: &[usize]) -> bool {
    ports.iter().enumerate().all(|(i, &a)| ports[i + 1..].iter().all(|&b| t.theta(a, b) == Theta::Switchable))
}

/// Groups the non-port vertices by their strong adjacency to the ports;
/// group `j` must see port `i` exactly when `want(j, i)`.
fn read_parts(
    t: &Trigraph,
    ports_set: VertexSet,
    ports: &[usize],
    want: impl Fn(usize, usize) -> bool,
    groups: usize,
) -> std::result::Result<Vec<VertexSet>, String> {
    let mut parts = vec![VertexSet::EMPTY; groups];
    for v in (t.vertices() - ports_set).iter() {
        let mut row = Vec::with_capacity(ports.len());
        for &p in ports {
            match t.theta(v, p) {
                Theta::Strong => row.push(true),
                Theta::StrongAnti => row.push(false),
                Theta::Switchable => return Err(format!("vertex {v} is switchable with port {p}")),
            }
        }
        match (0..groups).find(|&j| (0..ports.len()).all(|i| want(j, i) == row[i])) {
            Some(j) => parts[j].insert(v),
            None => return Err(format!("vertex {v} sees the ports in a pattern absent from the interface")),
        }
    }
    if let Some(j) = parts.iter().position(|p| p.is_empty()) {
        return Err(format!("part {j} is empty"));
    }
    Ok(parts)
}

/// All `(cap U_i, cup W_i)` over `k`-tuples of `cuts`, then all
/// `(cup U_i, cap W_i)` over `k`-tuples of those, duplicates removed.
/// Tuples are taken with repetition; since both operations are idempotent
/// and commutative, multisets of size `k` suffice.
pub fn product_separator(cuts: &[Cut], k: usize) -> Result<Vec<Cut>> {
    let first = combine(cuts, k, |a, b| Cut {
        clique_side: a.clique_side & b.clique_side,
        stable_side: a.stable_side | b.stable_side,
    })?;
    combine(&first, k, |a, b| Cut {
        clique_side: a.clique_side | b.clique_side,
        stable_side: a.stable_side & b.stable_side,
    })
}

fn combine(cuts: &[Cut], k: usize, op: impl Fn(&Cut, &Cut) -> Cut) -> Result<Vec<Cut>> {
    let m = cuts.len();
    let count = multisets(m, k);
    cap_check("cuts in the product family", count.min(usize::MAX as u128) as usize, PRODUCT_CAP)?;
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    fn rec(
        cuts: &[Cut],
        start: usize,
        left: usize,
        acc: Option<Cut>,
        op: &impl Fn(&Cut, &Cut) -> Cut,
        seen: &mut std::collections::HashSet<Cut>,
        out: &mut Vec<Cut>,
    ) {
        if left == 0 {
            if let Some(c) = acc {
                if seen.insert(c) {
                    out.push(c);
                }
            }
            return;
        }
        for i in start..cuts.len() {
            let next = match &acc {
                None => cuts[i],
                Some(a) => op(a, &cuts[i]),
            };
            rec(cuts, i, left - 1, Some(next), op, seen, out);
        }
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    rec(cuts, 0, k, None, &op, &mut seen, &mut out);
    Ok(out)
}

fn multisets(m: usize, k: usize) -> u128 {
    // C(m + k - 1, k)
    let mut c: u128 = 1;
    for i in 0..k as u128 {
        c = c.saturating_mul(m as u128 + i) / (i + 1);
    }
    c
}

/// Separator of a lifted leaf from a separator `f` of its graph.
pub fn ck_separator(leaf: &CkLeaf, f: &CsSeparator) -> Result<CsSeparator> {
    if !f.is_for(&leaf.graph) {
        return Err(Error::InvalidInput("separator does not belong to the leaf's graph".into()));
    }
    let k = leaf.max_part();
    let cuts = if k == 1 { f.cuts.clone() } else { product_separator(&f.cuts, k)? };
    CsSeparator::new(&leaf.trigraph, cuts)
}

/// Lifts the block separators to the join: `b_i` stands for `B_i` and
/// `a_j` for `A_j`. Size is `|F1| + |F2|`.
pub fn recombine_k_join(
    t: &Trigraph,
    layout: &JoinLayout,
    f1: &CsSeparator,
    f2: &CsSeparator,
) -> Result<CsSeparator> {
    if f1.n != layout.left_map.len() || f2.n != layout.right_map.len() {
        return Err(Error::InvalidStructure("separators do not match the join's sides".into()));
    }
    let mut cuts = Vec::with_capacity(f1.len() + f2.len());
    for (f, map, ports, parts) in [
        (f1, &layout.left_map, &layout.left_ports, &layout.b_parts),
        (f2, &layout.right_map, &layout.right_ports, &layout.a_parts),
    ] {
        for c in &f.cuts {
            let mut u = map_set(c.clique_side, map);
            for (i, &p) in ports.iter().enumerate() {
                if c.clique_side.contains(p) {
                    u |= parts[i];
                }
            }
            cuts.push(Cut::from_clique_side(u, t.n()));
        }
    }
    CsSeparator::new(t, cuts)
}

/// A trigraph built from lifted graphs by generalized k-joins. Nodes cache
/// the joined trigraph and layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompositionTree {
    Leaf(CkLeaf),
    Node {
        iface: KJoinInterface,
        left: Box<CompositionTree>,
        right: Box<CompositionTree>,
        trigraph: Trigraph,
        layout: JoinLayout,
    },
}

impl CompositionTree {
    pub fn leaf(leaf: CkLeaf) -> Self {
        CompositionTree::Leaf(leaf)
    }

    pub fn join(
        iface: KJoinInterface,
        left: CompositionTree,
        b_ports: &[usize],
        right: CompositionTree,
        a_ports: &[usize],
        k: usize,
    ) -> Result<Self> {
        let (trigraph, layout) = generalized_k_join(left.trigraph(), b_ports, right.trigraph(), a_ports, &iface, k)?;
        Ok(CompositionTree::Node { iface, left: Box::new(left), right: Box::new(right), trigraph, layout })
    }

    pub fn trigraph(&self) -> &Trigraph {
        match self {
            CompositionTree::Leaf(l) => &l.trigraph,
            CompositionTree::Node { trigraph, .. } => trigraph,
        }
    }

    pub fn leaves(&self) -> Vec<&CkLeaf> {
        match self {
            CompositionTree::Leaf(l) => vec![l],
            CompositionTree::Node { left, right, .. } => {
                let mut v = left.leaves();
                v.extend(right.leaves());
                v
            }
        }
    }

    /// Indented text, one line per node, interface matrices inline.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        self.write_text(0, &mut s);
        s
    }

    fn write_text(&self, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        match self {
            CompositionTree::Leaf(l) => {
                let parts: Vec<String> = l.parts.iter().map(|p| p.to_string()).collect();
                out.push_str(&format!("{pad}leaf n={} parts={}\n", l.trigraph.n(), parts.join("/")));
            }
            CompositionTree::Node { iface, left, right, trigraph, layout } => {
                let ports = |p: &[usize]| p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
                out.push_str(&format!(
                    "{pad}kjoin n={} iface={iface} left_ports={} right_ports={}\n",
                    trigraph.n(),
                    ports(&layout.left_ports),
                    ports(&layout.right_ports)
                ));
                left.write_text(depth + 1, out);
                right.write_text(depth + 1, out);
            }
        }
    }
}

/// Source of separators for the graphs at the leaves.
pub trait CsOracle {
    fn separator(&self, g: &Trigraph) -> Result<CsSeparator>;
}

/// Every cut of the graph.
#[derive(Clone, Copy, Debug, Default)]
pub struct AllCutsOracle;

impl CsOracle for AllCutsOracle {
    fn separator(&self, g: &Trigraph) -> Result<CsSeparator> {
        CsSeparator::all_cuts(g, Limits::default().cliques)
    }
}

#[derive(Clone, Debug)]
pub struct ClosureBuild {
    pub separator: CsSeparator,
    /// Leaf family sizes in left-to-right order.
    pub leaf_sizes: Vec<usize>,
}

/// Separator of a composition: leaves with at most `p0` vertices take all
/// cuts, larger ones the product of the oracle's separator; nodes
/// recombine. Oracle outputs are verified when small enough to check.
pub fn build_closure_separator(tree: &CompositionTree, oracle: &dyn CsOracle, p0: usize, limits: &Limits) -> Result<ClosureBuild> {
    let mut sizes = Vec::new();
    let separator = closure_rec(tree, oracle, p0, limits, &mut sizes)?;
    Ok(ClosureBuild { separator, leaf_sizes: sizes })
}

fn closure_rec(
    tree: &CompositionTree,
    oracle: &dyn CsOracle,
    p0: usize,
    limits: &Limits,
    sizes: &mut Vec<usize>,
) -> Result<CsSeparator> {
    match tree {
        CompositionTree::Leaf(l) => {
            let f = if l.trigraph.n() <= p0 {
                CsSeparator::all_cuts(&l.trigraph, limits.cliques)?
            } else {
                let g = oracle.separator(&l.graph)?;
                if !g.is_for(&l.graph) {
                    return Err(Error::OracleContract("separator is for another graph".into()));
                }
                if l.graph.n() <= limits.cliques && !verify_cs_separator(&l.graph, &g, limits)?.ok {
                    return Err(Error::OracleContract("separator does not verify on the leaf graph".into()));
                }
                ck_separator(l, &g)?
            };
            sizes.push(f.len());
            Ok(f)
        }
        CompositionTree::Node { left, right, trigraph, layout, .. } => {
            let f1 = closure_rec(left, oracle, p0, limits, sizes)?;
            let f2 = closure_rec(right, oracle, p0, limits, sizes)?;
            recombine_k_join(trigraph, layout, &f1, &f2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    fn singletons(n: usize) -> Vec<VertexSet> {
        (0..n).map(VertexSet::singleton).collect()
    }

    #[test]
    fn lift_examples() {
        let c4 = Trigraph::cycle(4);
        assert_eq!(lift_to_ck(&c4, &singletons(4), 1).unwrap(), c4);
        let t = lift_to_ck(&c4, &[vs(&[0, 1]), vs(&[2, 3])], 2).unwrap();
        assert_eq!(t.switchable_pairs(), vec![(0, 1), (2, 3)]);
        assert!(lift_to_ck(&c4, &[vs(&[0, 1, 2]), vs(&[3])], 2).is_err());
    }

    /// Left: A1 = {0}, A2 = {1}, A3 = {2}, ports 3 (b1) and 4 (b2).
    /// Right: B1 = {0}, B2 = {1}, ports 2, 3, 4 (a1, a2, a3).
    fn figure_shaped() -> (Trigraph, Vec<usize>, Trigraph, Vec<usize>, KJoinInterface) {
        let iface = KJoinInterface::parse("10/11/01").unwrap();
        let mut t1 = Trigraph::new(5).unwrap();
        t1.set(3, 4, Theta::Switchable);
        for (a, b) in [(0, 3), (1, 3), (1, 4), (2, 4), (0, 1)] {
            t1.set(a, b, Theta::Strong);
        }
        let mut t2 = Trigraph::new(5).unwrap();
        for (a, b) in [(2, 3), (2, 4), (3, 4)] {
            t2.set(a, b, Theta::Switchable);
        }
        for (a, b) in [(0, 2), (0, 3), (1, 3), (1, 4)] {
            t2.set(a, b, Theta::Strong);
        }
        (t1, vec![3, 4], t2, vec![2, 3, 4], iface)
    }

    #[test]
    fn figure_shaped_join() {
        let (t1, bp, t2, ap, iface) = figure_shaped();
        let (t, lay) = generalized_k_join(&t1, &bp, &t2, &ap, &iface, 3).unwrap();
        assert_eq!(t.n(), 5);
        assert_eq!(lay.a_parts, vec![vs(&[0]), vs(&[1]), vs(&[2])]);
        assert_eq!(lay.b_parts, vec![vs(&[3]), vs(&[4])]);
        // B1 complete to A1, A2; anticomplete to A3. B2 complete to A2, A3.
        assert_eq!(t.theta(3, 0), Theta::Strong);
        assert_eq!(t.theta(3, 1), Theta::Strong);
        assert_eq!(t.theta(3, 2), Theta::StrongAnti);
        assert_eq!(t.theta(4, 0), Theta::StrongAnti);
        assert_eq!(t.theta(4, 2), Theta::Strong);
        assert_eq!(t.theta(0, 1), Theta::Strong);
        assert!(generalized_k_join(&t1, &bp, &t2, &ap, &iface, 2).is_err());
    }

    #[test]
    fn one_by_one_join_is_an_edge() {
        let iface = KJoinInterface::parse("1").unwrap();
        let t1 = Trigraph::clique(2);
        let t2 = Trigraph::clique(2);
        let (t, _) = generalized_k_join(&t1, &[1], &t2, &[0], &iface, 1).unwrap();
        assert_eq!(t, Trigraph::clique(2));
    }

    #[test]
    fn mismatched_pattern_is_rejected() {
        let (t1, bp, t2, ap, _) = figure_shaped();
        let wrong = KJoinInterface::parse("11/10/01").unwrap();
        assert!(matches!(generalized_k_join(&t1, &bp, &t2, &ap, &wrong, 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn product_with_k1_is_identity() {
        let t = Trigraph::cycle(4);
        let f = CsSeparator::all_cuts(&t, 20).unwrap();
        assert_eq!(product_separator(&f.cuts, 1).unwrap(), f.cuts);
    }

    #[test]
    fn recombination_verifies() {
        let (t1, bp, t2, ap, iface) = figure_shaped();
        let (t, lay) = generalized_k_join(&t1, &bp, &t2, &ap, &iface, 3).unwrap();
        let f1 = CsSeparator::all_cuts(&t1, 20).unwrap();
        let f2 = CsSeparator::all_cuts(&t2, 20).unwrap();
        let f = recombine_k_join(&t, &lay, &f1, &f2).unwrap();
        assert_eq!(f.len(), 64);
        assert!(verify_cs_separator(&t, &f, &Limits::default()).unwrap().ok);
    }

    #[test]
    fn ck_separator_of_lifted_c4() {
        let leaf = CkLeaf::new(Trigraph::cycle(4), vec![vs(&[0, 1]), vs(&[2, 3])], 2).unwrap();
        let f = CsSeparator::all_cuts(&leaf.graph, 20).unwrap();
        let g = ck_separator(&leaf, &f).unwrap();
        assert!(g.len() <= 16usize.pow(4));
        assert!(verify_cs_separator(&leaf.trigraph, &g, &Limits::default()).unwrap().ok);
    }
}
