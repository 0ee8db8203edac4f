//! 2-joins, complement 2-joins, balanced skew-partitions, blocks of
//! decomposition and the recursive decomposition tree.

use std::fmt;

use crate::basic::{classify_basic, BasicCertificate};
use crate::berge::is_in_class_f;
use crate::error::{cap_check, Error, Result};
use crate::limits::Limits;
use crate::trigraph::{Theta, Trigraph};
use crate::vset::VertexSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum JoinKind {
    Direct,
    /// A 2-join of the complement.
    Complement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Odd,
    Even,
}

impl fmt::Display for JoinKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JoinKind::Direct => "direct",
            JoinKind::Complement => "complement",
        })
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Odd => "odd",
            Parity::Even => "even",
        })
    }
}

/// Split `(A1, B1, C1, A2, B2, C2)` of a 2-join. For `Complement` the sets
/// describe a 2-join of the complement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwoJoinSplit {
    pub a1: VertexSet,
    pub b1: VertexSet,
    pub c1: VertexSet,
    pub a2: VertexSet,
    pub b2: VertexSet,
    pub c2: VertexSet,
    pub kind: JoinKind,
    pub parity: Parity,
}

impl TwoJoinSplit {
    pub fn x1(&self) -> VertexSet {
        self.a1 | self.b1 | self.c1
    }

    pub fn x2(&self) -> VertexSet {
        self.a2 | self.b2 | self.c2
    }

    /// `(A, B, C)` of side 1 or 2.
    pub fn side(&self, side: u8) -> (VertexSet, VertexSet, VertexSet) {
        match side {
            1 => (self.a1, self.b1, self.c1),
            _ => (self.a2, self.b2, self.c2),
        }
    }

    /// The same split with the roles of the two sides exchanged.
    pub fn swapped(&self) -> TwoJoinSplit {
        TwoJoinSplit {
            a1: self.a2,
            b1: self.b2,
            c1: self.c2,
            a2: self.a1,
            b2: self.b1,
            c2: self.c1,
            ..*self
        }
    }

    /// The trigraph in which this split is a (direct) 2-join.
    pub fn host(&self, t: &Trigraph) -> Trigraph {
        match self.kind {
            JoinKind::Direct => t.clone(),
            JoinKind::Complement => t.complement(),
        }
    }
}

impl fmt::Display for TwoJoinSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} A1={} B1={} C1={} A2={} B2={} C2={}",
            self.kind, self.parity, self.a1, self.b1, self.c1, self.a2, self.b2, self.c2
        )
    }
}

type Sextuple = [VertexSet; 6];

/// Derives the split of a direct 2-join with first side `x1` in `host`, if
/// `(x1, V \ x1)` is one. The split is unique up to exchanging A and B; the
/// A-sides are the ones containing the smallest vertex of `A1 u B1`.
pub fn split_from_partition(host: &Trigraph, x1: VertexSet) -> Option<Sextuple> {
    let x2 = host.vertices() - x1;
    if x1.len() < 3 || x2.len() < 3 {
        return None;
    }
    if x1.iter().any(|v| !(host.semi_nbrs(v) & x2).is_empty()) {
        return None;
    }
    let cross = |v: usize| host.strong_nbrs(v) & if x1.contains(v) { x2 } else { x1 };
    let touched1: VertexSet = x1.iter().filter(|&v| !cross(v).is_empty()).collect();
    let first = touched1.first()?;
    let a2 = cross(first);
    let a1: VertexSet = touched1.iter().filter(|&v| cross(v) == a2).collect();
    let b1 = touched1 - a1;
    let b2 = b1.first().map(cross)?;
    if b1.iter().any(|v| cross(v) != b2) || !a2.is_disjoint(b2) {
        return None;
    }
    let touched2: VertexSet = x2.iter().filter(|&v| !cross(v).is_empty()).collect();
    if touched2 != (a2 | b2) || a2.iter().any(|v| cross(v) != a1) || b2.iter().any(|v| cross(v) != b1) {
        return None;
    }
    let s = [a1, b1, x1 - touched1, a2, b2, x2 - touched2];
    for (a, b, c) in [(s[0], s[1], s[2]), (s[3], s[4], s[5])] {
        if a.len() == 1 && b.len() == 1 && c.len() == 1 {
            let (u, w, m) = (a.first()?, b.first()?, c.first()?);
            if host.adjacent(u, m) && host.adjacent(m, w) && host.theta(u, w) == Theta::StrongAnti {
                return None;
            }
        }
        let x = a | b | c;
        if host.components(x).iter().any(|comp| comp.is_disjoint(a) || comp.is_disjoint(b)) {
            return None;
        }
    }
    Some(s)
}

/// Re-checks every condition of the split's kind independently of the
/// search. Returns the first violation.
pub fn split_violation(t: &Trigraph, s: &TwoJoinSplit) -> Option<String> {
    let h = s.host(t);
    let sets = [s.a1, s.b1, s.c1, s.a2, s.b2, s.c2];
    let mut union = VertexSet::EMPTY;
    for x in sets {
        if !x.is_disjoint(union) {
            return Some("split sets are not disjoint".into());
        }
        union |= x;
    }
    if union != h.vertices() {
        return Some("split sets do not cover the vertices".into());
    }
    if [s.a1, s.b1, s.a2, s.b2].iter().any(|x| x.is_empty()) {
        return Some("an A or B set is empty".into());
    }
    let (x1, x2) = (s.x1(), s.x2());
    if x1.len() < 3 || x2.len() < 3 {
        return Some("a side has fewer than 3 vertices".into());
    }
    for u in x1.iter() {
        for v in x2.iter() {
            let want = if (s.a1.contains(u) && s.a2.contains(v)) || (s.b1.contains(u) && s.b2.contains(v)) {
                Theta::Strong
            } else {
                Theta::StrongAnti
            };
            if h.theta(u, v) != want {
                return Some(format!("pair {u},{v} across the sides is {:?}, expected {want:?}", h.theta(u, v)));
            }
        }
    }
    for (i, (a, b, c)) in [(s.a1, s.b1, s.c1), (s.a2, s.b2, s.c2)].into_iter().enumerate() {
        let x = a | b | c;
        if a.len() == 1 && b.len() == 1 && c.len() == 1 {
            let (u, w, m) = (a.first().unwrap(), b.first().unwrap(), c.first().unwrap());
            if h.adjacent(u, m) && h.adjacent(m, w) && h.theta(u, w) == Theta::StrongAnti {
                return Some(format!("side {} is a path of length two between A and B", i + 1));
            }
        }
        if h.components(x).iter().any(|comp| comp.is_disjoint(a) || comp.is_disjoint(b)) {
            return Some(format!("a component of side {} misses A or B", i + 1));
        }
    }
    None
}

/// Length parity of one induced path from `a` to `b` with interior in `c`
/// (a shortest one, which is induced).
fn side_path_parity(h: &Trigraph, a: VertexSet, b: VertexSet, c: VertexSet) -> Option<Parity> {
    let mut dist = 0usize;
    let mut reached = a;
    let mut frontier = a;
    loop {
        let mut next = VertexSet::EMPTY;
        for v in frontier.iter() {
            next |= h.nbrs(v);
        }
        dist += 1;
        if !(next & b).is_empty() {
            return Some(if dist % 2 == 1 { Parity::Odd } else { Parity::Even });
        }
        frontier = next & c & !reached;
        if frontier.is_empty() {
            return None;
        }
        reached |= frontier;
    }
}

/// Parity of the split's 2-join: one witness path per side, and the two
/// sides must agree (otherwise the two paths form an odd hole).
pub fn two_join_parity(t: &Trigraph, s: &TwoJoinSplit) -> Result<Parity> {
    let h = s.host(t);
    let p1 = side_path_parity(&h, s.a1, s.b1, s.c1)
        .ok_or_else(|| Error::InvalidStructure("no path from A1 to B1 through C1".into()))?;
    let p2 = side_path_parity(&h, s.a2, s.b2, s.c2)
        .ok_or_else(|| Error::InvalidStructure("no path from A2 to B2 through C2".into()))?;
    if p1 != p2 {
        return Err(Error::Precondition(format!(
            "paths across the two sides have different parities ({p1} vs {p2}): they form an odd hole"
        )));
    }
    Ok(p1)
}

/// Checks that every induced A-B path with interior in C, on both sides,
/// has the given parity. Exponential; for tests and the optional check.
pub fn all_side_paths_have_parity(t: &Trigraph, s: &TwoJoinSplit, parity: Parity) -> bool {
    let h = s.host(t);
    [(s.a1, s.b1, s.c1), (s.a2, s.b2, s.c2)].iter().all(|&(a, b, c)| {
        let mut ok = true;
        for start in a.iter() {
            induced_paths(&h, &mut vec![start], VertexSet::singleton(start), c, b, &mut |p| {
                let odd = (p.len() - 1) % 2 == 1;
                if odd != (parity == Parity::Odd) {
                    ok = false;
                }
            });
        }
        ok
    })
}

/// Calls `visit` on every induced path that starts with `path`, continues
/// through `interior` and ends in `ends`.
fn induced_paths(
    h: &Trigraph,
    path: &mut Vec<usize>,
    forbid: VertexSet,
    interior: VertexSet,
    ends: VertexSet,
    visit: &mut impl FnMut(&[usize]),
) {
    let last = *path.last().unwrap();
    let earlier: VertexSet = path[..path.len() - 1].iter().fold(VertexSet::EMPTY, |acc, &u| acc | h.strong_nbrs(u));
    let cands = h.nbrs(last) - forbid - earlier;
    for v in (cands & ends).iter() {
        path.push(v);
        visit(path);
        path.pop();
    }
    for v in (cands & interior).iter() {
        path.push(v);
        induced_paths(h, path, forbid.with(v), interior, ends, visit);
        path.pop();
    }
}

/// Direct 2-join by exhaustive search over bipartitions `(X1, X2)` with
/// vertex 0 in `X1`, in increasing mask order.
pub fn find_two_join(t: &Trigraph, limits: &Limits) -> Result<Option<TwoJoinSplit>> {
    find_split_of_kind(t, JoinKind::Direct, limits)
}

/// A complement 2-join: a 2-join of the complement.
pub fn find_complement_two_join(t: &Trigraph, limits: &Limits) -> Result<Option<TwoJoinSplit>> {
    find_split_of_kind(t, JoinKind::Complement, limits)
}

fn find_split_of_kind(t: &Trigraph, kind: JoinKind, limits: &Limits) -> Result<Option<TwoJoinSplit>> {
    cap_check("vertices for 2-join search", t.n(), limits.two_join)?;
    let n = t.n();
    if n < 6 {
        return Ok(None);
    }
    let h = match kind {
        JoinKind::Direct => t.clone(),
        JoinKind::Complement => t.complement(),
    };
    for rest in 0u128..(1u128 << (n - 1)) {
        let x1 = VertexSet(rest << 1 | 1);
        if let Some(s) = split_from_partition(&h, x1) {
            return split_with_parity(t, s, kind).map(Some);
        }
    }
    Ok(None)
}

/// Builds the split for `x1` in `t` of the given kind, if `(x1, V \ x1)` is one.
pub fn split_for_side(t: &Trigraph, x1: VertexSet, kind: JoinKind) -> Result<Option<TwoJoinSplit>> {
    let h = match kind {
        JoinKind::Direct => t.clone(),
        JoinKind::Complement => t.complement(),
    };
    match split_from_partition(&h, x1) {
        Some(s) => split_with_parity(t, s, kind).map(Some),
        None => Ok(None),
    }
}

fn split_with_parity(t: &Trigraph, s: Sextuple, kind: JoinKind) -> Result<TwoJoinSplit> {
    let mut split = TwoJoinSplit {
        a1: s[0],
        b1: s[1],
        c1: s[2],
        a2: s[3],
        b2: s[4],
        c2: s[5],
        kind,
        parity: Parity::Odd,
    };
    split.parity = two_join_parity(t, &split)?;
    Ok(split)
}

/// `true` if some odd path of length at least 3 has both ends in `ends`
/// and its interior in `interior`.
fn has_long_odd_path(h: &Trigraph, ends: VertexSet, interior: VertexSet) -> bool {
    for s in ends.iter() {
        let mut found = false;
        let mut path = vec![s];
        odd_path_search(h, &mut path, VertexSet::singleton(s), interior, ends.above(s), &mut found);
        if found {
            return true;
        }
    }
    false
}

fn odd_path_search(
    h: &Trigraph,
    path: &mut Vec<usize>,
    forbid: VertexSet,
    interior: VertexSet,
    ends: VertexSet,
    found: &mut bool,
) {
    let last = *path.last().unwrap();
    let earlier: VertexSet = path[..path.len() - 1].iter().fold(VertexSet::EMPTY, |acc, &u| acc | h.strong_nbrs(u));
    let cands = h.nbrs(last) - forbid - earlier;
    // Closing now gives length path.len(); it is odd and > 1 when the
    // interior has an even, positive number of vertices.
    if path.len() >= 3 && path.len() % 2 == 1 && !(cands & ends).is_empty() {
        *found = true;
        return;
    }
    for v in (cands & interior).iter() {
        path.push(v);
        odd_path_search(h, path, forbid.with(v), interior, ends, found);
        path.pop();
        if *found {
            return;
        }
    }
}

/// `(A, B)` is a skew-partition and is balanced.
pub fn is_balanced_skew_partition(t: &Trigraph, a: VertexSet, b: VertexSet) -> bool {
    if !a.is_disjoint(b) || (a | b) != t.vertices() || a.is_empty() || b.is_empty() {
        return false;
    }
    if t.is_connected(a) || t.is_anticonnected(b) {
        return false;
    }
    !has_long_odd_path(t, b, a) && !has_long_odd_path(&t.complement(), a, b)
}

/// Exhaustive search for a balanced skew-partition.
pub fn find_balanced_skew_partition(t: &Trigraph, limits: &Limits) -> Result<Option<(VertexSet, VertexSet)>> {
    cap_check("vertices for skew-partition search", t.n(), limits.skew)?;
    let n = t.n();
    if n < 4 {
        return Ok(None);
    }
    let all = t.vertices();
    let co = t.complement();
    for mask in 1u128..(1u128 << n) - 1 {
        let a = VertexSet(mask);
        let b = all - a;
        if a.len() < 2 || b.len() < 2 || t.is_connected(a) || t.is_anticonnected(b) {
            continue;
        }
        if !has_long_odd_path(t, b, a) && !has_long_odd_path(&co, a, b) {
            return Ok(Some((a, b)));
        }
    }
    Ok(None)
}

/// Balanced skew-partition search for inputs above the exhaustive cap.
/// In a skew-partition `(A, B)`, `B` splits into two sets strongly complete
/// to each other, so it lies within strong neighborhoods; when every strong
/// degree (of `t` or of its complement) is small, all such `B` can be
/// listed. Exact, but capped by `limits.skew_core`.
pub fn find_balanced_skew_partition_sparse(t: &Trigraph, limits: &Limits) -> Result<Option<(VertexSet, VertexSet)>> {
    let n = t.n();
    if n < 4 {
        return Ok(None);
    }
    let all = t.vertices();
    let deg = |h: &Trigraph| (0..n).map(|v| h.strong_nbrs(v).len()).max().unwrap_or(0);
    let co = t.complement();
    let (d, dc) = (deg(t), deg(&co));
    cap_check("strong degree for sparse skew-partition search", d.min(dc), limits.skew_core)?;
    // Skew-partitions of the complement are those of `t` with the roles
    // of the two sides exchanged.
    let (h, swap) = if d <= dc { (t, false) } else { (&co, true) };
    let mut seen = std::collections::HashSet::new();
    for v in 0..n {
        let nv = h.strong_nbrs(v).to_vec();
        for m2 in 1u64..(1u64 << nv.len()) {
            let b2: VertexSet = (0..nv.len()).filter(|i| m2 >> i & 1 == 1).map(|i| nv[i]).collect();
            let common = b2.iter().fold(all, |acc, u| acc & h.strong_nbrs(u)).without(v) - b2;
            let rest = common.to_vec();
            for m1 in 0u64..(1u64 << rest.len()) {
                let b1: VertexSet = (0..rest.len()).filter(|i| m1 >> i & 1 == 1).map(|i| rest[i]).collect();
                let b = b1.with(v) | b2;
                if !seen.insert(b) {
                    continue;
                }
                let a = all - b;
                if a.len() < 2 || h.is_connected(a) {
                    continue;
                }
                let (ta, tb) = if swap { (b, a) } else { (a, b) };
                if is_balanced_skew_partition(t, ta, tb) {
                    return Ok(Some((ta, tb)));
                }
            }
        }
    }
    Ok(None)
}

/// Exhaustive search up to `limits.skew` vertices, the sparse search above.
pub fn find_bsp(t: &Trigraph, limits: &Limits) -> Result<Option<(VertexSet, VertexSet)>> {
    if t.n() <= limits.skew {
        find_balanced_skew_partition(t, limits)
    } else {
        find_balanced_skew_partition_sparse(t, limits)
    }
}

/// Marker vertices of a block, as block indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MarkerRecord {
    pub a: usize,
    pub b: usize,
    /// Only for even 2-joins.
    pub c: Option<usize>,
}

/// A block of decomposition: the kept side in increasing vertex order,
/// then the markers `a`, `b` and (even joins) `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub trigraph: Trigraph,
    pub side: u8,
    pub markers: MarkerRecord,
    /// Parent vertex of each kept block vertex (`labels[i]` for `i` below
    /// the first marker).
    pub labels: Vec<usize>,
}

/// Block `T_{X_side}`: keeps `X_side` and contracts the other side into
/// markers. For a complement 2-join, the complement of the block built in
/// the complement.
pub fn build_block(t: &Trigraph, s: &TwoJoinSplit, side: u8) -> Result<Block> {
    if let Some(v) = split_violation(t, s) {
        return Err(Error::InvalidStructure(v));
    }
    let h = s.host(t);
    let (a, b, c) = s.side(side);
    let keep = a | b | c;
    let (mut bt, labels) = h.induced(keep)?;
    let k = labels.len();
    let extra = if s.parity == Parity::Even { 3 } else { 2 };
    let mut g = Trigraph::new(k + extra)?;
    for u in 0..k {
        for v in u + 1..k {
            g.set(u, v, bt.theta(u, v));
        }
    }
    let (ma, mb) = (k, k + 1);
    for (i, &orig) in labels.iter().enumerate() {
        if a.contains(orig) {
            g.set(i, ma, Theta::Strong);
        }
        if b.contains(orig) {
            g.set(i, mb, Theta::Strong);
        }
    }
    let mc = if s.parity == Parity::Even {
        g.set(ma, k + 2, Theta::Switchable);
        g.set(mb, k + 2, Theta::Switchable);
        Some(k + 2)
    } else {
        g.set(ma, mb, Theta::Switchable);
        None
    };
    bt = g;
    if s.kind == JoinKind::Complement {
        bt = bt.complement();
    }
    Ok(Block { trigraph: bt, side, markers: MarkerRecord { a: ma, b: mb, c: mc }, labels })
}

/// Up-front precondition handling for the drivers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PreconditionMode {
    /// Check class membership and absence of a balanced skew-partition;
    /// a check above its cap is an error.
    Verify,
    /// The caller vouches for the preconditions (e.g. instances built by a
    /// construction known to preserve them). Structural checks still run.
    Assume,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecomposeMode {
    /// Recurse into both blocks (separator construction).
    Both,
    /// Recurse into the block of the larger side only; ties go to the side
    /// holding the smallest vertex.
    Heavier,
}

/// Supplies candidate first sides of 2-joins for trigraphs above the search
/// cap. Candidates are sets of original vertex ids.
pub trait SplitHints {
    fn candidates(&self) -> Vec<VertexSet>;
}

impl SplitHints for Vec<VertexSet> {
    fn candidates(&self) -> Vec<VertexSet> {
        self.clone()
    }
}

#[derive(Clone, Debug)]
pub struct DecomposeOptions {
    pub limits: Limits,
    pub mode: DecomposeMode,
    /// Non-basic trigraphs with at most this many vertices become all-cuts leaves.
    pub base_threshold: usize,
    /// Decompose even when the trigraph is basic, as long as a 2-join is found.
    pub prefer_contraction: bool,
    pub precondition: PreconditionMode,
    /// Ground-truth 2-join sides over the original vertices.
    pub hints: Vec<VertexSet>,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            limits: Limits::default(),
            mode: DecomposeMode::Both,
            base_threshold: 24,
            prefer_contraction: false,
            precondition: PreconditionMode::Verify,
            hints: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeafKind {
    Basic(BasicCertificate),
    /// Small enough for the all-cuts family.
    Small,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChildBlock {
    pub block: Block,
    pub tree: DecompositionTree,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecompositionTree {
    Leaf { trigraph: Trigraph, kind: LeafKind },
    Node { trigraph: Trigraph, split: TwoJoinSplit, children: Vec<ChildBlock> },
}

impl DecompositionTree {
    pub fn trigraph(&self) -> &Trigraph {
        match self {
            DecompositionTree::Leaf { trigraph, .. } | DecompositionTree::Node { trigraph, .. } => trigraph,
        }
    }

    pub fn leaves(&self) -> Vec<&DecompositionTree> {
        match self {
            DecompositionTree::Leaf { .. } => vec![self],
            DecompositionTree::Node { children, .. } => children.iter().flat_map(|c| c.tree.leaves()).collect(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            DecompositionTree::Leaf { .. } => 0,
            DecompositionTree::Node { children, .. } => {
                1 + children.iter().map(|c| c.tree.depth()).max().unwrap_or(0)
            }
        }
    }

    /// Indented text, one line per node.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        self.write_text(0, &mut s);
        s
    }

    fn write_text(&self, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        match self {
            DecompositionTree::Leaf { trigraph, kind } => {
                let k = match kind {
                    LeafKind::Basic(c) => c.kind.to_string(),
                    LeafKind::Small => "small".to_string(),
                };
                out.push_str(&format!("{pad}leaf {k} n={}\n", trigraph.n()));
            }
            DecompositionTree::Node { trigraph, split, children } => {
                out.push_str(&format!("{pad}node n={} {split}\n", trigraph.n()));
                for c in children {
                    let m = c.block.markers;
                    let mc = m.c.map(|c| format!(" c={c}")).unwrap_or_default();
                    out.push_str(&format!(
                        "{pad}  block side={} n={} markers a={} b={}{mc}\n",
                        c.block.side,
                        c.block.trigraph.n(),
                        m.a,
                        m.b
                    ));
                    c.tree.write_text(depth + 2, out);
                }
            }
        }
    }
}

/// Checks the driver preconditions according to `mode`.
pub fn check_preconditions(t: &Trigraph, limits: &Limits, mode: PreconditionMode) -> Result<()> {
    if mode == PreconditionMode::Assume {
        return Ok(());
    }
    let (ok, why) = is_in_class_f(t, limits)?;
    if !ok {
        return Err(Error::Precondition(format!("not in the class: {}", why.unwrap_or_default())));
    }
    if let Some((a, b)) = find_bsp(t, limits)? {
        return Err(Error::Precondition(format!("balanced skew-partition A={a} B={b}")));
    }
    Ok(())
}

/// Original vertices owned by each vertex of a block, given the owners of
/// its parent's vertices.
pub fn block_owners(parent_owners: &[VertexSet], s: &TwoJoinSplit, b: &Block) -> Vec<VertexSet> {
    let union = |x: VertexSet| x.iter().fold(VertexSet::EMPTY, |acc, v| acc | parent_owners[v]);
    let (a, bb, c) = s.side(3 - b.side);
    let mut out: Vec<VertexSet> = b.labels.iter().map(|&v| parent_owners[v]).collect();
    out.push(union(a));
    out.push(union(bb));
    if b.markers.c.is_some() {
        out.push(union(c));
    }
    out
}

/// Maps hints to first sides of the current trigraph: a hint is usable when
/// no vertex's owned set is cut by it.
pub fn hint_sides(owners: &[VertexSet], hints: &[VertexSet]) -> Vec<VertexSet> {
    let mut out = Vec::new();
    for &h in hints {
        let mut x1 = VertexSet::EMPTY;
        let mut ok = true;
        for (v, &o) in owners.iter().enumerate() {
            if o.is_subset(h) {
                x1.insert(v);
            } else if !o.is_disjoint(h) {
                ok = false;
                break;
            }
        }
        if ok && !x1.is_empty() && x1.len() < owners.len() && !out.contains(&x1) {
            out.push(x1);
        }
    }
    out
}

/// Search order: hinted sides (direct, then complement), then exhaustive
/// direct, then exhaustive complement. Exhaustive search is skipped above
/// the cap when a hint was available; otherwise the cap error propagates.
pub fn find_any_two_join(
    t: &Trigraph,
    owners: &[VertexSet],
    opts: &DecomposeOptions,
    transcript: &mut Vec<String>,
) -> Result<Option<TwoJoinSplit>> {
    let sides = hint_sides(owners, &opts.hints);
    for kind in [JoinKind::Direct, JoinKind::Complement] {
        for &x1 in &sides {
            for side in [x1, t.vertices() - x1] {
                if let Some(s) = split_for_side(t, side, kind)? {
                    transcript.push(format!("hinted {kind} 2-join found at X1={}", s.x1()));
                    return Ok(Some(s));
                }
            }
        }
    }
    if !sides.is_empty() {
        transcript.push(format!("{} usable hint(s) gave no valid split", sides.len()));
    }
    if t.n() > opts.limits.two_join && !sides.is_empty() {
        return Ok(None);
    }
    if let Some(s) = find_two_join(t, &opts.limits)? {
        transcript.push(format!("direct 2-join found at X1={}", s.x1()));
        return Ok(Some(s));
    }
    transcript.push(format!("no direct 2-join among {} bipartitions", 1u128 << t.n().saturating_sub(1)));
    if let Some(s) = find_complement_two_join(t, &opts.limits)? {
        transcript.push(format!("complement 2-join found at X1={}", s.x1()));
        return Ok(Some(s));
    }
    transcript.push("no complement 2-join".into());
    Ok(None)
}

/// Side whose block the heavier-side modes keep: the larger by `weight`,
/// ties to the side holding the smallest vertex.
pub fn heavier_side(s: &TwoJoinSplit, weight: impl Fn(VertexSet) -> u128) -> u8 {
    let (w1, w2) = (weight(s.x1()), weight(s.x2()));
    let first = (s.x1() | s.x2()).first();
    if w1 > w2 || (w1 == w2 && first.is_some_and(|v| s.x1().contains(v))) {
        1
    } else {
        2
    }
}

/// Recursive decomposition. Preconditions are checked once, at the root.
pub fn decompose_tree(t: &Trigraph, opts: &DecomposeOptions) -> Result<DecompositionTree> {
    check_preconditions(t, &opts.limits, opts.precondition)?;
    let owners: Vec<VertexSet> = (0..t.n()).map(VertexSet::singleton).collect();
    decompose_rec(t, &owners, opts)
}

/// Basic classification where a recognizer above its cap means "unknown".
pub(crate) fn classify_or_unknown(t: &Trigraph, limits: &Limits) -> Result<Option<BasicCertificate>> {
    match classify_basic(t, limits) {
        Ok(c) if c.is_basic() => Ok(Some(c)),
        Ok(_) => Ok(None),
        Err(Error::CapExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn decompose_rec(t: &Trigraph, owners: &[VertexSet], opts: &DecomposeOptions) -> Result<DecompositionTree> {
    let mut transcript = vec![format!("n={} fingerprint={:016x}", t.n(), t.fingerprint())];
    let basic = match classify_basic(t, &opts.limits) {
        Ok(c) => {
            transcript.push(format!("basic classification: {}", c.kind));
            c.is_basic().then_some(c)
        }
        Err(e @ Error::CapExceeded { .. }) => {
            transcript.push(format!("basic classification unknown: {e}"));
            None
        }
        Err(e) => return Err(e),
    };
    if let Some(c) = &basic {
        if !opts.prefer_contraction {
            return Ok(DecompositionTree::Leaf { trigraph: t.clone(), kind: LeafKind::Basic(c.clone()) });
        }
    }
    // Leaves above the all-cuts cap are decomposed further instead.
    if basic.is_none() && t.n() <= opts.base_threshold.min(opts.limits.cliques) {
        return Ok(DecompositionTree::Leaf { trigraph: t.clone(), kind: LeafKind::Small });
    }
    let found = match find_any_two_join(t, owners, opts, &mut transcript) {
        Ok(f) => f,
        Err(e @ Error::CapExceeded { .. }) if basic.is_some() => {
            transcript.push(format!("search skipped: {e}"));
            None
        }
        Err(e) => return Err(e),
    };
    let Some(split) = found else {
        if let Some(c) = basic {
            return Ok(DecompositionTree::Leaf { trigraph: t.clone(), kind: LeafKind::Basic(c) });
        }
        return Err(Error::ContradictionWitness(transcript));
    };
    let sides: Vec<u8> = match opts.mode {
        DecomposeMode::Both => vec![1, 2],
        DecomposeMode::Heavier => vec![heavier_side(&split, |x| x.len() as u128)],
    };
    let mut children = Vec::new();
    for side in sides {
        let block = build_block(t, &split, side)?;
        if block.trigraph.n() >= t.n() {
            return Err(Error::Precondition(format!(
                "block of side {side} has {} vertices, not fewer than its parent's {}",
                block.trigraph.n(),
                t.n()
            )));
        }
        let child_owners = block_owners(owners, &split, &block);
        let tree = decompose_rec(&block.trigraph, &child_owners, opts)?;
        children.push(ChildBlock { block, tree });
    }
    Ok(DecompositionTree::Node { trigraph: t.clone(), split, children })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    /// Two triangles {0,1,2} and {3,4,5} with the matching 0-3, 1-4, 2-5.
    fn prism() -> Trigraph {
        Trigraph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)]).unwrap()
    }

    #[test]
    fn c6_and_k4_have_no_two_join() {
        let l = Limits::default();
        assert!(find_two_join(&Trigraph::cycle(6), &l).unwrap().is_none());
        assert!(find_two_join(&Trigraph::clique(4), &l).unwrap().is_none());
    }

    #[test]
    fn path_of_length_two_is_excluded() {
        let t = Trigraph::cycle(6);
        assert!(split_from_partition(&t, vs(&[0, 1, 2])).is_none());
    }

    #[test]
    fn long_even_cycle_has_a_two_join() {
        let t = Trigraph::cycle(8);
        let s = find_two_join(&t, &Limits::default()).unwrap().unwrap();
        assert!(split_violation(&t, &s).is_none());
        assert!(all_side_paths_have_parity(&t, &s, s.parity));
    }

    #[test]
    fn odd_parity_with_adjacent_ends() {
        // Two copies of a 4-vertex side: a-b strong edge plus pendant c's.
        let mut t = Trigraph::new(8).unwrap();
        for (u, v) in [(0, 1), (0, 2), (1, 3), (4, 5), (4, 6), (5, 7), (0, 4), (1, 5)] {
            t.set(u, v, Theta::Strong);
        }
        let x1 = vs(&[0, 1, 2, 3]);
        let s = split_for_side(&t, x1, JoinKind::Direct).unwrap().unwrap();
        assert_eq!(s.parity, Parity::Odd);
        assert!(split_violation(&t, &s).is_none());
    }

    #[test]
    fn mixed_parity_is_reported() {
        // Side 1 has an A-B edge (odd), side 2 a path of length 2 (even).
        let mut t = Trigraph::new(7).unwrap();
        for (u, v) in [(0, 1), (0, 2), (3, 5), (5, 4), (3, 6), (0, 3), (1, 4)] {
            t.set(u, v, Theta::Strong);
        }
        let r = split_for_side(&t, vs(&[0, 1, 2]), JoinKind::Direct);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn skew_partition_fixtures() {
        let l = Limits::default();
        let (a, b) = find_balanced_skew_partition(&Trigraph::path(4), &l).unwrap().unwrap();
        assert_eq!((a, b), (vs(&[0, 3]), vs(&[1, 2])));
        assert!(find_balanced_skew_partition(&Trigraph::cycle(4), &l).unwrap().is_none());
        assert!(find_balanced_skew_partition(&Trigraph::cycle(6), &l).unwrap().is_none());
        for k in 1..=8 {
            assert!(find_balanced_skew_partition(&Trigraph::clique(k), &l).unwrap().is_none());
            assert!(find_balanced_skew_partition(&Trigraph::stable(k), &l).unwrap().is_none());
        }
    }

    #[test]
    fn skew_partition_is_self_complementary() {
        let l = Limits::default();
        let p = Trigraph::path(4);
        let (a, b) = find_balanced_skew_partition(&p, &l).unwrap().unwrap();
        assert!(is_balanced_skew_partition(&p.complement(), b, a));
    }

    #[test]
    fn blocks_of_c8() {
        let t = Trigraph::cycle(8);
        let s = find_two_join(&t, &Limits::default()).unwrap().unwrap();
        for side in [1, 2] {
            let b = build_block(&t, &s, side).unwrap();
            let (a, bb, c) = s.side(side);
            let k = (a | bb | c).len();
            match s.parity {
                Parity::Odd => {
                    assert_eq!(b.trigraph.n(), k + 2);
                    assert_eq!(b.trigraph.theta(b.markers.a, b.markers.b), Theta::Switchable);
                }
                Parity::Even => {
                    assert_eq!(b.trigraph.n(), k + 3);
                    let c = b.markers.c.unwrap();
                    assert_eq!(b.trigraph.theta(b.markers.a, c), Theta::Switchable);
                    assert_eq!(b.trigraph.theta(c, b.markers.b), Theta::Switchable);
                    assert_eq!(b.trigraph.theta(b.markers.a, b.markers.b), Theta::StrongAnti);
                }
            }
            assert!(is_in_class_f(&b.trigraph, &Limits::default()).unwrap().0);
        }
    }

    #[test]
    fn prism_complement_join() {
        // The prism has no 2-join of size >= 3 per side; its complement C6
        // neither. Check the detectors agree with each other.
        let l = Limits::default();
        let t = prism();
        assert!(find_two_join(&t, &l).unwrap().is_none());
        assert!(find_complement_two_join(&t, &l).unwrap().is_none());
    }

    #[test]
    fn decompose_fixtures() {
        let opts = DecomposeOptions { base_threshold: 0, ..DecomposeOptions::default() };
        match decompose_tree(&Trigraph::cycle(4), &opts).unwrap() {
            DecompositionTree::Leaf { kind: LeafKind::Basic(c), .. } => {
                assert_eq!(c.kind, crate::basic::BasicKind::Bipartite)
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(decompose_tree(&Trigraph::path(4), &opts), Err(Error::Precondition(_))));
    }

    #[test]
    fn contraction_of_c10() {
        let opts = DecomposeOptions { base_threshold: 0, prefer_contraction: true, ..DecomposeOptions::default() };
        let tree = decompose_tree(&Trigraph::cycle(10), &opts).unwrap();
        assert!(tree.depth() >= 1);
        for leaf in tree.leaves() {
            assert!(leaf.trigraph().n() < 10);
        }
        assert!(tree.to_text().starts_with("node n=10 direct odd A1=0 B1=3 C1=1,2"));
    }
}
