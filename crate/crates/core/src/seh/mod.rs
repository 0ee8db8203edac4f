//! Linear-size bicliques and complement bicliques: weighted trigraphs,
//! 2-join contraction with partition maps, the basic cases, and the
//! extraction drivers.

pub mod kjoin;
pub mod multigraph;

use std::collections::BTreeMap;
use std::fmt;

use crate::basic::{BasicCertificate, BasicKind, BasicPayload};
use crate::decomposition::{
    block_owners, build_block, check_preconditions, classify_or_unknown, find_any_two_join, heavier_side, Block,
    DecomposeMode, DecomposeOptions, JoinKind, Parity, PreconditionMode, TwoJoinSplit,
};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::separation::parse_set;
use crate::trigraph::{Theta, Trigraph};
use crate::vset::VertexSet;

pub use multigraph::{bipartite_multigraph_split, EdgeSplit, Multigraph, SplitMode};

/// Non-negative integer weights.
pub trait Weight:
    num_traits::PrimInt + num_traits::Unsigned + fmt::Debug + fmt::Display + Default + Send + Sync + 'static
{
}

impl<T> Weight for T where
    T: num_traits::PrimInt + num_traits::Unsigned + fmt::Debug + fmt::Display + Default + Send + Sync + 'static
{
}

#[inline]
fn wide<W: Weight>(w: W) -> u128 {
    w.to_u128().expect("unsigned weight fits in u128")
}

fn narrow<W: Weight>(x: u128) -> Result<W> {
    num_traits::cast::<u128, W>(x).ok_or_else(|| Error::InvalidInput(format!("weight {x} overflows the weight type")))
}

/// Real, extra-complete and extra-anticomplete weight.
pub const REAL: usize = 0;
pub const XC: usize = 1;
pub const XAC: usize = 2;

/// A trigraph with a weight triple per vertex and a pair of extra weights
/// per switchable pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedTrigraph<W: Weight = u64> {
    pub trigraph: Trigraph,
    vertex: Vec<[W; 3]>,
    pairs: BTreeMap<(usize, usize), [W; 2]>,
}

pub type WeightedTrigraph64 = WeightedTrigraph<u64>;

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

impl<W: Weight> WeightedTrigraph<W> {
    pub fn zero(t: Trigraph) -> Self {
        WeightedTrigraph { vertex: vec![[W::zero(); 3]; t.n()], pairs: BTreeMap::new(), trigraph: t }
    }

    /// Virgin weight with the given real weights.
    pub fn virgin(t: Trigraph, real: &[W]) -> Result<Self> {
        if real.len() != t.n() {
            return Err(Error::InvalidInput(format!("{} weights for {} vertices", real.len(), t.n())));
        }
        let mut w = Self::zero(t);
        for (v, &r) in real.iter().enumerate() {
            w.vertex[v][REAL] = r;
        }
        Ok(w)
    }

    pub fn uniform(t: Trigraph, r: W) -> Self {
        let n = t.n();
        Self::virgin(t, &vec![r; n]).expect("lengths match")
    }

    pub fn vertex(&self, v: usize) -> [W; 3] {
        self.vertex[v]
    }

    pub fn set_vertex(&mut self, v: usize, w: [W; 3]) {
        self.vertex[v] = w;
    }

    pub fn pair(&self, u: usize, v: usize) -> [W; 2] {
        self.pairs.get(&key(u, v)).copied().unwrap_or([W::zero(); 2])
    }

    pub fn set_pair(&mut self, u: usize, v: usize, w: [W; 2]) -> Result<()> {
        if u == v || u >= self.trigraph.n() || v >= self.trigraph.n() || self.trigraph.theta(u, v) != Theta::Switchable {
            return Err(Error::InvalidInput(format!("pair weight on {u}-{v}, which is not a switchable pair")));
        }
        if w == [W::zero(); 2] {
            self.pairs.remove(&key(u, v));
        } else {
            self.pairs.insert(key(u, v), w);
        }
        Ok(())
    }

    /// Pairs with nonzero weight, in key order.
    pub fn weighted_pairs(&self) -> impl Iterator<Item = ((usize, usize), [W; 2])> + '_ {
        self.pairs.iter().map(|(&k, &w)| (k, w))
    }

    pub fn real_weights(&self) -> Vec<u128> {
        self.vertex.iter().map(|w| wide(w[REAL])).collect()
    }

    pub fn r(&self, u: VertexSet) -> u128 {
        u.iter().map(|v| wide(self.vertex[v][REAL])).sum()
    }

    /// Extra weight of coordinate `which` (1 complete, 2 anticomplete) of
    /// the vertices of `u` and the pairs inside `u`.
    fn extra(&self, u: VertexSet, which: usize) -> u128 {
        let own: u128 = u.iter().map(|v| wide(self.vertex[v][which])).sum();
        let pairs: u128 = self
            .pairs
            .iter()
            .filter(|(&(a, b), _)| u.contains(a) && u.contains(b))
            .map(|(_, w)| wide(w[which - 1]))
            .sum();
        own + pairs
    }

    pub fn c(&self, u: VertexSet) -> u128 {
        self.extra(u, XC)
    }

    pub fn ac(&self, u: VertexSet) -> u128 {
        self.extra(u, XAC)
    }

    pub fn t(&self, u: VertexSet) -> u128 {
        self.r(u) + self.c(u) + self.ac(u)
    }

    pub fn total(&self) -> u128 {
        self.t(self.trigraph.vertices())
    }

    /// Extra weights of the pairs straddling `a` and `b`.
    pub fn crossing(&self, a: VertexSet, b: VertexSet) -> [u128; 2] {
        let mut out = [0u128; 2];
        for (&(u, v), w) in &self.pairs {
            if (a.contains(u) && b.contains(v)) || (a.contains(v) && b.contains(u)) {
                out[0] += wide(w[0]);
                out[1] += wide(w[1]);
            }
        }
        out
    }

    pub fn is_virgin(&self) -> bool {
        self.pairs.is_empty() && self.vertex.iter().all(|w| w[XC].is_zero() && w[XAC].is_zero())
    }
}

/// Checks the three balancedness conditions; the violation names the first
/// one that fails.
pub fn is_balanced_weight<W: Weight>(w: &WeightedTrigraph<W>) -> (bool, Option<String>) {
    let total = w.total();
    for v in 0..w.trigraph.n() {
        let [r, c, ac] = w.vertex(v).map(wide);
        if 55 * r > total {
            return (false, Some(format!("real weight {r} of vertex {v} exceeds 1/55 of {total}")));
        }
        if 55 * c.max(ac) > total {
            return (false, Some(format!("extra weight {} of vertex {v} exceeds 1/55 of {total}", c.max(ac))));
        }
    }
    for ((u, v), p) in w.weighted_pairs() {
        let m = wide(p[0]).max(wide(p[1]));
        if 55 * m > total {
            return (false, Some(format!("extra weight {m} of pair {u}-{v} exceeds 1/55 of {total}")));
        }
    }
    let all = w.trigraph.vertices();
    let extra = w.c(all) + w.ac(all);
    if 55 * extra > 7 * total {
        return (false, Some(format!("total extra weight {extra} exceeds 7/55 of {total}")));
    }
    (true, None)
}

/// Teams of original vertices behind each vertex and switchable pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionMap {
    /// Real, extra-complete and extra-anticomplete team of each vertex.
    pub vertex: Vec<[VertexSet; 3]>,
    /// Extra-complete and extra-anticomplete team of each switchable pair.
    pub pairs: BTreeMap<(usize, usize), [VertexSet; 2]>,
}

impl PartitionMap {
    pub fn identity(n: usize) -> Self {
        PartitionMap {
            vertex: (0..n).map(|v| [VertexSet::singleton(v), VertexSet::EMPTY, VertexSet::EMPTY]).collect(),
            pairs: BTreeMap::new(),
        }
    }

    pub fn pair(&self, u: usize, v: usize) -> [VertexSet; 2] {
        self.pairs.get(&key(u, v)).copied().unwrap_or([VertexSet::EMPTY; 2])
    }

    fn set_pair(&mut self, u: usize, v: usize, p: [VertexSet; 2]) {
        if p != [VertexSet::EMPTY; 2] {
            self.pairs.insert(key(u, v), p);
        }
    }

    pub fn real(&self, u: VertexSet) -> VertexSet {
        u.iter().fold(VertexSet::EMPTY, |acc, v| acc | self.vertex[v][REAL])
    }

    fn extra(&self, u: VertexSet, which: usize) -> VertexSet {
        let own = u.iter().fold(VertexSet::EMPTY, |acc, v| acc | self.vertex[v][which]);
        self.pairs
            .iter()
            .filter(|(&(a, b), _)| u.contains(a) && u.contains(b))
            .fold(own, |acc, (_, p)| acc | p[which - 1])
    }

    pub fn c(&self, u: VertexSet) -> VertexSet {
        self.extra(u, XC)
    }

    pub fn ac(&self, u: VertexSet) -> VertexSet {
        self.extra(u, XAC)
    }

    pub fn crossing(&self, a: VertexSet, b: VertexSet) -> [VertexSet; 2] {
        let mut out = [VertexSet::EMPTY; 2];
        for (&(u, v), p) in &self.pairs {
            if (a.contains(u) && b.contains(v)) || (a.contains(v) && b.contains(u)) {
                out[0] |= p[0];
                out[1] |= p[1];
            }
        }
        out
    }

    /// Every extra team with its owner: `(endpoints, team)`.
    fn extra_teams(&self, which: usize) -> Vec<(VertexSet, VertexSet)> {
        let mut out: Vec<(VertexSet, VertexSet)> =
            self.vertex.iter().enumerate().map(|(v, t)| (VertexSet::singleton(v), t[which])).collect();
        out.extend(self.pairs.iter().map(|(&(a, b), p)| (VertexSet::singleton(a).with(b), p[which - 1])));
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelCondition {
    Partition,
    Weight,
    StrongAdjacency,
    Extra,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelViolation {
    pub condition: ModelCondition,
    pub detail: String,
}

impl fmt::Display for ModelViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} condition: {}", self.condition, self.detail)
    }
}

/// Checks that `(w, beta)` is a model of the virgin `w0`: partition,
/// weight, strong adjacency and extra conditions, in that order.
pub fn verify_model<W: Weight>(
    w0: &WeightedTrigraph<W>,
    w: &WeightedTrigraph<W>,
    beta: &PartitionMap,
) -> std::result::Result<(), ModelViolation> {
    let fail = |condition, detail: String| Err(ModelViolation { condition, detail });
    let t0 = &w0.trigraph;
    let t = &w.trigraph;
    if !w0.is_virgin() {
        return fail(ModelCondition::Weight, "the original weight is not virgin".into());
    }
    if beta.vertex.len() != t.n() {
        return fail(ModelCondition::Partition, format!("{} vertex teams for {} vertices", beta.vertex.len(), t.n()));
    }
    let mut seen = VertexSet::EMPTY;
    let mut teams: Vec<VertexSet> = beta.vertex.iter().flatten().copied().collect();
    for (&(u, v), p) in &beta.pairs {
        if u >= t.n() || v >= t.n() || t.theta(u, v) != Theta::Switchable {
            return fail(ModelCondition::Partition, format!("team assigned to {u}-{v}, not a switchable pair"));
        }
        teams.extend(p.iter().copied());
    }
    for team in teams {
        if !team.is_disjoint(seen) {
            return fail(ModelCondition::Partition, format!("teams overlap on {}", team & seen));
        }
        seen |= team;
    }
    if seen != t0.vertices() {
        return fail(ModelCondition::Partition, format!("teams miss {}", t0.vertices() - seen));
    }

    let w0r = |s: VertexSet| w0.r(s);
    if w.total() != w0.total() {
        return fail(ModelCondition::Weight, format!("total {} differs from original {}", w.total(), w0.total()));
    }
    for v in 0..t.n() {
        let got = w.vertex(v).map(wide);
        let want = beta.vertex[v].map(w0r);
        if got != want {
            return fail(ModelCondition::Weight, format!("vertex {v} has weight {got:?}, its teams weigh {want:?}"));
        }
    }
    for (u, v) in t.switchable_pairs() {
        let got = w.pair(u, v).map(wide);
        let want = beta.pair(u, v).map(w0r);
        if got != want {
            return fail(ModelCondition::Weight, format!("pair {u}-{v} has weight {got:?}, its teams weigh {want:?}"));
        }
    }
    for ((u, v), _) in w.weighted_pairs() {
        if t.theta(u, v) != Theta::Switchable {
            return fail(ModelCondition::Weight, format!("weight on {u}-{v}, not a switchable pair"));
        }
    }

    for u in 0..t.n() {
        for v in u + 1..t.n() {
            let (ru, rv) = (beta.vertex[u][REAL], beta.vertex[v][REAL]);
            let ok = match t.theta(u, v) {
                Theta::Strong => t0.strongly_complete(ru, rv),
                Theta::StrongAnti => t0.strongly_anticomplete(ru, rv),
                Theta::Switchable => true,
            };
            if !ok {
                return fail(
                    ModelCondition::StrongAdjacency,
                    format!("real teams of {u} and {v} do not follow theta = {}", t.theta(u, v).value()),
                );
            }
        }
    }

    for which in [XC, XAC] {
        let items = beta.extra_teams(which);
        let all_extra = items.iter().fold(VertexSet::EMPTY, |acc, (_, team)| acc | *team);
        for (ends, team) in &items {
            if team.is_empty() {
                continue;
            }
            let reals = (0..t.n()).filter(|&y| !ends.contains(y)).fold(VertexSet::EMPTY, |acc, y| {
                acc | beta.vertex[y][REAL]
            });
            let others = (all_extra - *team) | reals;
            let ok = if which == XC {
                t0.strongly_complete(*team, others)
            } else {
                t0.strongly_anticomplete(*team, others)
            };
            if !ok {
                let kind = if which == XC { "extra-complete" } else { "extra-anticomplete" };
                return fail(ModelCondition::Extra, format!("{kind} team of item {ends} is not uniform to the rest"));
            }
        }
    }
    Ok(())
}

/// Result of contracting the lighter side of a 2-join.
#[derive(Clone, Debug)]
pub struct TwoJoinContraction<W: Weight> {
    pub weighted: WeightedTrigraph<W>,
    pub block: Block,
    /// The kept side.
    pub side: u8,
}

/// Contracts the side lighter by total weight; ties keep the side holding
/// the smallest vertex.
pub fn contract_two_join<W: Weight>(w: &WeightedTrigraph<W>, s: &TwoJoinSplit) -> Result<TwoJoinContraction<W>> {
    let side = heavier_side(s, |x| w.t(x));
    contract_two_join_side(w, s, side)
}

/// Contraction keeping side `side`. Total weight is preserved.
pub fn contract_two_join_side<W: Weight>(
    w: &WeightedTrigraph<W>,
    s: &TwoJoinSplit,
    side: u8,
) -> Result<TwoJoinContraction<W>> {
    let block = build_block(&w.trigraph, s, side)?;
    let (a2, b2, c2) = s.side(3 - side);
    let mut out = WeightedTrigraph::zero(block.trigraph.clone());
    for (i, &orig) in block.labels.iter().enumerate() {
        out.vertex[i] = w.vertex(orig);
    }
    for i in 0..block.labels.len() {
        for j in i + 1..block.labels.len() {
            if block.trigraph.theta(i, j) == Theta::Switchable {
                out.set_pair(i, j, w.pair(block.labels[i], block.labels[j]))?;
            }
        }
    }
    let triple = |x: VertexSet| -> Result<[W; 3]> { Ok([narrow(w.r(x))?, narrow(w.c(x))?, narrow(w.ac(x))?]) };
    let m = block.markers;
    out.vertex[m.a] = triple(a2)?;
    out.vertex[m.b] = triple(b2)?;
    let ab = w.crossing(a2, b2);
    let ac = w.crossing(a2, c2);
    let bc = w.crossing(b2, c2);
    match (s.parity, m.c) {
        (Parity::Even, Some(mc)) => {
            if ab != [0, 0] {
                return Err(Error::InvalidStructure("even 2-join with a switchable pair between A and B".into()));
            }
            out.vertex[mc] = triple(c2)?;
            out.set_pair(m.a, mc, [narrow(ac[0])?, narrow(ac[1])?])?;
            out.set_pair(m.b, mc, [narrow(bc[0])?, narrow(bc[1])?])?;
        }
        (Parity::Odd, None) => {
            let mut xc = w.c(c2) + ab[0] + ac[0] + bc[0];
            let mut xac = w.ac(c2) + ab[1] + ac[1] + bc[1];
            match s.kind {
                JoinKind::Direct => xac += w.r(c2),
                JoinKind::Complement => xc += w.r(c2),
            }
            out.set_pair(m.a, m.b, [narrow(xc)?, narrow(xac)?])?;
        }
        _ => return Err(Error::InvalidStructure("block markers do not match the parity".into())),
    }
    if out.total() != w.total() {
        return Err(Error::Verification(format!(
            "contraction changed the total weight from {} to {}",
            w.total(),
            out.total()
        )));
    }
    Ok(TwoJoinContraction { weighted: out, block, side })
}

/// Partition map of a contraction, merging teams the same way the weights
/// are merged.
pub fn compose_partition_map(beta: &PartitionMap, s: &TwoJoinSplit, block: &Block) -> PartitionMap {
    let (a2, b2, c2) = s.side(3 - block.side);
    let k = block.labels.len();
    let mut out = PartitionMap { vertex: Vec::with_capacity(block.trigraph.n()), pairs: BTreeMap::new() };
    for &orig in &block.labels {
        out.vertex.push(beta.vertex[orig]);
    }
    for i in 0..k {
        for j in i + 1..k {
            if block.trigraph.theta(i, j) == Theta::Switchable {
                out.set_pair(i, j, beta.pair(block.labels[i], block.labels[j]));
            }
        }
    }
    let triple = |x: VertexSet| [beta.real(x), beta.c(x), beta.ac(x)];
    let m = block.markers;
    out.vertex.push(triple(a2));
    out.vertex.push(triple(b2));
    let ab = beta.crossing(a2, b2);
    let ac = beta.crossing(a2, c2);
    let bc = beta.crossing(b2, c2);
    if let Some(mc) = m.c {
        out.vertex.push(triple(c2));
        out.set_pair(m.a, mc, ac);
        out.set_pair(m.b, mc, bc);
    } else {
        let mut xc = beta.c(c2) | ab[0] | ac[0] | bc[0];
        let mut xac = beta.ac(c2) | ab[1] | ac[1] | bc[1];
        match s.kind {
            JoinKind::Direct => xac |= beta.real(c2),
            JoinKind::Complement => xc |= beta.real(c2),
        }
        out.set_pair(m.a, m.b, [xc, xac]);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BicliqueKind {
    /// Strongly complete sides.
    Complete,
    /// Strongly anticomplete sides.
    Anticomplete,
}

impl BicliqueKind {
    pub fn flip(self) -> Self {
        match self {
            BicliqueKind::Complete => BicliqueKind::Anticomplete,
            BicliqueKind::Anticomplete => BicliqueKind::Complete,
        }
    }
}

impl fmt::Display for BicliqueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BicliqueKind::Complete => "complete",
            BicliqueKind::Anticomplete => "anticomplete",
        })
    }
}

/// A biclique (`Complete`) or complement biclique (`Anticomplete`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Biclique {
    pub kind: BicliqueKind,
    pub x: VertexSet,
    pub y: VertexSet,
    /// Lighter side's weight.
    pub weight: u128,
}

impl Biclique {
    pub fn with_weights(kind: BicliqueKind, x: VertexSet, y: VertexSet, real: &[u128]) -> Self {
        let w = |s: VertexSet| s.iter().map(|v| real[v]).sum::<u128>();
        Biclique { kind, x, y, weight: w(x).min(w(y)) }
    }

    pub fn unweighted(kind: BicliqueKind, x: VertexSet, y: VertexSet) -> Self {
        Biclique { kind, x, y, weight: x.len().min(y.len()) as u128 }
    }

    pub fn to_text(&self) -> String {
        format!("biclique {} | {} | {} | {}", self.kind, self.x, self.y, self.weight)
    }

    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let bad = |m: String| Error::Parse { line: 1, msg: m };
        let line = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')).unwrap_or("");
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(bad(format!("expected `biclique <kind> | X | Y | weight`, got `{line}`")));
        }
        let kind = match fields[0] {
            "biclique complete" => BicliqueKind::Complete,
            "biclique anticomplete" => BicliqueKind::Anticomplete,
            other => return Err(bad(format!("unknown header `{other}`"))),
        };
        let x = parse_set(fields[1], n).map_err(bad)?;
        let y = parse_set(fields[2], n).map_err(bad)?;
        let weight = fields[3].parse().map_err(|_| bad(format!("bad weight `{}`", fields[3])))?;
        Ok(Biclique { kind, x, y, weight })
    }
}

/// Why `b` is not a biclique of its kind in `t`, if it is not.
pub fn biclique_violation(t: &Trigraph, b: &Biclique) -> Option<String> {
    if !b.x.is_disjoint(b.y) {
        return Some(format!("sides share {}", b.x & b.y));
    }
    if !(b.x | b.y).is_subset(t.vertices()) {
        return Some("a side leaves the vertex range".into());
    }
    let want = match b.kind {
        BicliqueKind::Complete => Theta::Strong,
        BicliqueKind::Anticomplete => Theta::StrongAnti,
    };
    for u in b.x.iter() {
        for v in b.y.iter() {
            if t.theta(u, v) != want {
                return Some(format!("{u}-{v} has theta {}", t.theta(u, v).value()));
            }
        }
    }
    None
}

/// Splits a sequence of weighted items at the prefix whose weight is
/// closest to half the total (ties to the shorter prefix).
fn balanced_prefix_split(items: &[(VertexSet, u128)]) -> (VertexSet, VertexSet) {
    let total: u128 = items.iter().map(|i| i.1).sum();
    let mut best = (total, 0usize);
    let mut p = 0u128;
    for i in 0..=items.len() {
        let gap = (2 * p).abs_diff(total);
        if gap < best.0 {
            best = (gap, i);
        }
        if i < items.len() {
            p += items[i].1;
        }
    }
    let x = items[..best.1].iter().fold(VertexSet::EMPTY, |a, i| a | i.0);
    let y = items[best.1..].iter().fold(VertexSet::EMPTY, |a, i| a | i.0);
    (x, y)
}

fn split_vertices(s: VertexSet, real: &[u128]) -> (VertexSet, VertexSet) {
    let items: Vec<(VertexSet, u128)> = s.iter().map(|v| (VertexSet::singleton(v), real[v])).collect();
    balanced_prefix_split(&items)
}

/// Biclique or complement biclique of a balanced basic weighted trigraph
/// whose lighter side carries at least 1/55 of the total weight. Extra
/// weight is ignored; the case analysis runs on real weights.
pub fn basic_biclique<W: Weight>(w: &WeightedTrigraph<W>, cert: &BasicCertificate) -> Result<Biclique> {
    if !cert.is_basic() {
        return Err(Error::Precondition("trigraph is not basic".into()));
    }
    let (ok, why) = is_balanced_weight(w);
    if !ok {
        return Err(Error::Precondition(format!("weight is not balanced: {}", why.unwrap_or_default())));
    }
    let t = &w.trigraph;
    let real = w.real_weights();
    let total = w.total();
    if total == 0 {
        return Ok(Biclique { kind: BicliqueKind::Anticomplete, x: VertexSet::EMPTY, y: VertexSet::EMPTY, weight: 0 });
    }
    let host = if cert.kind.is_co() { t.complement() } else { t.clone() };
    let w0: u128 = real.iter().sum();
    let rw = |s: VertexSet| s.iter().map(|v| real[v]).sum::<u128>();
    let (kind, x, y) = match &cert.payload {
        BasicPayload::Bipartition(a, b) => {
            let heavy = if rw(*a) >= rw(*b) { *a } else { *b };
            let (x, y) = split_vertices(heavy, &real);
            (BicliqueKind::Anticomplete, x, y)
        }
        BasicPayload::Good(gx, gy) => {
            let mut parts = [VertexSet::EMPTY; 4];
            for comp in host.components(*gx) {
                let v = comp.to_vec();
                parts[0].insert(v[0]);
                if let Some(&u) = v.get(1) {
                    parts[1].insert(u);
                }
            }
            for comp in host.anticomponents(*gy) {
                let v = comp.to_vec();
                parts[2].insert(v[0]);
                if let Some(&u) = v.get(1) {
                    parts[3].insert(u);
                }
            }
            let mut best = 0;
            for i in 1..4 {
                if rw(parts[i]) > rw(parts[best]) {
                    best = i;
                }
            }
            let (x, y) = split_vertices(parts[best], &real);
            let kind = if best < 2 { BicliqueKind::Anticomplete } else { BicliqueKind::Complete };
            (kind, x, y)
        }
        BasicPayload::Root(root) => {
            let heavy = root.stars().into_iter().find(|&k| 16 * rw(k) >= w0 && host.is_strong_clique(k));
            match heavy {
                Some(k) => {
                    let (x, y) = split_vertices(k, &real);
                    (BicliqueKind::Complete, x, y)
                }
                None => {
                    let mut ids = Vec::new();
                    let mut edges = Vec::new();
                    for (v, &(a, b)) in root.edges.iter().enumerate() {
                        if real[v] > 0 {
                            let k = u64::try_from(real[v])
                                .map_err(|_| Error::InvalidInput(format!("weight of vertex {v} is too large")))?;
                            ids.push(v);
                            edges.push((a, b, k));
                        }
                    }
                    let g = Multigraph::new(root.root_vertices, edges)?;
                    let split = bipartite_multigraph_split(&g, SplitMode::Derandomized)?;
                    let x = split.e1.iter().map(|&i| ids[i]).collect();
                    let y = split.e2.iter().map(|&i| ids[i]).collect();
                    (BicliqueKind::Anticomplete, x, y)
                }
            }
        }
        BasicPayload::None => return Err(Error::InvalidStructure("basic certificate without payload".into())),
    };
    let kind = if cert.kind.is_co() { kind.flip() } else { kind };
    let b = Biclique::with_weights(kind, x, y, &real);
    if let Some(why) = biclique_violation(t, &b) {
        return Err(Error::Verification(format!("{} case produced an invalid certificate: {why}", cert.kind)));
    }
    if 55 * b.weight < total {
        return Err(Error::Verification(format!(
            "{} case produced weight {} below 1/55 of {total}",
            cert.kind, b.weight
        )));
    }
    Ok(b)
}

#[derive(Clone, Debug)]
pub struct ExtractOptions {
    pub limits: Limits,
    pub precondition: PreconditionMode,
    /// Ground-truth 2-join sides over the original vertices.
    pub hints: Vec<VertexSet>,
    /// Run the model checker after every contraction.
    pub check_model: bool,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            limits: Limits::default(),
            precondition: PreconditionMode::Verify,
            hints: Vec::new(),
            check_model: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepAction {
    Contracted { split: String, kept: u8 },
    EarlyExit { reason: String },
    Basic { kind: BasicKind },
    /// Small trigraph: a single strong pair.
    StrongPair,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub n: usize,
    pub action: StepAction,
    /// Model conditions were checked after this step and held.
    pub model_ok: bool,
    /// The weight after this step is balanced.
    pub balanced: bool,
}

#[derive(Clone, Debug)]
pub struct Extraction {
    pub biclique: Biclique,
    pub steps: Vec<Step>,
}

impl Extraction {
    pub fn contractions(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s.action, StepAction::Contracted { .. })).count()
    }

    pub fn report(&self) -> String {
        let mut s = String::new();
        for (i, st) in self.steps.iter().enumerate() {
            let what = match &st.action {
                StepAction::Contracted { split, kept } => format!("contract {split} keep X{kept}"),
                StepAction::EarlyExit { reason } => format!("early exit: {reason}"),
                StepAction::Basic { kind } => format!("basic {kind}"),
                StepAction::StrongPair => "strong pair".to_string(),
            };
            s.push_str(&format!("step {i}: n={} {what}\n", st.n));
        }
        s.push_str(&self.biclique.to_text());
        s.push('\n');
        s
    }
}

/// Certificate in `T0` from teams of the current trigraph, checked against
/// the 1/55 bound.
fn certify<W: Weight>(w0: &WeightedTrigraph<W>, kind: BicliqueKind, x: VertexSet, y: VertexSet, what: &str) -> Result<Biclique> {
    let b = Biclique::with_weights(kind, x, y, &w0.real_weights());
    if let Some(why) = biclique_violation(&w0.trigraph, &b) {
        return Err(Error::Verification(format!("{what}: certificate is invalid in the original trigraph: {why}")));
    }
    if 55 * b.weight < w0.total() {
        return Err(Error::Verification(format!("{what}: weight {} is below 1/55 of {}", b.weight, w0.total())));
    }
    Ok(b)
}

/// The early exits available when contracting `split` (kept side `side`)
/// would not give a balanced model, checked in the order of the argument
/// that rules them out.
fn early_exit<W: Weight>(
    w0: &WeightedTrigraph<W>,
    w: &WeightedTrigraph<W>,
    beta: &PartitionMap,
    split: &TwoJoinSplit,
    side: u8,
    next: &TwoJoinContraction<W>,
    next_beta: &PartitionMap,
) -> Result<Option<(Biclique, String)>> {
    let total = w.total();
    let t = &w.trigraph;
    let (a1, b1, c1) = split.side(side);
    let (a2, b2, c2) = split.side(3 - side);
    let Some((zname, z)) = [("A1", a1), ("B1", b1), ("C1", c1)].into_iter().find(|&(_, z)| 55 * w.r(z) >= total) else {
        return Err(Error::Verification(format!(
            "no part of the kept side has 1/55 of the weight {total}; the contraction argument fails here"
        )));
    };
    for (pname, p) in [("A2", a2), ("B2", b2), ("C2", c2)] {
        if p.is_empty() || 55 * w.r(p) < total {
            continue;
        }
        let kind = if t.strongly_complete(z, p) {
            BicliqueKind::Complete
        } else if t.strongly_anticomplete(z, p) {
            BicliqueKind::Anticomplete
        } else {
            return Err(Error::InvalidStructure(format!("{zname} is not uniform to {pname}")));
        };
        let why = format!("heavy real part {pname} against {zname}");
        return Ok(Some((certify(w0, kind, beta.real(z), beta.real(p), &why)?, why)));
    }
    let m = next.block.markers;
    let mut items: Vec<(String, [u128; 2], [VertexSet; 2])> = Vec::new();
    for (name, v) in [("a", Some(m.a)), ("b", Some(m.b)), ("c", m.c)] {
        if let Some(v) = v {
            let x = next.weighted.vertex(v);
            let tb = next_beta.vertex[v];
            items.push((format!("marker {name}"), [wide(x[XC]), wide(x[XAC])], [tb[XC], tb[XAC]]));
        }
    }
    let new_pairs: Vec<(usize, usize)> = match m.c {
        Some(c) => vec![(m.a, c), (m.b, c)],
        None => vec![(m.a, m.b)],
    };
    for (u, v) in new_pairs {
        items.push((
            format!("marker pair {u}-{v}"),
            next.weighted.pair(u, v).map(wide),
            next_beta.pair(u, v),
        ));
    }
    let zr = beta.real(z);
    for (name, wts, teams) in &items {
        for (i, kind) in [BicliqueKind::Complete, BicliqueKind::Anticomplete].into_iter().enumerate() {
            if 55 * wts[i] >= total {
                let why = format!("heavy extra team of {name} against {zname}");
                return Ok(Some((certify(w0, kind, teams[i], zr, &why)?, why)));
            }
        }
    }
    let all = next.weighted.trigraph.vertices();
    let extra = next.weighted.c(all) + next.weighted.ac(all);
    if 55 * extra > 7 * total {
        let tv = t.vertices();
        let (which, kind, weight) = if 55 * w.c(tv) >= 3 * total {
            (XC, BicliqueKind::Complete, w.c(tv))
        } else if 55 * w.ac(tv) >= 3 * total {
            (XAC, BicliqueKind::Anticomplete, w.ac(tv))
        } else {
            return Err(Error::Verification(format!(
                "extra weight {extra} exceeds 7/55 of {total} but neither extra kind reaches 3/55"
            )));
        };
        let real0 = w0.real_weights();
        let teams: Vec<(VertexSet, u128)> = beta
            .extra_teams(which)
            .into_iter()
            .filter(|(_, team)| !team.is_empty())
            .map(|(_, team)| (team, team.iter().map(|v| real0[v]).sum()))
            .collect();
        let (x, y) = balanced_prefix_split(&teams);
        let why = format!("extra teams of weight {weight} split in two");
        return Ok(Some((certify(w0, kind, x, y, &why)?, why)));
    }
    Ok(None)
}

/// Biclique or complement biclique of weight at least 1/55 of `w0` in a
/// trigraph of the class without balanced skew-partition, for a balanced
/// virgin `w0`. Contracts 2-joins on the heavier side until a basic
/// trigraph or an early exit is reached.
pub fn extract_biclique<W: Weight>(w0: &WeightedTrigraph<W>, opts: &ExtractOptions) -> Result<Extraction> {
    if !w0.is_virgin() {
        return Err(Error::Precondition("the weight must be virgin".into()));
    }
    let (ok, why) = is_balanced_weight(w0);
    if !ok {
        return Err(Error::Precondition(format!("the weight is not balanced: {}", why.unwrap_or_default())));
    }
    check_preconditions(&w0.trigraph, &opts.limits, opts.precondition)?;
    let mut steps = Vec::new();
    if w0.total() == 0 {
        let b = Biclique { kind: BicliqueKind::Anticomplete, x: VertexSet::EMPTY, y: VertexSet::EMPTY, weight: 0 };
        return Ok(Extraction { biclique: b, steps });
    }
    let dopts = DecomposeOptions {
        limits: opts.limits,
        mode: DecomposeMode::Heavier,
        hints: opts.hints.clone(),
        ..DecomposeOptions::default()
    };
    let mut w = w0.clone();
    let mut beta = PartitionMap::identity(w0.trigraph.n());
    let mut owners: Vec<VertexSet> = (0..w0.trigraph.n()).map(VertexSet::singleton).collect();
    loop {
        let n = w.trigraph.n();
        if let Some(cert) = classify_or_unknown(&w.trigraph, &opts.limits)? {
            let b = basic_biclique(&w, &cert)?;
            let what = format!("{} leaf", cert.kind);
            let mapped = certify(w0, b.kind, beta.real(b.x), beta.real(b.y), &what)?;
            steps.push(Step { n, action: StepAction::Basic { kind: cert.kind }, model_ok: true, balanced: true });
            return Ok(Extraction { biclique: mapped, steps });
        }
        let mut transcript = vec![format!("n={n} fingerprint={:016x}", w.trigraph.fingerprint())];
        let Some(split) = find_any_two_join(&w.trigraph, &owners, &dopts, &mut transcript)? else {
            transcript.push("not basic and no 2-join: the input violates the class assumption".into());
            return Err(Error::ContradictionWitness(transcript));
        };
        let side = heavier_side(&split, |x| w.t(x));
        let next = contract_two_join_side(&w, &split, side)?;
        if next.block.trigraph.n() >= n {
            return Err(Error::Precondition(format!(
                "block has {} vertices, not fewer than its parent's {n}",
                next.block.trigraph.n()
            )));
        }
        let next_beta = compose_partition_map(&beta, &split, &next.block);
        if let Some((b, reason)) = early_exit(w0, &w, &beta, &split, side, &next, &next_beta)? {
            steps.push(Step { n, action: StepAction::EarlyExit { reason }, model_ok: true, balanced: true });
            return Ok(Extraction { biclique: b, steps });
        }
        let (balanced, why) = is_balanced_weight(&next.weighted);
        if !balanced {
            return Err(Error::Verification(format!(
                "contraction is unbalanced with no early exit: {}",
                why.unwrap_or_default()
            )));
        }
        if opts.check_model {
            if let Err(v) = verify_model(w0, &next.weighted, &next_beta) {
                return Err(Error::Verification(format!("contraction is not a model: {v}")));
            }
        }
        owners = block_owners(&owners, &split, &next.block);
        steps.push(Step {
            n,
            action: StepAction::Contracted { split: split.to_string(), kept: side },
            model_ok: opts.check_model,
            balanced,
        });
        w = next.weighted;
        beta = next_beta;
    }
}

/// Biclique or complement biclique with `55 · min(|X|, |Y|) >= n`.
/// Below 55 vertices any strong pair will do.
pub fn extract_biclique_unweighted(t: &Trigraph, opts: &ExtractOptions) -> Result<Extraction> {
    if t.n() < 3 {
        return Err(Error::Precondition(format!("need at least 3 vertices, got {}", t.n())));
    }
    check_preconditions(t, &opts.limits, opts.precondition)?;
    if t.n() >= 55 {
        let w0 = WeightedTrigraph::<u64>::uniform(t.clone(), 1);
        let opts = ExtractOptions { precondition: PreconditionMode::Assume, ..opts.clone() };
        return extract_biclique(&w0, &opts);
    }
    let b = strong_pair_biclique(t).ok_or_else(|| Error::Precondition("no strong edge or strong antiedge".into()))?;
    let step = Step { n: t.n(), action: StepAction::StrongPair, model_ok: true, balanced: true };
    Ok(Extraction { biclique: b, steps: vec![step] })
}

/// First strong pair in lexicographic order, as a size-1 certificate.
pub fn strong_pair_biclique(t: &Trigraph) -> Option<Biclique> {
    for u in 0..t.n() {
        for v in u + 1..t.n() {
            let kind = match t.theta(u, v) {
                Theta::Strong => BicliqueKind::Complete,
                Theta::StrongAnti => BicliqueKind::Anticomplete,
                Theta::Switchable => continue,
            };
            return Some(Biclique::unweighted(kind, VertexSet::singleton(u), VertexSet::singleton(v)));
        }
    }
    None
}

#[cfg(test)]
mod tests;
