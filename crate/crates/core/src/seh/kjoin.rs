//! Biclique extraction for trigraphs built by generalized k-joins, with
//! plain integer weights on the vertices.

use num_rational::Ratio;

use super::{biclique_violation, strong_pair_biclique, Biclique, BicliqueKind, Weight};
use crate::basic::is_bipartite_trigraph;
use crate::error::{cap_check, Error, Result};
use crate::kjoin::CompositionTree;
use crate::trigraph::Trigraph;
use crate::vset::VertexSet;

/// Source of bicliques for the graphs at the leaves.
pub trait BicliqueOracle {
    /// A biclique or complement biclique of `g` whose lighter side weighs
    /// at least `ck · w(g)`, for a `ck`-balanced `weights`.
    fn biclique(&self, g: &Trigraph, weights: &[u128], ck: Ratio<u64>) -> Result<Biclique>;
}

/// Best certificate over all first sides; exponential, capped.
#[derive(Clone, Copy, Debug)]
pub struct ExhaustiveOracle {
    pub cap: usize,
}

impl Default for ExhaustiveOracle {
    fn default() -> Self {
        ExhaustiveOracle { cap: 20 }
    }
}

impl BicliqueOracle for ExhaustiveOracle {
    fn biclique(&self, g: &Trigraph, weights: &[u128], _ck: Ratio<u64>) -> Result<Biclique> {
        cap_check("vertices for exhaustive biclique search", g.n(), self.cap)?;
        let mut best: Option<Biclique> = None;
        for kind in [BicliqueKind::Complete, BicliqueKind::Anticomplete] {
            for mask in 1u128..(1u128 << g.n()) {
                let x = VertexSet(mask);
                let mut y = g.vertices() - x;
                for v in x.iter() {
                    y &= match kind {
                        BicliqueKind::Complete => g.strong_nbrs(v),
                        BicliqueKind::Anticomplete => g.strong_anti_nbrs(v),
                    };
                }
                if y.is_empty() {
                    continue;
                }
                let b = Biclique::with_weights(kind, x, y, weights);
                if best.as_ref().is_none_or(|c| b.weight > c.weight) {
                    best = Some(b);
                }
            }
        }
        best.ok_or_else(|| Error::Precondition("graph has no strong pair".into()))
    }
}

/// Bipartite graphs: the heavier side split in two by weight. Good for
/// `ck <= 1/6`.
#[derive(Clone, Copy, Debug, Default)]
pub struct BipartiteOracle;

impl BicliqueOracle for BipartiteOracle {
    fn biclique(&self, g: &Trigraph, weights: &[u128], _ck: Ratio<u64>) -> Result<Biclique> {
        let (a, b) = is_bipartite_trigraph(g).ok_or_else(|| Error::InvalidInput("leaf graph is not bipartite".into()))?;
        let w = |s: VertexSet| s.iter().map(|v| weights[v]).sum::<u128>();
        let heavy = if w(a) >= w(b) { a } else { b };
        let (x, y) = super::split_vertices(heavy, weights);
        Ok(Biclique::with_weights(BicliqueKind::Anticomplete, x, y, weights))
    }
}

/// One contraction of a k-join: the kept child and where its vertices came
/// from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KContraction {
    pub kept_left: bool,
    pub weights: Vec<u128>,
    /// Vertices of the joined trigraph behind each vertex of the kept child.
    pub origin: Vec<VertexSet>,
}

/// Keeps the side whose parts weigh more (ties to the left); each port
/// takes the weight of the part it stands for.
pub fn contract_k_join(node: &CompositionTree, weights: &[u128]) -> Result<KContraction> {
    let CompositionTree::Node { left, right, trigraph, layout, .. } = node else {
        return Err(Error::InvalidStructure("a leaf has no k-join to contract".into()));
    };
    if weights.len() != trigraph.n() {
        return Err(Error::InvalidInput(format!("{} weights for {} vertices", weights.len(), trigraph.n())));
    }
    let w = |s: VertexSet| s.iter().map(|v| weights[v]).sum::<u128>();
    let wa: u128 = layout.a_parts.iter().map(|&p| w(p)).sum();
    let wb: u128 = layout.b_parts.iter().map(|&p| w(p)).sum();
    let kept_left = wa >= wb;
    let (child, map, ports, parts) = if kept_left {
        (left, &layout.left_map, &layout.left_ports, &layout.b_parts)
    } else {
        (right, &layout.right_map, &layout.right_ports, &layout.a_parts)
    };
    let origin: Vec<VertexSet> = (0..child.trigraph().n())
        .map(|u| match map[u] {
            Some(j) => VertexSet::singleton(j),
            None => parts[ports.iter().position(|&p| p == u).expect("unmapped vertices are ports")],
        })
        .collect();
    let weights: Vec<u128> = origin.iter().map(|&o| w(o)).collect();
    Ok(KContraction { kept_left, weights, origin })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KStep {
    Contracted { n: usize, kept_left: bool },
    EarlyExit { n: usize, a_part: usize, b_part: usize },
    Leaf { n: usize, reduced: usize },
    StrongPair,
}

#[derive(Clone, Debug)]
pub struct KExtraction {
    pub biclique: Biclique,
    pub steps: Vec<KStep>,
}

fn at_least(weight: u128, c: Ratio<u64>, total: u128) -> bool {
    *c.denom() as u128 * weight >= *c.numer() as u128 * total
}

/// Checks the simple model conditions: teams partition the original
/// vertices, weights match, strong pairs map to strongly complete or
/// anticomplete teams.
fn simple_model_violation(t0: &Trigraph, w0: &[u128], t: &Trigraph, w: &[u128], beta: &[VertexSet]) -> Option<String> {
    let mut seen = VertexSet::EMPTY;
    for (v, &team) in beta.iter().enumerate() {
        if !team.is_disjoint(seen) {
            return Some(format!("team of {v} overlaps another"));
        }
        seen |= team;
        let tw: u128 = team.iter().map(|x| w0[x]).sum();
        if tw != w[v] {
            return Some(format!("vertex {v} weighs {}, its team {tw}", w[v]));
        }
    }
    if seen != t0.vertices() {
        return Some("teams do not cover the original vertices".into());
    }
    for u in 0..t.n() {
        for v in u + 1..t.n() {
            let ok = match t.theta(u, v) {
                crate::Theta::Strong => t0.strongly_complete(beta[u], beta[v]),
                crate::Theta::StrongAnti => t0.strongly_anticomplete(beta[u], beta[v]),
                crate::Theta::Switchable => true,
            };
            if !ok {
                return Some(format!("teams of {u} and {v} do not follow their adjacency"));
            }
        }
    }
    None
}

/// Biclique or complement biclique of weight at least `c · w0(T0)`. Needs
/// `0 < c` and `2kc < 1`, a `c`-balanced `w0`, and a strong pair in `T0`;
/// the oracle is consulted once, at the final leaf.
pub fn extract_biclique_kjoin<W: Weight>(
    tree: &CompositionTree,
    w0: &[W],
    c: Ratio<u64>,
    k: usize,
    oracle: &dyn BicliqueOracle,
) -> Result<KExtraction> {
    let t0 = tree.trigraph();
    let (p, q) = (*c.numer() as u128, *c.denom() as u128);
    if p == 0 || 2 * k as u128 * p >= q {
        return Err(Error::Precondition(format!("need 0 < c < 1/(2k), got c = {c}, k = {k}")));
    }
    if w0.len() != t0.n() {
        return Err(Error::InvalidInput(format!("{} weights for {} vertices", w0.len(), t0.n())));
    }
    if let Some(leaf) = tree.leaves().into_iter().find(|l| l.max_part() > k) {
        return Err(Error::Precondition(format!("a leaf has a part of size {} > k = {k}", leaf.max_part())));
    }
    if !t0.has_strong_pair() {
        return Err(Error::Precondition("no strong edge or strong antiedge".into()));
    }
    let w0: Vec<u128> = w0.iter().map(|&x| x.to_u128().expect("unsigned")).collect();
    let total: u128 = w0.iter().sum();
    if let Some(v) = (0..t0.n()).find(|&v| q * w0[v] > p * total) {
        return Err(Error::Precondition(format!("weight {} of vertex {v} exceeds c times {total}", w0[v])));
    }
    let certify = |kind, x: VertexSet, y: VertexSet, what: &str| -> Result<Biclique> {
        let b = Biclique::with_weights(kind, x, y, &w0);
        if let Some(why) = biclique_violation(t0, &b) {
            return Err(Error::Verification(format!("{what}: invalid in the original trigraph: {why}")));
        }
        if !at_least(b.weight, c, total) {
            return Err(Error::Verification(format!("{what}: weight {} is below c times {total}", b.weight)));
        }
        Ok(b)
    };
    let mut steps = Vec::new();
    let mut node = tree;
    let mut w = w0.clone();
    let mut beta: Vec<VertexSet> = (0..t0.n()).map(VertexSet::singleton).collect();
    loop {
        let t = node.trigraph();
        match node {
            CompositionTree::Node { iface, left, right, layout, .. } => {
                let ws = |s: VertexSet| s.iter().map(|v| w[v]).sum::<u128>();
                let wa: Vec<u128> = layout.a_parts.iter().map(|&s| ws(s)).collect();
                let wb: Vec<u128> = layout.b_parts.iter().map(|&s| ws(s)).collect();
                let keep_left = wa.iter().sum::<u128>() >= wb.iter().sum::<u128>();
                let heaviest = |v: &[u128]| (0..v.len()).fold(0, |b, i| if v[i] > v[b] { i } else { b });
                let exit = if keep_left {
                    let j0 = heaviest(&wa);
                    (0..wb.len()).find(|&i| at_least(wb[i], c, total)).map(|i0| (j0, i0))
                } else {
                    let i0 = heaviest(&wb);
                    (0..wa.len()).find(|&j| at_least(wa[j], c, total)).map(|j0| (j0, i0))
                };
                if let Some((j0, i0)) = exit {
                    if at_least(wa[j0].min(wb[i0]), c, total) {
                        let kind = if iface.pattern[j0][i0] { BicliqueKind::Complete } else { BicliqueKind::Anticomplete };
                        let team = |s: VertexSet| s.iter().fold(VertexSet::EMPTY, |acc, v| acc | beta[v]);
                        let b = certify(kind, team(layout.a_parts[j0]), team(layout.b_parts[i0]), "k-join early exit")?;
                        steps.push(KStep::EarlyExit { n: t.n(), a_part: j0, b_part: i0 });
                        return Ok(KExtraction { biclique: b, steps });
                    }
                }
                let con = contract_k_join(node, &w)?;
                let next_beta: Vec<VertexSet> =
                    con.origin.iter().map(|o| o.iter().fold(VertexSet::EMPTY, |acc, v| acc | beta[v])).collect();
                let child: &CompositionTree = if con.kept_left { left } else { right };
                if let Some(v) = (0..con.weights.len()).find(|&v| q * con.weights[v] > p * total) {
                    return Err(Error::Verification(format!(
                        "contraction is not c-balanced at vertex {v} and no early exit applies"
                    )));
                }
                if let Some(why) = simple_model_violation(t0, &w0, child.trigraph(), &con.weights, &next_beta) {
                    return Err(Error::Verification(format!("contraction is not a model: {why}")));
                }
                steps.push(KStep::Contracted { n: t.n(), kept_left: con.kept_left });
                node = child;
                w = con.weights;
                beta = next_beta;
            }
            CompositionTree::Leaf(_) => {
                let mut keep = VertexSet::EMPTY;
                for (comp, _) in t.switchable_components() {
                    let best = comp.iter().fold(comp.first().unwrap(), |b, v| if w[v] > w[b] { v } else { b });
                    keep.insert(best);
                }
                let (g, labels) = t.induced(keep)?;
                if g.n() < 2 {
                    return Err(Error::Precondition("the final leaf has a single switchable component".into()));
                }
                let gw: Vec<u128> = labels.iter().map(|&v| w[v]).collect();
                let ck = c * Ratio::from_integer(k as u64);
                let b = oracle.biclique(&g, &gw, ck)?;
                if let Some(why) = biclique_violation(&g, &b) {
                    return Err(Error::OracleContract(format!("oracle certificate is invalid: {why}")));
                }
                let b = Biclique::with_weights(b.kind, b.x, b.y, &gw);
                if !at_least(b.weight, ck, gw.iter().sum()) {
                    return Err(Error::OracleContract(format!(
                        "oracle certificate weighs {}, below {ck} of {}",
                        b.weight,
                        gw.iter().sum::<u128>()
                    )));
                }
                let team = |s: VertexSet| s.iter().fold(VertexSet::EMPTY, |acc, i| acc | beta[labels[i]]);
                let out = certify(b.kind, team(b.x), team(b.y), "leaf certificate")?;
                steps.push(KStep::Leaf { n: t.n(), reduced: g.n() });
                return Ok(KExtraction { biclique: out, steps });
            }
        }
    }
}

/// Unit weights: below `1/c` vertices a single strong pair suffices,
/// otherwise the weighted driver runs.
pub fn extract_biclique_kjoin_unit(
    tree: &CompositionTree,
    c: Ratio<u64>,
    k: usize,
    oracle: &dyn BicliqueOracle,
) -> Result<KExtraction> {
    let t0 = tree.trigraph();
    let n = t0.n() as u128;
    if (*c.numer() as u128) * n < *c.denom() as u128 {
        let b = strong_pair_biclique(t0).ok_or_else(|| Error::Precondition("no strong edge or strong antiedge".into()))?;
        return Ok(KExtraction { biclique: b, steps: vec![KStep::StrongPair] });
    }
    extract_biclique_kjoin(tree, &vec![1u64; t0.n()], c, k, oracle)
}
