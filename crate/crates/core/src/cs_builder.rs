//! Separator construction: basic classes, 2-join recombination and the
//! recursive driver over a decomposition tree.

use crate::basic::{BasicCertificate, BasicKind, BasicPayload};
use crate::decomposition::{
    decompose_tree, Block, DecomposeMode, DecomposeOptions, DecompositionTree, JoinKind, LeafKind, TwoJoinSplit,
};
use crate::error::{Error, Result};
use crate::separation::{extension_cuts, verify_cs_separator, CsSeparator, Cut};
use crate::trigraph::Trigraph;
use crate::vset::VertexSet;

/// Separator of a basic trigraph from its certificate.
///
/// * bipartite: one cut `(K, V \ K)` per clique of size at most 2, `{}` first;
/// * line: one cut per maximal clique, then the neighborhood extension;
/// * doubled: `(Y, X)`, the `(|X|+1)(|Y|+1)` single-vertex exchanges, and
///   both cuts of every pair;
/// * co-classes: the flipped family of the complement.
pub fn basic_cs_separator(t: &Trigraph, cert: &BasicCertificate) -> Result<CsSeparator> {
    cert.validate(t)?;
    let n = t.n();
    let cuts = match (cert.kind, &cert.payload) {
        (BasicKind::CoBipartite | BasicKind::CoLine, _) => {
            let co = t.complement();
            let kind = if cert.kind == BasicKind::CoBipartite { BasicKind::Bipartite } else { BasicKind::Line };
            let inner = BasicCertificate { kind, payload: cert.payload.clone() };
            return Ok(basic_cs_separator(&co, &inner)?.flip(t));
        }
        (BasicKind::Bipartite, _) => {
            let mut cuts = vec![Cut::from_clique_side(VertexSet::EMPTY, n)];
            for u in 0..n {
                cuts.push(Cut::from_clique_side(VertexSet::singleton(u), n));
            }
            for u in 0..n {
                for v in (t.nbrs(u).above(u)).iter() {
                    cuts.push(Cut::from_clique_side(VertexSet::singleton(u).with(v), n));
                }
            }
            cuts
        }
        (BasicKind::Line, BasicPayload::Root(r)) => {
            let stars = r.stars();
            let mut maximal: Vec<VertexSet> = Vec::new();
            for &s in &stars {
                let dominated = stars.iter().any(|&o| s.is_subset(o) && s != o);
                if !s.is_empty() && !dominated && !maximal.contains(&s) {
                    maximal.push(s);
                }
            }
            let mut cuts: Vec<Cut> = maximal.into_iter().map(|k| Cut::from_clique_side(k, n)).collect();
            cuts.extend(extension_cuts(t));
            cuts
        }
        (BasicKind::Doubled, BasicPayload::Good(x, y)) => doubled_family(n, *x, *y),
        (BasicKind::NotBasic, _) => {
            return Err(Error::Precondition("trigraph is not basic".into()));
        }
        _ => return Err(Error::InvalidStructure("certificate payload does not match its kind".into())),
    };
    CsSeparator::new(t, cuts)
}

/// The doubled-trigraph family for good partition `(x, y)`.
pub fn doubled_family(n: usize, x: VertexSet, y: VertexSet) -> Vec<Cut> {
    let mut cuts = vec![Cut { clique_side: y, stable_side: x }];
    let zs: Vec<VertexSet> = std::iter::once(VertexSet::EMPTY).chain(x.iter().map(VertexSet::singleton)).collect();
    let zps: Vec<VertexSet> = std::iter::once(VertexSet::EMPTY).chain(y.iter().map(VertexSet::singleton)).collect();
    for &z in &zs {
        for &zp in &zps {
            cuts.push(Cut { clique_side: (y | z) - zp, stable_side: (x | zp) - z });
        }
    }
    for u in 0..n {
        for v in u + 1..n {
            let p = VertexSet::singleton(u).with(v);
            cuts.push(Cut::from_clique_side(p, n));
            cuts.push(Cut::from_clique_side(VertexSet::full(n) - p, n));
        }
    }
    cuts
}

/// Lifts cuts of a direct-2-join block to the parent: the kept side maps
/// through the labels, the other side's A and B follow markers `a` and `b`,
/// and its C goes to the stable side.
fn lift_block_cuts(parent_n: usize, s: &TwoJoinSplit, b: &Block, f: &CsSeparator, out: &mut Vec<Cut>) {
    let (oa, ob, _) = s.side(3 - b.side);
    for c in &f.cuts {
        let mut u = VertexSet::EMPTY;
        for (i, &orig) in b.labels.iter().enumerate() {
            if c.clique_side.contains(i) {
                u.insert(orig);
            }
        }
        if c.clique_side.contains(b.markers.a) {
            u |= oa;
        }
        if c.clique_side.contains(b.markers.b) {
            u |= ob;
        }
        out.push(Cut::from_clique_side(u, parent_n));
    }
}

/// Combines separators of the two blocks into one of `t` of size
/// `|F1| + |F2|`. Complement joins are handled in the complement.
pub fn recombine_two_join(
    t: &Trigraph,
    s: &TwoJoinSplit,
    blocks: [(&Block, &CsSeparator); 2],
) -> Result<CsSeparator> {
    for (b, f) in blocks {
        if !f.is_for(&b.trigraph) {
            return Err(Error::InvalidStructure(format!("separator does not belong to block {}", b.side)));
        }
    }
    let mut cuts = Vec::with_capacity(blocks[0].1.len() + blocks[1].1.len());
    for (b, f) in blocks {
        match s.kind {
            JoinKind::Direct => lift_block_cuts(t.n(), s, b, f, &mut cuts),
            JoinKind::Complement => {
                let flipped = CsSeparator {
                    n: f.n,
                    fingerprint: 0,
                    cuts: f.cuts.iter().map(|c| c.flip()).collect(),
                };
                let mut lifted = Vec::new();
                lift_block_cuts(t.n(), s, b, &flipped, &mut lifted);
                cuts.extend(lifted.into_iter().map(Cut::flip));
            }
        }
    }
    CsSeparator::new(t, cuts)
}

#[derive(Clone, Debug)]
#[derive(Default)]
pub struct CsBuildOptions {
    pub decompose: DecomposeOptions,
    /// Run the exhaustive verifier on the result.
    pub verify: bool,
}


#[derive(Clone, Debug)]
pub struct LeafReport {
    pub n: usize,
    /// Basic class, or `None` for an all-cuts leaf.
    pub kind: Option<BasicKind>,
    pub size: usize,
}

#[derive(Clone, Debug)]
pub struct CsBuild {
    pub separator: CsSeparator,
    pub tree: DecompositionTree,
    /// Leaves in tree order; their sizes sum to the separator's size.
    pub leaves: Vec<LeafReport>,
    pub verified: Option<bool>,
}

impl CsBuild {
    pub fn report(&self) -> String {
        let mut s = String::new();
        for (i, l) in self.leaves.iter().enumerate() {
            let k = l.kind.map_or("small".to_string(), |k| k.to_string());
            s.push_str(&format!("leaf {i}: {k} n={} cuts={}\n", l.n, l.size));
        }
        s.push_str(&format!("total: {}\n", self.separator.len()));
        if let Some(v) = self.verified {
            s.push_str(&format!("verified: {v}\n"));
        }
        s
    }
}

/// Separator of a tree built in [`DecomposeMode::Both`].
pub fn separator_from_tree(tree: &DecompositionTree, limits_cap: usize, leaves: &mut Vec<LeafReport>) -> Result<CsSeparator> {
    match tree {
        DecompositionTree::Leaf { trigraph, kind } => {
            let (f, k) = match kind {
                LeafKind::Basic(c) => (basic_cs_separator(trigraph, c)?, Some(c.kind)),
                LeafKind::Small => (CsSeparator::all_cuts(trigraph, limits_cap)?, None),
            };
            leaves.push(LeafReport { n: trigraph.n(), kind: k, size: f.len() });
            Ok(f)
        }
        DecompositionTree::Node { trigraph, split, children } => {
            let [c1, c2] = &children[..] else {
                return Err(Error::InvalidInput("separator construction needs both blocks at every node".into()));
            };
            let f1 = separator_from_tree(&c1.tree, limits_cap, leaves)?;
            let f2 = separator_from_tree(&c2.tree, limits_cap, leaves)?;
            recombine_two_join(trigraph, split, [(&c1.block, &f1), (&c2.block, &f2)])
        }
    }
}

/// Decomposes `t` (both blocks at every node) and assembles its separator.
pub fn build_cs_separator(t: &Trigraph, opts: &CsBuildOptions) -> Result<CsBuild> {
    let mut d = opts.decompose.clone();
    d.mode = DecomposeMode::Both;
    let tree = decompose_tree(t, &d)?;
    let mut leaves = Vec::new();
    let separator = separator_from_tree(&tree, d.limits.cliques, &mut leaves)?;
    let verified = if opts.verify {
        let v = verify_cs_separator(t, &separator, &d.limits)?;
        if !v.ok {
            let (k, s) = v.counterexample.unwrap_or_default();
            return Err(Error::Verification(format!("clique {{{k}}} and stable set {{{s}}} are not separated")));
        }
        Some(true)
    } else {
        None
    };
    Ok(CsBuild { separator, tree, leaves, verified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basic::classify_basic;
    use crate::limits::Limits;
    use crate::trigraph::Theta;

    fn check(t: &Trigraph) -> CsSeparator {
        let l = Limits::default();
        let c = classify_basic(t, &l).unwrap();
        let f = basic_cs_separator(t, &c).unwrap();
        assert!(verify_cs_separator(t, &f, &l).unwrap().ok, "{c:?}");
        f
    }

    #[test]
    fn basic_families_verify() {
        check(&Trigraph::cycle(4));
        check(&Trigraph::cycle(6).complement());
        check(&Trigraph::clique(5));
        check(&Trigraph::new(0).unwrap());
        check(&Trigraph::new(1).unwrap());
        let net = Trigraph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (0, 3), (1, 4), (2, 5)]).unwrap();
        check(&net);
        check(&net.complement());
    }

    #[test]
    fn c6_as_line() {
        let t = Trigraph::cycle(6);
        let r = crate::basic::is_line_trigraph(&t, &Limits::default()).unwrap().unwrap();
        let c = BasicCertificate { kind: BasicKind::Line, payload: BasicPayload::Root(r) };
        let f = basic_cs_separator(&t, &c).unwrap();
        assert_eq!(f.len(), 6 + 2 * 6);
        assert!(verify_cs_separator(&t, &f, &Limits::default()).unwrap().ok);
    }

    #[test]
    fn doubled_count() {
        let mut t = Trigraph::cycle(4);
        t.set(0, 1, Theta::Switchable);
        let l = Limits::default();
        let (x, y) = crate::basic::find_good_partition(&t, &l).unwrap().unwrap();
        let c = BasicCertificate { kind: BasicKind::Doubled, payload: BasicPayload::Good(x, y) };
        let f = basic_cs_separator(&t, &c).unwrap();
        assert_eq!(f.len(), 1 + (x.len() + 1) * (y.len() + 1) + 2 * 6);
        assert!(verify_cs_separator(&t, &f, &l).unwrap().ok);
    }

    #[test]
    fn c10_recombination_is_additive_and_verifies() {
        let t = Trigraph::cycle(10);
        let opts = CsBuildOptions {
            decompose: DecomposeOptions { base_threshold: 0, prefer_contraction: true, ..DecomposeOptions::default() },
            verify: true,
        };
        let b = build_cs_separator(&t, &opts).unwrap();
        assert!(b.leaves.len() >= 2);
        assert_eq!(b.leaves.iter().map(|l| l.size).sum::<usize>(), b.separator.len());
        assert_eq!(b.verified, Some(true));
    }

    #[test]
    fn complement_join_recombination_verifies() {
        let t = Trigraph::cycle(10).complement();
        let opts = CsBuildOptions {
            decompose: DecomposeOptions { base_threshold: 0, prefer_contraction: true, ..DecomposeOptions::default() },
            verify: true,
        };
        let b = build_cs_separator(&t, &opts).unwrap();
        assert!(matches!(b.tree, DecompositionTree::Node { split: TwoJoinSplit { kind: JoinKind::Complement, .. }, .. }));
        assert_eq!(b.verified, Some(true));
    }

    #[test]
    fn small_leaf_is_all_cuts() {
        let t = Trigraph::cycle(4);
        let mut leaves = Vec::new();
        let tree = DecompositionTree::Leaf { trigraph: t.clone(), kind: LeafKind::Small };
        let f = separator_from_tree(&tree, 20, &mut leaves).unwrap();
        assert_eq!(f.len(), 16);
    }
}
