//! Clique and stable set enumeration (trigraph adjacency: a clique is a set
//! of pairwise adjacent vertices, switchable pairs included).

use crate::error::{cap_check, Result};
use crate::trigraph::Trigraph;
use crate::vset::VertexSet;

/// All cliques (including the empty set and singletons), or only the
/// inclusion-wise maximal ones. Output order is deterministic.
pub fn enumerate_cliques(t: &Trigraph, maximal_only: bool, cap: usize) -> Result<Vec<VertexSet>> {
    cap_check("vertices for clique enumeration", t.n(), cap)?;
    let mut out = Vec::new();
    if maximal_only {
        bron_kerbosch(t, VertexSet::EMPTY, t.vertices(), VertexSet::EMPTY, &mut out);
        out.sort_by_key(|s| s.lex_key());
    } else {
        all_cliques(t, VertexSet::EMPTY, t.vertices(), &mut out);
    }
    Ok(out)
}

/// Stable sets of `t`, i.e. cliques of the complement.
pub fn enumerate_stable_sets(t: &Trigraph, maximal_only: bool, cap: usize) -> Result<Vec<VertexSet>> {
    enumerate_cliques(&t.complement(), maximal_only, cap)
}

fn all_cliques(t: &Trigraph, current: VertexSet, cands: VertexSet, out: &mut Vec<VertexSet>) {
    out.push(current);
    for v in cands.iter() {
        all_cliques(t, current.with(v), cands.above(v) & t.nbrs(v), out);
    }
}

fn bron_kerbosch(t: &Trigraph, r: VertexSet, p: VertexSet, x: VertexSet, out: &mut Vec<VertexSet>) {
    if p.is_empty() {
        if x.is_empty() {
            out.push(r);
        }
        return;
    }
    let pivot = (p | x)
        .iter()
        .max_by_key(|&u| (p & t.nbrs(u)).len())
        .expect("p nonempty");
    let mut p = p;
    let mut x = x;
    for v in (p - t.nbrs(pivot)).iter() {
        let nv = t.nbrs(v);
        bron_kerbosch(t, r.with(v), p & nv, x & nv, out);
        p.remove(v);
        x.insert(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trigraph::Theta;

    #[test]
    fn maximal_cliques_examples() {
        let k3 = Trigraph::clique(3);
        assert_eq!(enumerate_cliques(&k3, true, 20).unwrap(), vec![k3.vertices()]);
        let c4 = Trigraph::cycle(4);
        let m: Vec<_> = enumerate_cliques(&c4, true, 20)
            .unwrap()
            .into_iter()
            .map(|s| s.to_vec())
            .collect();
        assert_eq!(m, vec![vec![0, 1], vec![0, 3], vec![1, 2], vec![2, 3]]);
    }

    #[test]
    fn switchable_pair_is_both_clique_and_stable() {
        let mut t = Trigraph::new(2).unwrap();
        t.set(0, 1, Theta::Switchable);
        let all = enumerate_cliques(&t, false, 20).unwrap();
        assert!(all.contains(&t.vertices()));
        assert_eq!(all.len(), 4);
        assert!(enumerate_stable_sets(&t, false, 20).unwrap().contains(&t.vertices()));
    }

    #[test]
    fn maximal_is_subset_of_all_and_unextendable() {
        let mut t = Trigraph::cycle(7);
        t.set(0, 3, Theta::Strong);
        t.set(2, 5, Theta::Switchable);
        let all = enumerate_cliques(&t, false, 20).unwrap();
        let max = enumerate_cliques(&t, true, 20).unwrap();
        for k in &all {
            assert!(t.is_clique(*k));
        }
        for m in &max {
            assert!(all.contains(m));
            assert!(!all.iter().any(|k| m.is_subset(*k) && k != m));
        }
        for k in &all {
            assert!(max.iter().any(|m| k.is_subset(*m)));
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(enumerate_cliques(&Trigraph::stable(21), false, 20).is_err());
    }
}
