use std::collections::BTreeSet;

use proptest::prelude::*;

use trigraph_sep::berge::is_in_class_f;
use trigraph_sep::cliques::enumerate_cliques;
use trigraph_sep::cs_builder::{build_cs_separator, CsBuildOptions};
use trigraph_sep::decomposition::find_balanced_skew_partition;
use trigraph_sep::format::Document;
use trigraph_sep::seh::multigraph::{bipartite_multigraph_split, Multigraph, SplitMode};
use trigraph_sep::separation::{extend_maximal_separator, verify_cs_separator, CsSeparator, Cut};
use trigraph_sep::{Limits, Theta, Trigraph, VertexSet};

/// A trigraph on `1..=max_n` vertices from a list of pair values.
fn trigraph(max_n: usize) -> impl Strategy<Value = Trigraph> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(prop_oneof![3 => Just(-1i8), 3 => Just(1i8), 1 => Just(0i8)], n * (n - 1) / 2).prop_map(
            move |vals| {
                let mut t = Trigraph::new(n).unwrap();
                let mut it = vals.into_iter();
                for u in 0..n {
                    for v in u + 1..n {
                        t.set(u, v, Theta::from_value(it.next().unwrap()).unwrap());
                    }
                }
                t
            },
        )
    })
}

fn vset() -> impl Strategy<Value = BTreeSet<usize>> {
    prop::collection::btree_set(0usize..128, 0..20)
}

proptest! {
    #[test]
    fn document_round_trips(t in trigraph(12)) {
        let text = Document::plain(t.clone()).to_text();
        let back = Document::parse(&text).unwrap();
        prop_assert_eq!(back.trigraph, t);
    }

    #[test]
    fn complement_is_an_involution(t in trigraph(12)) {
        let c = t.complement();
        prop_assert_eq!(c.complement(), t.clone());
        prop_assert_eq!(c.num_switchable(), t.num_switchable());
        for u in 0..t.n() {
            for v in u + 1..t.n() {
                prop_assert_eq!(c.theta(u, v), t.theta(u, v).negate());
            }
        }
    }

    #[test]
    fn vertex_set_matches_a_btree_set(a in vset(), b in vset()) {
        let (x, y): (VertexSet, VertexSet) = (a.iter().copied().collect(), b.iter().copied().collect());
        prop_assert_eq!(x.len(), a.len());
        prop_assert_eq!(x.is_subset(y), a.is_subset(&b));
        prop_assert_eq!(x.is_disjoint(y), a.is_disjoint(&b));
        prop_assert_eq!((x | y).to_vec(), a.union(&b).copied().collect::<Vec<_>>());
        prop_assert_eq!((x & y).to_vec(), a.intersection(&b).copied().collect::<Vec<_>>());
        prop_assert_eq!((x - y).to_vec(), a.difference(&b).copied().collect::<Vec<_>>());
        prop_assert_eq!(x.first(), a.iter().next().copied());
    }

    #[test]
    fn separator_text_round_trips(t in trigraph(8), sides in prop::collection::vec(any::<u8>(), 0..12)) {
        let n = t.n();
        let cuts: Vec<Cut> = sides.iter().map(|&b| Cut::from_clique_side(VertexSet(b as u128) & VertexSet::full(n), n)).collect();
        let f = CsSeparator::new(&t, cuts).unwrap();
        prop_assert_eq!(CsSeparator::parse(&f.to_text(), &t).unwrap(), f);
    }

    #[test]
    fn extension_count_and_soundness(t in trigraph(8)) {
        let l = Limits::default();
        if is_in_class_f(&t, &l).unwrap().0 {
            // Maximal-clique cuts separate every maximal pair; the extension
            // must do the rest.
            let cuts = enumerate_cliques(&t, true, 20).unwrap().into_iter().map(|k| Cut::from_clique_side(k, t.n()));
            let f = CsSeparator::new(&t, cuts.collect()).unwrap();
            let e = extend_maximal_separator(&t, &f, &l).unwrap();
            prop_assert_eq!(e.len(), f.len() + 2 * t.n() + 4 * t.num_switchable());
            prop_assert!(verify_cs_separator(&t, &e, &l).unwrap().ok);
        }
    }

    #[test]
    fn built_separators_verify(t in trigraph(9)) {
        let l = Limits::default();
        if is_in_class_f(&t, &l).unwrap().0 && find_balanced_skew_partition(&t, &l).unwrap().is_none() {
            let b = build_cs_separator(&t, &CsBuildOptions { verify: true, ..CsBuildOptions::default() }).unwrap();
            prop_assert_eq!(b.verified, Some(true));
            prop_assert_eq!(b.leaves.iter().map(|l| l.size).sum::<usize>(), b.separator.len());
        }
    }

    #[test]
    fn edge_split_meets_its_guarantee(
        edges in prop::collection::vec((0usize..6, 6usize..12, 1u64..4), 1..30),
    ) {
        let g = Multigraph::new(12, edges).unwrap();
        if 3 * g.max_degree() < g.m() {
            let s = bipartite_multigraph_split(&g, SplitMode::Derandomized).unwrap();
            prop_assert!(48 * g.count(&s.e1) >= g.m() && 48 * g.count(&s.e2) >= g.m());
            prop_assert!(8 * s.score >= g.gamma());
            for &i in &s.e1 {
                for &j in &s.e2 {
                    let (a, b, _) = g.edges[i];
                    let (c, d, _) = g.edges[j];
                    prop_assert!(a != c && a != d && b != c && b != d);
                }
            }
        }
    }
}
