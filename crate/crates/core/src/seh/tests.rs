use super::*;
use crate::basic::{classify_basic, is_line_trigraph, BasicKind, BasicPayload};
use crate::decomposition::split_for_side;

fn set(v: &[usize]) -> VertexSet {
    v.iter().copied().collect()
}

fn c10_split(x1: &[usize], kind: JoinKind) -> (Trigraph, TwoJoinSplit) {
    let t = match kind {
        JoinKind::Direct => Trigraph::cycle(10),
        JoinKind::Complement => Trigraph::cycle(10).complement(),
    };
    let s = split_for_side(&t, set(x1), kind).unwrap().unwrap();
    (t, s)
}

#[test]
fn balance_needs_55_vertices() {
    assert!(is_balanced_weight(&WeightedTrigraph::<u64>::uniform(Trigraph::stable(55), 1)).0);
    let (ok, why) = is_balanced_weight(&WeightedTrigraph::<u64>::uniform(Trigraph::stable(54), 1));
    assert!(!ok);
    assert!(why.unwrap().contains("vertex"));
    assert!(is_balanced_weight(&WeightedTrigraph::<u64>::zero(Trigraph::stable(4))).0);
}

#[test]
fn heavy_extra_weight_is_unbalanced() {
    let mut w = WeightedTrigraph::<u64>::uniform(Trigraph::stable(100), 1);
    w.set_vertex(0, [1, 20, 0]);
    assert!(!is_balanced_weight(&w).0);
    assert!(!w.is_virgin());
}

#[test]
fn virgin_weights_have_no_extra_part() {
    let mut t = Trigraph::path(3);
    t.set(0, 1, Theta::Switchable);
    let mut w = WeightedTrigraph::<u64>::virgin(t, &[1, 1, 1]).unwrap();
    assert!(w.is_virgin());
    w.set_pair(0, 1, [0, 1]).unwrap();
    assert!(!w.is_virgin());
    assert!(w.set_pair(1, 2, [1, 0]).is_err());
    assert!(WeightedTrigraph::<u64>::virgin(Trigraph::path(3), &[1, 1]).is_err());
    assert!(WeightedTrigraph::<u64>::virgin(Trigraph::path(3), &[1, 2, 3]).unwrap().is_virgin());
}

#[test]
fn even_contraction_moves_c2_into_marker_c() {
    let (t, s) = c10_split(&[0, 1, 2, 3, 4], JoinKind::Direct);
    assert_eq!(s.parity, Parity::Even);
    assert_eq!((s.a2, s.b2, s.c2), (set(&[9]), set(&[5]), set(&[6, 7, 8])));
    let w = WeightedTrigraph::<u64>::uniform(t, 1);
    let k = contract_two_join_side(&w, &s, 1).unwrap();
    let m = k.block.markers;
    assert_eq!(k.weighted.vertex(m.c.unwrap()), [3, 0, 0]);
    assert_eq!(k.weighted.vertex(m.a), [1, 0, 0]);
    assert_eq!(k.weighted.total(), 10);
    let beta = compose_partition_map(&PartitionMap::identity(10), &s, &k.block);
    assert_eq!(beta.vertex[m.c.unwrap()][REAL], set(&[6, 7, 8]));
    verify_model(&w, &k.weighted, &beta).unwrap();
}

#[test]
fn odd_direct_contraction_is_anticomplete_extra() {
    let (t, s) = c10_split(&[0, 1, 2, 3], JoinKind::Direct);
    assert_eq!(s.parity, Parity::Odd);
    assert_eq!(s.c2, set(&[5, 6, 7, 8]));
    let w = WeightedTrigraph::<u64>::virgin(t, &[5, 5, 5, 5, 1, 1, 1, 1, 0, 1]).unwrap();
    let k = contract_two_join_side(&w, &s, 1).unwrap();
    let m = k.block.markers;
    assert_eq!(k.weighted.pair(m.a, m.b), [0, 3]);
    let beta = compose_partition_map(&PartitionMap::identity(10), &s, &k.block);
    assert_eq!(beta.pair(m.a, m.b), [VertexSet::EMPTY, set(&[5, 6, 7, 8])]);
    verify_model(&w, &k.weighted, &beta).unwrap();
}

#[test]
fn odd_complement_contraction_is_complete_extra() {
    let (t, s) = c10_split(&[0, 1, 2, 3], JoinKind::Complement);
    let w = WeightedTrigraph::<u64>::virgin(t, &[5, 5, 5, 5, 1, 1, 1, 1, 0, 1]).unwrap();
    let k = contract_two_join_side(&w, &s, 1).unwrap();
    let m = k.block.markers;
    assert_eq!(k.weighted.pair(m.a, m.b), [3, 0]);
    let beta = compose_partition_map(&PartitionMap::identity(10), &s, &k.block);
    verify_model(&w, &k.weighted, &beta).unwrap();
}

#[test]
fn contraction_keeps_the_heavier_side() {
    let (t, s) = c10_split(&[0, 1, 2, 3], JoinKind::Direct);
    let w = WeightedTrigraph::<u64>::virgin(t, &[1, 1, 1, 1, 9, 9, 9, 9, 9, 9]).unwrap();
    assert_eq!(contract_two_join(&w, &s).unwrap().side, 2);
}

#[test]
fn identity_model_holds_and_mutations_fail() {
    let w = WeightedTrigraph::<u64>::uniform(Trigraph::cycle(10), 1);
    let beta = PartitionMap::identity(10);
    verify_model(&w, &w, &beta).unwrap();

    let mut heavy = w.clone();
    heavy.set_vertex(0, [2, 0, 0]);
    assert_eq!(verify_model(&w, &heavy, &beta).unwrap_err().condition, ModelCondition::Weight);

    let mut swapped = beta.clone();
    swapped.vertex.swap(0, 5);
    assert_eq!(verify_model(&w, &w, &swapped).unwrap_err().condition, ModelCondition::StrongAdjacency);

    let mut overlap = beta;
    overlap.vertex[1][REAL] = set(&[0, 1]);
    assert_eq!(verify_model(&w, &w, &overlap).unwrap_err().condition, ModelCondition::Partition);
}

#[test]
fn bipartite_case_splits_heavier_side_evenly() {
    let t = Trigraph::cycle(96);
    let cert = classify_basic(&t, &Limits::default()).unwrap();
    assert_eq!(cert.kind, BasicKind::Bipartite);
    let w = WeightedTrigraph::<u64>::uniform(t.clone(), 1);
    let b = basic_biclique(&w, &cert).unwrap();
    assert_eq!(b.kind, BicliqueKind::Anticomplete);
    assert_eq!((b.x.len(), b.y.len(), b.weight), (24, 24, 24));
    assert!(biclique_violation(&t, &b).is_none());
}

#[test]
fn line_case_uses_the_multigraph_split() {
    let t = Trigraph::cycle(56);
    let root = is_line_trigraph(&t, &Limits::default()).unwrap().unwrap();
    let cert = BasicCertificate { kind: BasicKind::Line, payload: BasicPayload::Root(root) };
    let w = WeightedTrigraph::<u64>::uniform(t.clone(), 1);
    let b = basic_biclique(&w, &cert).unwrap();
    assert_eq!(b.kind, BicliqueKind::Anticomplete);
    assert!(55 * b.weight >= 56);
    assert!(biclique_violation(&t, &b).is_none());
}

#[test]
fn doubled_case_splits_a_heavy_clique() {
    let n = 112;
    let mut t = Trigraph::clique(n);
    for i in 0..n / 2 {
        t.set(2 * i, 2 * i + 1, Theta::StrongAnti);
    }
    let real: Vec<u64> = (0..n).map(|v| (v % 2 == 0) as u64).collect();
    let w = WeightedTrigraph::virgin(t.clone(), &real).unwrap();
    let cert = BasicCertificate { kind: BasicKind::Doubled, payload: BasicPayload::Good(VertexSet::EMPTY, t.vertices()) };
    let b = basic_biclique(&w, &cert).unwrap();
    assert_eq!(b.kind, BicliqueKind::Complete);
    assert_eq!(b.weight, 28);
    assert!(biclique_violation(&t, &b).is_none());
}

#[test]
fn basic_input_needs_no_contraction() {
    let w = WeightedTrigraph::<u64>::uniform(Trigraph::cycle(60), 1);
    let opts = ExtractOptions { precondition: PreconditionMode::Assume, ..ExtractOptions::default() };
    let e = extract_biclique(&w, &opts).unwrap();
    assert_eq!(e.contractions(), 0);
    assert_eq!(e.biclique.weight, 15);
    assert!(e.report().contains("basic bipartite"));
}

#[test]
fn unbalanced_or_non_virgin_input_is_refused() {
    let opts = ExtractOptions::default();
    let w = WeightedTrigraph::<u64>::uniform(Trigraph::cycle(10), 1);
    assert!(matches!(extract_biclique(&w, &opts), Err(Error::Precondition(_))));
    let mut w = WeightedTrigraph::<u64>::uniform(Trigraph::cycle(60), 1);
    w.set_vertex(0, [1, 1, 0]);
    assert!(matches!(extract_biclique(&w, &opts), Err(Error::Precondition(_))));
}

#[test]
fn zero_weight_gives_empty_certificate() {
    let w = WeightedTrigraph::<u64>::zero(Trigraph::cycle(6));
    let e = extract_biclique(&w, &ExtractOptions::default()).unwrap();
    assert_eq!(e.biclique.weight, 0);
    assert!(e.biclique.x.is_empty());
}

#[test]
fn small_unweighted_inputs_use_a_strong_pair() {
    let e = extract_biclique_unweighted(&Trigraph::cycle(6), &ExtractOptions::default()).unwrap();
    assert_eq!(e.biclique, Biclique::unweighted(BicliqueKind::Complete, set(&[0]), set(&[1])));
    let e = extract_biclique_unweighted(&Trigraph::path(3), &ExtractOptions::default()).unwrap();
    assert_eq!(e.biclique.x.len().min(e.biclique.y.len()), 1);
    assert!(matches!(
        extract_biclique_unweighted(&Trigraph::path(2), &ExtractOptions::default()),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn biclique_text_round_trips() {
    let b = Biclique::unweighted(BicliqueKind::Anticomplete, set(&[0, 2]), set(&[4]));
    let back = Biclique::parse(&b.to_text(), 6).unwrap();
    assert_eq!(back.kind, b.kind);
    assert_eq!((back.x, back.y), (b.x, b.y));
}
