//! Odd hole / odd antihole search and membership in the class of Berge
//! trigraphs with small switchable components.

use crate::error::{cap_check, Result};
use crate::limits::Limits;
use crate::trigraph::{Theta, Trigraph};
use crate::vset::VertexSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OddWitness {
    /// Vertex sequence of an odd hole in `T`.
    Hole(Vec<usize>),
    /// Vertex sequence of an odd hole in the complement of `T`.
    Antihole(Vec<usize>),
}

impl OddWitness {
    pub fn vertices(&self) -> &[usize] {
        match self {
            OddWitness::Hole(v) | OddWitness::Antihole(v) => v,
        }
    }
}

/// Finds an odd hole (length >= 5) using trigraph adjacency: consecutive
/// vertices adjacent (`theta >= 0`), others antiadjacent (`theta <= 0`).
///
/// Sequences are grown from their smallest vertex; a switchable chord lets a
/// path both continue and close.
pub fn find_odd_hole(t: &Trigraph) -> Option<Vec<usize>> {
    let n = t.n();
    let all = t.vertices();
    for first in 0..n {
        let allowed = all.above(first);
        for second in (t.nbrs(first) & allowed).iter() {
            let mut path = vec![first, second];
            let forbid = VertexSet::singleton(first).with(second);
            if let Some(h) = grow(t, &mut path, forbid, allowed) {
                return Some(h);
            }
        }
    }
    None
}

fn grow(t: &Trigraph, path: &mut Vec<usize>, forbid: VertexSet, allowed: VertexSet) -> Option<Vec<usize>> {
    let first = path[0];
    let last = *path.last().unwrap();
    let len = path.len();
    let cands = t.nbrs(last) & (allowed - forbid);
    for v in cands.iter() {
        let closes = t.adjacent(first, v);
        let continues = t.antiadjacent(first, v);
        if closes && len + 1 >= 5 && (len + 1) % 2 == 1 && v > path[1] {
            let mut h = path.clone();
            h.push(v);
            return Some(h);
        }
        if continues && len + 1 < t.n() {
            // `last` becomes interior: its strong neighbors may no longer join.
            let next_forbid = forbid.with(v) | t.strong_nbrs(last);
            path.push(v);
            let r = grow(t, path, next_forbid, allowed);
            path.pop();
            if r.is_some() {
                return r;
            }
        }
    }
    None
}

/// Berge check by exhaustive hole search in `T` and its complement.
pub fn is_berge(t: &Trigraph, limits: &Limits) -> Result<(bool, Option<OddWitness>)> {
    cap_check("vertices for Berge check", t.n(), limits.berge)?;
    if let Some(h) = find_odd_hole(t) {
        return Ok((false, Some(OddWitness::Hole(h))));
    }
    if let Some(h) = find_odd_hole(&t.complement()) {
        return Ok((false, Some(OddWitness::Antihole(h))));
    }
    Ok((true, None))
}

/// Checks that `seq` is an odd hole of `t` under trigraph adjacency.
pub fn is_odd_hole(t: &Trigraph, seq: &[usize]) -> bool {
    let k = seq.len();
    if k < 5 || k.is_multiple_of(2) {
        return false;
    }
    let set: VertexSet = seq.iter().copied().collect();
    if set.len() != k {
        return false;
    }
    for i in 0..k {
        for j in i + 1..k {
            let d = j - i;
            let ok = if d == 1 || d == k - 1 {
                t.adjacent(seq[i], seq[j])
            } else {
                t.antiadjacent(seq[i], seq[j])
            };
            if !ok {
                return false;
            }
        }
    }
    true
}

/// The switchable-structure conditions of the class (everything except
/// Bergeness). Returns a description of the first violation.
pub fn switchable_structure_violation(t: &Trigraph) -> Option<String> {
    for (comp, edges) in t.switchable_components() {
        if edges > 2 {
            return Some(format!(
                "switchable component {comp:?} has {edges} switchable pairs (at most 2 allowed)"
            ));
        }
    }
    for v in 0..t.n() {
        let s = t.semi_nbrs(v);
        if s.len() != 2 {
            continue;
        }
        let xs = s.to_vec();
        let (x, y) = (xs[0], xs[1]);
        let rest = t.vertices() - s - VertexSet::singleton(v);
        let complete = rest.is_subset(t.strong_nbrs(v)) && t.theta(x, y) == Theta::Strong;
        let anticomplete = rest.is_disjoint(t.nbrs(v)) && t.theta(x, y) == Theta::StrongAnti;
        if !complete && !anticomplete {
            return Some(format!(
                "vertex {v} has switchable partners {x},{y} but is neither strongly complete \
                 (with {x}{y} strong) nor strongly anticomplete (with {x}{y} a strong antiedge) to the rest"
            ));
        }
    }
    None
}

/// Membership in the class: Berge, switchable components with at most two
/// pairs, and the completeness alternative at switchable-degree-2 vertices.
pub fn is_in_class_f(t: &Trigraph, limits: &Limits) -> Result<(bool, Option<String>)> {
    if let Some(v) = switchable_structure_violation(t) {
        return Ok((false, Some(v)));
    }
    let (berge, w) = is_berge(t, limits)?;
    if !berge {
        return Ok((false, Some(format!("not Berge: {w:?}"))));
    }
    Ok((true, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c5_is_not_berge() {
        let (b, w) = is_berge(&Trigraph::cycle(5), &Limits::default()).unwrap();
        assert!(!b);
        let w = w.unwrap();
        assert!(matches!(w, OddWitness::Hole(_)));
        assert!(is_odd_hole(&Trigraph::cycle(5), w.vertices()));
    }

    #[test]
    fn c7_complement_has_antihole() {
        let t = Trigraph::cycle(7).complement();
        let (b, w) = is_berge(&t, &Limits::default()).unwrap();
        assert!(!b);
        assert!(matches!(w, Some(OddWitness::Antihole(_))));
    }

    #[test]
    fn even_cycles_and_switchable_c6_are_berge() {
        for n in [4, 6, 8, 10] {
            assert!(is_berge(&Trigraph::cycle(n), &Limits::default()).unwrap().0);
        }
        let mut t = Trigraph::cycle(6);
        t.set(0, 1, Theta::Switchable);
        assert!(is_berge(&t, &Limits::default()).unwrap().0);
        for r in t.realizations(20).unwrap() {
            assert!(is_berge(&r, &Limits::default()).unwrap().0);
        }
    }

    #[test]
    fn switchable_chord_creates_odd_hole() {
        // Realizing the chord 0~2 as an edge gives the 5-hole 0-2-3-4-5.
        let mut t = Trigraph::cycle(6);
        t.set(0, 2, Theta::Switchable);
        let (b, w) = is_berge(&t, &Limits::default()).unwrap();
        assert!(!b);
        assert!(is_odd_hole(&t, w.unwrap().vertices()));
    }

    #[test]
    fn tiny_trigraphs_are_berge() {
        for n in 0..4 {
            assert!(is_berge(&Trigraph::clique(n), &Limits::default()).unwrap().0);
        }
    }

    #[test]
    fn berge_cap() {
        let l = Limits { berge: 5, ..Limits::default() };
        assert!(is_berge(&Trigraph::cycle(6), &l).is_err());
    }

    #[test]
    fn class_f_examples() {
        let l = Limits::default();
        assert!(is_in_class_f(&Trigraph::cycle(6), &l).unwrap().0);
        let mut tri = Trigraph::new(3).unwrap();
        tri.set(0, 1, Theta::Switchable);
        tri.set(1, 2, Theta::Switchable);
        tri.set(0, 2, Theta::Switchable);
        assert!(!is_in_class_f(&tri, &l).unwrap().0);
        // Even block shape: a - c - b switchable path, c anticomplete to the rest.
        // C8 with 0~1~2 switchable: vertex 1 has partners 0 and 2, theta(0,2) = -1.
        let mut blk = Trigraph::cycle(8);
        blk.set(0, 1, Theta::Switchable);
        blk.set(1, 2, Theta::Switchable);
        assert!(is_in_class_f(&blk, &l).unwrap().0);
        // Degree-2 vertex whose partners are strongly adjacent while it is anticomplete.
        let mut bad = Trigraph::new(4).unwrap();
        bad.set(0, 1, Theta::Switchable);
        bad.set(1, 2, Theta::Switchable);
        bad.set(0, 2, Theta::Strong);
        assert!(!is_in_class_f(&bad, &l).unwrap().0);
    }
}
