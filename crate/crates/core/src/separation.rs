//! Cuts, clique/stable-set separators and their exhaustive verifier.

use std::fmt;

use crate::berge::is_in_class_f;
use crate::cliques::{enumerate_cliques, enumerate_stable_sets};
use crate::error::{cap_check, Error, Result};
use crate::limits::Limits;
use crate::trigraph::{Theta, Trigraph};
use crate::vset::VertexSet;

/// A bipartition of the host's vertices into a clique side and a stable side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cut {
    pub clique_side: VertexSet,
    pub stable_side: VertexSet,
}

impl Cut {
    /// The cut `(b, V \ b)` over `n` vertices.
    pub fn from_clique_side(b: VertexSet, n: usize) -> Cut {
        Cut { clique_side: b, stable_side: VertexSet::full(n) - b }
    }

    pub fn separates(&self, k: VertexSet, s: VertexSet) -> bool {
        k.is_subset(self.clique_side) && s.is_subset(self.stable_side)
    }

    pub fn flip(self) -> Cut {
        Cut { clique_side: self.stable_side, stable_side: self.clique_side }
    }
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cut {} | {}", self.clique_side, self.stable_side)
    }
}

/// `true` iff `c` puts `k` on its clique side and `s` on its stable side.
pub fn separates(c: &Cut, k: VertexSet, s: VertexSet) -> bool {
    c.separates(k, s)
}

/// An ordered family of cuts of a fixed host trigraph. Repeated cuts are
/// kept so that sizes add up exactly under recombination; see [`dedup`].
///
/// [`dedup`]: CsSeparator::dedup
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsSeparator {
    pub n: usize,
    pub fingerprint: u64,
    pub cuts: Vec<Cut>,
}

impl CsSeparator {
    /// Checks that every cut partitions the host's vertex set.
    pub fn new(host: &Trigraph, cuts: Vec<Cut>) -> Result<Self> {
        let all = host.vertices();
        for (i, c) in cuts.iter().enumerate() {
            if !c.clique_side.is_disjoint(c.stable_side) || (c.clique_side | c.stable_side) != all {
                return Err(Error::InvalidStructure(format!(
                    "cut #{i} ({c}) does not partition the {} vertices",
                    host.n()
                )));
            }
        }
        Ok(CsSeparator { n: host.n(), fingerprint: host.fingerprint(), cuts })
    }

    /// All `2^n` cuts, in binary counting order of the clique side.
    pub fn all_cuts(host: &Trigraph, cap: usize) -> Result<Self> {
        cap_check("vertices for the all-cuts family", host.n(), cap)?;
        let n = host.n();
        let cuts = (0..1u128 << n)
            .map(|b| Cut::from_clique_side(VertexSet(b), n))
            .collect();
        Ok(CsSeparator { n, fingerprint: host.fingerprint(), cuts })
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn is_for(&self, host: &Trigraph) -> bool {
        self.n == host.n() && self.fingerprint == host.fingerprint()
    }

    /// The family for the complement host: every `(B, W)` becomes `(W, B)`.
    pub fn flip(&self, complement_host: &Trigraph) -> CsSeparator {
        CsSeparator {
            n: self.n,
            fingerprint: complement_host.fingerprint(),
            cuts: self.cuts.iter().map(|c| c.flip()).collect(),
        }
    }

    /// Removes repeated cuts, keeping first occurrences.
    pub fn dedup(&mut self) {
        let mut seen = std::collections::HashSet::new();
        self.cuts.retain(|c| seen.insert(*c));
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.cuts {
            s.push_str(&c.to_string());
            s.push('\n');
        }
        s
    }

    /// Parses `cut a,b | c,d` lines for `host`; `#` starts a comment.
    pub fn parse(text: &str, host: &Trigraph) -> Result<Self> {
        let mut cuts = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: i + 1, msg };
            let rest = line
                .strip_prefix("cut")
                .ok_or_else(|| perr(format!("expected `cut`, found `{line}`")))?;
            let (b, w) = rest
                .split_once('|')
                .ok_or_else(|| perr("missing `|` between the two sides".into()))?;
            let b = parse_set(b, host.n()).map_err(perr)?;
            let w = parse_set(w, host.n()).map_err(perr)?;
            cuts.push(Cut { clique_side: b, stable_side: w });
        }
        CsSeparator::new(host, cuts)
    }
}

/// Parses a comma-separated vertex list (possibly empty) below `n`.
pub fn parse_set(s: &str, n: usize) -> std::result::Result<VertexSet, String> {
    let mut out = VertexSet::EMPTY;
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let v: usize = tok.parse().map_err(|_| format!("bad vertex `{tok}`"))?;
        if v >= n {
            return Err(format!("vertex {v} out of range (n = {n})"));
        }
        if out.contains(v) {
            return Err(format!("vertex {v} listed twice"));
        }
        out.insert(v);
    }
    Ok(out)
}

/// Outcome of [`verify_cs_separator`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub ok: bool,
    /// Smallest unseparated `(K, S)`: by `|K| + |S|`, then lexicographic.
    pub counterexample: Option<(VertexSet, VertexSet)>,
}

/// Checks every disjoint (clique, stable set) pair, empty sets included.
pub fn verify_cs_separator(t: &Trigraph, f: &CsSeparator, limits: &Limits) -> Result<Verdict> {
    if f.n != t.n() {
        return Err(Error::InvalidInput(format!(
            "separator is over {} vertices, trigraph has {}",
            f.n,
            t.n()
        )));
    }
    let cliques = enumerate_cliques(t, false, limits.cliques)?;
    let stables = enumerate_stable_sets(t, false, limits.cliques)?;
    // Sort key (total size, lex K, lex S) and the pair itself.
    type Ranked = (usize, Vec<usize>, Vec<usize>, VertexSet, VertexSet);
    let mut best: Option<Ranked> = None;
    for &k in &cliques {
        let mut ws: Vec<VertexSet> = f
            .cuts
            .iter()
            .filter(|c| k.is_subset(c.clique_side))
            .map(|c| c.stable_side)
            .collect();
        ws.sort_by_key(|w| std::cmp::Reverse(w.len()));
        ws.dedup();
        for &s in &stables {
            if !s.is_disjoint(k) || ws.iter().any(|&w| s.is_subset(w)) {
                continue;
            }
            let key = (k.len() + s.len(), k.lex_key(), s.lex_key());
            let better = match &best {
                None => true,
                Some((a, b, c, _, _)) => (key.0, &key.1, &key.2) < (*a, b, c),
            };
            if better {
                best = Some((key.0, key.1, key.2, k, s));
            }
        }
    }
    Ok(match best {
        None => Verdict { ok: true, counterexample: None },
        Some((_, _, _, k, s)) => Verdict { ok: false, counterexample: Some((k, s)) },
    })
}

/// The cuts added to a family separating maximal pairs so that it separates
/// all pairs. For each vertex `x` with switchable neighbors `W`, the clique
/// sides are `N_s(x) ∪ D` and `N_s(x) ∪ D ∪ {x}`, `N_s` the strong
/// neighborhood and `D ⊆ W`. When `W = {y, z}`, `D = ∅` is dropped if `yz` is
/// strong and `D = W` if it is strongly anti: neither is ever needed. In the
/// class that gives exactly `2n + 4|sigma|` cuts.
///
/// The plain `N[x]`/`N(x)` cuts with four intersections per switchable
/// pair fall short: with `x` in `K' ∩ S'` but not in `K`, the stable set may
/// hold a switchable neighbor of `x`, which `N(x)` puts on the clique side.
pub fn extension_cuts(t: &Trigraph) -> Vec<Cut> {
    let n = t.n();
    let mut out = Vec::with_capacity(2 * n + 4 * t.num_switchable());
    for x in 0..n {
        let w: Vec<usize> = t.semi_nbrs(x).iter().collect();
        let skip = match w[..] {
            [y, z] if t.theta(y, z) == Theta::Strong => Some(0),
            [y, z] if t.theta(y, z) == Theta::StrongAnti => Some(3),
            _ => None,
        };
        for with_x in [true, false] {
            for mask in 0usize..1 << w.len() {
                if Some(mask) == skip {
                    continue;
                }
                let mut b = t.strong_nbrs(x);
                for (i, &y) in w.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        b = b.with(y);
                    }
                }
                if with_x {
                    b = b.with(x);
                }
                out.push(Cut::from_clique_side(b, n));
            }
        }
    }
    out
}

/// Appends exactly `2n + 4|sigma|` cuts to `f`. Requires membership in the
/// class; that `f` separates maximal pairs is the caller's promise.
pub fn extend_maximal_separator(t: &Trigraph, f: &CsSeparator, limits: &Limits) -> Result<CsSeparator> {
    if !f.is_for(t) {
        return Err(Error::InvalidInput("separator belongs to another trigraph".into()));
    }
    let (ok, why) = is_in_class_f(t, limits)?;
    if !ok {
        return Err(Error::Precondition(why.unwrap_or_default()));
    }
    let mut out = f.clone();
    out.cuts.extend(extension_cuts(t));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;


    fn vs(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn separates_examples() {
        let c = Cut { clique_side: vs(&[0, 1]), stable_side: vs(&[2, 3]) };
        assert!(c.separates(vs(&[0]), vs(&[3])));
        assert!(!c.separates(vs(&[2]), vs(&[3])));
        assert!(c.separates(VertexSet::EMPTY, VertexSet::EMPTY));
    }

    #[test]
    fn single_vertex_examples() {
        let t = Trigraph::new(1).unwrap();
        let l = Limits::default();
        let f = CsSeparator::new(&t, vec![Cut::from_clique_side(vs(&[0]), 1)]).unwrap();
        let v = verify_cs_separator(&t, &f, &l).unwrap();
        assert!(!v.ok);
        assert_eq!(v.counterexample, Some((VertexSet::EMPTY, vs(&[0]))));
        let f = CsSeparator::new(
            &t,
            vec![Cut::from_clique_side(vs(&[0]), 1), Cut::from_clique_side(VertexSet::EMPTY, 1)],
        )
        .unwrap();
        assert!(verify_cs_separator(&t, &f, &l).unwrap().ok);
    }

    #[test]
    fn all_cuts_verify_on_c4() {
        let t = Trigraph::cycle(4);
        let f = CsSeparator::all_cuts(&t, 20).unwrap();
        assert_eq!(f.len(), 16);
        assert!(verify_cs_separator(&t, &f, &Limits::default()).unwrap().ok);
    }

    #[test]
    fn bad_cut_is_rejected() {
        let t = Trigraph::cycle(4);
        let c = Cut { clique_side: vs(&[0]), stable_side: vs(&[1]) };
        assert!(CsSeparator::new(&t, vec![c]).is_err());
    }

    #[test]
    fn extension_of_k2() {
        let t = Trigraph::clique(2);
        let l = Limits::default();
        let f = CsSeparator::new(
            &t,
            vec![Cut::from_clique_side(vs(&[0, 1]), 2), Cut::from_clique_side(vs(&[0]), 2),
                 Cut::from_clique_side(vs(&[1]), 2)],
        )
        .unwrap();
        let e = extend_maximal_separator(&t, &f, &l).unwrap();
        assert_eq!(e.len(), f.len() + 4);
        assert!(verify_cs_separator(&t, &e, &l).unwrap().ok);
    }

    #[test]
    fn extension_handles_a_switchable_neighbor_in_the_stable_set() {
        // 1 - 0 strong, 0 ~ 2 switchable; {1} against {0, 2} needs the cut
        // that leaves out the switchable neighbor of 0.
        let mut t = Trigraph::new(3).unwrap();
        t.set(0, 1, Theta::Strong);
        t.set(0, 2, Theta::Switchable);
        let l = Limits::default();
        let f = CsSeparator::new(&t, vec![Cut::from_clique_side(vs(&[0, 1]), 3), Cut::from_clique_side(vs(&[0, 2]), 3)])
            .unwrap();
        let e = extend_maximal_separator(&t, &f, &l).unwrap();
        assert_eq!(e.len(), f.len() + 2 * 3 + 4);
        assert!(e.cuts.iter().any(|c| c.separates(vs(&[1]), vs(&[0, 2]))));
        assert!(verify_cs_separator(&t, &e, &l).unwrap().ok);
    }

    #[test]
    fn extension_of_switchable_pair() {
        let mut t = Trigraph::new(2).unwrap();
        t.set(0, 1, Theta::Switchable);
        let l = Limits::default();
        let f = CsSeparator::new(
            &t,
            vec![Cut::from_clique_side(vs(&[0, 1]), 2), Cut::from_clique_side(VertexSet::EMPTY, 2)],
        )
        .unwrap();
        assert!(!verify_cs_separator(&t, &f, &l).unwrap().ok);
        let e = extend_maximal_separator(&t, &f, &l).unwrap();
        assert_eq!(e.len(), 2 + 2 * 2 + 4);
        assert!(verify_cs_separator(&t, &e, &l).unwrap().ok);
    }

    #[test]
    fn extension_requires_class() {
        let t = Trigraph::cycle(5);
        let f = CsSeparator::new(&t, vec![]).unwrap();
        assert!(matches!(
            extend_maximal_separator(&t, &f, &Limits::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn text_round_trip() {
        let t = Trigraph::cycle(4);
        let f = CsSeparator::all_cuts(&t, 20).unwrap();
        let g = CsSeparator::parse(&f.to_text(), &t).unwrap();
        assert_eq!(f, g);
        assert!(CsSeparator::parse("cut 0,9 | 1,2,3", &t).is_err());
        assert!(f.to_text().starts_with("cut  | 0,1,2,3\n"));
    }
}
