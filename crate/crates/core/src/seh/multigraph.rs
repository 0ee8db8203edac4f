//! Splitting the edges of a bipartite multigraph into two large sets with no
//! common endpoint.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Edges carry a multiplicity; `m` counts copies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multigraph {
    pub n: usize,
    pub edges: Vec<(usize, usize, u64)>,
}

impl Multigraph {
    pub fn new(n: usize, edges: Vec<(usize, usize, u64)>) -> Result<Self> {
        for &(u, v, _) in &edges {
            if u >= n || v >= n || u == v {
                return Err(Error::InvalidInput(format!("bad multigraph edge {u}-{v} (n = {n})")));
            }
        }
        Ok(Multigraph { n, edges })
    }

    pub fn m(&self) -> u128 {
        self.edges.iter().map(|e| e.2 as u128).sum()
    }

    pub fn degrees(&self) -> Vec<u128> {
        let mut d = vec![0u128; self.n];
        for &(u, v, k) in &self.edges {
            d[u] += k as u128;
            d[v] += k as u128;
        }
        d
    }

    pub fn max_degree(&self) -> u128 {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Copies in the listed edges.
    pub fn count(&self, ids: &[usize]) -> u128 {
        ids.iter().map(|&i| self.edges[i].2 as u128).sum()
    }

    fn disjoint(&self, i: usize, j: usize) -> bool {
        let (a, b, _) = self.edges[i];
        let (c, d, _) = self.edges[j];
        a != c && a != d && b != c && b != d
    }

    /// Unordered pairs of edge copies with no common endpoint.
    pub fn gamma(&self) -> u128 {
        let mut g = 0u128;
        for i in 0..self.edges.len() {
            for j in i + 1..self.edges.len() {
                if self.disjoint(i, j) {
                    g += self.edges[i].2 as u128 * self.edges[j].2 as u128;
                }
            }
        }
        g
    }

    /// `|E ∩ U²| · |E ∩ U'²|`, with `side[v]` true for `U`.
    pub fn score(&self, side: &[bool]) -> u128 {
        let (e1, e2) = self.inside(side);
        self.count(&e1) * self.count(&e2)
    }

    fn inside(&self, side: &[bool]) -> (Vec<usize>, Vec<usize>) {
        let mut e1 = Vec::new();
        let mut e2 = Vec::new();
        for (i, &(u, v, _)) in self.edges.iter().enumerate() {
            match (side[u], side[v]) {
                (true, true) => e1.push(i),
                (false, false) => e2.push(i),
                _ => {}
            }
        }
        (e1, e2)
    }

    fn is_bipartite(&self) -> bool {
        let mut color: Vec<Option<bool>> = vec![None; self.n];
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v, _) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for s in 0..self.n {
            if color[s].is_some() {
                continue;
            }
            color[s] = Some(false);
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    match color[v] {
                        None => {
                            color[v] = Some(!color[u].unwrap());
                            stack.push(v);
                        }
                        Some(c) if Some(c) == color[u] => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }

    /// Sixteen times the expected score when the vertices with `None` are
    /// placed uniformly at random.
    fn expected_score16(&self, assign: &[Option<bool>]) -> u128 {
        let p4 = |e: usize, want: bool| -> u128 {
            let (u, v, _) = self.edges[e];
            let f = |x: usize| match assign[x] {
                Some(s) if s == want => 2,
                Some(_) => 0,
                None => 1,
            };
            f(u) * f(v)
        };
        let mut total = 0u128;
        for i in 0..self.edges.len() {
            let pi = p4(i, true);
            if pi == 0 {
                continue;
            }
            for j in 0..self.edges.len() {
                if i != j && self.disjoint(i, j) {
                    total += self.edges[i].2 as u128 * self.edges[j].2 as u128 * pi * p4(j, false);
                }
            }
        }
        total
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitMode {
    /// Conditional expectations, vertices in index order, ties to `U`.
    Derandomized,
    /// Uniform random bipartitions until one qualifies.
    Randomized { seed: u64, attempts: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSplit {
    /// `true` for vertices in `U`.
    pub side: Vec<bool>,
    /// Edge indices inside `U` and inside `U'`.
    pub e1: Vec<usize>,
    pub e2: Vec<usize>,
    pub score: u128,
}

/// Two edge sets, each with at least `m/48` copies, sharing no endpoint.
/// Requires `3 · Δ < m`.
pub fn bipartite_multigraph_split(g: &Multigraph, mode: SplitMode) -> Result<EdgeSplit> {
    let m = g.m();
    if m == 0 {
        return Err(Error::Precondition("multigraph has no edges".into()));
    }
    let delta = g.max_degree();
    if 3 * delta >= m {
        return Err(Error::Precondition(format!("maximum degree {delta} is not below m/3 (m = {m})")));
    }
    if !g.is_bipartite() {
        return Err(Error::InvalidInput("multigraph is not bipartite".into()));
    }
    let good = |side: &[bool]| {
        let (e1, e2) = g.inside(side);
        48 * g.count(&e1) >= m && 48 * g.count(&e2) >= m
    };
    let side = match mode {
        SplitMode::Derandomized => {
            let mut assign: Vec<Option<bool>> = vec![None; g.n];
            for v in 0..g.n {
                assign[v] = Some(true);
                let in_u = g.expected_score16(&assign);
                assign[v] = Some(false);
                let in_u2 = g.expected_score16(&assign);
                assign[v] = Some(in_u >= in_u2);
            }
            let side: Vec<bool> = assign.into_iter().map(|a| a.unwrap()).collect();
            if !good(&side) {
                return Err(Error::Verification("derandomized edge split is below m/48".into()));
            }
            side
        }
        SplitMode::Randomized { seed, attempts } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut found = None;
            for _ in 0..attempts {
                let side: Vec<bool> = (0..g.n).map(|_| rng.gen()).collect();
                if good(&side) {
                    found = Some(side);
                    break;
                }
            }
            found.ok_or_else(|| Error::Verification(format!("no qualifying random bipartition in {attempts} attempts")))?
        }
    };
    let (e1, e2) = g.inside(&side);
    let score = g.count(&e1) * g.count(&e2);
    Ok(EdgeSplit { side, e1, e2, score })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Multigraph {
        Multigraph::new(n, (0..n).map(|i| (i, (i + 1) % n, 1)).collect()).unwrap()
    }

    #[test]
    fn c8_splits() {
        let g = cycle(8);
        let s = bipartite_multigraph_split(&g, SplitMode::Derandomized).unwrap();
        assert!(!s.e1.is_empty() && !s.e2.is_empty());
        assert!(8 * s.score >= g.gamma());
    }

    #[test]
    fn star_is_rejected() {
        let g = Multigraph::new(5, (1..5).map(|i| (0, i, 1)).collect()).unwrap();
        assert!(matches!(bipartite_multigraph_split(&g, SplitMode::Derandomized), Err(Error::Precondition(_))));
    }

    #[test]
    fn matching_splits_evenly() {
        let g = Multigraph::new(12, (0..6).map(|i| (2 * i, 2 * i + 1, 1)).collect()).unwrap();
        let s = bipartite_multigraph_split(&g, SplitMode::Derandomized).unwrap();
        assert_eq!((s.e1.len(), s.e2.len()), (3, 3));
    }

    #[test]
    fn odd_cycle_is_not_bipartite() {
        let g = cycle(9);
        assert!(matches!(bipartite_multigraph_split(&g, SplitMode::Derandomized), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn randomized_mode_agrees_on_guarantee() {
        let g = cycle(10);
        let s = bipartite_multigraph_split(&g, SplitMode::Randomized { seed: 7, attempts: 1000 }).unwrap();
        assert!(48 * g.count(&s.e1) >= g.m() && 48 * g.count(&s.e2) >= g.m());
    }
}
