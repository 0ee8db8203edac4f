//! Line-based text format for trigraphs, weights and decomposition hints.
//!
//! ```text
//! trigraph v1
//! n 4
//! theta 0 1 1
//! theta 1 2 0
//! weight 0 3 0 0
//! pairweight 1 2 0 1
//! hint 0,1,2
//! ```
//!
//! Unlisted pairs are strongly antiadjacent. `weight` and `pairweight`
//! lines are optional; once one is present, unlisted vertices weigh zero.
//! `#` starts a comment.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::separation::parse_set;
use crate::seh::WeightedTrigraph64;
use crate::trigraph::{Theta, Trigraph};
use crate::vset::VertexSet;

/// A parsed trigraph file.
#[derive(Clone, Debug)]
pub struct Document {
    pub trigraph: Trigraph,
    /// Present when the file has at least one weight line.
    pub weights: Option<WeightedTrigraph64>,
    /// 2-join sides to try first during decomposition.
    pub hints: Vec<VertexSet>,
}

impl Document {
    pub fn plain(t: Trigraph) -> Self {
        Document { trigraph: t, weights: None, hints: Vec::new() }
    }

    pub fn to_text(&self) -> String {
        let t = &self.trigraph;
        let mut s = String::from("trigraph v1\n");
        let _ = writeln!(s, "n {}", t.n());
        for u in 0..t.n() {
            for v in u + 1..t.n() {
                let th = t.theta(u, v);
                if th != Theta::StrongAnti {
                    let _ = writeln!(s, "theta {u} {v} {}", th.value());
                }
            }
        }
        if let Some(w) = &self.weights {
            for v in 0..t.n() {
                let [r, c, ac] = w.vertex(v);
                let _ = writeln!(s, "weight {v} {r} {c} {ac}");
            }
            for ((u, v), [c, ac]) in w.weighted_pairs() {
                let _ = writeln!(s, "pairweight {u} {v} {c} {ac}");
            }
        }
        for h in &self.hints {
            let _ = writeln!(s, "hint {h}");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, raw)| (i + 1, raw.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        match lines.next() {
            Some((_, "trigraph v1")) => {}
            Some((i, other)) => return Err(perr(i, format!("expected `trigraph v1`, found `{other}`"))),
            None => return Err(perr(1, "empty input".into())),
        }
        let (i, nline) = lines.next().ok_or_else(|| perr(1, "missing `n` line".into()))?;
        let n: usize = nline
            .strip_prefix("n ")
            .and_then(|x| x.trim().parse().ok())
            .ok_or_else(|| perr(i, format!("expected `n <N>`, found `{nline}`")))?;
        let mut t = Trigraph::new(n).map_err(|e| perr(i, e.to_string()))?;
        let mut seen = HashSet::new();
        let mut vertex_w: Vec<(usize, usize, [u64; 3])> = Vec::new();
        let mut pair_w: Vec<(usize, usize, usize, [u64; 2])> = Vec::new();
        let mut hints = Vec::new();
        for (i, line) in lines {
            let mut it = line.split_whitespace();
            let head = it.next().unwrap_or("");
            if head == "hint" {
                let rest = line["hint".len()..].trim();
                hints.push(parse_set(rest, n).map_err(|m| perr(i, m))?);
                continue;
            }
            let args: Vec<&str> = it.collect();
            let nums = |count: usize| -> Result<Vec<i64>> {
                if args.len() != count {
                    return Err(perr(i, format!("`{head}` takes {count} arguments, found {}", args.len())));
                }
                args.iter()
                    .map(|a| a.parse::<i64>().map_err(|_| perr(i, format!("bad number `{a}`"))))
                    .collect()
            };
            let vertex = |x: i64| -> Result<usize> {
                usize::try_from(x)
                    .ok()
                    .filter(|&v| v < n)
                    .ok_or_else(|| perr(i, format!("vertex {x} out of range (n = {n})")))
            };
            let weight = |x: i64| -> Result<u64> { u64::try_from(x).map_err(|_| perr(i, format!("negative weight {x}"))) };
            match head {
                "theta" => {
                    let a = nums(3)?;
                    let (u, v) = (vertex(a[0])?, vertex(a[1])?);
                    if u >= v {
                        return Err(perr(i, format!("theta needs u < v, got {u} {v}")));
                    }
                    if !seen.insert((u, v)) {
                        return Err(perr(i, format!("duplicate theta for {u} {v}")));
                    }
                    let th = i8::try_from(a[2])
                        .ok()
                        .and_then(Theta::from_value)
                        .ok_or_else(|| perr(i, format!("theta value {} is not -1, 0 or 1", a[2])))?;
                    t.set(u, v, th);
                }
                "weight" => {
                    let a = nums(4)?;
                    vertex_w.push((i, vertex(a[0])?, [weight(a[1])?, weight(a[2])?, weight(a[3])?]));
                }
                "pairweight" => {
                    let a = nums(4)?;
                    pair_w.push((i, vertex(a[0])?, vertex(a[1])?, [weight(a[2])?, weight(a[3])?]));
                }
                _ => return Err(perr(i, format!("unknown line `{line}`"))),
            }
        }
        let weights = if vertex_w.is_empty() && pair_w.is_empty() {
            None
        } else {
            let mut w = WeightedTrigraph64::zero(t.clone());
            let mut done = HashSet::new();
            for (i, v, x) in vertex_w {
                if !done.insert(v) {
                    return Err(perr(i, format!("duplicate weight for vertex {v}")));
                }
                w.set_vertex(v, x);
            }
            for (i, u, v, x) in pair_w {
                if w.pair(u, v) != [0, 0] {
                    return Err(perr(i, format!("duplicate pairweight for {u} {v}")));
                }
                w.set_pair(u, v, x).map_err(|e| perr(i, e.to_string()))?;
            }
            Some(w)
        };
        Ok(Document { trigraph: t, weights, hints })
    }
}

pub fn trigraph_to_text(t: &Trigraph) -> String {
    Document::plain(t.clone()).to_text()
}

pub fn parse_trigraph(text: &str) -> Result<Trigraph> {
    Document::parse(text).map(|d| d.trigraph)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut t = Trigraph::cycle(5);
        t.set(0, 2, Theta::Switchable);
        let mut w = WeightedTrigraph64::uniform(t.clone(), 2);
        w.set_pair(0, 2, [1, 4]).unwrap();
        let d = Document { trigraph: t.clone(), weights: Some(w), hints: vec![[0, 1].into_iter().collect()] };
        let back = Document::parse(&d.to_text()).unwrap();
        assert_eq!(back.trigraph, t);
        assert_eq!(back.weights.unwrap().pair(2, 0), [1, 4]);
        assert_eq!(back.hints, d.hints);
        assert_eq!(parse_trigraph(&trigraph_to_text(&t)).unwrap(), t);
    }

    #[test]
    fn duplicate_theta_is_an_error() {
        let err = parse_trigraph("trigraph v1\nn 3\ntheta 0 1 1\ntheta 0 1 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }));
    }

    #[test]
    fn comments_and_defaults() {
        let t = parse_trigraph("# a path\ntrigraph v1\nn 3\ntheta 0 1 1 # edge\ntheta 1 2 1\n").unwrap();
        assert_eq!(t, Trigraph::path(3));
    }

    #[test]
    fn bad_lines_are_rejected() {
        for text in [
            "",
            "trigraph v2\nn 2\n",
            "trigraph v1\nn 2\ntheta 1 0 1\n",
            "trigraph v1\nn 2\ntheta 0 2 1\n",
            "trigraph v1\nn 2\ntheta 0 1 5\n",
            "trigraph v1\nn 2\nedge 0 1\n",
            "trigraph v1\nn 2\nweight 0 -1 0 0\n",
            "trigraph v1\nn 2\ntheta 0 1 1\npairweight 0 1 1 1\n",
        ] {
            assert!(Document::parse(text).is_err(), "{text:?}");
        }
    }
}
