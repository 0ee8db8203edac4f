/// Caps for the exhaustive searches. Exceeding one is reported as
/// [`Error::CapExceeded`](crate::Error::CapExceeded), never truncated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Odd hole / antihole search.
    pub berge: usize,
    /// Maximum number of switchable pairs for realization enumeration.
    pub realizations: usize,
    /// Clique and stable set enumeration.
    pub cliques: usize,
    /// Line trigraph recognition.
    pub line: usize,
    /// Good partition search.
    pub doubled: usize,
    /// 2-join search over vertex bipartitions.
    pub two_join: usize,
    /// Balanced skew-partition search.
    pub skew: usize,
    /// Largest strong degree (of the trigraph or its complement) for the
    /// skew-partition search on larger inputs.
    pub skew_core: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            berge: 14,
            realizations: 20,
            cliques: 20,
            line: 64,
            doubled: 16,
            two_join: 16,
            skew: 16,
            skew_core: 8,
        }
    }
}

impl Limits {
    /// Every cap raised to the bitset width. Only sensible for callers that
    /// know their inputs are small or structured.
    pub fn unbounded() -> Self {
        let m = crate::vset::MAX_VERTICES;
        Limits {
            berge: m,
            realizations: 64,
            cliques: m,
            line: m,
            doubled: m,
            two_join: m,
            skew: m,
            skew_core: 12,
        }
    }
}
