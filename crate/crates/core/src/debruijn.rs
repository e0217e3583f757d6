//! Increasing de Bruijn graphs.
//!
//! `D(k, m)` has one vertex per strictly increasing `k`-word over `{1..m}` and
//! an edge `u -> v` whenever `v` is `u` shifted left by one symbol with a new,
//! larger symbol appended. Edges of `D(k, m)` are in bijection with vertices of
//! `D(k + 1, m)`, which makes `D(k + 1, m)` the directed line graph of `D(k, m)`.
//!
//! Vertices are identified by their colexicographic rank. Colex order sorts by
//! the last symbol first, and every edge strictly increases the last symbol, so
//! rank order is a topological order of the graph.

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest vertex count accepted by [`DeBruijnGraph::new`].
pub const DEFAULT_VERTEX_BUDGET: u64 = 1_000_000;

/// Largest edge count for which adjacency lists are materialized.
pub const MAX_MATERIALIZED_EDGES: u64 = 50_000_000;

/// `C(n, k)` or `None` on `u64` overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return None;
        }
    }
    Some(acc as u64)
}

/// A strictly increasing word over `{1..m}`; a vertex of some `D(k, m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IncreasingWord(Vec<u32>);

impl IncreasingWord {
    pub fn new(symbols: Vec<u32>, m: usize) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidInput("word must have at least one symbol".into()));
        }
        if let Some(&bad) = symbols.iter().find(|&&s| s == 0 || s as usize > m) {
            return Err(Error::InvalidInput(format!(
                "symbol {bad} outside 1..={m} in {symbols:?}"
            )));
        }
        if symbols.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(format!(
                "symbols not strictly increasing: {symbols:?}"
            )));
        }
        Ok(IncreasingWord(symbols))
    }

    pub fn symbols(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_symbols(self) -> Vec<u32> {
        self.0
    }
}

impl fmt::Display for IncreasingWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str(")")
    }
}

/// Colex rank of a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexRank(pub usize);

/// Binomial coefficients `C(n, j)` for `n <= m`, `j <= width`.
#[derive(Debug, Clone)]
struct BinomialTable {
    rows: Vec<Vec<u64>>,
}

impl BinomialTable {
    fn new(m: usize, width: usize) -> Self {
        let rows = (0..=width)
            .map(|j| {
                (0..=m)
                    .map(|n| binomial(n as u64, j as u64).unwrap_or(u64::MAX))
                    .collect()
            })
            .collect();
        BinomialTable { rows }
    }

    #[inline]
    fn get(&self, n: usize, j: usize) -> u64 {
        self.rows[j][n]
    }
}

/// Forward and backward adjacency in compressed sparse row form.
#[derive(Debug, Clone)]
pub struct Adjacency {
    out_offsets: Vec<usize>,
    out_targets: Vec<u32>,
    in_offsets: Vec<usize>,
    in_sources: Vec<u32>,
}

impl Adjacency {
    pub fn successors(&self, v: usize) -> &[u32] {
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    pub fn predecessors(&self, v: usize) -> &[u32] {
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    pub fn vertex_count(&self) -> usize {
        self.out_offsets.len() - 1
    }
}

/// The implicit graph `D(k, m)`. Cheap to clone; adjacency lists are shared.
#[derive(Debug, Clone)]
pub struct DeBruijnGraph {
    k: usize,
    m: usize,
    vertex_count: usize,
    edge_count: u64,
    binom: Arc<BinomialTable>,
    adjacency: Arc<OnceLock<Adjacency>>,
}

/// JSON summary of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub k: usize,
    pub m: usize,
    pub vertex_count: u64,
    pub edge_count: u64,
}

impl DeBruijnGraph {
    /// Builds `D(k, m)` with the default vertex budget.
    pub fn new(k: usize, m: usize) -> Result<Self> {
        Self::with_budget(k, m, DEFAULT_VERTEX_BUDGET)
    }

    pub fn with_budget(k: usize, m: usize, vertex_budget: u64) -> Result<Self> {
        if k < 1 || k > m {
            return Err(Error::InvalidDimension(format!(
                "D(k,m) requires 1 <= k <= m, got k={k}, m={m}"
            )));
        }
        if m > u32::MAX as usize {
            return Err(Error::InvalidDimension(format!("alphabet size {m} too large")));
        }
        let vertices = binomial(m as u64, k as u64)
            .ok_or_else(|| Error::budget("vertex count", format!("C({m},{k})"), vertex_budget))?;
        if vertices > vertex_budget {
            return Err(Error::budget("vertex count", vertices, vertex_budget));
        }
        let edge_count = binomial(m as u64, k as u64 + 1)
            .ok_or_else(|| Error::budget("edge count", format!("C({m},{})", k + 1), u64::MAX))?;
        Ok(DeBruijnGraph {
            k,
            m,
            vertex_count: vertices as usize,
            edge_count,
            binom: Arc::new(BinomialTable::new(m, k + 1)),
            adjacency: Arc::new(OnceLock::new()),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    pub fn summary(&self) -> GraphSummary {
        GraphSummary {
            k: self.k,
            m: self.m,
            vertex_count: self.vertex_count as u64,
            edge_count: self.edge_count,
        }
    }

    /// Colex rank of an increasing word of any length up to `k + 1`.
    #[inline]
    pub(crate) fn rank_symbols(&self, symbols: &[u32]) -> usize {
        symbols
            .iter()
            .enumerate()
            .map(|(i, &s)| self.binom.get(s as usize - 1, i + 1) as usize)
            .sum()
    }

    /// Writes the word of rank `index` (of length `out.len()`) into `out`.
    pub(crate) fn unrank_into(&self, mut index: u64, out: &mut [u32]) {
        let mut hi = self.m; // exclusive upper bound on the 0-based symbol
        for i in (1..=out.len()).rev() {
            // largest b < hi with C(b, i) <= index
            let (mut lo, mut up) = (i - 1, hi - 1);
            while lo < up {
                let mid = (lo + up).div_ceil(2);
                if self.binom.get(mid, i) <= index {
                    lo = mid;
                } else {
                    up = mid - 1;
                }
            }
            index -= self.binom.get(lo, i);
            out[i - 1] = lo as u32 + 1;
            hi = lo;
        }
    }

    fn check_word(&self, word: &IncreasingWord, len: usize) -> Result<()> {
        if word.len() != len {
            return Err(Error::InvalidInput(format!(
                "word {word} has length {}, expected {len}",
                word.len()
            )));
        }
        if word.symbols().iter().any(|&s| s as usize > self.m) {
            return Err(Error::InvalidInput(format!(
                "word {word} uses symbols beyond m={}",
                self.m
            )));
        }
        Ok(())
    }

    pub fn rank(&self, word: &IncreasingWord) -> Result<VertexRank> {
        self.check_word(word, self.k)?;
        Ok(VertexRank(self.rank_symbols(word.symbols())))
    }

    pub fn unrank(&self, index: VertexRank) -> Result<IncreasingWord> {
        if index.0 >= self.vertex_count {
            return Err(Error::OutOfRange {
                index: index.0 as u64,
                bound: self.vertex_count as u64,
            });
        }
        let mut out = vec![0; self.k];
        self.unrank_into(index.0 as u64, &mut out);
        Ok(IncreasingWord(out))
    }

    /// All vertices in rank order.
    pub fn vertices(&self) -> impl Iterator<Item = IncreasingWord> + '_ {
        (0..self.vertex_count).map(move |i| {
            let mut out = vec![0; self.k];
            self.unrank_into(i as u64, &mut out);
            IncreasingWord(out)
        })
    }

    /// Out-neighbours `(a_2, ..., a_k, b)` for every `b` in `a_k+1..=m`.
    pub fn successors(&self, word: &IncreasingWord) -> Result<Vec<IncreasingWord>> {
        self.check_word(word, self.k)?;
        let s = word.symbols();
        let last = s[self.k - 1];
        Ok(((last + 1)..=self.m as u32)
            .map(|b| {
                let mut next = s[1..].to_vec();
                next.push(b);
                IncreasingWord(next)
            })
            .collect())
    }

    fn successor_ranks_of(&self, s: &[u32], out: &mut Vec<u32>) {
        let k = self.k;
        let base: usize = s[1..]
            .iter()
            .enumerate()
            .map(|(i, &x)| self.binom.get(x as usize - 1, i + 1) as usize)
            .sum();
        for b in (s[k - 1] as usize + 1)..=self.m {
            out.push((base + self.binom.get(b - 1, k) as usize) as u32);
        }
    }

    fn predecessor_ranks_of(&self, s: &[u32], out: &mut Vec<u32>) {
        let k = self.k;
        let tail: usize = s[..k - 1]
            .iter()
            .enumerate()
            .map(|(i, &x)| self.binom.get(x as usize - 1, i + 2) as usize)
            .sum();
        for b in 1..s[0] as usize {
            out.push((tail + b - 1) as u32);
        }
    }

    /// Materialized adjacency, built on first use and shared across clones.
    pub fn adjacency(&self) -> Result<&Adjacency> {
        if self.edge_count > MAX_MATERIALIZED_EDGES {
            return Err(Error::budget(
                "materialized edge count",
                self.edge_count,
                MAX_MATERIALIZED_EDGES,
            ));
        }
        Ok(self.adjacency.get_or_init(|| self.build_adjacency()))
    }

    fn build_adjacency(&self) -> Adjacency {
        let n = self.vertex_count;
        let e = self.edge_count as usize;
        let mut word = vec![0u32; self.k];
        let mut out_offsets = Vec::with_capacity(n + 1);
        let mut out_targets = Vec::with_capacity(e);
        let mut in_offsets = Vec::with_capacity(n + 1);
        let mut in_sources = Vec::with_capacity(e);
        out_offsets.push(0);
        in_offsets.push(0);
        for v in 0..n {
            self.unrank_into(v as u64, &mut word);
            self.successor_ranks_of(&word, &mut out_targets);
            out_offsets.push(out_targets.len());
            self.predecessor_ranks_of(&word, &mut in_sources);
            in_offsets.push(in_sources.len());
        }
        Adjacency {
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
        }
    }

    pub fn is_edge(&self, u: &IncreasingWord, v: &IncreasingWord) -> bool {
        u.len() == self.k
            && v.len() == self.k
            && u.symbols()[1..] == v.symbols()[..self.k - 1]
            && v.symbols()[self.k - 1] > u.symbols()[self.k - 1]
            && v.symbols()[self.k - 1] as usize <= self.m
    }

    /// The line-graph bijection: edge `(u, v)` maps to the `(k+1)`-word `u ++ [v_k]`.
    pub fn edge_to_word(&self, u: &IncreasingWord, v: &IncreasingWord) -> Result<IncreasingWord> {
        self.check_word(u, self.k)?;
        self.check_word(v, self.k)?;
        if !self.is_edge(u, v) {
            return Err(Error::InvalidEdge(format!("{u} -> {v} in D({},{})", self.k, self.m)));
        }
        let mut w = u.symbols().to_vec();
        w.push(v.symbols()[self.k - 1]);
        Ok(IncreasingWord(w))
    }

    /// Inverse of [`edge_to_word`](Self::edge_to_word).
    pub fn word_to_edge(&self, word: &IncreasingWord) -> Result<(IncreasingWord, IncreasingWord)> {
        if word.len() != self.k + 1 || word.symbols().iter().any(|&s| s as usize > self.m) {
            return Err(Error::InvalidEdge(format!(
                "{word} is not an increasing {}-word over 1..={}",
                self.k + 1,
                self.m
            )));
        }
        let s = word.symbols();
        Ok((
            IncreasingWord(s[..self.k].to_vec()),
            IncreasingWord(s[1..].to_vec()),
        ))
    }

    /// Rank of the edge `(u, u ++ [b])`: the colex rank of the `(k+1)`-word.
    #[inline]
    pub(crate) fn edge_rank(&self, u: &[u32], b: u32) -> usize {
        self.rank_symbols(u) + self.binom.get(b as usize - 1, self.k + 1) as usize
    }

    /// Edges as rank pairs, ordered by the rank of the corresponding `(k+1)`-word.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let mut word = vec![0u32; self.k + 1];
        (0..self.edge_count).map(move |e| {
            self.unrank_into(e, &mut word);
            (
                self.rank_symbols(&word[..self.k]),
                self.rank_symbols(&word[1..]),
            )
        })
    }

    /// Edge list as CSV rows `source,target` of vertex ranks.
    pub fn edge_list_csv(&self) -> String {
        let mut out = String::from("source,target\n");
        for (u, v) in self.edges() {
            out.push_str(&format!("{u},{v}\n"));
        }
        out
    }

    /// `D(k + 1, m)`, whose vertices are the edges of this graph.
    pub fn line_graph(&self) -> Result<DeBruijnGraph> {
        DeBruijnGraph::new(self.k + 1, self.m)
    }
}
