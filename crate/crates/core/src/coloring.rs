//! Vertex and edge colorings of increasing de Bruijn graphs.
//!
//! Path lengths are always named explicitly: `l_vertices` counts vertices on a
//! path and `l_edges` counts edges, with `l_edges = l_vertices - 1`.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::debruijn::{Adjacency, DeBruijnGraph, IncreasingWord, VertexRank};
use crate::error::{Error, Result};

/// Default vertex limit for exact chromatic numbers.
pub const DEFAULT_CHROMATIC_BUDGET: usize = 2000;

/// Default limit on `r^edges` for exhaustive Chvátal checks.
pub const DEFAULT_EXHAUSTIVE_LIMIT: u64 = 10_000_000;

/// One color per vertex of `D(k, m)`, indexed by colex rank.
///
/// This is also the on-disk coloring format: `{k, m, r, colors}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexColoring {
    pub k: usize,
    pub m: usize,
    pub r: u32,
    pub colors: Vec<u32>,
}

impl VertexColoring {
    pub fn new(k: usize, m: usize, r: u32, colors: Vec<u32>) -> Result<Self> {
        let vc = VertexColoring { k, m, r, colors };
        vc.validate()?;
        Ok(vc)
    }

    /// Checks the length and color-range invariants against `D(k, m)`.
    pub fn validate(&self) -> Result<()> {
        let expected = crate::debruijn::binomial(self.m as u64, self.k as u64);
        if self.k < 1 || self.k > self.m || expected != Some(self.colors.len() as u64) {
            return Err(Error::InvalidInput(format!(
                "coloring of D({},{}) has {} entries, expected C(m,k)={}",
                self.k,
                self.m,
                self.colors.len(),
                expected.map_or("overflow".to_string(), |n| n.to_string())
            )));
        }
        if let Some((v, &c)) = self.colors.iter().enumerate().find(|(_, &c)| c >= self.r) {
            return Err(Error::InvalidInput(format!(
                "vertex {v} has color {c}, but r={}",
                self.r
            )));
        }
        Ok(())
    }

    fn check_graph(&self, graph: &DeBruijnGraph) -> Result<()> {
        if (self.k, self.m) != (graph.k(), graph.m()) {
            return Err(Error::InvalidInput(format!(
                "coloring is for D({},{}) but graph is D({},{})",
                self.k,
                self.m,
                graph.k(),
                graph.m()
            )));
        }
        self.validate()
    }

    pub fn colors_used(&self) -> usize {
        let mut seen: Vec<u32> = self.colors.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let vc: VertexColoring = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("coloring JSON: {e}")))?;
        vc.validate()?;
        Ok(vc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("coloring serializes")
    }
}

/// One color per edge of `D(k, m)`, indexed by the colex rank of the
/// `(k+1)`-word the edge maps to. Equivalent to a vertex coloring of `D(k+1, m)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeColoring {
    pub k: usize,
    pub m: usize,
    pub q: u32,
    pub colors: Vec<u32>,
}

impl EdgeColoring {
    pub fn new(k: usize, m: usize, q: u32, colors: Vec<u32>) -> Result<Self> {
        if k >= m {
            if !colors.is_empty() {
                return Err(Error::InvalidInput(format!("D({k},{m}) has no edges")));
            }
            return Ok(EdgeColoring { k, m, q, colors });
        }
        VertexColoring::new(k + 1, m, q, colors).map(EdgeColoring::from)
    }

    pub fn as_vertex_coloring(&self) -> VertexColoring {
        VertexColoring {
            k: self.k + 1,
            m: self.m,
            r: self.q,
            colors: self.colors.clone(),
        }
    }
}

impl From<VertexColoring> for EdgeColoring {
    /// Reads a vertex coloring of `D(k, m)` as an edge coloring of `D(k-1, m)`.
    fn from(vc: VertexColoring) -> Self {
        assert!(vc.k >= 2, "D(k-1,m) needs k >= 2");
        EdgeColoring {
            k: vc.k - 1,
            m: vc.m,
            q: vc.r,
            colors: vc.colors,
        }
    }
}

/// A directed path given by vertex ranks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectedPath {
    pub vertices: Vec<usize>,
}

impl DirectedPath {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn words(&self, graph: &DeBruijnGraph) -> Result<Vec<IncreasingWord>> {
        self.vertices
            .iter()
            .map(|&v| graph.unrank(VertexRank(v)))
            .collect()
    }
}

/// Whether no edge joins two vertices of the same color.
pub fn is_proper(graph: &DeBruijnGraph, vc: &VertexColoring) -> Result<bool> {
    vc.check_graph(graph)?;
    let adj = graph.adjacency()?;
    Ok((0..graph.vertex_count()).all(|u| {
        adj.successors(u)
            .iter()
            .all(|&v| vc.colors[u] != vc.colors[v as usize])
    }))
}

// ---------------------------------------------------------------------------
// Chromatic number
// ---------------------------------------------------------------------------

/// Undirected simple graph as sorted neighbour lists.
struct Undirected {
    neighbours: Vec<Vec<u32>>,
}

impl Undirected {
    fn from_adjacency(adj: &Adjacency) -> Self {
        let n = adj.vertex_count();
        let neighbours = (0..n)
            .map(|v| {
                let mut ns: Vec<u32> = adj
                    .successors(v)
                    .iter()
                    .chain(adj.predecessors(v))
                    .copied()
                    .collect();
                ns.sort_unstable();
                ns.dedup();
                ns
            })
            .collect();
        Undirected { neighbours }
    }

    fn len(&self) -> usize {
        self.neighbours.len()
    }

    /// Greedy clique, grown from every start vertex in degree order.
    fn clique_lower_bound(&self) -> usize {
        let n = self.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(self.neighbours[v].len()));
        let mut best = usize::from(n > 0);
        for &start in &order {
            let mut clique = vec![start];
            for &v in &order {
                if v != start
                    && clique
                        .iter()
                        .all(|&c| self.neighbours[c].binary_search(&(v as u32)).is_ok())
                {
                    clique.push(v);
                }
            }
            best = best.max(clique.len());
        }
        best
    }

    /// DSATUR greedy coloring; returns the number of colors used.
    fn dsatur_upper_bound(&self) -> usize {
        let n = self.len();
        let mut color = vec![u32::MAX; n];
        let mut used = 0usize;
        for _ in 0..n {
            let v = (0..n)
                .filter(|&v| color[v] == u32::MAX)
                .max_by_key(|&v| (self.saturation(v, &color), self.neighbours[v].len()))
                .unwrap();
            let mut c = 0;
            while self.neighbours[v].iter().any(|&u| color[u as usize] == c) {
                c += 1;
            }
            color[v] = c;
            used = used.max(c as usize + 1);
        }
        used
    }

    fn saturation(&self, v: usize, color: &[u32]) -> usize {
        let mut cs: Vec<u32> = self.neighbours[v]
            .iter()
            .map(|&u| color[u as usize])
            .filter(|&c| c != u32::MAX)
            .collect();
        cs.sort_unstable();
        cs.dedup();
        cs.len()
    }
}

/// Exact `r`-colorability by DSATUR-ordered backtracking.
struct ColorSearch<'a> {
    graph: &'a Undirected,
    r: usize,
    color: Vec<u32>,
    /// `counts[v * r + c]`: neighbours of `v` currently colored `c`.
    counts: Vec<u32>,
    saturation: Vec<u32>,
}

impl<'a> ColorSearch<'a> {
    fn new(graph: &'a Undirected, r: usize) -> Self {
        let n = graph.len();
        ColorSearch {
            graph,
            r,
            color: vec![u32::MAX; n],
            counts: vec![0; n * r],
            saturation: vec![0; n],
        }
    }

    fn assign(&mut self, v: usize, c: u32) {
        self.color[v] = c;
        for &u in &self.graph.neighbours[v] {
            let slot = u as usize * self.r + c as usize;
            if self.counts[slot] == 0 {
                self.saturation[u as usize] += 1;
            }
            self.counts[slot] += 1;
        }
    }

    fn unassign(&mut self, v: usize) {
        let c = self.color[v];
        self.color[v] = u32::MAX;
        for &u in &self.graph.neighbours[v] {
            let slot = u as usize * self.r + c as usize;
            self.counts[slot] -= 1;
            if self.counts[slot] == 0 {
                self.saturation[u as usize] -= 1;
            }
        }
    }

    /// `opened`: colors `0..opened` are in use somewhere.
    fn solve(&mut self, colored: usize, opened: u32) -> bool {
        let n = self.graph.len();
        if colored == n {
            return true;
        }
        let v = (0..n)
            .filter(|&v| self.color[v] == u32::MAX)
            .max_by_key(|&v| (self.saturation[v], self.graph.neighbours[v].len()))
            .unwrap();
        // Unopened colors are interchangeable, so only the first one is tried.
        let limit = (opened as usize + 1).min(self.r) as u32;
        for c in 0..limit {
            if self.counts[v * self.r + c as usize] == 0 {
                self.assign(v, c);
                if self.solve(colored + 1, opened.max(c + 1)) {
                    return true;
                }
                self.unassign(v);
            }
        }
        false
    }
}

fn colorable(graph: &Undirected, r: usize) -> bool {
    if graph.len() == 0 {
        return true;
    }
    if r == 0 {
        return false;
    }
    ColorSearch::new(graph, r).solve(0, 0)
}

/// Exact chromatic number of the underlying undirected graph of `D(k, m)`.
///
/// Iterative deepening from a clique lower bound up to the DSATUR greedy
/// bound; each failed level is an exhaustive proof of non-colorability.
pub fn chromatic_number(graph: &DeBruijnGraph, vertex_budget: usize) -> Result<usize> {
    let adj = graph.adjacency()?;
    let und = Undirected::from_adjacency(adj);
    let lower = und.clique_lower_bound();
    if graph.vertex_count() > vertex_budget {
        let upper = und.dsatur_upper_bound();
        return Err(Error::ChromaticBudget {
            vertices: graph.vertex_count(),
            limit: vertex_budget,
            lower,
            upper,
        });
    }
    let upper = und.dsatur_upper_bound();
    for r in lower..upper {
        if colorable(&und, r) {
            return Ok(r);
        }
    }
    Ok(upper)
}

// ---------------------------------------------------------------------------
// Lift of a path-free edge coloring
// ---------------------------------------------------------------------------

/// Lifts an edge coloring of `D(k, m)` with no monochromatic 2-edge path to a
/// proper vertex coloring with at most `2^q` colors.
///
/// Vertex `u` receives the set of colors on its out-edges, encoded as a
/// bitmask in `0..2^q`.
pub fn lift_edge_coloring(graph: &DeBruijnGraph, ec: &EdgeColoring) -> Result<VertexColoring> {
    if (ec.k, ec.m) != (graph.k(), graph.m()) {
        return Err(Error::InvalidInput(format!(
            "edge coloring is for D({},{}) but graph is D({},{})",
            ec.k,
            ec.m,
            graph.k(),
            graph.m()
        )));
    }
    if ec.q > 31 {
        return Err(Error::InvalidInput(format!(
            "q={} colors would need more than 2^31 subset colors",
            ec.q
        )));
    }
    if ec.colors.len() as u64 != graph.edge_count() {
        return Err(Error::InvalidInput(format!(
            "edge coloring has {} entries, D({},{}) has {} edges",
            ec.colors.len(),
            graph.k(),
            graph.m(),
            graph.edge_count()
        )));
    }
    if let Some(&c) = ec.colors.iter().find(|&&c| c >= ec.q) {
        return Err(Error::InvalidInput(format!("edge color {c} >= q={}", ec.q)));
    }

    let adj = graph.adjacency()?;
    let n = graph.vertex_count();
    let mut word = vec![0u32; graph.k()];
    let mut subsets = vec![0u32; n];
    // out_colors[e] for every edge, looked up via the successor's last symbol.
    let mut out_edges: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    for (u, subset) in subsets.iter_mut().enumerate() {
        graph.unrank_into(u as u64, &mut word);
        for &v in adj.successors(u) {
            let mut vw = vec![0u32; graph.k()];
            graph.unrank_into(u64::from(v), &mut vw);
            let e = graph.edge_rank(&word, vw[graph.k() - 1]);
            let c = ec.colors[e];
            out_edges[u].push((v, c));
            *subset |= 1 << c;
        }
    }
    for u in 0..n {
        for &(v, c) in &out_edges[u] {
            if let Some(&(w, _)) = out_edges[v as usize].iter().find(|&&(_, c2)| c2 == c) {
                let names: Vec<String> = [u, v as usize, w as usize]
                    .iter()
                    .map(|&x| graph.unrank(VertexRank(x)).unwrap().to_string())
                    .collect();
                return Err(Error::InvalidInput(format!(
                    "edge coloring has monochromatic 2-edge path {} -> {} -> {} (color {c})",
                    names[0], names[1], names[2]
                )));
            }
        }
    }
    let lifted = VertexColoring {
        k: graph.k(),
        m: graph.m(),
        r: 1u32 << ec.q,
        colors: subsets,
    };
    if !is_proper(graph, &lifted)? {
        return Err(Error::Violation("lifted coloring is not proper".into()));
    }
    Ok(lifted)
}

// ---------------------------------------------------------------------------
// Monochromatic paths
// ---------------------------------------------------------------------------

/// Longest monochromatic path ending at each vertex, with the predecessor used.
fn longest_mono_runs(adj: &Adjacency, colors: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let n = colors.len();
    let mut run = vec![1u32; n];
    let mut parent = vec![u32::MAX; n];
    // Rank order is topological.
    for u in 0..n {
        for &v in adj.successors(u) {
            let v = v as usize;
            if colors[v] == colors[u] && run[u] + 1 > run[v] {
                run[v] = run[u] + 1;
                parent[v] = u as u32;
            }
        }
    }
    (run, parent)
}

/// A monochromatic directed path with exactly `l_vertices` vertices, if any.
pub fn find_mono_path(
    graph: &DeBruijnGraph,
    vc: &VertexColoring,
    l_vertices: usize,
) -> Result<Option<DirectedPath>> {
    vc.check_graph(graph)?;
    if l_vertices == 0 {
        return Ok(Some(DirectedPath { vertices: vec![] }));
    }
    let adj = graph.adjacency()?;
    let (run, parent) = longest_mono_runs(adj, &vc.colors);
    let Some(end) = run.iter().position(|&len| len as usize >= l_vertices) else {
        return Ok(None);
    };
    let mut vertices = Vec::with_capacity(l_vertices);
    let mut v = end;
    for _ in 0..l_vertices {
        vertices.push(v);
        v = parent[v] as usize;
    }
    vertices.reverse();
    Ok(Some(DirectedPath { vertices }))
}

/// Length in vertices of the longest monochromatic directed path.
pub fn longest_mono_path(graph: &DeBruijnGraph, vc: &VertexColoring) -> Result<usize> {
    vc.check_graph(graph)?;
    let adj = graph.adjacency()?;
    let (run, _) = longest_mono_runs(adj, &vc.colors);
    Ok(run.into_iter().max().unwrap_or(0) as usize)
}

// ---------------------------------------------------------------------------
// Chvátal property
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone)]
pub struct ChvatalOptions {
    pub mode: CheckMode,
    pub exhaustive_limit: u64,
    pub samples: u64,
    pub seed: u64,
    pub chromatic_budget: usize,
}

impl Default for ChvatalOptions {
    fn default() -> Self {
        ChvatalOptions {
            mode: CheckMode::Exhaustive,
            exhaustive_limit: DEFAULT_EXHAUSTIVE_LIMIT,
            samples: 10_000,
            seed: 0,
            chromatic_budget: DEFAULT_CHROMATIC_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChvatalReport {
    pub k: usize,
    pub m: usize,
    pub r: u32,
    pub l_edges: usize,
    pub chromatic_number: usize,
    /// `l^r` as a decimal string.
    pub threshold: String,
    pub hypothesis_met: bool,
    pub mode: CheckMode,
    pub colorings_checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// An edge coloring with no monochromatic path of `l_edges` edges.
    pub counterexample: Option<EdgeColoring>,
    pub holds: bool,
}

/// Checks on this instance that `χ(D) > l^r` forces a monochromatic directed
/// path of `l_edges` edges in every `r`-edge-coloring.
pub fn check_chvatal(
    graph: &DeBruijnGraph,
    r: u32,
    l_edges: usize,
    opts: &ChvatalOptions,
) -> Result<ChvatalReport> {
    if r == 0 || l_edges == 0 {
        return Err(Error::InvalidInput("need r >= 1 and l_edges >= 1".into()));
    }
    let chi = chromatic_number(graph, opts.chromatic_budget)?;
    let threshold = num_bigint::BigUint::from(l_edges).pow(r);
    let hypothesis_met = num_bigint::BigUint::from(chi) > threshold;
    let mut report = ChvatalReport {
        k: graph.k(),
        m: graph.m(),
        r,
        l_edges,
        chromatic_number: chi,
        threshold: threshold.to_string(),
        hypothesis_met,
        mode: opts.mode,
        colorings_checked: 0,
        seed: None,
        counterexample: None,
        holds: true,
    };
    if !hypothesis_met {
        return Ok(report);
    }

    let edges = graph.edge_count();
    if edges == 0 {
        // The empty coloring has no path of l_edges >= 1 edges.
        report.colorings_checked = 1;
        report.counterexample = Some(EdgeColoring::new(graph.k(), graph.m(), r, vec![])?);
        report.holds = false;
        return Ok(report);
    }
    let line = graph.line_graph()?;
    let line_adj = line.adjacency()?;
    let e = edges as usize;
    let has_path = |colors: &[u32]| {
        let (run, _) = longest_mono_runs(line_adj, colors);
        run.iter().any(|&len| len as usize >= l_edges)
    };

    let found = match opts.mode {
        CheckMode::Exhaustive => {
            let total = u64::from(r)
                .checked_pow(edges.min(u64::from(u32::MAX)) as u32)
                .filter(|&t| t <= opts.exhaustive_limit)
                .ok_or_else(|| {
                    Error::budget(
                        "exhaustive coloring count",
                        format!("{r}^{edges}"),
                        opts.exhaustive_limit,
                    )
                })?;
            report.colorings_checked = total;
            (0..total).into_par_iter().find_first(|&idx| {
                let colors = digits(idx, u64::from(r), e);
                !has_path(&colors)
            })
            .map(|idx| digits(idx, u64::from(r), e))
        }
        CheckMode::Sampled => {
            report.colorings_checked = opts.samples;
            report.seed = Some(opts.seed);
            (0..opts.samples)
                .into_par_iter()
                .find_first(|&i| !has_path(&sample_colors(opts.seed, i, r, e)))
                .map(|i| sample_colors(opts.seed, i, r, e))
        }
    };
    if let Some(colors) = found {
        report.holds = false;
        report.counterexample = Some(EdgeColoring {
            k: graph.k(),
            m: graph.m(),
            q: r,
            colors,
        });
    }
    Ok(report)
}

/// Base-`r` digits of `idx`, least significant first.
fn digits(mut idx: u64, r: u64, len: usize) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let d = idx % r;
            idx /= r;
            d as u32
        })
        .collect()
}

/// The `i`-th sampled coloring: stream `i` of the seeded generator.
fn sample_colors(seed: u64, i: u64, r: u32, len: usize) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    (0..len).map(|_| rng.random_range(0..r)).collect()
}

// ---------------------------------------------------------------------------
// Search for path-avoiding colorings
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SearchLimits {
    pub time: Option<Duration>,
    pub vertex_budget: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            time: Some(Duration::from_secs(60)),
            vertex_budget: crate::debruijn::DEFAULT_VERTEX_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum SearchOutcome {
    Found { coloring: VertexColoring },
    /// The whole search space was explored: no such coloring exists.
    Exhausted,
    /// The time budget ran out; nothing is claimed about existence.
    Timeout,
}

impl SearchOutcome {
    pub fn coloring(&self) -> Option<&VertexColoring> {
        match self {
            SearchOutcome::Found { coloring } => Some(coloring),
            _ => None,
        }
    }
}

/// Largest `l^r` for which the grouped search enumerates run profiles.
const PROFILE_LIMIT: u64 = 4096;

/// Backtracking search for an `r`-coloring of `D(k, m)` with no monochromatic
/// directed path of `l_vertices` vertices.
///
/// For `k >= 2` the search runs over groups of vertices sharing a suffix; see
/// [`search_by_group`]. Otherwise vertices are colored one at a time in rank
/// order. Both searches are complete, so `Exhausted` proves nonexistence.
pub fn search_coloring(
    k: usize,
    m: usize,
    r: u32,
    l_vertices: usize,
    limits: &SearchLimits,
) -> Result<SearchOutcome> {
    let graph = DeBruijnGraph::with_budget(k, m, limits.vertex_budget)?;
    if r == 0 {
        return Err(Error::InvalidInput("need r >= 1".into()));
    }
    if l_vertices <= 1 {
        // Every single vertex is a monochromatic 1-vertex path.
        return Ok(SearchOutcome::Exhausted);
    }
    let deadline = Deadline::new(limits.time);
    let profiles = (l_vertices as u64).checked_pow(r).filter(|&n| n <= PROFILE_LIMIT);
    let colors = match profiles {
        Some(_) if k >= 2 => search_by_group(&graph, r, l_vertices as u32, deadline)?,
        _ => search_by_vertex(&graph, r, l_vertices as u32, deadline)?,
    };
    Ok(match colors {
        Step::Done(colors) => SearchOutcome::Found {
            coloring: VertexColoring::new(k, m, r, colors)?,
        },
        Step::Exhausted => SearchOutcome::Exhausted,
        Step::Timeout => SearchOutcome::Timeout,
    })
}

enum Step {
    Done(Vec<u32>),
    Exhausted,
    Timeout,
}

struct Deadline {
    start: Instant,
    limit: Option<Duration>,
    steps: u64,
}

impl Deadline {
    fn new(limit: Option<Duration>) -> Self {
        Deadline {
            start: Instant::now(),
            limit,
            steps: 0,
        }
    }

    /// Polls the clock every 1024 steps, starting with the first.
    fn expired(&mut self) -> bool {
        let poll = self.steps.is_multiple_of(1024);
        self.steps += 1;
        poll && self.limit.is_some_and(|t| self.start.elapsed() >= t)
    }
}

/// Colors vertices in rank order, so every predecessor is colored and the
/// monochromatic run ending at the current vertex is exact. At most one new
/// color is opened per position.
fn search_by_vertex(graph: &DeBruijnGraph, r: u32, l: u32, mut deadline: Deadline) -> Result<Step> {
    let adj = graph.adjacency()?;
    let n = graph.vertex_count();
    let mut color = vec![0u32; n];
    let mut run = vec![0u32; n];
    // choices[v]: remaining (run, color) options at v, best last.
    let mut choices: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    // opened[v]: colors in use before position v
    let mut opened: Vec<u32> = vec![0; n + 1];
    let mut v = 0usize;
    let mut fresh = true;

    loop {
        if deadline.expired() {
            return Ok(Step::Timeout);
        }
        if fresh {
            let limit = (opened[v] + 1).min(r);
            let mut options: Vec<(u32, u32)> = (0..limit)
                .filter_map(|c| {
                    let best = adj
                        .predecessors(v)
                        .iter()
                        .filter(|&&u| color[u as usize] == c)
                        .map(|&u| run[u as usize])
                        .max()
                        .unwrap_or(0);
                    (best + 1 < l).then_some((best + 1, c))
                })
                .collect();
            options.sort_by(|a, b| b.cmp(a));
            choices[v] = options;
        }
        match choices[v].pop() {
            Some((len, c)) => {
                color[v] = c;
                run[v] = len;
                opened[v + 1] = opened[v].max(c + 1);
                v += 1;
                if v == n {
                    return Ok(Step::Done(color));
                }
                fresh = true;
            }
            None => {
                if v == 0 {
                    return Ok(Step::Exhausted);
                }
                v -= 1;
                fresh = false;
            }
        }
    }
}

/// Searches over run profiles of suffix groups (`k >= 2`).
///
/// The predecessors of `(a_1..a_k)` are exactly the vertices whose last `k-1`
/// symbols are `(a_1..a_{k-1})`. So if `R[q][c]` is the longest color-`c` run
/// ending at a vertex with suffix `q`, the run at `(a_1..a_k)` in color `c` is
/// `1 + R[(a_1..a_{k-1})][c]`. Groups `q` are visited in colex order of
/// `D(k-1, m)`; each takes a componentwise-minimal feasible profile. Smaller
/// profiles only relax later groups, so restricting to minimal ones loses no
/// solutions.
fn search_by_group(graph: &DeBruijnGraph, r: u32, l: u32, mut deadline: Deadline) -> Result<Step> {
    let (k, m) = (graph.k(), graph.m());
    let groups = DeBruijnGraph::new(k - 1, m)?;
    let g_count = groups.vertex_count();
    let ru = r as usize;

    // members[g]: (vertex rank, prefix group) for every vertex (x, q).
    let mut members: Vec<Vec<(usize, usize)>> = Vec::with_capacity(g_count);
    let mut q = vec![0u32; k - 1];
    let mut word = vec![0u32; k];
    let mut prefix = vec![0u32; k - 1];
    for g in 0..g_count {
        groups.unrank_into(g as u64, &mut q);
        word[1..].copy_from_slice(&q);
        let list = (1..q[0])
            .map(|x| {
                word[0] = x;
                prefix.copy_from_slice(&word[..k - 1]);
                (graph.rank_symbols(&word), groups.rank_symbols(&prefix))
            })
            .collect();
        members.push(list);
    }

    // All profiles in {0..l-1}^r, smallest sum first.
    let mut all: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..r {
        all = all
            .into_iter()
            .flat_map(|p| {
                (0..l).map(move |v| {
                    let mut p = p.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    all.sort_by_key(|p| (p.iter().sum::<u32>(), p.clone()));

    let mut profile = vec![0u32; g_count * ru];
    let mut choices: Vec<Vec<usize>> = vec![Vec::new(); g_count];
    let mut g = 0usize;
    let mut fresh = true;
    loop {
        if deadline.expired() {
            return Ok(Step::Timeout);
        }
        if fresh {
            let feasible = |t: &[u32]| {
                members[g].iter().all(|&(_, p)| {
                    let rp = &profile[p * ru..(p + 1) * ru];
                    (0..ru).any(|c| rp[c] < t[c])
                })
            };
            let mut minimal: Vec<usize> = Vec::new();
            for (i, t) in all.iter().enumerate() {
                let dominated = minimal
                    .iter()
                    .any(|&j| all[j].iter().zip(t).all(|(a, b)| a <= b));
                if !dominated && feasible(t) {
                    minimal.push(i);
                }
            }
            minimal.reverse();
            choices[g] = minimal;
        }
        match choices[g].pop() {
            Some(i) => {
                profile[g * ru..(g + 1) * ru].copy_from_slice(&all[i]);
                g += 1;
                if g == g_count {
                    break;
                }
                fresh = true;
            }
            None => {
                if g == 0 {
                    return Ok(Step::Exhausted);
                }
                g -= 1;
                fresh = false;
            }
        }
    }

    let mut colors = vec![0u32; graph.vertex_count()];
    for (g, list) in members.iter().enumerate() {
        let t = &profile[g * ru..(g + 1) * ru];
        for &(v, p) in list {
            let rp = &profile[p * ru..(p + 1) * ru];
            colors[v] = (0..r)
                .find(|&c| rp[c as usize] < t[c as usize])
                .expect("profile was checked feasible");
        }
    }
    Ok(Step::Done(colors))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(k: usize, m: usize) -> DeBruijnGraph {
        DeBruijnGraph::new(k, m).unwrap()
    }

    fn rank(g: &DeBruijnGraph, s: &[u32]) -> usize {
        g.rank(&IncreasingWord::new(s.to_vec(), g.m()).unwrap()).unwrap().0
    }

    /// Brute-force chromatic number over all colorings (tiny graphs only).
    fn brute_chromatic(g: &DeBruijnGraph) -> usize {
        let n = g.vertex_count();
        let edges: Vec<_> = g.edges().collect();
        for r in 1..=n as u64 {
            let total = r.pow(n as u32);
            if (0..total).any(|idx| {
                let c = digits(idx, r, n);
                edges.iter().all(|&(u, v)| c[u] != c[v])
            }) {
                return r as usize;
            }
        }
        n
    }

    #[test]
    fn chromatic_examples() {
        assert_eq!(chromatic_number(&graph(1, 4), 100).unwrap(), 4);
        assert_eq!(chromatic_number(&graph(2, 2), 100).unwrap(), 1);
        assert_eq!(chromatic_number(&graph(2, 4), 100).unwrap(), 2);
        assert_eq!(brute_chromatic(&graph(2, 4)), 2);
    }

    #[test]
    fn chromatic_matches_brute_force_on_tiny_graphs() {
        for (k, m) in [(1, 3), (1, 5), (2, 3), (2, 5), (3, 5), (2, 6), (3, 6), (4, 6)] {
            let g = graph(k, m);
            assert_eq!(
                chromatic_number(&g, 100).unwrap(),
                brute_chromatic(&g),
                "D({k},{m})"
            );
        }
    }

    #[test]
    fn chromatic_budget_error_carries_bounds() {
        match chromatic_number(&graph(1, 6), 3) {
            Err(Error::ChromaticBudget { lower, upper, .. }) => {
                assert_eq!((lower, upper), (6, 6));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn lift_single_edge() {
        let g = graph(2, 3);
        let ec = EdgeColoring::new(2, 3, 1, vec![0]).unwrap();
        let vc = lift_edge_coloring(&g, &ec).unwrap();
        assert_eq!(vc.colors[rank(&g, &[1, 2])], 0b1);
        assert_eq!(vc.colors[rank(&g, &[1, 3])], 0);
        assert_eq!(vc.colors[rank(&g, &[2, 3])], 0);
        assert!(is_proper(&g, &vc).unwrap());
    }

    #[test]
    fn lift_edgeless() {
        let g = graph(3, 3);
        let ec = EdgeColoring::new(3, 3, 2, vec![]).unwrap();
        let vc = lift_edge_coloring(&g, &ec).unwrap();
        assert_eq!(vc.colors, vec![0]);
    }

    #[test]
    fn lift_rejects_mono_two_edge_path() {
        let g = graph(2, 4);
        let ec = EdgeColoring::new(2, 4, 1, vec![0; 4]).unwrap();
        let err = lift_edge_coloring(&g, &ec).unwrap_err();
        match err {
            Error::InvalidInput(msg) => assert!(msg.contains("2-edge path"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn lift_of_searched_coloring() {
        let outcome = search_coloring(3, 5, 2, 2, &SearchLimits::default()).unwrap();
        let vc = outcome.coloring().expect("D(3,5) is 2-colorable").clone();
        let ec = EdgeColoring::from(vc);
        let g = graph(2, 5);
        let lifted = lift_edge_coloring(&g, &ec).unwrap();
        assert!(lifted.colors.iter().all(|&c| c < 4));
        for (u, v) in g.edges() {
            assert_ne!(lifted.colors[u], lifted.colors[v]);
        }
    }

    #[test]
    fn mono_path_examples() {
        let g = graph(2, 3);
        let all0 = VertexColoring::new(2, 3, 1, vec![0; 3]).unwrap();
        let p = find_mono_path(&g, &all0, 2).unwrap().unwrap();
        assert_eq!(p.vertices, vec![rank(&g, &[1, 2]), rank(&g, &[2, 3])]);

        let mut colors = vec![0; 3];
        colors[rank(&g, &[2, 3])] = 1;
        let vc = VertexColoring::new(2, 3, 2, colors).unwrap();
        assert_eq!(find_mono_path(&g, &vc, 2).unwrap(), None);

        let g = graph(2, 4);
        let vc = VertexColoring::new(2, 4, 1, vec![0; 6]).unwrap();
        let p = find_mono_path(&g, &vc, 3).unwrap().unwrap();
        let words: Vec<_> = p
            .words(&g)
            .unwrap()
            .into_iter()
            .map(|w| w.into_symbols())
            .collect();
        assert_eq!(words, vec![vec![1, 2], vec![2, 3], vec![3, 4]]);
        assert_eq!(find_mono_path(&g, &vc, 4).unwrap(), None);
        assert_eq!(longest_mono_path(&g, &vc).unwrap(), 3);
    }

    #[test]
    fn mono_path_rejects_mismatched_coloring() {
        let vc = VertexColoring::new(2, 3, 1, vec![0; 3]).unwrap();
        assert!(find_mono_path(&graph(2, 4), &vc, 2).is_err());
    }

    #[test]
    fn coloring_validation() {
        assert!(VertexColoring::new(2, 3, 2, vec![0, 1]).is_err());
        assert!(VertexColoring::new(2, 3, 2, vec![0, 1, 2]).is_err());
        let json = r#"{"k":2,"m":3,"r":2,"colors":[0,1,0]}"#;
        let vc = VertexColoring::from_json(json).unwrap();
        assert_eq!(vc.to_json(), json);
    }

    #[test]
    fn chvatal_examples() {
        let opts = ChvatalOptions::default();
        let rep = check_chvatal(&graph(1, 3), 1, 1, &opts).unwrap();
        assert!(rep.hypothesis_met && rep.holds);
        assert_eq!(rep.colorings_checked, 1);

        let rep = check_chvatal(&graph(1, 5), 2, 2, &opts).unwrap();
        assert!(rep.hypothesis_met && rep.holds);
        assert_eq!(rep.colorings_checked, 1024);
        assert_eq!(rep.counterexample, None);

        let rep = check_chvatal(&graph(1, 4), 2, 2, &opts).unwrap();
        assert!(!rep.hypothesis_met);
        assert_eq!(rep.colorings_checked, 0);
    }

    #[test]
    fn chvatal_exhaustive_budget() {
        let opts = ChvatalOptions {
            exhaustive_limit: 100,
            ..ChvatalOptions::default()
        };
        assert!(matches!(
            check_chvatal(&graph(1, 5), 2, 2, &opts),
            Err(Error::Budget { .. })
        ));
        let sampled = ChvatalOptions {
            mode: CheckMode::Sampled,
            samples: 500,
            seed: 7,
            ..opts
        };
        let rep = check_chvatal(&graph(1, 5), 2, 2, &sampled).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.seed, Some(7));
    }

    #[test]
    fn search_examples() {
        let lim = SearchLimits::default();
        let found = search_coloring(2, 4, 2, 2, &lim).unwrap();
        let vc = found.coloring().unwrap();
        assert!(is_proper(&graph(2, 4), vc).unwrap());

        assert_eq!(search_coloring(2, 3, 1, 2, &lim).unwrap(), SearchOutcome::Exhausted);

        let found = search_coloring(3, 6, 2, 3, &lim).unwrap();
        let vc = found.coloring().unwrap();
        assert_eq!(find_mono_path(&graph(3, 6), vc, 3).unwrap(), None);
    }

    #[test]
    fn search_exhausts_when_impossible() {
        // χ(D(1,4)) = 4, so three colors cannot avoid a monochromatic edge.
        let out = search_coloring(1, 4, 3, 2, &SearchLimits::default()).unwrap();
        assert_eq!(out, SearchOutcome::Exhausted);
    }

    #[test]
    fn search_reports_timeout() {
        let limits = SearchLimits {
            time: Some(Duration::ZERO),
            ..SearchLimits::default()
        };
        for (k, m) in [(1, 12), (3, 24)] {
            let out = search_coloring(k, m, 2, 3, &limits).unwrap();
            assert_eq!(out, SearchOutcome::Timeout);
        }
    }
}
