//! Monochromatic path counts and the tuple/path counting identity.
//!
//! A strictly increasing tuple `x_1 < ... < x_{l+k-1}` in `{1..M}` is the same
//! thing as a directed path of `l` vertices in `D(k, M)`: its `l` overlapping
//! windows are the path's vertices. Coloring each vertex by `f` of its window
//! turns "all windows give equal `f`-values" into "the path is monochromatic".

use num_bigint::BigUint;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::function::GridFunction;
use super::runs::{exact_run_probability, RunEvent};
use crate::coloring::VertexColoring;
use crate::debruijn::{Adjacency, DeBruijnGraph};
use crate::error::{Error, Result};
use crate::serde_util;

/// Default limit on the `M^M` colorings examined for the lower-bound check.
pub const DEFAULT_COLORING_LIMIT: u64 = 100_000;

/// Number of monochromatic directed paths with exactly `l_vertices` vertices.
pub fn mono_path_count(graph: &DeBruijnGraph, vc: &VertexColoring, l_vertices: usize) -> Result<BigUint> {
    vc.validate()?;
    if (vc.k, vc.m) != (graph.k(), graph.m()) {
        return Err(Error::InvalidInput(format!(
            "coloring is for D({},{}) but graph is D({},{})",
            vc.k,
            vc.m,
            graph.k(),
            graph.m()
        )));
    }
    if l_vertices == 0 {
        return Ok(BigUint::zero());
    }
    let adj = graph.adjacency()?;
    let n = graph.vertex_count();
    // ends[v]: paths of the current length ending at v
    let mut ends = vec![BigUint::one(); n];
    for _ in 1..l_vertices {
        let mut next = vec![BigUint::zero(); n];
        for (u, count) in ends.iter().enumerate() {
            if count.is_zero() {
                continue;
            }
            for &v in adj.successors(u) {
                if vc.colors[v as usize] == vc.colors[u] {
                    next[v as usize] += count;
                }
            }
        }
        ends = next;
    }
    Ok(ends.into_iter().sum())
}

/// `u64` variant used inside enumeration loops; `None` on overflow.
fn mono_path_count_u64(adj: &Adjacency, colors: &[u32], l_vertices: usize, scratch: &mut [Vec<u64>; 2]) -> Option<u64> {
    let n = colors.len();
    let [ends, next] = scratch;
    ends.clear();
    ends.resize(n, 1);
    for _ in 1..l_vertices {
        next.clear();
        next.resize(n, 0);
        for u in 0..n {
            if ends[u] == 0 {
                continue;
            }
            for &v in adj.successors(u) {
                if colors[v as usize] == colors[u] {
                    next[v as usize] = next[v as usize].checked_add(ends[u])?;
                }
            }
        }
        std::mem::swap(ends, next);
    }
    ends.iter().try_fold(0u64, |acc, &x| acc.checked_add(x))
}

#[derive(Debug, Clone, Serialize)]
pub struct BridgeOptions {
    /// Examine every `y in {1..M}^M` when `M^M` is at most this.
    pub coloring_limit: u64,
}

impl Default for BridgeOptions {
    fn default() -> Self {
        BridgeOptions {
            coloring_limit: DEFAULT_COLORING_LIMIT,
        }
    }
}

/// Lower bound from path counts over every coloring `c_y(a) = f(y_{a_1}, ..., y_{a_k})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathLowerBound {
    pub colorings_examined: u64,
    /// Smallest monochromatic path count seen (0 stops the scan early).
    pub min_path_count: u64,
    /// `min_path_count * (M-l-k+1)! / M!`.
    #[serde(serialize_with = "serde_util::ratio")]
    pub implied_bound: BigRational,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BridgeReport {
    pub k: usize,
    #[serde(rename = "M")]
    pub grid: u32,
    pub windows: usize,
    /// Increasing tuples whose windows all share one `f`-value.
    #[serde(serialize_with = "serde_util::biguint")]
    pub increasing_tuple_count: BigUint,
    #[serde(serialize_with = "serde_util::biguint")]
    pub mono_path_count: BigUint,
    #[serde(serialize_with = "serde_util::ratio")]
    pub constant_probability: BigRational,
    /// `(M-l-k+1)! / M!`, or 0 when `l+k-1 > M`.
    #[serde(serialize_with = "serde_util::ratio")]
    pub factorial_bound: BigRational,
    pub lower_bound: Option<PathLowerBound>,
}

/// `(M - n)! / M!` as an exact rational (zero when `n > M`).
pub fn falling_factorial_inverse(grid: u64, n: u64) -> BigRational {
    if n > grid {
        return BigRational::zero();
    }
    let denom: BigUint = ((grid - n + 1)..=grid).map(BigUint::from).product();
    BigRational::new(1.into(), denom.into())
}

/// Checks that counting increasing tuples with equal windows agrees with
/// counting monochromatic paths in `D(k, M)` colored by `f`, and that the
/// constant-run probability respects the bound implied by those path counts.
pub fn counting_bridge_check(f: &GridFunction, windows: usize, opts: &BridgeOptions) -> Result<BridgeReport> {
    if windows == 0 {
        return Err(Error::InvalidInput("run length must be at least 1 window".into()));
    }
    let k = f.k();
    let grid = f.grid();
    let len = windows + k - 1;
    let ranked = f.ranked()?;

    let tuple_count = increasing_tuple_count(f, &ranked.ids, len, windows)?;

    let path_count = if k <= grid as usize {
        let graph = DeBruijnGraph::new(k, grid as usize)?;
        let colors: Vec<u32> = graph.vertices().map(|w| ranked.ids[f.index_of(w.symbols())]).collect();
        let vc = VertexColoring::new(k, grid as usize, ranked.distinct.len() as u32, colors)?;
        mono_path_count(&graph, &vc, windows)?
    } else {
        BigUint::zero()
    };

    if tuple_count != path_count {
        return Err(Error::IdentityViolation(format!(
            "{tuple_count} increasing tuples with equal windows but {path_count} \
             monochromatic {windows}-vertex paths in D({k},{grid})"
        )));
    }
    if windows == 1 {
        let expected = binomial(BigUint::from(grid), BigUint::from(k));
        if tuple_count != expected {
            return Err(Error::IdentityViolation(format!(
                "single-window count {tuple_count} differs from C(M,k) = {expected}"
            )));
        }
    }

    let constant_probability = exact_run_probability(f, RunEvent::Constant, windows)?.probability;
    let factorial_bound = falling_factorial_inverse(u64::from(grid), len as u64);

    let colorings = u64::from(grid).checked_pow(grid);
    let lower_bound = match colorings {
        Some(count) if count <= opts.coloring_limit && len <= grid as usize => {
            let (examined, min_count) = min_path_count_over_samples(f, &ranked.ids, windows)?;
            let implied_bound = &factorial_bound * BigRational::from_integer(min_count.into());
            let holds = constant_probability >= implied_bound;
            if !holds {
                return Err(Error::IdentityViolation(format!(
                    "P(constant) = {constant_probability} is below the path-count bound {implied_bound}"
                )));
            }
            Some(PathLowerBound {
                colorings_examined: examined,
                min_path_count: min_count,
                implied_bound,
                holds,
            })
        }
        _ => None,
    };

    Ok(BridgeReport {
        k,
        grid,
        windows,
        increasing_tuple_count: tuple_count,
        mono_path_count: path_count,
        constant_probability,
        factorial_bound,
        lower_bound,
    })
}

/// Enumerates `x_1 < ... < x_len` in `{1..M}` directly.
fn increasing_tuple_count(f: &GridFunction, ids: &[u32], len: usize, windows: usize) -> Result<BigUint> {
    let grid = f.grid() as usize;
    let k = f.k();
    if len > grid {
        return Ok(BigUint::zero());
    }
    let combos = binomial(BigUint::from(grid), BigUint::from(len));
    if combos > BigUint::from(100_000_000u64) {
        return Err(Error::budget("increasing tuples", combos, 100_000_000u64));
    }
    let mut x: Vec<u32> = (1..=len as u32).collect();
    let mut count = 0u64;
    loop {
        let first = ids[f.index_of(&x[..k])];
        if (1..windows).all(|i| ids[f.index_of(&x[i..i + k])] == first) {
            count += 1;
        }
        // next combination in lexicographic order
        let mut i = len;
        while i > 0 && x[i - 1] as usize == grid - len + i {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        x[i - 1] += 1;
        for j in i..len {
            x[j] = x[j - 1] + 1;
        }
    }
    Ok(BigUint::from(count))
}

/// Minimum over `y in {1..M}^M` of the monochromatic path count of `c_y`.
fn min_path_count_over_samples(f: &GridFunction, ids: &[u32], windows: usize) -> Result<(u64, u64)> {
    let grid = f.grid() as usize;
    let k = f.k();
    let graph = DeBruijnGraph::new(k, grid)?;
    let adj = graph.adjacency()?;
    let words: Vec<Vec<u32>> = graph.vertices().map(|w| w.into_symbols()).collect();
    let total = (grid as u64).pow(grid as u32);
    let mut y = vec![1u32; grid];
    let mut colors = vec![0u32; words.len()];
    let mut window = vec![0u32; k];
    let mut scratch = [Vec::new(), Vec::new()];
    let mut min = u64::MAX;
    let mut examined = 0u64;
    for idx in 0..total {
        let mut rest = idx;
        for yi in y.iter_mut() {
            *yi = (rest % grid as u64) as u32 + 1;
            rest /= grid as u64;
        }
        for (c, word) in colors.iter_mut().zip(&words) {
            for (slot, &a) in window.iter_mut().zip(word) {
                *slot = y[a as usize - 1];
            }
            *c = ids[f.index_of(&window)];
        }
        examined += 1;
        let count = mono_path_count_u64(adj, &colors, windows, &mut scratch)
            .ok_or_else(|| Error::budget("path count", "overflow", u64::MAX))?;
        min = min.min(count);
        if min == 0 {
            break;
        }
    }
    Ok((examined, min))
}
