//! The adversarial grid function `h` built from a path-avoiding 2-coloring.
//!
//! For a coloring `g` of `D(k, M)` with no monochromatic path of `k` vertices:
//!
//! * `h(z) = g(z)` if `z` is strictly increasing,
//! * `h(z) = g(reverse z)` if `z` is strictly decreasing,
//! * `h(z) = 0` if two coordinates coincide,
//! * `h(z) = α(z_2, z_3)` otherwise, where `α(x, y) = 0` iff `x < y`.
//!
//! On `3k` distinct coordinates the `2k + 1` overlapping windows of `h` are
//! never all equal.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::function::GridFunction;
use crate::coloring::{find_mono_path, CheckMode, VertexColoring};
use crate::debruijn::DeBruijnGraph;
use crate::error::{Error, Result};
use crate::serde_util;

/// Exhaustive checks are allowed up to this many ordered distinct tuples.
pub const DEFAULT_TUPLE_LIMIT: u64 = 100_000_000;

const SAMPLE_BATCH: u64 = 10_000;

#[derive(Debug, Clone)]
pub(crate) struct AdversarialRule {
    k: usize,
    graph: DeBruijnGraph,
    coloring: VertexColoring,
}

impl AdversarialRule {
    pub(crate) fn k(&self) -> usize {
        self.k
    }

    pub(crate) fn grid(&self) -> u32 {
        self.graph.m() as u32
    }

    pub(crate) fn coloring(&self) -> &VertexColoring {
        &self.coloring
    }

    pub(crate) fn graph(&self) -> &DeBruijnGraph {
        &self.graph
    }

    /// `z` must be a point of `{1..M}^k`.
    pub(crate) fn eval(&self, z: &[u32]) -> u32 {
        let k = self.k;
        if z.windows(2).all(|p| p[0] < p[1]) {
            return self.coloring.colors[self.graph.rank_symbols(z)];
        }
        if z.windows(2).all(|p| p[0] > p[1]) {
            let mut rev = z.to_vec();
            rev.reverse();
            return self.coloring.colors[self.graph.rank_symbols(&rev)];
        }
        if (0..k).any(|i| z[i + 1..].contains(&z[i])) {
            return 0;
        }
        u32::from(z[1] >= z[2])
    }
}

/// Builds `h` from a coloring of `D(k, M)` with at most two colors.
pub fn construct_h(g: &VertexColoring) -> Result<GridFunction> {
    g.validate()?;
    if g.k < 3 {
        return Err(Error::InvalidDimension(format!(
            "h reads its 2nd and 3rd coordinates, so k >= 3 is required (got k={})",
            g.k
        )));
    }
    if g.r > 2 {
        return Err(Error::InvalidInput(format!(
            "h needs a coloring with at most 2 colors, got r={}",
            g.r
        )));
    }
    let grid = u32::try_from(g.m).map_err(|_| Error::InvalidDimension(format!("M={} too large", g.m)))?;
    let graph = DeBruijnGraph::new(g.k, grid as usize)?;
    Ok(GridFunction::from_rule(AdversarialRule {
        k: g.k,
        graph,
        coloring: g.clone(),
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct ImpossibilityReport {
    pub k: usize,
    #[serde(rename = "M")]
    pub grid: u32,
    pub windows: usize,
    pub coordinates: usize,
    pub mode: CheckMode,
    /// Ordered tuples of distinct coordinates covered by the check.
    #[serde(serialize_with = "serde_util::biguint")]
    pub tuples_checked: BigUint,
    /// `M! / (M - 3k)!`.
    #[serde(serialize_with = "serde_util::biguint")]
    pub tuple_space: BigUint,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub violations: u64,
}

fn falling_factorial(n: u64, len: u64) -> BigUint {
    if len > n {
        return BigUint::zero();
    }
    (n - len + 1..=n).fold(BigUint::one(), |acc, x| acc * x)
}

/// Checks that no `3k` distinct coordinates make all `2k + 1` windows of `h`
/// equal. Any violation is returned as [`Error::ConstructionViolation`].
pub fn verify_impossibility(h: &GridFunction, mode: CheckMode, samples: u64, seed: u64) -> Result<ImpossibilityReport> {
    verify_impossibility_with_limit(h, mode, samples, seed, DEFAULT_TUPLE_LIMIT)
}

pub fn verify_impossibility_with_limit(
    h: &GridFunction,
    mode: CheckMode,
    samples: u64,
    seed: u64,
    tuple_limit: u64,
) -> Result<ImpossibilityReport> {
    let rule = h
        .adversarial_rule()
        .ok_or_else(|| Error::InvalidInput("verify_impossibility needs h from construct_h".into()))?;
    let k = rule.k();
    if find_mono_path(rule.graph(), rule.coloring(), k)?.is_some() {
        return Err(Error::InvalidInput(format!(
            "the coloring behind h has a monochromatic path of {k} vertices"
        )));
    }
    let grid = rule.grid();
    let len = 3 * k;
    let space = falling_factorial(u64::from(grid), len as u64);
    let mut report = ImpossibilityReport {
        k,
        grid,
        windows: 2 * k + 1,
        coordinates: len,
        mode,
        tuples_checked: BigUint::zero(),
        tuple_space: space.clone(),
        seed: None,
        violations: 0,
    };
    if space.is_zero() {
        return Ok(report);
    }
    match mode {
        CheckMode::Exhaustive => {
            if space > BigUint::from(tuple_limit) {
                return Err(Error::budget("distinct tuples", &space, tuple_limit));
            }
            let firsts: Vec<Option<Vec<u32>>> = (1..=grid)
                .into_par_iter()
                .map(|first| {
                    let mut z = vec![first];
                    let mut used = vec![false; grid as usize + 1];
                    used[first as usize] = true;
                    extend(rule, len, &mut z, &mut used, None)
                })
                .collect();
            if let Some(tuple) = firsts.into_iter().flatten().next() {
                return Err(Error::ConstructionViolation { tuple });
            }
            report.tuples_checked = space;
        }
        CheckMode::Sampled => {
            if samples == 0 {
                return Err(Error::InvalidInput("sampled mode needs samples >= 1".into()));
            }
            let batches = samples.div_ceil(SAMPLE_BATCH);
            let hit = (0..batches).into_par_iter().find_map_first(|b| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(b);
                let n = SAMPLE_BATCH.min(samples - b * SAMPLE_BATCH);
                let mut z = vec![0u32; len];
                (0..n).find_map(|_| {
                    for (slot, i) in z.iter_mut().zip(index::sample(&mut rng, grid as usize, len)) {
                        *slot = i as u32 + 1;
                    }
                    all_windows_equal(rule, &z).then(|| z.clone())
                })
            });
            if let Some(tuple) = hit {
                return Err(Error::ConstructionViolation { tuple });
            }
            report.tuples_checked = BigUint::from(samples);
            report.seed = Some(seed);
        }
    }
    Ok(report)
}

fn all_windows_equal(rule: &AdversarialRule, z: &[u32]) -> bool {
    let k = rule.k();
    let first = rule.eval(&z[..k]);
    z.windows(k).skip(1).all(|w| rule.eval(w) == first)
}

/// Depth-first extension of a distinct prefix, in lexicographic order.
/// Prunes as soon as two completed windows disagree.
fn extend(
    rule: &AdversarialRule,
    len: usize,
    z: &mut Vec<u32>,
    used: &mut [bool],
    value: Option<u32>,
) -> Option<Vec<u32>> {
    let k = rule.k();
    if z.len() == len {
        return Some(z.clone());
    }
    for x in 1..used.len() as u32 {
        if used[x as usize] {
            continue;
        }
        z.push(x);
        used[x as usize] = true;
        let mut next = value;
        let mut alive = true;
        if z.len() >= k {
            let v = rule.eval(&z[z.len() - k..]);
            match value {
                Some(prev) if prev != v => alive = false,
                _ => next = Some(v),
            }
        }
        let found = if alive { extend(rule, len, z, used, next) } else { None };
        used[x as usize] = false;
        z.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

#[derive(Debug, Clone, Serialize)]
pub struct DistinctnessReport {
    pub k: usize,
    #[serde(rename = "M")]
    pub grid: u64,
    /// `∏_{j<3k} (1 - j/M)`.
    #[serde(serialize_with = "serde_util::ratio")]
    pub product: BigRational,
    /// `1 - 9k²/M`.
    #[serde(serialize_with = "serde_util::ratio")]
    pub rhs: BigRational,
    /// `M! / ((M - 3k)! M^(3k))`, computed by counting.
    #[serde(serialize_with = "serde_util::ratio")]
    pub distinct_probability: BigRational,
    /// False when `M < 3k`, where the product is zero.
    pub meaningful: bool,
    pub holds: bool,
}

pub fn distinctness_bound_check(k: usize, grid: u64) -> Result<DistinctnessReport> {
    if k < 1 || grid < 1 {
        return Err(Error::InvalidDimension(format!(
            "need k >= 1 and M >= 1, got k={k}, M={grid}"
        )));
    }
    let n = 3 * k as u64;
    let m = BigRational::from_integer(grid.into());
    let product = (0..n).fold(BigRational::one(), |acc, j| {
        acc * (BigRational::one() - BigRational::from_integer(j.into()) / &m)
    });
    let rhs = BigRational::one() - BigRational::from_integer((9 * (k as u64).pow(2)).into()) / &m;
    let distinct_probability = BigRational::new(
        falling_factorial(grid, n).into(),
        BigUint::from(grid).pow(n as u32).into(),
    );
    if distinct_probability != product {
        return Err(Error::IdentityViolation(format!(
            "product {product} differs from the counted probability {distinct_probability}"
        )));
    }
    let holds = product > rhs;
    Ok(DistinctnessReport {
        k,
        grid,
        product,
        rhs,
        distinct_probability,
        meaningful: grid >= n,
        holds,
    })
}
