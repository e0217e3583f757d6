//! Minimum constant-run probability over discrete grid functions.
//!
//! Every candidate shares the denominator `M^(l+k-1)`, so functions are
//! compared by their favourable counts. Ties go to the lexicographically
//! smallest table.

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::function::{table_len, GridFunction};
use super::runs::{count_chains, grid_power};
use crate::bounds;
use crate::error::{Error, Result};
use crate::serde_util;

/// Default limit on `r^(M^k)` for exhaustive minimization.
pub const DEFAULT_EXHAUSTIVE_LIMIT: u64 = 10_000_000;

const LOCAL_SEARCH_ROUNDS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum MinimizeMode {
    Exhaustive,
    /// Random tables, each improved by single-entry descent.
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct AdversarialMin {
    pub k: usize,
    #[serde(rename = "M")]
    pub grid: u32,
    pub r: u32,
    pub windows: usize,
    #[serde(serialize_with = "serde_util::ratio")]
    pub min_probability: BigRational,
    #[serde(serialize_with = "serde_util::biguint")]
    pub favorable: BigUint,
    pub argmin: Vec<u32>,
    pub functions_checked: u64,
    pub exhaustive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl AdversarialMin {
    pub fn argmin_function(&self) -> GridFunction {
        GridFunction::discrete(self.k, self.grid, self.r, self.argmin.clone())
            .expect("argmin table is valid")
    }
}

fn constant_count(table: &[u32], k: usize, grid: u32, windows: usize) -> BigUint {
    count_chains(table, k, grid, windows, |_| true, |a, b| a == b)
}

/// Table `idx` in lexicographic order (entry 0 most significant).
fn table_at(mut idx: u64, r: u32, len: usize) -> Vec<u32> {
    let mut t = vec![0u32; len];
    for slot in t.iter_mut().rev() {
        *slot = (idx % u64::from(r)) as u32;
        idx /= u64::from(r);
    }
    t
}

/// Exhaustive or sampled minimum of `P(Z_1 = ... = Z_windows)` over all
/// `f: {1..M}^k -> {0..r-1}`.
pub fn adversarial_min(
    k: usize,
    grid: u32,
    r: u32,
    windows: usize,
    mode: MinimizeMode,
    exhaustive_limit: u64,
) -> Result<AdversarialMin> {
    if k < 1 || grid < 1 || r < 1 || windows < 1 {
        return Err(Error::InvalidInput(
            "adversarial_min needs k, M, r, windows >= 1".into(),
        ));
    }
    let len = table_len(k, grid)?;
    let total = grid_power(grid, windows + k - 1);

    let (best_count, best_table, checked, seed) = match mode {
        MinimizeMode::Exhaustive => {
            let count = u64::from(r)
                .checked_pow(len as u32)
                .filter(|&c| c <= exhaustive_limit)
                .ok_or_else(|| {
                    Error::budget("exhaustive function count", format!("{r}^{len}"), exhaustive_limit)
                })?;
            const CHUNK: u64 = 1024;
            let chunks = count.div_ceil(CHUNK);
            let (best, idx) = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let lo = c * CHUNK;
                    let hi = (lo + CHUNK).min(count);
                    let mut table = table_at(lo, r, len);
                    let mut best: Option<(BigUint, u64)> = None;
                    for idx in lo..hi {
                        if idx > lo {
                            increment(&mut table, r);
                        }
                        let n = constant_count(&table, k, grid, windows);
                        if best.as_ref().is_none_or(|(b, _)| n < *b) {
                            best = Some((n, idx));
                        }
                    }
                    best.unwrap()
                })
                .min()
                .unwrap();
            (best, table_at(idx, r, len), count, None)
        }
        MinimizeMode::Sampled { samples, seed } => {
            if samples == 0 {
                return Err(Error::InvalidInput("sampled mode needs samples >= 1".into()));
            }
            let (best, table) = (0..samples)
                .into_par_iter()
                .map(|s| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(s);
                    let table: Vec<u32> = (0..len).map(|_| rng.random_range(0..r)).collect();
                    descend(table, k, grid, r, windows)
                })
                .min()
                .unwrap();
            (best, table, samples, Some(seed))
        }
    };
    let min_probability = BigRational::new(best_count.clone().into(), total.into());
    Ok(AdversarialMin {
        k,
        grid,
        r,
        windows,
        min_probability,
        favorable: best_count,
        argmin: best_table,
        functions_checked: checked,
        exhaustive: matches!(mode, MinimizeMode::Exhaustive),
        seed,
    })
}

fn increment(table: &mut [u32], r: u32) {
    for slot in table.iter_mut().rev() {
        *slot += 1;
        if *slot < r {
            return;
        }
        *slot = 0;
    }
}

/// First-improvement descent over single-entry changes.
fn descend(mut table: Vec<u32>, k: usize, grid: u32, r: u32, windows: usize) -> (BigUint, Vec<u32>) {
    let mut best = constant_count(&table, k, grid, windows);
    for _ in 0..LOCAL_SEARCH_ROUNDS {
        let mut improved = false;
        for i in 0..table.len() {
            let original = table[i];
            for v in 0..r {
                if v == original {
                    continue;
                }
                table[i] = v;
                let n = constant_count(&table, k, grid, windows);
                if n < best {
                    best = n;
                    improved = true;
                    break;
                }
                table[i] = original;
            }
        }
        if !improved {
            break;
        }
    }
    (best, table)
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundReport {
    pub k: u32,
    pub l: u32,
    pub r: u32,
    #[serde(rename = "M")]
    pub grid: u32,
    /// `1 / M^(k+l-1)`.
    #[serde(serialize_with = "serde_util::ratio")]
    pub bound: BigRational,
    pub minimum: AdversarialMin,
    pub holds: bool,
}

/// Compares the worst constant-run probability found on `{1..M}^k`, with `M`
/// the tower constant for `(k, l, r)`, against `1 / M^(k+l-1)`.
///
/// Uses exhaustive minimization when `r^(M^k)` is within `exhaustive_limit`,
/// otherwise sampled descent (reported as non-exhaustive).
pub fn verify_lower_bound(
    k: u32,
    l: u32,
    r: u32,
    samples: u64,
    seed: u64,
    exhaustive_limit: u64,
) -> Result<LowerBoundReport> {
    let m = bounds::m_for(k, l, r)?;
    let grid = m
        .as_integer()
        .and_then(|n| u32::try_from(n).ok())
        .ok_or_else(|| Error::budget("grid size M", m.render(), u32::MAX))?;
    let bound = match bounds::p_lower(k, l, r)?.p_lower.exact() {
        Some(p) => p.clone(),
        None => return Err(Error::budget("lower bound", "not materialized", "exact")),
    };
    let len = table_len(k as usize, grid)?;
    let exhaustive = u64::from(r)
        .checked_pow(len as u32)
        .is_some_and(|c| c <= exhaustive_limit);
    let mode = if exhaustive {
        MinimizeMode::Exhaustive
    } else {
        MinimizeMode::Sampled { samples, seed }
    };
    let minimum = adversarial_min(k as usize, grid, r, l as usize, mode, exhaustive_limit)?;
    let holds = minimum.min_probability >= bound;
    Ok(LowerBoundReport {
        k,
        l,
        r,
        grid,
        bound,
        minimum,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockfactor::runs::{exact_run_probability, RunEvent};

    fn ratio(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn two_point_grid() {
        let res = adversarial_min(1, 2, 2, 2, MinimizeMode::Exhaustive, DEFAULT_EXHAUSTIVE_LIMIT).unwrap();
        assert_eq!(res.min_probability, ratio(1, 2));
        assert_eq!(res.functions_checked, 4);
        // [0,1] is the lexicographically smallest non-constant table.
        assert_eq!(res.argmin, vec![0, 1]);
    }

    #[test]
    fn single_point_grid() {
        for r in 1..4 {
            let res = adversarial_min(1, 1, r, 3, MinimizeMode::Exhaustive, DEFAULT_EXHAUSTIVE_LIMIT).unwrap();
            assert_eq!(res.min_probability, ratio(1, 1));
        }
    }

    #[test]
    fn exhaustive_3x3_matches_brute_force_and_is_reproducible() {
        let res = adversarial_min(2, 3, 2, 2, MinimizeMode::Exhaustive, DEFAULT_EXHAUSTIVE_LIMIT).unwrap();
        assert_eq!(res.functions_checked, 512);
        let again = adversarial_min(2, 3, 2, 2, MinimizeMode::Exhaustive, DEFAULT_EXHAUSTIVE_LIMIT).unwrap();
        assert_eq!(res.argmin, again.argmin);

        let mut best: Option<(BigRational, Vec<u32>)> = None;
        for idx in 0..512u64 {
            let table = table_at(idx, 2, 9);
            let f = GridFunction::discrete(2, 3, 2, table.clone()).unwrap();
            let p = exact_run_probability(&f, RunEvent::Constant, 2).unwrap().probability;
            if best.as_ref().is_none_or(|(b, _)| p < *b) {
                best = Some((p, table));
            }
        }
        let (p, table) = best.unwrap();
        assert_eq!(res.min_probability, p);
        assert_eq!(res.argmin, table);
        let f = res.argmin_function();
        assert_eq!(exact_run_probability(&f, RunEvent::Constant, 2).unwrap().probability, p);
    }

    #[test]
    fn sampled_is_deterministic_and_bounded_by_exhaustive() {
        let mode = MinimizeMode::Sampled { samples: 20, seed: 11 };
        let a = adversarial_min(2, 3, 2, 2, mode, 0).unwrap();
        let b = adversarial_min(2, 3, 2, 2, mode, 0).unwrap();
        assert_eq!(a.argmin, b.argmin);
        assert!(!a.exhaustive);
        let ex = adversarial_min(2, 3, 2, 2, MinimizeMode::Exhaustive, DEFAULT_EXHAUSTIVE_LIMIT).unwrap();
        assert!(a.min_probability >= ex.min_probability);
    }

    #[test]
    fn exhaustive_budget() {
        assert!(matches!(
            adversarial_min(2, 4, 2, 2, MinimizeMode::Exhaustive, 1000),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn lower_bound_one_color() {
        let rep = verify_lower_bound(2, 2, 1, 10, 0, DEFAULT_EXHAUSTIVE_LIMIT).unwrap();
        assert_eq!(rep.minimum.min_probability, ratio(1, 1));
        assert!(rep.holds);
    }
}
