//! Exact run probabilities by dynamic programming over windows.
//!
//! For uniform noise on `{1..M}` every tuple in `{1..M}^(l+k-1)` is equally
//! likely, so a run probability is a count of favourable tuples over `M^(l+k-1)`.
//! The count is accumulated window by window: `A_j[w]` is the number of
//! prefixes whose `j`-th window is `w` and whose windows so far satisfy the run
//! relation. Consecutive windows overlap in `k-1` coordinates, so the
//! predecessors of `w'` are the `M` windows `y + M * (w' mod M^(k-1))`.

use std::ops::AddAssign;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::function::{table_len, GridFunction, RankedTable, Value};
use crate::error::{Error, Result};
use crate::serde_util;

/// Default limit on `M^(k+1) * (l - 1)` transitions.
pub const DEFAULT_EXACT_BUDGET: u64 = 200_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunEvent {
    Constant,
    Increasing,
    Decreasing,
}

impl RunEvent {
    pub const ALL: [RunEvent; 3] = [RunEvent::Increasing, RunEvent::Constant, RunEvent::Decreasing];

    /// Whether consecutive window values `a` then `b` continue the run.
    #[inline]
    pub fn holds<T: Ord>(self, a: &T, b: &T) -> bool {
        match self {
            RunEvent::Constant => a == b,
            RunEvent::Increasing => a < b,
            RunEvent::Decreasing => a > b,
        }
    }
}

impl std::str::FromStr for RunEvent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(RunEvent::Constant),
            "increasing" => Ok(RunEvent::Increasing),
            "decreasing" => Ok(RunEvent::Decreasing),
            _ => Err(Error::InvalidInput(format!("unknown event {s:?}"))),
        }
    }
}

/// Exact probability of a run event, with the counts behind it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub event: RunEvent,
    /// Run length in windows.
    pub windows: usize,
    #[serde(serialize_with = "serde_util::biguint")]
    pub favorable: BigUint,
    /// `M^(windows + k - 1)`.
    #[serde(serialize_with = "serde_util::biguint")]
    pub total: BigUint,
    #[serde(serialize_with = "serde_util::ratio")]
    pub probability: BigRational,
}

impl RunReport {
    fn new(event: RunEvent, windows: usize, favorable: BigUint, total: BigUint) -> Self {
        debug_assert!(favorable <= total);
        let probability = BigRational::new(favorable.clone().into(), total.clone().into());
        RunReport {
            event,
            windows,
            favorable,
            total,
            probability,
        }
    }
}

pub(crate) fn grid_power(grid: u32, exp: usize) -> BigUint {
    BigUint::from(grid).pow(exp as u32)
}

fn check_budget(k: usize, grid: u32, windows: usize, budget: u64) -> Result<()> {
    let per_step = u128::from(grid).pow(k as u32 + 1);
    let work = per_step.saturating_mul(windows.saturating_sub(1) as u128);
    if work > u128::from(budget) {
        return Err(Error::budget("exact DP transitions", work, budget));
    }
    Ok(())
}

/// Counts tuples in `{1..M}^(windows+k-1)` whose first window id passes
/// `start` and whose consecutive window ids all satisfy `rel`.
pub(crate) fn count_chains(
    ids: &[u32],
    k: usize,
    grid: u32,
    windows: usize,
    start: impl Fn(u32) -> bool,
    rel: impl Fn(u32, u32) -> bool,
) -> BigUint {
    // u128 is exact whenever the total M^(windows+k-1) fits.
    let bits = (windows + k - 1) as f64 * f64::from(grid).log2();
    if bits < 126.0 {
        BigUint::from(chain_dp::<u128>(ids, grid, windows, start, rel))
    } else {
        chain_dp::<BigUint>(ids, grid, windows, start, rel)
    }
}

fn chain_dp<T>(
    ids: &[u32],
    grid: u32,
    windows: usize,
    start: impl Fn(u32) -> bool,
    rel: impl Fn(u32, u32) -> bool,
) -> T
where
    T: Clone + Zero + One + for<'a> AddAssign<&'a T>,
{
    assert!(windows >= 1);
    let m = grid as usize;
    let n = ids.len();
    let head_count = n / m; // M^(k-1)
    let mut cur: Vec<T> = ids
        .iter()
        .map(|&id| if start(id) { T::one() } else { T::zero() })
        .collect();
    let mut next: Vec<T> = vec![T::zero(); n];
    for _ in 1..windows {
        for (w, slot) in next.iter_mut().enumerate() {
            let id = ids[w];
            let base = (w % head_count) * m;
            let mut acc = T::zero();
            for prev in base..base + m {
                if rel(ids[prev], id) && !cur[prev].is_zero() {
                    acc += &cur[prev];
                }
            }
            *slot = acc;
        }
        std::mem::swap(&mut cur, &mut next);
    }
    let mut total = T::zero();
    for c in &cur {
        total += c;
    }
    total
}

/// The sign function `g` on windows of length `k+1`:
/// `g = -1, 0, +1` according as `f(x_1..x_k)` is `>`, `=`, `<` `f(x_2..x_{k+1})`.
pub fn derived_sign_function(f: &GridFunction) -> Result<GridFunction> {
    let ranked = f.ranked()?;
    let k = f.k();
    let grid = f.grid();
    let len = table_len(k + 1, grid)?;
    let inner = ranked.ids.len();
    let table = (0..len)
        .map(|j| {
            let first = ranked.ids[j % inner];
            let second = ranked.ids[j / grid as usize];
            Value::Int(match first.cmp(&second) {
                std::cmp::Ordering::Greater => -1,
                std::cmp::Ordering::Equal => 0,
                std::cmp::Ordering::Less => 1,
            })
        })
        .collect();
    GridFunction::rational(k + 1, grid, table)
}

fn check_windows(windows: usize) -> Result<()> {
    if windows == 0 {
        return Err(Error::InvalidInput("run length must be at least 1 window".into()));
    }
    Ok(())
}

/// Number of tuples whose `windows` consecutive windows all equal `value`.
pub fn value_run_count(f: &GridFunction, value: &Value, windows: usize) -> Result<BigUint> {
    check_windows(windows)?;
    check_budget(f.k(), f.grid(), windows, DEFAULT_EXACT_BUDGET)?;
    let ranked = f.ranked()?;
    Ok(match ranked.id_of(value) {
        Some(target) => count_chains(
            &ranked.ids,
            f.k(),
            f.grid(),
            windows,
            |id| id == target,
            |a, b| a == b,
        ),
        None => BigUint::zero(),
    })
}

/// `P(Z_1 = ... = Z_windows = value)`.
pub fn value_run_probability(f: &GridFunction, value: &Value, windows: usize) -> Result<BigRational> {
    let count = value_run_count(f, value, windows)?;
    let total = grid_power(f.grid(), windows + f.k() - 1);
    Ok(BigRational::new(count.into(), total.into()))
}

/// Exact probability of a constant or monotone run of `windows` windows.
///
/// Monotone runs are reduced to constant runs of the sign function: an
/// increasing run of `l` windows of `f` is a run of `+1` over `l-1` windows of
/// `g`, and both live on the same `l+k-1` coordinates.
pub fn exact_run_probability(f: &GridFunction, event: RunEvent, windows: usize) -> Result<RunReport> {
    exact_run_probability_with_budget(f, event, windows, DEFAULT_EXACT_BUDGET)
}

pub fn exact_run_probability_with_budget(
    f: &GridFunction,
    event: RunEvent,
    windows: usize,
    budget: u64,
) -> Result<RunReport> {
    check_windows(windows)?;
    let total = grid_power(f.grid(), windows + f.k() - 1);
    if windows == 1 {
        return Ok(RunReport::new(event, 1, total.clone(), total));
    }
    let favorable = match event {
        RunEvent::Constant => {
            check_budget(f.k(), f.grid(), windows, budget)?;
            let ranked = f.ranked()?;
            count_chains(&ranked.ids, f.k(), f.grid(), windows, |_| true, |a, b| a == b)
        }
        RunEvent::Increasing | RunEvent::Decreasing => {
            check_budget(f.k() + 1, f.grid(), windows - 1, budget)?;
            let g = derived_sign_function(f)?;
            let target = Value::Int(if event == RunEvent::Increasing { 1 } else { -1 });
            value_run_count(&g, &target, windows - 1)?
        }
    };
    Ok(RunReport::new(event, windows, favorable, total))
}

/// Same count as [`exact_run_probability`], but tracking the previous window
/// value directly instead of going through the sign function.
pub fn run_count_direct(f: &GridFunction, event: RunEvent, windows: usize) -> Result<BigUint> {
    check_windows(windows)?;
    check_budget(f.k(), f.grid(), windows, DEFAULT_EXACT_BUDGET)?;
    let ranked: RankedTable = f.ranked()?;
    Ok(count_chains(
        &ranked.ids,
        f.k(),
        f.grid(),
        windows,
        |_| true,
        |a, b| event.holds(&a, &b),
    ))
}
