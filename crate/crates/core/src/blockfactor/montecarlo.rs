//! Seeded Monte-Carlo estimates of run probabilities.
//!
//! Samples are drawn in batches of [`BATCH`]; batch `b` uses stream `b` of a
//! ChaCha8 generator seeded from the user seed, so estimates are identical
//! across platforms and thread counts.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::function::GridFunction;
use super::runs::RunEvent;
use crate::error::{Error, Result};
use crate::serde_util;

pub const BATCH: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Noise {
    /// `U_i` uniform on `{1..M}`.
    Discrete,
    /// `U_i` uniform on `(0, 1]`, fed to `f` as `ceil(M U_i)`.
    ContinuousCeil,
}

impl std::str::FromStr for Noise {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discrete" => Ok(Noise::Discrete),
            "continuous-ceil" => Ok(Noise::ContinuousCeil),
            _ => Err(Error::InvalidInput(format!("unknown noise {s:?}"))),
        }
    }
}

/// A block-factor process `Z_i = f(U_i, ..., U_{i+k-1})`.
#[derive(Debug, Clone)]
pub struct ProcessSpec {
    pub function: GridFunction,
    pub noise: Noise,
}

impl ProcessSpec {
    pub fn new(function: GridFunction, noise: Noise) -> Self {
        ProcessSpec { function, noise }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MCEstimate {
    pub event: RunEvent,
    pub windows: usize,
    pub noise: Noise,
    pub hits: u64,
    pub samples: u64,
    /// `hits / samples`.
    #[serde(serialize_with = "serde_util::ratio")]
    pub estimate: BigRational,
    pub estimate_f64: f64,
    pub std_error: f64,
    pub seed: u64,
}

#[inline]
fn draw(rng: &mut ChaCha8Rng, grid: u32, noise: Noise) -> u32 {
    match noise {
        Noise::Discrete => rng.random_range(1..=grid),
        Noise::ContinuousCeil => {
            let u = 1.0 - rng.random::<f64>();
            ((f64::from(grid) * u).ceil() as u32).clamp(1, grid)
        }
    }
}

/// Estimates `P(event holds on windows 1..=windows)` from `samples` draws.
pub fn mc_estimate(spec: &ProcessSpec, event: RunEvent, windows: usize, samples: u64, seed: u64) -> Result<MCEstimate> {
    if samples == 0 || windows == 0 {
        return Err(Error::InvalidInput("need samples >= 1 and windows >= 1".into()));
    }
    let f = &spec.function;
    let (k, grid) = (f.k(), f.grid());
    let table = f.ranked()?;
    let len = windows + k - 1;
    let batches = samples.div_ceil(BATCH);
    let hits: u64 = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let n = BATCH.min(samples - b * BATCH);
            let mut u = vec![0u32; len];
            let mut hits = 0u64;
            for _ in 0..n {
                for x in u.iter_mut() {
                    *x = draw(&mut rng, grid, spec.noise);
                }
                let mut prev = table.ids[f.index_of(&u[..k])];
                let ok = u.windows(k).skip(1).all(|w| {
                    let cur = table.ids[f.index_of(w)];
                    let step = event.holds(&prev, &cur);
                    prev = cur;
                    step
                });
                hits += u64::from(ok);
            }
            hits
        })
        .sum();
    let p = hits as f64 / samples as f64;
    Ok(MCEstimate {
        event,
        windows,
        noise: spec.noise,
        hits,
        samples,
        estimate: BigRational::new(hits.into(), samples.into()),
        estimate_f64: p,
        std_error: (p * (1.0 - p) / samples as f64).sqrt(),
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockfactor::runs::exact_run_probability;
    use num_traits::ToPrimitive;

    fn diagonal() -> GridFunction {
        GridFunction::tabulate(2, 2, 2, |z| u32::from(z[0] == z[1])).unwrap()
    }

    #[test]
    fn constant_function_always_hits() {
        let spec = ProcessSpec::new(GridFunction::constant(2, 5, 3, 1).unwrap(), Noise::Discrete);
        for seed in [0, 1, 99] {
            let est = mc_estimate(&spec, RunEvent::Constant, 4, 1000, seed).unwrap();
            assert_eq!(est.hits, 1000);
            assert_eq!(est.std_error, 0.0);
        }
    }

    #[test]
    fn diagonal_indicator_near_half() {
        let spec = ProcessSpec::new(diagonal(), Noise::Discrete);
        let est = mc_estimate(&spec, RunEvent::Constant, 2, 100_000, 7).unwrap();
        assert!((est.estimate_f64 - 0.5).abs() <= 5.0 * 0.0016);
    }

    #[test]
    fn reproducible_and_seed_sensitive() {
        let spec = ProcessSpec::new(diagonal(), Noise::ContinuousCeil);
        let a = mc_estimate(&spec, RunEvent::Constant, 3, 25_001, 3).unwrap();
        let b = mc_estimate(&spec, RunEvent::Constant, 3, 25_001, 3).unwrap();
        let c = mc_estimate(&spec, RunEvent::Constant, 3, 25_001, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.hits, c.hits);
    }

    #[test]
    fn noise_modes_agree_with_exact() {
        let f = GridFunction::tabulate(1, 3, 3, |z| z[0] - 1).unwrap();
        let exact = exact_run_probability(&f, RunEvent::Increasing, 2).unwrap().probability.to_f64().unwrap();
        for noise in [Noise::Discrete, Noise::ContinuousCeil] {
            let est = mc_estimate(&ProcessSpec::new(f.clone(), noise), RunEvent::Increasing, 2, 50_000, 1).unwrap();
            assert!((est.estimate_f64 - exact).abs() <= 5.0 * est.std_error);
        }
    }
}
