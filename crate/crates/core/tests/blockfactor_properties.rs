mod common;

use common::{naive_increasing_constant, naive_run_count, random_discrete, random_rational};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use runlab::blockfactor::{
    construct_h, counting_bridge_check, derived_sign_function, exact_run_probability, mc_estimate,
    mono_path_count, run_count_direct, value_run_count, BridgeOptions, GridFunction, Noise, ProcessSpec,
    RunEvent, Value,
};
use runlab::coloring::{search_coloring, SearchLimits};
use runlab::{DeBruijnGraph, VertexColoring};

fn dims() -> impl Strategy<Value = (usize, u32, usize)> {
    // (k, M, windows) with M^(windows+k-1) at most 4^5.
    (1usize..=3, 1u32..=4, 1usize..=3).prop_filter("small", |&(k, m, l)| m.pow((l + k - 1) as u32) <= 1024)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dp_matches_enumeration((k, m, l) in dims(), r in 1u32..=3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_discrete(&mut rng, k, m, r);
        for event in RunEvent::ALL {
            let rep = exact_run_probability(&f, event, l).unwrap();
            prop_assert_eq!(&rep.favorable, &naive_run_count(&f, event, l), "{:?}", event);
            prop_assert_eq!(&rep.total, &BigUint::from(m).pow((l + k - 1) as u32));
            prop_assert!(rep.favorable <= rep.total);
        }
    }

    #[test]
    fn rational_trichotomy_and_reduction((k, m, l) in dims(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_rational(&mut rng, k, m);
        let reps: Vec<_> = RunEvent::ALL.iter().map(|&e| exact_run_probability(&f, e, l).unwrap()).collect();
        prop_assert!(reps.iter().any(|r| r.favorable > BigUint::ZERO));
        for (rep, &e) in reps.iter().zip(&RunEvent::ALL) {
            prop_assert_eq!(&rep.favorable, &run_count_direct(&f, e, l).unwrap());
        }
        if l >= 2 {
            let g = derived_sign_function(&f).unwrap();
            let zero_run = value_run_count(&g, &Value::Int(0), l - 1).unwrap();
            prop_assert_eq!(&reps[1].favorable, &zero_run);
        }
    }

    #[test]
    fn sign_function_matches_comparison(k in 1usize..=2, m in 1u32..=4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_rational(&mut rng, k, m);
        let g = derived_sign_function(&f).unwrap();
        prop_assert_eq!(g.k(), k + 1);
        let len = (m as usize).pow(k as u32 + 1);
        let mut z = vec![0u32; k + 1];
        for i in 0..len {
            runlab::blockfactor::coords_into(i, m, &mut z);
            let (a, b) = (f.eval(&z[..k]).unwrap(), f.eval(&z[1..]).unwrap());
            let expected = match a.cmp(&b) {
                std::cmp::Ordering::Greater => -1,
                std::cmp::Ordering::Equal => 0,
                std::cmp::Ordering::Less => 1,
            };
            prop_assert_eq!(g.eval(&z).unwrap(), Value::Int(expected));
        }
    }

    #[test]
    fn bridge_identity(k in 2usize..=3, m in 1u32..=6, r in 1u32..=3, l in 1usize..=3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_discrete(&mut rng, k, m, r);
        let opts = BridgeOptions { coloring_limit: 0 };
        let rep = counting_bridge_check(&f, l, &opts).unwrap();
        let naive = naive_increasing_constant(&f, l);
        prop_assert_eq!(rep.increasing_tuple_count.to_u64(), Some(naive));
        prop_assert_eq!(&rep.mono_path_count, &rep.increasing_tuple_count);
    }

    #[test]
    fn grid_file_round_trip(k in 1usize..=2, m in 1u32..=4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_rational(&mut rng, k, m);
        let back = GridFunction::from_json(&f.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.values().unwrap(), f.values().unwrap());
        let d = random_discrete(&mut rng, k, m, 3);
        let back = GridFunction::from_json(&d.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.values().unwrap(), d.values().unwrap());
        prop_assert_eq!(back.r(), Some(3));
    }
}

#[test]
fn bridge_lower_bound_holds_on_small_grids() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for m in 3..=5u32 {
        let f = random_discrete(&mut rng, 2, m, 2);
        let rep = counting_bridge_check(&f, 2, &BridgeOptions::default()).unwrap();
        let lb = rep.lower_bound.expect("M^M is within the default limit");
        assert!(lb.holds);
        assert!(rep.constant_probability >= lb.implied_bound);
    }
}

#[test]
fn mono_path_counts_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (k, m) in [(1, 5), (2, 5), (2, 6), (3, 6)] {
        let g = DeBruijnGraph::new(k, m).unwrap();
        let words = common::increasing_words(k, m as u32);
        let rank_of: Vec<usize> = words
            .iter()
            .map(|w| g.rank(&runlab::IncreasingWord::new(w.clone(), m).unwrap()).unwrap().0)
            .collect();
        let edges: Vec<(usize, usize)> = common::brute_edges(&words)
            .into_iter()
            .map(|(i, j)| (rank_of[i], rank_of[j]))
            .collect();
        let colors: Vec<u32> = (0..g.vertex_count())
            .map(|_| rand::Rng::random_range(&mut rng, 0..2))
            .collect();
        let vc = VertexColoring::new(k, m, 2, colors.clone()).unwrap();
        for l in 0..=4 {
            let paths = common::all_paths(g.vertex_count(), &edges, l);
            let expected = common::mono_paths(&colors, &paths);
            assert_eq!(mono_path_count(&g, &vc, l).unwrap(), BigUint::from(expected), "D({k},{m}) l={l}");
        }
    }
}

#[test]
fn h_is_reversal_symmetric_on_monotone_inputs() {
    let vc = search_coloring(3, 9, 2, 3, &SearchLimits::default())
        .unwrap()
        .coloring()
        .cloned()
        .unwrap();
    let h = construct_h(&vc).unwrap();
    for w in common::increasing_words(3, 9) {
        let rev: Vec<u32> = w.iter().rev().copied().collect();
        assert_eq!(h.eval(&w).unwrap(), h.eval(&rev).unwrap());
    }
    // The materialized table agrees with the rule everywhere.
    let t = h.materialize().unwrap();
    assert!(t.is_tabular());
    assert_eq!(t.values().unwrap(), h.values().unwrap());
}

#[test]
fn noise_modes_agree_statistically() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..6u64 {
        let f = random_discrete(&mut rng, 2, 3, 2);
        let a = mc_estimate(&ProcessSpec::new(f.clone(), Noise::Discrete), RunEvent::Constant, 2, 40_000, i).unwrap();
        let b = mc_estimate(&ProcessSpec::new(f, Noise::ContinuousCeil), RunEvent::Constant, 2, 40_000, i + 100).unwrap();
        let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        assert!((a.estimate_f64 - b.estimate_f64).abs() <= 5.0 * se.max(1e-12));
    }
}
