mod common;

use std::time::Duration;

use common::{all_paths, brute_chromatic, brute_edges, increasing_words, iterated_log2, mono_paths};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use runlab::coloring::{
    chromatic_number, find_mono_path, is_proper, lift_edge_coloring, longest_mono_path, search_coloring,
    SearchLimits, DEFAULT_CHROMATIC_BUDGET,
};
use runlab::{DeBruijnGraph, EdgeColoring, SearchOutcome, VertexColoring};

fn chi(k: usize, m: usize) -> usize {
    chromatic_number(&DeBruijnGraph::new(k, m).unwrap(), DEFAULT_CHROMATIC_BUDGET).unwrap()
}

#[test]
fn chromatic_number_matches_brute_force_on_small_graphs() {
    for m in 1..=7usize {
        for k in 1..=m {
            let words = increasing_words(k, m as u32);
            if words.len() > 10 {
                continue;
            }
            let edges = brute_edges(&words);
            assert_eq!(chi(k, m), brute_chromatic(words.len(), &edges), "D({k},{m})");
        }
    }
}

#[test]
fn log_chromatic_bounded_by_next_level() {
    for m in 2..=8usize {
        for k in 1..=2usize.min(m - 1) {
            let (lo, hi) = (chi(k, m), chi(k + 1, m));
            assert!((lo as f64).log2() <= hi as f64, "k={k} m={m}: {lo} vs {hi}");
        }
    }
}

#[test]
fn chromatic_number_at_least_iterated_log() {
    for m in 2..=8usize {
        for k in 1..=3usize.min(m) {
            let c = chi(k, m) as f64;
            assert!(c >= iterated_log2(m as f64, k - 1), "D({k},{m})");
        }
    }
}

#[test]
fn every_lift_is_proper() {
    for (k, m) in [(1, 4), (1, 5), (2, 4), (2, 5), (3, 6)] {
        let g = DeBruijnGraph::new(k, m).unwrap();
        let edges = g.edge_count() as u32;
        for q in 1..=2u32 {
            if q.pow(edges) > 1 << 16 {
                continue;
            }
            for idx in 0..q.pow(edges) {
                let colors: Vec<u32> = (0..edges).map(|i| idx / q.pow(i) % q).collect();
                let ec = EdgeColoring::new(k, m, q, colors).unwrap();
                match lift_edge_coloring(&g, &ec) {
                    Ok(vc) => {
                        assert!(is_proper(&g, &vc).unwrap());
                        assert!(vc.colors_used() <= 1 << q);
                    }
                    Err(e) => assert!(e.to_string().contains("monochromatic")),
                }
            }
        }
    }
}

#[test]
fn search_results_avoid_mono_paths() {
    let limits = SearchLimits {
        time: Some(Duration::from_secs(20)),
        ..SearchLimits::default()
    };
    for (k, m, r, l) in [(1, 4, 2, 3), (2, 5, 2, 3), (2, 4, 2, 2), (2, 6, 3, 2), (3, 8, 2, 3), (3, 10, 2, 3), (4, 8, 2, 4)] {
        let g = DeBruijnGraph::new(k, m).unwrap();
        match search_coloring(k, m, r, l, &limits).unwrap() {
            SearchOutcome::Found { coloring } => {
                assert_eq!(find_mono_path(&g, &coloring, l).unwrap(), None, "D({k},{m})");
                assert!(longest_mono_path(&g, &coloring).unwrap() < l);
            }
            other => panic!("D({k},{m}) r={r} l={l}: {other:?}"),
        }
    }
}

#[test]
fn exhausted_search_agrees_with_brute_force() {
    // No 2-coloring of D(1,5) avoids monochromatic 3-vertex paths: by
    // brute force over all 32 colorings.
    let words = increasing_words(1, 5);
    let paths = all_paths(5, &brute_edges(&words), 3);
    assert!((0..32u32).all(|idx| {
        let colors: Vec<u32> = (0..5).map(|i| idx >> i & 1).collect();
        mono_paths(&colors, &paths) > 0
    }));
    let out = search_coloring(1, 5, 2, 3, &SearchLimits::default()).unwrap();
    assert_eq!(out, SearchOutcome::Exhausted);
    // Proper colorings are exactly those avoiding 2-vertex paths.
    for (k, m) in [(2, 6), (2, 9), (3, 7)] {
        let c = chi(k, m) as u32;
        let below = search_coloring(k, m, c - 1, 2, &SearchLimits::default()).unwrap();
        assert_eq!(below, SearchOutcome::Exhausted, "D({k},{m})");
        let at = search_coloring(k, m, c, 2, &SearchLimits::default()).unwrap();
        assert!(is_proper(&DeBruijnGraph::new(k, m).unwrap(), at.coloring().unwrap()).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn find_mono_path_agrees_with_enumeration(
        m in 2usize..=7,
        k_off in 0usize..3,
        r in 1u32..=3,
        l in 1usize..=4,
        seed in any::<u64>(),
    ) {
        let k = 1 + k_off.min(m - 1);
        let g = DeBruijnGraph::new(k, m).unwrap();
        let n = g.vertex_count();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let colors: Vec<u32> = (0..n).map(|_| rng.random_range(0..r)).collect();
        let vc = VertexColoring::new(k, m, r, colors.clone()).unwrap();

        // Brute force works on lexicographic words; map them to ranks.
        let words = increasing_words(k, m as u32);
        let rank_of: Vec<usize> = words
            .iter()
            .map(|w| g.rank(&runlab::IncreasingWord::new(w.clone(), m).unwrap()).unwrap().0)
            .collect();
        let edges: Vec<(usize, usize)> =
            brute_edges(&words).into_iter().map(|(i, j)| (rank_of[i], rank_of[j])).collect();
        let paths = all_paths(n, &edges, l);
        let expected = mono_paths(&colors, &paths) > 0;

        let found = find_mono_path(&g, &vc, l).unwrap();
        prop_assert_eq!(found.is_some(), expected);
        if let Some(p) = found {
            prop_assert_eq!(p.vertex_count(), l);
            prop_assert!(p.vertices.windows(2).all(|e| edges.contains(&(e[0], e[1]))));
            prop_assert!(p.vertices.iter().all(|&v| colors[v] == colors[p.vertices[0]]));
        }
    }

    #[test]
    fn coloring_json_round_trip(m in 1usize..=8, seed in any::<u64>()) {
        let k = 1 + (seed as usize) % m;
        let n = DeBruijnGraph::new(k, m).unwrap().vertex_count();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let colors = (0..n).map(|_| rng.random_range(0..3)).collect();
        let vc = VertexColoring::new(k, m, 3, colors).unwrap();
        prop_assert_eq!(VertexColoring::from_json(&vc.to_json()).unwrap(), vc);
    }
}
