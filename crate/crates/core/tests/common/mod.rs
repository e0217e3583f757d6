//! Naive oracles shared by the integration tests. Each one recomputes a
//! quantity by direct enumeration, without the library's ranking or DP code.
#![allow(dead_code)]

use num_bigint::BigUint;
use rand::Rng;
use runlab::blockfactor::{GridFunction, RunEvent, Value};

/// All strictly increasing `k`-words over `{1..m}`, lexicographic.
pub fn increasing_words(k: usize, m: u32) -> Vec<Vec<u32>> {
    fn go(start: u32, k: usize, m: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for a in start..=m {
            cur.push(a);
            go(a + 1, k, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, k, m, &mut Vec::new(), &mut out);
    out
}

/// The overlap rule: `v = (u_2..u_k, b)`, and for `k = 1` simply `u < v`.
pub fn overlaps(u: &[u32], v: &[u32]) -> bool {
    if u.len() == 1 {
        return u[0] < v[0];
    }
    u[1..] == v[..v.len() - 1] && v[v.len() - 1] > u[u.len() - 1]
}

/// Edges of `D(k,m)` as index pairs into `increasing_words(k, m)`.
pub fn brute_edges(words: &[Vec<u32>]) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for (i, u) in words.iter().enumerate() {
        for (j, v) in words.iter().enumerate() {
            if overlaps(u, v) {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Smallest `r` admitting a proper coloring, by trying every coloring.
pub fn brute_chromatic(n: usize, edges: &[(usize, usize)]) -> usize {
    if n == 0 {
        return 0;
    }
    for r in 1..=n {
        let mut colors = vec![0usize; n];
        loop {
            if edges.iter().all(|&(u, v)| colors[u] != colors[v]) {
                return r;
            }
            let mut i = 0;
            while i < n {
                colors[i] += 1;
                if colors[i] < r {
                    break;
                }
                colors[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
    n
}

/// Every directed path with exactly `len` vertices, by depth-first search.
pub fn all_paths(n: usize, edges: &[(usize, usize)], len: usize) -> Vec<Vec<usize>> {
    let mut out_adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        out_adj[u].push(v);
    }
    let mut paths = Vec::new();
    fn go(adj: &[Vec<usize>], len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        let last = *cur.last().unwrap();
        for &w in &adj[last] {
            cur.push(w);
            go(adj, len, cur, out);
            cur.pop();
        }
    }
    if len == 0 {
        return paths;
    }
    for s in 0..n {
        go(&out_adj, len, &mut vec![s], &mut paths);
    }
    paths
}

pub fn mono_paths(colors: &[u32], paths: &[Vec<usize>]) -> usize {
    paths
        .iter()
        .filter(|p| p.iter().all(|&v| colors[v] == colors[p[0]]))
        .count()
}

/// Counts tuples in `{1..M}^(windows+k-1)` satisfying `event` on all
/// consecutive windows, evaluating `f` pointwise.
pub fn naive_run_count(f: &GridFunction, event: RunEvent, windows: usize) -> BigUint {
    let (k, m) = (f.k(), f.grid());
    let len = windows + k - 1;
    let mut x = vec![1u32; len];
    let mut count = 0u64;
    loop {
        let vals: Vec<Value> = x.windows(k).map(|w| f.eval(w).unwrap()).collect();
        if vals.windows(2).all(|p| match event {
            RunEvent::Constant => p[0] == p[1],
            RunEvent::Increasing => p[0] < p[1],
            RunEvent::Decreasing => p[0] > p[1],
        }) {
            count += 1;
        }
        let mut i = 0;
        while i < len {
            x[i] += 1;
            if x[i] <= m {
                break;
            }
            x[i] = 1;
            i += 1;
        }
        if i == len {
            break;
        }
    }
    BigUint::from(count)
}

/// Strictly increasing tuples `x_1 < ... < x_{windows+k-1}` whose windows all
/// give one `f`-value.
pub fn naive_increasing_constant(f: &GridFunction, windows: usize) -> u64 {
    let len = windows + f.k() - 1;
    increasing_words(len, f.grid())
        .iter()
        .filter(|x| {
            let vals: Vec<Value> = x.windows(f.k()).map(|w| f.eval(w).unwrap()).collect();
            vals.iter().all(|v| *v == vals[0])
        })
        .count() as u64
}

pub fn random_discrete(rng: &mut impl Rng, k: usize, m: u32, r: u32) -> GridFunction {
    let len = (m as usize).pow(k as u32);
    GridFunction::discrete(k, m, r, (0..len).map(|_| rng.random_range(0..r)).collect()).unwrap()
}

/// Small rationals with deliberate repeats, so ties occur.
pub fn random_rational(rng: &mut impl Rng, k: usize, m: u32) -> GridFunction {
    let len = (m as usize).pow(k as u32);
    let table = (0..len)
        .map(|_| {
            let p: i64 = rng.random_range(-3..=3);
            let q: i64 = rng.random_range(1..=3);
            format!("{p}/{q}").parse::<Value>().unwrap()
        })
        .collect();
    GridFunction::rational(k, m, table).unwrap()
}

/// `log2` applied `times` times.
pub fn iterated_log2(x: f64, times: usize) -> f64 {
    (0..times).fold(x, |acc, _| acc.log2())
}
