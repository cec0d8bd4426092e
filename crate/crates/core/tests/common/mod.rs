//! Helpers shared by the integration tests: an independent census of
//! admissible graphs and seeded random graph sums.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dqgraph::rational::ratio;
use dqgraph::{enumerate_graphs, DirectedGraph, GraphFilter, GraphSum};

/// Raw `[L, R]` targets: arguments are `0..m`, internal vertex `k` is `m + k`.
pub type RawEdges = Vec<[usize; 2]>;

/// Census of `K_{n,m}` computed by brute force, without the enumerator or the
/// canonicalizer.
#[derive(Debug, Default)]
pub struct Census {
    pub labeled: u64,
    pub labeled_with_wheel: u64,
    /// Orbit keys of the nonzero classes.
    pub classes: BTreeSet<RawEdges>,
    /// Orbit keys of the classes that equal minus themselves.
    pub zero_classes: BTreeSet<RawEdges>,
}

/// Every labeled admissible graph: one nested loop over the ordered target
/// pairs of each internal vertex.
pub fn labeled_graphs(n: usize, m: usize) -> Vec<RawEdges> {
    let total = n + m;
    let mut out = Vec::new();
    let mut edges = vec![[0usize; 2]; n];
    fn fill(k: usize, n: usize, m: usize, total: usize, edges: &mut RawEdges, out: &mut Vec<RawEdges>) {
        if k == n {
            let mut hit = vec![false; m];
            for &[l, r] in edges.iter() {
                for t in [l, r] {
                    if t < m {
                        hit[t] = true;
                    }
                }
            }
            if hit.iter().all(|&h| h) {
                out.push(edges.clone());
            }
            return;
        }
        let me = m + k;
        for l in 0..total {
            for r in 0..total {
                if l != me && r != me && l != r {
                    edges[k] = [l, r];
                    fill(k + 1, n, m, total, edges, out);
                }
            }
        }
    }
    fill(0, n, m, total, &mut edges, &mut out);
    out
}

/// Kahn's algorithm on the internal subgraph.
pub fn raw_has_wheel(edges: &RawEdges, m: usize) -> bool {
    let n = edges.len();
    let mut alive = vec![true; n];
    loop {
        let sink = (0..n).find(|&k| alive[k] && edges[k].iter().all(|&t| t < m || !alive[t - m]));
        match sink {
            Some(k) => alive[k] = false,
            None => return alive.iter().any(|&a| a),
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Applies `perm` to internal labels and exchanges L/R at the vertices in
/// `flips` (a bit mask over old labels).
pub fn act(edges: &RawEdges, m: usize, perm: &[usize], flips: u32) -> RawEdges {
    let map = |t: usize| if t < m { t } else { m + perm[t - m] };
    let mut out = vec![[0usize; 2]; edges.len()];
    for (k, &[l, r]) in edges.iter().enumerate() {
        out[perm[k]] = if flips >> k & 1 == 1 { [map(r), map(l)] } else { [map(l), map(r)] };
    }
    out
}

/// `(orbit key, is_zero)`: the key is the least image under the whole group;
/// the class is zero when an odd number of exchanges fixes the graph.
pub fn orbit(edges: &RawEdges, m: usize) -> (RawEdges, bool) {
    let n = edges.len();
    let mut key = edges.clone();
    let mut zero = false;
    for perm in permutations(n) {
        for flips in 0..(1u32 << n) {
            let image = act(edges, m, &perm, flips);
            if image == *edges && flips.count_ones() % 2 == 1 {
                zero = true;
            }
            if image < key {
                key = image;
            }
        }
    }
    (key, zero)
}

pub fn census(n: usize, m: usize) -> Census {
    let mut c = Census::default();
    for g in labeled_graphs(n, m) {
        c.labeled += 1;
        if raw_has_wheel(&g, m) {
            c.labeled_with_wheel += 1;
        }
        let (key, zero) = orbit(&g, m);
        if zero {
            c.zero_classes.insert(key);
        } else {
            c.classes.insert(key);
        }
    }
    c
}

pub fn raw_edges(g: &DirectedGraph) -> RawEdges {
    g.edges_usize()
}

pub fn all_classes(n_max: usize, m: usize) -> Vec<DirectedGraph> {
    (1..=n_max).flat_map(|n| enumerate_graphs(n, m, GraphFilter::All).unwrap().classes).collect()
}

/// A sum of one to four classes of `K_{n,2}`, `n ≤ n_max`, with coefficients
/// `p/q`, `p ∈ [-5, 5] \ {0}`, `q ∈ [1, 4]`.
pub fn random_sum(rng: &mut ChaCha8Rng, pool: &[DirectedGraph]) -> GraphSum {
    loop {
        let mut s = GraphSum::zero(pool[0].m());
        for _ in 0..rng.gen_range(1..=4) {
            let g = &pool[rng.gen_range(0..pool.len())];
            let mut p: i64 = rng.gen_range(-5..=4);
            if p >= 0 {
                p += 1;
            }
            s.add_graph(g, &ratio(p, rng.gen_range(1..=4)));
        }
        if !s.is_empty() {
            return s;
        }
    }
}

pub fn seeded_sums(seed: u64, count: usize, n_max: usize) -> Vec<GraphSum> {
    let pool = all_classes(n_max, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_sum(&mut rng, &pool)).collect()
}
