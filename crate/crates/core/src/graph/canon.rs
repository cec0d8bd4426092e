//! Canonical representatives of graph orbits under relabeling of internal
//! vertices and exchange of the L/R edges at each internal vertex.
//!
//! Exchanging L and R at one vertex flips the sign of the operator (the
//! bivector is antisymmetric), relabeling does not. For a fixed relabeling the
//! lexicographically smallest encoding has every pair sorted, so the search
//! runs over the `n!` relabelings only and the swap pattern follows.

use std::sync::OnceLock;

use super::digraph::DirectedGraph;

/// A canonical representative together with the sign relating it to the
/// graph it was computed from: `graph = sign * rep` as operators.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GraphClass {
    pub rep: DirectedGraph,
    /// One of `-1`, `0`, `1`. Zero marks a class equal to minus itself.
    pub sign: i8,
}

impl GraphClass {
    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }
}

const CACHED_PERMUTATIONS: usize = 7;

fn permutations(n: usize) -> std::borrow::Cow<'static, [Vec<usize>]> {
    static CACHE: OnceLock<Vec<Vec<Vec<usize>>>> = OnceLock::new();
    if n <= CACHED_PERMUTATIONS {
        let cache = CACHE.get_or_init(|| (0..=CACHED_PERMUTATIONS).map(all_permutations).collect());
        std::borrow::Cow::Borrowed(&cache[n])
    } else {
        std::borrow::Cow::Owned(all_permutations(n))
    }
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
    }
    out
}

/// Orbit-minimal representative and sign of `g`.
pub fn canonical_form(g: &DirectedGraph) -> GraphClass {
    let n = g.n();
    let m = g.m();
    let edges = g.raw_edges();
    let mut best: Option<Vec<[u8; 2]>> = None;
    let mut best_parity = 0u8;
    let mut ambiguous = false;
    let mut candidate = vec![[0u8; 2]; n];
    for perm in permutations(n).iter() {
        let map = |t: u8| -> u8 {
            if (t as usize) < m {
                t
            } else {
                (m + perm[t as usize - m]) as u8
            }
        };
        let mut parity = 0u8;
        for (k, &[l, r]) in edges.iter().enumerate() {
            let (a, b) = (map(l), map(r));
            candidate[perm[k]] = if a < b {
                [a, b]
            } else {
                parity ^= 1;
                [b, a]
            };
        }
        match &best {
            Some(b) if candidate.as_slice() > b.as_slice() => {}
            Some(b) if candidate.as_slice() == b.as_slice() => {
                if parity != best_parity {
                    ambiguous = true;
                }
            }
            _ => {
                best = Some(candidate.clone());
                best_parity = parity;
                ambiguous = false;
            }
        }
    }
    let rep = DirectedGraph::from_raw(m, best.expect("at least one permutation"));
    let sign = if ambiguous {
        0
    } else if best_parity == 0 {
        1
    } else {
        -1
    };
    GraphClass { rep, sign }
}
