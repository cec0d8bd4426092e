//! Graph-level Hochschild differential, Gerstenhaber composition and the
//! Jacobi-relation ("Leibniz") generators.
//!
//! Every construction here is a finite rewriting of graphs; the operator-level
//! oracles in [`crate::eval`] are the arbiter of its signs.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, GraphSum};
use crate::rational::Rational;

fn sign(odd: bool) -> Rational {
    if odd {
        -Rational::one()
    } else {
        Rational::one()
    }
}

/// Edge ids `2k + s` of `g` that end at vertex `v`.
fn incoming(g: &DirectedGraph, v: usize) -> Vec<usize> {
    (0..g.n())
        .flat_map(|k| {
            let t = g.targets(k);
            [(2 * k, t[0]), (2 * k + 1, t[1])]
        })
        .filter(|&(_, t)| t == v)
        .map(|(e, _)| e)
        .collect()
}

/// Hochschild coboundary `δ = [m₀, ·]_G` at graph level.
///
/// For a graph of arity `m`, slot `s` (0-based) is split into two adjacent
/// argument vertices with every proper, nonempty redistribution of its
/// incoming edges; the term carries sign `(-1)^{m+s}`. Redistributions that
/// leave a new vertex without edges cancel against the outer products.
pub fn graph_delta(sum: &GraphSum) -> GraphSum {
    let m = sum.arity();
    let parts: Vec<GraphSum> = sum
        .terms()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(g, c)| {
            let mut out = GraphSum::zero(m + 1);
            for s in 0..m {
                let into = incoming(g, s);
                let coeff = c * sign((m + s) % 2 == 1);
                let shift = |t: usize| -> u8 {
                    if t < s {
                        t as u8
                    } else {
                        (t + 1) as u8
                    }
                };
                for mask in 1..(1u32 << into.len()) - 1 {
                    let mut edges: Vec<[u8; 2]> =
                        (0..g.n()).map(|k| g.targets(k).map(shift)).collect();
                    for (bit, &e) in into.iter().enumerate() {
                        edges[e / 2][e % 2] = if mask >> bit & 1 == 1 { (s + 1) as u8 } else { s as u8 };
                    }
                    out.add_graph(&DirectedGraph::from_raw(m + 1, edges), &coeff);
                }
            }
            out
        })
        .collect();
    let mut out = GraphSum::zero(m + 1);
    for part in parts {
        out.add_scaled(&part, &Rational::one());
    }
    out
}

/// Grafts `inner` into argument slot `j` of `outer`. Edges that ended at the
/// slot are re-aimed at every vertex of `inner` in all combinations.
pub fn graft(outer: &DirectedGraph, j: usize, inner: &DirectedGraph, coeff: &Rational, out: &mut GraphSum) {
    let (m1, n1, m2, n2) = (outer.m(), outer.n(), inner.m(), inner.n());
    let m = m1 + m2 - 1;
    let outer_map = |t: usize| -> usize {
        if t < j {
            t
        } else if t == j {
            usize::MAX
        } else if t < m1 {
            t + m2 - 1
        } else {
            m + (t - m1)
        }
    };
    let inner_map = |t: usize| -> usize {
        if t < m2 {
            j + t
        } else {
            m + n1 + (t - m2)
        }
    };
    let mut edges: Vec<[usize; 2]> = (0..n1).map(|k| outer.targets(k).map(outer_map)).collect();
    edges.extend((0..n2).map(|k| inner.targets(k).map(inner_map)));
    let into: Vec<usize> = incoming(outer, j);
    let choices = m2 + n2;
    let mut pick = vec![0usize; into.len()];
    loop {
        let mut e2 = edges.clone();
        for (slot, &e) in into.iter().enumerate() {
            e2[e / 2][e % 2] = inner_map(pick[slot]);
        }
        let raw: Vec<[u8; 2]> = e2.iter().map(|t| [t[0] as u8, t[1] as u8]).collect();
        out.add_graph(&DirectedGraph::from_raw(m, raw), coeff);
        let mut pos = 0;
        loop {
            if pos == pick.len() {
                return;
            }
            pick[pos] += 1;
            if pick[pos] < choices {
                break;
            }
            pick[pos] = 0;
            pos += 1;
        }
    }
}

/// Gerstenhaber composition `Σ_j (-1)^{j k₂} s₁ ∘_j s₂` at graph level,
/// `k₂ = arity(s₂) - 1`.
pub fn graph_compose(s1: &GraphSum, s2: &GraphSum) -> GraphSum {
    let arity = s1.arity() + s2.arity() - 1;
    let k2 = s2.arity() - 1;
    let inner: Vec<(&DirectedGraph, &Rational)> = s2.terms().collect();
    let parts: Vec<GraphSum> = s1
        .terms()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(g1, c1)| {
            let mut out = GraphSum::zero(arity);
            for j in 0..s1.arity() {
                let sj = sign((j * k2) % 2 == 1);
                for &(g2, c2) in &inner {
                    graft(g1, j, g2, &(c1 * c2 * &sj), &mut out);
                }
            }
            out
        })
        .collect();
    let mut out = GraphSum::zero(arity);
    for part in parts {
        out.add_scaled(&part, &Rational::one());
    }
    out
}

/// `[s₁, s₂]_G = s₁ ∘ s₂ - (-1)^{k₁ k₂} s₂ ∘ s₁`.
pub fn graph_gerstenhaber(s1: &GraphSum, s2: &GraphSum) -> GraphSum {
    let (k1, k2) = (s1.arity() - 1, s2.arity() - 1);
    let mut out = graph_compose(s1, s2);
    out.add_scaled(&graph_compose(s2, s1), &sign((k1 * k2) % 2 == 0));
    out
}

/// A graph with one outdegree-3 vertex standing for the Jacobiator and
/// ordinary outdegree-2 vertices. Vertex numbering as for graphs: arguments
/// `0..m`, ordinary vertices next, the special vertex last.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct LeibnizSkeleton {
    pub m: usize,
    pub ordinary: Vec<[usize; 2]>,
    pub special: [usize; 3],
}

impl LeibnizSkeleton {
    /// Number of bivector copies after expansion.
    pub fn n_total(&self) -> usize {
        self.ordinary.len() + 2
    }

    fn special_vertex(&self) -> usize {
        self.m + self.ordinary.len()
    }

    /// Replaces the special vertex by the cyclic sum
    /// `Σ_cyc p^{il} ∂_l p^{jk}` (two vertices `u → w`) and redistributes the
    /// edges that ended at it over `u` and `w` in all ways.
    pub fn expand(&self) -> GraphSum {
        let mut out = GraphSum::zero(self.m);
        let sv = self.special_vertex();
        let (u, w) = (sv, sv + 1);
        let into: Vec<usize> = self
            .ordinary
            .iter()
            .enumerate()
            .flat_map(|(k, t)| [(2 * k, t[0]), (2 * k + 1, t[1])])
            .filter(|&(_, t)| t == sv)
            .map(|(e, _)| e)
            .collect();
        let [a, b, c] = self.special;
        for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
            for mask in 0..(1u32 << into.len()) {
                let mut edges: Vec<[u8; 2]> =
                    self.ordinary.iter().map(|t| [t[0] as u8, t[1] as u8]).collect();
                for (bit, &e) in into.iter().enumerate() {
                    edges[e / 2][e % 2] = if mask >> bit & 1 == 1 { w as u8 } else { u as u8 };
                }
                edges.push([x as u8, w as u8]);
                edges.push([y as u8, z as u8]);
                out.add_graph(&DirectedGraph::from_raw(self.m, edges), &Rational::one());
            }
        }
        out
    }
}

impl fmt::Display for LeibnizSkeleton {
    /// `n m ; v: a b / ... / v: a b c` with the special vertex last, 1-based.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} ;", self.ordinary.len() + 1, self.m)?;
        for (k, [l, r]) in self.ordinary.iter().enumerate() {
            write!(f, " {}: {} {} /", self.m + k + 1, l + 1, r + 1)?;
        }
        let [a, b, c] = self.special;
        write!(f, " {}: {} {} {}", self.special_vertex() + 1, a + 1, b + 1, c + 1)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LeibnizGenerator {
    pub skeleton: LeibnizSkeleton,
    pub expansion: GraphSum,
}

/// Cap on `n_total + m` for generator enumeration.
pub const LEIBNIZ_MAX_VERTICES: usize = 8;

/// All Leibniz generators with `n_total` bivector copies and arity `m`, one per
/// distinct nonzero expansion up to sign. With `wheel_free`, only generators
/// whose expansion contains no wheel are kept.
pub fn leibniz_generators(n_total: usize, m: usize, wheel_free: bool) -> Result<Vec<LeibnizGenerator>> {
    if n_total < 2 || m == 0 {
        return Err(Error::InvalidParameter("Leibniz generators need n_total >= 2 and m >= 1".into()));
    }
    if n_total + m > LEIBNIZ_MAX_VERTICES {
        return Err(Error::BudgetExceeded(format!(
            "n_total + m = {} exceeds the Leibniz cap {LEIBNIZ_MAX_VERTICES}",
            n_total + m
        )));
    }
    let n_ord = n_total - 2;
    let sv = m + n_ord;
    let vertices = sv + 1;
    let pairs_for = |v: usize| -> Vec<[usize; 2]> {
        let mut out = Vec::new();
        for a in 0..vertices {
            for b in (a + 1)..vertices {
                if a != v && b != v {
                    out.push([a, b]);
                }
            }
        }
        out
    };
    let mut triples = Vec::new();
    for a in 0..sv {
        for b in (a + 1)..sv {
            for c in (b + 1)..sv {
                triples.push([a, b, c]);
            }
        }
    }
    let choices: Vec<Vec<[usize; 2]>> = (0..n_ord).map(|k| pairs_for(m + k)).collect();
    let mut skeletons = Vec::new();
    let mut idx = vec![0usize; n_ord];
    loop {
        let ordinary: Vec<[usize; 2]> = (0..n_ord).map(|k| choices[k][idx[k]]).collect();
        for &special in &triples {
            let mut reached = vec![false; m];
            for &t in ordinary.iter().flatten().chain(special.iter()) {
                if t < m {
                    reached[t] = true;
                }
            }
            if reached.iter().all(|&r| r) {
                skeletons.push(LeibnizSkeleton { m, ordinary: ordinary.clone(), special });
            }
        }
        let mut k = 0;
        loop {
            if k == n_ord {
                break;
            }
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n_ord {
            break;
        }
    }
    let expanded: Vec<LeibnizGenerator> = skeletons
        .into_par_iter()
        .map(|skeleton| {
            let mut expansion = skeleton.expand();
            let negative = expansion.terms().next().is_some_and(|(_, c)| c < &Rational::zero());
            if negative {
                expansion = expansion.neg();
            }
            LeibnizGenerator { skeleton, expansion }
        })
        .filter(|g| !g.expansion.is_empty() && (!wheel_free || g.expansion.is_wheel_free()))
        .collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for g in expanded {
        let key: Vec<(DirectedGraph, Rational)> =
            g.expansion.terms().map(|(h, c)| (h.clone(), c.clone())).collect();
        if seen.insert(key) {
            out.push(g);
        }
    }
    Ok(out)
}

/// The bare Jacobiator expansion in arity 3 (`J: 1 2 3`).
pub fn jacobiator_sum() -> GraphSum {
    LeibnizSkeleton { m: 3, ordinary: Vec::new(), special: [0, 1, 2] }.expand()
}
