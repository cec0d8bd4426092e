//! Exhaustive enumeration of admissible graph classes.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::canon::canonical_form;
use super::digraph::DirectedGraph;
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphFilter {
    All,
    WheelFree,
    WheelsOnly,
    ArgIndegreeExactlyOne,
}

impl GraphFilter {
    pub fn accepts(self, g: &DirectedGraph) -> bool {
        match self {
            GraphFilter::All => true,
            GraphFilter::WheelFree => !g.has_wheel(),
            GraphFilter::WheelsOnly => g.has_wheel(),
            GraphFilter::ArgIndegreeExactlyOne => g.arg_indegrees().iter().all(|&d| d == 1),
        }
    }
}

impl FromStr for GraphFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(GraphFilter::All),
            "wheel_free" | "wheel-free" => Ok(GraphFilter::WheelFree),
            "wheels_only" | "wheels-only" => Ok(GraphFilter::WheelsOnly),
            "arg_indegree_exactly_one" | "arg-indegree-exactly-one" => {
                Ok(GraphFilter::ArgIndegreeExactlyOne)
            }
            other => Err(Error::parse(0, format!("unknown graph filter `{other}`"))),
        }
    }
}

impl fmt::Display for GraphFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GraphFilter::All => "all",
            GraphFilter::WheelFree => "wheel_free",
            GraphFilter::WheelsOnly => "wheels_only",
            GraphFilter::ArgIndegreeExactlyOne => "arg_indegree_exactly_one",
        };
        f.write_str(s)
    }
}

/// Result of an enumeration: the sorted nonzero classes and the number of
/// labeled graphs (ordered edge pairs, labeled internal vertices) that passed
/// the filter before canonicalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub classes: Vec<DirectedGraph>,
    pub labeled_count: u64,
}

/// Default cap on `n + m` for enumeration.
pub const DEFAULT_MAX_VERTICES: usize = 10;

/// All nonzero classes of `K_{n,m}` passing `filter`, sorted by encoding.
pub fn enumerate_graphs(n: usize, m: usize, filter: GraphFilter) -> Result<Enumeration> {
    enumerate_graphs_with_budget(n, m, filter, DEFAULT_MAX_VERTICES)
}

pub fn enumerate_graphs_with_budget(
    n: usize,
    m: usize,
    filter: GraphFilter,
    max_vertices: usize,
) -> Result<Enumeration> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("enumeration needs n >= 1 and m >= 1".into()));
    }
    if n + m > max_vertices {
        return Err(Error::BudgetExceeded(format!(
            "n + m = {} exceeds the enumeration cap {max_vertices}",
            n + m
        )));
    }
    let total = n + m;
    // Unordered target pairs suffice: filters are invariant under L/R exchange,
    // and every sorted-pair graph stands for 2^n labeled graphs.
    let pairs_for = |v: usize| -> Vec<[u8; 2]> {
        let mut out = Vec::new();
        for a in 0..total {
            for b in (a + 1)..total {
                if a != v && b != v {
                    out.push([a as u8, b as u8]);
                }
            }
        }
        out
    };
    let choices: Vec<Vec<[u8; 2]>> = (0..n).map(|k| pairs_for(m + k)).collect();
    let per_vertex = choices[0].len();

    let partial: Vec<(BTreeSet<DirectedGraph>, u64)> = (0..per_vertex)
        .into_par_iter()
        .map(|first| {
            let mut classes = BTreeSet::new();
            let mut count = 0u64;
            let mut idx = vec![0usize; n];
            idx[0] = first;
            let mut edges = vec![[0u8; 2]; n];
            loop {
                for k in 0..n {
                    edges[k] = choices[k][idx[k]];
                }
                let mut reached = vec![false; m];
                for &t in edges.iter().flatten() {
                    if (t as usize) < m {
                        reached[t as usize] = true;
                    }
                }
                if reached.iter().all(|&r| r) {
                    let g = DirectedGraph::from_raw(m, edges.clone());
                    if filter.accepts(&g) {
                        count += 1;
                        let class = canonical_form(&g);
                        if class.sign != 0 {
                            classes.insert(class.rep);
                        }
                    }
                }
                // odometer over vertices 1..n
                let mut k = n;
                loop {
                    if k == 1 {
                        return (classes, count << n);
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < choices[k].len() {
                        break;
                    }
                    idx[k] = 0;
                }
            }
        })
        .collect();

    let mut classes = BTreeSet::new();
    let mut labeled_count = 0;
    for (set, count) in partial {
        classes.extend(set);
        labeled_count += count;
    }
    Ok(Enumeration { classes: classes.into_iter().collect(), labeled_count })
}
