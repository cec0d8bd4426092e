//! Admissible graphs: `n` internal vertices with an ordered pair of outgoing
//! edges each, and `m` argument vertices with no outgoing edges.
//!
//! Vertices are numbered from 0 internally: arguments are `0..m`, internal
//! vertices are `m..m+n`. The text encoding is 1-based,
//! `n m ; v1: a b / v2: a b / ...`, with `a` the target of the first (L)
//! edge and `b` the target of the second (R) edge.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest total vertex count representable by the compact target type.
pub const MAX_VERTICES: usize = u8::MAX as usize;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct DirectedGraph {
    n: usize,
    m: usize,
    edges: Vec<[u8; 2]>,
}

impl DirectedGraph {
    /// Builds a graph from 0-based `[L, R]` targets of the internal vertices,
    /// checking every admissibility condition.
    pub fn new(m: usize, edges: Vec<[usize; 2]>) -> Result<Self> {
        let n = edges.len();
        if n + m > MAX_VERTICES {
            return Err(Error::BudgetExceeded(format!("{} vertices exceed {MAX_VERTICES}", n + m)));
        }
        if n == 0 || m == 0 {
            return Err(Error::invalid_graph(0, "both vertex types must be nonempty"));
        }
        let total = n + m;
        for (k, &[l, r]) in edges.iter().enumerate() {
            let v = m + k;
            if l >= total || r >= total {
                return Err(Error::invalid_graph(v + 1, "target out of range"));
            }
            if l == v || r == v {
                return Err(Error::invalid_graph(v + 1, "loop"));
            }
            if l == r {
                return Err(Error::invalid_graph(v + 1, "repeated target (multiple edge)"));
            }
        }
        let g = DirectedGraph {
            n,
            m,
            edges: edges.iter().map(|&[l, r]| [l as u8, r as u8]).collect(),
        };
        if let Some(a) = g.arg_indegrees().iter().position(|&d| d == 0) {
            return Err(Error::invalid_graph(a + 1, "argument vertex has indegree 0"));
        }
        Ok(g)
    }

    /// Builds a graph known to be admissible by construction.
    pub(crate) fn from_raw(m: usize, edges: Vec<[u8; 2]>) -> Self {
        let g = DirectedGraph { n: edges.len(), m, edges };
        debug_assert!(g.validate().is_ok(), "constructed inadmissible graph {g}");
        g
    }

    fn validate(&self) -> Result<()> {
        DirectedGraph::new(self.m, self.edges_usize()).map(|_| ())
    }

    /// Number of internal vertices.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of argument vertices.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vertex_count(&self) -> usize {
        self.n + self.m
    }

    pub fn is_argument(&self, v: usize) -> bool {
        v < self.m
    }

    /// `[L, R]` targets of internal vertex `k` (vertex id `m + k`).
    pub fn targets(&self, k: usize) -> [usize; 2] {
        let [l, r] = self.edges[k];
        [l as usize, r as usize]
    }

    pub(crate) fn raw_edges(&self) -> &[[u8; 2]] {
        &self.edges
    }

    pub fn edges_usize(&self) -> Vec<[usize; 2]> {
        (0..self.n).map(|k| self.targets(k)).collect()
    }

    pub fn indegree(&self, v: usize) -> usize {
        self.edges.iter().flatten().filter(|&&t| t as usize == v).count()
    }

    pub fn arg_indegrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.m];
        for &t in self.edges.iter().flatten() {
            if (t as usize) < self.m {
                deg[t as usize] += 1;
            }
        }
        deg
    }

    /// The graph with the L/R roles of internal vertex `k` exchanged.
    pub fn swap_edges(&self, k: usize) -> DirectedGraph {
        let mut g = self.clone();
        g.edges[k].swap(0, 1);
        g
    }

    /// Relabels internal vertices: old internal vertex `k` becomes `perm[k]`.
    pub fn relabel_internal(&self, perm: &[usize]) -> DirectedGraph {
        assert_eq!(perm.len(), self.n);
        let map = |t: u8| -> u8 {
            let t = t as usize;
            if t < self.m {
                t as u8
            } else {
                (self.m + perm[t - self.m]) as u8
            }
        };
        let mut edges = vec![[0u8; 2]; self.n];
        for (k, &[l, r]) in self.edges.iter().enumerate() {
            edges[perm[k]] = [map(l), map(r)];
        }
        DirectedGraph { n: self.n, m: self.m, edges }
    }

    /// True when some directed cycle exists. Argument vertices have no outgoing
    /// edges, so only the internal subgraph is searched.
    pub fn has_wheel(&self) -> bool {
        let succ: Vec<Vec<usize>> = (0..self.n)
            .map(|k| {
                self.targets(k)
                    .into_iter()
                    .filter(|&t| t >= self.m)
                    .map(|t| t - self.m)
                    .collect()
            })
            .collect();
        has_cycle(&succ)
    }

    /// Removes argument vertex `arg` and every edge ending there.
    pub fn truncate_argument(&self, arg: usize) -> Result<BareDigraph> {
        if arg >= self.m {
            return Err(Error::IndexOutOfRange { index: arg, bound: self.m });
        }
        let labels: Vec<usize> = (0..self.vertex_count()).collect();
        let mut out = vec![Vec::new(); self.vertex_count()];
        for k in 0..self.n {
            out[self.m + k] = self.targets(k).to_vec();
        }
        BareDigraph { labels, out }.remove_vertex(arg)
    }

    pub fn to_bare(&self) -> BareDigraph {
        let mut out = vec![Vec::new(); self.vertex_count()];
        for k in 0..self.n {
            out[self.m + k] = self.targets(k).to_vec();
        }
        BareDigraph { labels: (0..self.vertex_count()).collect(), out }
    }
}

pub(crate) fn has_cycle(succ: &[Vec<usize>]) -> bool {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    fn visit(v: usize, succ: &[Vec<usize>], marks: &mut [Mark]) -> bool {
        marks[v] = Mark::Active;
        for &w in &succ[v] {
            match marks[w] {
                Mark::Active => return true,
                Mark::New => {
                    if visit(w, succ, marks) {
                        return true;
                    }
                }
                Mark::Done => {}
            }
        }
        marks[v] = Mark::Done;
        false
    }
    let mut marks = vec![Mark::New; succ.len()];
    (0..succ.len()).any(|v| marks[v] == Mark::New && visit(v, succ, &mut marks))
}

impl fmt::Display for DirectedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} ;", self.n, self.m)?;
        for (k, &[l, r]) in self.edges.iter().enumerate() {
            if k > 0 {
                write!(f, " /")?;
            }
            write!(f, " {}: {} {}", self.m + k + 1, l as usize + 1, r as usize + 1)?;
        }
        Ok(())
    }
}

impl FromStr for DirectedGraph {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        parse_graph(text)
    }
}

/// Parses the `n m ; v: a b / ...` encoding.
pub fn parse_graph(text: &str) -> Result<DirectedGraph> {
    let (head, body) = text
        .split_once(';')
        .ok_or_else(|| Error::parse(0, "missing `;` after the vertex counts"))?;
    let counts: Vec<&str> = head.split_whitespace().collect();
    if counts.len() != 2 {
        return Err(Error::parse(0, "expected `n m` before `;`"));
    }
    let count = |s: &str| -> Result<usize> {
        s.parse().map_err(|_| Error::parse(0, format!("invalid count `{s}`")))
    };
    let (n, m) = (count(counts[0])?, count(counts[1])?);
    let offset = head.len() + 1;
    let records: Vec<&str> = if body.trim().is_empty() { Vec::new() } else { body.split('/').collect() };
    if records.len() != n {
        return Err(Error::parse(offset, format!("expected {n} vertex records, found {}", records.len())));
    }
    let mut edges = Vec::with_capacity(n);
    for (k, record) in records.iter().enumerate() {
        let (label, targets) = record
            .split_once(':')
            .ok_or_else(|| Error::parse(offset, format!("record {} lacks `:`", k + 1)))?;
        let label: usize = label
            .trim()
            .parse()
            .map_err(|_| Error::parse(offset, format!("invalid vertex label `{}`", label.trim())))?;
        if label != m + k + 1 {
            return Err(Error::parse(
                offset,
                format!("expected vertex {} in record {}, found {label}", m + k + 1, k + 1),
            ));
        }
        let ts: Vec<&str> = targets.split_whitespace().collect();
        if ts.len() != 2 {
            return Err(Error::invalid_graph(label, format!("outdegree {} instead of 2", ts.len())));
        }
        let mut pair = [0usize; 2];
        for (slot, t) in ts.iter().enumerate() {
            let t: usize = t
                .parse()
                .map_err(|_| Error::parse(offset, format!("invalid target `{t}`")))?;
            if t == 0 || t > n + m {
                return Err(Error::invalid_graph(label, format!("target {t} out of range")));
            }
            pair[slot] = t - 1;
        }
        edges.push(pair);
    }
    DirectedGraph::new(m, edges)
}

/// An unconstrained directed graph, produced by deleting vertices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BareDigraph {
    /// Original vertex ids (0-based) of the surviving vertices.
    pub labels: Vec<usize>,
    /// Successor lists, by position in `labels`.
    pub out: Vec<Vec<usize>>,
}

impl BareDigraph {
    /// Deletes the vertex with original id `vertex` and all incident edges.
    pub fn remove_vertex(&self, vertex: usize) -> Result<BareDigraph> {
        let pos = self
            .labels
            .iter()
            .position(|&l| l == vertex)
            .ok_or(Error::IndexOutOfRange { index: vertex, bound: self.labels.len() })?;
        let remap = |w: usize| if w > pos { w - 1 } else { w };
        let labels = self.labels.iter().copied().filter(|&l| l != vertex).collect();
        let out = self
            .out
            .iter()
            .enumerate()
            .filter(|&(v, _)| v != pos)
            .map(|(_, succ)| succ.iter().copied().filter(|&w| w != pos).map(remap).collect())
            .collect();
        Ok(BareDigraph { labels, out })
    }

    pub fn outdegrees(&self) -> Vec<usize> {
        self.out.iter().map(Vec::len).collect()
    }

    pub fn min_outdegree(&self) -> Option<usize> {
        self.out.iter().map(Vec::len).min()
    }

    pub fn has_cycle(&self) -> bool {
        has_cycle(&self.out)
    }
}
