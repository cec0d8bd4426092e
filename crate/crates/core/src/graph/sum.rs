//! Finite rational combinations of canonical graph classes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use super::canon::canonical_form;
use super::digraph::{parse_graph, DirectedGraph};
use crate::error::{Error, Result};
use crate::rational::{format_ratio, parse_rational, Rational};

/// A linear combination of graph classes sharing one arity. Keys are
/// canonical representatives with nonzero sign; no zero coefficients are kept.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GraphSum {
    arity: usize,
    terms: BTreeMap<DirectedGraph, Rational>,
}

impl GraphSum {
    pub fn zero(arity: usize) -> Self {
        GraphSum { arity, terms: BTreeMap::new() }
    }

    /// The sum `1 * g`, canonicalized.
    pub fn from_graph(g: &DirectedGraph) -> Self {
        let mut s = GraphSum::zero(g.m());
        s.add_graph(g, &Rational::one());
        s
    }

    pub fn from_terms<'a>(
        arity: usize,
        terms: impl IntoIterator<Item = (&'a DirectedGraph, Rational)>,
    ) -> Self {
        let mut s = GraphSum::zero(arity);
        for (g, c) in terms {
            s.add_graph(g, &c);
        }
        s
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Terms sorted by canonical encoding.
    pub fn terms(&self) -> impl Iterator<Item = (&DirectedGraph, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, rep: &DirectedGraph) -> Rational {
        self.terms.get(rep).cloned().unwrap_or_else(Rational::zero)
    }

    /// Adds `c * g` after canonicalizing `g`; zero classes are dropped.
    pub fn add_graph(&mut self, g: &DirectedGraph, c: &Rational) {
        assert_eq!(g.m(), self.arity, "graph arity does not match the sum");
        if c.is_zero() {
            return;
        }
        let class = canonical_form(g);
        match class.sign {
            0 => {}
            1 => self.add_canonical(class.rep, c.clone()),
            _ => self.add_canonical(class.rep, -c.clone()),
        }
    }

    /// Adds `c * rep` where `rep` is already a canonical representative.
    pub(crate) fn add_canonical(&mut self, rep: DirectedGraph, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(rep) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &GraphSum, c: &Rational) {
        assert_eq!(self.arity, other.arity, "graph sums of different arity");
        if c.is_zero() {
            return;
        }
        for (g, v) in &other.terms {
            self.add_canonical(g.clone(), v * c);
        }
    }

    pub fn scale(&self, c: &Rational) -> GraphSum {
        let mut out = GraphSum::zero(self.arity);
        out.add_scaled(self, c);
        out
    }

    pub fn neg(&self) -> GraphSum {
        self.scale(&-Rational::one())
    }

    pub fn add(&self, other: &GraphSum) -> GraphSum {
        let mut out = self.clone();
        out.add_scaled(other, &Rational::one());
        out
    }

    pub fn sub(&self, other: &GraphSum) -> GraphSum {
        let mut out = self.clone();
        out.add_scaled(other, &-Rational::one());
        out
    }

    /// True when every term is a graph without wheels.
    pub fn is_wheel_free(&self) -> bool {
        self.terms.keys().all(|g| !g.has_wheel())
    }

    /// Largest internal vertex count among the terms.
    pub fn max_n(&self) -> usize {
        self.terms.keys().map(DirectedGraph::n).max().unwrap_or(0)
    }

    /// The part made of graphs with exactly `n` internal vertices.
    pub fn homogeneous_part(&self, n: usize) -> GraphSum {
        GraphSum {
            arity: self.arity,
            terms: self.terms.iter().filter(|(g, _)| g.n() == n).map(|(g, c)| (g.clone(), c.clone())).collect(),
        }
    }

    /// Parses the one-term-per-line file format, `p/q <tab> <graph>`.
    /// Blank lines and lines starting with `#` are skipped. The arity is taken
    /// from the first term, or from `arity` when the file has no terms.
    pub fn parse(text: &str, arity: Option<usize>) -> Result<GraphSum> {
        let mut sum: Option<GraphSum> = arity.map(GraphSum::zero);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (coeff, graph) = line
                .split_once('\t')
                .or_else(|| line.split_once(char::is_whitespace))
                .ok_or_else(|| Error::parse(lineno + 1, "expected `p/q <tab> <graph>`"))?;
            let coeff = parse_rational(coeff).map_err(|e| match e {
                Error::Parse { message, .. } => Error::parse(lineno + 1, message),
                other => other,
            })?;
            let graph = parse_graph(graph)?;
            let s = sum.get_or_insert_with(|| GraphSum::zero(graph.m()));
            if graph.m() != s.arity {
                return Err(Error::ArityMismatch { expected: s.arity, found: graph.m() });
            }
            s.add_graph(&graph, &coeff);
        }
        sum.ok_or_else(|| Error::parse(0, "empty graph sum without declared arity"))
    }
}

impl fmt::Display for GraphSum {
    /// File format: one `p/q<TAB>graph` line per term in canonical order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (g, c) in &self.terms {
            writeln!(f, "{}\t{}", format_ratio(c), g)?;
        }
        Ok(())
    }
}

impl FromStr for GraphSum {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        GraphSum::parse(text, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn antisymmetric_pair_cancels() {
        let g = parse_graph("1 2 ; 3: 1 2").unwrap();
        let h = parse_graph("1 2 ; 3: 2 1").unwrap();
        let mut s = GraphSum::from_graph(&g);
        s.add_graph(&h, &Rational::one());
        assert!(s.is_empty());
    }

    #[test]
    fn file_format_round_trip() {
        let text = "1/2\t2 2 ; 3: 1 2 / 4: 1 2\n-1/6\t2 2 ; 3: 1 4 / 4: 3 2\n";
        let s: GraphSum = text.parse().unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.to_string().parse::<GraphSum>().unwrap(), s);
        assert_eq!(s.coefficient(&parse_graph("2 2 ; 3: 1 2 / 4: 1 2").unwrap()), ratio(1, 2));
    }

    #[test]
    fn mixed_arity_rejected() {
        let text = "1/1\t1 2 ; 3: 1 2\n1/1\t1 1 ; 2: 1 1";
        assert!(GraphSum::parse(text, None).is_err());
        let text = "1/1\t1 2 ; 3: 1 2\n1/1\t2 3 ; 4: 1 2 / 5: 3 4";
        assert!(matches!(GraphSum::parse(text, None), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn zero_class_dropped() {
        let g = parse_graph("3 2 ; 3: 4 5 / 4: 1 2 / 5: 1 2").unwrap();
        assert!(GraphSum::from_graph(&g).is_empty());
    }
}
