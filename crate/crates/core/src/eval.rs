//! Graphs as polydifferential operators on a polynomial bivector.
//!
//! Each edge carries a summation index `1..d`. An internal vertex with edges
//! `(L, R)` contributes `p^{ij}` (with `i` on L and `j` on R) differentiated
//! along all of its incoming edges; an argument vertex contributes its function
//! differentiated the same way. Index assignments are explored depth-first
//! over internal vertices, pruning as soon as a completed factor vanishes.

use std::collections::{BTreeMap, HashMap};

use num_traits::One;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, GraphSum};
use crate::poisson::PoissonStructure;
use crate::poly::{Monomial, Poly};
use crate::rational::{int, Rational};

/// Anything that evaluates as a multilinear operator on polynomials.
pub trait Cochain {
    fn arity(&self) -> usize;
    fn dim(&self) -> usize;
    fn apply(&self, args: &[Poly]) -> Result<Poly>;
}

fn check_args(arity: usize, d: usize, args: &[Poly]) -> Result<()> {
    if args.len() != arity {
        return Err(Error::ArityMismatch { expected: arity, found: args.len() });
    }
    if let Some(a) = args.iter().find(|a| a.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: a.dim() });
    }
    Ok(())
}

/// Memoized derivatives `∂^α p^{ij}` for `i < j`.
pub(crate) struct BivectorDerivatives<'a> {
    p: &'a PoissonStructure,
    cache: HashMap<(usize, usize, Vec<u32>), Poly>,
}

impl<'a> BivectorDerivatives<'a> {
    pub(crate) fn new(p: &'a PoissonStructure) -> Self {
        BivectorDerivatives { p, cache: HashMap::new() }
    }

    /// Sign and polynomial of `∂^α p^{ij}`, or `None` when it vanishes.
    fn get(&mut self, i: usize, j: usize, alpha: &[u32]) -> Option<(i8, &Poly)> {
        let (sign, base) = self.p.signed_entry(i, j)?;
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let key = (a, b, alpha.to_vec());
        let entry = self
            .cache
            .entry(key)
            .or_insert_with(|| if alpha.iter().all(|&e| e == 0) { base.clone() } else { base.derive_multi(alpha) });
        if entry.is_zero() {
            None
        } else {
            Some((sign, entry))
        }
    }

    fn nonzero(&self, i: usize, j: usize) -> bool {
        self.p.signed_entry(i, j).is_some()
    }
}

struct ArgDerivatives<'a> {
    args: &'a [Poly],
    cache: HashMap<(usize, Vec<u32>), Poly>,
}

impl<'a> ArgDerivatives<'a> {
    fn get(&mut self, a: usize, alpha: &[u32]) -> &Poly {
        let args = self.args;
        self.cache.entry((a, alpha.to_vec())).or_insert_with(|| args[a].derive_multi(alpha))
    }
}

/// Precomputed traversal plan for one graph.
struct Contraction {
    n: usize,
    m: usize,
    d: usize,
    /// Edge ids `2k + s` ending at each vertex (arguments first).
    in_edges: Vec<Vec<usize>>,
    /// Internal vertices whose factor is determined once vertex `k` is assigned.
    ready_internal: Vec<Vec<usize>>,
    /// Argument vertices determined once vertex `k` is assigned.
    ready_args: Vec<Vec<usize>>,
}

impl Contraction {
    fn new(g: &DirectedGraph, d: usize) -> Self {
        let (n, m) = (g.n(), g.m());
        let mut in_edges = vec![Vec::new(); n + m];
        for k in 0..n {
            let [l, r] = g.targets(k);
            in_edges[l].push(2 * k);
            in_edges[r].push(2 * k + 1);
        }
        let last_source = |v: usize| in_edges[v].iter().map(|e| e / 2).max();
        let mut ready_internal = vec![Vec::new(); n];
        let mut ready_args = vec![Vec::new(); n];
        for u in 0..n {
            let level = last_source(m + u).map_or(u, |s| s.max(u));
            ready_internal[level].push(u);
        }
        for a in 0..m {
            let level = last_source(a).expect("arguments have incoming edges");
            ready_args[level].push(a);
        }
        Contraction { n, m, d, in_edges, ready_internal, ready_args }
    }

    fn alpha(&self, v: usize, idx: &[usize]) -> Vec<u32> {
        let mut alpha = vec![0u32; self.d];
        for &e in &self.in_edges[v] {
            alpha[idx[e]] += 1;
        }
        alpha
    }

    /// Visits every index assignment with nonzero internal factors and passes
    /// the signed product of all determined factors to `leaf`.
    fn run<F>(&self, bivector: &mut BivectorDerivatives, mut args: Option<&mut ArgDerivatives>, leaf: &mut F)
    where
        F: FnMut(&[usize], i8, &Poly),
    {
        let mut idx = vec![0usize; 2 * self.n];
        let one = Poly::one(self.d);
        self.visit(0, &mut idx, 1, &one, bivector, &mut args, leaf);
    }

    #[allow(clippy::too_many_arguments)]
    fn visit<F>(
        &self,
        k: usize,
        idx: &mut Vec<usize>,
        sign: i8,
        partial: &Poly,
        bivector: &mut BivectorDerivatives,
        args: &mut Option<&mut ArgDerivatives>,
        leaf: &mut F,
    ) where
        F: FnMut(&[usize], i8, &Poly),
    {
        if k == self.n {
            leaf(idx, sign, partial);
            return;
        }
        for i in 0..self.d {
            'assign: for j in 0..self.d {
                if i == j || !bivector.nonzero(i, j) {
                    continue;
                }
                idx[2 * k] = i;
                idx[2 * k + 1] = j;
                let mut s = sign;
                let mut product: Option<Poly> = None;
                for &u in &self.ready_internal[k] {
                    let alpha = self.alpha(self.m + u, idx);
                    let Some((fs, factor)) = bivector.get(idx[2 * u], idx[2 * u + 1], &alpha) else {
                        continue 'assign;
                    };
                    s *= fs;
                    product = Some(match product {
                        None => partial * factor,
                        Some(acc) => &acc * factor,
                    });
                }
                if let Some(args) = args.as_deref_mut() {
                    for &a in &self.ready_args[k] {
                        let alpha = self.alpha(a, idx);
                        let factor = args.get(a, &alpha);
                        if factor.is_zero() {
                            continue 'assign;
                        }
                        product = Some(match product {
                            None => partial * factor,
                            Some(acc) => &acc * factor,
                        });
                    }
                }
                match &product {
                    Some(p) => self.visit(k + 1, idx, s, p, bivector, args, leaf),
                    None => self.visit(k + 1, idx, s, partial, bivector, args, leaf),
                }
            }
        }
    }
}

/// Evaluates `Σ a_Γ B_Γ(args)` exactly.
pub fn apply_graph(sum: &GraphSum, p: &PoissonStructure, args: &[Poly]) -> Result<Poly> {
    check_args(sum.arity(), p.dim(), args)?;
    let mut bivector = BivectorDerivatives::new(p);
    let mut arg_cache = ArgDerivatives { args, cache: HashMap::new() };
    let mut out = Poly::zero(p.dim());
    for (g, c) in sum.terms() {
        let plan = Contraction::new(g, p.dim());
        let mut leaf = |_: &[usize], sign: i8, value: &Poly| {
            out.add_scaled(value, &if sign > 0 { c.clone() } else { -c.clone() });
        };
        plan.run(&mut bivector, Some(&mut arg_cache), &mut leaf);
    }
    Ok(out)
}

/// Evaluates a single labeled graph (no canonicalization).
pub fn apply_labeled(g: &DirectedGraph, p: &PoissonStructure, args: &[Poly]) -> Result<Poly> {
    check_args(g.m(), p.dim(), args)?;
    let mut bivector = BivectorDerivatives::new(p);
    let mut arg_cache = ArgDerivatives { args, cache: HashMap::new() };
    let mut out = Poly::zero(p.dim());
    let plan = Contraction::new(g, p.dim());
    plan.run(&mut bivector, Some(&mut arg_cache), &mut |_, sign, value| {
        if sign > 0 {
            out += value;
        } else {
            out -= value;
        }
    });
    Ok(out)
}

/// A polydifferential operator in normal form
/// `Σ_α C_α(x) ∂^{α_1} f_1 ⋯ ∂^{α_m} f_m`.
///
/// Keys concatenate the `m` multi-indices (slot-major, `m·d` entries). Two
/// operators are equal iff their symbols are equal, and an operator vanishes
/// on all monomial tuples of degree ≤ D iff its symbol has no key with every
/// slot order ≤ D.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OperatorSymbol {
    arity: usize,
    d: usize,
    terms: BTreeMap<Vec<u32>, Poly>,
}

impl OperatorSymbol {
    pub fn zero(arity: usize, d: usize) -> Self {
        OperatorSymbol { arity, d, terms: BTreeMap::new() }
    }

    /// The commutative product `m₀(f, g) = f g`.
    pub fn product(d: usize) -> Self {
        let mut s = OperatorSymbol::zero(2, d);
        s.terms.insert(vec![0; 2 * d], Poly::one(d));
        s
    }

    /// Symbol of a graph sum on a fixed bivector.
    pub fn of_graph_sum(sum: &GraphSum, p: &PoissonStructure) -> Self {
        let d = p.dim();
        let m = sum.arity();
        let mut out = OperatorSymbol::zero(m, d);
        let mut bivector = BivectorDerivatives::new(p);
        for (g, c) in sum.terms() {
            let plan = Contraction::new(g, d);
            let mut leaf = |idx: &[usize], sign: i8, value: &Poly| {
                let mut key = vec![0u32; m * d];
                for a in 0..m {
                    for &e in &plan.in_edges[a] {
                        key[a * d + idx[e]] += 1;
                    }
                }
                let coeff = if sign > 0 { c.clone() } else { -c.clone() };
                out.add_poly(key, value, &coeff);
            };
            plan.run(&mut bivector, None, &mut leaf);
        }
        out.prune();
        out
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Poly)> {
        self.terms.iter()
    }

    /// Differentiation order of slot `a` in a key.
    pub fn slot_order(&self, key: &[u32], a: usize) -> u32 {
        key[a * self.d..(a + 1) * self.d].iter().sum()
    }

    fn add_poly(&mut self, key: Vec<u32>, value: &Poly, c: &Rational) {
        self.terms.entry(key).or_insert_with(|| Poly::zero(value.dim())).add_scaled(value, c);
    }

    fn prune(&mut self) {
        self.terms.retain(|_, v| !v.is_zero());
    }

    pub fn add_scaled(&mut self, other: &OperatorSymbol, c: &Rational) {
        assert_eq!((self.arity, self.d), (other.arity, other.d), "operator shape mismatch");
        for (k, v) in &other.terms {
            self.add_poly(k.clone(), v, c);
        }
        self.prune();
    }

    pub fn scale(&self, c: &Rational) -> OperatorSymbol {
        let mut out = OperatorSymbol::zero(self.arity, self.d);
        out.add_scaled(self, c);
        out
    }

    /// Keeps only the keys whose slot orders are all ≤ `max_order`.
    pub fn truncated(&self, max_order: u32) -> OperatorSymbol {
        OperatorSymbol {
            arity: self.arity,
            d: self.d,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| (0..self.arity).all(|a| self.slot_order(k, a) <= max_order))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Insertion `self ∘_j inner` without sign: `inner` fills slot `j`.
    pub fn insert(&self, j: usize, inner: &OperatorSymbol) -> OperatorSymbol {
        assert_eq!(self.d, inner.d, "operator dimension mismatch");
        assert!(j < self.arity, "slot out of range");
        let d = self.d;
        let mb = inner.arity;
        let arity = self.arity + mb - 1;
        let mut out = OperatorSymbol::zero(arity, d);
        let mut splits: HashMap<Vec<u32>, Vec<(Vec<Vec<u32>>, Rational)>> = HashMap::new();
        let mut coeff_derivatives: HashMap<(usize, Vec<u32>), Poly> = HashMap::new();
        let inner_terms: Vec<(&Vec<u32>, &Poly)> = inner.terms.iter().collect();
        for (ka, ca) in &self.terms {
            let alpha = ka[j * d..(j + 1) * d].to_vec();
            let parts = splits.entry(alpha.clone()).or_insert_with(|| distributions(&alpha, mb + 1));
            for (t, (kb, cb)) in inner_terms.iter().enumerate() {
                for (beta, mult) in parts.iter() {
                    let dcb = coeff_derivatives
                        .entry((t, beta[0].clone()))
                        .or_insert_with(|| cb.derive_multi(&beta[0]));
                    if dcb.is_zero() {
                        continue;
                    }
                    let mut key = Vec::with_capacity(arity * d);
                    key.extend_from_slice(&ka[..j * d]);
                    for b in 0..mb {
                        key.extend(kb[b * d..(b + 1) * d].iter().zip(&beta[b + 1]).map(|(x, y)| x + y));
                    }
                    key.extend_from_slice(&ka[(j + 1) * d..]);
                    let value = ca * &*dcb;
                    out.add_poly(key, &value, mult);
                }
            }
        }
        out.prune();
        out
    }

    /// Gerstenhaber composition `Σ_j (-1)^{j k₂} self ∘_j other` with
    /// `k₂ = arity(other) - 1`.
    pub fn compose(&self, other: &OperatorSymbol) -> OperatorSymbol {
        let k2 = other.arity - 1;
        let mut out = OperatorSymbol::zero(self.arity + other.arity - 1, self.d);
        for j in 0..self.arity {
            let sign = if (j * k2) % 2 == 0 { int(1) } else { int(-1) };
            out.add_scaled(&self.insert(j, other), &sign);
        }
        out
    }

    /// `[self, other]_G = self ∘ other - (-1)^{k₁ k₂} other ∘ self`.
    pub fn gerstenhaber(&self, other: &OperatorSymbol) -> OperatorSymbol {
        let (k1, k2) = (self.arity - 1, other.arity - 1);
        let mut out = self.compose(other);
        let sign = if (k1 * k2) % 2 == 0 { int(-1) } else { int(1) };
        out.add_scaled(&other.compose(self), &sign);
        out
    }

    /// Hochschild coboundary `δ = [m₀, ·]_G`.
    pub fn delta(&self) -> OperatorSymbol {
        OperatorSymbol::product(self.d).gerstenhaber(self)
    }
}

/// All ways to split the multi-index `alpha` into `parts` ordered pieces,
/// with the multinomial weight `Π_v α_v! / Π_{v,b} β_{b,v}!`.
fn distributions(alpha: &[u32], parts: usize) -> Vec<(Vec<Vec<u32>>, Rational)> {
    let d = alpha.len();
    let mut out = vec![(vec![vec![0u32; d]; parts], Rational::one())];
    for v in 0..d {
        let mut next = Vec::new();
        for comp in compositions(alpha[v], parts) {
            let weight = multinomial(alpha[v], &comp);
            for (beta, w) in &out {
                let mut beta = beta.clone();
                for (b, &c) in comp.iter().enumerate() {
                    beta[b][v] = c;
                }
                next.push((beta, w * &weight));
            }
        }
        out = next;
    }
    out
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn multinomial(total: u32, parts: &[u32]) -> Rational {
    let fact = |k: u32| (1..=k as i64).fold(Rational::one(), |acc, v| acc * int(v));
    parts.iter().fold(fact(total), |acc, &k| acc / fact(k))
}

impl Cochain for OperatorSymbol {
    fn arity(&self) -> usize {
        self.arity
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn apply(&self, args: &[Poly]) -> Result<Poly> {
        check_args(self.arity, self.d, args)?;
        let d = self.d;
        let mut derivatives: HashMap<(usize, &[u32]), Poly> = HashMap::new();
        let mut out = Poly::zero(d);
        'terms: for (key, c) in &self.terms {
            let mut value = c.clone();
            for (a, arg) in args.iter().enumerate() {
                let alpha = &key[a * d..(a + 1) * d];
                let da = derivatives.entry((a, alpha)).or_insert_with(|| arg.derive_multi(alpha));
                if da.is_zero() {
                    continue 'terms;
                }
                value = &value * &*da;
            }
            out += &value;
        }
        Ok(out)
    }
}

/// A graph sum bound to a bivector, evaluated through [`apply_graph`].
pub struct GraphOperator<'a> {
    pub sum: &'a GraphSum,
    pub p: &'a PoissonStructure,
}

impl Cochain for GraphOperator<'_> {
    fn arity(&self) -> usize {
        self.sum.arity()
    }

    fn dim(&self) -> usize {
        self.p.dim()
    }

    fn apply(&self, args: &[Poly]) -> Result<Poly> {
        apply_graph(self.sum, self.p, args)
    }
}

/// The product `m₀(f, g) = f g` as a cochain.
pub struct Product(pub usize);

impl Cochain for Product {
    fn arity(&self) -> usize {
        2
    }

    fn dim(&self) -> usize {
        self.0
    }

    fn apply(&self, args: &[Poly]) -> Result<Poly> {
        check_args(2, self.0, args)?;
        args[0].try_mul(&args[1])
    }
}

/// `δC` by the alternating-sum formula, `δ = (-1)^k d` for `C` of degree
/// `k = arity - 1`:
/// `dC(f₀..f_m) = f₀ C(f₁..f_m) + Σ_i (-1)^i C(.., f_{i-1} f_i, ..) + (-1)^{m+1} C(f₀..f_{m-1}) f_m`.
pub struct Delta<'a>(pub &'a dyn Cochain);

impl Cochain for Delta<'_> {
    fn arity(&self) -> usize {
        self.0.arity() + 1
    }

    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply(&self, args: &[Poly]) -> Result<Poly> {
        let c = self.0;
        let m = c.arity();
        check_args(m + 1, c.dim(), args)?;
        let mut total = args[0].try_mul(&c.apply(&args[1..])?)?;
        for i in 1..=m {
            let mut merged: Vec<Poly> = Vec::with_capacity(m);
            merged.extend_from_slice(&args[..i - 1]);
            merged.push(args[i - 1].try_mul(&args[i])?);
            merged.extend_from_slice(&args[i + 1..]);
            let term = c.apply(&merged)?;
            if i % 2 == 0 {
                total += &term;
            } else {
                total -= &term;
            }
        }
        let last = c.apply(&args[..m])?.try_mul(&args[m])?;
        if (m + 1) % 2 == 0 {
            total += &last;
        } else {
            total -= &last;
        }
        Ok(if (m - 1) % 2 == 0 { total } else { -&total })
    }
}

/// Gerstenhaber composition by slot substitution,
/// `(D₁ ∘ D₂)(f) = Σ_j (-1)^{j k₂} D₁(f₀.., D₂(f_j..f_{j+k₂}), ..)`.
pub struct Composition<'a>(pub &'a dyn Cochain, pub &'a dyn Cochain);

impl Cochain for Composition<'_> {
    fn arity(&self) -> usize {
        self.0.arity() + self.1.arity() - 1
    }

    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply(&self, args: &[Poly]) -> Result<Poly> {
        let (outer, inner) = (self.0, self.1);
        let (m1, m2) = (outer.arity(), inner.arity());
        check_args(m1 + m2 - 1, outer.dim(), args)?;
        let k2 = m2 - 1;
        let mut total = Poly::zero(outer.dim());
        for j in 0..m1 {
            let value = inner.apply(&args[j..j + m2])?;
            let mut slots: Vec<Poly> = Vec::with_capacity(m1);
            slots.extend_from_slice(&args[..j]);
            slots.push(value);
            slots.extend_from_slice(&args[j + m2..]);
            let term = outer.apply(&slots)?;
            if (j * k2) % 2 == 0 {
                total += &term;
            } else {
                total -= &term;
            }
        }
        Ok(total)
    }
}

/// `[D₁, D₂]_G = D₁ ∘ D₂ - (-1)^{k₁ k₂} D₂ ∘ D₁`.
pub struct Bracket<'a>(pub &'a dyn Cochain, pub &'a dyn Cochain);

impl Cochain for Bracket<'_> {
    fn arity(&self) -> usize {
        self.0.arity() + self.1.arity() - 1
    }

    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply(&self, args: &[Poly]) -> Result<Poly> {
        let (k1, k2) = (self.0.arity() - 1, self.1.arity() - 1);
        let forward = Composition(self.0, self.1).apply(args)?;
        let backward = Composition(self.1, self.0).apply(args)?;
        Ok(if (k1 * k2) % 2 == 0 { &forward - &backward } else { &forward + &backward })
    }
}

/// Operator-level `δ(sum)(args)`, built only from [`apply_graph`] and products.
pub fn oracle_delta(sum: &GraphSum, p: &PoissonStructure, args: &[Poly]) -> Result<Poly> {
    Delta(&GraphOperator { sum, p }).apply(args)
}

/// Operator-level `(s₁ ∘ s₂)(args)` by slot substitution.
pub fn oracle_compose(s1: &GraphSum, s2: &GraphSum, p: &PoissonStructure, args: &[Poly]) -> Result<Poly> {
    Composition(&GraphOperator { sum: s1, p }, &GraphOperator { sum: s2, p }).apply(args)
}

/// Operator-level `[s₁, s₂]_G(args)`.
pub fn oracle_bracket(s1: &GraphSum, s2: &GraphSum, p: &PoissonStructure, args: &[Poly]) -> Result<Poly> {
    Bracket(&GraphOperator { sum: s1, p }, &GraphOperator { sum: s2, p }).apply(args)
}

/// All monomials in `d` variables of total degree `lo..=hi`, in graded order.
pub fn monomials_up_to(d: usize, lo: u32, hi: u32) -> Vec<Poly> {
    let mut out = Vec::new();
    for deg in lo..=hi {
        let mut exps = Vec::new();
        fill_monomials(d, deg, &mut vec![0; d], 0, &mut exps);
        exps.sort_by(|a: &Monomial, b| a.cmp(b));
        out.extend(exps.into_iter().map(|m| Poly::monomial(m.0, Rational::one())));
    }
    out
}

fn fill_monomials(d: usize, left: u32, cur: &mut Vec<u32>, pos: usize, out: &mut Vec<Monomial>) {
    if pos + 1 == d {
        cur[pos] = left;
        out.push(Monomial(cur.clone()));
        cur[pos] = 0;
        return;
    }
    for e in 0..=left {
        cur[pos] = e;
        fill_monomials(d, left - e, cur, pos + 1, out);
    }
    cur[pos] = 0;
}

/// Every `m`-tuple of nonconstant monomials of degree ≤ `max_degree`.
pub fn monomial_tuples(d: usize, m: usize, max_degree: u32) -> Vec<Vec<Poly>> {
    let basis = monomials_up_to(d, 1, max_degree);
    let mut out: Vec<Vec<Poly>> = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                basis.iter().map(move |b| {
                    let mut t = prefix.clone();
                    t.push(b.clone());
                    t
                })
            })
            .collect();
    }
    out
}
