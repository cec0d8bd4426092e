//! Order-by-order Maurer–Cartan solving over graph-class bases.
//!
//! At order `k` the associativity of `m₀ + Σ ħ^j c_j` reads
//! `δ c_k + ½ Σ_{a+b=k} [c_a, c_b]_G = 0`. Two routes are provided:
//!
//! * the graph route solves the equation class by class modulo the span of
//!   Leibniz generators (graph sums that vanish on every Poisson structure);
//! * the evaluation route specializes the equation to concrete Poisson
//!   structures and stacks the resulting exact linear constraints. Its
//!   infeasibility certifies that no universal solution exists, independently
//!   of whether the Leibniz generators span every relation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{Cochain, OperatorSymbol};
use crate::graph::{enumerate_graphs, parse_graph, DirectedGraph, GraphFilter, GraphSum};
use crate::homological::{graph_delta, graph_gerstenhaber, leibniz_generators};
use crate::linalg::{left_functional, verify_functional, Echelon, ModularPlanner, PivotOrder, SparseMatrix, SparseRow};
use crate::poisson::{conformal_jacobian, preset_poisson, PoissonStructure};
use crate::poly::{Monomial, Poly};
use crate::rational::{format_ratio, int, parse_rational, ratio, Rational};

/// A truncated star-product `m₀ + Σ_k ħ^k c_k`; order 0 is implicit.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct StarSeries {
    orders: BTreeMap<usize, GraphSum>,
}

impl StarSeries {
    pub fn new() -> Self {
        StarSeries::default()
    }

    pub fn with_order(mut self, k: usize, c: GraphSum) -> Self {
        self.set_order(k, c);
        self
    }

    pub fn set_order(&mut self, k: usize, c: GraphSum) {
        assert!(k >= 1, "order 0 is the product and is never stored");
        assert_eq!(c.arity(), 2, "star-product terms are bidifferential");
        self.orders.insert(k, c);
    }

    pub fn order(&self, k: usize) -> Option<&GraphSum> {
        self.orders.get(&k)
    }

    pub fn max_order(&self) -> usize {
        self.orders.keys().next_back().copied().unwrap_or(0)
    }

    pub fn orders(&self) -> impl Iterator<Item = (&usize, &GraphSum)> {
        self.orders.iter()
    }

    pub fn is_wheel_free(&self) -> bool {
        self.orders.values().all(GraphSum::is_wheel_free)
    }

    /// Orders `1..=k` only.
    pub fn truncated(&self, k: usize) -> StarSeries {
        StarSeries { orders: self.orders.range(1..=k).map(|(j, c)| (*j, c.clone())).collect() }
    }

    /// Parses lines `k <tab> p/q <tab> graph`; `#` lines and blanks are skipped.
    pub fn parse(text: &str) -> Result<StarSeries> {
        let mut series = StarSeries::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.splitn(3, '\t');
            let (Some(k), Some(c), Some(g)) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::parse(lineno + 1, "expected `k <tab> p/q <tab> graph`"));
            };
            let k: usize = k.trim().parse().map_err(|_| Error::parse(lineno + 1, "invalid order"))?;
            if k == 0 {
                return Err(Error::parse(lineno + 1, "order 0 is implicit"));
            }
            let c = parse_rational(c)?;
            let g = parse_graph(g)?;
            if g.m() != 2 {
                return Err(Error::ArityMismatch { expected: 2, found: g.m() });
            }
            series.orders.entry(k).or_insert_with(|| GraphSum::zero(2)).add_graph(&g, &c);
        }
        Ok(series)
    }
}

impl fmt::Display for StarSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in &self.orders {
            for (g, v) in c.terms() {
                writeln!(f, "{k}\t{}\t{g}", format_ratio(v))?;
            }
        }
        Ok(())
    }
}

/// The class of `{f, g} = Σ p^{ij} ∂_i f ∂_j g`.
pub fn poisson_class() -> GraphSum {
    GraphSum::from_graph(&parse_graph("1 2 ; 3: 1 2").expect("valid graph"))
}

/// Kontsevich's star-product through order 2: the Poisson class, then
/// `½ Γ₁ + ⅓ Γ₂ + ⅓ Γ₃ - ⅙ Γ₄` where `Γ₄` carries a 2-cycle.
pub fn kontsevich_k2() -> StarSeries {
    let mut k2 = GraphSum::zero(2);
    for (text, w) in [
        ("2 2 ; 3: 1 2 / 4: 1 2", ratio(1, 2)),
        ("2 2 ; 3: 1 4 / 4: 1 2", ratio(1, 3)),
        ("2 2 ; 3: 1 2 / 4: 3 2", ratio(1, 3)),
        ("2 2 ; 3: 1 4 / 4: 3 2", ratio(-1, 6)),
    ] {
        k2.add_graph(&parse_graph(text).expect("valid graph"), &w);
    }
    StarSeries::new().with_order(1, poisson_class()).with_order(2, k2)
}

/// Series selectable by name from the command line.
pub fn named_series(name: &str) -> Result<StarSeries> {
    match name {
        "kontsevich-k2" | "kontsevich_k2" => Ok(kontsevich_k2()),
        other => Err(Error::InvalidParameter(format!("unknown series `{other}`"))),
    }
}

fn lower_orders(series: &StarSeries, k: usize) -> Result<Vec<&GraphSum>> {
    (1..k).map(|j| series.order(j).ok_or(Error::MissingOrder(j))).collect()
}

/// `½ Σ_{a+b=k, a,b ≥ 1} [c_a, c_b]_G` (arity 3).
pub fn mc_defect(series: &StarSeries, k: usize) -> Result<GraphSum> {
    let orders = lower_orders(series, k)?;
    let mut out = GraphSum::zero(3);
    for a in 1..k {
        let bracket = graph_gerstenhaber(orders[a - 1], orders[k - a - 1]);
        out.add_scaled(&bracket, &ratio(1, 2));
    }
    Ok(out)
}

/// `δ c_k + ½ Σ [c_a, c_b]_G`, the order-`k` associativity defect.
pub fn mc_residual(series: &StarSeries, k: usize) -> Result<GraphSum> {
    let ck = series.order(k).ok_or(Error::MissingOrder(k))?;
    let mut out = mc_defect(series, k)?;
    out.add_scaled(&graph_delta(ck), &Rational::one());
    Ok(out)
}

/// The change of parameter `ħ → ħ + a₂ ħ² + a₃ ħ³`, truncated at the
/// series' top order. At orders ≤ 3 it gives `c₁`, `c₂ + a₂ c₁`,
/// `c₃ + 2 a₂ c₂ + a₃ c₁`.
pub fn reparametrize(series: &StarSeries, a2: &Rational, a3: &Rational) -> StarSeries {
    let top = series.max_order();
    let mut subst = vec![Rational::zero(); top + 1];
    for (j, v) in [(1, Rational::one()), (2, a2.clone()), (3, a3.clone())] {
        if j <= top {
            subst[j] = v;
        }
    }
    // power[j] = coefficients of subst^k, truncated at degree `top`
    let mut power = vec![Rational::zero(); top + 1];
    power[0] = Rational::one();
    let mut out = StarSeries::new();
    let mut acc: BTreeMap<usize, GraphSum> = BTreeMap::new();
    for k in 1..=top {
        let mut next = vec![Rational::zero(); top + 1];
        for (i, pi) in power.iter().enumerate() {
            if pi.is_zero() {
                continue;
            }
            for (j, sj) in subst.iter().enumerate() {
                if i + j <= top && !sj.is_zero() {
                    next[i + j] += pi * sj;
                }
            }
        }
        power = next;
        if let Some(ck) = series.order(k) {
            for (n, w) in power.iter().enumerate() {
                if !w.is_zero() {
                    acc.entry(n).or_insert_with(|| GraphSum::zero(2)).add_scaled(ck, w);
                }
            }
        }
    }
    for (n, c) in acc {
        out.set_order(n, c);
    }
    out
}

/// Settings shared by the solver routes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub wheel_free: bool,
    /// Cap on stored nonzeros of a graph-level system.
    pub max_nonzeros: usize,
    pub max_order: usize,
    /// Seed for randomized fixtures (the random cubic potential).
    pub seed: u64,
    /// Largest argument-degree cap tried by the fixture-growth policy.
    pub max_degree_cap: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { wheel_free: true, max_nonzeros: 200_000, max_order: 4, seed: 7, max_degree_cap: 16 }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Solved,
    Obstructed,
    Inconclusive,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// A functional on graph classes that kills `δ(span) + Leibniz span` but
    /// not the defect.
    GraphFunctional,
    /// An infeasible system of evaluated constraints.
    Evaluation,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct RankRecord {
    pub pivot_order: PivotOrder,
    pub rows: usize,
    pub rank: usize,
    pub augmented_rank: usize,
}

fn is_zero_count(n: &usize) -> bool {
    *n == 0
}

/// One step of the fixture-growth policy; ranks are those of the planning
/// pass modulo a prime.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Round {
    pub fixtures: Vec<String>,
    pub degree_cap: u32,
    pub rows: usize,
    pub rank: usize,
    pub augmented_rank: usize,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub infeasible: bool,
    pub fixtures: Vec<String>,
    /// Evaluated constraints generated; the exact passes eliminate the
    /// subset selected by a planning pass modulo a prime.
    #[serde(skip_serializing_if = "is_zero_count", default)]
    pub constraint_rows: usize,
    pub ranks: Vec<RankRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub rounds: Vec<Round>,
    /// For graph functionals: `y <tab> graph` lines over defect classes.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub functional: Option<String>,
    /// Independent re-check: a second pivot order (evaluation) or a direct
    /// multiplication (graph functional) gave the same verdict.
    pub verified: bool,
}

/// Outcome of one Maurer–Cartan order.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct MCReport {
    pub order: usize,
    pub status: Status,
    pub wheel_free: bool,
    pub basis_size: usize,
    pub leibniz_size: usize,
    /// `[rows, columns]` of the system that decided the status.
    pub matrix_shape: [usize; 2],
    pub nonzeros: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub affine_dim: Option<usize>,
    /// The particular solution in the graph-sum file format.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub solution: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub graph_certificate: Option<Certificate>,
}

impl MCReport {
    pub fn solution_sum(&self) -> Option<GraphSum> {
        self.solution.as_deref().map(|s| GraphSum::parse(s, Some(2)).expect("solution text is well formed"))
    }
}

/// Unknowns at order `k`: classes of `K_{j,2}` for `j ≤ k`, wheel-free or all.
pub fn solution_basis(k: usize, wheel_free: bool) -> Result<Vec<DirectedGraph>> {
    let filter = if wheel_free { GraphFilter::WheelFree } else { GraphFilter::All };
    let mut out = Vec::new();
    for j in 1..=k {
        out.extend(enumerate_graphs(j, 2, filter)?.classes);
    }
    Ok(out)
}

/// Expansions of all Leibniz generators of arity 3 with `2..=k` copies of `p`.
pub fn leibniz_span(k: usize) -> Result<Vec<GraphSum>> {
    let mut out = Vec::new();
    for j in 2..=k {
        out.extend(leibniz_generators(j, 3, false)?.into_iter().map(|g| g.expansion));
    }
    Ok(out)
}

/// A linear system whose rows are graph classes.
struct GraphSystem {
    rows: Vec<DirectedGraph>,
    matrix: SparseMatrix,
    rhs: Vec<Rational>,
}

impl GraphSystem {
    fn new(columns: &[&GraphSum], rhs: &GraphSum, max_nonzeros: usize) -> Result<GraphSystem> {
        let mut by_row: BTreeMap<&DirectedGraph, SparseRow> = BTreeMap::new();
        let mut nnz = 0;
        for (c, col) in columns.iter().enumerate() {
            for (g, v) in col.terms() {
                by_row.entry(g).or_default().push((c, v.clone()));
                nnz += 1;
            }
            if nnz > max_nonzeros {
                return Err(Error::BudgetExceeded(format!("matrix exceeds {max_nonzeros} nonzeros")));
            }
        }
        for g in rhs.terms().map(|(g, _)| g) {
            by_row.entry(g).or_default();
        }
        let mut matrix = SparseMatrix::new(columns.len());
        let mut rows = Vec::new();
        let mut b = Vec::new();
        for (g, row) in by_row {
            b.push(rhs.coefficient(g));
            rows.push(g.clone());
            matrix.push_row(row);
        }
        Ok(GraphSystem { rows, matrix, rhs: b })
    }
}

fn check_normalized(series: &StarSeries, k: usize) -> Result<()> {
    lower_orders(series, k)?;
    if k >= 2 && series.order(1) != Some(&poisson_class()) {
        return Err(Error::MissingNormalization);
    }
    Ok(())
}

/// Solves order `k` at graph level, keeping orders `1..k` of `series`.
/// When the graph route is obstructed the evaluation route runs with the
/// fixture-growth policy and its certificate becomes authoritative.
pub fn solve_order(series: &StarSeries, k: usize, config: &SolverConfig) -> Result<MCReport> {
    if k == 0 {
        return Err(Error::InvalidParameter("orders start at 1".into()));
    }
    if k > config.max_order {
        return Err(Error::BudgetExceeded(format!("order {k} exceeds the order cap {}", config.max_order)));
    }
    check_normalized(series, k)?;
    let basis = solution_basis(k, config.wheel_free)?;
    let deltas: Vec<GraphSum> =
        basis.par_iter().map(|g| graph_delta(&GraphSum::from_graph(g))).collect();
    let leibniz = leibniz_span(k)?;
    let rhs = if k >= 2 { mc_defect(series, k)?.neg() } else { GraphSum::zero(3) };
    let columns: Vec<&GraphSum> = deltas.iter().chain(leibniz.iter()).collect();
    let mut system = GraphSystem::new(&columns, &rhs, config.max_nonzeros)?;
    let nx = basis.len();
    if k == 1 {
        // ½(c₁(f,g) - c₁(g,f)) = {f,g}: the Poisson class has coefficient 1
        let p_index = basis.iter().position(|g| GraphSum::from_graph(g) == poisson_class());
        let p_index = p_index.ok_or(Error::MissingNormalization)?;
        system.matrix.push_row(vec![(p_index, Rational::one())]);
        system.rhs.push(Rational::one());
    }
    let shape = [system.matrix.rows.len(), system.matrix.ncols];
    let nonzeros = system.matrix.nnz();
    let echelon = system.matrix.echelon(Some(&system.rhs), PivotOrder::Markowitz);
    let mut report = MCReport {
        order: k,
        status: Status::Solved,
        wheel_free: config.wheel_free,
        basis_size: nx,
        leibniz_size: leibniz.len(),
        matrix_shape: shape,
        nonzeros,
        affine_dim: None,
        solution: None,
        verified: None,
        certificate: None,
        graph_certificate: None,
    };
    if let Some(x) = echelon.particular_solution() {
        let mut solution = GraphSum::zero(2);
        for (g, v) in basis.iter().zip(&x[..nx]) {
            solution.add_graph(g, v);
        }
        let leibniz_rank = {
            let mut only_l = SparseMatrix::new(leibniz.len());
            for row in &system.matrix.rows {
                only_l.push_row(row.iter().filter(|(c, _)| *c >= nx).map(|(c, v)| (c - nx, v.clone())).collect());
            }
            only_l.rank(PivotOrder::Markowitz)
        };
        report.affine_dim = Some(nx + leibniz_rank - echelon.rank());
        let mut extended = series.truncated(k - 1);
        extended.set_order(k, solution.clone());
        report.verified = Some(verify_order(&extended, k)?);
        report.solution = Some(solution.to_string());
        return Ok(report);
    }
    report.status = Status::Obstructed;
    let y = left_functional(&system.matrix, &system.rhs, PivotOrder::Natural);
    let graph_cert = Certificate {
        kind: CertificateKind::GraphFunctional,
        infeasible: true,
        fixtures: Vec::new(),
        constraint_rows: 0,
        ranks: vec![RankRecord {
            pivot_order: PivotOrder::Markowitz,
            rows: shape[0],
            rank: echelon.rank(),
            augmented_rank: echelon.augmented_rank(),
        }],
        rounds: Vec::new(),
        verified: y.as_ref().is_some_and(|y| verify_functional(&system.matrix, &system.rhs, y)),
        functional: y.map(|y| {
            system
                .rows
                .iter()
                .zip(&y)
                .filter(|(_, v)| !v.is_zero())
                .map(|(g, v)| format!("{}\t{g}\n", format_ratio(v)))
                .collect()
        }),
    };
    report.graph_certificate = Some(graph_cert);
    let eval = fixture_growth(series, k, config)?;
    report.certificate = eval.certificate;
    Ok(report)
}

/// Solves orders `1..=max_order` in turn, stopping at the first obstruction.
pub fn solve_series(max_order: usize, config: &SolverConfig) -> Result<(StarSeries, Vec<MCReport>)> {
    let mut series = StarSeries::new();
    let mut reports = Vec::new();
    for k in 1..=max_order {
        let report = solve_order(&series, k, config)?;
        let solution = report.solution_sum();
        reports.push(report);
        match solution {
            Some(s) => series.set_order(k, s),
            None => break,
        }
    }
    Ok((series, reports))
}

/// Re-verifies order `k`: the residual `δc_k + defect` must lie in the
/// Leibniz span. Uses the natural pivot order, independent of the solver.
pub fn verify_order(series: &StarSeries, k: usize) -> Result<bool> {
    let residual = mc_residual(series, k)?;
    if residual.is_empty() {
        return Ok(true);
    }
    let leibniz = leibniz_span(k)?;
    let columns: Vec<&GraphSum> = leibniz.iter().collect();
    let system = GraphSystem::new(&columns, &residual, usize::MAX)?;
    Ok(crate::linalg::solve(&system.matrix, &system.rhs, PivotOrder::Natural).particular.is_some())
}

/// Order-`k` residual evaluated on a bivector, as an operator symbol.
pub fn evaluated_residual(series: &StarSeries, k: usize, p: &PoissonStructure) -> Result<OperatorSymbol> {
    let ck = series.order(k).ok_or(Error::MissingOrder(k))?;
    let lower = lower_orders(series, k)?;
    let mut out = OperatorSymbol::of_graph_sum(ck, p).delta();
    out.add_scaled(&symbol_defect(&lower, k, p), &Rational::one());
    Ok(out)
}

/// The residual on every monomial triple of degree ≤ `max_degree`, by direct
/// application. Returns the triples where it does not vanish.
pub fn residual_on_triples(
    series: &StarSeries,
    k: usize,
    p: &PoissonStructure,
    max_degree: u32,
) -> Result<Vec<[Poly; 3]>> {
    let symbol = evaluated_residual(series, k, p)?;
    let triples = crate::eval::monomial_tuples(p.dim(), 3, max_degree);
    let bad: Vec<Option<[Poly; 3]>> = triples
        .par_iter()
        .map(|t| {
            let v = symbol.apply(t).expect("shapes agree");
            (!v.is_zero()).then(|| [t[0].clone(), t[1].clone(), t[2].clone()])
        })
        .collect();
    Ok(bad.into_iter().flatten().collect())
}

fn symbol_defect(lower: &[&GraphSum], k: usize, p: &PoissonStructure) -> OperatorSymbol {
    let symbols: Vec<OperatorSymbol> = lower.iter().map(|c| OperatorSymbol::of_graph_sum(c, p)).collect();
    let mut out = OperatorSymbol::zero(3, p.dim());
    for a in 1..k {
        out.add_scaled(&symbols[a - 1].gerstenhaber(&symbols[k - a - 1]), &ratio(1, 2));
    }
    out
}

/// The argument tuples an evaluation fixture is tested on.
#[derive(Clone, Debug, PartialEq)]
pub enum ArgumentSet {
    /// All monomial triples with every entry of degree ≤ the cap. Realized on
    /// operator symbols: a triple-wise identity for all such monomials is
    /// equivalent to matching every symbol key with slot orders ≤ the cap.
    MonomialDegree(u32),
    /// Explicit triples.
    Triples(Vec<[Poly; 3]>),
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub p: PoissonStructure,
    pub args: ArgumentSet,
}

/// One evaluated constraint with the largest slot order it involves.
struct EvalRow {
    order: u32,
    row: SparseRow,
    rhs: Rational,
}

/// Evaluated constraints `δ(Σ x_b b) = -defect` on one bivector: one row per
/// (symbol key, coefficient monomial).
fn symbol_rows(basis: &[DirectedGraph], lower: &[&GraphSum], k: usize, p: &PoissonStructure) -> Vec<EvalRow> {
    let deltas: Vec<OperatorSymbol> = basis
        .par_iter()
        .map(|g| OperatorSymbol::of_graph_sum(&GraphSum::from_graph(g), p).delta())
        .collect();
    let defect = symbol_defect(lower, k, p);
    let mut rows: BTreeMap<(Vec<u32>, Monomial), (SparseRow, Rational)> = BTreeMap::new();
    for (c, sym) in deltas.iter().enumerate() {
        for (key, poly) in sym.terms() {
            for (mono, v) in poly.terms() {
                rows.entry((key.clone(), mono.clone())).or_default().0.push((c, v.clone()));
            }
        }
    }
    for (key, poly) in defect.terms() {
        for (mono, v) in poly.terms() {
            rows.entry((key.clone(), mono.clone())).or_default().1 = -v.clone();
        }
    }
    rows.into_iter()
        .map(|((key, _), (row, rhs))| EvalRow {
            order: (0..3).map(|a| defect.slot_order(&key, a)).max().unwrap_or(0),
            row,
            rhs,
        })
        .collect()
}

fn triple_rows(basis: &[DirectedGraph], lower: &[&GraphSum], k: usize, p: &PoissonStructure, triples: &[[Poly; 3]]) -> Vec<EvalRow> {
    let deltas: Vec<OperatorSymbol> = basis
        .par_iter()
        .map(|g| OperatorSymbol::of_graph_sum(&GraphSum::from_graph(g), p).delta())
        .collect();
    let defect = symbol_defect(lower, k, p);
    let mut out = Vec::new();
    for t in triples {
        let mut rows: BTreeMap<Monomial, (SparseRow, Rational)> = BTreeMap::new();
        for (c, sym) in deltas.iter().enumerate() {
            for (mono, v) in sym.apply(t).expect("shapes agree").terms() {
                rows.entry(mono.clone()).or_default().0.push((c, v.clone()));
            }
        }
        for (mono, v) in defect.apply(t).expect("shapes agree").terms() {
            rows.entry(mono.clone()).or_default().1 = -v.clone();
        }
        out.extend(rows.into_values().map(|(row, rhs)| EvalRow { order: 0, row, rhs }));
    }
    out
}

fn fixture_rows(basis: &[DirectedGraph], lower: &[&GraphSum], k: usize, fixture: &Fixture) -> Result<Vec<EvalRow>> {
    if !fixture.p.is_poisson() {
        return Err(Error::NotPoisson(fixture.p.name().to_string()));
    }
    Ok(match &fixture.args {
        ArgumentSet::MonomialDegree(cap) => {
            symbol_rows(basis, lower, k, &fixture.p).into_iter().filter(|r| r.order <= *cap).collect()
        }
        ArgumentSet::Triples(t) => triple_rows(basis, lower, k, &fixture.p, t),
    })
}

fn fixture_label(f: &Fixture) -> String {
    match &f.args {
        ArgumentSet::MonomialDegree(cap) => format!("{} [monomials of degree <= {cap}]", f.p.name()),
        ArgumentSet::Triples(t) => format!("{} [{} explicit triples]", f.p.name(), t.len()),
    }
}

fn rank_record(order: PivotOrder, e: &Echelon) -> RankRecord {
    RankRecord { pivot_order: order, rows: e.rows_pushed(), rank: e.rank(), augmented_rank: e.augmented_rank() }
}

fn replay(ncols: usize, rows: &[&EvalRow], order: PivotOrder) -> Echelon {
    let plain: Vec<SparseRow> = rows.iter().map(|r| r.row.clone()).collect();
    let mut e = Echelon::with_order(ncols, &plain, order);
    for r in rows {
        e.push(&r.row, &r.rhs);
    }
    e
}

/// Evaluated constraints streamed through the modular planner.
struct PlannedSystem<'a> {
    planner: ModularPlanner,
    all: Vec<&'a EvalRow>,
    selected: Vec<&'a EvalRow>,
}

impl<'a> PlannedSystem<'a> {
    fn new(ncols: usize) -> Self {
        PlannedSystem { planner: ModularPlanner::new(ncols), all: Vec::new(), selected: Vec::new() }
    }

    fn push(&mut self, row: &'a EvalRow) {
        self.all.push(row);
        if self.planner.offer(&row.row, &row.rhs) {
            self.selected.push(row);
        }
    }

    fn planning_ranks(&self) -> (usize, usize) {
        let aug = self.planner.augmented_rank();
        (aug - usize::from(!self.planner.is_consistent()), aug)
    }
}

fn eval_report(k: usize, config: &SolverConfig, basis: usize, system: &PlannedSystem<'_>, fixtures: Vec<String>, rounds: Vec<Round>) -> MCReport {
    let mut rows = &system.selected;
    let mut primary = replay(basis, rows, PivotOrder::Markowitz);
    if !system.planner.is_consistent() && primary.is_consistent() {
        // the prime was unlucky: decide on every row instead
        rows = &system.all;
        primary = replay(basis, rows, PivotOrder::Markowitz);
    }
    let check = replay(basis, rows, PivotOrder::Natural);
    let infeasible = !primary.is_consistent();
    let status = if infeasible { Status::Obstructed } else { Status::Inconclusive };
    MCReport {
        order: k,
        status,
        wheel_free: config.wheel_free,
        basis_size: basis,
        leibniz_size: 0,
        matrix_shape: [system.all.len(), basis],
        nonzeros: system.all.iter().map(|r| r.row.len()).sum(),
        affine_dim: None,
        solution: None,
        verified: None,
        certificate: Some(Certificate {
            kind: CertificateKind::Evaluation,
            infeasible,
            fixtures,
            constraint_rows: system.all.len(),
            verified: check.is_consistent() == primary.is_consistent()
                && check.rank() == primary.rank()
                && check.augmented_rank() == primary.augmented_rank(),
            ranks: vec![rank_record(PivotOrder::Markowitz, &primary), rank_record(PivotOrder::Natural, &check)],
            rounds,
            functional: None,
        }),
        graph_certificate: None,
    }
}

/// The evaluation route on explicit fixtures: infeasibility of the stacked
/// system proves that no universal order-`k` term exists in the basis;
/// feasibility proves nothing and is reported as inconclusive.
pub fn eval_obstruction(series: &StarSeries, k: usize, fixtures: &[Fixture], config: &SolverConfig) -> Result<MCReport> {
    check_normalized(series, k)?;
    let lower = lower_orders(series, k)?;
    let basis = solution_basis(k, config.wheel_free)?;
    let mut rows = Vec::new();
    for f in fixtures {
        rows.extend(fixture_rows(&basis, &lower, k, f)?);
    }
    let mut system = PlannedSystem::new(basis.len());
    for r in &rows {
        system.push(r);
    }
    Ok(eval_report(k, config, basis.len(), &system, fixtures.iter().map(fixture_label).collect(), Vec::new()))
}

/// A graph sum satisfying every evaluated constraint on the fixtures, when
/// the stacked system is feasible. It solves the order-`k` equation on these
/// fixtures only and need not be a universal solution.
pub fn eval_candidate(series: &StarSeries, k: usize, fixtures: &[Fixture], config: &SolverConfig) -> Result<Option<GraphSum>> {
    check_normalized(series, k)?;
    let lower = lower_orders(series, k)?;
    let basis = solution_basis(k, config.wheel_free)?;
    let mut rows = Vec::new();
    for f in fixtures {
        rows.extend(fixture_rows(&basis, &lower, k, f)?);
    }
    let mut system = PlannedSystem::new(basis.len());
    for r in &rows {
        system.push(r);
    }
    let holds = |x: &[Rational]| {
        system.all.iter().all(|r| {
            let lhs: Rational = r.row.iter().map(|(c, v)| v * &x[*c]).sum();
            lhs == r.rhs
        })
    };
    let candidate = replay(basis.len(), &system.selected, PivotOrder::Markowitz).particular_solution();
    let x = match candidate {
        Some(x) if holds(&x) => x,
        // an unlucky prime: decide on every row
        _ => match replay(basis.len(), &system.all, PivotOrder::Markowitz).particular_solution() {
            Some(x) => x,
            None => return Ok(None),
        },
    };
    let mut out = GraphSum::zero(2);
    for (g, v) in basis.iter().zip(&x) {
        out.add_graph(g, v);
    }
    Ok(Some(out))
}

/// A cubic potential with seeded integer coefficients in `[-3, 3]`.
pub fn random_cubic(seed: u64) -> Poly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut phi = Poly::zero(3);
        for m in crate::eval::monomials_up_to(3, 3, 3) {
            let c: i64 = rng.gen_range(-3..=3);
            phi.add_scaled(&m, &int(c));
        }
        if !phi.is_zero() {
            return phi;
        }
    }
}

/// `1 + a₁x₁ + a₂x₂ + a₃x₃` with seeded integer `aᵢ` in `[-3, 3]`, not all zero.
pub fn random_affine(seed: u64) -> Poly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut f = Poly::one(3);
        for i in 0..3 {
            let c: i64 = rng.gen_range(-3..=3);
            f.add_scaled(&Poly::var(3, i), &int(c));
        }
        if f.degree() == Some(1) {
            return f;
        }
    }
}

/// Bivectors used by the fixture-growth policy, in order: the Lie–Poisson
/// structures so(3) and sl2, Jacobian structures for a seeded random cubic
/// and for `x1x2x3`, then a conformally rescaled Jacobian structure with
/// seeded factor and potential.
pub fn growth_fixtures(seed: u64) -> Vec<PoissonStructure> {
    [
        preset_poisson("so3", None),
        preset_poisson("sl2", None),
        preset_poisson("jacobian", Some(&random_cubic(seed))),
        preset_poisson("jacobian", Some(&Poly::parse("x1*x2*x3", 3).expect("valid polynomial"))),
        conformal_jacobian(&random_affine(seed), &random_cubic(seed.wrapping_add(1))),
    ]
    .into_iter()
    .map(|p| p.expect("presets are Poisson"))
    .collect()
}

/// The evaluation route with the fixture-growth policy: fixtures are added
/// one at a time; for each fixture set the argument-degree cap doubles from 1
/// until the rank is unchanged for two consecutive rounds. Stops as soon as
/// the stacked system is infeasible.
pub fn fixture_growth(series: &StarSeries, k: usize, config: &SolverConfig) -> Result<MCReport> {
    check_normalized(series, k)?;
    let lower = lower_orders(series, k)?;
    let basis = solution_basis(k, config.wheel_free)?;
    let fixtures = growth_fixtures(config.seed);
    let all_rows: Vec<Vec<EvalRow>> = fixtures.iter().map(|p| symbol_rows(&basis, &lower, k, p)).collect();
    let mut system = PlannedSystem::new(basis.len());
    let mut caps = vec![0u32; fixtures.len()];
    let mut rounds = Vec::new();
    let mut last_rank = 0;
    'growth: for active in 1..=fixtures.len() {
        let mut unchanged = 0;
        let mut cap = 1;
        while cap <= config.max_degree_cap {
            for (f, rows) in all_rows.iter().enumerate().take(active) {
                for r in rows.iter().filter(|r| r.order > caps[f] && r.order <= cap) {
                    system.push(r);
                }
                caps[f] = caps[f].max(cap);
            }
            let (rank, augmented_rank) = system.planning_ranks();
            rounds.push(Round {
                fixtures: fixtures[..active].iter().map(|p| p.name().to_string()).collect(),
                degree_cap: cap,
                rows: system.all.len(),
                rank,
                augmented_rank,
            });
            if !system.planner.is_consistent() {
                break 'growth;
            }
            if augmented_rank == last_rank {
                unchanged += 1;
                if unchanged >= 2 {
                    break;
                }
            } else {
                unchanged = 0;
            }
            last_rank = augmented_rank;
            cap *= 2;
        }
    }
    let used = rounds.last().map_or(0, |r| r.fixtures.len());
    let labels = fixtures[..used]
        .iter()
        .zip(&caps)
        .map(|(p, cap)| format!("{} [monomials of degree <= {cap}]", p.name()))
        .collect();
    Ok(eval_report(k, config, basis.len(), &system, labels, rounds))
}

/// Exact kernel of `δ` on the span of `K_{n,2}` classes (wheel-free or all),
/// optionally modulo the Leibniz span in arity 3.
pub fn cocycle_kernel(n: usize, wheel_free: bool, modulo_leibniz: bool) -> Result<Vec<GraphSum>> {
    if n == 0 {
        return Err(Error::InvalidParameter("cocycle kernels need n >= 1".into()));
    }
    let filter = if wheel_free { GraphFilter::WheelFree } else { GraphFilter::All };
    let basis = enumerate_graphs(n, 2, filter)?.classes;
    let deltas: Vec<GraphSum> = basis.par_iter().map(|g| graph_delta(&GraphSum::from_graph(g))).collect();
    let leibniz = if modulo_leibniz && n >= 2 {
        leibniz_generators(n, 3, false)?.into_iter().map(|g| g.expansion).collect()
    } else {
        Vec::new()
    };
    let columns: Vec<&GraphSum> = deltas.iter().chain(leibniz.iter()).collect();
    let system = GraphSystem::new(&columns, &GraphSum::zero(3), usize::MAX)?;
    let kernel = system.matrix.echelon(None, PivotOrder::Markowitz).nullspace();
    // project onto the graph coefficients and keep an independent subset
    let nx = basis.len();
    let mut independent = Echelon::new(nx, (0..nx).collect());
    let mut out = Vec::new();
    for v in kernel {
        let row: SparseRow = v[..nx].iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect();
        if independent.push_homogeneous(&row) {
            let mut s = GraphSum::zero(2);
            for (i, x) in row {
                s.add_graph(&basis[i], &x);
            }
            out.push(s);
        }
    }
    Ok(out)
}

/// Classes appearing in any of the sums, in canonical order.
pub fn support(sums: &[GraphSum]) -> BTreeSet<DirectedGraph> {
    sums.iter().flat_map(|s| s.terms().map(|(g, _)| g.clone())).collect()
}
