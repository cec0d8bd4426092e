//! Exact sparse linear algebra over the rationals.
//!
//! Rows are scaled to primitive integer vectors and reduced fraction-free:
//! eliminating a leading entry replaces `r` by `b·r - a·p` and divides out the
//! content, so entries stay integral and small. The echelon form is built
//! incrementally, which lets callers stream equations and stop early.
//!
//! Two deterministic pivot orders are available. [`PivotOrder::Markowitz`]
//! visits columns by increasing nonzero count (ties by index) so that sparse
//! columns are eliminated first; [`PivotOrder::Natural`] uses column indices
//! as given. Verdicts computed under both orders must agree.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::Rational;

/// A sparse row: `(column, value)` pairs with distinct columns.
pub type SparseRow = Vec<(usize, Rational)>;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PivotOrder {
    Markowitz,
    Natural,
}

/// Column positions for a pivot order; the right-hand side is always last.
pub fn column_positions(ncols: usize, rows: &[SparseRow], order: PivotOrder) -> Vec<usize> {
    match order {
        PivotOrder::Natural => (0..ncols).collect(),
        PivotOrder::Markowitz => {
            let mut count = vec![0usize; ncols];
            for row in rows {
                for &(c, _) in row {
                    count[c] += 1;
                }
            }
            let mut cols: Vec<usize> = (0..ncols).collect();
            cols.sort_by_key(|&c| (count[c], c));
            let mut pos = vec![0; ncols];
            for (p, &c) in cols.iter().enumerate() {
                pos[c] = p;
            }
            pos
        }
    }
}

type IntRow = Vec<(usize, BigInt)>;

/// Clears denominators, maps columns to positions and sorts.
fn to_int_row(row: &SparseRow, rhs: &Rational, pos: &[usize], rhs_pos: usize) -> IntRow {
    let mut lcm = BigInt::one();
    for (_, v) in row.iter().map(|(c, v)| (c, v)).chain(std::iter::once((&0, rhs))) {
        if !v.is_zero() {
            lcm = lcm.lcm(v.denom());
        }
    }
    let mut out: IntRow = row
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(c, v)| (pos[*c], (v * &lcm).to_integer()))
        .collect();
    if !rhs.is_zero() {
        out.push((rhs_pos, (rhs * &lcm).to_integer()));
    }
    out.sort_by_key(|e| e.0);
    make_primitive(&mut out);
    out
}

fn make_primitive(row: &mut IntRow) {
    let mut g = BigInt::zero();
    for (_, v) in row.iter() {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    if row.first().is_some_and(|(_, v)| v.is_negative()) {
        g = -g;
    }
    if !g.is_zero() && !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v = &*v / &g;
        }
    }
}

/// `b·r - a·p` where `a`, `b` are the leading entries of `r` and `p`.
fn eliminate(r: &IntRow, p: &IntRow) -> IntRow {
    let a = &r[0].1;
    let b = &p[0].1;
    let g = a.gcd(b);
    let (fa, fb) = (a / &g, b / &g);
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (1, 1);
    while i < r.len() || j < p.len() {
        let ci = r.get(i).map_or(usize::MAX, |e| e.0);
        let cj = p.get(j).map_or(usize::MAX, |e| e.0);
        if ci < cj {
            out.push((ci, &fb * &r[i].1));
            i += 1;
        } else if cj < ci {
            out.push((cj, -(&fa * &p[j].1)));
            j += 1;
        } else {
            let v = &fb * &r[i].1 - &fa * &p[j].1;
            if !v.is_zero() {
                out.push((ci, v));
            }
            i += 1;
            j += 1;
        }
    }
    make_primitive(&mut out);
    out
}

/// Incrementally built row echelon form of an augmented system `A x = b`.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    pos: Vec<usize>,
    pivots: HashMap<usize, IntRow>,
    seen: HashSet<IntRow>,
    inconsistent: bool,
    rows_pushed: usize,
}

impl Echelon {
    /// An empty system with the given column positions (see [`column_positions`]).
    pub fn new(ncols: usize, pos: Vec<usize>) -> Self {
        assert_eq!(pos.len(), ncols);
        Echelon {
            ncols,
            pos,
            pivots: HashMap::new(),
            seen: HashSet::new(),
            inconsistent: false,
            rows_pushed: 0,
        }
    }

    pub fn with_order(ncols: usize, rows: &[SparseRow], order: PivotOrder) -> Self {
        Echelon::new(ncols, column_positions(ncols, rows, order))
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Adds the equation `row · x = rhs`; returns true when the rank of the
    /// augmented matrix grew.
    pub fn push(&mut self, row: &SparseRow, rhs: &Rational) -> bool {
        self.rows_pushed += 1;
        let mut r = to_int_row(row, rhs, &self.pos, self.ncols);
        if r.is_empty() || !self.seen.insert(r.clone()) {
            return false;
        }
        while let Some(&(lead, _)) = r.first() {
            match self.pivots.get(&lead) {
                Some(p) => r = eliminate(&r, p),
                None => {
                    if lead == self.ncols {
                        self.inconsistent = true;
                    }
                    self.pivots.insert(lead, r);
                    return true;
                }
            }
        }
        false
    }

    pub fn push_homogeneous(&mut self, row: &SparseRow) -> bool {
        self.push(row, &Rational::zero())
    }

    pub fn rows_pushed(&self) -> usize {
        self.rows_pushed
    }

    /// Rank of the coefficient matrix `A`.
    pub fn rank(&self) -> usize {
        self.pivots.len() - usize::from(self.inconsistent)
    }

    /// Rank of the augmented matrix `[A | b]`.
    pub fn augmented_rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_consistent(&self) -> bool {
        !self.inconsistent
    }

    /// Columns without a pivot.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|&c| !self.pivots.contains_key(&self.pos[c])).collect()
    }

    /// Back substitution with the given values on free columns.
    fn back_substitute(&self, free: &HashMap<usize, Rational>, homogeneous: bool) -> Vec<Rational> {
        let mut x_pos = vec![Rational::zero(); self.ncols];
        for (&c, v) in free {
            x_pos[self.pos[c]] = v.clone();
        }
        let mut leads: Vec<usize> = self.pivots.keys().copied().filter(|&p| p < self.ncols).collect();
        leads.sort_unstable_by(|a, b| b.cmp(a));
        for lead in leads {
            let row = &self.pivots[&lead];
            let mut acc = Rational::zero();
            for (p, v) in &row[1..] {
                if *p == self.ncols {
                    if !homogeneous {
                        acc += Rational::from(v.clone());
                    }
                } else if !x_pos[*p].is_zero() {
                    acc -= Rational::from(v.clone()) * &x_pos[*p];
                }
            }
            x_pos[lead] = acc / Rational::from(row[0].1.clone());
        }
        (0..self.ncols).map(|c| x_pos[self.pos[c]].clone()).collect()
    }

    /// The solution with all free variables zero, when consistent.
    pub fn particular_solution(&self) -> Option<Vec<Rational>> {
        self.is_consistent().then(|| self.back_substitute(&HashMap::new(), false))
    }

    /// A basis of the kernel of `A`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        self.free_columns()
            .into_iter()
            .map(|c| {
                let free = HashMap::from([(c, Rational::one())]);
                self.back_substitute(&free, true)
            })
            .collect()
    }
}

/// A sparse rational matrix stored by rows.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseMatrix {
    pub ncols: usize,
    pub rows: Vec<SparseRow>,
}

impl SparseMatrix {
    pub fn new(ncols: usize) -> Self {
        SparseMatrix { ncols, rows: Vec::new() }
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn push_row(&mut self, mut row: SparseRow) {
        row.retain(|(_, v)| !v.is_zero());
        self.rows.push(row);
    }

    /// Rows sorted by length, then original index: the Markowitz row order.
    fn row_order(&self, order: PivotOrder) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.rows.len()).collect();
        if order == PivotOrder::Markowitz {
            idx.sort_by_key(|&i| (self.rows[i].len(), i));
        }
        idx
    }

    pub fn echelon(&self, rhs: Option<&[Rational]>, order: PivotOrder) -> Echelon {
        let mut e = Echelon::with_order(self.ncols, &self.rows, order);
        let zero = Rational::zero();
        for i in self.row_order(order) {
            let b = rhs.map_or(&zero, |b| &b[i]);
            e.push(&self.rows[i], b);
        }
        e
    }

    pub fn rank(&self, order: PivotOrder) -> usize {
        self.echelon(None, order).rank()
    }

    /// Transpose, as needed for left null vectors.
    pub fn transpose(&self) -> SparseMatrix {
        let mut rows = vec![Vec::new(); self.ncols];
        for (i, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                rows[*c].push((i, v.clone()));
            }
        }
        SparseMatrix { ncols: self.rows.len(), rows }
    }

    /// `y^T A` for a dense `y` over rows.
    pub fn left_multiply(&self, y: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.ncols];
        for (row, yi) in self.rows.iter().zip(y) {
            if yi.is_zero() {
                continue;
            }
            for (c, v) in row {
                out[*c] += v * yi;
            }
        }
        out
    }
}

/// A prime for the modular planning pass (`2^61 - 1`).
pub const PLANNING_PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    // Mersenne reduction: 2^61 ≡ 1
    let z = a as u128 * b as u128;
    let r = (z as u64 & PLANNING_PRIME) + (z >> 61) as u64;
    if r >= PLANNING_PRIME {
        r - PLANNING_PRIME
    } else {
        r
    }
}

fn add_mod(a: u64, b: u64) -> u64 {
    let r = a + b;
    if r >= PLANNING_PRIME {
        r - PLANNING_PRIME
    } else {
        r
    }
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut out = 1;
    while e > 0 {
        if e & 1 == 1 {
            out = mul_mod(out, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    out
}

fn inv_mod(a: u64) -> u64 {
    pow_mod(a, PLANNING_PRIME - 2)
}

fn rational_mod(v: &Rational) -> Option<u64> {
    let p = BigInt::from(PLANNING_PRIME);
    let reduce = |x: &BigInt| -> u64 {
        let r = x.mod_floor(&p);
        r.iter_u64_digits().next().unwrap_or(0)
    };
    let d = reduce(v.denom());
    (d != 0).then(|| mul_mod(reduce(v.numer()), inv_mod(d)))
}

/// Row selection by elimination modulo [`PLANNING_PRIME`].
///
/// Streams equations and keeps those that raise the rank of the augmented
/// matrix modulo the prime (or cannot be reduced modulo it). The kept rows
/// are handed to exact elimination; the planner itself never decides a
/// verdict. A subset of equations that is infeasible over the rationals
/// certifies infeasibility of the whole system.
#[derive(Clone, Debug)]
pub struct ModularPlanner {
    ncols: usize,
    /// Reduced pivot rows over `ncols + 1` positions, keyed by leading position.
    pivots: Vec<Option<Vec<u64>>>,
    rows_seen: usize,
}

impl ModularPlanner {
    pub fn new(ncols: usize) -> Self {
        ModularPlanner { ncols, pivots: vec![None; ncols + 1], rows_seen: 0 }
    }

    /// Returns true when the row must be kept.
    pub fn offer(&mut self, row: &SparseRow, rhs: &Rational) -> bool {
        self.rows_seen += 1;
        let mut v = vec![0u64; self.ncols + 1];
        for (c, x) in row.iter().map(|(c, x)| (*c, x)).chain(std::iter::once((self.ncols, rhs))) {
            if x.is_zero() {
                continue;
            }
            match rational_mod(x) {
                Some(r) => v[c] = add_mod(v[c], r),
                None => return true,
            }
        }
        for lead in 0..=self.ncols {
            if v[lead] == 0 {
                continue;
            }
            match &self.pivots[lead] {
                Some(p) => {
                    let f = PLANNING_PRIME - v[lead];
                    for (x, y) in v[lead..].iter_mut().zip(&p[lead..]) {
                        if *y != 0 {
                            *x = add_mod(*x, mul_mod(f, *y));
                        }
                    }
                }
                None => {
                    let inv = inv_mod(v[lead]);
                    for x in v[lead..].iter_mut() {
                        *x = mul_mod(*x, inv);
                    }
                    self.pivots[lead] = Some(v);
                    return true;
                }
            }
        }
        false
    }

    pub fn rows_seen(&self) -> usize {
        self.rows_seen
    }

    /// Rank of `[A | b]` modulo the prime.
    pub fn augmented_rank(&self) -> usize {
        self.pivots.iter().filter(|p| p.is_some()).count()
    }

    /// Whether `[A | b]` is consistent modulo the prime.
    pub fn is_consistent(&self) -> bool {
        self.pivots[self.ncols].is_none()
    }
}

/// Outcome of solving `A x = b` exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub rank: usize,
    pub augmented_rank: usize,
    pub particular: Option<Vec<Rational>>,
}

pub fn solve(a: &SparseMatrix, b: &[Rational], order: PivotOrder) -> SolveResult {
    let e = a.echelon(Some(b), order);
    SolveResult { rank: e.rank(), augmented_rank: e.augmented_rank(), particular: e.particular_solution() }
}

pub fn nullspace(a: &SparseMatrix, order: PivotOrder) -> Vec<Vec<Rational>> {
    a.echelon(None, order).nullspace()
}

/// A vector `y` with `y^T A = 0` and `y^T b = 1`, which exists exactly when
/// `A x = b` is infeasible.
pub fn left_functional(a: &SparseMatrix, b: &[Rational], order: PivotOrder) -> Option<Vec<Rational>> {
    let mut t = a.transpose();
    let mut rhs = vec![Rational::zero(); t.rows.len()];
    let brow: SparseRow =
        b.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i, v.clone())).collect();
    t.rows.push(brow);
    rhs.push(Rational::one());
    solve(&t, &rhs, order).particular
}

/// Checks `y^T A = 0` and `y^T b ≠ 0` by direct multiplication.
pub fn verify_functional(a: &SparseMatrix, b: &[Rational], y: &[Rational]) -> bool {
    let annihilates = a.left_multiply(y).iter().all(Zero::is_zero);
    let pairing: Rational = y.iter().zip(b).map(|(u, v)| u * v).sum();
    annihilates && !pairing.is_zero()
}

/// Checks `A x = b` by direct multiplication.
pub fn verify_solution(a: &SparseMatrix, b: &[Rational], x: &[Rational]) -> bool {
    a.rows.iter().zip(b).all(|(row, bi)| {
        let lhs: Rational = row.iter().map(|(c, v)| v * &x[*c]).sum();
        &lhs == bi
    })
}
