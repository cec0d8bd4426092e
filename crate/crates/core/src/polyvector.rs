//! Polyvector fields with polynomial coefficients and the Schouten bracket.
//!
//! A degree-`k` polyvector is stored as its components on strictly increasing
//! index tuples `i_1 < ... < i_k`, i.e. as `Σ P^{I} ξ_{i_1} ... ξ_{i_k}` in
//! odd coordinates `ξ_i = ∂_i`. The bracket is computed in these coordinates:
//!
//! `[P, Q] = Σ_i (P ∂⃖/∂ξ_i) (∂_i Q) - (-1)^{(p-1)(q-1)} (Q ∂⃖/∂ξ_i) (∂_i P)`
//!
//! with right derivatives in `ξ`. With this convention `[X, Y]` is the Lie
//! bracket of vector fields and `[π, π]` of a bivector equals twice the
//! cyclic Jacobiator (see [`crate::poisson::jacobiator`]).

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polyvector {
    d: usize,
    degree: usize,
    components: BTreeMap<Vec<usize>, Poly>,
}

/// Sorts `indices` in place and returns the permutation sign, or `0` when an
/// index repeats.
fn sort_with_sign(indices: &mut [usize]) -> i32 {
    let mut sign = 1;
    for i in 1..indices.len() {
        let mut j = i;
        while j > 0 && indices[j - 1] > indices[j] {
            indices.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if indices.windows(2).any(|w| w[0] == w[1]) {
        0
    } else {
        sign
    }
}

impl Polyvector {
    pub fn zero(d: usize, degree: usize) -> Self {
        Polyvector { d, degree, components: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// Components on increasing index tuples (0-based).
    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly)> {
        self.components.iter()
    }

    /// Component on an arbitrary index tuple, antisymmetrically extended.
    pub fn component(&self, indices: &[usize]) -> Poly {
        let mut idx = indices.to_vec();
        match sort_with_sign(&mut idx) {
            0 => Poly::zero(self.d),
            s => {
                let c = self.components.get(&idx).cloned().unwrap_or_else(|| Poly::zero(self.d));
                if s < 0 {
                    -&c
                } else {
                    c
                }
            }
        }
    }

    /// Adds `value` to the coefficient of `ξ_{indices[0]} ... ξ_{indices[k-1]}`.
    pub fn add_component(&mut self, indices: &[usize], value: &Poly) {
        assert_eq!(indices.len(), self.degree);
        assert!(indices.iter().all(|&i| i < self.d), "index out of range");
        let mut idx = indices.to_vec();
        let s = sort_with_sign(&mut idx);
        if s == 0 || value.is_zero() {
            return;
        }
        let entry = self.components.entry(idx.clone()).or_insert_with(|| Poly::zero(self.d));
        if s > 0 {
            *entry += value;
        } else {
            *entry -= value;
        }
        if entry.is_zero() {
            self.components.remove(&idx);
        }
    }

    /// The vector field `Σ v_i ∂_i`.
    pub fn vector_field(coeffs: &[Poly]) -> Self {
        let d = coeffs.len();
        let mut v = Polyvector::zero(d, 1);
        for (i, c) in coeffs.iter().enumerate() {
            v.add_component(&[i], c);
        }
        v
    }

    pub fn add(&self, other: &Polyvector) -> Polyvector {
        assert_eq!((self.d, self.degree), (other.d, other.degree));
        let mut out = self.clone();
        for (idx, c) in &other.components {
            out.add_component(idx, c);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Polyvector {
        let mut out = Polyvector::zero(self.d, self.degree);
        if c.is_zero() {
            return out;
        }
        for (idx, v) in &self.components {
            out.add_component(idx, &v.scale(c));
        }
        out
    }

    /// Exterior product.
    pub fn wedge(&self, other: &Polyvector) -> Polyvector {
        assert_eq!(self.d, other.d);
        let mut out = Polyvector::zero(self.d, self.degree + other.degree);
        for (a, ca) in &self.components {
            for (b, cb) in &other.components {
                let idx: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
                out.add_component(&idx, &(ca * cb));
            }
        }
        out
    }

    /// Right derivative with respect to the odd coordinate `ξ_var`.
    fn right_derivative(&self, var: usize) -> Polyvector {
        let mut out = Polyvector::zero(self.d, self.degree - 1);
        for (idx, c) in &self.components {
            if let Some(pos) = idx.iter().position(|&i| i == var) {
                let rest: Vec<usize> = idx.iter().copied().filter(|&i| i != var).collect();
                let moves = idx.len() - 1 - pos;
                if moves % 2 == 0 {
                    out.add_component(&rest, c);
                } else {
                    out.add_component(&rest, &-c);
                }
            }
        }
        out
    }

    /// Coefficientwise partial derivative `∂_var`.
    fn coordinate_derivative(&self, var: usize) -> Polyvector {
        let mut out = Polyvector::zero(self.d, self.degree);
        for (idx, c) in &self.components {
            out.add_component(idx, &c.derive(var).expect("index in range"));
        }
        out
    }
}

/// Schouten bracket for vector fields through trivectors, total degree ≤ 4.
pub fn schouten_bracket(a: &Polyvector, b: &Polyvector) -> Result<Polyvector> {
    if a.d != b.d {
        return Err(Error::DimensionMismatch { expected: a.d, found: b.d });
    }
    let (p, q) = (a.degree, b.degree);
    if p == 0 || q == 0 || p > 3 || q > 3 || p + q > 4 {
        return Err(Error::UnsupportedDegree(p, q));
    }
    let twist = if ((p - 1) * (q - 1)) % 2 == 0 { Rational::one() } else { -Rational::one() };
    let mut out = Polyvector::zero(a.d, p + q - 1);
    for i in 0..a.d {
        let first = a.right_derivative(i).wedge(&b.coordinate_derivative(i));
        let second = b.right_derivative(i).wedge(&a.coordinate_derivative(i));
        out = out.add(&first).add(&second.scale(&-twist.clone()));
    }
    Ok(out)
}

impl fmt::Display for Polyvector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "0");
        }
        for (k, (idx, c)) in self.components.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let names: Vec<String> = idx.iter().map(|i| format!("d{}", i + 1)).collect();
            write!(f, "({})*{}", c, names.join("^"))?;
        }
        Ok(())
    }
}
