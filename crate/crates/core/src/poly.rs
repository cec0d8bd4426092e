//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Exponent vectors are dense (one entry per variable) and terms are kept in a
//! sorted map, so equal polynomials have identical representations and print
//! identically. Variables are numbered from 0 internally and printed as
//! `x1 .. xd`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_compact, int, parse_rational, Rational};

/// Exponent vector of a monomial, ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(d: usize) -> Self {
        Monomial(vec![0; d])
    }

    pub fn var(d: usize, var: usize) -> Self {
        let mut e = vec![0; d];
        e[var] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in `d` variables over the rationals.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    d: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(d: usize) -> Self {
        Poly { d, terms: BTreeMap::new() }
    }

    pub fn one(d: usize) -> Self {
        Self::constant(d, Rational::one())
    }

    pub fn constant(d: usize, c: Rational) -> Self {
        let mut p = Self::zero(d);
        p.add_term(Monomial::one(d), c);
        p
    }

    /// The coordinate function `x_{var+1}`.
    pub fn var(d: usize, var: usize) -> Self {
        assert!(var < d, "variable index {var} out of range for d = {d}");
        let mut p = Self::zero(d);
        p.add_term(Monomial::var(d, var), Rational::one());
        p
    }

    pub fn monomial(exponents: Vec<u32>, c: Rational) -> Self {
        let d = exponents.len();
        let mut p = Self::zero(d);
        p.add_term(Monomial(exponents), c);
        p
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

    /// Terms in ascending graded-lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// Value of the constant term.
    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one(self.d))
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        debug_assert_eq!(m.0.len(), self.d);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
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

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.d);
        }
        Poly {
            d: self.d,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Adds `c * other` in place.
    pub fn add_scaled(&mut self, other: &Poly, c: &Rational) {
        assert_eq!(self.d, other.d, "polynomial dimension mismatch");
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    /// Product, reporting a dimension mismatch instead of panicking.
    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: other.d });
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.d);
        if self.is_zero() || other.is_zero() {
            return out;
        }
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// Partial derivative with respect to `x_{var+1}`.
    pub fn derive(&self, var: usize) -> Result<Poly> {
        if var >= self.d {
            return Err(Error::IndexOutOfRange { index: var, bound: self.d });
        }
        let mut out = Poly::zero(self.d);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[var] -= 1;
            out.add_term(dm, c * int(e as i64));
        }
        Ok(out)
    }

    /// Mixed partial derivative `∂^α` for an exponent vector `α` of length `d`.
    pub fn derive_multi(&self, alpha: &[u32]) -> Poly {
        assert_eq!(alpha.len(), self.d, "derivative multi-index has wrong length");
        let mut out = Poly::zero(self.d);
        'terms: for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut exps = m.0.clone();
            for (k, &a) in alpha.iter().enumerate() {
                if exps[k] < a {
                    continue 'terms;
                }
                for step in 0..a {
                    coeff *= int((exps[k] - step) as i64);
                }
                exps[k] -= a;
            }
            out.add_term(Monomial(exps), coeff);
        }
        out
    }

    /// Parses the `c*x1^a1*...*xd^ad` grammar in dimension `d`.
    pub fn parse(text: &str, d: usize) -> Result<Poly> {
        let compact: Vec<(usize, char)> =
            text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::parse(0, "empty polynomial"));
        }
        let mut out = Poly::zero(d);
        let mut start = 0;
        let mut pieces = Vec::new();
        for k in 1..=compact.len() {
            let boundary = k == compact.len()
                || (matches!(compact[k].1, '+' | '-') && !matches!(compact[k - 1].1, '*' | '^'));
            if boundary {
                pieces.push(&compact[start..k]);
                start = k;
            }
        }
        for piece in pieces {
            let pos = piece[0].0;
            let mut body: String = piece.iter().map(|(_, c)| c).collect();
            let mut coeff = Rational::one();
            if let Some(rest) = body.strip_prefix('+') {
                body = rest.to_string();
            } else if let Some(rest) = body.strip_prefix('-') {
                coeff = -coeff;
                body = rest.to_string();
            }
            if body.is_empty() {
                return Err(Error::parse(pos, "dangling sign"));
            }
            let mut exps = vec![0u32; d];
            for factor in body.split('*') {
                if factor.is_empty() {
                    return Err(Error::parse(pos, "empty factor"));
                }
                if let Some(var) = factor.strip_prefix('x') {
                    let (idx, exp) = match var.split_once('^') {
                        Some((i, e)) => (i, e),
                        None => (var, "1"),
                    };
                    let idx: usize = idx
                        .parse()
                        .map_err(|_| Error::parse(pos, format!("invalid variable `{factor}`")))?;
                    let exp: u32 = exp
                        .parse()
                        .map_err(|_| Error::parse(pos, format!("invalid exponent in `{factor}`")))?;
                    if idx == 0 || idx > d {
                        return Err(Error::parse(
                            pos,
                            format!("variable x{idx} outside dimension {d}"),
                        ));
                    }
                    exps[idx - 1] += exp;
                } else {
                    coeff *= parse_rational(factor)
                        .map_err(|_| Error::parse(pos, format!("invalid coefficient `{factor}`")))?;
                }
            }
            out.add_term(Monomial(exps), coeff);
        }
        Ok(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, e) })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", format_compact(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", format_compact(&abs), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    /// Panics on a dimension mismatch; use [`Poly::try_mul`] for a checked product.
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.d, rhs.d, "polynomial dimension mismatch");
        self.mul_unchecked(rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { d: self.d, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        assert_eq!(self.d, rhs.d, "polynomial dimension mismatch");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        assert_eq!(self.d, rhs.d, "polynomial dimension mismatch");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

/// Checked product of two polynomials.
pub fn poly_mul(a: &Poly, b: &Poly) -> Result<Poly> {
    a.try_mul(b)
}

/// Checked partial derivative with respect to `x_{var+1}`.
pub fn poly_derive(a: &Poly, var: usize) -> Result<Poly> {
    a.derive(var)
}
