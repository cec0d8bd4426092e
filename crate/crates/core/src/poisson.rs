//! Polynomial bivectors on `R^d`, the Jacobi check, and named presets.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::polyvector::Polyvector;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JacobiStatus {
    Unchecked,
    Poisson,
    NotPoisson,
}

/// An antisymmetric matrix of polynomials `p^{ij}`. Only `i < j` is stored.
#[derive(Clone, Debug)]
pub struct PoissonStructure {
    name: String,
    d: usize,
    upper: Vec<Poly>,
    jacobi: OnceLock<JacobiStatus>,
}

impl PartialEq for PoissonStructure {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.upper == other.upper
    }
}

fn upper_index(d: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < d);
    i * d - i * (i + 1) / 2 + (j - i - 1)
}

impl PoissonStructure {
    /// Builds a bivector from `(i, j, p^{ij})` entries, 0-based, any order.
    /// Entries with `i > j` are stored as `-p^{ij}` at `(j, i)`.
    pub fn from_entries(
        name: impl Into<String>,
        d: usize,
        entries: impl IntoIterator<Item = (usize, usize, Poly)>,
    ) -> Result<Self> {
        let mut upper = vec![Poly::zero(d); d * d.saturating_sub(1) / 2];
        for (i, j, p) in entries {
            if i >= d || j >= d {
                return Err(Error::IndexOutOfRange { index: i.max(j), bound: d });
            }
            if p.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: p.dim() });
            }
            if i == j {
                if p.is_zero() {
                    continue;
                }
                return Err(Error::InvalidParameter("diagonal entries must vanish".into()));
            }
            if i < j {
                upper[upper_index(d, i, j)] += &p;
            } else {
                upper[upper_index(d, j, i)] -= &p;
            }
        }
        Ok(PoissonStructure { name: name.into(), d, upper, jacobi: OnceLock::new() })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// `p^{ij}` with antisymmetric extension.
    pub fn entry(&self, i: usize, j: usize) -> Poly {
        match self.signed_entry(i, j) {
            None => Poly::zero(self.d),
            Some((1, p)) => p.clone(),
            Some((_, p)) => -p,
        }
    }

    /// `p^{ij}` as a sign and a stored upper-triangular entry; `None` when zero.
    pub fn signed_entry(&self, i: usize, j: usize) -> Option<(i8, &Poly)> {
        if i == j {
            return None;
        }
        let (a, b, s) = if i < j { (i, j, 1) } else { (j, i, -1) };
        let p = &self.upper[upper_index(self.d, a, b)];
        if p.is_zero() {
            None
        } else {
            Some((s, p))
        }
    }

    /// The bivector `Σ_{i<j} p^{ij} ∂_i ∧ ∂_j`.
    pub fn to_polyvector(&self) -> Polyvector {
        let mut v = Polyvector::zero(self.d, 2);
        for i in 0..self.d {
            for j in (i + 1)..self.d {
                v.add_component(&[i, j], &self.entry(i, j));
            }
        }
        v
    }

    /// Cached Jacobi status; `Unchecked` until [`Self::verify_jacobi`] runs.
    pub fn jacobi_status(&self) -> JacobiStatus {
        self.jacobi.get().copied().unwrap_or(JacobiStatus::Unchecked)
    }

    /// Computes the Jacobiator once and records whether it vanishes.
    pub fn verify_jacobi(&self) -> JacobiStatus {
        *self.jacobi.get_or_init(|| {
            if jacobiator_components(self).is_zero() {
                JacobiStatus::Poisson
            } else {
                JacobiStatus::NotPoisson
            }
        })
    }

    pub fn is_poisson(&self) -> bool {
        self.verify_jacobi() == JacobiStatus::Poisson
    }

    /// Multiplies every entry by a rational constant.
    pub fn scaled(&self, c: &crate::rational::Rational) -> PoissonStructure {
        PoissonStructure {
            name: format!("{}*{}", crate::rational::format_compact(c), self.name),
            d: self.d,
            upper: self.upper.iter().map(|p| p.scale(c)).collect(),
            jacobi: OnceLock::new(),
        }
    }
}

impl fmt::Display for PoissonStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (d = {})", self.name, self.d)?;
        for i in 0..self.d {
            for j in (i + 1)..self.d {
                let p = self.entry(i, j);
                if !p.is_zero() {
                    write!(f, "; p{}{} = {}", i + 1, j + 1, p)?;
                }
            }
        }
        Ok(())
    }
}

/// The trivector with components
/// `J^{ijk} = Σ_l (p^{il} ∂_l p^{jk} + p^{jl} ∂_l p^{ki} + p^{kl} ∂_l p^{ij})`.
///
/// Normalization: `[p, p]_SN = 2 J` with the bracket of [`crate::polyvector`].
pub fn jacobiator(p: &PoissonStructure) -> Polyvector {
    let out = jacobiator_components(p);
    let status = if out.is_zero() { JacobiStatus::Poisson } else { JacobiStatus::NotPoisson };
    let _ = p.jacobi.set(status);
    out
}

fn jacobiator_components(p: &PoissonStructure) -> Polyvector {
    let d = p.dim();
    let mut out = Polyvector::zero(d, 3);
    let term = |a: usize, b: usize, c: usize| -> Poly {
        let mut acc = Poly::zero(d);
        for l in 0..d {
            let pal = p.entry(a, l);
            if pal.is_zero() {
                continue;
            }
            let dbc = p.entry(b, c).derive(l).expect("index in range");
            acc += &(&pal * &dbc);
        }
        acc
    };
    for i in 0..d {
        for j in (i + 1)..d {
            for k in (j + 1)..d {
                let mut c = term(i, j, k);
                c += &term(j, k, i);
                c += &term(k, i, j);
                out.add_component(&[i, j, k], &c);
            }
        }
    }
    out
}

/// A bivector in `d = 3` violating the Jacobi identity: `p^{12} = x1`,
/// `p^{23} = x2`, with Jacobiator component `J^{123} = x1`.
pub fn non_poisson_example() -> PoissonStructure {
    PoissonStructure::from_entries(
        "nonpoisson",
        3,
        [(0, 1, Poly::var(3, 0)), (1, 2, Poly::var(3, 1))],
    )
    .expect("valid entries")
}

/// Named Poisson structures: `symplectic2`, `so3`, `sl2`, `jacobian` (with a
/// `d = 3` potential `φ`, `p^{ij} = ε^{ijk} ∂_k φ`) and `free2` (with `q` as
/// `p^{12}` in `d = 2`). The Jacobi identity is verified at construction.
pub fn preset_poisson(name: &str, param: Option<&Poly>) -> Result<PoissonStructure> {
    let need = |d: usize| -> Result<&Poly> {
        let q = param.ok_or_else(|| Error::InvalidParameter(format!("preset `{name}` needs a polynomial parameter")))?;
        if q.dim() != d {
            return Err(Error::InvalidParameter(format!(
                "preset `{name}` needs a parameter in d = {d}, got d = {}",
                q.dim()
            )));
        }
        Ok(q)
    };
    let no_param = || -> Result<()> {
        if param.is_some() {
            Err(Error::InvalidParameter(format!("preset `{name}` takes no parameter")))
        } else {
            Ok(())
        }
    };
    let x = |d: usize, i: usize| Poly::var(d, i);
    let structure = match name {
        "symplectic2" => {
            no_param()?;
            PoissonStructure::from_entries(name, 2, [(0, 1, Poly::one(2))])?
        }
        "so3" => {
            no_param()?;
            PoissonStructure::from_entries(
                name,
                3,
                [(0, 1, x(3, 2)), (0, 2, -&x(3, 1)), (1, 2, x(3, 0))],
            )?
        }
        "sl2" => {
            // x1 = e, x2 = f, x3 = h with [h, e] = 2e, [h, f] = -2f, [e, f] = h
            no_param()?;
            let two = crate::rational::int(2);
            PoissonStructure::from_entries(
                name,
                3,
                [(0, 1, x(3, 2)), (0, 2, x(3, 0).scale(&-two.clone())), (1, 2, x(3, 1).scale(&two))],
            )?
        }
        "jacobian" => jacobian_entries(format!("jacobian({})", need(3)?), None, need(3)?)?,
        "free2" => {
            let q = need(2)?;
            PoissonStructure::from_entries(format!("free2({q})"), 2, [(0, 1, q.clone())])?
        }
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    if !structure.is_poisson() {
        return Err(Error::NotPoisson(structure.name().to_string()));
    }
    Ok(structure)
}

fn jacobian_entries(name: String, factor: Option<&Poly>, phi: &Poly) -> Result<PoissonStructure> {
    let grad: Vec<Poly> = (0..3)
        .map(|k| {
            let g = phi.derive(k).expect("d = 3");
            match factor {
                Some(f) => f * &g,
                None => g,
            }
        })
        .collect();
    PoissonStructure::from_entries(name, 3, [(0, 1, grad[2].clone()), (1, 2, grad[0].clone()), (2, 0, grad[1].clone())])
}

/// `p^{ij} = f ε^{ijk} ∂_k φ` in `d = 3`: a Jacobian structure rescaled by a
/// function. Bivectors of rank ≤ 2 stay Poisson under rescaling, so this is
/// Poisson for every `f` and `φ`; unlike the plain Jacobian family it is not
/// divergence-free.
pub fn conformal_jacobian(f: &Poly, phi: &Poly) -> Result<PoissonStructure> {
    for q in [f, phi] {
        if q.dim() != 3 {
            return Err(Error::InvalidParameter(format!("conformal needs parameters in d = 3, got d = {}", q.dim())));
        }
    }
    let structure = jacobian_entries(format!("conformal({f}, {phi})"), Some(f), phi)?;
    if !structure.is_poisson() {
        return Err(Error::NotPoisson(structure.name().to_string()));
    }
    Ok(structure)
}

/// Parses `name`, `name(φ)` or `conformal(f, φ)`, e.g. `jacobian(x1*x2*x3)`,
/// `free2(x1^3)` or `conformal(1 + x1, x1*x2*x3)`.
pub fn parse_preset(spec: &str) -> Result<PoissonStructure> {
    let spec = spec.trim();
    match spec.split_once('(') {
        None => preset_poisson(spec, None),
        Some((name, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::parse(spec.len(), "missing `)` in preset parameter"))?;
            if name.trim() == "conformal" {
                let (f, phi) = inner
                    .split_once(',')
                    .ok_or_else(|| Error::parse(spec.len(), "conformal needs `f, φ`"))?;
                return conformal_jacobian(&Poly::parse(f.trim(), 3)?, &Poly::parse(phi.trim(), 3)?);
            }
            let d = match name.trim() {
                "jacobian" => 3,
                "free2" => 2,
                other => return Err(Error::UnknownPreset(other.to_string())),
            };
            let q = Poly::parse(inner, d)?;
            preset_poisson(name.trim(), Some(&q))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyvector::schouten_bracket;
    use crate::rational::int;

    fn p(s: &str, d: usize) -> Poly {
        Poly::parse(s, d).unwrap()
    }

    #[test]
    fn symplectic_is_constant() {
        let s = preset_poisson("symplectic2", None).unwrap();
        assert_eq!(s.entry(0, 1), Poly::one(2));
        assert_eq!(s.entry(1, 0), p("-1", 2));
        assert_eq!(s.jacobi_status(), JacobiStatus::Poisson);
    }

    #[test]
    fn jacobian_of_quadric() {
        let s = parse_preset("jacobian(x1^2 + x2^2 + x3^2)").unwrap();
        assert_eq!(s.entry(0, 1), p("2*x3", 3));
        assert_eq!(s.entry(1, 2), p("2*x1", 3));
        assert_eq!(s.entry(2, 0), p("2*x2", 3));
        assert!(jacobiator(&s).is_zero());
    }

    #[test]
    fn hand_expanded_lie_poisson_jacobiator() {
        // J^{123} = Σ_l p^{1l}∂_l p^{23} + p^{2l}∂_l p^{31} + p^{3l}∂_l p^{12}
        //         = p^{11}·1 + p^{22}·1 + p^{33}·1 = 0 for so(3)
        let s = preset_poisson("so3", None).unwrap();
        assert!(jacobiator(&s).is_zero());
        assert!(preset_poisson("sl2", None).unwrap().is_poisson());
        assert!(parse_preset("jacobian(x1*x2*x3)").unwrap().is_poisson());
    }

    #[test]
    fn non_poisson_fixture() {
        // p12 = x1, p23 = x2: J^{123} = p^{12} ∂_2 p^{23} = x1
        let s = non_poisson_example();
        assert_eq!(s.jacobi_status(), JacobiStatus::Unchecked);
        let j = jacobiator(&s);
        assert_eq!(j.component(&[0, 1, 2]), p("x1", 3));
        assert_eq!(s.jacobi_status(), JacobiStatus::NotPoisson);
    }

    #[test]
    fn p12_p23_equal_is_poisson() {
        // {x1,{x2,x3}} + {x2,{x3,x1}} + {x3,{x1,x2}} = {x1,x1} + 0 + {x3,x1} = 0
        let s = PoissonStructure::from_entries("p12=p23=x1", 3, [(0, 1, p("x1", 3)), (1, 2, p("x1", 3))])
            .unwrap();
        assert!(jacobiator(&s).is_zero());
    }

    #[test]
    fn free2_is_poisson_for_any_parameter() {
        let s = parse_preset("free2(x1^3)").unwrap();
        assert_eq!(s.entry(0, 1), p("x1^3", 2));
        assert!(jacobiator(&s).is_zero());
    }

    #[test]
    fn schouten_square_is_twice_jacobiator() {
        let nonpoisson = non_poisson_example();
        let wild = PoissonStructure::from_entries(
            "wild",
            3,
            [(0, 1, p("x2*x3 + x1^2", 3)), (0, 2, p("x3^2 - x2", 3)), (1, 2, p("3*x1*x2", 3))],
        )
        .unwrap();
        for s in [
            preset_poisson("so3", None).unwrap(),
            preset_poisson("sl2", None).unwrap(),
            parse_preset("jacobian(x1*x2*x3)").unwrap(),
            nonpoisson,
            wild,
        ] {
            let pv = s.to_polyvector();
            let sq = schouten_bracket(&pv, &pv).unwrap();
            assert_eq!(sq, jacobiator(&s).scale(&int(2)), "{s}");
        }
    }

    #[test]
    fn preset_errors() {
        assert!(matches!(preset_poisson("torus", None), Err(Error::UnknownPreset(_))));
        assert!(matches!(
            preset_poisson("jacobian", Some(&p("x1", 2))),
            Err(Error::InvalidParameter(_))
        ));
        assert!(preset_poisson("jacobian", None).is_err());
        assert!(parse_preset("jacobian(x1*x4)").is_err());
    }
}
