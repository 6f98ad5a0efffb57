//! Symmetric polynomial potentials `V(x) = Σ a_i x^i` (even exponents only)
//! and the large-|x| decay data used by the mesh error balance.

use std::fmt;
use std::str::FromStr;

use rug::{Float, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::precision::{parse_rational, BigReal, Precision};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub exponent: u32,
    pub coefficient: Rational,
}

/// A confining, parity-even polynomial potential.
///
/// Exponents are even, at least 2 and strictly increasing; the leading
/// coefficient is positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Potential {
    terms: Vec<Term>,
}

/// Decay data of the bound states, `ψ ~ exp(-a x^p)` for large x, for the
/// leading monomial with unit coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Asymptotics {
    pub p: Rational,
    pub a: Rational,
}

impl Potential {
    pub fn monomial(k: u32) -> Result<Self> {
        Self::polynomial(vec![(k, Rational::from(1))])
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs. Pairs may
    /// come in any order; zero coefficients are dropped.
    pub fn polynomial(terms: Vec<(u32, Rational)>) -> Result<Self> {
        let mut terms: Vec<Term> = terms
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(exponent, coefficient)| Term {
                exponent,
                coefficient,
            })
            .collect();
        if terms.is_empty() {
            return Err(Error::InvalidPotential("no nonzero terms".into()));
        }
        terms.sort_by_key(|t| t.exponent);
        for t in &terms {
            if t.exponent < 2 || t.exponent % 2 != 0 {
                return Err(Error::InvalidPotential(format!(
                    "exponent {} is not an even integer >= 2",
                    t.exponent
                )));
            }
        }
        if terms.windows(2).any(|w| w[0].exponent == w[1].exponent) {
            return Err(Error::InvalidPotential("duplicate exponent".into()));
        }
        let lead = terms.last().unwrap();
        if lead.coefficient <= 0 {
            return Err(Error::InvalidPotential(format!(
                "leading coefficient of x^{} must be positive (potential is not confining)",
                lead.exponent
            )));
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].coefficient == 1
    }

    /// Exponent of the monomial that dominates near the box edges.
    pub fn leading_exponent(&self) -> u32 {
        self.terms.last().unwrap().exponent
    }

    pub fn leading_coefficient(&self) -> &Rational {
        &self.terms.last().unwrap().coefficient
    }

    /// `V(x)` at the precision of `x`, Horner in x².
    pub fn evaluate(&self, x: &BigReal) -> BigReal {
        let prec = x.prec();
        let x2 = Float::with_val(prec, x.square_ref());
        let mut acc = Float::new(prec);
        let mut degree = self.leading_exponent();
        let mut idx = self.terms.len();
        // walk exponents from the top in steps of 2
        loop {
            if idx > 0 && self.terms[idx - 1].exponent == degree {
                acc += Float::with_val(prec, &self.terms[idx - 1].coefficient);
                idx -= 1;
            }
            if degree == 0 {
                break;
            }
            acc *= &x2;
            degree -= 2;
        }
        acc
    }

    pub fn asymptotics(&self) -> Asymptotics {
        let k = self.leading_exponent();
        Asymptotics {
            p: Rational::from((k + 2, 2)),
            a: Rational::from((2, k + 2)),
        }
    }

    /// Factor that converts a length rule for `x^k` into one for `β x^k`:
    /// `β^(-1/(k+2))`.
    pub fn length_scale(&self, prec: Precision) -> BigReal {
        let k = self.leading_exponent() as i64;
        let beta = prec.rational(self.leading_coefficient());
        crate::precision::pow_ratio(&beta, -1, k + 2)
    }

    /// The ground state of `-ψ'' + (a2 x² + a4 x⁴ + a6 x⁶) ψ = E ψ` when this
    /// potential is of that quasi-exactly-solvable form.
    pub fn qes_ground(&self, prec: Precision) -> Option<QesGround> {
        if self.leading_exponent() != 6 || self.terms.iter().any(|t| t.exponent > 6) {
            return None;
        }
        let coeff = |e: u32| {
            self.terms
                .iter()
                .find(|t| t.exponent == e)
                .map(|t| t.coefficient.clone())
                .unwrap_or_default()
        };
        sextic_qes_ground(&coeff(2), &coeff(4), &coeff(6), prec)
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(k) = s.strip_prefix("x^") {
            let k: u32 = k
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in `{s}`")))?;
            return Self::monomial(k);
        }
        let value: serde_json::Value = serde_json::from_str(s).map_err(|e| {
            Error::Parse(format!("`{s}` is neither `x^k` nor a JSON term list: {e}"))
        })?;
        Self::from_json(&value)
    }

    fn from_json(value: &serde_json::Value) -> Result<Self> {
        use serde_json::Value;
        if let Value::String(s) = value {
            return Self::parse(s);
        }
        let bad = || {
            Error::Parse(format!(
                "expected [[exponent, coefficient], ...], got {value}"
            ))
        };
        let list = value.as_array().ok_or_else(bad)?;
        let mut terms = Vec::with_capacity(list.len());
        for pair in list {
            let pair = pair.as_array().filter(|p| p.len() == 2).ok_or_else(bad)?;
            let exponent = pair[0]
                .as_u64()
                .and_then(|e| u32::try_from(e).ok())
                .ok_or_else(bad)?;
            let coefficient = match &pair[1] {
                Value::Number(n) => parse_rational(&n.to_string())?,
                Value::String(s) => parse_rational(s)?,
                _ => return Err(bad()),
            };
            terms.push((exponent, coefficient));
        }
        Self::polynomial(terms)
    }

    /// Stable identifier used as a key in reference tables.
    pub fn key(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Potential {
    /// `x^k` for unit monomials, otherwise the JSON term list with exact
    /// rational coefficients.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_monomial() {
            return write!(f, "x^{}", self.terms[0].exponent);
        }
        write!(f, "[")?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if t.coefficient.denom() == &1 {
                write!(f, "[{},{}]", t.exponent, t.coefficient.numer())?;
            } else {
                write!(f, "[{},\"{}\"]", t.exponent, t.coefficient)?;
            }
        }
        write!(f, "]")
    }
}

impl FromStr for Potential {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl Serialize for Potential {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_monomial() {
            return serializer.serialize_str(&self.to_string());
        }
        let value: serde_json::Value =
            serde_json::from_str(&self.to_string()).map_err(serde::ser::Error::custom)?;
        value.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Potential {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        Self::from_json(&value).map_err(serde::de::Error::custom)
    }
}

/// Closed-form ground state `exp(-b4 x⁴/4 + b2 x²/2)` with energy `-b2`.
#[derive(Clone, Debug)]
pub struct QesGround {
    pub energy: BigReal,
    pub b2: BigReal,
    pub b4: BigReal,
    /// Set when `E0 = -b2 <= 0`; the state is still node-free and
    /// normalizable, but callers comparing against positive references
    /// should know.
    pub nonpositive_energy: bool,
}

/// Solves for the node-free ground state of `a2 x² + a4 x⁴ + a6 x⁶`.
///
/// Returns `None` unless `a2 = b2² - 3 b4` with `b2 = -a4/(2√a6)`,
/// `b4 = √a6` (checked to a few ulps of the working precision).
pub fn sextic_qes_ground(
    a2: &Rational,
    a4: &Rational,
    a6: &Rational,
    prec: Precision,
) -> Option<QesGround> {
    if *a6 <= 0 {
        return None;
    }
    let wp = prec.guarded();
    let b4 = wp.rational(a6).sqrt();
    let b2 = -(wp.rational(a4) / (Float::with_val(wp.bits(), 2) * &b4));
    let predicted_a2 =
        Float::with_val(wp.bits(), b2.square_ref()) - Float::with_val(wp.bits(), 3) * &b4;
    let residual = (predicted_a2 - wp.rational(a2)).abs();
    let scale = wp.rational(a2).abs().max(&wp.one());
    let tol = prec.epsilon() * 256u32 * scale;
    if residual > tol {
        return None;
    }
    let energy = crate::precision::round_to(&(-b2.clone()), prec);
    Some(QesGround {
        nonpositive_energy: energy <= 0,
        energy,
        b2: crate::precision::round_to(&b2, prec),
        b4: crate::precision::round_to(&b4, prec),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from(n)
    }

    fn doubly_anharmonic() -> Potential {
        Potential::polynomial(vec![(2, r(-2)), (4, r(2)), (6, r(1))]).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let prec = Precision::new(128).unwrap();
        let quartic = Potential::monomial(4).unwrap();
        assert_eq!(quartic.evaluate(&prec.int(2)), 16);
        assert_eq!(Potential::monomial(2).unwrap().evaluate(&prec.zero()), 0);
        // -2 + 2 + 1
        assert_eq!(doubly_anharmonic().evaluate(&prec.one()), 1);
        // -2*4 + 2*16 + 64 = 88
        assert_eq!(doubly_anharmonic().evaluate(&prec.int(-2)), 88);
    }

    #[test]
    fn asymptotics_examples() {
        let a = Potential::monomial(2).unwrap().asymptotics();
        assert_eq!((a.p, a.a), (r(2), Rational::from((1, 2))));
        let a = Potential::monomial(4).unwrap().asymptotics();
        assert_eq!((a.p, a.a), (r(3), Rational::from((1, 3))));
        let a = doubly_anharmonic().asymptotics();
        assert_eq!((a.p, a.a), (r(4), Rational::from((1, 4))));
    }

    #[test]
    fn rejects_invalid_terms() {
        assert!(Potential::monomial(3).is_err());
        assert!(Potential::monomial(0).is_err());
        assert!(Potential::polynomial(vec![(2, r(1)), (4, r(-1))]).is_err());
        assert!(Potential::polynomial(vec![(4, r(1)), (4, r(2))]).is_err());
        assert!(Potential::polynomial(vec![(4, r(0))]).is_err());
    }

    #[test]
    fn parse_both_forms() {
        assert_eq!(
            Potential::parse("x^4").unwrap(),
            Potential::monomial(4).unwrap()
        );
        let p = Potential::parse("[[2,-2],[4,2],[6,1]]").unwrap();
        assert_eq!(p, doubly_anharmonic());
        let p = Potential::parse("[[6, 1], [2, \"0.5\"]]").unwrap();
        assert_eq!(p.terms()[0].coefficient, Rational::from((1, 2)));
        assert!(Potential::parse("x^").is_err());
        assert!(Potential::parse("[[2]]").is_err());
    }

    #[test]
    fn display_round_trips() {
        for p in [
            Potential::monomial(8).unwrap(),
            doubly_anharmonic(),
            Potential::polynomial(vec![(2, Rational::from((1, 3))), (4, r(5))]).unwrap(),
        ] {
            assert_eq!(Potential::parse(&p.to_string()).unwrap(), p);
            let json = serde_json::to_string(&p).unwrap();
            let back: Potential = serde_json::from_str(&json).unwrap();
            assert_eq!(back, p);
        }
    }

    #[test]
    fn qes_doubly_anharmonic() {
        let prec = Precision::new(128).unwrap();
        let g = doubly_anharmonic().qes_ground(prec).unwrap();
        assert_eq!(g.energy, 1);
        assert_eq!(g.b2, -1);
        assert_eq!(g.b4, 1);
        assert!(!g.nonpositive_energy);
    }

    #[test]
    fn qes_rejects_unconstrained() {
        let prec = Precision::new(128).unwrap();
        assert!(sextic_qes_ground(&r(0), &r(2), &r(1), prec).is_none());
        assert!(Potential::monomial(4).unwrap().qes_ground(prec).is_none());
    }

    #[test]
    fn qes_negative_energy_is_flagged() {
        // b2 = 1, b4 = 2  =>  a6 = 4, a4 = -4, a2 = 1 - 6 = -5, E0 = -1
        let prec = Precision::new(128).unwrap();
        let g = sextic_qes_ground(&r(-5), &r(-4), &r(4), prec).unwrap();
        assert_eq!(g.energy, -1);
        assert_eq!(g.b2, 1);
        assert_eq!(g.b4, 2);
        assert!(g.nonpositive_energy);
    }

    #[test]
    fn qes_residual_vanishes_symbolically() {
        // With ψ = exp(-b4 x⁴/4 + b2 x²/2):
        //   ψ''/ψ = b4² x⁶ - 2 b2 b4 x⁴ + (b2² - 3 b4) x² + b2
        // and (-ψ'' + Vψ - Eψ)/ψ = V - E - ψ''/ψ must be the zero polynomial.
        let prec = Precision::new(192).unwrap();
        for (a2, a4, a6) in [
            (r(-2), r(2), r(1)),
            (r(-5), r(-4), r(4)),
            (r(-5), r(-12), r(9)),
        ] {
            let g = sextic_qes_ground(&a2, &a4, &a6, prec).unwrap();
            let (b2, b4, e) = (&g.b2, &g.b4, &g.energy);
            let residual = [
                prec.rational(&a6) - Float::with_val(192, b4 * b4),
                prec.rational(&a4) + Float::with_val(192, b2 * b4) * 2u32,
                prec.rational(&a2)
                    - (Float::with_val(192, b2 * b2) - Float::with_val(192, b4 * 3u32)),
                -(e.clone()) - b2,
            ];
            for c in residual {
                assert!(
                    c.clone().abs() < prec.epsilon() * 64u32,
                    "nonzero coefficient {c}"
                );
            }
        }
    }
}
