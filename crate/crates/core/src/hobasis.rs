//! Harmonic-oscillator basis for `H = ½(-d²/dx² + ω²x²) + λx⁴`.
//!
//! The basis is the eigenbasis of an oscillator with frequency Ω, the
//! nonlinear variational parameter. With `x = (a + a†)/√(2Ω)` every matrix
//! element is a closed-form ladder-operator expression; the Hamiltonian
//! couples `n` to `n±2` and `n±4` only, so even and odd states decouple.
//!
//! Note the factor ½ in front of the kinetic term. [`to_unit_convention`]
//! converts energies to the `-d² + x⁴` normalization used elsewhere.

use std::fmt;
use std::str::FromStr;

use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::eigen::SymMatrix;
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::potentials::Potential;
use crate::precision::{pow_ratio, round_to, BigReal, Precision};
use crate::trigbasis::Parity;

#[derive(Clone, Debug)]
pub struct HoBasisSpec {
    /// Basis frequency Ω.
    pub omega: BigReal,
    /// Functions per parity sector.
    pub n: usize,
    pub omega2: Rational,
    pub lambda: Rational,
}

impl HoBasisSpec {
    pub fn new(omega: BigReal, n: usize, omega2: Rational, lambda: Rational) -> Result<Self> {
        if omega <= 0 {
            return Err(Error::InvalidArgument(format!(
                "Ω must be positive, got {omega}"
            )));
        }
        check_args(&lambda, n)?;
        Ok(HoBasisSpec {
            omega,
            n,
            omega2,
            lambda,
        })
    }

    pub fn precision(&self) -> Precision {
        crate::precision::precision_of(&self.omega)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyRule {
    Pms,
    Op,
    Value,
}

impl fmt::Display for FrequencyRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrequencyRule::Pms => "pms",
            FrequencyRule::Op => "op",
            FrequencyRule::Value => "value",
        })
    }
}

impl FromStr for FrequencyRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pms" => Ok(FrequencyRule::Pms),
            "op" => Ok(FrequencyRule::Op),
            "value" => Ok(FrequencyRule::Value),
            other => Err(Error::Parse(format!(
                "unknown frequency rule `{other}` (expected pms|op|value)"
            ))),
        }
    }
}

fn check_args(lambda: &Rational, n: usize) -> Result<()> {
    if *lambda <= 0 {
        return Err(Error::InvalidArgument(format!(
            "λ must be positive, got {lambda}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be >= 1".into()));
    }
    Ok(())
}

/// Positive root of `Ω³ - ω²Ω = rhs` with `rhs > 0`.
///
/// `f(Ω) = Ω³ - ω²Ω - rhs` is convex for Ω > 0 and has exactly one positive
/// zero. Newton starts at `max(ω, (8λ(N+1))^{1/3})`, where `f' > 0`; if an
/// iterate leaves the bracket `[0, ω + (8λ(N+1))^{1/3} + 1]` the solver falls
/// back to bisection.
pub fn solve_frequency_cubic(omega2: &Rational, rhs: &BigReal, seed_scale: &BigReal) -> BigReal {
    let bits = rhs.prec();
    let w2 = Float::with_val(bits, omega2);
    let w = if w2 > 0 {
        Float::with_val(bits, w2.sqrt_ref())
    } else {
        Float::new(bits)
    };
    let scale = pow_ratio(seed_scale, 1, 3);
    let f = |x: &Float| -> Float {
        let x2 = Float::with_val(bits, x.square_ref());
        Float::with_val(bits, &x2 - &w2) * x - rhs
    };
    let df = |x: &Float| -> Float { Float::with_val(bits, x.square_ref()) * 3u32 - &w2 };

    let (lo, hi) = (Float::new(bits), Float::with_val(bits, &w + &scale) + 1u32);
    let mut x = if w > scale { w.clone() } else { scale.clone() };
    let tol = Float::with_val(bits, Float::i_exp(1, 4 - bits as i32));
    for _ in 0..4 * bits {
        let step = f(&x) / df(&x);
        let next = Float::with_val(bits, &x - &step);
        if !(next > lo && next < hi) || !step.is_finite() {
            return bisect(&f, lo, hi, bits);
        }
        let small = Float::with_val(bits, step.abs_ref()) <= Float::with_val(bits, &tol * &next);
        x = next;
        if small {
            // One more step clears the last few bits.
            let step = f(&x) / df(&x);
            x -= step;
            return x;
        }
    }
    bisect(&f, lo, hi, bits)
}

fn bisect(f: &impl Fn(&Float) -> Float, mut lo: Float, mut hi: Float, bits: u32) -> Float {
    for _ in 0..bits + 64 {
        let mid = Float::with_val(bits, &lo + &hi) / 2u32;
        if f(&mid) > 0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Float::with_val(bits, &lo + &hi) / 2u32
}

fn frequency(
    omega2: &Rational,
    lambda: &Rational,
    n: usize,
    rhs_shift: Rational,
    prec: Precision,
) -> Result<BigReal> {
    check_args(lambda, n)?;
    let wp = prec.guarded();
    let eight_lambda = Rational::from(lambda * 8u32);
    let rhs = Rational::from(&eight_lambda * (Rational::from(n as u64) + rhs_shift));
    let seed = Rational::from(&eight_lambda * (n as u64 + 1));
    let root = solve_frequency_cubic(omega2, &wp.rational(&rhs), &wp.rational(&seed));
    Ok(round_to(&root, prec))
}

/// PMS frequency: root of `Ω³ - ω²Ω = 8λ(N + 1/(8N))`.
pub fn pms_frequency(
    omega2: &Rational,
    lambda: &Rational,
    n: usize,
    prec: Precision,
) -> Result<BigReal> {
    let shift = Rational::from((1, 8 * n.max(1) as u64));
    frequency(omega2, lambda, n, shift, prec)
}

/// Frequency at which the physical potential meets the top basis energy:
/// root of `Ω³ - ω²Ω = 8λ(N - 1/4)`.
pub fn op_frequency(
    omega2: &Rational,
    lambda: &Rational,
    n: usize,
    prec: Precision,
) -> Result<BigReal> {
    frequency(omega2, lambda, n, Rational::from((-1, 4)), prec)
}

/// Turning point `x = √((Ω² - ω²)/(2λ))` used by the intersection rule.
pub fn intersection_point(omega: &BigReal, omega2: &Rational, lambda: &Rational) -> BigReal {
    let bits = omega.prec();
    let num = Float::with_val(bits, omega.square_ref()) - omega2;
    (num / (Float::with_val(bits, lambda) * 2u32)).sqrt()
}

/// `½ω²x² + λx⁴`
pub fn physical_potential(x: &BigReal, omega2: &Rational, lambda: &Rational) -> BigReal {
    let bits = x.prec();
    let x2 = Float::with_val(bits, x.square_ref());
    let quartic = Float::with_val(bits, x2.square_ref()) * lambda;
    Float::with_val(bits, &x2 * omega2) / 2u32 + quartic
}

/// ⟨n|H|n+d⟩ for `d ∈ {0, 2, 4}`.
fn element(n: u64, d: u64, omega: &Float, omega2: &Rational, lambda: &Rational) -> Float {
    let bits = omega.prec();
    let omega_sq = Float::with_val(bits, omega.square_ref());
    let quartic_scale = Float::with_val(bits, lambda) / (omega_sq * 4u32);
    match d {
        0 => {
            let two_n1 = 2 * n + 1;
            let kinetic = Float::with_val(bits, omega * two_n1) / 4u32;
            let harmonic =
                Float::with_val(bits, omega2) * two_n1 / (Float::with_val(bits, omega * 4u32));
            kinetic + harmonic + quartic_scale * (6 * n * n + 6 * n + 3)
        }
        2 => {
            let root = Float::with_val(bits, (n + 1) * (n + 2)).sqrt();
            let kinetic = -Float::with_val(bits, omega / 4u32);
            let harmonic = Float::with_val(bits, omega2) / (Float::with_val(bits, omega * 4u32));
            (kinetic + harmonic + quartic_scale * (4 * n + 6)) * root
        }
        4 => {
            let root = Float::with_val(bits, (n + 1) * (n + 2) * (n + 3) * (n + 4)).sqrt();
            quartic_scale * root
        }
        _ => Float::new(bits),
    }
}

/// Hamiltonian block of one parity: oscillator states `2i` (even) or
/// `2i+1` (odd) for `i < N`.
pub fn assemble_ho(spec: &HoBasisSpec, parity: Parity, exec: Exec) -> SymMatrix {
    let prec = spec.precision();
    let wp = prec.guarded();
    let omega = round_to(&spec.omega, wp);
    let offset = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    SymMatrix::from_upper_fn(spec.n, prec, exec, |i, j| {
        let n = (2 * i + offset) as u64;
        let d = 2 * (j - i) as u64;
        element(n, d, &omega, &spec.omega2, &spec.lambda)
    })
}

/// Converts an energy of `½(-d² + ω²x²) + λx⁴` to the eigenvalue of
/// `-d² + x⁴`.
///
/// Doubling gives `-d² + ω²x² + 2λx⁴`; for ω = 0 the substitution
/// `x → (2λ)^{-1/6} x` then maps it onto the unit quartic, so
/// `E_unit = 2E / (2λ)^{1/3}`. For ω ≠ 0 only the doubling applies and the
/// result belongs to [`equivalent_potential`].
pub fn to_unit_convention(energy: &BigReal, omega2: &Rational, lambda: &Rational) -> BigReal {
    let bits = energy.prec();
    let doubled = Float::with_val(bits, energy * 2u32);
    if *omega2 != 0 {
        return doubled;
    }
    let two_lambda = Float::with_val(bits, lambda) * 2u32;
    doubled / pow_ratio(&two_lambda, 1, 3)
}

/// Inverse of [`to_unit_convention`].
pub fn from_unit_convention(energy: &BigReal, omega2: &Rational, lambda: &Rational) -> BigReal {
    let bits = energy.prec();
    let halved = Float::with_val(bits, energy / 2u32);
    if *omega2 != 0 {
        return halved;
    }
    let two_lambda = Float::with_val(bits, lambda) * 2u32;
    halved * pow_ratio(&two_lambda, 1, 3)
}

/// `-d² + V` potential whose spectrum is twice that of the oscillator-basis
/// Hamiltonian: `V = ω²x² + 2λx⁴`.
pub fn equivalent_potential(omega2: &Rational, lambda: &Rational) -> Result<Potential> {
    Potential::polynomial(vec![
        (2, omega2.clone()),
        (4, Rational::from(lambda * 2u32)),
    ])
}
