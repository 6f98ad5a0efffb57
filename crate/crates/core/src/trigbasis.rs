//! Particle-in-a-box basis on (-L, L), split by parity.
//!
//! Even states use `cos((m - 1/2) π x / L)/√L`, odd states `sin(m π x / L)/√L`,
//! `m = 1..N`. The potential matrix elements reduce to the cosine moments
//!
//! ```text
//! D_s = (1/π) ∫_0^π x^k cos(s x) dx
//! ```
//!
//! so that for `V = x^k`
//!
//! ```text
//! even: H_mn = (m - 1/2)² π²/L² δ_mn + (L/π)^k (D_{m+n-1} + D_{|m-n|})
//! odd:  H_mn =        m² π²/L² δ_mn + (L/π)^k (D_{|m-n|} - D_{m+n})
//! ```
//!
//! Polynomial potentials add one such moment combination per monomial.

use std::fmt;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::eigen::SymMatrix;
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::potentials::Potential;
use crate::precision::{precision_of, round_to, to_decimal, BigReal, Precision};
use crate::specialfns::{descending_factorial, hurwitz_zeta, zeta_even};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

fn check_k(k: u32) -> Result<()> {
    if k < 2 || !k.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "exponent k must be an even integer >= 2, got {k}"
        )));
    }
    Ok(())
}

/// Cosine moment `D_s` of `x^k` on `[0, π]`.
pub fn d_coefficient(k: u32, s: u32, prec: Precision) -> Result<BigReal> {
    check_k(k)?;
    Ok(DTable::new(k, s as usize, prec).values[s as usize].clone())
}

/// `D_0 ..= D_max` for one exponent at one precision.
#[derive(Clone, Debug)]
pub struct DTable {
    k: u32,
    values: Vec<BigReal>,
}

impl DTable {
    pub fn new(k: u32, max_s: usize, prec: Precision) -> Self {
        // The alternating sum loses a few digits for small s.
        let wp = prec.guarded();
        let bits = wp.bits();
        let pi = wp.pi();
        let pi2 = Float::with_val(bits, pi.square_ref());
        // coefficients k!/(k-2i-1)! π^{k-2i-2}, i = 0..k/2-1
        let half = (k / 2) as usize;
        let mut coeffs = Vec::with_capacity(half);
        let mut pi_pow = Float::with_val(bits, (&pi).pow(k - 2));
        for i in 0..half {
            let fall = descending_factorial(k, 2 * i as u32 + 1).expect("2i+1 <= k");
            coeffs.push(Float::with_val(bits, &pi_pow * &fall));
            pi_pow /= &pi2;
        }
        let d0 = Float::with_val(bits, (&pi).pow(k)) / (k + 1);
        let mut values = Vec::with_capacity(max_s + 1);
        values.push(round_to(&d0, prec));
        for s in 1..=max_s {
            let s2 = Float::with_val(bits, s as u32).square();
            let mut inv = Float::with_val(bits, s2.recip_ref());
            let mut acc = Float::new(bits);
            for (i, c) in coeffs.iter().enumerate() {
                let term = Float::with_val(bits, c * &inv);
                if (i + s) % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
                inv /= &s2;
            }
            values.push(round_to(&acc, prec));
        }
        Self { k, values }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn get(&self, s: usize) -> &BigReal {
        &self.values[s]
    }
}

/// Kinetic (diagonal) part of the `m`-th basis function, `m` 1-based.
pub fn kinetic_diagonal(parity: Parity, m: usize, length: &BigReal) -> BigReal {
    let bits = length.prec();
    let pi = Float::with_val(bits, rug::float::Constant::Pi);
    let wave = match parity {
        Parity::Even => Float::with_val(bits, 2 * m as u32 - 1) / 2u32,
        Parity::Odd => Float::with_val(bits, m as u32),
    };
    let ratio = wave * pi / length;
    Float::with_val(bits, ratio.square_ref())
}

/// Hamiltonian block of one parity in the box basis.
#[derive(Clone, Debug)]
pub struct TrigHamiltonian {
    pub parity: Parity,
    pub n: usize,
    pub length: BigReal,
    pub potential: Potential,
    pub matrix: SymMatrix,
}

impl TrigHamiltonian {
    /// Header `# parity k N L precision` followed by the rows.
    pub fn write_dump<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "# {} {} {} {} {}",
            self.parity,
            self.potential.leading_exponent(),
            self.n,
            to_decimal(&self.length),
            self.matrix.precision().bits()
        )?;
        self.matrix.write_rows(out)
    }

    /// `ψ(x) = Σ_m c_m φ_m(x)` for an eigenvector `coeffs` of this block.
    pub fn wavefunction(&self, coeffs: &[BigReal], x: &BigReal) -> BigReal {
        let bits = self.length.prec();
        let pi = Float::with_val(bits, rug::float::Constant::Pi);
        let norm = Float::with_val(bits, self.length.recip_ref()).sqrt();
        let mut acc = Float::new(bits);
        for (idx, c) in coeffs.iter().enumerate() {
            let m = idx + 1;
            let phase = match self.parity {
                Parity::Even => Float::with_val(bits, 2 * m as u32 - 1) / 2u32,
                Parity::Odd => Float::with_val(bits, m as u32),
            } * &pi
                * x
                / &self.length;
            let basis = match self.parity {
                Parity::Even => phase.cos(),
                Parity::Odd => phase.sin(),
            };
            acc += basis * c;
        }
        acc * norm
    }
}

/// Per-monomial weights `a_i (L/π)^i` and moment tables up to `max_s`.
fn potential_parts(
    pot: &Potential,
    length: &BigReal,
    max_s: usize,
    prec: Precision,
) -> Vec<(BigReal, DTable)> {
    let bits = prec.bits();
    let scaled = Float::with_val(bits, length / &prec.pi());
    pot.terms()
        .iter()
        .map(|t| {
            let weight = Float::with_val(bits, (&scaled).pow(t.exponent)) * &t.coefficient;
            (weight, DTable::new(t.exponent, max_s, prec))
        })
        .collect()
}

pub fn assemble(
    pot: &Potential,
    parity: Parity,
    n: usize,
    length: &BigReal,
    exec: Exec,
) -> Result<TrigHamiltonian> {
    if n == 0 {
        return Err(Error::InvalidArgument("basis size N must be >= 1".into()));
    }
    if *length <= 0 {
        return Err(Error::InvalidArgument(
            "box half-width L must be positive".into(),
        ));
    }
    let prec = precision_of(length);
    let parts = potential_parts(pot, length, 2 * n, prec);
    let matrix = SymMatrix::from_upper_fn(n, prec, exec, |i, j| {
        let (m, k) = (i + 1, j + 1);
        let diff = k - m;
        let mut value = Float::new(prec.bits());
        for (weight, table) in &parts {
            let combo = match parity {
                Parity::Even => {
                    Float::with_val(prec.bits(), table.get(m + k - 1) + table.get(diff))
                }
                Parity::Odd => Float::with_val(prec.bits(), table.get(diff) - table.get(m + k)),
            };
            value += combo * weight;
        }
        if i == j {
            value += kinetic_diagonal(parity, m, length);
        }
        value
    });
    Ok(TrigHamiltonian {
        parity,
        n,
        length: length.clone(),
        potential: pot.clone(),
        matrix,
    })
}

pub fn assemble_even(
    pot: &Potential,
    n: usize,
    length: &BigReal,
    exec: Exec,
) -> Result<TrigHamiltonian> {
    assemble(pot, Parity::Even, n, length, exec)
}

pub fn assemble_odd(
    pot: &Potential,
    n: usize,
    length: &BigReal,
    exec: Exec,
) -> Result<TrigHamiltonian> {
    assemble(pot, Parity::Odd, n, length, exec)
}

/// Sum of the diagonal of one parity block without building the matrix.
pub fn diagonal_sum(pot: &Potential, parity: Parity, n: usize, length: &BigReal) -> BigReal {
    let prec = precision_of(length);
    let parts = potential_parts(pot, length, 2 * n, prec);
    let mut total = prec.zero();
    for m in 1..=n {
        total += kinetic_diagonal(parity, m, length);
        for (weight, table) in &parts {
            let combo = match parity {
                Parity::Even => Float::with_val(prec.bits(), table.get(2 * m - 1) + table.get(0)),
                Parity::Odd => Float::with_val(prec.bits(), table.get(0) - table.get(2 * m)),
            };
            total += combo * weight;
        }
    }
    total
}

/// `c_i = π^{k-2i-2} k! / ((-4)^{i+1} (k-2i-1)!)`, the weights of the zeta
/// terms in the odd-index moment sum.
fn odd_sum_weight(k: u32, i: u32, prec: Precision) -> BigReal {
    let bits = prec.bits();
    let pi = prec.pi();
    let fall = descending_factorial(k, 2 * i + 1).expect("2i+1 <= k");
    let four = Integer::from(4).pow(i + 1);
    let mut w = Float::with_val(bits, pi.pow(k - 2 * i - 2)) * &fall / &four;
    if i.is_multiple_of(2) {
        w = -w;
    }
    w
}

/// `Σ_{n=1}^N D_{2n-1}` through Riemann and Hurwitz zeta values.
pub fn odd_moment_sum(k: u32, n: usize, prec: Precision) -> Result<BigReal> {
    check_k(k)?;
    let wp = prec.guarded();
    let shift = Rational::from((2 * n as u64 + 1, 2u64));
    let mut total = wp.zero();
    for i in 0..k / 2 {
        let s = 2 * i + 2;
        let full = zeta_even(s, wp)? * ((1u64 << s) - 1);
        let tail = hurwitz_zeta(s, &shift, wp)?;
        total += odd_sum_weight(k, i, wp) * (full - tail);
    }
    Ok(round_to(&total, prec))
}

/// `Σ_{n=1}^N D_{2n}`; even-index moments have `(-1)^{i+s} = (-1)^i`, and
/// `Σ (2n)^{-2m} = 4^{-m} (ζ(2m) - ζ(2m, N+1))`.
pub fn even_moment_sum(k: u32, n: usize, prec: Precision) -> Result<BigReal> {
    check_k(k)?;
    let wp = prec.guarded();
    let shift = Rational::from(n as u64 + 1);
    let mut total = wp.zero();
    for i in 0..k / 2 {
        let s = 2 * i + 2;
        let diff = zeta_even(s, wp)? - hurwitz_zeta(s, &shift, wp)?;
        // odd_sum_weight carries 1/(-4)^{i+1}; here the sign is (-1)^i / 4^{i+1}.
        let w = -odd_sum_weight(k, i, wp);
        total += w * diff;
    }
    Ok(round_to(&total, prec))
}

/// The bracket `Σ_{n=1}^N D_{2n-1} + N D_0` multiplying `(L/π)^k` in the
/// even-sector trace.
pub fn even_trace_potential_factor(k: u32, n: usize, prec: Precision) -> Result<BigReal> {
    let wp = prec.guarded();
    let d0 = Float::with_val(wp.bits(), wp.pi().pow(k)) / (k + 1);
    let total = odd_moment_sum(k, n, wp)? + d0 * (n as u32);
    Ok(round_to(&total, prec))
}

fn check_trace_args(n: usize, length: &BigReal) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("basis size N must be >= 1".into()));
    }
    if *length <= 0 {
        return Err(Error::InvalidArgument(
            "box half-width L must be positive".into(),
        ));
    }
    Ok(())
}

/// Closed-form trace of the even block for `V = x^k`:
/// `π²(4N²-1)N/(12L²) + (L/π)^k [Σ D_{2n-1} + N D_0]`.
pub fn trace_closed_form(k: u32, n: usize, length: &BigReal, prec: Precision) -> Result<BigReal> {
    check_trace_args(n, length)?;
    let wp = prec.guarded();
    let bits = wp.bits();
    let l = round_to(length, wp);
    let pi = wp.pi();
    let nn = n as u64;
    let kinetic = Float::with_val(bits, pi.square_ref()) * (4 * nn * nn - 1) * nn
        / (Float::with_val(bits, l.square_ref()) * 12u32);
    let scaled = Float::with_val(bits, &l / &pi).pow(k);
    let total = kinetic + scaled * even_trace_potential_factor(k, n, wp)?;
    Ok(round_to(&total, prec))
}

/// Closed-form trace of the odd block: `π² N(N+1)(2N+1)/(6L²) + (L/π)^k [N D_0 - Σ D_{2n}]`.
pub fn trace_closed_form_odd(
    k: u32,
    n: usize,
    length: &BigReal,
    prec: Precision,
) -> Result<BigReal> {
    check_trace_args(n, length)?;
    let wp = prec.guarded();
    let bits = wp.bits();
    let l = round_to(length, wp);
    let pi = wp.pi();
    let nn = n as u64;
    let kinetic = Float::with_val(bits, pi.square_ref()) * (nn * (nn + 1) * (2 * nn + 1))
        / (Float::with_val(bits, l.square_ref()) * 6u32);
    let d0 = Float::with_val(bits, pi.clone().pow(k)) / (k + 1);
    let bracket = d0 * (n as u32) - even_moment_sum(k, n, wp)?;
    let scaled = Float::with_val(bits, &l / &pi).pow(k);
    Ok(round_to(&(kinetic + scaled * bracket), prec))
}
