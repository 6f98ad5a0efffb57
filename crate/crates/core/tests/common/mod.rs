//! Property checks shared by the proptest suite and the acceptance runner.
//! Each takes plain arguments and reports failures as `TestCaseError` so it
//! can be driven by `proptest!` or by a hand-held `TestRunner`.

#![allow(dead_code)]

use optbasis::eigen::{jacobi_eigen, JacobiOptions};
use optbasis::lengths::{length_for_rule, LengthRule};
use optbasis::specialfns::{hurwitz_zeta, zeta_even};
use optbasis::trigbasis::{assemble, d_coefficient, Parity};
use optbasis::{Exec, Potential, Precision};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rug::ops::Pow;
use rug::{Float, Rational};

pub fn prec(bits: u32) -> Precision {
    Precision::new(bits).unwrap()
}

pub fn even_k(lo: u32, hi: u32) -> impl Strategy<Value = u32> {
    (lo / 2..=hi / 2).prop_map(|h| 2 * h)
}

fn rel(a: &Float, b: &Float) -> Float {
    Float::with_val(a.prec(), a - b).abs() / b.clone().abs()
}

/// `L = (π² α)^{1/(k+2)} N^{2/(k+2)}`, rebuilt from scratch with the rule's α.
pub fn length_identity(rule: LengthRule, k: u32, n: usize) -> Result<(), TestCaseError> {
    let p = prec(192);
    let r = length_for_rule(rule, k, n, p).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let bits = 192;
    let pi2 = Float::with_val(bits, rug::float::Constant::Pi).square();
    let inv = Float::with_val(bits, k + 2).recip();
    let expected = Float::with_val(bits, pi2 * &r.alpha).pow(&inv)
        * Float::with_val(bits, n as u64).pow(Float::with_val(bits, 2u32) * &inv);
    let err = rel(&r.length, &expected);
    prop_assert!(err < 1e-50, "{rule:?} k={k} N={n}: rel err {err}");
    Ok(())
}

pub fn length_ordering(k: u32, n: usize) -> Result<(), TestCaseError> {
    let p = prec(128);
    let get = |rule| length_for_rule(rule, k, n, p).unwrap().length;
    let (op1, s, op2) = (
        get(LengthRule::Op1),
        get(LengthRule::Schwartz),
        get(LengthRule::Op2),
    );
    prop_assert!(op1 < s && s < op2, "k={k} N={n}: {op1} {s} {op2}");
    Ok(())
}

/// At fixed L the N-block is a leading principal submatrix of the
/// (N+1)-block, so the spectra must interlace.
pub fn interlacing(k: u32, n: usize, length: f64, parity: Parity) -> Result<(), TestCaseError> {
    let p = prec(128);
    let pot = Potential::monomial(k).unwrap();
    let l = p.from_f64(length);
    let small = assemble(&pot, parity, n, &l, Exec::Sequential).unwrap();
    let big = assemble(&pot, parity, n + 1, &l, Exec::Sequential).unwrap();
    let a = jacobi_eigen(&small.matrix, &JacobiOptions::default())
        .unwrap()
        .values;
    let b = jacobi_eigen(&big.matrix, &JacobiOptions::default())
        .unwrap()
        .values;
    let slack = |x: &Float| Float::with_val(128, x.clone().abs() * 1e-30) + 1e-30;
    for i in 0..n {
        let s = slack(&a[i]);
        prop_assert!(
            Float::with_val(128, &b[i] - &s) <= a[i]
                && a[i] <= Float::with_val(128, &b[i + 1] + &s),
            "k={k} N={n} L={length} {parity}: level {i} breaks interlacing"
        );
    }
    Ok(())
}

/// `ζ(s, 1/2) = (2^s - 1) ζ(s)`.
pub fn zeta_half_shift(s: u32) -> Result<(), TestCaseError> {
    let p = prec(160);
    let half = Rational::from((1, 2));
    let lhs = hurwitz_zeta(s, &half, p).unwrap();
    let rhs = zeta_even(s, p).unwrap() * (Float::with_val(160, Float::u_exp(1, s as i32)) - 1u32);
    let err = rel(&lhs, &rhs);
    prop_assert!(err < 1e-45, "s={s}: rel err {err}");
    Ok(())
}

/// Composite five-point Gauss-Legendre in f64 on `[0, π]`.
pub fn cosine_moment_quadrature(k: u32, s: u32) -> f64 {
    let a = (5.0 - 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
    let b = (5.0 + 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
    let wa = (322.0 + 13.0 * 70f64.sqrt()) / 900.0;
    let wb = (322.0 - 13.0 * 70f64.sqrt()) / 900.0;
    let nodes = [(0.0, 128.0 / 225.0), (a, wa), (-a, wa), (b, wb), (-b, wb)];
    let panels = 400;
    let width = std::f64::consts::PI / panels as f64;
    let f = |x: f64| x.powi(k as i32) * (s as f64 * x).cos();
    let mut total = 0.0;
    for j in 0..panels {
        let mid = (j as f64 + 0.5) * width;
        for (t, w) in nodes {
            total += w * f(mid + 0.5 * width * t);
        }
    }
    total * 0.5 * width / std::f64::consts::PI
}

pub fn moment_vs_quadrature(k: u32, s: u32) -> Result<(), TestCaseError> {
    let exact = d_coefficient(k, s, prec(128)).unwrap().to_f64();
    let quad = cosine_moment_quadrature(k, s);
    // Scale by D_0 = π^k/(k+1): the moments cancel heavily for large s.
    let scale = std::f64::consts::PI.powi(k as i32) / (k + 1) as f64;
    prop_assert!(
        (exact - quad).abs() <= 1e-11 * scale,
        "k={k} s={s}: closed form {exact:e}, quadrature {quad:e}"
    );
    Ok(())
}

pub fn parity() -> impl Strategy<Value = Parity> {
    prop_oneof![Just(Parity::Even), Just(Parity::Odd)]
}
